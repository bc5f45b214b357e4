//! Exact image of `tan x` in the Conrad basis, modulo roots of unity.

use crate::angle::RationalAngle;
use crate::arith::mod_inverse;
use crate::basis::{build_presentation, BasisVector, Presentation};
use crate::error::{Error, Result};

fn check(x: RationalAngle, level: u64) -> Result<()> {
    if !x.in_open_quarter_turn() {
        return Err(Error::OutOfRange(format!("{x} is not in (0, 1/2)")));
    }
    if level % x.den() as u64 != 0 {
        return Err(Error::Invalid(format!("denominator of {x} does not divide level {level}")));
    }
    Ok(())
}

/// Accumulates `k · v(d, c)` into `out`, expressed at the presentation's level.
fn push(out: &mut [i64], pres: &Presentation, d: u64, c: i64, k: i64) -> Result<()> {
    let a = (pres.level / d) as i64 * c;
    for (o, x) in out.iter_mut().zip(pres.generator_coords(a)?) {
        *o += k * x;
    }
    Ok(())
}

/// Dense coordinates of `tan x` in the presentation's basis, by the four denominator shapes.
pub fn tan_dense(x: RationalAngle, pres: &Presentation) -> Result<Vec<i64>> {
    check(x, pres.level)?;
    let (a, d) = (x.num(), x.den() as u64);
    let mut out = vec![0i64; pres.rank()];
    if d == 4 {
        return Ok(out);
    }
    if d % 2 == 1 {
        push(&mut out, pres, d, a, 2)?;
        push(&mut out, pres, d, 2 * a, -1)?;
    } else if d % 4 == 2 {
        let n = d / 2;
        let h = mod_inverse(2, n).expect("odd modulus") as i64 * a;
        push(&mut out, pres, n, a, 1)?;
        push(&mut out, pres, n, h, -2)?;
    } else if d % 8 == 4 {
        let n = d / 4;
        let h = mod_inverse(2, n).expect("odd modulus") as i64 * a;
        // v(4n,a+2n) = v(2n,a)/v(4n,a) and v(2n,a) = v(n,a)/v(n,a/2).
        push(&mut out, pres, d, a, 2)?;
        push(&mut out, pres, n, a, -1)?;
        push(&mut out, pres, n, h, 1)?;
    } else {
        push(&mut out, pres, d, a, 2)?;
        push(&mut out, pres, d / 2, a, -1)?;
    }
    Ok(out)
}

/// `tan x` at level `level`; requires `0 < x < π/2` and `den(x) | level`.
pub fn tan_vector(x: RationalAngle, level: u64) -> Result<BasisVector> {
    check(x, level)?;
    let pres = build_presentation(level)?;
    Ok(pres.to_vector(&tan_dense(x, &pres)?))
}

/// `Σ k · tan x` at one level.
pub fn product_vector(xs: &[(RationalAngle, i64)], level: u64) -> Result<BasisVector> {
    let pres = build_presentation(level)?;
    let mut acc = vec![0i64; pres.rank()];
    for &(x, k) in xs {
        for (a, t) in acc.iter_mut().zip(tan_dense(x, &pres)?) {
            *a += k * t;
        }
    }
    Ok(pres.to_vector(&acc))
}

/// `tan(aπ/d) = v(d,a)² v(d,2a)⁻¹` for any denominator; an independent route used in tests.
pub fn tan_vector_uniform(x: RationalAngle, level: u64) -> Result<BasisVector> {
    check(x, level)?;
    let pres = build_presentation(level)?;
    let mut out = vec![0i64; pres.rank()];
    push(&mut out, &pres, x.den() as u64, x.num(), 2)?;
    push(&mut out, &pres, x.den() as u64, 2 * x.num(), -1)?;
    Ok(pres.to_vector(&out))
}
