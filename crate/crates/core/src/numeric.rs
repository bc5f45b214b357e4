//! High-precision real evaluation used as a secondary check beside exact vector equality.

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, RoundingMode};

pub const DEFAULT_PRECISION: usize = 192;
pub const PRECISION_ENV: &str = "LHUILIER_PRECISION";
/// Absolute tolerance on log-magnitudes.
pub const LOG_TOLERANCE: f64 = 1e-25;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

/// Working precision in bits; the environment override is clamped to at least 128.
pub fn precision() -> usize {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .map(|p| p.max(128))
        .unwrap_or(DEFAULT_PRECISION)
}

fn pi_times(num: i64, den: i64, p: usize, cc: &mut Consts) -> BigFloat {
    let pi = cc.pi(p, RM);
    pi.mul(&from_i64(num, p), p, RM).div(&from_i64(den, p), p, RM)
}

pub fn from_i64(x: i64, p: usize) -> BigFloat {
    let b = BigFloat::from_u64(x.unsigned_abs(), p);
    if x < 0 {
        b.neg()
    } else {
        b
    }
}

/// `ln|1 − ζ_den^num| = ln|2 sin(π·num/den)|`; requires `den ∤ num`.
pub fn ln_abs_one_minus_root(num: i64, den: i64, p: usize) -> BigFloat {
    CONSTS.with(|c| {
        let cc = &mut c.borrow_mut();
        let s = pi_times(num, den, p, cc).sin(p, RM, cc);
        let two = BigFloat::from_u64(2, p);
        two.mul(&s, p, RM).abs().ln(p, RM, cc)
    })
}

/// `ln|tan(π·num/den)|`.
pub fn ln_abs_tan(num: i64, den: i64, p: usize) -> BigFloat {
    CONSTS.with(|c| {
        let cc = &mut c.borrow_mut();
        pi_times(num, den, p, cc).tan(p, RM, cc).abs().ln(p, RM, cc)
    })
}

/// `tan(π·num/den)` with its sign.
pub fn tan_pi(num: i64, den: i64, p: usize) -> BigFloat {
    CONSTS.with(|c| {
        let cc = &mut c.borrow_mut();
        pi_times(num, den, p, cc).tan(p, RM, cc)
    })
}

pub fn exp(x: &BigFloat, p: usize) -> BigFloat {
    CONSTS.with(|c| x.exp(p, RM, &mut c.borrow_mut()))
}

pub fn add(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.add(b, p, RM)
}

pub fn sub(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.sub(b, p, RM)
}

pub fn mul(a: &BigFloat, b: &BigFloat, p: usize) -> BigFloat {
    a.mul(b, p, RM)
}

pub fn scale(a: &BigFloat, k: i64, p: usize) -> BigFloat {
    a.mul(&from_i64(k, p), p, RM)
}

/// `|a − b| < tol`.
pub fn within(a: &BigFloat, b: &BigFloat, tol: f64, p: usize) -> bool {
    let d = a.sub(b, p, RM).abs();
    matches!(d.cmp(&BigFloat::from_f64(tol, p)), Some(c) if c < 0)
}

pub fn to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_identity() {
        let p = 160;
        // |1 − ζ_6| = 1
        assert!(within(&ln_abs_one_minus_root(1, 6, p), &from_i64(0, p), 1e-40, p));
        // tan(π/4) = 1
        assert!(within(&ln_abs_tan(1, 4, p), &from_i64(0, p), 1e-40, p));
        assert!((to_f64(&tan_pi(1, 3, p)) - 3f64.sqrt()).abs() < 1e-12);
        let one = from_i64(1, p);
        assert!(!within(&from_i64(0, p), &one, 1e-25, p));
        assert!(!within(&one, &from_i64(0, p), 1e-25, p));
    }
}
