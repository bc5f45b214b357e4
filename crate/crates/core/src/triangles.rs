//! Rational spherical triangle measurements and their correspondence with Ω3.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::angle::{omega3_member, RationalAngle, Tuple5};
use crate::arith::divisors;
use crate::error::{Error, Result};
use crate::solver::{search, verify_solution, DenominatorSpec, Sign};

/// `(E, a, b, c)`: area and side lengths on the unit sphere, as multiples of π.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Measurement {
    pub e: RationalAngle,
    pub a: RationalAngle,
    pub b: RationalAngle,
    pub c: RationalAngle,
}

impl Measurement {
    pub fn new(e: RationalAngle, a: RationalAngle, b: RationalAngle, c: RationalAngle) -> Self {
        Measurement { e, a, b, c }
    }

    pub fn from_pairs(p: [(i64, i64); 4]) -> Self {
        let [e, a, b, c] = p.map(|(n, d)| RationalAngle::of(n, d));
        Measurement { e, a, b, c }
    }

    /// Sides reordered ascending.
    pub fn sorted(&self) -> Measurement {
        let mut s = [self.a, self.b, self.c];
        s.sort();
        Measurement { e: self.e, a: s[0], b: s[1], c: s[2] }
    }

    pub fn lcm(&self) -> u64 {
        [self.e, self.a, self.b, self.c].iter().fold(1i64, |acc, x| acc.lcm(&x.den())) as u64
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.e, self.a, self.b, self.c)
    }
}

fn zero() -> RationalAngle {
    RationalAngle::ZERO
}

fn one() -> RationalAngle {
    RationalAngle::of(1, 1)
}

fn two() -> RationalAngle {
    RationalAngle::of(2, 1)
}

/// The first violated link of `0 < a+b−c ≤ a−b+c ≤ −a+b+c < a+b+c < 2π`, if any.
pub fn ineq_violation(m: &Measurement) -> Option<&'static str> {
    let (a, b, c) = (m.a, m.b, m.c);
    let p = a + b - c;
    let q = a - b + c;
    let r = -a + b + c;
    let s = a + b + c;
    if p <= zero() {
        Some("a+b-c > 0")
    } else if p > q {
        Some("a+b-c <= a-b+c")
    } else if q > r {
        Some("a-b+c <= -a+b+c")
    } else if r >= s {
        Some("-a+b+c < a+b+c")
    } else if s >= two() {
        Some("a+b+c < 2")
    } else {
        None
    }
}

/// `0 < a ≤ b ≤ c < π`, `0 < E < 2π`.
pub fn in_measurement_range(m: &Measurement) -> bool {
    zero() < m.a && m.a <= m.b && m.b <= m.c && m.c < one() && zero() < m.e && m.e < two()
}

/// `φ(E,a,b,c) = (E/4, (a+b−c)/4, (a−b+c)/4, (−a+b+c)/4, (a+b+c)/4)`, without domain checks.
fn quarter_angles(m: &Measurement) -> Tuple5 {
    let (e, a, b, c) = (m.e.ratio(), m.a.ratio(), m.b.ratio(), m.c.ratio());
    let f = |x| RationalAngle::from_ratio(x / 4);
    Tuple5([f(e), f(a + b - c), f(a - b + c), f(-a + b + c), f(a + b + c)])
}

/// Exact L'Huilier check on the sorted measurement; rejects inputs whose quarter angles leave (0, π/2).
pub fn lhuilier_check(m: &Measurement) -> Result<bool> {
    let s = m.sorted();
    if !in_measurement_range(&s) {
        return Err(Error::OutOfRange(format!("{m}: need 0 < a ≤ b ≤ c < π and 0 < E < 2π")));
    }
    if let Some(v) = ineq_violation(&s) {
        return Err(Error::OutOfRange(format!("{m}: violates {v}")));
    }
    verify_solution(&quarter_angles(&s), Sign::Plus)
}

/// Ordering, ranges, the inequality chain, and the exact L'Huilier relation.
pub fn omega2_valid(m: &Measurement) -> bool {
    in_measurement_range(m) && ineq_violation(m).is_none() && lhuilier_check(m).unwrap_or(false)
}

pub fn phi_map(m: &Measurement) -> Result<Tuple5> {
    if !omega2_valid(m) {
        return Err(Error::OutOfRange(format!("{m} is not a valid measurement")));
    }
    Ok(quarter_angles(m))
}

/// `ψ(x) = (4x₀, 2x₁+2x₂, 2x₁+2x₃, 2x₂+2x₃)`.
pub fn psi_map(t: &Tuple5) -> Result<Measurement> {
    if !omega3_member(t) || !verify_solution(t, Sign::Plus)? {
        return Err(Error::OutOfRange(format!("{t} is not in Ω3")));
    }
    let x = &t.0;
    Ok(Measurement::new(x[0] * 4, (x[1] + x[2]) * 2, (x[1] + x[3]) * 2, (x[2] + x[3]) * 2))
}

/// The seven measurements with mutually distinct sides, as printed.
pub fn lambda2() -> Vec<Measurement> {
    [
        [(1, 2), (2, 5), (1, 2), (4, 5)],
        [(1, 4), (1, 4), (1, 2), (2, 3)],
        [(1, 2), (1, 4), (2, 3), (3, 4)],
        [(5, 4), (1, 2), (2, 3), (3, 4)],
        [(1, 1), (2, 5), (2, 3), (4, 5)],
        [(3, 2), (1, 2), (2, 3), (4, 5)],
        [(1, 2), (2, 5), (1, 2), (2, 3)],
    ]
    .into_iter()
    .map(Measurement::from_pairs)
    .collect()
}

/// `(1, 1/2, 2/3, 2/3)`, `(r, r, 1/2, 1/2)` with `0 < r ≤ 1/2`, or `(r, 1/2, 1/2, r)` with `1/2 < r < 1`.
pub fn in_lambda1(m: &Measurement) -> bool {
    let h = RationalAngle::HALF;
    if *m == Measurement::from_pairs([(1, 1), (1, 2), (2, 3), (2, 3)]) {
        return true;
    }
    (m.e == m.a && m.b == h && m.c == h && zero() < m.e && m.e <= h)
        || (m.e == m.c && m.a == h && m.b == h && h < m.e && m.e < one())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum LambdaClass {
    Lambda1,
    Lambda2,
    Neither,
}

impl LambdaClass {
    pub fn of(m: &Measurement) -> LambdaClass {
        if lambda2().contains(m) {
            LambdaClass::Lambda2
        } else if in_lambda1(m) {
            LambdaClass::Lambda1
        } else {
            LambdaClass::Neither
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LambdaClass::Lambda1 => "lambda1",
            LambdaClass::Lambda2 => "lambda2",
            LambdaClass::Neither => "none",
        }
    }
}

fn measurements_from(spec: &DenominatorSpec) -> Result<BTreeSet<Measurement>> {
    let report = search(spec, Sign::Plus)?;
    report.solutions.iter().filter(|t| omega3_member(t)).map(psi_map).collect()
}

/// All valid measurements with lcm ≤ D, from an Ω3 search with lcm ≤ 4D.
pub fn search_measurements(d: u64) -> Result<Vec<Measurement>> {
    let all = measurements_from(&DenominatorSpec::MaxLcm((4 * d).max(3)))?;
    Ok(all.into_iter().filter(|m| m.lcm() <= d).collect())
}

/// All valid measurements whose four entries all have denominator `p`.
pub fn prime_denominator_check(p: u64) -> Result<Vec<Measurement>> {
    if !crate::arith::is_prime(p) {
        return Err(Error::Invalid(format!("{p} is not prime")));
    }
    let spec = DenominatorSpec::fixed(divisors(4 * p).into_iter().filter(|&d| d >= 3));
    let all = measurements_from(&spec)?;
    let p = p as i64;
    Ok(all
        .into_iter()
        .filter(|m| [m.e, m.a, m.b, m.c].iter().all(|x| x.den() == p))
        .collect())
}
