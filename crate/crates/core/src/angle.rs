//! Rational multiples of π, 5-tuples, and the Z/2×S4 action on them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The angle `(num/den)·π`, always reduced with a positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RationalAngle(Ratio<i64>);

impl RationalAngle {
    pub const ZERO: RationalAngle = RationalAngle(Ratio::new_raw(0, 1));
    pub const QUARTER: RationalAngle = RationalAngle(Ratio::new_raw(1, 4));
    pub const HALF: RationalAngle = RationalAngle(Ratio::new_raw(1, 2));

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(RationalAngle(Ratio::new(num, den)))
    }

    /// Panicking constructor for literals.
    pub fn of(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("nonzero denominator")
    }

    pub fn from_ratio(r: Ratio<i64>) -> Self {
        RationalAngle(r)
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    pub fn num(self) -> i64 {
        *self.0.numer()
    }

    pub fn den(self) -> i64 {
        *self.0.denom()
    }

    /// `π/2 − x`.
    pub fn complement(self) -> Self {
        RationalAngle::HALF - self
    }

    /// `0 < x < π/2`.
    pub fn in_open_quarter_turn(self) -> bool {
        self.0.is_positive() && self.0 < RationalAngle::HALF.0
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(self) -> Self {
        RationalAngle(self.0.abs())
    }

    /// Numerator of `x` written over the denominator `level`; requires `den | level`.
    pub fn numerator_at(self, level: i64) -> Option<i64> {
        if level % self.den() != 0 {
            return None;
        }
        Some(self.num() * (level / self.den()))
    }
}

impl Add for RationalAngle {
    type Output = RationalAngle;
    fn add(self, o: Self) -> Self {
        RationalAngle(self.0 + o.0)
    }
}

impl Sub for RationalAngle {
    type Output = RationalAngle;
    fn sub(self, o: Self) -> Self {
        RationalAngle(self.0 - o.0)
    }
}

impl Neg for RationalAngle {
    type Output = RationalAngle;
    fn neg(self) -> Self {
        RationalAngle(-self.0)
    }
}

impl Mul<i64> for RationalAngle {
    type Output = RationalAngle;
    fn mul(self, k: i64) -> Self {
        RationalAngle(self.0 * k)
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den() == 1 {
            write!(f, "{}", self.num())
        } else {
            write!(f, "{}/{}", self.num(), self.den())
        }
    }
}

impl FromStr for RationalAngle {
    type Err = Error;

    /// Accepts `num/den`, `num`, optionally suffixed by `pi` or `π`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t
            .strip_suffix("π")
            .or_else(|| t.strip_suffix("pi"))
            .unwrap_or(t)
            .trim();
        let bad = || Error::Invalid(format!("cannot parse angle {s:?}"));
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        RationalAngle::new(n, d)
    }
}

impl Serialize for RationalAngle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalAngle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn reduce_angle(num: i64, den: i64) -> Result<RationalAngle> {
    RationalAngle::new(num, den)
}

/// A permutation of the tail positions 1..4, stored zero-based:
/// acting sends `(x0, x1..x4)` to `(x0, x_{1+p[0]}, .., x_{1+p[3]})`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Perm4(pub [u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    /// All 24 permutations in lexicographic order.
    pub fn all() -> Vec<Perm4> {
        let mut out = Vec::with_capacity(24);
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    for d in 0..4u8 {
                        let p = [a, b, c, d];
                        let mut seen = [false; 4];
                        if p.iter().all(|&x| !std::mem::replace(&mut seen[x as usize], true)) {
                            out.push(Perm4(p));
                        }
                    }
                }
            }
        }
        out
    }

    /// The permutation whose action equals acting by `other` first, then `self`.
    pub fn compose(self, other: Perm4) -> Perm4 {
        let mut r = [0u8; 4];
        for (i, slot) in r.iter_mut().enumerate() {
            *slot = other.0[self.0[i] as usize];
        }
        Perm4(r)
    }

    pub fn inverse(self) -> Perm4 {
        let mut r = [0u8; 4];
        for i in 0..4 {
            r[self.0[i] as usize] = i as u8;
        }
        Perm4(r)
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{}]", self.0[0] + 1, self.0[1] + 1, self.0[2] + 1, self.0[3] + 1)
    }
}

/// An element of Z/2×S4: a tail permutation optionally followed by θ.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct GroupElement {
    pub theta: bool,
    pub perm: Perm4,
}

impl GroupElement {
    pub fn all() -> Vec<GroupElement> {
        let perms = Perm4::all();
        [false, true]
            .iter()
            .flat_map(|&theta| perms.iter().map(move |&perm| GroupElement { theta, perm }))
            .collect()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.theta {
            write!(f, "theta*{}", self.perm)
        } else {
            write!(f, "{}", self.perm)
        }
    }
}

/// An ordered 5-tuple `(x0, x1, x2, x3, x4)` of angles.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Tuple5(pub [RationalAngle; 5]);

impl Tuple5 {
    pub fn from_pairs(p: [(i64, i64); 5]) -> Tuple5 {
        Tuple5(p.map(|(n, d)| RationalAngle::of(n, d)))
    }

    pub fn parse(items: &[&str]) -> Result<Tuple5> {
        if items.len() != 5 {
            return Err(Error::Invalid(format!("expected 5 angles, got {}", items.len())));
        }
        let mut xs = [RationalAngle::ZERO; 5];
        for (slot, s) in xs.iter_mut().zip(items) {
            *slot = s.parse()?;
        }
        Ok(Tuple5(xs))
    }

    pub fn lcm(&self) -> i64 {
        self.0.iter().fold(1, |acc, x| acc.lcm(&x.den()))
    }

    pub fn s4_act(&self, p: Perm4) -> Tuple5 {
        let x = &self.0;
        Tuple5([
            x[0],
            x[1 + p.0[0] as usize],
            x[1 + p.0[1] as usize],
            x[1 + p.0[2] as usize],
            x[1 + p.0[3] as usize],
        ])
    }

    pub fn theta(&self) -> Tuple5 {
        Tuple5(self.0.map(RationalAngle::complement))
    }

    pub fn act(&self, g: GroupElement) -> Tuple5 {
        let t = self.s4_act(g.perm);
        if g.theta {
            t.theta()
        } else {
            t
        }
    }

    /// `x0` kept, tail sorted ascending.
    pub fn sorted_tail(&self) -> Tuple5 {
        let mut x = self.0;
        x[1..].sort();
        Tuple5(x)
    }

    pub fn all_in_open_quarter_turn(&self) -> bool {
        self.0.iter().all(|x| x.in_open_quarter_turn())
    }

    /// The distinct members of the Z/2×S4 orbit, each with one group element reaching it.
    pub fn orbit(&self) -> Vec<(GroupElement, Tuple5)> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for g in GroupElement::all() {
            let y = self.act(g);
            if seen.insert(y) {
                out.push((g, y));
            }
        }
        out
    }
}

impl fmt::Display for Tuple5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Result of [`canonical_rep`]; `boundary` marks the x0 = π/4, x1 + x4 = π/2 fallback.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Canonical {
    pub tuple: Tuple5,
    pub boundary: bool,
}

/// The orbit representative with x0 < π/4 and sorted tail, or x0 = π/4, sorted tail and x1 + x4 < π/2.
pub fn canonical_rep(t: &Tuple5) -> Result<Canonical> {
    if !t.all_in_open_quarter_turn() {
        return Err(Error::OutOfRange(t.to_string()));
    }
    let q = RationalAngle::QUARTER;
    let a = t.sorted_tail();
    let b = t.theta().sorted_tail();
    let x0 = t.0[0];
    if x0 < q {
        return Ok(Canonical { tuple: a, boundary: false });
    }
    if x0 > q {
        return Ok(Canonical { tuple: b, boundary: false });
    }
    let half = RationalAngle::HALF;
    let sa = a.0[1] + a.0[4];
    if sa < half {
        Ok(Canonical { tuple: a, boundary: false })
    } else if sa > half {
        Ok(Canonical { tuple: b, boundary: false })
    } else {
        let min = t.orbit().into_iter().map(|(_, y)| y).min().expect("orbit is nonempty");
        Ok(Canonical { tuple: min, boundary: true })
    }
}

/// `0 < x1 ≤ x2 ≤ x3 < x4 < π/2`, `x4 = x1 + x2 + x3`, `0 < x0 < π/2`.
pub fn omega3_member(t: &Tuple5) -> bool {
    let x = &t.0;
    let z = RationalAngle::ZERO;
    let h = RationalAngle::HALF;
    z < x[0]
        && x[0] < h
        && z < x[1]
        && x[1] <= x[2]
        && x[2] <= x[3]
        && x[3] < x[4]
        && x[4] < h
        && x[4] == x[1] + x[2] + x[3]
}
