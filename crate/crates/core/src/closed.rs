//! Closed-form relative basis representations of `v(4n, a)` and `v(n, a)` for odd squarefree
//! composite `n`, built from explicit index sets instead of linear algebra.
//!
//! Components are numbered from 1 as `p_1 < … < p_ℓ`. The components at 2 and 3 are fixed to
//! their normal values in every set; only the components at primes ≥ 5 vary. At level `4n` the
//! 2-component `(ā, 1)` counts as a unit when `ā = 0` and as a pole when `ā = 1`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::arith::{crt, factorize, is_squarefree, modulo};
use crate::basis::{relative_basis, BasisElement, BasisVector};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct ClusterData {
    pub level: u64,
    /// The input numerator reduced mod the level.
    pub a: u64,
    pub epsilon: i8,
    pub delta: usize,
    pub ell: usize,
    pub primes: Vec<u64>,
    /// `a_s` for each component; the 2-component stores `ā`.
    pub residues: Vec<u64>,
    pub len: usize,
    pub tau: usize,
    pub pol: BTreeSet<usize>,
    pub pol_bar: BTreeSet<usize>,
    pub pol_hat: BTreeSet<usize>,
    pub pmin: usize,
    pub e_set: BTreeSet<usize>,
    pub f_set: BTreeSet<usize>,
    pub e_count: usize,
    pub f_count: usize,
}

impl ClusterData {
    fn p(&self, s: usize) -> u64 {
        self.primes[s - 1]
    }

    fn x(&self, s: usize) -> u64 {
        self.residues[s - 1]
    }

    fn is_one(&self, s: usize, x: u64) -> bool {
        if self.p(s) == 2 {
            x == 0
        } else {
            x == 1
        }
    }

    fn is_pole(&self, s: usize, x: u64) -> bool {
        if self.p(s) == 2 {
            x == 1
        } else {
            x == self.p(s) - 1
        }
    }

    fn upper(&self, s: usize, x: u64) -> bool {
        let p = self.p(s);
        p >= 5 && (p + 1) / 2 <= x && x <= p - 2
    }

    /// `ord(r) = #{δ < s ≤ r : a_s = p_s − 1}`.
    pub fn ord(&self, r: usize) -> Option<usize> {
        if !self.e_set.contains(&r) || r <= self.delta {
            return None;
        }
        Some(self.e_set.range(self.delta + 1..=r).count())
    }

    /// Poles beyond `δ`.
    fn pol_delta(&self) -> BTreeSet<usize> {
        self.pol.range(self.delta + 1..).copied().collect()
    }

    fn pol_bar_delta(&self) -> BTreeSet<usize> {
        self.pol_bar.range(self.delta + 1..).copied().collect()
    }
}

/// Factorization shape: `(primes, delta)` for `4n` or `n` with `n` odd squarefree composite.
fn shape(level: u64) -> Result<(Vec<u64>, usize)> {
    let bad = || Error::ClosedForm {
        level,
        a: 0,
        reason: "level must be n or 4n with n odd, squarefree, composite".into(),
    };
    let n = if level % 4 == 0 { level / 4 } else { level };
    if n % 2 == 0 || n < 15 || !is_squarefree(n) || factorize(n).len() < 2 {
        return Err(bad());
    }
    let primes: Vec<u64> = factorize(level).into_iter().map(|(p, _)| p).collect();
    let delta = primes.iter().filter(|&&p| p == 2 || p == 3).count();
    Ok((primes, delta))
}

fn residues(primes: &[u64], a: i64) -> Vec<u64> {
    primes
        .iter()
        .map(|&p| {
            if p == 2 {
                // level = 4n: ā of the pair (ā, â) with â = 1.
                (modulo(a, 4) - 1) / 2
            } else {
                modulo(a, p)
            }
        })
        .collect()
}

pub fn cluster_data(level: u64, a: i64) -> Result<ClusterData> {
    let (primes, delta) = shape(level)?;
    if num_integer::gcd(modulo(a, level), level) != 1 {
        return Err(Error::ClosedForm { level, a, reason: "a must be prime to the level".into() });
    }
    let ell = primes.len();
    let mut cd = ClusterData {
        level,
        a: modulo(a, level),
        epsilon: 1,
        delta,
        ell,
        residues: residues(&primes, a),
        primes,
        len: 0,
        tau: 0,
        pol: BTreeSet::new(),
        pol_bar: BTreeSet::new(),
        pol_hat: BTreeSet::new(),
        pmin: 0,
        e_set: BTreeSet::new(),
        f_set: BTreeSet::new(),
        e_count: 0,
        f_count: 0,
    };
    cd.len = (1..=ell)
        .take_while(|&s| cd.is_one(s, cd.x(s)) || cd.is_pole(s, cd.x(s)))
        .last()
        .unwrap_or(0);
    cd.tau = if cd.len < ell { cd.len + 1 } else { ell };
    let s0 = delta + 1;
    let x0 = cd.x(s0);
    cd.epsilon = if cd.upper(s0, x0) || cd.is_one(s0, x0) { 1 } else { -1 };
    let eps = residues(&cd.primes, cd.epsilon as i64 * a);
    for s in 1..=ell {
        if cd.is_pole(s, eps[s - 1]) {
            cd.pol.insert(s);
        }
        if cd.is_pole(s, cd.x(s)) {
            cd.e_set.insert(s);
        }
        if cd.is_one(s, cd.x(s)) {
            cd.f_set.insert(s);
        }
    }
    cd.pol_bar = cd.pol.range(..=cd.len).copied().collect();
    cd.pol_hat = cd.pol.range(cd.len + 1..).copied().collect();
    cd.pmin = cd.pol_bar_delta().first().copied().unwrap_or(ell + 1);
    cd.e_count = cd.e_set.len();
    cd.f_count = cd.f_set.len();
    Ok(cd)
}

/// Per-component constraint on `b_s` for `s > δ`.
#[derive(Clone, Copy, Debug)]
enum C {
    Eq(u64),
    /// `1 ≤ b_s ≤ p_s − 2`.
    Any,
    /// `(p_s+1)/2 ≤ b_s ≤ p_s − 2`.
    Upper,
    /// `2 ≤ b_s ≤ (p_s−1)/2`.
    Lower,
    /// `b_s = 1` or upper.
    OneOrUpper,
}

impl C {
    fn values(self, p: u64) -> Vec<u64> {
        match self {
            C::Eq(x) => vec![x],
            C::Any => (1..=p - 2).collect(),
            C::Upper => ((p + 1) / 2..=p - 2).collect(),
            C::Lower => (2..=(p - 1) / 2).collect(),
            C::OneOrUpper => std::iter::once(1).chain((p + 1) / 2..=p - 2).collect(),
        }
    }
}

type Set = BTreeSet<u64>;

/// Case-dispatched context: the normalized cluster data and the fixed low components.
struct Ctx {
    cd: ClusterData,
}

impl Ctx {
    fn one(&self) -> C {
        C::Eq(1)
    }

    /// `b_s = a_s`.
    fn same(&self, s: usize) -> C {
        C::Eq(self.cd.x(s))
    }

    /// `b_s = p_s − a_s`.
    fn flip(&self, s: usize) -> C {
        C::Eq(self.cd.p(s) - self.cd.x(s))
    }

    fn in_pol(&self, s: usize) -> bool {
        self.cd.pol.contains(&s)
    }

    fn a_is_one(&self, s: usize) -> bool {
        self.cd.x(s) == 1
    }

    /// Enumerates `{(b_1,…,b_ℓ) : b_s normal for s ≤ δ, b_s ∈ rule(s) for s > δ}` as indices.
    fn set(&self, rule: impl Fn(usize) -> C) -> Set {
        let cd = &self.cd;
        let mut fixed: Vec<(u64, u64)> = Vec::new();
        for s in 1..=cd.delta {
            let p = cd.p(s);
            fixed.push(if p == 2 { (1, 4) } else { (1, p) });
        }
        let mut acc: Vec<Vec<(u64, u64)>> = vec![fixed];
        for s in cd.delta + 1..=cd.ell {
            let p = cd.p(s);
            let vals = rule(s).values(p);
            let mut next = Vec::with_capacity(acc.len() * vals.len());
            for prefix in &acc {
                for &x in &vals {
                    let mut v = prefix.clone();
                    v.push((x, p));
                    next.push(v);
                }
            }
            acc = next;
        }
        acc.iter().map(|parts| crt(parts)).collect()
    }

    fn all_ones(&self) -> u64 {
        self.set(|_| C::Eq(1)).into_iter().next().expect("one element")
    }

    fn sign(&self, k: usize) -> i64 {
        if k % 2 == 0 {
            1
        } else {
            -1
        }
    }

    fn e(&self) -> usize {
        self.cd.e_count
    }

    fn f(&self) -> usize {
        self.cd.f_count
    }

    // The shared Γ̄_{1,r} / Γ̂_{1,r} shapes below differ only in the tail rule for s > r.

    fn gamma1_bar(&self, r: usize, tail: impl Fn(usize) -> C) -> Set {
        self.set(|s| {
            if s < r {
                C::OneOrUpper
            } else if s == r {
                C::Lower
            } else {
                tail(s)
            }
        })
    }

    fn gamma1_hat(&self, r: usize, tail: impl Fn(usize) -> C) -> Set {
        self.set(|s| {
            if s < r {
                if self.in_pol(s) {
                    C::OneOrUpper
                } else {
                    self.one()
                }
            } else if s == r {
                C::Lower
            } else {
                tail(s)
            }
        })
    }
}

/// Which closed form applies.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
pub enum Case {
    /// A single set `Γ`: all cluster components after δ are units and `a_τ` is in the upper half.
    Basic0,
    /// `Γ_1, Γ_2`: units before τ, `a_τ` in the lower half.
    Basic,
    /// `Γ_1, Γ_2, Γ_3`: poles before τ, `a_τ` in the upper half.
    MidUpper,
    /// `Γ_1, …, Γ_4`: poles before τ, `a_τ` in the lower half.
    MidLower,
    /// Full cluster, ℓ even, no poles after δ: the all-ones element.
    FullEvenUnit,
    /// Full cluster, ℓ even, with poles.
    FullEven,
    /// Full cluster, ℓ odd, no poles after δ.
    FullOddUnit,
    /// Full cluster, ℓ odd, with poles.
    FullOdd,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Named index sets with the exponent each contributes.
#[derive(Clone, Debug, Serialize)]
pub struct GammaSets {
    pub case: Case,
    pub sets: Vec<(String, i64, Vec<BasisElement>)>,
}

pub fn case_of(cd: &ClusterData) -> Case {
    debug_assert_eq!(cd.epsilon, 1);
    let poles = !cd.pol_bar_delta().is_empty();
    if cd.len == cd.ell {
        let poles = !cd.pol_delta().is_empty();
        match (cd.ell % 2 == 0, poles) {
            (true, false) => Case::FullEvenUnit,
            (true, true) => Case::FullEven,
            (false, false) => Case::FullOddUnit,
            (false, true) => Case::FullOdd,
        }
    } else if cd.upper(cd.tau, cd.x(cd.tau)) {
        if poles {
            Case::MidUpper
        } else {
            Case::Basic0
        }
    } else if poles {
        Case::MidLower
    } else {
        Case::Basic
    }
}

fn minus(a: &Set, b: &Set) -> Set {
    a.difference(b).copied().collect()
}

fn union(sets: impl IntoIterator<Item = Set>) -> Set {
    sets.into_iter().flatten().collect()
}

/// The Γ-sets and their exponents for `v(level, a)`, after normalizing `a` by `ε_a`.
pub fn gamma_sets(level: u64, a: i64) -> Result<GammaSets> {
    let cd0 = cluster_data(level, a)?;
    let cd = cluster_data(level, cd0.epsilon as i64 * a)?;
    let ctx = Ctx { cd };
    let cd = &ctx.cd;
    let (tau, ell) = (cd.tau, cd.ell);
    let case = case_of(cd);
    let e = ctx.e();
    let f = ctx.f();
    let mut out: Vec<(&str, i64, Set)> = Vec::new();
    match case {
        Case::Basic0 => {
            let g = ctx.set(|s| {
                if s < tau {
                    ctx.one()
                } else if ctx.in_pol(s) {
                    C::Any
                } else {
                    ctx.same(s)
                }
            });
            out.push(("Gamma", ctx.sign(e), g));
        }
        Case::Basic => {
            // The printed ranges at τ are the whole lower/upper half; the identity needs
            // b_τ = a_τ in Γ_1 and b_τ = p_τ − a_τ in Γ_2.
            let tail = |s: usize| if ctx.in_pol(s) { C::Any } else { ctx.same(s) };
            let at_tau = |s: usize, c: C| {
                if s < tau {
                    C::OneOrUpper
                } else if s == tau {
                    c
                } else {
                    tail(s)
                }
            };
            let bar = ctx.set(|s| at_tau(s, ctx.same(tau)));
            let hat = ctx.set(|s| if s < tau { ctx.one() } else { at_tau(s, ctx.same(tau)) });
            out.push(("Gamma1", ctx.sign(e + 1), minus(&bar, &hat)));
            let g2 = ctx.set(|s| {
                if s < tau {
                    C::OneOrUpper
                } else if s == tau {
                    ctx.flip(tau)
                } else if ctx.a_is_one(s) {
                    C::Any
                } else {
                    ctx.flip(s)
                }
            });
            out.push(("Gamma2", ctx.sign(f), g2));
        }
        Case::MidUpper | Case::MidLower => {
            let rs = cd.pol_bar_delta();
            let tail1 = |s: usize| if ctx.in_pol(s) { C::Any } else { ctx.same(s) };
            let g1_bar = |r| ctx.gamma1_bar(r, tail1);
            let g1_hat = |r| ctx.gamma1_hat(r, tail1);
            let g1 = union(rs.iter().map(|&r| minus(&g1_bar(r), &g1_hat(r))));
            let g2_bar = |r: usize| {
                ctx.set(|s| {
                    if s < r {
                        C::OneOrUpper
                    } else if s == r {
                        C::Upper
                    } else if ctx.a_is_one(s) {
                        C::Any
                    } else {
                        ctx.flip(s)
                    }
                })
            };
            if case == Case::MidUpper {
                let g2 = union(rs.iter().map(|&r| g2_bar(r)));
                let g3 = ctx.set(|s| {
                    if s < tau {
                        if ctx.in_pol(s) {
                            C::OneOrUpper
                        } else {
                            ctx.one()
                        }
                    } else if ctx.in_pol(s) {
                        C::Any
                    } else {
                        ctx.same(s)
                    }
                });
                out.push(("Gamma1", ctx.sign(e + 1), g1));
                out.push(("Gamma2", ctx.sign(f + 1), g2));
                out.push(("Gamma3", ctx.sign(e), g3));
            } else {
                let g2_hat = |r: usize| {
                    if r + 1 == tau {
                        return g2_bar(r);
                    }
                    ctx.set(|s| {
                        if s < r {
                            C::OneOrUpper
                        } else if s == r {
                            C::Upper
                        } else if s < tau {
                            if ctx.a_is_one(s) {
                                C::OneOrUpper
                            } else {
                                ctx.one()
                            }
                        } else if ctx.a_is_one(s) {
                            C::Any
                        } else {
                            ctx.flip(s)
                        }
                    })
                };
                let g2_hat_all = union(rs.iter().map(|&r| g2_hat(r)));
                let g2 = union(rs.iter().map(|&r| minus(&g2_bar(r), &g2_hat(r))));
                let g3_bar = ctx.set(|s| {
                    if s < tau {
                        C::OneOrUpper
                    } else if ctx.in_pol(s) {
                        C::Any
                    } else {
                        ctx.same(s)
                    }
                });
                let g3_hat = ctx.set(|s| {
                    if s < tau {
                        if ctx.in_pol(s) {
                            C::OneOrUpper
                        } else {
                            ctx.one()
                        }
                    } else if ctx.in_pol(s) {
                        C::Any
                    } else {
                        ctx.same(s)
                    }
                });
                let g4_bar = ctx.set(|s| {
                    if s < tau {
                        C::OneOrUpper
                    } else if ctx.a_is_one(s) {
                        C::Any
                    } else {
                        ctx.flip(s)
                    }
                });
                out.push(("Gamma1", ctx.sign(e + 1), g1));
                out.push(("Gamma2", ctx.sign(f + 1), g2));
                out.push(("Gamma3", ctx.sign(e + 1), minus(&g3_bar, &g3_hat)));
                out.push(("Gamma4", ctx.sign(f), minus(&g4_bar, &g2_hat_all)));
            }
        }
        Case::FullEvenUnit => {
            out.push(("AllOnes", ctx.sign(e), [ctx.all_ones()].into()));
        }
        Case::FullOddUnit => {
            let g = minus(&ctx.set(|_| C::OneOrUpper), &[ctx.all_ones()].into());
            out.push(("Gamma", -ctx.sign(e), g));
        }
        Case::FullEven | Case::FullOdd => {
            let rs = cd.pol_delta();
            let tail1 = |s: usize| if ctx.in_pol(s) { C::Any } else { ctx.one() };
            let g1 = union(rs.iter().map(|&r| minus(&ctx.gamma1_bar(r, tail1), &ctx.gamma1_hat(r, tail1))));
            let g2_bar = |r: usize| {
                ctx.set(|s| {
                    if s < r {
                        C::OneOrUpper
                    } else if s == r {
                        C::Upper
                    } else if ctx.in_pol(s) {
                        ctx.one()
                    } else {
                        C::Any
                    }
                })
            };
            let ones: Set = [ctx.all_ones()].into();
            let in_pol_or_one = |inside: bool| {
                let c = &ctx;
                c.set(|s| if c.in_pol(s) == inside { C::OneOrUpper } else { c.one() })
            };
            out.push(("Gamma1", ctx.sign(e + 1), g1));
            if case == Case::FullEven {
                let g2_hat = minus(&in_pol_or_one(true), &ones);
                let g2 = minus(&union(rs.iter().map(|&r| g2_bar(r))), &g2_hat);
                out.push(("Gamma2", ctx.sign(e + 1), g2));
                out.push(("AllOnes", ctx.sign(e), ones));
            } else {
                let g2 = union(rs.iter().map(|&r| {
                    if r == ell {
                        return Set::new();
                    }
                    let hat = ctx.set(|s| {
                        if s < r {
                            C::OneOrUpper
                        } else if s == r {
                            C::Upper
                        } else if ctx.in_pol(s) {
                            ctx.one()
                        } else {
                            C::OneOrUpper
                        }
                    });
                    minus(&g2_bar(r), &hat)
                }));
                out.push(("Gamma2", ctx.sign(e), g2));
                out.push(("Gamma3", ctx.sign(e), minus(&in_pol_or_one(true), &ones)));
                out.push(("Gamma4", ctx.sign(e + 1), minus(&in_pol_or_one(false), &ones)));
            }
        }
    }
    let sets = out
        .into_iter()
        .map(|(name, k, s)| (name.to_string(), k, s.into_iter().map(|i| BasisElement::new(level, i)).collect()))
        .collect();
    Ok(GammaSets { case, sets })
}

/// `v(level, a)` in the relative basis `B_level`, from the Γ-sets; checks membership and disjointness.
pub fn closed_form_represent(level: u64, a: i64) -> Result<BasisVector> {
    let gs = gamma_sets(level, a)?;
    let basis: BTreeSet<u64> = relative_basis(level).into_iter().collect();
    let mut seen: BTreeSet<BasisElement> = BTreeSet::new();
    let mut terms = Vec::new();
    for (name, k, set) in &gs.sets {
        for b in set {
            if !basis.contains(&b.index) {
                return Err(Error::ClosedForm {
                    level,
                    a,
                    reason: format!("{name} contains {b}, which is not a basis element"),
                });
            }
            if !seen.insert(*b) {
                return Err(Error::ClosedForm { level, a, reason: format!("{name} overlaps another set at {b}") });
            }
            terms.push((*b, *k));
        }
    }
    Ok(BasisVector::from_terms(level, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::represent;

    #[test]
    fn sixty() {
        let v = closed_form_represent(60, 1).unwrap();
        assert_eq!(v, BasisVector::from_terms(60, [(BasisElement::new(60, 13), -1)]));
    }

    #[test]
    fn against_generic() {
        let mut bad = 0;
        let mut cases = std::collections::BTreeMap::new();
        for level in [60u64, 84, 132, 140, 420, 15, 21, 35, 33, 105, 1540, 385] {
            for a in 1..level as i64 / 2 {
                if num_integer::gcd(a as u64, level) != 1 {
                    continue;
                }
                let want = represent(level, a).unwrap().restrict_to_level(level);
                *cases.entry((level, gamma_sets(level, a).unwrap().case)).or_insert(0) += 1;
                match closed_form_represent(level, a) {
                    Ok(got) if got == want => {}
                    r => {
                        bad += 1;
                        if bad < 40 {
                            let cd = cluster_data(level, a).unwrap();
                            let case = gamma_sets(level, a).map(|g| g.case.to_string()).unwrap_or_default();
                            eprintln!("{level} {a} eps {} res {:?} len {} {case}: got {:?} want {}", cd.epsilon, cd.residues, cd.len, r.map(|v| v.to_string()), want);
                        }
                    }
                }
            }
        }
        eprintln!("{cases:?}");
        assert_eq!(bad, 0);
    }
}
