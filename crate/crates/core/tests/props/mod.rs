//! Module invariants as proptest runners, shared by the test suite and the acceptance binary.
#![allow(dead_code)]

use std::collections::BTreeSet;

use lhuilier_core::angle::canonical_rep;
use lhuilier_core::basis::{build_presentation, conrad_basis, lift, represent};
use lhuilier_core::families::{classify, family_member, phi_memberships, sporadic_table, ClassLabel, FamilyId};
use lhuilier_core::solver::{search, verify_solution, DenominatorSpec, Sign};
use lhuilier_core::store::{read_jsonl, write_jsonl, RunConfig, SolutionRecord};
use lhuilier_core::tan::tan_vector;
use lhuilier_core::triangles::{lhuilier_check, phi_map, psi_map, Measurement};
use lhuilier_core::{omega3_member, BasisVector, RationalAngle, Tuple5};
use num_rational::Ratio;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

pub type Check = std::result::Result<(), String>;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn finish(r: std::result::Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Check {
    r.map_err(|e| e.to_string())
}

fn level_and_unit() -> impl Strategy<Value = (u64, i64)> {
    (3u64..=120).prop_flat_map(|n| (Just(n), 1..n as i64)).prop_filter("a not a multiple of n", |&(n, a)| a % n as i64 != 0)
}

/// `v(n,a) = v(n,−a)` and `v(n,a) = v(n/g, a/g)` after lifting.
pub fn symmetry_relations() -> Check {
    finish(runner(200).run(&level_and_unit(), |(n, a)| {
        let v = represent(n, a).unwrap();
        prop_assert_eq!(&v, &represent(n, -a).unwrap());
        prop_assert_eq!(&v, &represent(n, n as i64 - a).unwrap());
        let g = num_integer::gcd(n as i64, a) as u64;
        if g > 1 {
            let low = represent(n / g, a / g as i64).unwrap();
            prop_assert_eq!(&v, &lift(&low, n).unwrap());
        }
        Ok(())
    }))
}

/// `Π_j v(np, a + jn) = v(n, a)`.
pub fn norm_relations() -> Check {
    let strat = (level_and_unit(), prop::sample::select(vec![2u64, 3, 5]))
        .prop_filter("product level bound", |&((n, _), p)| n * p <= 360);
    finish(runner(120).run(&strat, |((n, a), p)| {
        let np = n * p;
        let mut sum = BasisVector::zero(np);
        for j in 0..p as i64 {
            sum = sum.add(&represent(np, a + j * n as i64).unwrap());
        }
        prop_assert_eq!(sum, lift(&represent(n, a).unwrap(), np).unwrap());
        Ok(())
    }))
}

/// The presentation basis is the Conrad basis and every basis element represents itself.
pub fn basis_identity() -> Check {
    finish(runner(60).run(&(2u64..=150), |n| {
        let pres = build_presentation(n).unwrap();
        let cb = conrad_basis(n);
        prop_assert_eq!(pres.basis(), &cb[..]);
        for b in cb.iter().filter(|b| b.level == n) {
            let v = represent(n, b.index as i64).unwrap();
            prop_assert_eq!(v.terms(), &[(*b, 1)][..]);
        }
        Ok(())
    }))
}

/// `tan(x)·tan(π/2 − x) = 1`.
pub fn tan_complement() -> Check {
    let strat = (3i64..=90).prop_flat_map(|d| (1..(d + 1) / 2, Just(d))).prop_filter("x in (0,1/2)", |&(k, d)| 2 * k < d);
    finish(runner(200).run(&strat, |(k, d)| {
        let x = RationalAngle::of(k, d);
        let level = 4 * d as u64;
        let v = tan_vector(x, level).unwrap().add(&tan_vector(x.complement(), level).unwrap());
        prop_assert!(v.is_zero(), "tan({})tan({}) != 1", x, x.complement());
        Ok(())
    }))
}

fn q() -> impl Strategy<Value = Ratio<i64>> {
    (1i64..60, 2i64..61).prop_map(|(a, b)| Ratio::new(a, b))
}

/// Every family member is a solution, and θ sends family (i,j) into its θ-image family.
pub fn family_theta_closure() -> Check {
    let strat = (prop::sample::select(FamilyId::ALL.to_vec()), q(), q());
    finish(runner(400).run(&strat, |(id, s, t)| {
        let Some(m) = family_member(id, s, t) else { return Ok(()) };
        prop_assert!(verify_solution(&m, Sign::Plus).unwrap(), "{} in {} is not a solution", m, id);
        let img = m.theta();
        prop_assert!(verify_solution(&img, Sign::Plus).unwrap());
        let ids: Vec<FamilyId> = phi_memberships(&img).iter().map(|f| f.id).collect();
        prop_assert!(ids.contains(&id.theta_image()), "θ({}) lies in {:?}, expected {}", m, ids, id.theta_image());
        Ok(())
    }))
}

/// Orbit sizes divide 48 and canonical representatives are orbit invariants.
pub fn orbit_invariants() -> Check {
    let rows: Vec<Tuple5> = sporadic_table().rows.iter().map(|&(_, t)| t).collect();
    let strat = (prop::sample::select(rows), 0usize..48);
    finish(runner(100).run(&strat, |(t, k)| {
        let orbit = t.orbit();
        prop_assert_eq!(48 % orbit.len(), 0);
        let (_, y) = orbit[k % orbit.len()];
        prop_assert_eq!(canonical_rep(&y).unwrap(), canonical_rep(&t).unwrap());
        let sporadic = matches!(classify(&y), ClassLabel::Sporadic { .. });
        prop_assert!(sporadic);
        Ok(())
    }))
}

/// `φ(ψ(x)) = x` on Ω3 solutions and ψ lands in valid measurements.
pub fn phi_psi_round_trip() -> Check {
    let sols: Vec<Tuple5> = search(&DenominatorSpec::MaxLcm(60), Sign::Plus)
        .unwrap()
        .solutions
        .into_iter()
        .flat_map(|t| t.orbit().into_iter().map(|(_, y)| y))
        .filter(omega3_member)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if sols.is_empty() {
        return Err("no Ω3 solutions at lcm ≤ 60".into());
    }
    finish(runner(200).run(&prop::sample::select(sols), |t| {
        let m = psi_map(&t).unwrap();
        prop_assert!(lhuilier_check(&m).unwrap());
        prop_assert_eq!(phi_map(&m).unwrap(), t);
        Ok(())
    }))
}

/// Measurements built from random quarter angles are accepted exactly when the tuple solves the equation.
pub fn lhuilier_agrees_with_equation() -> Check {
    let strat = (1i64..8, 1i64..24, 1i64..24, 1i64..24, prop::sample::select(vec![8i64, 12, 16, 20, 24]));
    finish(runner(300).run(&strat, |(x0, a, b, c, d)| {
        let (e, a, b, c) = (
            RationalAngle::of(4 * x0, d),
            RationalAngle::of(2 * a, d),
            RationalAngle::of(2 * b, d),
            RationalAngle::of(2 * c, d),
        );
        let m = Measurement::new(e, a, b, c).sorted();
        if let Ok(ok) = lhuilier_check(&m) {
            let t = phi_quarters(&m);
            prop_assert_eq!(ok, verify_solution(&t, Sign::Plus).unwrap());
        }
        Ok(())
    }))
}

fn phi_quarters(m: &Measurement) -> Tuple5 {
    let (e, a, b, c) = (m.e.ratio(), m.a.ratio(), m.b.ratio(), m.c.ratio());
    let f = |r: Ratio<i64>| RationalAngle::from_ratio(r / 4);
    Tuple5([f(e), f(-a + b + c), f(a - b + c), f(a + b - c), f(a + b + c)])
}

/// JSONL round trip reproduces tuples exactly.
pub fn jsonl_round_trip() -> Check {
    let sols = search(&DenominatorSpec::MaxLcm(30), Sign::Plus).unwrap().solutions;
    finish(runner(20).run(&prop::sample::subsequence(sols.clone(), 0..sols.len()), |sub| {
        let recs: Vec<SolutionRecord> = sub.iter().map(|t| SolutionRecord::new(t, Sign::Plus, true)).collect();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &RunConfig::default(), &recs).unwrap();
        let (_, back): (_, Vec<SolutionRecord>) = read_jsonl(&buf[..]).unwrap();
        let tuples: Vec<Tuple5> = back.iter().map(|r| r.tuple().unwrap()).collect();
        prop_assert_eq!(tuples, sub);
        Ok(())
    }))
}

/// Naive enumeration with a double-precision filter and exact confirmation, per exact lcm `L ≤ n`.
pub fn brute_force(n: u64) -> BTreeSet<Tuple5> {
    let mut out = BTreeSet::new();
    for l in 3..=n as i64 {
        let xs: Vec<(RationalAngle, f64)> = (1..l)
            .filter(|&k| 2 * k < l)
            .map(|k| {
                let x = RationalAngle::of(k, l);
                (x, (std::f64::consts::PI * k as f64 / l as f64).tan().ln())
            })
            .collect();
        let m = xs.len();
        for i0 in 0..m {
            for i1 in 0..m {
                for i2 in i1..m {
                    for i3 in i2..m {
                        let partial = 2.0 * xs[i0].1 - xs[i1].1 - xs[i2].1 - xs[i3].1;
                        for i4 in i3..m {
                            if (partial - xs[i4].1).abs() > 1e-9 {
                                continue;
                            }
                            let t = Tuple5([xs[i0].0, xs[i1].0, xs[i2].0, xs[i3].0, xs[i4].0]);
                            if t.lcm() == l && verify_solution(&t, Sign::Plus).unwrap_or(false) {
                                out.insert(t);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// The meet-in-the-middle search agrees with naive enumeration.
pub fn search_matches_brute_force(n: u64) -> Check {
    let fast: BTreeSet<Tuple5> = search(&DenominatorSpec::MaxLcm(n), Sign::Plus)
        .map_err(|e| e.to_string())?
        .solutions
        .into_iter()
        .collect();
    let slow = brute_force(n);
    if fast == slow {
        Ok(())
    } else {
        Err(format!(
            "search-only {:?}, brute-only {:?}",
            fast.difference(&slow).take(5).collect::<Vec<_>>(),
            slow.difference(&fast).take(5).collect::<Vec<_>>()
        ))
    }
}

pub fn all() -> Vec<(&'static str, fn() -> Check)> {
    vec![
        ("symmetry relations", symmetry_relations),
        ("norm relations", norm_relations),
        ("basis identity", basis_identity),
        ("tan complement", tan_complement),
        ("family theta closure", family_theta_closure),
        ("orbit invariants", orbit_invariants),
        ("phi/psi round trip", phi_psi_round_trip),
        ("lhuilier agrees with equation", lhuilier_agrees_with_equation),
        ("jsonl round trip", jsonl_round_trip),
        ("search vs brute force N<=48", || search_matches_brute_force(48)),
    ]
}
