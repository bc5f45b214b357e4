//! Lemma statements checked by exhaustive computation.

use lhuilier_core::basis::{conrad_basis, multiplicity};
use lhuilier_core::solver::{search, verify_solution, DenominatorSpec, Sign};
use lhuilier_core::tan::{product_vector, tan_vector};
use lhuilier_core::{BasisElement, RationalAngle};

fn odd_primes(limit: u64) -> Vec<u64> {
    (3..=limit).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
}

/// Multiplicity of `v(n,a)` in `tan(bπ/2n)` is in {0,±1,±2}, with the listed parity and position constraints.
/// At n = 3 the residues a, 2a and n − a coincide and the case list does not apply; see the next test.
#[test]
fn tan_multiplicity_bound_for_primes() {
    for n in odd_primes(50).into_iter().filter(|&n| n > 3) {
        let level = 4 * n;
        let basis = conrad_basis(level);
        for b in 1..n as i64 {
            let t = tan_vector(RationalAngle::of(b, 2 * n as i64), level).unwrap();
            for a in 1..=(n as i64 - 1) / 2 {
                let v = BasisElement::new(n, a as u64);
                assert!(basis.contains(&v), "v({n},{a}) missing from the level {level} basis");
                let m = multiplicity(&t, &v);
                let (ni, odd_a) = (n as i64, a % 2 == 1);
                match m {
                    0 => {}
                    1 => assert!(b % 2 == 1 && b == if odd_a { a } else { ni - a }, "n={n} a={a} b={b}: +1"),
                    -1 => assert!(b % 2 == 0 && b == if odd_a { ni - a } else { a }, "n={n} a={a} b={b}: -1"),
                    2 => assert!(b % 2 == 0 && b == 2 * a, "n={n} a={a} b={b}: +2"),
                    -2 => assert!(b % 2 == 1 && 2 * a + b == ni, "n={n} a={a} b={b}: -2"),
                    _ => panic!("n={n} a={a} b={b}: multiplicity {m}"),
                }
            }
        }
    }
}

/// `tan(π/6) = 1/√3 = |1 − ζ₃|⁻¹`: multiplicity −1 at odd b, outside the case list.
#[test]
fn tan_multiplicity_at_three() {
    let v = BasisElement::new(3, 1);
    let m = |b| multiplicity(&tan_vector(RationalAngle::of(b, 6), 12).unwrap(), &v);
    assert_eq!((m(1), m(2)), (-1, 1));
}

/// With `den(x0) ∈ {n,2n}` the number of tail entries of denominator `4n` is 0 or 2.
#[test]
fn quarter_denominators_come_in_pairs() {
    for n in [5i64, 7, 11, 13] {
        let sols = search(&DenominatorSpec::fixed([n as u64, 2 * n as u64, 4 * n as u64]), Sign::Plus).unwrap();
        let mut seen = 0;
        for t in sols.solutions.iter().filter(|t| t.0[0].den() != 4 * n) {
            let c = t.0[1..].iter().filter(|x| x.den() == 4 * n).count();
            assert!(c == 0 || c == 2, "{t}: {c} entries with denominator {}", 4 * n);
            seen += 1;
        }
        assert!(seen > 0);
    }
}

fn angles(n: i64) -> Vec<RationalAngle> {
    let mut out = Vec::new();
    for d in [n, 2 * n] {
        for k in 1..d {
            let x = RationalAngle::of(k, d);
            if x.den() == d && 2 * k < d {
                out.push(x);
            }
        }
    }
    out
}

/// `tan²x0 = 1` and `tan²x0 = tan⁴x1` have no solutions, `tan²x0 = tan²x1` forces `x0 = x1`,
/// and `tan²x0 = tan²x1 tan²x2` has no solutions, over denominators `{n, 2n}`.
#[test]
fn reduced_equations() {
    for n in [143i64, 49] {
        let xs = angles(n);
        let level = 4 * n as u64;
        let holds = |terms: &[(RationalAngle, i64)]| product_vector(terms, level).unwrap().is_zero();
        for &x0 in &xs {
            assert!(!holds(&[(x0, 2)]), "n={n}: tan²({x0}) = 1");
            for &x1 in &xs {
                assert!(!holds(&[(x0, 2), (x1, -4)]), "n={n}: tan²({x0}) = tan⁴({x1})");
                assert_eq!(holds(&[(x0, 2), (x1, -2)]), x0 == x1, "n={n}: tan²({x0}) vs tan²({x1})");
            }
        }
        // The three-variable equation over a sample of x0 keeps the test short; the pair loop is exhaustive.
        for &x0 in xs.iter().step_by(7) {
            for (i, &x1) in xs.iter().enumerate() {
                for &x2 in &xs[i..] {
                    assert!(!holds(&[(x0, 2), (x1, -2), (x2, -2)]), "n={n}: ({x0},{x1},{x2})");
                }
            }
        }
    }
}

/// Every reported solution verifies, and so does every in-range orbit member.
#[test]
fn solutions_and_orbits_verify() {
    let rep = search(&DenominatorSpec::MaxLcm(36), Sign::Plus).unwrap();
    for t in &rep.solutions {
        assert!(verify_solution(t, Sign::Plus).unwrap(), "{t}");
        for (_, y) in t.orbit() {
            if y.all_in_open_quarter_turn() {
                assert!(verify_solution(&y, Sign::Plus).unwrap(), "{y} from {t}");
            }
        }
    }
}
