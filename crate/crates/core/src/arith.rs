//! Integer helpers: factorization, residue forms and CRT reconstruction.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn modulo(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let g = (a as i64).extended_gcd(&(m as i64));
    if g.gcd != 1 {
        return None;
    }
    Some(modulo(g.x, m))
}

/// Combines `x ≡ r_i (mod q_i)` for pairwise coprime moduli.
pub fn crt(parts: &[(u64, u64)]) -> u64 {
    let mut x: u128 = 0;
    let mut m: u128 = 1;
    for &(r, q) in parts {
        let q = q as u128;
        // x + m*k ≡ r (mod q)
        let inv = mod_inverse((m % q) as u64, q as u64).expect("moduli must be coprime") as u128;
        let diff = ((r as u128 % q) + q - (x % q)) % q;
        let k = diff * inv % q;
        x += m * k;
        m *= q;
        x %= m;
    }
    x as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ResidueComponent {
    /// `a mod p` for an exponent-one prime.
    Simple(u64),
    /// `(ā, â)` with `ã = ā·p^(e-1) + â`.
    Pair { bar: u64, hat: u64 },
}

impl std::fmt::Display for ResidueComponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ResidueComponent::Simple(a) => write!(f, "{a}"),
            ResidueComponent::Pair { bar, hat } => write!(f, "({bar},{hat})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueForm {
    pub level: u64,
    pub components: Vec<ResidueComponent>,
}

impl std::fmt::Display for ResidueForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "({})_{}", parts.join(","), self.level)
    }
}

pub fn residue_form(n: u64, a: i64) -> Result<ResidueForm> {
    if n < 2 {
        return invalid(format!("level {n} < 2"));
    }
    if a.rem_euclid(n as i64) == 0 {
        return invalid(format!("{n} divides {a}"));
    }
    let components = factorize(n)
        .into_iter()
        .map(|(p, e)| {
            let q = p.pow(e);
            let tilde = modulo(a, q);
            if e == 1 {
                ResidueComponent::Simple(tilde)
            } else {
                let low = p.pow(e - 1);
                let hat = tilde % low;
                ResidueComponent::Pair { bar: (tilde - hat) / low, hat }
            }
        })
        .collect();
    Ok(ResidueForm { level: n, components })
}

pub fn residue_to_index(f: &ResidueForm) -> u64 {
    let fac = factorize(f.level);
    let parts: Vec<(u64, u64)> = fac
        .iter()
        .zip(&f.components)
        .map(|(&(p, e), c)| {
            let q = p.pow(e);
            let r = match *c {
                ResidueComponent::Simple(a) => a,
                ResidueComponent::Pair { bar, hat } => bar * p.pow(e - 1) + hat,
            };
            (r, q)
        })
        .collect();
    crt(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_examples() {
        let f = residue_form(45, 7).unwrap();
        assert_eq!(
            f.components,
            vec![ResidueComponent::Pair { bar: 2, hat: 1 }, ResidueComponent::Simple(2)]
        );
        assert_eq!(residue_to_index(&f), 7);
        let f = residue_form(4, 1).unwrap();
        assert_eq!(f.components, vec![ResidueComponent::Pair { bar: 0, hat: 1 }]);
        let f = residue_form(15, 2).unwrap();
        assert_eq!(f.components, vec![ResidueComponent::Simple(2), ResidueComponent::Simple(2)]);
        let f = ResidueForm {
            level: 20,
            components: vec![ResidueComponent::Pair { bar: 0, hat: 1 }, ResidueComponent::Simple(3)],
        };
        assert_eq!(residue_to_index(&f), 13);
        assert!(residue_form(10, 20).is_err());
    }

    #[test]
    fn factor_and_divisors() {
        assert_eq!(factorize(884), vec![(2, 2), (13, 1), (17, 1)]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert!(is_prime(13) && !is_prime(1) && !is_prime(91));
        assert_eq!(crt(&[(1, 4), (3, 5)]), 13);
    }
}
