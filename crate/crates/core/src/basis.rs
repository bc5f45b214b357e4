//! Presentation of the group of cyclotomic numbers modulo torsion and its Conrad basis.
//!
//! Generators are `v(N,a)` for `1 ≤ a ≤ ⌊N/2⌋`. Relations are the norm relations
//! `v(m,b) = Π_j v(N, b + m·j)` for proper divisors `m`. Coordinates of every
//! non-basis generator are obtained by row reduction modulo a large prime and then
//! certified over the integers against every relation row.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use astro_float::BigFloat;
use serde::{Deserialize, Serialize};

use crate::arith::{crt, divisors, factorize, modulo};
use crate::error::{Error, Result};
use crate::numeric;

/// `v(level, index)`, i.e. the class of `1 − ζ_level^index`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct BasisElement {
    pub level: u64,
    pub index: u64,
}

impl BasisElement {
    pub fn new(level: u64, index: u64) -> Self {
        BasisElement { level, index }
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v({},{})", self.level, self.index)
    }
}

/// Sparse exponent vector over the Conrad basis of `X^level`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct BasisVector {
    pub level: u64,
    terms: Vec<(BasisElement, i64)>,
}

impl BasisVector {
    pub fn zero(level: u64) -> Self {
        BasisVector { level, terms: Vec::new() }
    }

    /// Builds from arbitrary terms; merges duplicates and drops zeros.
    pub fn from_terms(level: u64, terms: impl IntoIterator<Item = (BasisElement, i64)>) -> Self {
        let mut map: std::collections::BTreeMap<BasisElement, i64> = Default::default();
        for (b, e) in terms {
            *map.entry(b).or_insert(0) += e;
        }
        BasisVector { level, terms: map.into_iter().filter(|&(_, e)| e != 0).collect() }
    }

    pub fn terms(&self) -> &[(BasisElement, i64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &BasisVector) -> BasisVector {
        assert_eq!(self.level, o.level, "levels must agree");
        BasisVector::from_terms(self.level, self.terms.iter().chain(&o.terms).copied())
    }

    pub fn scale(&self, k: i64) -> BasisVector {
        BasisVector::from_terms(self.level, self.terms.iter().map(|&(b, e)| (b, e * k)))
    }

    pub fn sub(&self, o: &BasisVector) -> BasisVector {
        self.add(&o.scale(-1))
    }

    /// Renders as `level:index^exp` terms separated by spaces; `1` for the zero vector.
    pub fn to_cli_string(&self) -> String {
        if self.terms.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(b, e)| format!("{}:{}^{}", b.level, b.index, e)).collect();
        parts.join(" ")
    }

    /// Keeps only the terms at one level.
    pub fn restrict_to_level(&self, d: u64) -> BasisVector {
        BasisVector {
            level: self.level,
            terms: self.terms.iter().filter(|(b, _)| b.level == d).copied().collect(),
        }
    }
}

impl fmt::Display for BasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.terms.iter().map(|(b, e)| format!("{b}^{e}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for BasisElement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("cannot parse basis element {s:?}"));
        let (l, i) = s.trim().split_once(':').ok_or_else(bad)?;
        Ok(BasisElement::new(l.parse().map_err(|_| bad())?, i.parse().map_err(|_| bad())?))
    }
}

/// Indices `b` (at level `n`) of the relative basis `B_n`, ascending.
pub fn relative_basis(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    if n == 2 {
        return vec![1];
    }
    if n == 4 || n % 4 == 2 {
        return Vec::new();
    }
    let fac = factorize(n);
    if fac.len() == 1 && fac[0].1 == 1 {
        return (1..=(n - 1) / 2).collect();
    }
    let odd_part_squarefree = fac.iter().all(|&(p, e)| e == 1 || (p == 2 && e == 2));
    let mut out = if odd_part_squarefree && n % 8 != 0 {
        squarefree_relative(&fac)
    } else {
        general_relative(n, &fac)
    };
    out.sort_unstable();
    out
}

fn cartesian(choices: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut acc: Vec<Vec<u64>> = vec![Vec::new()];
    for c in choices {
        let mut next = Vec::with_capacity(acc.len() * c.len());
        for prefix in &acc {
            for &x in c {
                let mut v = prefix.clone();
                v.push(x);
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

// Odd squarefree with ℓ ≥ 2, or four times such a number.
fn squarefree_relative(fac: &[(u64, u32)]) -> Vec<u64> {
    let ell = fac.len();
    let odd: Vec<u64> = fac.iter().filter(|&&(p, _)| p != 2).map(|&(p, _)| p).collect();
    let has_four = odd.len() < ell;
    let choices: Vec<Vec<u64>> = odd.iter().map(|&p| (1..=p - 2).collect()).collect();
    let mut out = Vec::new();
    for tuple in cartesian(&choices) {
        let keep = match tuple.iter().position(|&b| b != 1) {
            None => ell % 2 == 0,
            Some(k) => tuple[k] >= (odd[k] + 1) / 2,
        };
        if keep {
            let mut parts: Vec<(u64, u64)> = odd.iter().zip(&tuple).map(|(&p, &b)| (b, p)).collect();
            if has_four {
                parts.push((1, 4));
            }
            out.push(crt(&parts));
        }
    }
    out
}

// Non-squarefree odd part or 8 | n.
fn general_relative(n: u64, fac: &[(u64, u32)]) -> Vec<u64> {
    let mu = if n % 8 == 0 {
        2
    } else {
        fac.iter().find(|&&(p, e)| p != 2 && e >= 2).map(|&(p, _)| p).expect("non-squarefree odd part")
    };
    let choices: Vec<Vec<u64>> = fac
        .iter()
        .map(|&(p, e)| {
            if e == 1 {
                return (1..=p - 2).collect();
            }
            let low = p.pow(e - 1);
            let mut v = Vec::new();
            for bar in 0..=p - 2 {
                for hat in 1..low {
                    // Residues divisible by p belong to lower levels.
                    if hat % p == 0 || (p == mu && 2 * hat >= low) {
                        continue;
                    }
                    v.push(bar * low + hat);
                }
            }
            v
        })
        .collect();
    let moduli: Vec<u64> = fac.iter().map(|&(p, e)| p.pow(e)).collect();
    cartesian(&choices)
        .into_iter()
        .map(|t| crt(&t.iter().zip(&moduli).map(|(&r, &q)| (r, q)).collect::<Vec<_>>()))
        .collect()
}

/// Conrad basis of `X^n`, sorted by level then index.
pub fn conrad_basis(n: u64) -> Vec<BasisElement> {
    let mut out = Vec::new();
    let four = n % 4 == 0;
    if four {
        out.push(BasisElement::new(4, 1));
    }
    for d in divisors(n) {
        if d < 2 || (four && (d == 2 || d == 4)) {
            continue;
        }
        out.extend(relative_basis(d).into_iter().map(|b| BasisElement::new(d, b)));
    }
    out.sort();
    out
}

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_field(x: i64) -> u64 {
    modulo(x, P)
}

fn from_field(x: u64) -> i64 {
    if x > P / 2 {
        -((P - x) as i64)
    } else {
        x as i64
    }
}

/// Generator index of `v(n, a)`: the representative of `±a mod n` in `[1, ⌊n/2⌋]`, or `None` if `n | a`.
pub fn generator_index(n: u64, a: i64) -> Option<usize> {
    let r = modulo(a, n);
    if r == 0 {
        return None;
    }
    Some(r.min(n - r) as usize)
}

/// The group `X^N` as generators modulo norm relations, with certified Conrad coordinates.
#[derive(Debug)]
pub struct Presentation {
    pub level: u64,
    basis: Vec<BasisElement>,
    position: HashMap<BasisElement, usize>,
    /// Row `a` holds the coordinates of generator `v(N,a)`; row 0 is unused.
    coords: Vec<i64>,
    relations: Vec<Vec<(usize, i64)>>,
    relation_rank: usize,
}

impl Presentation {
    pub fn build(n: u64) -> Result<Presentation> {
        let fail = |reason: String| Error::Basis { level: n, reason };
        if n < 2 {
            return Err(fail("level below 2".into()));
        }
        let g = (n / 2) as usize;
        let basis = conrad_basis(n);
        let r = basis.len();

        let mut basis_gen = Vec::with_capacity(r);
        let mut is_basis = vec![false; g + 1];
        for b in &basis {
            let gi = generator_index(n, ((n / b.level) * b.index) as i64).expect("basis index nonzero");
            if is_basis[gi] {
                return Err(fail(format!("{b} collides with another basis element")));
            }
            is_basis[gi] = true;
            basis_gen.push(gi);
        }

        let mut relations = Vec::new();
        for m in divisors(n) {
            if m < 2 || m == n {
                continue;
            }
            let k = n / m;
            for b in 1..=m / 2 {
                let mut row: HashMap<usize, i64> = HashMap::new();
                *row.entry(generator_index(n, (k * b) as i64).expect("proper")).or_insert(0) += 1;
                for j in 0..k {
                    let gi = generator_index(n, (b + m * j) as i64).expect("b < m");
                    *row.entry(gi).or_insert(0) -= 1;
                }
                let mut row: Vec<(usize, i64)> = row.into_iter().filter(|&(_, c)| c != 0).collect();
                row.sort_unstable();
                if !row.is_empty() {
                    relations.push(row);
                }
            }
        }

        // Column order: non-basis generators first, basis generators last.
        let non_basis: Vec<usize> = (1..=g).filter(|&a| !is_basis[a]).collect();
        let mut col_of = vec![0usize; g + 1];
        for (c, &a) in non_basis.iter().chain(&basis_gen).enumerate() {
            col_of[a] = c;
        }
        let nb = non_basis.len();
        let mut mat: Vec<Vec<u64>> = relations
            .iter()
            .map(|row| {
                let mut v = vec![0u64; g];
                for &(a, c) in row {
                    v[col_of[a]] = to_field(c);
                }
                v
            })
            .collect();
        let rank = rref(&mut mat, g);
        if rank != g - r {
            return Err(fail(format!("relation rank {rank} but expected {} = {g} − {r}", g - r)));
        }
        if mat.iter().take(nb).enumerate().any(|(i, row)| row[i] != 1) || nb != rank {
            return Err(fail("a non-basis generator is not eliminated".into()));
        }

        let mut coords = vec![0i64; (g + 1) * r];
        for (j, &a) in basis_gen.iter().enumerate() {
            coords[a * r + j] = 1;
        }
        for (i, &a) in non_basis.iter().enumerate() {
            for j in 0..r {
                coords[a * r + j] = -from_field(mat[i][nb + j]);
            }
        }

        // Integer certificate: every relation row vanishes under the coordinate map.
        for row in &relations {
            for j in 0..r {
                let s: i128 = row.iter().map(|&(a, c)| c as i128 * coords[a * r + j] as i128).sum();
                if s != 0 {
                    return Err(fail(format!("relation {row:?} not killed by lifted coordinates")));
                }
            }
        }

        let position = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        Ok(Presentation { level: n, basis, position, coords, relations, relation_rank: rank })
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn generator_count(&self) -> usize {
        (self.level / 2) as usize
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn relation_rank(&self) -> usize {
        self.relation_rank
    }

    pub fn position(&self, b: &BasisElement) -> Option<usize> {
        self.position.get(b).copied()
    }

    /// Dense coordinates of `v(N, a)`.
    pub fn generator_coords(&self, a: i64) -> Result<&[i64]> {
        let gi = generator_index(self.level, a)
            .ok_or_else(|| Error::Invalid(format!("{} divides {a}", self.level)))?;
        let r = self.rank();
        Ok(&self.coords[gi * r..(gi + 1) * r])
    }

    pub fn to_vector(&self, dense: &[i64]) -> BasisVector {
        BasisVector::from_terms(self.level, self.basis.iter().zip(dense).map(|(&b, &e)| (b, e)))
    }

    /// Dense coordinates of a vector whose level divides this level.
    pub fn to_dense(&self, v: &BasisVector) -> Result<Vec<i64>> {
        if self.level % v.level != 0 {
            return Err(Error::Invalid(format!("level {} does not divide {}", v.level, self.level)));
        }
        let mut out = vec![0i64; self.rank()];
        for &(b, e) in v.terms() {
            match self.position(&b) {
                Some(i) => out[i] += e,
                None => {
                    let c = self.generator_coords(((self.level / b.level) * b.index) as i64)?;
                    for (o, x) in out.iter_mut().zip(c) {
                        *o += e * x;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// RREF over F_P; returns the rank. Pivot rows end up first, in column order.
fn rref(mat: &mut Vec<Vec<u64>>, cols: usize) -> usize {
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..mat.len()).find(|&i| mat[i][c] != 0) else {
            continue;
        };
        mat.swap(rank, pr);
        let inv = powmod(mat[rank][c], P - 2);
        for x in mat[rank].iter_mut().skip(c) {
            *x = mulmod(*x, inv);
        }
        let pivot = mat[rank].clone();
        for (i, row) in mat.iter_mut().enumerate() {
            if i == rank || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for k in c..cols {
                if pivot[k] != 0 {
                    row[k] = (row[k] + P - mulmod(f, pivot[k])) % P;
                }
            }
        }
        rank += 1;
    }
    mat.truncate(rank);
    rank
}

type Cache = Mutex<HashMap<u64, Arc<Presentation>>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Cached presentation of `X^n`; a failed build is a basis-construction bug and is returned as an error.
pub fn build_presentation(n: u64) -> Result<Arc<Presentation>> {
    if let Some(p) = cache().lock().expect("cache poisoned").get(&n) {
        return Ok(p.clone());
    }
    let p = Arc::new(Presentation::build(n)?);
    Ok(cache().lock().expect("cache poisoned").entry(n).or_insert(p).clone())
}

/// Coordinates of `v(n, a)` in the Conrad basis of `X^n`.
pub fn represent(n: u64, a: i64) -> Result<BasisVector> {
    let pres = build_presentation(n)?;
    Ok(pres.to_vector(pres.generator_coords(a)?))
}

/// Re-expresses `v` in the Conrad basis of `X^m` for a multiple `m` of its level.
pub fn lift(v: &BasisVector, m: u64) -> Result<BasisVector> {
    let pres = build_presentation(m)?;
    Ok(pres.to_vector(&pres.to_dense(v)?))
}

pub fn multiplicity(v: &BasisVector, b: &BasisElement) -> i64 {
    v.terms().iter().find(|(x, _)| x == b).map_or(0, |&(_, e)| e)
}

pub fn support(v: &BasisVector) -> Vec<BasisElement> {
    v.terms().iter().map(|&(b, _)| b).collect()
}

/// Sum of exponents at basis elements of level `d`.
pub fn deg_level(v: &BasisVector, d: u64) -> i64 {
    v.terms().iter().filter(|(b, _)| b.level == d).map(|&(_, e)| e).sum()
}

/// `Σ e_b · ln|1 − ζ_b|` over the support.
pub fn log_magnitude(v: &BasisVector, precision_bits: usize) -> BigFloat {
    let p = precision_bits;
    v.terms().iter().fold(numeric::from_i64(0, p), |acc, &(b, e)| {
        let l = numeric::ln_abs_one_minus_root(b.index as i64, b.level as i64, p);
        numeric::add(&acc, &numeric::scale(&l, e, p), p)
    })
}

/// `Π |1 − ζ_b|^{e_b}`.
pub fn numeric_magnitude(v: &BasisVector, precision_bits: usize) -> BigFloat {
    numeric::exp(&log_magnitude(v, precision_bits), precision_bits)
}
