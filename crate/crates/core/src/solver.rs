//! Exhaustive meet-in-the-middle search for tan²x₀ = Π tan xᵢ over bounded denominators.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use astro_float::BigFloat;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{RationalAngle, Tuple5};
use crate::basis::{build_presentation, Presentation};
use crate::error::{Error, Result};
use crate::numeric;
use crate::tan::{product_vector, tan_dense};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DenominatorSpec {
    /// All tuples whose denominators have lcm at most `D`.
    MaxLcm(u64),
    /// Every denominator belongs to the set.
    FixedSet(BTreeSet<u64>),
}

impl DenominatorSpec {
    pub fn fixed(dens: impl IntoIterator<Item = u64>) -> Self {
        DenominatorSpec::FixedSet(dens.into_iter().collect())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DenominatorSpec::MaxLcm(d) if *d < 3 => Err(Error::Invalid(format!("max lcm {d} < 3"))),
            DenominatorSpec::FixedSet(s) if s.is_empty() => Err(Error::Invalid("empty denominator set".into())),
            DenominatorSpec::FixedSet(s) if s.iter().any(|&d| d < 3) => {
                Err(Error::Invalid("denominators must be at least 3".into()))
            }
            _ => Ok(()),
        }
    }

    /// Independent work units: one per exact lcm for `MaxLcm`, a single level for `FixedSet`.
    fn units(&self) -> Vec<u64> {
        match self {
            DenominatorSpec::MaxLcm(d) => (3..=*d).collect(),
            DenominatorSpec::FixedSet(s) => vec![s.iter().fold(1u64, |a, &b| a.lcm(&b))],
        }
    }

    fn admits(&self, den: u64) -> bool {
        match self {
            DenominatorSpec::MaxLcm(_) => true,
            DenominatorSpec::FixedSet(s) => s.contains(&den),
        }
    }

    fn exact_lcm(&self, unit: u64) -> Option<u64> {
        match self {
            DenominatorSpec::MaxLcm(_) => Some(unit),
            DenominatorSpec::FixedSet(_) => None,
        }
    }
}

impl fmt::Display for DenominatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DenominatorSpec::MaxLcm(d) => write!(f, "max-lcm {d}"),
            DenominatorSpec::FixedSet(s) => {
                let v: Vec<String> = s.iter().map(|d| d.to_string()).collect();
                write!(f, "den-set {}", v.join(","))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn of(v: i64) -> Sign {
        if v < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Sign> {
        match s {
            "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "minus" => Ok(Sign::Minus),
            _ => Err(Error::Invalid(format!("sign must be + or -, got {s:?}"))),
        }
    }
}

pub fn tuple_lcm(xs: &[RationalAngle]) -> u64 {
    xs.iter().fold(1i64, |a, x| a.lcm(&x.den())) as u64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub spec: DenominatorSpec,
    pub sign: Sign,
    pub six: bool,
    /// Five-variable solutions, tail sorted, ordered by (lcm, tuple).
    pub solutions: Vec<Tuple5>,
    /// Six-variable solutions `(x0, x1..x5)`, tail sorted; empty unless `six`.
    pub six_solutions: Vec<Vec<RationalAngle>>,
    pub per_lcm: BTreeMap<u64, usize>,
    pub units_total: usize,
    pub units_resumed: usize,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    pub jobs: Option<usize>,
    pub checkpoint: Option<std::path::PathBuf>,
    pub resume: bool,
    /// Skip the high-precision secondary check (exact equality still decides).
    pub skip_numeric: bool,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Candidate angles at one level with their dense tangent vectors and linear fingerprints.
pub struct Candidates {
    pub level: u64,
    pub angles: Vec<RationalAngle>,
    pub vectors: Vec<Vec<i64>>,
    hashes: Vec<u64>,
}

impl Candidates {
    /// All `x ∈ (0, π/2)` with `den(x) | level`, restricted by `admit(den)`.
    pub fn build(level: u64, admit: impl Fn(u64) -> bool) -> Result<Candidates> {
        let pres = build_presentation(level)?;
        let weights: Vec<u64> =
            pres.basis().iter().map(|b| splitmix((b.level << 32) ^ b.index)).collect();
        let mut angles = Vec::new();
        let mut vectors = Vec::new();
        let mut hashes = Vec::new();
        for c in 1..level.div_ceil(2) {
            let x = RationalAngle::of(c as i64, level as i64);
            if !admit(x.den() as u64) {
                continue;
            }
            let v = tan_dense(x, &pres)?;
            hashes.push(fingerprint(&v, &weights));
            vectors.push(v);
            angles.push(x);
        }
        Ok(Candidates { level, angles, vectors, hashes })
    }

    pub fn presentation(&self) -> Result<std::sync::Arc<Presentation>> {
        build_presentation(self.level)
    }

    fn exact(&self, x0: usize, tail: &[usize]) -> bool {
        (0..self.vectors[x0].len())
            .all(|k| 2 * self.vectors[x0][k] == tail.iter().map(|&i| self.vectors[i][k]).sum::<i64>())
    }
}

fn fingerprint(v: &[i64], w: &[u64]) -> u64 {
    v.iter().zip(w).fold(0u64, |acc, (&c, &wi)| acc.wrapping_add((c as u64).wrapping_mul(wi)))
}

pub fn enumerate_candidates(level: u64) -> Result<Vec<(RationalAngle, crate::basis::BasisVector)>> {
    let c = Candidates::build(level, |_| true)?;
    let pres = c.presentation()?;
    Ok(c.angles.iter().zip(&c.vectors).map(|(&a, v)| (a, pres.to_vector(v))).collect())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
struct UnitResult {
    level: u64,
    solutions: Vec<Tuple5>,
    six_solutions: Vec<Vec<RationalAngle>>,
}

/// Per-level high-precision `ln tan` values used for the secondary check.
struct LogTable {
    p: usize,
    values: Vec<BigFloat>,
}

impl LogTable {
    fn new(c: &Candidates) -> LogTable {
        let p = numeric::precision();
        let values = c.angles.iter().map(|x| numeric::ln_abs_tan(x.num(), x.den(), p)).collect();
        LogTable { p, values }
    }

    fn agrees(&self, x0: usize, tail: &[usize]) -> bool {
        let p = self.p;
        let lhs = numeric::scale(&self.values[x0], 2, p);
        let rhs = tail.iter().fold(numeric::from_i64(0, p), |a, &i| numeric::add(&a, &self.values[i], p));
        numeric::within(&lhs, &rhs, numeric::LOG_TOLERANCE, p)
    }
}

fn search_unit(spec: &DenominatorSpec, unit: u64, six: bool, numeric_check: bool) -> Result<UnitResult> {
    let cands = Candidates::build(unit, |d| spec.admits(d))?;
    let exact_lcm = spec.exact_lcm(unit);
    let m = cands.angles.len();
    let logs = numeric_check.then(|| LogTable::new(&cands));

    let mut pairs: HashMap<u64, Vec<(u32, u32)>> = HashMap::new();
    for i in 0..m {
        for j in i..m {
            pairs.entry(cands.hashes[i].wrapping_add(cands.hashes[j])).or_default().push((i as u32, j as u32));
        }
    }
    let accept = |x0: usize, tail: &[usize]| -> Result<Option<Vec<RationalAngle>>> {
        if !cands.exact(x0, tail) {
            return Ok(None);
        }
        let mut xs: Vec<RationalAngle> = std::iter::once(x0).chain(tail.iter().copied()).map(|i| cands.angles[i]).collect();
        if let Some(l) = exact_lcm {
            if tuple_lcm(&xs) != l {
                return Ok(None);
            }
        }
        if let Some(t) = &logs {
            if !t.agrees(x0, tail) {
                return Err(Error::Invalid(format!("numeric check failed for exact solution {xs:?}")));
            }
        }
        xs[1..].sort();
        Ok(Some(xs))
    };

    let mut out = UnitResult { level: unit, ..Default::default() };
    if !six {
        let mut seen: HashSet<Tuple5> = HashSet::new();
        for x0 in 0..m {
            let h0 = cands.hashes[x0].wrapping_mul(2);
            for (&hp, ps) in &pairs {
                let Some(qs) = pairs.get(&h0.wrapping_sub(hp)) else { continue };
                for &(i, j) in ps {
                    for &(k, l) in qs {
                        if (k, l) < (i, j) {
                            continue;
                        }
                        let tail = [i as usize, j as usize, k as usize, l as usize];
                        if let Some(xs) = accept(x0, &tail)? {
                            seen.insert(Tuple5([xs[0], xs[1], xs[2], xs[3], xs[4]]));
                        }
                    }
                }
            }
        }
        out.solutions = seen.into_iter().collect();
        out.solutions.sort();
    } else {
        let mut triples: HashMap<u64, Vec<(u32, u32, u32)>> = HashMap::new();
        for i in 0..m {
            for j in i..m {
                for k in j..m {
                    let h = cands.hashes[i].wrapping_add(cands.hashes[j]).wrapping_add(cands.hashes[k]);
                    triples.entry(h).or_default().push((i as u32, j as u32, k as u32));
                }
            }
        }
        let mut seen: BTreeSet<Vec<RationalAngle>> = BTreeSet::new();
        for x0 in 0..m {
            let h0 = cands.hashes[x0].wrapping_mul(2);
            for (&hp, ps) in &pairs {
                let Some(ts) = triples.get(&h0.wrapping_sub(hp)) else { continue };
                for &(i, j) in ps {
                    for &(k, l, r) in ts {
                        let tail = [i as usize, j as usize, k as usize, l as usize, r as usize];
                        if let Some(xs) = accept(x0, &tail)? {
                            seen.insert(xs);
                        }
                    }
                }
            }
        }
        out.six_solutions = seen.into_iter().collect();
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum CheckpointLine {
    Header { spec: DenominatorSpec, sign: Sign, six: bool },
    Unit(UnitResult),
}

struct Checkpoint {
    done: BTreeMap<u64, UnitResult>,
    writer: Option<Mutex<File>>,
}

fn open_checkpoint(path: Option<&Path>, resume: bool, spec: &DenominatorSpec, sign: Sign, six: bool) -> Result<Checkpoint> {
    let Some(path) = path else {
        return Ok(Checkpoint { done: BTreeMap::new(), writer: None });
    };
    let header = CheckpointLine::Header { spec: spec.clone(), sign, six };
    let mut done = BTreeMap::new();
    if resume && path.exists() {
        done = load_checkpoint(path, spec, sign, six)?;
        // A crash can leave an unterminated line; drop it so the file stays loadable.
        let text = std::fs::read(path)?;
        let keep = text.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        let f = OpenOptions::new().append(true).open(path)?;
        f.set_len(keep as u64)?;
        return Ok(Checkpoint { done, writer: Some(Mutex::new(f)) });
    }
    let mut f = File::create(path)?;
    writeln!(f, "{}", serde_json::to_string(&header)?)?;
    f.flush()?;
    Ok(Checkpoint { done, writer: Some(Mutex::new(f)) })
}

/// Completed units of a checkpoint, after checking that it was written for the same search.
fn load_checkpoint(path: &Path, spec: &DenominatorSpec, sign: Sign, six: bool) -> Result<BTreeMap<u64, UnitResult>> {
    let reader = BufReader::new(File::open(path)?);
    let lines: Vec<String> = reader.lines().collect::<std::io::Result<_>>()?;
    let text_ends_with_newline = std::fs::read(path)?.last() == Some(&b'\n');
    let mut done = BTreeMap::new();
    let last = lines.len();
    for (no, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: std::result::Result<CheckpointLine, _> = serde_json::from_str(line);
        let parsed = match parsed {
            Ok(p) => p,
            // An unterminated final line is an interrupted write of one unit.
            Err(_) if no + 1 == last && !text_ends_with_newline && no > 0 => continue,
            Err(e) => {
                return Err(Error::Checkpoint(format!("{}:{}: {e}", path.display(), no + 1)));
            }
        };
        match (no, parsed) {
            (0, CheckpointLine::Header { spec: s, sign: g, six: x }) => {
                if &s != spec || g != sign || x != six {
                    return Err(Error::Checkpoint(format!(
                        "{} was written for {s} sign {g} six={x}, not {spec} sign {sign} six={six}",
                        path.display()
                    )));
                }
            }
            (0, _) => return Err(Error::Checkpoint(format!("{}: missing header line", path.display()))),
            (_, CheckpointLine::Unit(u)) => {
                done.insert(u.level, u);
            }
            (_, CheckpointLine::Header { .. }) => {
                return Err(Error::Checkpoint(format!("{}:{}: unexpected header", path.display(), no + 1)));
            }
        }
    }
    if lines.is_empty() {
        return Err(Error::Checkpoint(format!("{}: empty checkpoint", path.display())));
    }
    Ok(done)
}

/// Runs every unit of the spec and merges the results deterministically.
pub fn search_with(spec: &DenominatorSpec, sign: Sign, six: bool, opts: &SearchOptions) -> Result<SearchReport> {
    spec.validate()?;
    let start = Instant::now();
    let units = spec.units();
    let ckpt = open_checkpoint(opts.checkpoint.as_deref(), opts.resume, spec, sign, six)?;
    let resumed = units.iter().filter(|u| ckpt.done.contains_key(u)).count();

    // With every entry in (0, π/2) both sides are positive, so the twisted equation has no solutions.
    let run = |u: u64| -> Result<UnitResult> {
        if let Some(r) = ckpt.done.get(&u) {
            return Ok(r.clone());
        }
        let r = if sign == Sign::Minus {
            UnitResult { level: u, ..Default::default() }
        } else {
            search_unit(spec, u, six, !opts.skip_numeric)?
        };
        if let Some(w) = &ckpt.writer {
            let line = serde_json::to_string(&CheckpointLine::Unit(r.clone()))?;
            let mut f = w.lock().expect("checkpoint writer poisoned");
            writeln!(f, "{line}")?;
            f.flush()?;
        }
        Ok(r)
    };
    let results: Vec<UnitResult> = match opts.jobs {
        Some(1) => units.iter().map(|&u| run(u)).collect::<Result<_>>()?,
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Invalid(e.to_string()))?
            .install(|| units.par_iter().map(|&u| run(u)).collect::<Result<_>>())?,
        None => units.par_iter().map(|&u| run(u)).collect::<Result<_>>()?,
    };

    let mut solutions: BTreeSet<(u64, Tuple5)> = BTreeSet::new();
    let mut six_solutions: BTreeSet<(u64, Vec<RationalAngle>)> = BTreeSet::new();
    for r in results {
        solutions.extend(r.solutions.into_iter().map(|t| (t.lcm() as u64, t)));
        six_solutions.extend(r.six_solutions.into_iter().map(|t| (tuple_lcm(&t), t)));
    }
    let mut per_lcm = BTreeMap::new();
    for (l, _) in solutions.iter() {
        *per_lcm.entry(*l).or_insert(0) += 1;
    }
    for (l, _) in six_solutions.iter() {
        *per_lcm.entry(*l).or_insert(0) += 1;
    }
    Ok(SearchReport {
        spec: spec.clone(),
        sign,
        six,
        solutions: solutions.into_iter().map(|(_, t)| t).collect(),
        six_solutions: six_solutions.into_iter().map(|(_, t)| t).collect(),
        per_lcm,
        units_total: units.len(),
        units_resumed: resumed,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

pub fn search(spec: &DenominatorSpec, sign: Sign) -> Result<SearchReport> {
    search_with(spec, sign, false, &SearchOptions::default())
}

pub fn search_sixvar(spec: &DenominatorSpec) -> Result<SearchReport> {
    search_with(spec, Sign::Plus, true, &SearchOptions::default())
}

fn admissible(xs: &[RationalAngle]) -> Result<()> {
    for x in xs {
        if x.den() <= 2 || x.abs() >= RationalAngle::HALF {
            return Err(Error::OutOfRange(format!("{x}: tangent is zero or undefined")));
        }
    }
    Ok(())
}

/// Exact check of `tan²x₀ = sign · Π_{i≥1} tan xᵢ` for nonzero entries in (−π/2, π/2).
///
/// Magnitudes are compared as vectors at the joint level and signs are tracked separately;
/// a high-precision evaluation must agree or the call fails.
pub fn verify_signed(xs: &[RationalAngle], sign: Sign) -> Result<bool> {
    if xs.len() < 2 {
        return Err(Error::Invalid("need at least two angles".into()));
    }
    admissible(xs)?;
    let level = tuple_lcm(xs);
    let terms: Vec<(RationalAngle, i64)> = xs
        .iter()
        .enumerate()
        .map(|(i, x)| (x.abs(), if i == 0 { 2 } else { -1 }))
        .collect();
    let magnitudes_equal = product_vector(&terms, level)?.is_zero();
    let rhs_sign = sign.value() * xs[1..].iter().map(|x| x.num().signum()).product::<i64>();
    let exact = magnitudes_equal && rhs_sign > 0;

    let p = numeric::precision();
    let lhs = numeric::scale(&numeric::ln_abs_tan(xs[0].num(), xs[0].den(), p), 2, p);
    let rhs = xs[1..].iter().fold(numeric::from_i64(0, p), |acc, x| {
        numeric::add(&acc, &numeric::ln_abs_tan(x.num(), x.den(), p), p)
    });
    let close = numeric::within(&lhs, &rhs, numeric::LOG_TOLERANCE, p) && rhs_sign > 0;
    if exact != close {
        return Err(Error::Invalid(format!("exact and numeric checks disagree on {xs:?}")));
    }
    Ok(exact)
}

/// Exact check of the five-variable equation; for sign −1 with entries in (0, π/2) this is false by positivity.
pub fn verify_solution(t: &Tuple5, sign: Sign) -> Result<bool> {
    verify_signed(&t.0, sign)
}

/// A sign decoration `(η₀x₀, …, η₄x₄)` of a solution and the equation it satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedTuple {
    pub eta: [i8; 5],
    pub tuple: Tuple5,
    pub sign: Sign,
}

/// All 32 sign decorations of a verified solution, split by `Π_{i≥1} ηᵢ`.
pub fn generalize_signs(t: &Tuple5) -> Vec<SignedTuple> {
    let mut out = Vec::with_capacity(32);
    for mask in 0u32..32 {
        let mut eta = [1i8; 5];
        let mut xs = t.0;
        for i in 0..5 {
            if mask >> i & 1 == 1 {
                eta[i] = -1;
                xs[i] = -xs[i];
            }
        }
        let tail: i64 = eta[1..].iter().map(|&e| e as i64).product();
        out.push(SignedTuple { eta, tuple: Tuple5(xs), sign: Sign::of(tail) });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> RationalAngle {
        RationalAngle::of(n, d)
    }

    #[test]
    fn candidates_examples() {
        let c = enumerate_candidates(5).unwrap();
        assert_eq!(c.iter().map(|x| x.0).collect::<Vec<_>>(), vec![q(1, 5), q(2, 5)]);
        let c = enumerate_candidates(8).unwrap();
        assert_eq!(c.iter().map(|x| x.0).collect::<Vec<_>>(), vec![q(1, 8), q(1, 4), q(3, 8)]);
        assert!(enumerate_candidates(40).unwrap().iter().any(|x| x.0 == q(17, 40)));
    }

    #[test]
    fn verify_examples() {
        let row = Tuple5::from_pairs([(1, 8), (1, 40), (7, 40), (9, 40), (17, 40)]);
        assert!(verify_solution(&row, Sign::Plus).unwrap());
        assert!(!verify_solution(&row, Sign::Minus).unwrap());
        assert!(verify_solution(&Tuple5([RationalAngle::QUARTER; 5]), Sign::Plus).unwrap());
        assert!(!verify_solution(&Tuple5([q(1, 5); 5]), Sign::Plus).unwrap());
        assert!(verify_solution(&Tuple5([q(1, 2); 5]), Sign::Plus).is_err());
    }

    #[test]
    fn signs_split_evenly() {
        let row = Tuple5::from_pairs([(1, 8), (1, 40), (7, 40), (9, 40), (17, 40)]);
        let all = generalize_signs(&row);
        assert_eq!(all.len(), 32);
        assert_eq!(all.iter().filter(|s| s.sign == Sign::Plus).count(), 16);
        assert_eq!(all[0].tuple, row);
        for s in &all {
            assert!(verify_signed(&s.tuple.0, s.sign).unwrap());
            let other = if s.sign == Sign::Plus { Sign::Minus } else { Sign::Plus };
            assert!(!verify_signed(&s.tuple.0, other).unwrap());
        }
    }

    #[test]
    fn twisted_search_is_empty() {
        let r = search(&DenominatorSpec::MaxLcm(20), Sign::Minus).unwrap();
        assert!(r.solutions.is_empty());
    }
}
