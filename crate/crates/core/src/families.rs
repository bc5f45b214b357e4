//! The nine parametric solution families, the sporadic table, and classification.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::angle::{omega3_member, GroupElement, Perm4, RationalAngle, Tuple5};
use crate::solver::{verify_solution, Sign};

type Q = Ratio<i64>;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct FamilyId(pub u8, pub u8);

impl FamilyId {
    pub const ALL: [FamilyId; 9] = [
        FamilyId(1, 1),
        FamilyId(1, 2),
        FamilyId(2, 1),
        FamilyId(2, 2),
        FamilyId(2, 3),
        FamilyId(2, 4),
        FamilyId(2, 5),
        FamilyId(3, 1),
        FamilyId(3, 2),
    ];

    pub fn has_t(self) -> bool {
        matches!(self, FamilyId(1, _))
    }

    /// The image of the family under θ.
    pub fn theta_image(self) -> FamilyId {
        match self {
            FamilyId(2, 2) => FamilyId(2, 4),
            FamilyId(2, 4) => FamilyId(2, 2),
            FamilyId(3, 1) => FamilyId(3, 2),
            FamilyId(3, 2) => FamilyId(3, 1),
            f => f,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

/// `c + s·S + t·T`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Affine {
    c: Q,
    s: Q,
    t: Q,
}

fn af(c: Q, s: i64, t: i64) -> Affine {
    Affine { c, s: Q::from_integer(s), t: Q::from_integer(t) }
}

impl Affine {
    fn eval(&self, s: Q, t: Q) -> Q {
        self.c + self.s * s + self.t * t
    }

    fn minus(self, o: Affine) -> Affine {
        Affine { c: self.c - o.c, s: self.s - o.s, t: self.t - o.t }
    }
}

/// `form > 0`, or `form ≥ 0` when not strict.
#[derive(Clone, Copy, Debug)]
struct Constraint {
    form: Affine,
    strict: bool,
}

fn gt(form: Affine) -> Constraint {
    Constraint { form, strict: true }
}

fn ge(form: Affine) -> Constraint {
    Constraint { form, strict: false }
}

struct Pattern {
    entries: [Affine; 5],
    constraints: Vec<Constraint>,
}

fn pattern(id: FamilyId) -> Pattern {
    let z = Q::zero();
    let s = af(z, 1, 0);
    let t = af(z, 0, 1);
    let c = |n, d| af(q(n, d), 0, 0);
    let cs = |n, d, k| af(q(n, d), k, 0);
    let two_param = |entries| Pattern { entries, constraints: vec![] };
    let one_param = |entries, hi: Q, strict: bool| Pattern {
        entries,
        constraints: vec![gt(s), Constraint { form: af(hi, -1, 0), strict }],
    };
    match id {
        FamilyId(1, 1) => {
            let mut p = two_param([s, s, s, t, af(q(1, 2), 0, -1)]);
            p.constraints = vec![gt(s), gt(cs(1, 2, -1)), gt(t), ge(af(q(1, 4), 0, -1))];
            p
        }
        FamilyId(1, 2) => {
            let mut p = two_param([c(1, 4), s, cs(1, 2, -1), t, af(q(1, 2), 0, -1)]);
            p.constraints = vec![gt(s), ge(af(z, -1, 1)), ge(af(q(1, 4), 0, -1))];
            p
        }
        FamilyId(2, 1) => one_param([c(1, 4), s, cs(1, 3, -1), cs(1, 3, 1), cs(1, 2, -3)], q(1, 6), true),
        FamilyId(2, 2) => {
            one_param([cs(1, 2, -1), cs(1, 2, -1), cs(1, 3, -1), cs(1, 3, 1), cs(1, 2, -3)], q(1, 6), true)
        }
        FamilyId(2, 3) => one_param([cs(1, 6, 1), s, cs(1, 6, 1), cs(1, 3, 1), cs(1, 2, -3)], q(1, 6), true),
        FamilyId(2, 4) => {
            one_param([cs(1, 6, -1), s, cs(1, 3, -1), cs(1, 6, -1), cs(1, 2, -3)], q(1, 6), true)
        }
        FamilyId(2, 5) => one_param([cs(0, 1, 3), s, cs(1, 3, -1), cs(1, 3, 1), cs(0, 1, 3)], q(1, 6), true),
        FamilyId(3, 1) => one_param([c(1, 8), c(1, 24), c(7, 24), s, cs(1, 2, -1)], q(1, 4), false),
        FamilyId(3, 2) => one_param([c(3, 8), c(5, 24), c(11, 24), s, cs(1, 2, -1)], q(1, 4), false),
        _ => panic!("unknown family {id}"),
    }
}

fn holds(cs: &[Constraint], s: Q, t: Q) -> bool {
    cs.iter().all(|c| {
        let v = c.form.eval(s, t);
        if c.strict {
            v.is_positive()
        } else {
            !v.is_negative()
        }
    })
}

/// The member of the pattern system with parameters `(s, t)`, if the parameters are in range.
pub fn family_member(id: FamilyId, s: Q, t: Q) -> Option<Tuple5> {
    let p = pattern(id);
    holds(&p.constraints, s, t)
        .then(|| Tuple5(p.entries.map(|e| RationalAngle::from_ratio(e.eval(s, t)))))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FamilyMatch {
    pub id: FamilyId,
    pub s: Q,
    /// Present only for the two-parameter families.
    pub t: Option<Q>,
    /// `s4_act(perm, member(s, t))` reproduces the input.
    pub perm: Perm4,
}

fn match_pattern(p: &Pattern, y: &Tuple5, has_t: bool) -> Option<(Q, Q)> {
    let ys: Vec<Q> = y.0.iter().map(|x| x.ratio()).collect();
    let (s, t) = if has_t {
        let mut sol = None;
        'outer: for i in 0..5 {
            for j in i + 1..5 {
                let (a, b) = (p.entries[i], p.entries[j]);
                let det = a.s * b.t - a.t * b.s;
                if det.is_zero() {
                    continue;
                }
                let (ri, rj) = (ys[i] - a.c, ys[j] - b.c);
                sol = Some(((ri * b.t - a.t * rj) / det, (a.s * rj - ri * b.s) / det));
                break 'outer;
            }
        }
        sol?
    } else {
        let k = p.entries.iter().position(|e| !e.s.is_zero())?;
        ((ys[k] - p.entries[k].c) / p.entries[k].s, Q::zero())
    };
    let fits = p.entries.iter().zip(&ys).all(|(e, &v)| e.eval(s, t) == v);
    (fits && holds(&p.constraints, s, t)).then_some((s, t))
}

/// First family match in scan order: family ascending, then permutation in lexicographic order.
pub fn phi_member(t: &Tuple5) -> Option<FamilyMatch> {
    let perms = Perm4::all();
    for id in FamilyId::ALL {
        let p = pattern(id);
        for &pi in &perms {
            let y = t.s4_act(pi);
            if let Some((s, tt)) = match_pattern(&p, &y, id.has_t()) {
                return Some(FamilyMatch { id, s, t: id.has_t().then_some(tt), perm: pi.inverse() });
            }
        }
    }
    None
}

/// Every family containing the tuple, one match per family.
pub fn phi_memberships(t: &Tuple5) -> Vec<FamilyMatch> {
    let perms = Perm4::all();
    FamilyId::ALL
        .iter()
        .filter_map(|&id| {
            let p = pattern(id);
            perms.iter().find_map(|&pi| {
                match_pattern(&p, &t.s4_act(pi), id.has_t())
                    .map(|(s, tt)| FamilyMatch { id, s, t: id.has_t().then_some(tt), perm: pi.inverse() })
            })
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ClassLabel {
    Family(FamilyMatch),
    /// `element` applied to the row gives the input.
    Sporadic { row: usize, element: GroupElement },
    Unknown,
}

impl ClassLabel {
    pub fn kind(&self) -> &'static str {
        match self {
            ClassLabel::Family(_) => "family",
            ClassLabel::Sporadic { .. } => "sporadic",
            ClassLabel::Unknown => "unknown",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Family(m) => {
                write!(f, "Family Phi_{{{}}} s={}", m.id, m.s)?;
                if let Some(t) = m.t {
                    write!(f, " t={t}")?;
                }
                write!(f, " perm={}", m.perm)
            }
            ClassLabel::Sporadic { row, element } => write!(f, "Sporadic row={row} element={element}"),
            ClassLabel::Unknown => write!(f, "Unknown"),
        }
    }
}

pub fn classify(t: &Tuple5) -> ClassLabel {
    if let Some(m) = phi_member(t) {
        return ClassLabel::Family(m);
    }
    match sporadic_table().orbit_index.get(t) {
        Some(&(row, element)) => ClassLabel::Sporadic { row, element },
        None => ClassLabel::Unknown,
    }
}

/// The table rows as printed, grouped by their lcm heading.
const PRINTED: &[(u64, [(i64, i64); 5])] = &[
    (30, [(1, 30), (1, 30), (1, 15), (2, 15), (4, 15)]),
    (30, [(1, 15), (1, 30), (1, 15), (7, 30), (11, 30)]),
    (30, [(2, 15), (1, 30), (2, 15), (7, 30), (13, 30)]),
    (30, [(7, 30), (1, 15), (2, 15), (7, 30), (7, 15)]),
    (40, [(1, 8), (1, 40), (7, 40), (9, 40), (17, 40)]),
    (48, [(1, 16), (1, 48), (5, 48), (11, 48), (17, 48)]),
    (48, [(3, 16), (1, 48), (13, 48), (17, 48), (19, 48)]),
    (60, [(1, 60), (1, 60), (1, 20), (1, 12), (17, 60)]),
    (60, [(1, 60), (1, 60), (1, 12), (7, 60), (3, 20)]),
    (60, [(1, 20), (1, 60), (1, 20), (13, 60), (5, 12)]),
    (60, [(1, 20), (1, 60), (7, 60), (13, 60), (19, 60)]),
    (60, [(1, 20), (1, 20), (1, 12), (7, 60), (19, 60)]),
    (60, [(1, 12), (1, 60), (1, 12), (13, 60), (9, 20)]),
    (60, [(1, 12), (1, 60), (1, 12), (7, 20), (23, 60)]),
    (60, [(1, 12), (1, 60), (11, 60), (13, 60), (23, 60)]),
    (60, [(1, 12), (1, 20), (1, 12), (11, 60), (23, 60)]),
    (60, [(1, 12), (1, 12), (3, 20), (11, 60), (13, 60)]),
    (60, [(7, 60), (1, 60), (7, 60), (7, 20), (5, 12)]),
    (60, [(7, 60), (1, 20), (7, 60), (11, 60), (5, 12)]),
    (60, [(3, 20), (1, 60), (3, 20), (23, 60), (5, 12)]),
    (60, [(3, 20), (1, 60), (17, 60), (19, 60), (23, 60)]),
    (60, [(3, 20), (1, 12), (3, 20), (17, 60), (19, 60)]),
    (60, [(11, 60), (1, 12), (7, 60), (11, 60), (9, 20)]),
    (60, [(11, 60), (1, 12), (11, 60), (17, 60), (7, 20)]),
    (60, [(13, 60), (1, 20), (1, 12), (13, 60), (29, 60)]),
    (60, [(13, 60), (1, 12), (13, 60), (19, 60), (7, 20)]),
    (60, [(1, 4), (1, 60), (13, 60), (5, 12), (9, 20)]),
    (60, [(1, 4), (1, 60), (7, 20), (23, 60), (5, 12)]),
    (60, [(1, 4), (1, 30), (7, 30), (11, 30), (13, 30)]),
    (60, [(1, 4), (1, 20), (11, 60), (23, 60), (5, 12)]),
    (60, [(1, 4), (1, 12), (17, 60), (19, 60), (7, 20)]),
    (72, [(1, 8), (1, 72), (7, 72), (23, 72), (25, 72)]),
    (72, [(1, 8), (1, 24), (7, 72), (17, 72), (31, 72)]),
    (84, [(1, 84), (1, 84), (5, 84), (1, 12), (17, 84)]),
    (84, [(5, 84), (1, 84), (5, 84), (25, 84), (5, 12)]),
    (84, [(1, 12), (1, 84), (1, 12), (25, 84), (37, 84)]),
    (84, [(1, 12), (1, 12), (11, 84), (13, 84), (23, 12)]),
    (84, [(11, 84), (1, 12), (11, 84), (19, 84), (29, 84)]),
    (84, [(13, 84), (1, 12), (13, 84), (19, 84), (31, 84)]),
    (84, [(17, 84), (1, 84), (17, 84), (5, 12), (37, 84)]),
    (84, [(19, 84), (11, 84), (13, 84), (19, 84), (5, 12)]),
    (84, [(1, 4), (1, 84), (25, 84), (5, 12), (37, 84)]),
    (84, [(1, 4), (1, 12), (19, 84), (29, 84), (31, 84)]),
    (120, [(1, 120), (1, 120), (7, 120), (11, 120), (17, 120)]),
    (120, [(7, 120), (1, 120), (7, 120), (43, 120), (49, 120)]),
    (120, [(11, 120), (1, 120), (11, 120), (43, 120), (53, 120)]),
    (120, [(13, 120), (13, 120), (19, 120), (23, 120), (29, 120)]),
    (120, [(1, 8), (1, 120), (23, 120), (47, 120), (49, 120)]),
    (120, [(1, 8), (1, 120), (9, 40), (41, 120), (17, 40)]),
    (120, [(1, 8), (1, 120), (31, 120), (41, 120), (49, 120)]),
    (120, [(1, 8), (1, 40), (7, 120), (47, 120), (17, 40)]),
    (120, [(1, 8), (1, 40), (7, 40), (31, 120), (49, 120)]),
    (120, [(1, 8), (7, 120), (17, 120), (23, 120), (47, 120)]),
    (120, [(1, 8), (7, 120), (17, 120), (31, 120), (41, 120)]),
    (120, [(1, 8), (17, 120), (7, 40), (23, 120), (9, 40)]),
    (120, [(17, 120), (1, 120), (17, 120), (49, 120), (53, 120)]),
    (120, [(19, 120), (13, 120), (19, 120), (31, 120), (37, 120)]),
    (120, [(23, 120), (13, 120), (23, 120), (31, 120), (41, 120)]),
    (120, [(29, 120), (13, 120), (29, 120), (37, 120), (41, 120)]),
    (120, [(1, 4), (1, 120), (43, 120), (49, 120), (53, 120)]),
    (120, [(1, 4), (13, 120), (31, 120), (37, 120), (41, 120)]),
];

pub fn printed_rows() -> Vec<(u64, Tuple5)> {
    PRINTED.iter().map(|&(l, r)| (l, Tuple5::from_pairs(r))).collect()
}

/// Condition (i) `x0 < π/4`, sorted tail, or (ii) `x0 = π/4`, sorted tail, `x1 + x4 < π/2`.
pub fn representative_form(t: &Tuple5) -> bool {
    let x = &t.0;
    let sorted = x[1] <= x[2] && x[2] <= x[3] && x[3] <= x[4];
    sorted
        && (x[0] < RationalAngle::QUARTER
            || (x[0] == RationalAngle::QUARTER && x[1] + x[4] < RationalAngle::HALF))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowStatus {
    Verified,
    /// The printed row fails; `replacement` is the unique single-entry correction at its lcm.
    Corrected { replacement: Tuple5 },
    /// The printed row fails and no unique correction exists.
    Flagged,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowReport {
    pub index: usize,
    pub lcm_heading: u64,
    pub printed: Tuple5,
    pub in_range: bool,
    pub representative_form: bool,
    pub exact: bool,
    pub orbit_size: usize,
    pub in_phi: bool,
    pub status: RowStatus,
    /// Every single-entry replacement at the row's lcm that passes all checks.
    pub candidates: Vec<Tuple5>,
}

fn row_passes(t: &Tuple5) -> bool {
    t.all_in_open_quarter_turn()
        && representative_form(t)
        && verify_solution(t, Sign::Plus).unwrap_or(false)
        && t.orbit().len() == 48
        && phi_member(t).is_none()
}

/// Replacements of one entry by `c/lcm` that make the row pass, excluding orbits of other passing rows.
fn fix_search(lcm: u64, row: &Tuple5, taken: &HashSet<Tuple5>) -> Vec<Tuple5> {
    let mut out = BTreeSet::new();
    for pos in 0..5 {
        for c in 1..lcm.div_ceil(2) {
            let mut y = *row;
            y.0[pos] = RationalAngle::of(c as i64, lcm as i64);
            if y == *row || y.lcm() as u64 != lcm {
                continue;
            }
            if row_passes(&y) && !taken.contains(&y) {
                out.insert(y);
            }
        }
    }
    out.into_iter().collect()
}

/// Checks every printed row and searches for corrections of failing rows.
pub fn verify_table() -> Vec<RowReport> {
    let rows = printed_rows();
    let mut reports: Vec<RowReport> = rows
        .iter()
        .enumerate()
        .map(|(index, &(lcm_heading, printed))| {
            let in_range = printed.all_in_open_quarter_turn();
            let exact = in_range && verify_solution(&printed, Sign::Plus).unwrap_or(false);
            let ok = row_passes(&printed);
            RowReport {
                index,
                lcm_heading,
                printed,
                in_range,
                representative_form: representative_form(&printed),
                exact,
                orbit_size: if in_range { printed.orbit().len() } else { 0 },
                in_phi: in_range && phi_member(&printed).is_some(),
                status: if ok { RowStatus::Verified } else { RowStatus::Flagged },
                candidates: Vec::new(),
            }
        })
        .collect();
    let taken: HashSet<Tuple5> = reports
        .iter()
        .filter(|r| r.status == RowStatus::Verified)
        .flat_map(|r| r.printed.orbit().into_iter().map(|(_, y)| y))
        .collect();
    for r in reports.iter_mut().filter(|r| r.status == RowStatus::Flagged) {
        r.candidates = fix_search(r.lcm_heading, &r.printed, &taken);
        if let [only] = r.candidates[..] {
            r.status = RowStatus::Corrected { replacement: only };
        }
    }
    reports
}

pub struct SporadicTable {
    pub reports: Vec<RowReport>,
    /// Verified and corrected rows, in table order; flagged rows are omitted.
    pub rows: Vec<(usize, Tuple5)>,
    orbit_index: HashMap<Tuple5, (usize, GroupElement)>,
}

impl SporadicTable {
    pub fn flagged(&self) -> usize {
        self.reports.iter().filter(|r| r.status == RowStatus::Flagged).count()
    }

    pub fn row(&self, index: usize) -> Option<Tuple5> {
        self.rows.iter().find(|&&(i, _)| i == index).map(|&(_, t)| t)
    }
}

/// The verified table, built once.
pub fn sporadic_table() -> &'static SporadicTable {
    static T: OnceLock<SporadicTable> = OnceLock::new();
    T.get_or_init(|| {
        let reports = verify_table();
        let rows: Vec<(usize, Tuple5)> = reports
            .iter()
            .filter_map(|r| match &r.status {
                RowStatus::Verified => Some((r.index, r.printed)),
                RowStatus::Corrected { replacement } => Some((r.index, *replacement)),
                RowStatus::Flagged => None,
            })
            .collect();
        let mut orbit_index = HashMap::new();
        for &(i, t) in &rows {
            for (g, y) in t.orbit() {
                orbit_index.entry(y).or_insert((i, g));
            }
        }
        SporadicTable { reports, rows, orbit_index }
    })
}

/// All Z/2×S4 images of the table rows.
pub fn expand_orbits(table: &SporadicTable) -> BTreeSet<Tuple5> {
    table.rows.iter().flat_map(|(_, t)| t.orbit().into_iter().map(|(_, y)| y)).collect()
}

/// Members of the expanded sporadic set lying in Ω3.
pub fn sporadic_omega3(table: &SporadicTable) -> BTreeSet<Tuple5> {
    expand_orbits(table).into_iter().filter(omega3_member).collect()
}

/// `c + k·u` for the single free parameter `u`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Linear {
    pub c: Q,
    pub k: Q,
}

impl Linear {
    pub fn at(&self, u: Q) -> Q {
        self.c + self.k * u
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Omega3Piece {
    Point(Tuple5),
    /// `entries(u)` for `u` between `lo` and `hi`, endpoints included when flagged.
    Segment {
        entries: [Linear; 5],
        lo: Q,
        lo_closed: bool,
        hi: Q,
        hi_closed: bool,
    },
    /// The linear condition vanishes identically for this permutation; the piece is two-dimensional.
    Region { perm: Perm4 },
}

impl Omega3Piece {
    pub fn contains(&self, t: &Tuple5) -> bool {
        match self {
            Omega3Piece::Point(p) => p == t,
            Omega3Piece::Segment { entries, lo, lo_closed, hi, hi_closed } => {
                let Some(k) = entries.iter().position(|e| !e.k.is_zero()) else {
                    return entries.iter().zip(&t.0).all(|(e, x)| e.c == x.ratio());
                };
                let u = (t.0[k].ratio() - entries[k].c) / entries[k].k;
                let in_lo = if *lo_closed { u >= *lo } else { u > *lo };
                let in_hi = if *hi_closed { u <= *hi } else { u < *hi };
                in_lo && in_hi && entries.iter().zip(&t.0).all(|(e, x)| e.at(u) == x.ratio())
            }
            Omega3Piece::Region { .. } => false,
        }
    }
}

impl fmt::Display for Omega3Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Omega3Piece::Point(t) => write!(f, "{t}"),
            Omega3Piece::Segment { entries, lo, lo_closed, hi, hi_closed } => {
                let term = |k: Q| {
                    if k.is_one() {
                        "u".to_string()
                    } else if k == -Q::one() {
                        "-u".to_string()
                    } else {
                        format!("{k}u")
                    }
                };
                let parts: Vec<String> = entries
                    .iter()
                    .map(|e| match (e.c.is_zero(), e.k.is_zero()) {
                        (_, true) => e.c.to_string(),
                        (true, false) => term(e.k),
                        (false, false) if e.k.is_positive() => format!("{}+{}", e.c, term(e.k)),
                        (false, false) => format!("{}{}", e.c, term(e.k)),
                    })
                    .collect();
                let l = if *lo_closed { '[' } else { '(' };
                let h = if *hi_closed { ']' } else { ')' };
                write!(f, "({}) for u in {l}{lo}, {hi}{h}", parts.join(","))
            }
            Omega3Piece::Region { perm } => write!(f, "two-dimensional region under {perm}"),
        }
    }
}

/// Solves `x4 = x1 + x2 + x3` with the Ω3 ordering over every permutation of the pattern.
pub fn family_omega3_intersection(id: FamilyId) -> Vec<Omega3Piece> {
    let p = pattern(id);
    let z = Q::zero();
    let mut out: Vec<Omega3Piece> = Vec::new();
    for pi in Perm4::all() {
        let e = [
            p.entries[0],
            p.entries[1 + pi.0[0] as usize],
            p.entries[1 + pi.0[1] as usize],
            p.entries[1 + pi.0[2] as usize],
            p.entries[1 + pi.0[3] as usize],
        ];
        let half = af(q(1, 2), 0, 0);
        let mut cons = p.constraints.clone();
        cons.extend([
            gt(e[0]),
            gt(half.minus(e[0])),
            gt(e[1]),
            ge(e[2].minus(e[1])),
            ge(e[3].minus(e[2])),
            gt(e[4].minus(e[3])),
            gt(half.minus(e[4])),
        ]);
        let eq = e[4].minus(e[1]).minus(e[2]).minus(e[3]);
        // Express (s, t) as affine functions of a single parameter u, or fix them.
        let sub: Option<(Linear, Linear)> = if id.has_t() && !eq.t.is_zero() {
            Some((Linear { c: z, k: Q::one() }, Linear { c: -eq.c / eq.t, k: -eq.s / eq.t }))
        } else if !eq.s.is_zero() {
            let s0 = -eq.c / eq.s;
            let tl = if id.has_t() { Linear { c: z, k: Q::one() } } else { Linear { c: z, k: z } };
            Some((Linear { c: s0, k: -eq.t / eq.s }, tl))
        } else if eq.c.is_zero() {
            if id.has_t() {
                out.push(Omega3Piece::Region { perm: pi });
                continue;
            }
            Some((Linear { c: z, k: Q::one() }, Linear { c: z, k: z }))
        } else {
            None
        };
        let Some((sl, tl)) = sub else { continue };
        let to_u = |a: Affine| Linear { c: a.c + a.s * sl.c + a.t * tl.c, k: a.s * sl.k + a.t * tl.k };
        let (mut lo, mut lo_closed, mut hi, mut hi_closed): (Option<Q>, bool, Option<Q>, bool) =
            (None, false, None, false);
        let mut feasible = true;
        for c in &cons {
            let l = to_u(c.form);
            if l.k.is_zero() {
                let ok = if c.strict { l.c.is_positive() } else { !l.c.is_negative() };
                feasible &= ok;
                continue;
            }
            let b = -l.c / l.k;
            if l.k.is_positive() {
                // u > b or u ≥ b
                if lo.map_or(true, |x| b > x || (b == x && c.strict)) {
                    lo_closed = !c.strict;
                    lo = Some(b);
                }
            } else if hi.map_or(true, |x| b < x || (b == x && c.strict)) {
                hi_closed = !c.strict;
                hi = Some(b);
            }
        }
        if !feasible {
            continue;
        }
        let entries = e.map(to_u);
        let piece = match (lo, hi) {
            (Some(l), Some(h)) if l < h => {
                Omega3Piece::Segment { entries, lo: l, lo_closed, hi: h, hi_closed }
            }
            (Some(l), Some(h)) if l == h && lo_closed && hi_closed => {
                Omega3Piece::Point(Tuple5(entries.map(|x| RationalAngle::from_ratio(x.at(l)))))
            }
            (None, None) if entries.iter().all(|x| x.k.is_zero()) => {
                Omega3Piece::Point(Tuple5(entries.map(|x| RationalAngle::from_ratio(x.c))))
            }
            _ => continue,
        };
        if !out.contains(&piece) {
            out.push(piece);
        }
    }
    out
}
