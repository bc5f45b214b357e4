//! Command-line front end. Exit status: 0 success, 1 verification failure or runtime error, 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lhuilier_core::basis::{build_presentation, represent};
use lhuilier_core::closed::{closed_form_represent, gamma_sets};
use lhuilier_core::families::{classify, expand_orbits, sporadic_table, RowStatus};
use lhuilier_core::numeric::precision;
use lhuilier_core::solver::{search_with, verify_solution, DenominatorSpec, SearchOptions, Sign};
use lhuilier_core::store::{self, MeasurementRecord, RunConfig, SixRecord};
use lhuilier_core::tan::tan_vector;
use lhuilier_core::triangles::{lhuilier_check, prime_denominator_check, search_measurements, LambdaClass, Measurement};
use lhuilier_core::{Error, RationalAngle, Tuple5};

#[derive(Parser, Debug)]
#[command(name = "lhuilier", version, about = "Rational solutions of the tangent product equation and rational spherical triangles")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct SpecArgs {
    /// Every tuple whose denominators have lcm at most N.
    #[arg(long, value_name = "N")]
    max_lcm: Option<u64>,
    /// Comma-separated admissible denominators.
    #[arg(long, value_name = "D1,D2,..", value_delimiter = ',')]
    den_set: Option<Vec<u64>>,
}

impl SpecArgs {
    fn spec(&self) -> DenominatorSpec {
        match (&self.max_lcm, &self.den_set) {
            (Some(d), _) => DenominatorSpec::MaxLcm(*d),
            (None, Some(s)) => DenominatorSpec::fixed(s.iter().copied()),
            (None, None) => unreachable!("clap enforces the group"),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Exhaustive search for solutions.
    Search {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: String,
        /// Search the six-variable equation instead.
        #[arg(long)]
        six: bool,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, requires = "checkpoint")]
        resume: bool,
        #[arg(long)]
        jobs: Option<usize>,
        /// JSONL report path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-lcm TSV summary path.
        #[arg(long)]
        tsv: Option<PathBuf>,
        #[arg(long)]
        skip_numeric: bool,
    },
    /// Classify a tuple x0 x1 x2 x3 x4 (multiples of pi).
    Classify {
        #[arg(num_args = 5, required = true, allow_hyphen_values = true)]
        xs: Vec<String>,
    },
    /// List the Conrad basis of level N.
    Basis { n: u64 },
    /// Express v(N,A) in the basis of level N.
    Represent {
        n: u64,
        #[arg(allow_hyphen_values = true)]
        a: i64,
    },
    /// Express tan(x pi) in the basis of the given level.
    TanRep {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        level: Option<u64>,
    },
    /// Closed-form relative representation of v(LEVEL,A).
    ClosedForm {
        level: u64,
        #[arg(allow_hyphen_values = true)]
        a: i64,
        /// Compare against the generic representation.
        #[arg(long)]
        check: bool,
    },
    /// Rational spherical triangles.
    Triangles {
        #[arg(long, conflicts_with = "prime", required_unless_present = "prime")]
        max_lcm: Option<u64>,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the excess relation for a measurement E a b c.
    Lhuilier {
        #[arg(num_args = 4, required = true, allow_hyphen_values = true)]
        xs: Vec<String>,
    },
    /// Verify every row of the sporadic table.
    VerifySporadic {
        /// Print every correction candidate for failing rows.
        #[arg(long)]
        fix_search: bool,
    },
    /// Print the orbit of a sporadic row, or the orbit total.
    Orbits {
        #[arg(long)]
        row: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Verify(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invalid(_) | Error::OutOfRange(_) | Error::ZeroDenominator => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    run_with(args, &mut stdout.lock())
}

/// Same as [`run`] with normal output sent to `out`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(Failure::Verify(m)) => {
            eprintln!("verification failed: {m}");
            1
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            1
        }
    }
}

fn parse_angles(xs: &[String]) -> std::result::Result<Vec<RationalAngle>, Failure> {
    xs.iter().map(|s| s.parse::<RationalAngle>().map_err(Failure::from)).collect()
}

fn create(path: &PathBuf) -> std::result::Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?))
}

fn dispatch(cmd: Cmd, out: &mut dyn Write) -> Outcome {
    let bits = precision();
    match cmd {
        Cmd::Search { spec, sign, six, checkpoint, resume, jobs, out: path, tsv, skip_numeric } => {
            let spec = spec.spec();
            spec.validate()?;
            let sign: Sign = sign.parse()?;
            if six && sign == Sign::Minus {
                return Err(Failure::Usage("--six searches the plus-sign equation only".into()));
            }
            if jobs == Some(0) {
                return Err(Failure::Usage("--jobs must be positive".into()));
            }
            let config = RunConfig {
                subcommand: "search".into(),
                spec: Some(spec.to_string()),
                sign: Some(sign.to_string()),
                six,
                precision_bits: bits,
                output: path.as_ref().map(|p| p.display().to_string()),
                checkpoint: checkpoint.as_ref().map(|p| p.display().to_string()),
                jobs,
            };
            let opts = SearchOptions { jobs, checkpoint, resume, skip_numeric };
            let report = search_with(&spec, sign, six, &opts)?;
            let records = store::solution_records(&report);
            if let Some(p) = &path {
                if six {
                    let six_records: Vec<SixRecord> = report.six_solutions.iter().map(|x| SixRecord::new(x)).collect();
                    store::write_jsonl(create(p)?, &config, &six_records)?;
                } else {
                    store::write_jsonl(create(p)?, &config, &records)?;
                }
            }
            if let Some(p) = &tsv {
                store::write_tsv(create(p)?, &records)?;
            }
            let count = |k: &str| records.iter().filter(|r| r.class == k).count();
            writeln!(out, "spec: {}  sign: {}", report.spec, report.sign)?;
            if six {
                let missing = report
                    .six_solutions
                    .iter()
                    .filter(|x| !x.contains(&RationalAngle::of(1, 4)))
                    .count();
                writeln!(out, "six-variable solutions: {}  without a quarter-turn entry: {missing}", report.six_solutions.len())?;
            } else {
                writeln!(
                    out,
                    "solutions: {}  family: {}  sporadic: {}  unknown: {}",
                    records.len(),
                    count("family"),
                    count("sporadic"),
                    count("unknown")
                )?;
                let rows: std::collections::BTreeSet<usize> = records.iter().filter_map(|r| r.row).collect();
                let images: std::collections::BTreeSet<Tuple5> = rows
                    .iter()
                    .filter_map(|&i| sporadic_table().row(i))
                    .flat_map(|t| t.orbit().into_iter().map(|(_, y)| y))
                    .collect();
                writeln!(out, "sporadic rows: {}  orbit images: {}", rows.len(), images.len())?;
            }
            writeln!(
                out,
                "units: {} (resumed {})  elapsed: {} ms",
                report.units_total, report.units_resumed, report.elapsed_ms
            )?;
        }
        Cmd::Classify { xs } => {
            let xs = parse_angles(&xs)?;
            let t = Tuple5(std::array::from_fn(|i| xs[i]));
            if !t.all_in_open_quarter_turn() {
                return Err(Failure::Usage(format!("{t} has an entry outside (0, 1/2)")));
            }
            let label = classify(&t);
            let ok = verify_solution(&t, Sign::Plus)?;
            writeln!(out, "{label}")?;
            writeln!(out, "verified: {ok}")?;
            if !ok {
                return Err(Failure::Verify(format!("{t} does not satisfy the equation")));
            }
        }
        Cmd::Basis { n } => {
            if n < 2 {
                return Err(Failure::Usage("level must be at least 2".into()));
            }
            let pres = build_presentation(n)?;
            writeln!(out, "rank: {}", pres.rank())?;
            for b in pres.basis() {
                writeln!(out, "{b}")?;
            }
        }
        Cmd::Represent { n, a } => {
            writeln!(out, "{}", represent(n, a)?.to_cli_string())?;
        }
        Cmd::TanRep { x, level } => {
            let x: RationalAngle = x.parse()?;
            let level = level.unwrap_or_else(|| x.den().unsigned_abs().max(2));
            writeln!(out, "{}", tan_vector(x, level)?.to_cli_string())?;
        }
        Cmd::ClosedForm { level, a, check } => {
            let g = gamma_sets(level, a)?;
            let v = closed_form_represent(level, a)?;
            writeln!(out, "case: {}", g.case)?;
            writeln!(out, "{}", v.to_cli_string())?;
            if check {
                let generic = represent(level, a)?.restrict_to_level(level);
                if generic != v {
                    return Err(Failure::Verify(format!("generic representation is {}", generic.to_cli_string())));
                }
                writeln!(out, "matches generic representation")?;
            }
        }
        Cmd::Triangles { max_lcm, prime, out: path } => {
            let (found, sub) = match (max_lcm, prime) {
                (Some(d), _) => (search_measurements(d)?, format!("max-lcm {d}")),
                (None, Some(p)) => (prime_denominator_check(p)?, format!("prime {p}")),
                (None, None) => unreachable!("clap enforces one of the flags"),
            };
            let records: Vec<MeasurementRecord> = found.iter().map(MeasurementRecord::new).collect();
            for (m, r) in found.iter().zip(&records) {
                writeln!(out, "{m}\tlcm={}\t{}", r.lcm, r.lambda_class)?;
            }
            writeln!(out, "measurements: {}", found.len())?;
            if let Some(p) = &path {
                let config = RunConfig {
                    subcommand: "triangles".into(),
                    spec: Some(sub),
                    precision_bits: bits,
                    output: Some(p.display().to_string()),
                    ..Default::default()
                };
                store::write_jsonl(create(p)?, &config, &records)?;
            }
        }
        Cmd::Lhuilier { xs } => {
            let xs = parse_angles(&xs)?;
            let m = Measurement::new(xs[0], xs[1], xs[2], xs[3]);
            let ok = lhuilier_check(&m)?;
            writeln!(out, "{m}: {ok}")?;
            if ok {
                writeln!(out, "class: {}", LambdaClass::of(&m).label())?;
            } else {
                return Err(Failure::Verify(format!("{m} does not satisfy the excess relation")));
            }
        }
        Cmd::VerifySporadic { fix_search } => {
            let table = sporadic_table();
            for r in &table.reports {
                let status = match &r.status {
                    RowStatus::Verified => "verified".to_string(),
                    RowStatus::Corrected { replacement } => format!("corrected -> {replacement}"),
                    RowStatus::Flagged => "flagged".to_string(),
                };
                writeln!(out, "row {:>2}  lcm {:>3}  {}  {status}", r.index, r.lcm_heading, r.printed)?;
                if fix_search && r.status != RowStatus::Verified {
                    for c in &r.candidates {
                        writeln!(out, "        candidate {c}")?;
                    }
                }
            }
            let flagged = table.flagged();
            writeln!(out, "rows: {}  usable: {}  flagged: {flagged}", table.reports.len(), table.rows.len())?;
            if flagged > 0 {
                return Err(Failure::Verify(format!("{flagged} rows flagged")));
            }
        }
        Cmd::Orbits { row } => {
            let table = sporadic_table();
            match row {
                Some(i) => {
                    let t = table
                        .row(i)
                        .ok_or_else(|| Failure::Usage(format!("row {i} is not in the verified table")))?;
                    for (g, y) in t.orbit() {
                        writeln!(out, "{g}\t{y}")?;
                    }
                }
                None => writeln!(out, "orbit total: {}", expand_orbits(table).len())?,
            }
        }
    }
    Ok(())
}
