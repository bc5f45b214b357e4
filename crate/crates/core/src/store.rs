//! JSONL and TSV output for search reports, classification records and measurements.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::angle::{RationalAngle, Tuple5};
use crate::error::{Error, Result};
use crate::families::{classify, ClassLabel};
use crate::solver::{SearchReport, Sign};
use crate::triangles::{LambdaClass, Measurement};

/// Run parameters written at the head of every report. `jobs` is left out so that output does not
/// depend on the worker count.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<String>,
    #[serde(default)]
    pub six: bool,
    pub precision_bits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<String>,
    #[serde(skip)]
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub nums: [String; 5],
    pub dens: [String; 5],
    pub lcm: u64,
    pub sign: String,
    pub class: String,
    pub family_id: Option<String>,
    pub s: Option<String>,
    pub t: Option<String>,
    pub perm: Option<String>,
    pub row: Option<usize>,
    pub verified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
}

impl SolutionRecord {
    pub fn new(t: &Tuple5, sign: Sign, verified: bool) -> SolutionRecord {
        let label = classify(t);
        let (family_id, s, tt, perm, row) = match &label {
            ClassLabel::Family(m) => (
                Some(m.id.to_string()),
                Some(m.s.to_string()),
                m.t.map(|x| x.to_string()),
                Some(m.perm.to_string()),
                None,
            ),
            ClassLabel::Sporadic { row, element } => (None, None, None, Some(element.to_string()), Some(*row)),
            ClassLabel::Unknown => (None, None, None, None, None),
        };
        SolutionRecord {
            nums: t.0.map(|x| x.num().to_string()),
            dens: t.0.map(|x| x.den().to_string()),
            lcm: t.lcm() as u64,
            sign: sign.to_string(),
            class: label.kind().to_string(),
            family_id,
            s,
            t: tt,
            perm,
            row,
            verified,
            flag: (!verified).then(|| "unverified".to_string()),
        }
    }

    pub fn tuple(&self) -> Result<Tuple5> {
        let mut out = [RationalAngle::ZERO; 5];
        for (i, slot) in out.iter_mut().enumerate() {
            let parse = |s: &str| s.parse::<i64>().map_err(|_| Error::Invalid(format!("bad integer {s:?}")));
            *slot = RationalAngle::new(parse(&self.nums[i])?, parse(&self.dens[i])?)?;
        }
        Ok(Tuple5(out))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    #[serde(rename = "E")]
    pub e: String,
    pub a: String,
    pub b: String,
    pub c: String,
    pub lcm: u64,
    pub lambda_class: String,
}

impl MeasurementRecord {
    pub fn new(m: &Measurement) -> MeasurementRecord {
        MeasurementRecord {
            e: m.e.to_string(),
            a: m.a.to_string(),
            b: m.b.to_string(),
            c: m.c.to_string(),
            lcm: m.lcm(),
            lambda_class: LambdaClass::of(m).label().to_string(),
        }
    }

    pub fn measurement(&self) -> Result<Measurement> {
        let p = |s: &str| s.parse::<RationalAngle>();
        Ok(Measurement::new(p(&self.e)?, p(&self.a)?, p(&self.b)?, p(&self.c)?))
    }
}

/// A six-variable solution `(x0, x1..x5)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SixRecord {
    pub nums: [String; 6],
    pub dens: [String; 6],
    pub lcm: u64,
    pub quarter_turn_entry: bool,
    pub verified: bool,
}

impl SixRecord {
    pub fn new(xs: &[RationalAngle]) -> SixRecord {
        let arr: [RationalAngle; 6] = std::array::from_fn(|i| xs[i]);
        SixRecord {
            nums: arr.map(|x| x.num().to_string()),
            dens: arr.map(|x| x.den().to_string()),
            lcm: crate::solver::tuple_lcm(xs),
            quarter_turn_entry: xs.contains(&RationalAngle::of(1, 4)),
            verified: true,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ConfigLine {
    config: RunConfig,
}

/// Solution records in report order (ascending lcm, then tuple).
pub fn solution_records(report: &SearchReport) -> Vec<SolutionRecord> {
    report.solutions.iter().map(|t| SolutionRecord::new(t, report.sign, true)).collect()
}

/// Writes the config line followed by one JSON object per record.
pub fn write_jsonl<W: Write, T: Serialize>(mut w: W, config: &RunConfig, records: &[T]) -> Result<()> {
    serde_json::to_writer(&mut w, &ConfigLine { config: config.clone() })?;
    w.write_all(b"\n")?;
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_jsonl`]; the config line is returned separately.
pub fn read_jsonl<R: BufRead, T: for<'de> Deserialize<'de>>(r: R) -> Result<(Option<RunConfig>, Vec<T>)> {
    let mut config = None;
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if i == 0 {
            if let Ok(c) = serde_json::from_str::<ConfigLine>(&line) {
                config = Some(c.config);
                continue;
            }
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Invalid(format!("line {}: {e}", i + 1)))?);
    }
    Ok((config, out))
}

pub const TSV_HEADER: &str = "lcm\tsolutions\tfamily\tsporadic\tunknown";

/// Per-lcm class counts; an empty record list yields only the header.
pub fn write_tsv<W: Write>(mut w: W, records: &[SolutionRecord]) -> Result<()> {
    let mut rows: BTreeMap<u64, [usize; 4]> = BTreeMap::new();
    for r in records {
        let e = rows.entry(r.lcm).or_default();
        e[0] += 1;
        match r.class.as_str() {
            "family" => e[1] += 1,
            "sporadic" => e[2] += 1,
            _ => e[3] += 1,
        }
    }
    writeln!(w, "{TSV_HEADER}")?;
    for (lcm, c) in rows {
        writeln!(w, "{lcm}\t{}\t{}\t{}\t{}", c[0], c[1], c[2], c[3])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let t = Tuple5::from_pairs([(1, 8), (1, 40), (7, 40), (9, 40), (17, 40)]);
        let rec = SolutionRecord::new(&t, Sign::Plus, true);
        assert_eq!(rec.class, "sporadic");
        let mut buf = Vec::new();
        let cfg = RunConfig { subcommand: "search".into(), precision_bits: 192, ..Default::default() };
        write_jsonl(&mut buf, &cfg, std::slice::from_ref(&rec)).unwrap();
        let (c, back): (_, Vec<SolutionRecord>) = read_jsonl(&buf[..]).unwrap();
        assert_eq!(c, Some(cfg));
        assert_eq!(back[0].tuple().unwrap(), t);
        let mut tsv = Vec::new();
        write_tsv(&mut tsv, &[]).unwrap();
        assert_eq!(String::from_utf8(tsv).unwrap(), format!("{TSV_HEADER}\n"));
    }

    #[test]
    fn measurement_round_trip() {
        let m = Measurement::from_pairs([(1, 2), (2, 5), (1, 2), (4, 5)]);
        let r = MeasurementRecord::new(&m);
        assert_eq!(r.lambda_class, "lambda2");
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"E\":\"1/2\""));
        assert_eq!(serde_json::from_str::<MeasurementRecord>(&s).unwrap().measurement().unwrap(), m);
    }
}
