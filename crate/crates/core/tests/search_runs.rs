use std::io::Write;

use lhuilier_core::solver::{search_with, DenominatorSpec, SearchOptions, Sign};
use lhuilier_core::store::{solution_records, write_jsonl, RunConfig};
use lhuilier_core::Error;

fn opts(jobs: usize) -> SearchOptions {
    SearchOptions { jobs: Some(jobs), ..Default::default() }
}

#[test]
fn interrupted_checkpoint_resumes_to_full_result() {
    let spec = DenominatorSpec::MaxLcm(40);
    let full = search_with(&spec, Sign::Plus, false, &opts(1)).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck.jsonl");
    let first = SearchOptions { jobs: Some(1), checkpoint: Some(path.clone()), ..Default::default() };
    search_with(&spec, Sign::Plus, false, &first).unwrap();

    // Keep the header and 12 units, then a torn write.
    let text = std::fs::read_to_string(&path).unwrap();
    let kept: Vec<&str> = text.lines().take(13).collect();
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "{}", kept.join("\n")).unwrap();
    write!(f, "{{\"kind\":\"unit\",\"level\":").unwrap();
    drop(f);

    let resume = SearchOptions { jobs: Some(2), checkpoint: Some(path.clone()), resume: true, ..Default::default() };
    let again = search_with(&spec, Sign::Plus, false, &resume).unwrap();
    assert_eq!(again.units_resumed, 12);
    assert_eq!(again.solutions, full.solutions);
    assert_eq!(again.per_lcm, full.per_lcm);

    // A third run resumes everything.
    let third = search_with(&spec, Sign::Plus, false, &resume).unwrap();
    assert_eq!(third.units_resumed, third.units_total);
    assert_eq!(third.solutions, full.solutions);
}

#[test]
fn checkpoint_for_another_search_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck.jsonl");
    let o = SearchOptions { checkpoint: Some(path.clone()), ..opts(1) };
    search_with(&DenominatorSpec::MaxLcm(12), Sign::Plus, false, &o).unwrap();
    let r = SearchOptions { resume: true, ..o };
    let err = search_with(&DenominatorSpec::MaxLcm(13), Sign::Plus, false, &r).unwrap_err();
    assert!(matches!(err, Error::Checkpoint(_)), "{err}");
}

#[test]
fn output_is_identical_across_job_counts() {
    let spec = DenominatorSpec::MaxLcm(40);
    let cfg = RunConfig { subcommand: "search".into(), spec: Some(spec.to_string()), precision_bits: 192, ..Default::default() };
    let bytes: Vec<Vec<u8>> = [1, 2, 4]
        .iter()
        .map(|&j| {
            let rep = search_with(&spec, Sign::Plus, false, &opts(j)).unwrap();
            let mut buf = Vec::new();
            write_jsonl(&mut buf, &RunConfig { jobs: Some(j), ..cfg.clone() }, &solution_records(&rep)).unwrap();
            buf
        })
        .collect();
    assert!(bytes[0].len() > 1000);
    assert_eq!(bytes[0], bytes[1]);
    assert_eq!(bytes[0], bytes[2]);
}

#[test]
fn twisted_sign_has_no_solutions_in_range() {
    let rep = search_with(&DenominatorSpec::MaxLcm(30), Sign::Minus, false, &opts(1)).unwrap();
    assert!(rep.solutions.is_empty());
}

#[test]
fn fixed_set_restricts_every_denominator() {
    let spec = DenominatorSpec::fixed([4, 12]);
    let rep = search_with(&spec, Sign::Plus, false, &opts(1)).unwrap();
    assert!(!rep.solutions.is_empty());
    for t in &rep.solutions {
        assert!(t.0.iter().all(|x| x.den() == 4 || x.den() == 12), "{t}");
    }
}
