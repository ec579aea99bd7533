//! Corpus reports: per-knot verdicts, a summary, golden-file comparison and
//! optional pillowcase plot data.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use knotlab::tracer::{trace_image, TraceOptions};
use knotlab::KnotPresentation;
use serde::Serialize;
use thiserror::Error;

use crate::classify::{Classifier, Rule, Status, Verdict};
use crate::table::KnotRecord;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("io error on {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("golden file row {row}: {msg}")]
    Golden { row: usize, msg: String },
}

#[derive(Clone, Debug, Default)]
pub struct ReportOptions {
    pub audit: bool,
    /// Write pillowcase plot CSVs for knots with a braid into this directory.
    pub plot_dir: Option<PathBuf>,
    pub plot_resolution: usize,
    /// Only knots with these crossing numbers; empty means all.
    pub crossings: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub not_averse: usize,
    pub torus_averse: Vec<(String, i64)>,
    pub unknown: Vec<String>,
    /// How often each rule fired.
    pub rule_counts: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CorpusReport {
    pub summary: Summary,
    pub verdicts: Vec<Verdict>,
    pub plot_files: Vec<String>,
}

pub fn summarize(verdicts: &[Verdict]) -> Summary {
    let mut s = Summary { total: verdicts.len(), ..Default::default() };
    for v in verdicts {
        match &v.status {
            Status::NotAverse => s.not_averse += 1,
            Status::TorusAverse { limit_slope } => s.torus_averse.push((v.name.clone(), *limit_slope)),
            Status::Unknown => s.unknown.push(v.name.clone()),
        }
        for r in &v.fired {
            *s.rule_counts.entry(format!("{r:?}")).or_default() += 1;
        }
    }
    s
}

pub fn corpus_report(records: &[KnotRecord], opts: &ReportOptions) -> Result<CorpusReport, ReportError> {
    let selected: Vec<KnotRecord> = records
        .iter()
        .filter(|r| opts.crossings.is_empty() || opts.crossings.contains(&r.crossing_number))
        .cloned()
        .collect();
    let classifier = Classifier::new(records).audit(opts.audit);
    let verdicts = classifier.classify_all(&selected);
    let mut plot_files = Vec::new();
    if let Some(dir) = &opts.plot_dir {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let res = if opts.plot_resolution == 0 { 128 } else { opts.plot_resolution };
        for r in &selected {
            let Some(b) = &r.braid else { continue };
            let Ok(pres) = KnotPresentation::from_braid(b) else { continue };
            let Ok(img) = trace_image(&pres, &TraceOptions::with_resolution(res)) else { continue };
            let path = dir.join(format!("{}.csv", r.name));
            std::fs::write(&path, img.to_csv()).map_err(|e| io_err(&path, e))?;
            plot_files.push(path.display().to_string());
        }
    }
    Ok(CorpusReport { summary: summarize(&verdicts), verdicts, plot_files })
}

fn io_err(p: &Path, e: std::io::Error) -> ReportError {
    ReportError::Io { path: p.display().to_string(), msg: e.to_string() }
}

fn fired_label(v: &Verdict) -> String {
    v.fired.iter().map(|r| format!("{r:?}")).collect::<Vec<_>>().join(";")
}

/// One line per verdict: `name,status,fired,candidates`.
pub fn verdicts_csv(verdicts: &[Verdict]) -> String {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["name", "status", "fired", "candidates"]).expect("in-memory write");
    for v in verdicts {
        let cands = match &v.candidates {
            None => "any".to_string(),
            Some(c) => c.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";"),
        };
        w.write_record([v.name.clone(), v.status_label(), fired_label(v), cands]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub name: String,
    pub expected: String,
    pub actual: String,
}

/// Compares against a golden CSV with columns `name,status` (status as written by
/// [`verdicts_csv`]). Knots missing from either side count as mismatches.
pub fn compare_golden(verdicts: &[Verdict], golden_csv: &str) -> Result<Vec<Mismatch>, ReportError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(golden_csv.as_bytes());
    let mut expected = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| ReportError::Golden { row: i + 1, msg: e.to_string() })?;
        let (Some(n), Some(s)) = (rec.get(0), rec.get(1)) else {
            return Err(ReportError::Golden { row: i + 1, msg: "need name and status".into() });
        };
        expected.insert(n.trim().to_string(), s.trim().to_string());
    }
    let mut out = Vec::new();
    for v in verdicts {
        let actual = v.status_label();
        match expected.remove(&v.name) {
            Some(e) if e == actual => {}
            Some(e) => out.push(Mismatch { name: v.name.clone(), expected: e, actual }),
            None => out.push(Mismatch { name: v.name.clone(), expected: "(absent)".into(), actual }),
        }
    }
    for (name, e) in expected {
        out.push(Mismatch { name, expected: e, actual: "(absent)".into() });
    }
    Ok(out)
}

/// Rules that fired across the corpus, for audit listings.
pub fn firing_rules(verdicts: &[Verdict]) -> BTreeMap<String, Vec<Rule>> {
    verdicts.iter().map(|v| (v.name.clone(), v.fired.clone())).collect()
}
