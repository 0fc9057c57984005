//! Rendering of mining results: console table, CSV and JSON.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::data::{Dataset, PredictionMatrix};
use crate::description::Notation;
use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::search::{ResultList, SearchConfig};

/// Sizes and content hashes of the inputs a run was computed from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub cases: usize,
    pub descriptors: usize,
    pub classifiers: usize,
    pub classes: usize,
    /// SHA-256 of each input file, in the order given.
    pub sha256: Vec<(String, String)>,
}

impl Fingerprint {
    pub fn new(ds: &Dataset, matrix: &PredictionMatrix, files: &[(&str, &Path)]) -> Result<Self> {
        let sha256 = files
            .iter()
            .map(|(role, path)| {
                let bytes = std::fs::read(path)?;
                Ok((role.to_string(), format!("{:x}", Sha256::digest(&bytes))))
            })
            .collect::<Result<_>>()?;
        Ok(Fingerprint {
            cases: ds.m(),
            descriptors: ds.k(),
            classifiers: matrix.n(),
            classes: matrix.classes(),
            sha256,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: SearchConfig,
    pub baseline: f64,
    pub results: ResultList,
    pub duration: Duration,
    pub fingerprint: Fingerprint,
}

/// `row(DS)=0.294`
pub fn caption(measure: Measure, baseline: f64) -> String {
    format!("{}(DS)={:.3}", measure.token(), baseline)
}

/// Console table: caption line, header, one `description | #cases | quality`
/// row per result with qualities rounded to 3 decimals.
pub fn render_table(results: &ResultList, ds: &Dataset, notation: Notation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", caption(results.measure, results.baseline));
    let _ = writeln!(out, "description | #cases | {}", results.measure.token());
    for e in &results.entries {
        let _ = writeln!(
            out,
            "{} | {} | {:.3}",
            e.description.render(ds, notation),
            e.case_count,
            e.quality
        );
    }
    out
}

/// `rank,description,cases,quality,baseline,measure`, full precision.
pub fn write_csv<W: Write>(results: &ResultList, ds: &Dataset, notation: Notation, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["rank", "description", "cases", "quality", "baseline", "measure"])?;
    for (i, e) in results.entries.iter().enumerate() {
        writer.write_record([
            (i + 1).to_string(),
            e.description.render(ds, notation),
            e.case_count.to_string(),
            format!("{}", e.quality),
            format!("{}", e.baseline),
            results.measure.token().to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonEntry {
    rank: usize,
    description: String,
    cases: usize,
    quality: f64,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config: &'a SearchConfig,
    measure: Measure,
    baseline: f64,
    results: Vec<JsonEntry>,
    inputs: &'a Fingerprint,
}

/// JSON rendering. The wall-clock duration is left out so identical inputs
/// give identical bytes.
pub fn to_json(report: &RunReport, ds: &Dataset, notation: Notation) -> Result<String> {
    let doc = JsonReport {
        config: &report.config,
        measure: report.results.measure,
        baseline: report.baseline,
        results: report
            .results
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| JsonEntry {
                rank: i + 1,
                description: e.description.render(ds, notation),
                cases: e.case_count,
                quality: e.quality,
            })
            .collect(),
        inputs: &report.fingerprint,
    };
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    Ok(text)
}
