//! `results.csv` emission and parsing, and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;
use tempfile::NamedTempFile;

use secrecy_core::SweepResult;

pub const HEADER: [&str; 7] = ["snr_db", "scheme", "metric", "mean", "stderr", "trials", "phi"];

/// `%.9g`: nine significant digits, trailing zeros dropped, exponent form
/// outside `1e-4 <= |x| < 1e9`.
pub fn fmt_g9(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV text of a sweep, rows in the sweep's record order.
pub fn results_csv(result: &SweepResult) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER)?;
    for r in &result.records {
        w.write_record([
            fmt_g9(r.snr_db),
            r.label.clone(),
            r.metric.name().to_string(),
            fmt_g9(r.mean),
            fmt_g9(r.stderr),
            r.trials.to_string(),
            fmt_g9(r.phi),
        ])?;
    }
    Ok(w.into_inner()?)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CsvRow {
    pub snr_db: f64,
    pub scheme: String,
    pub metric: String,
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
    pub phi: f64,
}

pub fn read_results(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        anyhow::bail!("{}: unexpected header {:?}", path.display(), header);
    }
    r.deserialize()
        .collect::<Result<Vec<CsvRow>, _>>()
        .with_context(|| format!("malformed row in {}", path.display()))
}

/// Files staged in `dir` and moved into place together once every one has
/// been written.
pub struct Staged {
    files: Vec<(NamedTempFile, String)>,
}

impl Staged {
    pub fn new() -> Self {
        Staged { files: Vec::new() }
    }

    pub fn add(&mut self, dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
        let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("cannot write into {}", dir.display()))?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        self.files.push((tmp, name.to_string()));
        Ok(())
    }

    pub fn commit(self, dir: &Path) -> Result<()> {
        for (tmp, name) in self.files {
            let target = dir.join(&name);
            tmp.persist(&target)
                .with_context(|| format!("cannot move {} into place", target.display()))?;
        }
        Ok(())
    }
}

impl Default for Staged {
    fn default() -> Self {
        Self::new()
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}
