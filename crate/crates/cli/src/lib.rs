//! Library side of the `secrecy` command: configuration, sweeps, output.

pub mod config;
pub mod output;
pub mod plot;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use secrecy_core::sim::{cost_probe, invariants::run_invariants, invariants::InvariantCheck, run_series_sweep, Preset};
use secrecy_core::SweepResult;

use config::{Format, RunConfig};
use output::{ensure_dir, fmt_g9, results_csv, Staged};

/// Environment variable fixing the number of worker threads.
pub const THREADS_VAR: &str = "SECRECY_THREADS";

/// Sizes the global thread pool from [`THREADS_VAR`] when it is set.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        anyhow::bail!("{THREADS_VAR} must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("cannot size the worker pool")
}

pub struct RunOutput {
    pub result: SweepResult,
    pub written: Vec<PathBuf>,
}

/// Runs the sweep and writes `config.resolved`, `results.csv` and the
/// requested plots. Nothing is written unless the whole run succeeds.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let result = run_series_sweep(&cfg.series(), &cfg.snr.points())?;
    let dir = &cfg.output_dir;
    ensure_dir(dir)?;
    let csv = results_csv(&result)?;
    let mut staged = Staged::new();
    let mut names = vec!["config.resolved".to_string()];
    staged.add(dir, "config.resolved", cfg.resolved_toml().as_bytes())?;
    if cfg.formats.contains(&Format::Csv) {
        staged.add(dir, "results.csv", &csv)?;
        names.push("results.csv".into());
    }
    if cfg.formats.contains(&Format::Svg) {
        let rows = csv::Reader::from_reader(csv.as_slice())
            .deserialize()
            .collect::<Result<Vec<output::CsvRow>, _>>()?;
        for metric in plot::metrics(&rows) {
            let name = format!("{metric}.svg");
            staged.add(dir, &name, plot::render(&rows, &metric)?.as_bytes())?;
            names.push(name);
        }
    }
    staged.commit(dir)?;
    Ok(RunOutput {
        result,
        written: names.iter().map(|n| dir.join(n)).collect(),
    })
}

/// Regenerates the SVG plots from an existing `results.csv`.
pub fn plot_csv(csv_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let rows = output::read_results(csv_path)?;
    ensure_dir(out_dir)?;
    let mut staged = Staged::new();
    let mut written = Vec::new();
    for metric in plot::metrics(&rows) {
        let name = format!("{metric}.svg");
        staged.add(out_dir, &name, plot::render(&rows, &metric)?.as_bytes())?;
        written.push(out_dir.join(name));
    }
    staged.commit(out_dir)?;
    Ok(written)
}

pub fn run_summary(cfg: &RunConfig, out: &RunOutput) -> String {
    let m = &out.result.metadata;
    let mut s = String::new();
    let _ = writeln!(s, "seed {} scenario hash {:016x}", m.seed, m.scenario_hash);
    let _ = writeln!(s, "{} series x {} SNR points, {} trials", out.result.labels.len(), out.result.snr_db.len(), cfg.scenario.trials);
    let _ = writeln!(s, "max power accounting residual {:.3e}", m.max_power_residual);
    for note in &m.notes {
        let _ = writeln!(s, "note: {note}");
    }
    for p in &out.written {
        let _ = writeln!(s, "wrote {}", p.display());
    }
    s
}

pub fn preset_list() -> String {
    let mut s = String::new();
    for p in Preset::ALL {
        let _ = writeln!(s, "{:<6} {}", p.name(), p.description());
        for note in p.notes() {
            let _ = writeln!(s, "       note: {note}");
        }
    }
    s
}

/// Property suites over every series of `cfg`; the flag is true when all
/// checks pass.
pub fn invariants(cfg: &RunConfig, draws: usize) -> Result<(String, bool)> {
    let mut s = String::new();
    let mut ok = true;
    for x in cfg.series() {
        let _ = writeln!(s, "[{}]", x.label);
        for c in run_invariants(&x.scenario, draws)? {
            ok &= c.passed();
            let _ = writeln!(s, "{}", format_check(&c));
        }
    }
    Ok((s, ok))
}

fn format_check(c: &InvariantCheck) -> String {
    use secrecy_core::sim::invariants::Bound;
    let op = match c.bound {
        Bound::AtMost => "<=",
        Bound::AtLeast => ">=",
    };
    let status = if c.passed() { "PASS" } else { "FAIL" };
    format!("  {status} {}: worst {} {op} {}", c.name, fmt_g9(c.observed), fmt_g9(c.limit))
}

pub fn probe(cfg: &RunConfig) -> String {
    let probe = cost_probe(&cfg.scenario);
    let mut s = String::from("scheme  proxy  formula  build_time_per_trial\n");
    for e in &probe.entries {
        let show = |v: Option<u64>| v.map_or("-".to_string(), |x| x.to_string());
        let per = e.build_time.as_secs_f64() / e.trials.max(1) as f64;
        let _ = write!(s, "{:<6}  {:>5}  {:>7}  {:.3e} s", e.scheme.name(), show(e.proxy), show(e.formula_proxy), per);
        if let Some(err) = &e.error {
            let _ = write!(s, "  ({err})");
        }
        s.push('\n');
    }
    s
}
