//! Monte Carlo harness.
//!
//! A trial is `draw -> (collude) -> order -> precode -> allocate -> rates`.
//! Channel draws and precoders do not depend on the power setting, so each
//! trial builds its geometry once and evaluates it at every
//! `(P, phi)` point. Trials run in parallel; reductions always walk trials
//! in index order so results are bit-identical under any thread count.

mod aggregate;
pub mod invariants;
mod presets;
mod probe;

use rayon::prelude::*;

use crate::channel::{draw_effective_channels, ChannelSet};
use crate::effective::EffectiveChannels;
use crate::error::{Error, Result};
use crate::power::{best_phi, uniform_profile, water_filled_profile, PowerProfile};
use crate::precoding::{precode, PrecodingSolution};
use crate::rates::{secrecy_report_eff, RateReport};
use crate::scenario::{Allocation, PowerMode, Scenario, Scheme};

pub use aggregate::{aggregate, ErgodicSummary, Estimate};
pub use presets::{preset, preset_series, Preset, Series};
pub use probe::{cost_probe, CostEntry, CostProbe};

/// Channels and precoders of one trial, ready for rate evaluation.
#[derive(Debug, Clone)]
pub struct TrialGeometry {
    pub trial_index: usize,
    pub channels: ChannelSet,
    pub solution: PrecodingSolution,
    pub effective: EffectiveChannels,
}

pub fn build_geometry(s: &Scenario, trial_index: usize) -> Result<TrialGeometry> {
    let channels = draw_effective_channels(s, trial_index);
    let solution = precode(s, &channels, trial_index).map_err(|e| e.in_trial(trial_index))?;
    let effective = EffectiveChannels::new(&channels, &solution);
    Ok(TrialGeometry {
        trial_index,
        channels,
        solution,
        effective,
    })
}

/// Rates of one trial at one power setting, plus the power-accounting
/// residual of the profile that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub report: RateReport,
    pub power_residual: f64,
}

/// Power profile of `geom` at total power `power` and information ratio `phi`.
pub fn profile_for(s: &Scenario, geom: &TrialGeometry, power: f64, phi: f64) -> Result<PowerProfile> {
    let sol = &geom.solution;
    let base = uniform_profile(power, phi, &sol.streams(), sol.noise_dim)?;
    match s.allocation {
        Allocation::Uniform => Ok(base),
        Allocation::WaterFilling => water_filled_profile(&base, &geom.effective, &s.tolerances),
    }
}

pub fn evaluate(s: &Scenario, geom: &TrialGeometry, power: f64, phi: f64) -> Result<TrialRecord> {
    let run = || {
        let prof = profile_for(s, geom, power, phi)?;
        let report = secrecy_report_eff(&geom.effective, &prof, s.eve_noise_eps, &s.tolerances)?;
        Ok(TrialRecord {
            report,
            power_residual: prof.accounting_residual(),
        })
    };
    run().map_err(|e: Error| e.in_trial(geom.trial_index))
}

/// Runs trial `trial_index` at the scenario's power and fixed power ratio.
pub fn run_trial(s: &Scenario, trial_index: usize) -> Result<RateReport> {
    let phi = match s.power_mode {
        PowerMode::FixedRatio(phi) => phi,
        PowerMode::GridSearch { .. } => {
            return Err(Error::InvalidScenario(
                "run_trial needs a fixed power ratio; use run_trial_with_phi".into(),
            ))
        }
    };
    run_trial_with_phi(s, trial_index, phi).map(|r| r.report)
}

pub fn run_trial_with_phi(s: &Scenario, trial_index: usize, phi: f64) -> Result<TrialRecord> {
    s.validate()?;
    let geom = build_geometry(s, trial_index)?;
    evaluate(s, &geom, s.power, phi)
}

/// `records[t][p][f]`: trial `t`, power `powers[p]`, ratio `phis[f]`.
pub(crate) fn sample_grid(s: &Scenario, powers: &[f64], phis: &[f64]) -> Result<Vec<Vec<Vec<TrialRecord>>>> {
    s.validate()?;
    let per_trial: Vec<Result<Vec<Vec<TrialRecord>>>> = (0..s.trials)
        .into_par_iter()
        .map(|t| {
            let geom = build_geometry(s, t)?;
            powers
                .iter()
                .map(|&p| phis.iter().map(|&phi| evaluate(s, &geom, p, phi)).collect())
                .collect()
        })
        .collect();
    // First failure in trial order, whatever the scheduling was.
    per_trial.into_iter().collect()
}

fn summarize(samples: &[Vec<Vec<TrialRecord>>], p: usize, f: usize) -> ErgodicSummary {
    let reports: Vec<&RateReport> = samples.iter().map(|t| &t[p][f].report).collect();
    aggregate(&reports)
}

/// Ergodic summaries at the scenario's power for every ratio in `grid`.
pub fn phi_curve(s: &Scenario, grid: &[f64]) -> Result<Vec<ErgodicSummary>> {
    if grid.is_empty() {
        return Err(Error::Domain("power-ratio grid is empty".into()));
    }
    let samples = sample_grid(s, &[s.power], grid)?;
    Ok((0..grid.len()).map(|f| summarize(&samples, 0, f)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    BobRateMin,
    Ssr,
    Asr,
    PhiStar,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::BobRateMin, Metric::Ssr, Metric::Asr, Metric::PhiStar];

    pub fn name(self) -> &'static str {
        match self {
            Metric::BobRateMin => "bob_rate_min",
            Metric::Ssr => "ssr",
            Metric::Asr => "asr",
            Metric::PhiStar => "phi_star",
        }
    }
}

/// One `(snr, series, metric)` point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub snr_db: f64,
    pub label: String,
    pub metric: Metric,
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
    /// Ratio used (fixed mode) or selected (grid search).
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepMetadata {
    pub seed: u64,
    pub scenario_hash: u64,
    pub notes: Vec<String>,
    /// Worst power-accounting residual over every profile evaluated.
    pub max_power_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub snr_db: Vec<f64>,
    /// Ordered by snr, then series, then metric.
    pub records: Vec<PointRecord>,
    /// `summaries[series][snr]` at the reported ratio.
    pub summaries: Vec<Vec<ErgodicSummary>>,
    pub labels: Vec<String>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn find(&self, label: &str, snr_db: f64, metric: Metric) -> Option<&PointRecord> {
        self.records
            .iter()
            .find(|r| r.label == label && r.snr_db == snr_db && r.metric == metric)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// FNV-1a over the scenario's debug rendering; stable across runs.
pub fn scenario_hash<'a>(scenarios: impl IntoIterator<Item = &'a Scenario>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for s in scenarios {
        for b in format!("{s:?}").bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

struct SeriesOutcome {
    /// Per snr point: reported summary and the ratio it was taken at.
    points: Vec<(ErgodicSummary, f64)>,
    max_residual: f64,
}

fn run_one_series(s: &Scenario, snr_db: &[f64]) -> Result<SeriesOutcome> {
    let powers: Vec<f64> = snr_db.iter().map(|&d| db_to_linear(d)).collect();
    let phis = match &s.power_mode {
        PowerMode::FixedRatio(phi) => vec![*phi],
        PowerMode::GridSearch { grid, .. } => grid.clone(),
    };
    let samples = sample_grid(s, &powers, &phis)?;
    let max_residual = samples
        .iter()
        .flatten()
        .flatten()
        .map(|r| r.power_residual)
        .fold(0.0, f64::max);
    let mut points = Vec::with_capacity(powers.len());
    for p in 0..powers.len() {
        let summaries: Vec<ErgodicSummary> = (0..phis.len()).map(|f| summarize(&samples, p, f)).collect();
        let chosen = match &s.power_mode {
            PowerMode::FixedRatio(_) => 0,
            PowerMode::GridSearch { objective, .. } => {
                let curve: Vec<(f64, f64)> = phis
                    .iter()
                    .zip(&summaries)
                    .map(|(&phi, sum)| (phi, sum.objective(*objective).mean))
                    .collect();
                let phi_star = best_phi(&curve);
                phis.iter().position(|&x| x == phi_star).expect("phi from grid")
            }
        };
        points.push((summaries[chosen].clone(), phis[chosen]));
    }
    Ok(SeriesOutcome { points, max_residual })
}

/// Sweeps every series over the SNR grid (in dB). All series share channel
/// draws: trial `t` of every series uses the stream keyed by `(seed, t)`.
pub fn run_series_sweep(series: &[Series], snr_db: &[f64]) -> Result<SweepResult> {
    if snr_db.is_empty() {
        return Err(Error::Domain("SNR grid is empty".into()));
    }
    if series.is_empty() {
        return Err(Error::Domain("no series to run".into()));
    }
    let outcomes = series
        .iter()
        .map(|x| run_one_series(&x.scenario, snr_db))
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::new();
    for (p, &db) in snr_db.iter().enumerate() {
        for (x, out) in series.iter().zip(&outcomes) {
            let (sum, phi) = &out.points[p];
            let trials = sum.trials;
            for metric in Metric::ALL {
                let (mean, stderr) = match metric {
                    Metric::BobRateMin => (sum.bob_rate_min.mean, sum.bob_rate_min.stderr),
                    Metric::Ssr => (sum.ssr.mean, sum.ssr.stderr),
                    Metric::Asr => (sum.asr.mean, sum.asr.stderr),
                    Metric::PhiStar => (*phi, 0.0),
                };
                records.push(PointRecord {
                    snr_db: db,
                    label: x.label.clone(),
                    metric,
                    mean,
                    stderr,
                    trials,
                    phi: *phi,
                });
            }
        }
    }
    let mut notes: Vec<String> = Vec::new();
    if series.iter().any(|x| x.scenario.scheme == Scheme::Zf) {
        notes.push(
            "ZF baseline: dominant-left-singular-vector effective rows with a column-normalized pseudo-inverse, one stream per user".into(),
        );
    }
    for x in series {
        if let PowerMode::GridSearch { objective, .. } = x.scenario.power_mode {
            notes.push(format!("{}: phi chosen per SNR point maximizing ergodic {}", x.label, objective.name()));
        }
    }
    Ok(SweepResult {
        snr_db: snr_db.to_vec(),
        records,
        summaries: outcomes
            .iter()
            .map(|o| o.points.iter().map(|(s, _)| s.clone()).collect())
            .collect(),
        labels: series.iter().map(|x| x.label.clone()).collect(),
        metadata: SweepMetadata {
            seed: series[0].scenario.seed,
            scenario_hash: scenario_hash(series.iter().map(|x| &x.scenario)),
            notes,
            max_power_residual: outcomes.iter().map(|o| o.max_residual).fold(0.0, f64::max),
        },
    })
}

/// Sweep of a single scenario, labelled by its scheme.
pub fn run_sweep(s: &Scenario, snr_db: &[f64]) -> Result<SweepResult> {
    run_series_sweep(
        &[Series {
            label: s.scheme.name().to_string(),
            scenario: s.clone(),
        }],
        snr_db,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Scenario {
        Scenario {
            trials: 6,
            power_mode: PowerMode::FixedRatio(0.6),
            ..Scenario::default()
        }
    }

    #[test]
    fn trial_is_deterministic() {
        let s = small();
        assert_eq!(run_trial(&s, 2).unwrap(), run_trial(&s, 2).unwrap());
    }

    #[test]
    fn insufficient_antennas_surface_with_trial_context() {
        let s = Scenario { n_tx: 9, ..small() };
        let err = run_trial(&s, 0).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("trial 0") && text.contains("N_A = 9 must exceed sum of N_Bj = 9"), "{text}");
    }

    #[test]
    fn single_trial_sweep_has_zero_stderr() {
        let s = Scenario { trials: 1, ..small() };
        let r = run_sweep(&s, &[10.0]).unwrap();
        let single = run_trial(&Scenario { power: db_to_linear(10.0), ..s.clone() }, 0).unwrap();
        let asr = r.find("ISDF1", 10.0, Metric::Asr).unwrap();
        assert_eq!(asr.stderr, 0.0);
        assert_eq!(asr.mean, single.asr);
        assert_eq!(r.find("ISDF1", 10.0, Metric::Ssr).unwrap().mean, single.ssr);
    }

    #[test]
    fn longer_runs_extend_shorter_ones() {
        let s = small();
        let long = Scenario { trials: 12, ..s.clone() };
        let a = sample_grid(&s, &[100.0], &[0.6]).unwrap();
        let b = sample_grid(&long, &[100.0], &[0.6]).unwrap();
        assert_eq!(a[..], b[..6]);
    }

    #[test]
    fn sweep_rows_are_ordered() {
        let mut series = Vec::new();
        for scheme in [Scheme::Isdf1, Scheme::Bd] {
            series.push(Series {
                label: scheme.name().into(),
                scenario: Scenario { scheme, ..small() },
            });
        }
        let r = run_series_sweep(&series, &[0.0, 10.0]).unwrap();
        assert_eq!(r.records.len(), 2 * 2 * 4);
        assert_eq!(r.records[0].label, "ISDF1");
        assert_eq!(r.records[0].metric, Metric::BobRateMin);
        assert_eq!(r.records[4].label, "BD");
        assert_eq!(r.records[8].snr_db, 10.0);
        assert!(r.metadata.max_power_residual < 1e-12);
    }

    #[test]
    fn sweep_is_reproducible() {
        let s = Scenario { scheme: Scheme::Isdf2, ..small() };
        assert_eq!(run_sweep(&s, &[0.0, 20.0]).unwrap(), run_sweep(&s, &[0.0, 20.0]).unwrap());
    }
}
