//! Ergodic aggregation over trials.
//!
//! Pair secrecy rates are clamped per trial, averaged over trials, and only
//! then reduced across pairs (min over Eves per user, then sum or min over
//! users). Standard errors come from the per-trial values of the pair (or
//! per-user pair selection) that attains the reduced mean.

use crate::rates::RateReport;
use crate::scenario::Objective;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

fn stderr_of(values: &[f64], mean: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicSummary {
    pub trials: usize,
    /// Smallest per-user mean Bob rate.
    pub bob_rate_min: Estimate,
    pub ssr: Estimate,
    pub asr: Estimate,
    /// Mean clamped secrecy rate of every `(user, eve)` pair.
    pub pair_means: Vec<Vec<f64>>,
    pub bob_means: Vec<f64>,
}

impl ErgodicSummary {
    pub fn objective(&self, objective: Objective) -> Estimate {
        match objective {
            Objective::Asr => self.asr,
            Objective::Ssr => self.ssr,
        }
    }
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Aggregates per-trial reports (given in trial order).
pub fn aggregate(reports: &[&RateReport]) -> ErgodicSummary {
    assert!(!reports.is_empty(), "aggregate needs at least one trial");
    let users = reports[0].bob_rates.len();
    let eves = reports[0].pair_secrecy[0].len();
    let series = |f: &dyn Fn(&RateReport) -> f64| -> Vec<f64> { reports.iter().map(|r| f(r)).collect() };

    let bob_series: Vec<Vec<f64>> = (0..users).map(|j| series(&|r| r.bob_rates[j])).collect();
    let bob_means: Vec<f64> = bob_series.iter().map(|v| mean_of(v)).collect();
    let jb = argmin(&bob_means);
    let bob_rate_min = Estimate {
        mean: bob_means[jb],
        stderr: stderr_of(&bob_series[jb], bob_means[jb]),
    };

    let pair_series: Vec<Vec<Vec<f64>>> = (0..users)
        .map(|j| (0..eves).map(|k| series(&|r| r.pair_secrecy[j][k])).collect())
        .collect();
    let pair_means: Vec<Vec<f64>> = pair_series
        .iter()
        .map(|row| row.iter().map(|v| mean_of(v)).collect())
        .collect();

    let worst_eve: Vec<usize> = pair_means.iter().map(|row| argmin(row)).collect();
    let ssr_mean: f64 = (0..users).map(|j| pair_means[j][worst_eve[j]]).sum();
    let ssr_trials: Vec<f64> = (0..reports.len())
        .map(|t| (0..users).map(|j| pair_series[j][worst_eve[j]][t]).sum())
        .collect();
    let ssr = Estimate {
        mean: ssr_mean,
        stderr: stderr_of(&ssr_trials, mean_of(&ssr_trials)),
    };

    let per_user_min: Vec<f64> = (0..users).map(|j| pair_means[j][worst_eve[j]]).collect();
    let ja = argmin(&per_user_min);
    let ka = worst_eve[ja];
    let asr = Estimate {
        mean: pair_means[ja][ka],
        stderr: stderr_of(&pair_series[ja][ka], pair_means[ja][ka]),
    };

    ErgodicSummary {
        trials: reports.len(),
        bob_rate_min,
        ssr,
        asr,
        pair_means,
        bob_means,
    }
}
