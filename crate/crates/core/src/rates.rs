//! Mutual-information rates for Bobs and Eves and the secrecy aggregates.
//!
//! Every receiver treats the other users' messages and the artificial noise
//! as Gaussian interference, so each rate is a difference of two
//! log-determinants of receive covariances. Rates are in bits per channel
//! use.

use std::f64::consts::LN_2;

use crate::channel::ChannelSet;
use crate::effective::EffectiveChannels;
use crate::error::Result;
use crate::matcore::{logdet_hermitian_psd, CMatrix, Tolerances};
use crate::power::{bob_interference_covariance, PowerProfile};
use crate::precoding::PrecodingSolution;

/// Rates of one trial (or of one aggregation thereof).
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub bob_rates: Vec<f64>,
    /// `eve_rates[j][k]`: rate leaked about user `j`'s message to Eve `k`.
    pub eve_rates: Vec<Vec<f64>>,
    /// `[bob_rates[j] - eve_rates[j][k]]^+`.
    pub pair_secrecy: Vec<Vec<f64>>,
    /// Sum over users of the worst-Eve secrecy rate.
    pub ssr: f64,
    /// Worst secrecy rate over all user/Eve pairs.
    pub asr: f64,
}

impl RateReport {
    pub fn from_rates(bob_rates: Vec<f64>, eve_rates: Vec<Vec<f64>>) -> Self {
        let pair_secrecy: Vec<Vec<f64>> = bob_rates
            .iter()
            .zip(&eve_rates)
            .map(|(b, row)| row.iter().map(|e| (b - e).max(0.0)).collect())
            .collect();
        let worst_per_user: Vec<f64> = pair_secrecy
            .iter()
            .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
            .collect();
        let ssr = worst_per_user.iter().sum();
        let asr = worst_per_user.iter().copied().fold(f64::INFINITY, f64::min);
        RateReport {
            bob_rates,
            eve_rates,
            pair_secrecy,
            ssr,
            asr,
        }
    }
}

/// Which interference terms enter a Bob's covariance. Both are on for the
/// physical rate; switching one off shows whether it matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BobTerms {
    pub cci: bool,
    pub noise: bool,
}

impl Default for BobTerms {
    fn default() -> Self {
        BobTerms { cci: true, noise: true }
    }
}

fn log2_ratio(num: &CMatrix, den: &CMatrix, tol: &Tolerances) -> Result<f64> {
    let r = (logdet_hermitian_psd(num, tol)? - logdet_hermitian_psd(den, tol)?) / LN_2;
    Ok(r.max(0.0))
}

fn signal_term(heff: &CMatrix, prof: &PowerProfile, j: usize) -> CMatrix {
    heff * prof.signal_covariance(j) * heff.adjoint()
}

pub fn bob_rate_with(
    j: usize,
    eff: &EffectiveChannels,
    prof: &PowerProfile,
    tol: &Tolerances,
    terms: BobTerms,
) -> Result<f64> {
    let interference = bob_interference_covariance(j, eff, prof, terms.cci, terms.noise);
    let total = &interference + signal_term(&eff.bob[j][j], prof, j);
    log2_ratio(&total, &interference, tol)
}

/// `log2 det(C + Ĥ_jj Q_j Ĥ_jjᴴ) - log2 det(C)` with `C` the unit receiver
/// noise plus the other users' messages plus any artificial noise reaching
/// Bob `j`.
pub fn bob_rate_eff(j: usize, eff: &EffectiveChannels, prof: &PowerProfile, tol: &Tolerances) -> Result<f64> {
    bob_rate_with(j, eff, prof, tol, BobTerms::default())
}

/// Rate leaked about user `j`'s message to Eve `k`, whose noise variance is
/// `eps`.
pub fn eve_rate_eff(
    j: usize,
    k: usize,
    eff: &EffectiveChannels,
    prof: &PowerProfile,
    eps: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let ne = eff.eve[k][j].nrows();
    let mut interference = CMatrix::identity(ne, ne).scale(eps);
    for (l, g) in eff.eve_gram[k].iter().enumerate() {
        if l != j {
            interference += g.scale(prof.sigma_u_sq[l]);
        }
    }
    interference += eff.eve_noise_gram[k].scale(prof.sigma_v_sq);
    let total = &interference + signal_term(&eff.eve[k][j], prof, j);
    log2_ratio(&total, &interference, tol)
}

pub fn bob_rate(j: usize, c: &ChannelSet, sol: &PrecodingSolution, prof: &PowerProfile, tol: &Tolerances) -> Result<f64> {
    bob_rate_eff(j, &EffectiveChannels::new(c, sol), prof, tol)
}

pub fn eve_rate(
    j: usize,
    k: usize,
    c: &ChannelSet,
    sol: &PrecodingSolution,
    prof: &PowerProfile,
    eps: f64,
    tol: &Tolerances,
) -> Result<f64> {
    eve_rate_eff(j, k, &EffectiveChannels::new(c, sol), prof, eps, tol)
}

pub fn secrecy_report_eff(eff: &EffectiveChannels, prof: &PowerProfile, eps: f64, tol: &Tolerances) -> Result<RateReport> {
    let bob = (0..eff.users())
        .map(|j| bob_rate_eff(j, eff, prof, tol))
        .collect::<Result<Vec<_>>>()?;
    let eve = (0..eff.users())
        .map(|j| {
            (0..eff.eves())
                .map(|k| eve_rate_eff(j, k, eff, prof, eps, tol))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateReport::from_rates(bob, eve))
}

/// All Bob and Eve rates of one trial with per-trial secrecy aggregates.
pub fn secrecy_report(
    c: &ChannelSet,
    sol: &PrecodingSolution,
    prof: &PowerProfile,
    eps: f64,
    tol: &Tolerances,
) -> Result<RateReport> {
    secrecy_report_eff(&EffectiveChannels::new(c, sol), prof, eps, tol)
}
