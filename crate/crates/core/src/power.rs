//! Power bookkeeping, per-user water-filling and the information/noise
//! power-ratio search.
//!
//! A share `phi` of the budget `P` carries messages, split equally across
//! users (`rho_j = phi / J`); the rest, `alpha = 1 - phi`, is artificial
//! noise spread evenly over the `noise_dim` noise directions. Per-user
//! water-filling redistributes `rho_j P` over the user's whitened
//! eigenmodes while the other users' interference is held at the uniform
//! profile the whitening was designed for.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::effective::EffectiveChannels;
use crate::error::{Error, Result};
use crate::matcore::{dominant_right_vectors, singular_values, whitener, CMatrix, Tolerances};
use crate::scenario::{check_phi, Objective, Scenario};

/// Water-filled powers of one user and the unitary basis (in the user's
/// symbol space) that carries them.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamAllocation {
    pub powers: Vec<f64>,
    pub basis: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    pub total_power: f64,
    pub rho: Vec<f64>,
    pub alpha: f64,
    /// Per-symbol variance under the uniform split; also the interference
    /// level each user presents to the others.
    pub sigma_u_sq: Vec<f64>,
    pub sigma_v_sq: f64,
    pub streams: Vec<usize>,
    pub noise_dim: usize,
    pub allocations: Option<Vec<StreamAllocation>>,
}

impl PowerProfile {
    pub fn stream_powers(&self) -> Option<Vec<Vec<f64>>> {
        self.allocations
            .as_ref()
            .map(|a| a.iter().map(|x| x.powers.clone()).collect())
    }

    /// Transmit covariance `Q_j` of user `j`'s symbols.
    pub fn signal_covariance(&self, j: usize) -> CMatrix {
        match &self.allocations {
            Some(a) => {
                let alloc = &a[j];
                let diag = DVector::from_iterator(
                    alloc.powers.len(),
                    alloc.powers.iter().map(|&p| Complex64::new(p, 0.0)),
                );
                &alloc.basis * CMatrix::from_diagonal(&diag) * alloc.basis.adjoint()
            }
            None => {
                let d = self.streams[j];
                CMatrix::identity(d, d).scale(self.sigma_u_sq[j])
            }
        }
    }

    /// Power actually radiated: signal covariance traces plus noise.
    pub fn radiated_power(&self) -> f64 {
        let signal: f64 = match &self.allocations {
            Some(a) => a.iter().map(|x| x.powers.iter().sum::<f64>()).sum(),
            None => self
                .streams
                .iter()
                .zip(&self.sigma_u_sq)
                .map(|(&d, &s)| d as f64 * s)
                .sum(),
        };
        signal + self.noise_dim as f64 * self.sigma_v_sq
    }

    /// Worst relative mismatch across the budget identities: total radiated
    /// power against `P`, ratios against one, and (when water-filled) each
    /// user's stream powers against `rho_j P`.
    pub fn accounting_residual(&self) -> f64 {
        let p = self.total_power;
        let mut worst = ((self.radiated_power() - p) / p).abs();
        worst = worst.max((self.rho.iter().sum::<f64>() + self.alpha - 1.0).abs());
        if let Some(a) = &self.allocations {
            for (x, &rho) in a.iter().zip(&self.rho) {
                let budget = rho * p;
                worst = worst.max(((x.powers.iter().sum::<f64>() - budget) / budget).abs());
            }
        }
        worst
    }
}

/// Equal split of `phi * P` across users, each user's share spread evenly
/// over its streams; `(1 - phi) P` spread over `noise_dim` noise directions.
pub fn uniform_profile(total_power: f64, phi: f64, streams: &[usize], noise_dim: usize) -> Result<PowerProfile> {
    check_phi(phi)?;
    if !(total_power.is_finite() && total_power > 0.0) {
        return Err(Error::Domain(format!("total power must be > 0, got {total_power}")));
    }
    if streams.is_empty() || streams.contains(&0) {
        return Err(Error::Domain("every user needs at least one stream".into()));
    }
    if noise_dim == 0 {
        return Err(Error::Domain("artificial noise needs at least one direction".into()));
    }
    let users = streams.len() as f64;
    let rho = vec![phi / users; streams.len()];
    let alpha = 1.0 - phi;
    let sigma_u_sq = streams
        .iter()
        .zip(&rho)
        .map(|(&d, &r)| r * total_power / d as f64)
        .collect();
    Ok(PowerProfile {
        total_power,
        rho,
        alpha,
        sigma_u_sq,
        sigma_v_sq: alpha * total_power / noise_dim as f64,
        streams: streams.to_vec(),
        noise_dim,
        allocations: None,
    })
}

/// Maximizes `sum log2(1 + p_n g_n)` subject to `sum p_n = budget`,
/// `p_n >= 0`. Exact active-set solution: with gains sorted in decreasing
/// order, the largest `k` whose water level `(budget + sum_{n<k} 1/g_n) / k`
/// exceeds `1/g_k` defines the active set, and `p_n = [level - 1/g_n]^+`.
pub fn waterfill(gains: &[f64], budget: f64) -> Result<Vec<f64>> {
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::Domain(format!("water-filling budget must be > 0, got {budget}")));
    }
    if gains.is_empty() {
        return Err(Error::Domain("water-filling needs at least one subchannel".into()));
    }
    if let Some(g) = gains.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(Error::Domain(format!("water-filling gains must be > 0, got {g}")));
    }
    let level = water_level(gains, budget);
    Ok(gains.iter().map(|&g| (level - 1.0 / g).max(0.0)).collect())
}

/// Water level `1/beta` of [`waterfill`].
pub fn water_level(gains: &[f64], budget: f64) -> f64 {
    let mut inv: Vec<f64> = gains.iter().map(|g| 1.0 / g).collect();
    inv.sort_by(f64::total_cmp);
    let mut prefix = 0.0;
    let mut level = budget + inv[0];
    for (k, &x) in inv.iter().enumerate() {
        prefix += x;
        let candidate = (budget + prefix) / (k + 1) as f64;
        if candidate > x {
            level = candidate;
        } else {
            break;
        }
    }
    level
}

/// Whitened eigenmodes of user `j`: squared singular values (descending) of
/// `F Ĥ_jj`, where `F` whitens the interference-plus-noise covariance
/// `I + sum_{i != j} sigma_ui^2 Ĥ_ji Ĥ_jiᴴ + sigma_v^2 Ĥ_j Ĥ_jᴴ`, and the
/// matching right singular vectors.
pub fn whitened_modes(
    j: usize,
    eff: &EffectiveChannels,
    prof: &PowerProfile,
    tol: &Tolerances,
) -> Result<(Vec<f64>, CMatrix)> {
    let covariance = bob_interference_covariance(j, eff, prof, true, true);
    let f = whitener(&covariance, tol)?;
    let whitened = f * &eff.bob[j][j];
    let d = whitened.ncols();
    let gains = singular_values(&whitened).iter().take(d).map(|s| s * s).collect();
    let basis = dominant_right_vectors(&whitened, d)?;
    Ok((gains, basis))
}

/// Per-subchannel gains `h_jn` seen by user `j` after whitening.
pub fn whitened_gains(j: usize, eff: &EffectiveChannels, prof: &PowerProfile, tol: &Tolerances) -> Result<Vec<f64>> {
    whitened_modes(j, eff, prof, tol).map(|(g, _)| g)
}

pub(crate) fn bob_interference_covariance(
    j: usize,
    eff: &EffectiveChannels,
    prof: &PowerProfile,
    include_cci: bool,
    include_noise: bool,
) -> CMatrix {
    let nb = eff.bob[j][j].nrows();
    let mut c = CMatrix::identity(nb, nb);
    if include_cci {
        for (i, g) in eff.bob_gram[j].iter().enumerate() {
            if i != j {
                c += g.scale(prof.sigma_u_sq[i]);
            }
        }
    }
    if include_noise {
        c += eff.bob_noise_gram[j].scale(prof.sigma_v_sq);
    }
    c
}

/// Replaces each user's equal per-stream split by water-filling over its
/// whitened eigenmodes, keeping the per-user budget `rho_j P`.
pub fn water_filled_profile(base: &PowerProfile, eff: &EffectiveChannels, tol: &Tolerances) -> Result<PowerProfile> {
    let mut allocations = Vec::with_capacity(eff.users());
    for j in 0..eff.users() {
        let (gains, basis) = whitened_modes(j, eff, base, tol)?;
        let budget = base.rho[j] * base.total_power;
        // Numerically dead modes get no power.
        let floor = tol.psd_floor * gains.first().copied().unwrap_or(0.0).max(1.0);
        let live: Vec<usize> = (0..gains.len()).filter(|&n| gains[n] > floor).collect();
        let mut powers = vec![0.0; gains.len()];
        if live.is_empty() {
            return Err(Error::RankDeficient(format!("user {j} has no usable eigenmode")));
        }
        let live_gains: Vec<f64> = live.iter().map(|&n| gains[n]).collect();
        for (&n, p) in live.iter().zip(waterfill(&live_gains, budget)?) {
            powers[n] = p;
        }
        allocations.push(StreamAllocation { powers, basis });
    }
    Ok(PowerProfile {
        allocations: Some(allocations),
        ..base.clone()
    })
}

/// Outcome of the power-ratio grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerRatioSearch {
    pub phi_star: f64,
    /// `(phi, ergodic objective)` for every grid point, in grid order.
    pub curve: Vec<(f64, f64)>,
}

/// Picks the `phi` maximizing the Monte Carlo estimate of `objective` at
/// the scenario's power. All grid points share the same channel draws.
/// Ties go to the smaller `phi`.
pub fn search_power_ratio(s: &Scenario, objective: Objective, grid: &[f64]) -> Result<PowerRatioSearch> {
    let summaries = crate::sim::phi_curve(s, grid)?;
    let curve: Vec<(f64, f64)> = grid
        .iter()
        .zip(&summaries)
        .map(|(&phi, sum)| (phi, sum.objective(objective).mean))
        .collect();
    let phi_star = best_phi(&curve);
    Ok(PowerRatioSearch { phi_star, curve })
}

/// Argmax over `(phi, value)` pairs, ties broken toward the smaller `phi`.
pub fn best_phi(curve: &[(f64, f64)]) -> f64 {
    let mut best = curve[0];
    for &(phi, v) in &curve[1..] {
        if v > best.1 || (v == best.1 && phi < best.0) {
            best = (phi, v);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], eps: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= eps)
    }

    #[test]
    fn uniform_profile_examples() {
        let p = uniform_profile(10.0, 0.8, &[1, 1], 8).unwrap();
        assert!(close(&p.sigma_u_sq, &[4.0, 4.0], 1e-12));
        assert!((p.sigma_v_sq - 0.25).abs() < 1e-12);
        assert!((p.radiated_power() - 10.0).abs() < 1e-12);
        assert!(p.accounting_residual() < 1e-15);

        let p = uniform_profile(1.0, 0.5, &[2], 2).unwrap();
        assert!(close(&p.sigma_u_sq, &[0.25], 1e-15));
        assert!((p.sigma_v_sq - 0.25).abs() < 1e-15);
    }

    #[test]
    fn uniform_profile_rejects_boundary_ratio() {
        assert!(matches!(uniform_profile(10.0, 1.0, &[1], 1), Err(Error::Domain(_))));
        assert!(matches!(uniform_profile(10.0, 0.0, &[1], 1), Err(Error::Domain(_))));
        assert!(uniform_profile(10.0, 0.5, &[1], 0).is_err());
    }

    #[test]
    fn waterfill_examples() {
        assert!(close(&waterfill(&[1.0, 1.0], 2.0).unwrap(), &[1.0, 1.0], 1e-15));
        assert!(close(&waterfill(&[4.0, 1.0], 1.0).unwrap(), &[0.875, 0.125], 1e-15));
        assert!((water_level(&[4.0, 1.0], 1.0) - 1.125).abs() < 1e-15);
        assert!(close(&waterfill(&[4.0, 0.1], 0.5).unwrap(), &[0.5, 0.0], 1e-15));
    }

    #[test]
    fn waterfill_domain_errors() {
        assert!(waterfill(&[1.0], 0.0).is_err());
        assert!(waterfill(&[1.0, 0.0], 1.0).is_err());
        assert!(waterfill(&[], 1.0).is_err());
    }

    #[test]
    fn singleton_grid_picks_its_point() {
        assert_eq!(best_phi(&[(0.5, 3.0)]), 0.5);
        assert_eq!(best_phi(&[(0.3, 1.0), (0.2, 1.0), (0.6, 0.5)]), 0.2);
    }
}
