//! Information and artificial-noise precoders.
//!
//! All precoders have orthonormal (ZF: unit-norm) columns; every power
//! scaling lives in [`crate::power::PowerProfile`].
//!
//! The sequential (ISDF) design places each user's precoder in the
//! orthogonal complement of the precoders already built for the users ahead
//! of it, then picks streams by SVD of the user's channel restricted to that
//! subspace. Block diagonalization instead restricts each user to the null
//! space of all *other users' channels*, which costs far more dimensions.

use rand::seq::SliceRandom;

use crate::channel::{ordering_rng, ChannelSet};
use crate::error::{Error, Result};
use crate::matcore::{
    dominant_left_vectors, dominant_right_vectors, hstack, max_abs, numerical_rank,
    orth_complement, vstack, CMatrix,
};
use crate::scenario::{Scenario, Scheme, UserOrdering};

/// Subspace receiving the artificial noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMapping {
    /// Null space of the stacked legitimate channels; invisible to every Bob.
    ChannelNull,
    /// Orthogonal complement of the stacked information precoders.
    PrecoderNull,
}

impl NoiseMapping {
    pub fn for_scheme(scheme: Scheme) -> Self {
        match scheme {
            Scheme::Isdf2 => NoiseMapping::PrecoderNull,
            _ => NoiseMapping::ChannelNull,
        }
    }
}

/// Information precoders (indexed by original user id) plus the dimensions
/// of the precoding-selection decompositions performed to build them.
#[derive(Debug, Clone)]
pub struct PrecoderSet {
    pub precoders: Vec<CMatrix>,
    /// Smaller dimension of each null-space decomposition, in build order.
    pub psm_dims: Vec<usize>,
}

impl PrecoderSet {
    /// Sum of cubes of the decomposition sizes; a proxy for build cost.
    pub fn cost_proxy(&self) -> u64 {
        self.psm_dims.iter().map(|&d| (d as u64).pow(3)).sum()
    }
}

#[derive(Debug, Clone)]
pub struct PrecodingSolution {
    pub scheme: Scheme,
    /// Precoding priority order (user ids).
    pub order: Vec<usize>,
    /// `W_j`, `N_A x d_j`, indexed by user id.
    pub precoders: Vec<CMatrix>,
    /// `W`, `N_A x noise_dim`.
    pub noise_precoder: CMatrix,
    pub noise_dim: usize,
    pub noise_mapping: NoiseMapping,
    /// Security degrees of freedom per user id.
    pub sdf: Vec<usize>,
    pub cost_proxy: u64,
}

impl PrecodingSolution {
    pub fn streams(&self) -> Vec<usize> {
        self.precoders.iter().map(|w| w.ncols()).collect()
    }
}

fn insufficient(scheme: &str, constraint: String) -> Error {
    Error::InsufficientAntennas {
        scheme: scheme.to_string(),
        constraint,
    }
}

/// Precoding priority order. Ties in antenna count keep the original index
/// order; `Random` shuffles with a stream keyed by `(seed, trial_index)`.
pub fn order_users(s: &Scenario, trial_index: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..s.users()).collect();
    match s.ordering {
        UserOrdering::AsGiven => {}
        UserOrdering::FewestAntennasFirst => order.sort_by_key(|&j| s.bob_antennas[j]),
        UserOrdering::MostAntennasFirst => {
            order.sort_by_key(|&j| s.bob_antennas[j]);
            order.reverse();
        }
        UserOrdering::Random => order.shuffle(&mut ordering_rng(s.seed, trial_index)),
    }
    order
}

/// Sequential precoders: user `order[0]` gets its dominant right singular
/// vectors, every later user is confined to the orthogonal complement of the
/// precoders already designed.
pub fn build_isdf(s: &Scenario, c: &ChannelSet, order: &[usize]) -> Result<PrecoderSet> {
    let tol = &s.tolerances;
    let n_tx = c.n_tx();
    let mut precoders: Vec<Option<CMatrix>> = vec![None; c.bobs.len()];
    let mut built: Vec<CMatrix> = Vec::with_capacity(order.len());
    let mut psm_dims = Vec::with_capacity(order.len());
    let mut used = 0;
    for (pos, &j) in order.iter().enumerate() {
        let d = s.streams[j];
        let free = n_tx.saturating_sub(used);
        if free < d {
            return Err(insufficient(
                "ISDF",
                format!(
                    "user {j} (precoding position {pos}) has L_j = N_A - sum of earlier d_i = {free} < d_j = {d}"
                ),
            ));
        }
        let refs: Vec<&CMatrix> = built.iter().collect();
        let co_designed = hstack(&refs, n_tx);
        psm_dims.push(co_designed.ncols().min(n_tx));
        let null_basis = orth_complement(&co_designed, tol)?;
        let restricted = &c.bobs[j] * &null_basis;
        let selection = dominant_right_vectors(&restricted, d)?;
        let w = null_basis * selection;
        used += d;
        built.push(w.clone());
        precoders[j] = Some(w);
    }
    Ok(PrecoderSet {
        precoders: precoders.into_iter().map(|w| w.expect("order is a permutation")).collect(),
        psm_dims,
    })
}

fn others_stacked(c: &ChannelSet, j: usize) -> CMatrix {
    let refs: Vec<&CMatrix> = c
        .bobs
        .iter()
        .enumerate()
        .filter(|&(l, _)| l != j)
        .map(|(_, h)| h)
        .collect();
    vstack(&refs, c.n_tx())
}

/// Block diagonalization: user `j` transmits in the null space of every
/// other user's channel, streams chosen by SVD inside that space.
pub fn build_bd(s: &Scenario, c: &ChannelSet) -> Result<PrecoderSet> {
    let tol = &s.tolerances;
    let n_tx = c.n_tx();
    let mut precoders = Vec::with_capacity(c.bobs.len());
    let mut psm_dims = Vec::with_capacity(c.bobs.len());
    for (j, h) in c.bobs.iter().enumerate() {
        let others = others_stacked(c, j);
        let d = s.streams[j];
        if others.nrows() >= n_tx {
            return Err(insufficient(
                "BD",
                format!(
                    "N_A = {n_tx} must exceed the other users' total antennas {} (user {j})",
                    others.nrows()
                ),
            ));
        }
        psm_dims.push(others.nrows().min(n_tx));
        let null_basis = orth_complement(&others.adjoint(), tol)?;
        if null_basis.ncols() < d {
            return Err(insufficient(
                "BD",
                format!("user {j}: null-space dimension {} < d_j = {d}", null_basis.ncols()),
            ));
        }
        let restricted = h * &null_basis;
        precoders.push(null_basis * dominant_right_vectors(&restricted, d)?);
    }
    Ok(PrecoderSet { precoders, psm_dims })
}

/// Effective single-stream row `u_1ᴴ H_j` of each user, `u_1` being the
/// dominant left singular vector of `H_j`.
pub fn zf_effective_rows(c: &ChannelSet) -> Result<CMatrix> {
    let rows = c
        .bobs
        .iter()
        .map(|h| Ok(dominant_left_vectors(h, 1)?.adjoint() * h))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&CMatrix> = rows.iter().collect();
    Ok(vstack(&refs, c.n_tx()))
}

/// Zero forcing on the dominant-mode effective rows: the precoders are the
/// unit-normalized columns of the pseudo-inverse of the stacked rows.
/// Restricted to one stream per user.
pub fn build_zf(s: &Scenario, c: &ChannelSet) -> Result<PrecoderSet> {
    if let Some((user, &streams)) = s.streams.iter().enumerate().find(|(_, &d)| d != 1) {
        return Err(Error::UnsupportedStreams { user, streams });
    }
    let effective = zf_effective_rows(c)?;
    let users = effective.nrows();
    let rank = numerical_rank(&effective, &s.tolerances);
    if rank < users {
        return Err(Error::RankDeficient(format!(
            "ZF effective channel has rank {rank} < {users} users"
        )));
    }
    let pinv = effective
        .clone()
        .svd(true, true)
        .pseudo_inverse(0.0)
        .map_err(|e| Error::RankDeficient(e.to_string()))?;
    let precoders = pinv
        .column_iter()
        .map(|col| {
            let norm = col.norm();
            CMatrix::from_column_slice(col.nrows(), 1, col.as_slice()).unscale(norm)
        })
        .collect();
    Ok(PrecoderSet {
        precoders,
        psm_dims: vec![users.min(c.n_tx())],
    })
}

/// Each user's own dominant right singular vectors; no interference control.
pub fn build_svd(s: &Scenario, c: &ChannelSet) -> Result<PrecoderSet> {
    let precoders = c
        .bobs
        .iter()
        .zip(&s.streams)
        .map(|(h, &d)| dominant_right_vectors(h, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(PrecoderSet {
        precoders,
        psm_dims: Vec::new(),
    })
}

/// Artificial-noise precoder and the number of noise directions.
pub fn build_noise_precoder(
    mapping: NoiseMapping,
    s: &Scenario,
    c: &ChannelSet,
    precoders: &[CMatrix],
) -> Result<(CMatrix, usize)> {
    let n_tx = c.n_tx();
    let constrained = match mapping {
        NoiseMapping::ChannelNull => {
            let total: usize = c.bobs.iter().map(|h| h.nrows()).sum();
            if total >= n_tx {
                return Err(insufficient(
                    "ISDF1 noise mapping",
                    format!("N_A = {n_tx} must exceed sum of N_Bj = {total}"),
                ));
            }
            let adj: Vec<CMatrix> = c.bobs.iter().map(|h| h.adjoint()).collect();
            let refs: Vec<&CMatrix> = adj.iter().collect();
            hstack(&refs, n_tx)
        }
        NoiseMapping::PrecoderNull => {
            let total: usize = precoders.iter().map(|w| w.ncols()).sum();
            if total >= n_tx {
                return Err(insufficient(
                    "ISDF2 noise mapping",
                    format!("N_A = {n_tx} must exceed sum of d_j = {total}"),
                ));
            }
            let refs: Vec<&CMatrix> = precoders.iter().collect();
            hstack(&refs, n_tx)
        }
    };
    let w = orth_complement(&constrained, &s.tolerances)?;
    let dim = w.ncols();
    Ok((w, dim))
}

/// Security degrees of freedom per user: the dimension of the subspace each
/// scheme lets the user's precoder occupy.
pub fn sdf_report(s: &Scenario, c: &ChannelSet, scheme: Scheme, order: &[usize]) -> Vec<usize> {
    let n_tx = c.n_tx();
    let tol = &s.tolerances;
    let mut sdf = vec![0; c.bobs.len()];
    match scheme {
        Scheme::Isdf1 | Scheme::Isdf2 => {
            let mut used = 0;
            for &j in order {
                sdf[j] = n_tx.saturating_sub(used);
                used += s.streams[j];
            }
        }
        Scheme::Bd | Scheme::Zf => {
            for (j, slot) in sdf.iter_mut().enumerate() {
                let others = others_stacked(c, j);
                let rank = if others.nrows() == 0 { 0 } else { numerical_rank(&others, tol) };
                *slot = n_tx.saturating_sub(rank);
            }
        }
        Scheme::Svd => {
            for (slot, h) in sdf.iter_mut().zip(&c.bobs) {
                *slot = n_tx.saturating_sub(numerical_rank(h, tol));
            }
        }
    }
    sdf
}

/// Builds the complete precoding solution for trial `trial_index`.
pub fn precode(s: &Scenario, c: &ChannelSet, trial_index: usize) -> Result<PrecodingSolution> {
    let order = order_users(s, trial_index);
    let set = match s.scheme {
        Scheme::Isdf1 | Scheme::Isdf2 => build_isdf(s, c, &order)?,
        Scheme::Bd => build_bd(s, c)?,
        Scheme::Zf => build_zf(s, c)?,
        Scheme::Svd => build_svd(s, c)?,
    };
    let mapping = NoiseMapping::for_scheme(s.scheme);
    let (noise_precoder, noise_dim) = build_noise_precoder(mapping, s, c, &set.precoders)?;
    let sdf = sdf_report(s, c, s.scheme, &order);
    Ok(PrecodingSolution {
        scheme: s.scheme,
        order,
        cost_proxy: set.cost_proxy(),
        precoders: set.precoders,
        noise_precoder,
        noise_dim,
        noise_mapping: mapping,
        sdf,
    })
}

/// One measured geometric invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub check: &'static str,
    pub value: f64,
}

/// Residuals of every orthogonality invariant that applies to `sol`.
pub fn geometry_residuals(c: &ChannelSet, sol: &PrecodingSolution) -> Vec<Residual> {
    let mut out = Vec::new();
    let orthonormality = sol
        .precoders
        .iter()
        .map(|w| {
            if sol.scheme == Scheme::Zf {
                (w.norm() - 1.0).abs()
            } else {
                max_abs(&(w.adjoint() * w - CMatrix::identity(w.ncols(), w.ncols())))
            }
        })
        .fold(0.0, f64::max);
    out.push(Residual { check: "precoder orthonormality", value: orthonormality });
    let nd = sol.noise_dim;
    out.push(Residual {
        check: "noise precoder orthonormality",
        value: max_abs(&(sol.noise_precoder.adjoint() * &sol.noise_precoder - CMatrix::identity(nd, nd))),
    });
    match sol.scheme {
        Scheme::Isdf1 | Scheme::Isdf2 => {
            let mut worst: f64 = 0.0;
            for (a, &i) in sol.order.iter().enumerate() {
                for &j in &sol.order[a + 1..] {
                    worst = worst.max(max_abs(&(sol.precoders[i].adjoint() * &sol.precoders[j])));
                }
            }
            out.push(Residual { check: "ISDF chain W_i^H W_j", value: worst });
        }
        Scheme::Bd => {
            let mut worst: f64 = 0.0;
            for (l, h) in c.bobs.iter().enumerate() {
                for (j, w) in sol.precoders.iter().enumerate() {
                    if l != j {
                        worst = worst.max(max_abs(&(h * w)));
                    }
                }
            }
            out.push(Residual { check: "BD H_l W_j", value: worst });
        }
        Scheme::Zf => {
            if let Ok(rows) = zf_effective_rows(c) {
                let mut worst: f64 = 0.0;
                for l in 0..rows.nrows() {
                    for (j, w) in sol.precoders.iter().enumerate() {
                        if l != j {
                            worst = worst.max((rows.row(l) * w)[(0, 0)].norm());
                        }
                    }
                }
                out.push(Residual { check: "ZF u_l^H H_l W_j", value: worst });
            }
        }
        Scheme::Svd => {}
    }
    match sol.noise_mapping {
        NoiseMapping::ChannelNull => {
            let worst = c
                .bobs
                .iter()
                .map(|h| max_abs(&(h * &sol.noise_precoder)))
                .fold(0.0, f64::max);
            out.push(Residual { check: "channel-null noise H_j W", value: worst });
        }
        NoiseMapping::PrecoderNull => {
            let refs: Vec<&CMatrix> = sol.precoders.iter().collect();
            let stacked = hstack(&refs, c.n_tx());
            out.push(Residual {
                check: "precoder-null noise W_hat^H W",
                value: max_abs(&(stacked.adjoint() * &sol.noise_precoder)),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::draw_channels;

    fn fig3() -> Scenario {
        Scenario::default()
    }

    #[test]
    fn ordering_strategies() {
        let mut s = Scenario {
            bob_antennas: vec![1, 2, 3],
            ordering: UserOrdering::FewestAntennasFirst,
            ..Scenario::default()
        };
        assert_eq!(order_users(&s, 0), vec![0, 1, 2]);
        s.ordering = UserOrdering::MostAntennasFirst;
        assert_eq!(order_users(&s, 0), vec![2, 1, 0]);
        s.bob_antennas = vec![3, 3, 3];
        s.ordering = UserOrdering::FewestAntennasFirst;
        assert_eq!(order_users(&s, 0), vec![0, 1, 2]);
        s.bob_antennas = vec![3, 1, 2];
        assert_eq!(order_users(&s, 0), vec![1, 2, 0]);
        s.ordering = UserOrdering::Random;
        let mut p = order_users(&s, 5);
        assert_eq!(p, order_users(&s, 5));
        p.sort();
        assert_eq!(p, vec![0, 1, 2]);
    }

    #[test]
    fn single_user_isdf_equals_svd() {
        let s = Scenario {
            bob_antennas: vec![3],
            streams: vec![2],
            ..Scenario::default()
        };
        let c = draw_channels(&s, 0);
        let isdf = build_isdf(&s, &c, &[0]).unwrap();
        let svd = build_svd(&s, &c).unwrap();
        let pi = &isdf.precoders[0] * isdf.precoders[0].adjoint();
        let ps = &svd.precoders[0] * svd.precoders[0].adjoint();
        assert!(max_abs(&(pi - ps)) < 1e-10);
    }

    #[test]
    fn isdf_chain_is_orthogonal() {
        let s = fig3();
        for t in 0..20 {
            let c = draw_channels(&s, t);
            let set = build_isdf(&s, &c, &[0, 1, 2]).unwrap();
            for i in 0..3 {
                for j in i + 1..3 {
                    assert!(max_abs(&(set.precoders[i].adjoint() * &set.precoders[j])) <= 1e-8);
                }
            }
            assert_eq!(sdf_report(&s, &c, Scheme::Isdf1, &[0, 1, 2]), vec![10, 9, 8]);
        }
    }

    #[test]
    fn isdf_antenna_counting() {
        let mut s = Scenario { n_tx: 3, ..Scenario::default() };
        let c = draw_channels(&s, 0);
        assert!(build_isdf(&s, &c, &[0, 1, 2]).is_ok());
        s.n_tx = 2;
        let c = draw_channels(&s, 0);
        match build_isdf(&s, &c, &[0, 1, 2]) {
            Err(Error::InsufficientAntennas { constraint, .. }) => {
                assert!(constraint.starts_with("user 2"), "{constraint}")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bd_has_zero_cross_interference() {
        let s = fig3();
        let c = draw_channels(&s, 1);
        let set = build_bd(&s, &c).unwrap();
        for l in 0..3 {
            for j in 0..3 {
                if l != j {
                    assert!(max_abs(&(&c.bobs[l] * &set.precoders[j])) <= 1e-8);
                }
            }
        }
        assert_eq!(sdf_report(&s, &c, Scheme::Bd, &[0, 1, 2]), vec![4, 4, 4]);
        assert_eq!(set.cost_proxy(), 648);
    }

    #[test]
    fn bd_needs_spare_antennas() {
        let s = Scenario {
            n_tx: 3,
            bob_antennas: vec![3, 3],
            streams: vec![1, 1],
            ..Scenario::default()
        };
        let c = draw_channels(&s, 0);
        assert!(matches!(build_bd(&s, &c), Err(Error::InsufficientAntennas { .. })));
    }

    #[test]
    fn zf_single_user_is_matched_filter() {
        let s = Scenario {
            bob_antennas: vec![3],
            streams: vec![1],
            ..Scenario::default()
        };
        let c = draw_channels(&s, 0);
        let rows = zf_effective_rows(&c).unwrap();
        let w = &build_zf(&s, &c).unwrap().precoders[0];
        let mf = rows.adjoint().unscale(rows.norm());
        assert!(max_abs(&(w - mf)) < 1e-10);
    }

    #[test]
    fn zf_nulls_effective_rows() {
        let s = fig3();
        let c = draw_channels(&s, 2);
        let set = build_zf(&s, &c).unwrap();
        let rows = zf_effective_rows(&c).unwrap();
        for l in 0..3 {
            for j in 0..3 {
                let v = (rows.row(l) * &set.precoders[j])[(0, 0)].norm();
                if l != j {
                    assert!(v <= 1e-8);
                } else {
                    assert!(v > 1e-3);
                }
            }
        }
    }

    #[test]
    fn zf_rejects_multistream() {
        let s = Scenario { streams: vec![1, 2, 1], ..Scenario::default() };
        let c = draw_channels(&s, 0);
        assert_eq!(
            build_zf(&s, &c).unwrap_err(),
            Error::UnsupportedStreams { user: 1, streams: 2 }
        );
    }

    #[test]
    fn svd_precoder_follows_strongest_row() {
        use num_complex::Complex64;
        let s = Scenario {
            n_tx: 3,
            bob_antennas: vec![3],
            streams: vec![1],
            ..Scenario::default()
        };
        let mut h = CMatrix::zeros(3, 3);
        h[(0, 1)] = Complex64::new(3.0, 0.0);
        h[(1, 2)] = Complex64::new(2.0, 0.0);
        h[(2, 0)] = Complex64::new(1.0, 0.0);
        let c = ChannelSet { bobs: vec![h], eves: vec![] };
        let w = &build_svd(&s, &c).unwrap().precoders[0];
        assert!((w[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert_eq!(sdf_report(&s, &c, Scheme::Svd, &[0]), vec![0]);
    }

    #[test]
    fn svd_identical_channels_identical_precoders() {
        let s = Scenario { bob_antennas: vec![3, 3], streams: vec![1, 1], ..Scenario::default() };
        let mut c = draw_channels(&s, 0);
        c.bobs[1] = c.bobs[0].clone();
        let set = build_svd(&s, &c).unwrap();
        assert_eq!(set.precoders[0], set.precoders[1]);
    }

    #[test]
    fn noise_dimensions() {
        let s = fig3();
        let c = draw_channels(&s, 0);
        let set = build_isdf(&s, &c, &[0, 1, 2]).unwrap();
        let (w1, d1) = build_noise_precoder(NoiseMapping::ChannelNull, &s, &c, &set.precoders).unwrap();
        assert_eq!(d1, 1);
        for h in &c.bobs {
            assert!(max_abs(&(h * &w1)) <= 1e-8);
        }
        let (w2, d2) = build_noise_precoder(NoiseMapping::PrecoderNull, &s, &c, &set.precoders).unwrap();
        assert_eq!(d2, 7);
        // ISDF2 noise is orthogonal to the precoders but visible at the Bobs.
        assert!(c.bobs.iter().all(|h| max_abs(&(h * &w2)) > 1e-3));
    }

    #[test]
    fn channel_null_needs_spare_antennas() {
        let s = Scenario { n_tx: 9, ..Scenario::default() };
        let c = draw_channels(&s, 0);
        let set = build_isdf(&s, &c, &[0, 1, 2]).unwrap();
        let err = build_noise_precoder(NoiseMapping::ChannelNull, &s, &c, &set.precoders).unwrap_err();
        assert!(err.to_string().contains("N_A = 9 must exceed sum of N_Bj = 9"), "{err}");
    }

    #[test]
    fn cost_proxy_counts() {
        let s = fig3();
        let c = draw_channels(&s, 0);
        assert_eq!(build_isdf(&s, &c, &[0, 1, 2]).unwrap().cost_proxy(), 9);
        assert_eq!(build_svd(&s, &c).unwrap().cost_proxy(), 0);
    }

    #[test]
    fn full_solution_residuals_are_small() {
        for scheme in Scheme::ALL {
            let s = Scenario { scheme, ..Scenario::default() };
            let c = draw_channels(&s, 4);
            let sol = precode(&s, &c, 4).unwrap();
            for r in geometry_residuals(&c, &sol) {
                assert!(r.value <= 1e-8, "{scheme}: {} = {}", r.check, r.value);
            }
        }
    }
}
