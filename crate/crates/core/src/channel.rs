//! Seeded Rayleigh block-fading draws.
//!
//! Every trial owns a ChaCha20 stream selected by its index, keyed by the
//! scenario seed, so a draw depends only on `(seed, trial_index)` and trials
//! can be generated in any order or in parallel.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::matcore::{vstack, CMatrix};
use crate::scenario::Scenario;

/// Key offset separating the user-ordering stream from the channel stream.
const ORDERING_KEY: u64 = 0x6f72_6465_7269_6e67;

/// One fading realization: legitimate channels `H_j` (`N_Bj x N_A`) and
/// eavesdropper channels `G_k` (`N_Ek x N_A`).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub bobs: Vec<CMatrix>,
    pub eves: Vec<CMatrix>,
}

impl ChannelSet {
    pub fn n_tx(&self) -> usize {
        self.bobs[0].ncols()
    }

    pub fn bob_antennas(&self) -> Vec<usize> {
        self.bobs.iter().map(|h| h.nrows()).collect()
    }
}

pub(crate) fn trial_rng(seed: u64, trial_index: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial_index as u64);
    rng
}

pub(crate) fn ordering_rng(seed: u64, trial_index: usize) -> ChaCha20Rng {
    trial_rng(seed ^ ORDERING_KEY, trial_index)
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    // Row-major fill so the stream layout does not depend on storage order.
    let mut m = CMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m[(r, c)] = Complex64::new(re * scale, im * scale);
        }
    }
    m
}

/// Draws the channels of trial `trial_index`: i.i.d. circularly-symmetric
/// complex Gaussian entries with `E|h|^2 = 1`. Eavesdroppers are drawn
/// separately even when the scenario is colluding; see [`collude`].
pub fn draw_channels(s: &Scenario, trial_index: usize) -> ChannelSet {
    let mut rng = trial_rng(s.seed, trial_index);
    let bobs = s
        .bob_antennas
        .iter()
        .map(|&nb| gaussian_matrix(nb, s.n_tx, &mut rng))
        .collect();
    let eves = s
        .eve_antennas
        .iter()
        .map(|&ne| gaussian_matrix(ne, s.n_tx, &mut rng))
        .collect();
    ChannelSet { bobs, eves }
}

/// Merges all eavesdroppers into one whose channel is the row-stack of theirs.
pub fn collude(c: &ChannelSet) -> ChannelSet {
    if c.eves.len() <= 1 {
        return c.clone();
    }
    let n_tx = c.eves[0].ncols();
    let refs: Vec<&CMatrix> = c.eves.iter().collect();
    ChannelSet {
        bobs: c.bobs.clone(),
        eves: vec![vstack(&refs, n_tx)],
    }
}

/// Channel draw with the scenario's collusion setting applied.
pub fn draw_effective_channels(s: &Scenario, trial_index: usize) -> ChannelSet {
    let c = draw_channels(s, trial_index);
    if s.colluding {
        collude(&c)
    } else {
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_key_same_draw() {
        let s = Scenario::default();
        assert_eq!(draw_channels(&s, 3), draw_channels(&s, 3));
    }

    #[test]
    fn different_trials_differ() {
        let s = Scenario::default();
        assert_ne!(draw_channels(&s, 0).bobs[0], draw_channels(&s, 1).bobs[0]);
        let other_seed = Scenario { seed: 43, ..Scenario::default() };
        assert_ne!(draw_channels(&s, 0).bobs[0], draw_channels(&other_seed, 0).bobs[0]);
    }

    #[test]
    fn shapes_follow_scenario() {
        let s = Scenario {
            bob_antennas: vec![1, 2, 3],
            streams: vec![1, 1, 1],
            eve_antennas: vec![4, 2],
            ..Scenario::default()
        };
        let c = draw_channels(&s, 0);
        let shapes: Vec<_> = c.bobs.iter().map(|h| h.shape()).collect();
        assert_eq!(shapes, vec![(1, 10), (2, 10), (3, 10)]);
        assert_eq!(c.eves[1].shape(), (2, 10));
    }

    #[test]
    fn entries_have_unit_second_moment() {
        let s = Scenario {
            n_tx: 50,
            bob_antennas: vec![10],
            streams: vec![1],
            eve_antennas: vec![10],
            ..Scenario::default()
        };
        let mut samples = Vec::new();
        for t in 0..100 {
            let c = draw_channels(&s, t);
            samples.extend(c.bobs[0].iter().map(|z| z.norm_sqr()));
            samples.extend(c.eves[0].iter().map(|z| z.norm_sqr()));
        }
        assert_eq!(samples.len(), 100_000);
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn collusion_stacks_rows() {
        let c = draw_channels(&Scenario::default(), 0);
        let merged = collude(&c);
        assert_eq!(merged.eves.len(), 1);
        assert_eq!(merged.eves[0].shape(), (8, 10));
        assert_eq!(merged.eves[0].rows(0, 4), c.eves[0]);
        assert_eq!(merged.eves[0].rows(4, 4), c.eves[1]);
        assert_eq!(merged.bobs, c.bobs);
    }

    #[test]
    fn collusion_of_single_eve_is_identity() {
        let s = Scenario { eve_antennas: vec![4], ..Scenario::default() };
        let c = draw_channels(&s, 0);
        assert_eq!(collude(&c), c);
    }
}
