//! Effective channels `H_j W_i`, `H_j W`, `G_k W_l`, `G_k W` and their Gram
//! matrices, computed once per trial and reused across power settings.

use crate::channel::ChannelSet;
use crate::matcore::CMatrix;
use crate::precoding::PrecodingSolution;

#[derive(Debug, Clone)]
pub struct EffectiveChannels {
    /// `bob[j][i] = H_j W_i`.
    pub bob: Vec<Vec<CMatrix>>,
    /// `bob_gram[j][i] = (H_j W_i)(H_j W_i)ᴴ`.
    pub bob_gram: Vec<Vec<CMatrix>>,
    /// `(H_j W)(H_j W)ᴴ`.
    pub bob_noise_gram: Vec<CMatrix>,
    /// `eve[k][l] = G_k W_l`.
    pub eve: Vec<Vec<CMatrix>>,
    pub eve_gram: Vec<Vec<CMatrix>>,
    pub eve_noise_gram: Vec<CMatrix>,
}

fn gram(a: &CMatrix) -> CMatrix {
    a * a.adjoint()
}

impl EffectiveChannels {
    pub fn new(c: &ChannelSet, sol: &PrecodingSolution) -> Self {
        let project = |rx: &CMatrix| -> Vec<CMatrix> { sol.precoders.iter().map(|w| rx * w).collect() };
        let bob: Vec<Vec<CMatrix>> = c.bobs.iter().map(project).collect();
        let eve: Vec<Vec<CMatrix>> = c.eves.iter().map(project).collect();
        let grams = |m: &Vec<Vec<CMatrix>>| m.iter().map(|row| row.iter().map(gram).collect()).collect();
        EffectiveChannels {
            bob_gram: grams(&bob),
            eve_gram: grams(&eve),
            bob_noise_gram: c.bobs.iter().map(|h| gram(&(h * &sol.noise_precoder))).collect(),
            eve_noise_gram: c.eves.iter().map(|g| gram(&(g * &sol.noise_precoder))).collect(),
            bob,
            eve,
        }
    }

    pub fn users(&self) -> usize {
        self.bob.len()
    }

    pub fn eves(&self) -> usize {
        self.eve.len()
    }
}
