//! Runtime property checks over random draws of a scenario.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::channel::{collude, draw_channels};
use crate::effective::EffectiveChannels;
use crate::error::Result;
use crate::matcore::max_abs;
use crate::power::{uniform_profile, water_filled_profile, water_level, waterfill};
use crate::precoding::{geometry_residuals, precode, sdf_report, NoiseMapping};
use crate::rates::{bob_rate_with, eve_rate_eff, BobTerms};
use crate::scenario::{Scenario, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCheck {
    pub name: String,
    /// Worst observed value over all draws.
    pub observed: f64,
    pub limit: f64,
    pub bound: Bound,
}

impl InvariantCheck {
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.observed <= self.limit,
            Bound::AtLeast => self.observed >= self.limit,
        }
    }
}

struct Tally {
    checks: Vec<InvariantCheck>,
}

impl Tally {
    fn at_most(&mut self, name: impl Into<String>, observed: f64, limit: f64) {
        self.record(name.into(), observed, limit, Bound::AtMost);
    }

    fn at_least(&mut self, name: impl Into<String>, observed: f64, limit: f64) {
        self.record(name.into(), observed, limit, Bound::AtLeast);
    }

    fn record(&mut self, name: String, observed: f64, limit: f64, bound: Bound) {
        if let Some(c) = self.checks.iter_mut().find(|c| c.name == name) {
            c.observed = match bound {
                Bound::AtMost => c.observed.max(observed),
                Bound::AtLeast => c.observed.min(observed),
            };
        } else {
            self.checks.push(InvariantCheck { name, observed, limit, bound });
        }
    }
}

const RATE_TOL: f64 = 1e-9;
const POWER_TOL: f64 = 1e-9;

/// Runs the geometric, power-accounting, rate and water-filling property
/// suites over `draws` channel draws of `s` (for every scheme whose antenna
/// constraints `s` satisfies). Constraint failures of a scheme skip it.
pub fn run_invariants(s: &Scenario, draws: usize) -> Result<Vec<InvariantCheck>> {
    s.validate()?;
    let tol = s.tolerances;
    let mut tally = Tally { checks: Vec::new() };
    for scheme in Scheme::ALL {
        let sc = Scenario { scheme, allocation: crate::scenario::Allocation::Uniform, ..s.clone() };
        for t in 0..draws {
            let c = draw_channels(&sc, t);
            let sol = match precode(&sc, &c, t) {
                Ok(sol) => sol,
                Err(_) => break,
            };
            for r in geometry_residuals(&c, &sol) {
                tally.at_most(format!("{scheme}: {}", r.check), r.value, tol.orth_tol);
            }
            let eff = EffectiveChannels::new(&c, &sol);
            for phi in [0.2, 0.5, 0.8] {
                let prof = uniform_profile(sc.power, phi, &sol.streams(), sol.noise_dim)?;
                tally.at_most("power accounting (uniform)", prof.accounting_residual(), POWER_TOL);
                if scheme == Scheme::Isdf1 {
                    let wf = water_filled_profile(&prof, &eff, &tol)?;
                    tally.at_most("power accounting (water-filling)", wf.accounting_residual(), POWER_TOL);
                    for j in 0..eff.users() {
                        let gain = bob_rate_with(j, &eff, &wf, &tol, BobTerms::default())?
                            - bob_rate_with(j, &eff, &prof, &tol, BobTerms::default())?;
                        tally.at_least("water-filling Bob-rate gain", gain, -RATE_TOL);
                    }
                }
                for j in 0..eff.users() {
                    let full = bob_rate_with(j, &eff, &prof, &tol, BobTerms::default())?;
                    if sol.noise_mapping == NoiseMapping::ChannelNull {
                        let no_noise = bob_rate_with(j, &eff, &prof, &tol, BobTerms { cci: true, noise: false })?;
                        tally.at_most("channel-null noise invisible in Bob rates", (full - no_noise).abs(), RATE_TOL);
                    }
                    if scheme == Scheme::Bd {
                        let no_cci = bob_rate_with(j, &eff, &prof, &tol, BobTerms { cci: false, noise: true })?;
                        tally.at_most("BD cross-user terms absent from Bob rates", (full - no_cci).abs(), RATE_TOL);
                    }
                    for k in 0..eff.eves() {
                        let r: Vec<f64> = [1e-2, 1e-4, 1e-6]
                            .iter()
                            .map(|&e| eve_rate_eff(j, k, &eff, &prof, e, &tol))
                            .collect::<Result<_>>()?;
                        tally.at_least("Eve rate non-increasing in eps", (r[1] - r[0]).min(r[2] - r[1]), -RATE_TOL);
                    }
                }
            }
            if scheme == Scheme::Isdf2 {
                let leak = c.bobs.iter().map(|h| max_abs(&(h * &sol.noise_precoder))).fold(0.0, f64::max);
                tally.at_least("ISDF2 noise reaches Bobs", leak, tol.orth_tol);
            }
            if scheme == Scheme::Isdf1 && c.eves.len() > 1 {
                let merged = collude(&c);
                let eff_joint = EffectiveChannels::new(&merged, &sol);
                let prof = uniform_profile(sc.power, 0.5, &sol.streams(), sol.noise_dim)?;
                for j in 0..eff.users() {
                    let joint = eve_rate_eff(j, 0, &eff_joint, &prof, sc.eve_noise_eps, &tol)?;
                    for k in 0..eff.eves() {
                        let single = eve_rate_eff(j, k, &eff, &prof, sc.eve_noise_eps, &tol)?;
                        tally.at_least("colluding Eve rate dominance", joint - single, -RATE_TOL);
                    }
                }
            }
            if scheme == Scheme::Isdf1 {
                if let Ok(bd) = std::panic::catch_unwind(|| sdf_report(&sc, &c, Scheme::Bd, &sol.order)) {
                    let mut earlier = 0;
                    let total: usize = sc.bob_antennas.iter().sum();
                    for &j in &sol.order {
                        if earlier <= total - sc.bob_antennas[j] {
                            tally.at_least(
                                "SDF(ISDF) - SDF(BD) where the dimension bound applies",
                                sol.sdf[j] as f64 - bd[j] as f64,
                                0.0,
                            );
                        }
                        earlier += sc.streams[j];
                    }
                }
            }
        }
    }
    // Water-filling KKT on random instances.
    let mut rng = ChaCha20Rng::seed_from_u64(s.seed);
    for _ in 0..draws.max(1) * 10 {
        let n = rng.random_range(1..=8);
        let gains: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..10.0)).collect();
        let budget = rng.random_range(0.01..20.0);
        let p = waterfill(&gains, budget)?;
        let level = water_level(&gains, budget);
        tally.at_most("water-filling budget binds", (p.iter().sum::<f64>() - budget).abs() / budget, RATE_TOL);
        for (pn, g) in p.iter().zip(&gains) {
            let kkt = if *pn > 0.0 { (pn + 1.0 / g - level).abs() } else { (level - 1.0 / g).max(0.0) };
            tally.at_most("water-filling KKT", kkt, RATE_TOL * level.max(1.0));
        }
    }
    Ok(tally.checks)
}
