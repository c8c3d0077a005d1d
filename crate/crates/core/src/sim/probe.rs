//! Build-cost measurement per scheme.

use std::time::{Duration, Instant};

use crate::channel::draw_effective_channels;
use crate::precoding::{build_bd, build_isdf, build_svd, build_zf, order_users, PrecoderSet};
use crate::scenario::{Scenario, Scheme};

#[derive(Debug, Clone, PartialEq)]
pub struct CostEntry {
    pub scheme: Scheme,
    /// Sum over precoding-selection decompositions of (smaller dimension)^3,
    /// as measured from the matrices actually decomposed.
    pub proxy: Option<u64>,
    /// The same quantity predicted from antenna and stream counts.
    pub formula_proxy: Option<u64>,
    /// Total time spent building information precoders over all trials.
    pub build_time: Duration,
    pub trials: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostProbe {
    pub entries: Vec<CostEntry>,
}

impl CostProbe {
    pub fn entry(&self, scheme: Scheme) -> &CostEntry {
        self.entries.iter().find(|e| e.scheme == scheme).expect("every scheme is probed")
    }
}

fn formula(s: &Scenario, scheme: Scheme, order: &[usize]) -> Option<u64> {
    let cube = |x: usize| (x.min(s.n_tx) as u64).pow(3);
    match scheme {
        Scheme::Isdf1 | Scheme::Isdf2 => {
            let mut used = 0;
            let mut total = 0;
            for &j in order {
                total += cube(used);
                used += s.streams[j];
            }
            Some(total)
        }
        Scheme::Bd => {
            let all: usize = s.bob_antennas.iter().sum();
            Some(s.bob_antennas.iter().map(|&nb| cube(all - nb)).sum())
        }
        Scheme::Zf => Some(cube(s.users())),
        Scheme::Svd => Some(0),
    }
}

/// Builds every scheme's information precoders over the scenario's trials,
/// tallying decomposition sizes and wall time.
pub fn cost_probe(s: &Scenario) -> CostProbe {
    let entries = Scheme::ALL
        .into_iter()
        .map(|scheme| {
            let mut proxy = None;
            let mut build_time = Duration::ZERO;
            let mut error = None;
            for t in 0..s.trials {
                let c = draw_effective_channels(s, t);
                let order = order_users(s, t);
                let started = Instant::now();
                let built: crate::error::Result<PrecoderSet> = match scheme {
                    Scheme::Isdf1 | Scheme::Isdf2 => build_isdf(s, &c, &order),
                    Scheme::Bd => build_bd(s, &c),
                    Scheme::Zf => build_zf(s, &c),
                    Scheme::Svd => build_svd(s, &c),
                };
                build_time += started.elapsed();
                match built {
                    Ok(set) => {
                        let p = set.cost_proxy();
                        proxy = Some(proxy.map_or(p, |q: u64| q.max(p)));
                    }
                    Err(e) => {
                        error = Some(e.to_string());
                        proxy = None;
                        break;
                    }
                }
            }
            CostEntry {
                scheme,
                proxy,
                formula_proxy: formula(s, scheme, &order_users(s, 0)),
                build_time,
                trials: s.trials,
                error,
            }
        })
        .collect();
    CostProbe { entries }
}
