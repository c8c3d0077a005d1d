//! Scenario presets reproducing each figure's setting.
//!
//! A preset is a base [`Scenario`] plus a list of series, each a small set
//! of changes applied to the base. Callers may override base fields (trial
//! count, seed, ...) before expanding the series.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scenario::{Allocation, Objective, PowerMode, Scenario, Scheme, UserOrdering};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::Fig2 => "secrecy sum rate, five schemes, J=3 K=2 d=1 N_A=10 N_B=3 N_E=4",
            Preset::Fig3 => "absolute secrecy rate, five schemes, J=3 K=2 d=1 N_A=10 N_B=3 N_E=4",
            Preset::Fig4 => "selected information power ratio, five schemes, same setting as fig3",
            Preset::Fig5 => "ISDF1 absolute secrecy rate, colluding (K=1) vs non-colluding (K=2) Eves",
            Preset::Fig6 => "ISDF1 selected information power ratio, colluding vs non-colluding Eves",
            Preset::Fig7 => "ISDF1 user ordering, N_B=(1,2,3) N_E=4 N_A=10",
            Preset::Fig8 => "ISDF1 uniform vs water-filling, N_B=d_j in {2,3} (reconstructed)",
        }
    }

    /// Settings not fixed by the figure and chosen here.
    pub fn notes(self) -> Vec<String> {
        match self {
            Preset::Fig8 => vec![
                "fig8 stream counts reconstructed: d_j = N_B with N_B in {2, 3}".to_string(),
            ],
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown preset `{s}`")))
    }
}

/// A labelled scenario evaluated as one curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub scenario: Scenario,
}

/// Eavesdropper noise variance used by every preset.
pub const PRESET_EVE_NOISE: f64 = 1e-6;

/// Base scenario of a preset.
pub fn preset(p: Preset) -> Scenario {
    let objective = match p {
        Preset::Fig2 => Objective::Ssr,
        _ => Objective::Asr,
    };
    let base = Scenario {
        n_tx: 10,
        bob_antennas: vec![3, 3, 3],
        eve_antennas: vec![4, 4],
        streams: vec![1, 1, 1],
        power: 100.0,
        eve_noise_eps: PRESET_EVE_NOISE,
        colluding: false,
        scheme: Scheme::Isdf1,
        ordering: UserOrdering::AsGiven,
        power_mode: PowerMode::grid_search(objective),
        allocation: Allocation::Uniform,
        trials: 1000,
        seed: 42,
        ..Scenario::default()
    };
    match p {
        Preset::Fig2 | Preset::Fig3 | Preset::Fig4 | Preset::Fig5 | Preset::Fig6 => base,
        Preset::Fig7 => Scenario {
            bob_antennas: vec![1, 2, 3],
            ordering: UserOrdering::FewestAntennasFirst,
            ..base
        },
        Preset::Fig8 => Scenario {
            bob_antennas: vec![3, 3, 3],
            streams: vec![3, 3, 3],
            ..base
        },
    }
}

/// Curves of a preset, derived from `base` (normally `preset(p)` with any
/// user overrides applied).
pub fn preset_series(p: Preset, base: &Scenario) -> Vec<Series> {
    let with = |label: String, f: &dyn Fn(&mut Scenario)| {
        let mut scenario = base.clone();
        f(&mut scenario);
        Series { label, scenario }
    };
    match p {
        Preset::Fig2 | Preset::Fig3 | Preset::Fig4 => Scheme::ALL
            .into_iter()
            .map(|scheme| with(scheme.name().to_string(), &|s| s.scheme = scheme))
            .collect(),
        Preset::Fig5 | Preset::Fig6 => [false, true]
            .into_iter()
            .map(|colluding| {
                let label = if colluding { "ISDF1/colluding" } else { "ISDF1/non-colluding" };
                with(label.to_string(), &|s| {
                    s.scheme = Scheme::Isdf1;
                    s.colluding = colluding;
                })
            })
            .collect(),
        Preset::Fig7 => [UserOrdering::FewestAntennasFirst, UserOrdering::MostAntennasFirst]
            .into_iter()
            .map(|ordering| {
                with(format!("ISDF1/{}", ordering.name()), &|s| {
                    s.scheme = Scheme::Isdf1;
                    s.ordering = ordering;
                })
            })
            .collect(),
        Preset::Fig8 => {
            let mut out = Vec::new();
            for nb in [2usize, 3] {
                for allocation in [Allocation::Uniform, Allocation::WaterFilling] {
                    out.push(with(format!("ISDF1/NB={nb}/{}", allocation.name()), &|s| {
                        s.scheme = Scheme::Isdf1;
                        s.allocation = allocation;
                        s.bob_antennas = vec![nb; 3];
                        s.streams = vec![nb; 3];
                    }));
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_parameters() {
        let f3 = preset(Preset::Fig3);
        assert_eq!(f3.n_tx, 10);
        assert_eq!(f3.streams, vec![1, 1, 1]);
        assert_eq!(f3.bob_antennas, vec![3, 3, 3]);
        assert_eq!(f3.eve_antennas, vec![4, 4]);
        assert_eq!(preset(Preset::Fig7).bob_antennas, vec![1, 2, 3]);
    }

    #[test]
    fn fig5_series_toggle_collusion() {
        let p = Preset::Fig5;
        let series = preset_series(p, &preset(p));
        assert_eq!(series.len(), 2);
        assert!(!series[0].scenario.colluding && series[1].scenario.colluding);
        let c = crate::channel::draw_effective_channels(&series[1].scenario, 0);
        assert_eq!(c.eves.len(), 1);
        assert_eq!(c.eves[0].nrows(), 8);
        let c = crate::channel::draw_effective_channels(&series[0].scenario, 0);
        assert_eq!(c.eves.len(), 2);
    }

    #[test]
    fn all_series_validate() {
        for p in Preset::ALL {
            for x in preset_series(p, &preset(p)) {
                x.scenario.validate().unwrap();
            }
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
    }
}
