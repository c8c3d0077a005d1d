//! Experiment description shared by every stage of the pipeline.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matcore::Tolerances;

/// Precoding scheme. Declaration order is the reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Sequential precoder-null-space design, noise in the null space of the stacked channels.
    Isdf1,
    /// Sequential precoder-null-space design, noise in the null space of the stacked precoders.
    Isdf2,
    /// Block diagonalization.
    Bd,
    /// Zero-forcing on dominant-mode effective rows.
    Zf,
    /// Per-user dominant right singular vectors.
    Svd,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::Isdf1, Scheme::Isdf2, Scheme::Bd, Scheme::Zf, Scheme::Svd];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Isdf1 => "ISDF1",
            Scheme::Isdf2 => "ISDF2",
            Scheme::Bd => "BD",
            Scheme::Zf => "ZF",
            Scheme::Svd => "SVD",
        }
    }

    pub fn is_isdf(self) -> bool {
        matches!(self, Scheme::Isdf1 | Scheme::Isdf2)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown scheme `{s}`")))
    }
}

/// Precoding priority order of the users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UserOrdering {
    AsGiven,
    FewestAntennasFirst,
    MostAntennasFirst,
    Random,
}

impl UserOrdering {
    pub const ALL: [UserOrdering; 4] = [
        UserOrdering::AsGiven,
        UserOrdering::FewestAntennasFirst,
        UserOrdering::MostAntennasFirst,
        UserOrdering::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UserOrdering::AsGiven => "as-given",
            UserOrdering::FewestAntennasFirst => "fewest-antennas-first",
            UserOrdering::MostAntennasFirst => "most-antennas-first",
            UserOrdering::Random => "random",
        }
    }
}

impl fmt::Display for UserOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UserOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        UserOrdering::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown ordering `{s}`")))
    }
}

/// Quantity maximized by the information/noise power-ratio search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Asr,
    Ssr,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::Asr => "asr",
            Objective::Ssr => "ssr",
        }
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asr" => Ok(Objective::Asr),
            "ssr" => Ok(Objective::Ssr),
            _ => Err(Error::Domain(format!("unknown objective `{s}`"))),
        }
    }
}

/// How the information power ratio `phi` (total share of power given to the
/// users' messages) is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum PowerMode {
    FixedRatio(f64),
    GridSearch { grid: Vec<f64>, objective: Objective },
}

impl PowerMode {
    /// 0.05, 0.10, ..., 0.95.
    pub fn default_grid() -> Vec<f64> {
        (1..=19).map(|i| i as f64 * 0.05).collect()
    }

    pub fn grid_search(objective: Objective) -> Self {
        PowerMode::GridSearch {
            grid: Self::default_grid(),
            objective,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Allocation {
    Uniform,
    WaterFilling,
}

impl Allocation {
    pub fn name(self) -> &'static str {
        match self {
            Allocation::Uniform => "uniform",
            Allocation::WaterFilling => "water-filling",
        }
    }
}

impl FromStr for Allocation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Allocation::Uniform),
            "water-filling" => Ok(Allocation::WaterFilling),
            _ => Err(Error::Domain(format!("unknown allocation `{s}`"))),
        }
    }
}

/// Full description of one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Transmit antennas at Alice.
    pub n_tx: usize,
    /// Antennas per legitimate user.
    pub bob_antennas: Vec<usize>,
    /// Antennas per eavesdropper, before any collusion.
    pub eve_antennas: Vec<usize>,
    /// Data streams per legitimate user.
    pub streams: Vec<usize>,
    /// Total transmit power; Bob noise is unit-variance so this is also the SNR.
    pub power: f64,
    /// Eavesdropper noise variance.
    pub eve_noise_eps: f64,
    pub colluding: bool,
    pub scheme: Scheme,
    pub ordering: UserOrdering,
    pub power_mode: PowerMode,
    pub allocation: Allocation,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            n_tx: 10,
            bob_antennas: vec![3, 3, 3],
            eve_antennas: vec![4, 4],
            streams: vec![1, 1, 1],
            power: 100.0,
            eve_noise_eps: 1e-6,
            colluding: false,
            scheme: Scheme::Isdf1,
            ordering: UserOrdering::AsGiven,
            power_mode: PowerMode::FixedRatio(0.5),
            allocation: Allocation::Uniform,
            trials: 200,
            seed: 42,
            tolerances: Tolerances::default(),
        }
    }
}

impl Scenario {
    pub fn users(&self) -> usize {
        self.bob_antennas.len()
    }

    /// Checks the scheme-independent invariants. Antenna-budget constraints
    /// that depend on the scheme are reported by the precoder builders.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.n_tx == 0 {
            return bad("n_tx must be at least 1".into());
        }
        if self.bob_antennas.is_empty() {
            return bad("at least one legitimate user is required".into());
        }
        if self.eve_antennas.is_empty() {
            return bad("at least one eavesdropper is required".into());
        }
        if self.streams.len() != self.bob_antennas.len() {
            return bad(format!(
                "streams has {} entries but there are {} users",
                self.streams.len(),
                self.bob_antennas.len()
            ));
        }
        if self.eve_antennas.contains(&0) {
            return bad("every eavesdropper needs at least one antenna".into());
        }
        for (j, (&d, &nb)) in self.streams.iter().zip(&self.bob_antennas).enumerate() {
            if d < 1 || d > nb {
                return bad(format!("user {j}: need 1 <= d_j <= N_Bj, got d_j={d}, N_Bj={nb}"));
            }
        }
        if !(self.power.is_finite() && self.power > 0.0) {
            return bad(format!("power must be > 0, got {}", self.power));
        }
        if !(self.eve_noise_eps.is_finite() && self.eve_noise_eps > 0.0) {
            return bad(format!("eve_noise_eps must be > 0, got {}", self.eve_noise_eps));
        }
        if self.trials < 1 {
            return bad("trials must be at least 1".into());
        }
        match &self.power_mode {
            PowerMode::FixedRatio(phi) => check_phi(*phi)?,
            PowerMode::GridSearch { grid, .. } => {
                if grid.is_empty() {
                    return bad("power-ratio grid is empty".into());
                }
                grid.iter().try_for_each(|&p| check_phi(p))?;
            }
        }
        if self.allocation == Allocation::WaterFilling && self.scheme != Scheme::Isdf1 {
            return bad("water-filling is defined for ISDF1 only".into());
        }
        self.tolerances.validate()
    }
}

pub(crate) fn check_phi(phi: f64) -> Result<()> {
    if phi > 0.0 && phi < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("information power ratio must lie in (0,1), got {phi}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enum_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        for o in UserOrdering::ALL {
            assert_eq!(o.name().parse::<UserOrdering>().unwrap(), o);
        }
        assert!("mmse".parse::<Scheme>().is_err());
    }

    #[test]
    fn default_grid_spans_interior() {
        let g = PowerMode::default_grid();
        assert_eq!(g.len(), 19);
        assert!((g[0] - 0.05).abs() < 1e-15 && (g[18] - 0.95).abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_bad_streams() {
        let s = Scenario {
            streams: vec![1, 4, 1],
            ..Scenario::default()
        };
        assert!(matches!(s.validate(), Err(Error::InvalidScenario(_))));
        assert!(Scenario::default().validate().is_ok());
    }

    #[test]
    fn validation_rejects_bad_phi_and_power() {
        let s = Scenario {
            power_mode: PowerMode::FixedRatio(1.0),
            ..Scenario::default()
        };
        assert!(s.validate().is_err());
        let s = Scenario {
            power: 0.0,
            ..Scenario::default()
        };
        assert!(s.validate().is_err());
        let s = Scenario {
            trials: 0,
            ..Scenario::default()
        };
        assert!(s.validate().is_err());
    }
}
