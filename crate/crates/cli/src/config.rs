//! Run configuration: TOML file keys, `--set key=value` overrides, presets.
//!
//! Resolution order, later wins: built-in defaults, the preset's scenario,
//! keys from the config file, keys from `--set`. The resolved configuration
//! serializes back to a complete file that reproduces the run.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use secrecy_core::sim::{build_geometry, preset, preset_series, Preset, Series};
use secrecy_core::{Objective, PowerMode, Scenario, Tolerances};

/// Every accepted key. Absent keys keep the value resolved so far.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigKeys {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub output_dir: Option<PathBuf>,
    pub formats: Option<Vec<String>>,
    pub start_db: Option<f64>,
    pub stop_db: Option<f64>,
    pub step_db: Option<f64>,
    pub n_tx: Option<i64>,
    pub bob_antennas: Option<Vec<i64>>,
    pub eve_antennas: Option<Vec<i64>>,
    pub streams: Option<Vec<i64>>,
    pub power: Option<f64>,
    pub eve_noise_eps: Option<f64>,
    pub colluding: Option<bool>,
    pub scheme: Option<String>,
    pub ordering: Option<String>,
    pub power_mode: Option<String>,
    pub phi: Option<f64>,
    pub phi_grid: Option<Vec<f64>>,
    pub objective: Option<String>,
    pub allocation: Option<String>,
    pub trials: Option<i64>,
    pub seed: Option<u64>,
    pub rank_rel_tol: Option<f64>,
    pub orth_tol: Option<f64>,
    pub psd_floor: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            _ => bail!("unknown output format `{s}` (expected csv or svg)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrGrid {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl Default for SnrGrid {
    fn default() -> Self {
        SnrGrid {
            start_db: 0.0,
            stop_db: 30.0,
            step_db: 5.0,
        }
    }
}

impl SnrGrid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop_db - self.start_db) / self.step_db + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start_db + i as f64 * self.step_db).collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.start_db.is_finite() && self.stop_db.is_finite() && self.step_db.is_finite()) {
            bail!("SNR grid bounds must be finite");
        }
        if self.start_db > self.stop_db {
            bail!("need start_db <= stop_db, got {} > {}", self.start_db, self.stop_db);
        }
        if self.step_db <= 0.0 {
            bail!("need step_db > 0, got {}", self.step_db);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub scenario: Scenario,
    pub output_dir: PathBuf,
    pub formats: Vec<Format>,
    pub snr: SnrGrid,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            preset: None,
            scenario: Scenario::default(),
            output_dir: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Svg],
            snr: SnrGrid::default(),
        }
    }
}

fn count(key: &str, v: i64) -> Result<usize> {
    usize::try_from(v).map_err(|_| anyhow!("{key} must be >= 0, got {v}"))
}

fn counts(key: &str, v: &[i64]) -> Result<Vec<usize>> {
    v.iter().map(|&x| count(key, x)).collect()
}

fn parse_enum<T>(key: &str, v: &str) -> Result<T>
where
    T: std::str::FromStr<Err = secrecy_core::Error>,
{
    v.parse().with_context(|| format!("invalid value for `{key}`"))
}

impl RunConfig {
    /// Applies `keys` over `self`. A `preset` key resets the scenario to the
    /// preset's before the remaining keys are applied.
    pub fn apply(&mut self, keys: &ConfigKeys) -> Result<()> {
        if let Some(p) = &keys.preset {
            let p: Preset = parse_enum("preset", p)?;
            self.preset = Some(p);
            self.scenario = preset(p);
        }
        let s = &mut self.scenario;
        if let Some(v) = &keys.output_dir {
            self.output_dir = v.clone();
        }
        if let Some(v) = &keys.formats {
            self.formats = v.iter().map(|f| Format::parse(f)).collect::<Result<_>>()?;
        }
        if let Some(v) = keys.start_db {
            self.snr.start_db = v;
        }
        if let Some(v) = keys.stop_db {
            self.snr.stop_db = v;
        }
        if let Some(v) = keys.step_db {
            self.snr.step_db = v;
        }
        if let Some(v) = keys.n_tx {
            s.n_tx = count("n_tx", v)?;
        }
        if let Some(v) = &keys.bob_antennas {
            s.bob_antennas = counts("bob_antennas", v)?;
        }
        if let Some(v) = &keys.eve_antennas {
            s.eve_antennas = counts("eve_antennas", v)?;
        }
        if let Some(v) = &keys.streams {
            s.streams = counts("streams", v)?;
        }
        if let Some(v) = keys.power {
            s.power = v;
        }
        if let Some(v) = keys.eve_noise_eps {
            s.eve_noise_eps = v;
        }
        if let Some(v) = keys.colluding {
            s.colluding = v;
        }
        if let Some(v) = &keys.scheme {
            s.scheme = parse_enum("scheme", v)?;
        }
        if let Some(v) = &keys.ordering {
            s.ordering = parse_enum("ordering", v)?;
        }
        if let Some(v) = &keys.allocation {
            s.allocation = parse_enum("allocation", v)?;
        }
        if let Some(v) = keys.trials {
            if v < 1 {
                bail!("trials must be >= 1, got {v}");
            }
            s.trials = count("trials", v)?;
        }
        if let Some(v) = keys.seed {
            s.seed = v;
        }
        if let Some(v) = keys.rank_rel_tol {
            s.tolerances.rank_rel_tol = v;
        }
        if let Some(v) = keys.orth_tol {
            s.tolerances.orth_tol = v;
        }
        if let Some(v) = keys.psd_floor {
            s.tolerances.psd_floor = v;
        }
        self.apply_power_mode(keys)
    }

    fn apply_power_mode(&mut self, keys: &ConfigKeys) -> Result<()> {
        let (mut phi, mut grid, mut objective) = match &self.scenario.power_mode {
            PowerMode::FixedRatio(phi) => (*phi, PowerMode::default_grid(), Objective::Asr),
            PowerMode::GridSearch { grid, objective } => (DEFAULT_PHI, grid.clone(), *objective),
        };
        let mut fixed = matches!(self.scenario.power_mode, PowerMode::FixedRatio(_));
        if let Some(m) = &keys.power_mode {
            fixed = match m.as_str() {
                "fixed-ratio" => true,
                "grid-search" => false,
                _ => bail!("unknown power_mode `{m}` (expected fixed-ratio or grid-search)"),
            };
        }
        if let Some(v) = keys.phi {
            phi = v;
        }
        if let Some(v) = &keys.phi_grid {
            grid = v.clone();
        }
        if let Some(v) = &keys.objective {
            objective = parse_enum("objective", v)?;
        }
        self.scenario.power_mode = if fixed {
            PowerMode::FixedRatio(phi)
        } else {
            PowerMode::GridSearch { grid, objective }
        };
        Ok(())
    }

    /// Every key with its resolved value.
    pub fn to_keys(&self) -> ConfigKeys {
        let s = &self.scenario;
        let n = |v: &[usize]| Some(v.iter().map(|&x| x as i64).collect());
        let (power_mode, phi, phi_grid, objective) = match &s.power_mode {
            PowerMode::FixedRatio(phi) => ("fixed-ratio", *phi, PowerMode::default_grid(), Objective::Asr),
            PowerMode::GridSearch { grid, objective } => ("grid-search", DEFAULT_PHI, grid.clone(), *objective),
        };
        let Tolerances { rank_rel_tol, orth_tol, psd_floor } = s.tolerances;
        ConfigKeys {
            preset: self.preset.map(|p| p.name().to_string()),
            output_dir: Some(self.output_dir.clone()),
            formats: Some(self.formats.iter().map(|f| f.name().to_string()).collect()),
            start_db: Some(self.snr.start_db),
            stop_db: Some(self.snr.stop_db),
            step_db: Some(self.snr.step_db),
            n_tx: Some(s.n_tx as i64),
            bob_antennas: n(&s.bob_antennas),
            eve_antennas: n(&s.eve_antennas),
            streams: n(&s.streams),
            power: Some(s.power),
            eve_noise_eps: Some(s.eve_noise_eps),
            colluding: Some(s.colluding),
            scheme: Some(s.scheme.name().to_string()),
            ordering: Some(s.ordering.name().to_string()),
            power_mode: Some(power_mode.to_string()),
            phi: Some(phi),
            phi_grid: Some(phi_grid),
            objective: Some(objective.name().to_string()),
            allocation: Some(s.allocation.name().to_string()),
            trials: Some(s.trials as i64),
            seed: Some(s.seed),
            rank_rel_tol: Some(rank_rel_tol),
            orth_tol: Some(orth_tol),
            psd_floor: Some(psd_floor),
        }
    }

    /// TOML text of the resolved configuration. A preset is materialized
    /// into explicit keys, so the text re-resolves to the same scenario.
    pub fn resolved_toml(&self) -> String {
        let mut header = String::from("# resolved configuration; every key is explicit\n");
        if let Some(p) = self.preset {
            header.push_str(&format!("# series expanded from preset {p}: {}\n", p.description()));
        }
        header + &toml::to_string(&self.to_keys()).expect("config keys serialize")
    }

    /// Curves this run evaluates: the preset's series, or the scenario
    /// itself labelled by its scheme.
    pub fn series(&self) -> Vec<Series> {
        match self.preset {
            Some(p) => preset_series(p, &self.scenario),
            None => vec![Series {
                label: self.scenario.scheme.name().to_string(),
                scenario: self.scenario.clone(),
            }],
        }
    }

    /// Field invariants, then a trial-0 build of every series so antenna
    /// constraints are reported before any work starts.
    pub fn validate(&self) -> Result<()> {
        self.snr.validate()?;
        if self.formats.is_empty() {
            bail!("formats must list at least one of csv, svg");
        }
        for x in self.series() {
            x.scenario
                .validate()
                .and_then(|_| build_geometry(&x.scenario, 0).map(|_| ()))
                .with_context(|| format!("series `{}`", x.label))?;
        }
        Ok(())
    }
}

const DEFAULT_PHI: f64 = 0.5;

/// Parses `key=value`. The value is read as a TOML value; anything that is
/// not valid TOML is taken as a bare string (`scheme=BD`).
pub fn parse_assignment(s: &str) -> Result<(String, Value)> {
    let (key, raw) = s
        .split_once('=')
        .ok_or_else(|| anyhow!("expected key=value, got `{s}`"))?;
    let key = key.trim();
    if key.is_empty() {
        bail!("empty key in `{s}`");
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    Ok((key.to_string(), value))
}

fn keys_from_table(table: Table, origin: &str) -> Result<ConfigKeys> {
    Value::Table(table)
        .try_into()
        .with_context(|| format!("invalid configuration in {origin}"))
}

/// Sources of one configuration, lowest precedence first.
#[derive(Debug, Clone, Default)]
pub struct ConfigSources {
    pub file: Option<PathBuf>,
    pub preset: Option<String>,
    pub output_dir: Option<PathBuf>,
    pub assignments: Vec<String>,
}

pub fn read_keys_file(path: &Path) -> Result<ConfigKeys> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
    let table: Table = text
        .parse()
        .with_context(|| format!("malformed config file {}", path.display()))?;
    keys_from_table(table, &path.display().to_string())
}

/// Resolves and validates a configuration. `--preset` applies first, so
/// file and `--set` keys override the preset's values; a `preset` key in
/// the file takes the same place.
pub fn resolve(src: &ConfigSources) -> Result<RunConfig> {
    let file = src.file.as_deref().map(read_keys_file).transpose()?.unwrap_or_default();
    let mut flags = Table::new();
    for a in &src.assignments {
        let (k, v) = parse_assignment(a)?;
        flags.insert(k, v);
    }
    let flags = keys_from_table(flags, "--set arguments")?;
    let mut cfg = RunConfig::default();
    let preset_name = flags.preset.clone().or(src.preset.clone()).or(file.preset.clone());
    if let Some(p) = preset_name {
        cfg.apply(&ConfigKeys { preset: Some(p), ..ConfigKeys::default() })?;
    }
    cfg.apply(&ConfigKeys { preset: None, ..file })?;
    cfg.apply(&ConfigKeys { preset: None, ..flags })?;
    if let Some(dir) = &src.output_dir {
        cfg.output_dir = dir.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}
