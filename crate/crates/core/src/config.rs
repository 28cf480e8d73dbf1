//! Run configuration file.
//!
//! A TOML document with four sections, `[scene]`, `[params]`, `[grid]` and
//! `[run]`. Lengths are meters, powers dBm, gains dBi, frequencies Hz. The
//! logarithmic values are converted to linear units on load. Unknown keys
//! are rejected. See `configs/schema.md` for the full key list.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::geometry::Vec3;
use crate::optimizer::{Init, Mode, Objective, OptimizerSettings, SECRECY_ORACLE_CAP};
use crate::scene::{Scene, SceneSpec, SystemParams};
use crate::signal::SymbolKind;
use crate::sweep::{evenly_spaced, SweepGrid};
use crate::units::{db_to_linear, dbm_to_watts};

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io { path: PathBuf, message: String },
    Parse { message: String },
    MissingKey { key: String },
    UnknownKey { key: String },
    Invalid { key: String, message: String },
}

impl ConfigError {
    /// Stable identifier printed alongside the message.
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::Io { .. } => "E_CONFIG_IO",
            ConfigError::Parse { .. } => "E_CONFIG_PARSE",
            ConfigError::MissingKey { .. } => "E_CONFIG_MISSING_KEY",
            ConfigError::UnknownKey { .. } => "E_CONFIG_UNKNOWN_KEY",
            ConfigError::Invalid { .. } => "E_CONFIG_INVALID",
        }
    }

    fn invalid(key: &str, message: impl fmt::Display) -> Self {
        ConfigError::Invalid { key: key.to_string(), message: message.to_string() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] ", self.code())?;
        match self {
            ConfigError::Io { path, message } => write!(f, "cannot read {}: {message}", path.display()),
            ConfigError::Parse { message } => write!(f, "parse error: {message}"),
            ConfigError::MissingKey { key } => write!(f, "missing key `{key}`"),
            ConfigError::UnknownKey { key } => write!(f, "unknown key `{key}`"),
            ConfigError::Invalid { key, message } => write!(f, "invalid `{key}`: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Either an explicit list or an inclusive `{ start, stop, step }` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis<T> {
    List(Vec<T>),
    Range { start: T, stop: T, step: T },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSection {
    pub cs_tx_pos: [f64; 3],
    pub an_tx_pos: [f64; 3],
    pub ris_center: [f64; 3],
    pub ris_rows: usize,
    pub ris_cols: usize,
    pub element_spacing_row: f64,
    pub element_spacing_col: f64,
    pub bob_pos: [f64; 3],
    pub eve_pos: [f64; 3],
    #[serde(default = "default_normal")]
    pub ris_normal: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_order: Option<Vec<usize>>,
}

fn default_normal() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub carrier_freq_hz: f64,
    pub sample_rate_hz: f64,
    pub total_power_dbm: f64,
    pub tx_antenna_gain_dbi: f64,
    pub noise_power_bob_dbm: f64,
    pub noise_power_eve_dbm: f64,
    #[serde(default = "default_cosine_exponent")]
    pub cosine_exponent: f64,
}

fn default_cosine_exponent() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub alpha: Axis<f64>,
    pub k_bob: Axis<usize>,
    #[serde(default = "default_mode")]
    pub optimizer_mode: Mode,
    #[serde(default = "default_max_passes")]
    pub max_passes: usize,
    #[serde(default = "default_objective")]
    pub objective: Objective,
    #[serde(default = "default_init")]
    pub init: Init,
    #[serde(default)]
    pub seed: u64,
}

fn default_mode() -> Mode {
    OptimizerSettings::default().mode
}

fn default_max_passes() -> usize {
    OptimizerSettings::default().max_passes
}

fn default_objective() -> Objective {
    OptimizerSettings::default().objective
}

fn default_init() -> Init {
    OptimizerSettings::default().init
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown output format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_output_path")]
    pub output_path: PathBuf,
    #[serde(default = "default_output_format")]
    pub output_format: OutputFormat,
    #[serde(default)]
    pub oracle_enabled: bool,
    #[serde(default = "default_oracle_cap")]
    pub oracle_n_cap: usize,
    #[serde(default = "default_baseline_seeds")]
    pub baseline_seeds: usize,
    #[serde(default)]
    pub symbols: SymbolKind,
}

fn default_output_path() -> PathBuf {
    PathBuf::from("sweep.csv")
}

fn default_output_format() -> OutputFormat {
    OutputFormat::Csv
}

fn default_oracle_cap() -> usize {
    SECRECY_ORACLE_CAP
}

fn default_baseline_seeds() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scene: SceneSection,
    pub params: ParamsSection,
    pub grid: GridSection,
    pub run: RunSection,
}

const SECTIONS: &[(&str, &[&str], &[&str])] = &[
    (
        "scene",
        &[
            "cs_tx_pos",
            "an_tx_pos",
            "ris_center",
            "ris_rows",
            "ris_cols",
            "element_spacing_row",
            "element_spacing_col",
            "bob_pos",
            "eve_pos",
        ],
        &["ris_normal", "element_order"],
    ),
    (
        "params",
        &[
            "carrier_freq_hz",
            "sample_rate_hz",
            "total_power_dbm",
            "tx_antenna_gain_dbi",
            "noise_power_bob_dbm",
            "noise_power_eve_dbm",
        ],
        &["cosine_exponent"],
    ),
    ("grid", &["alpha", "k_bob"], &["optimizer_mode", "max_passes", "objective", "init", "seed"]),
    ("run", &[], &["output_path", "output_format", "oracle_enabled", "oracle_n_cap", "baseline_seeds", "symbols"]),
];

/// Fully validated configuration with linear-unit parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scene: Scene,
    pub params: SystemParams,
    pub grid: SweepGrid,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
    pub oracle_enabled: bool,
    pub oracle_n_cap: usize,
    pub symbols: SymbolKind,
    source: ConfigFile,
}

impl RunConfig {
    pub fn baseline_seeds(&self) -> usize {
        self.grid.baseline_seeds
    }

    /// The file-level representation this config was built from.
    pub fn file(&self) -> &ConfigFile {
        &self.source
    }

    /// Canonical TOML text; loading it yields an equal `RunConfig`.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.source).expect("config serializes")
    }

    /// First 16 hex digits of the SHA-256 of the canonical TOML, with the
    /// output target left out so that only the computation is identified.
    pub fn config_hash(&self) -> String {
        let mut source = self.source.clone();
        source.run.output_path = default_output_path();
        source.run.output_format = default_output_format();
        let digest = Sha256::digest(toml::to_string(&source).expect("config serializes").as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut source = self.source.clone();
        source.grid.seed = seed;
        from_file(source).expect("seed does not affect validity")
    }

    pub fn with_output(&self, path: PathBuf, format: OutputFormat) -> Self {
        let mut source = self.source.clone();
        source.run.output_path = path;
        source.run.output_format = format;
        from_file(source).expect("output target does not affect validity")
    }
}

fn check_keys(table: &toml::Table) -> Result<(), ConfigError> {
    for key in table.keys() {
        if !SECTIONS.iter().any(|(s, _, _)| s == key) {
            return Err(ConfigError::UnknownKey { key: key.clone() });
        }
    }
    for (section, required, optional) in SECTIONS {
        let Some(value) = table.get(*section) else {
            if required.is_empty() {
                continue;
            }
            return Err(ConfigError::MissingKey { key: (*section).to_string() });
        };
        let Some(inner) = value.as_table() else {
            return Err(ConfigError::invalid(section, "must be a table"));
        };
        for key in inner.keys() {
            if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey { key: format!("{section}.{key}") });
            }
        }
        for key in *required {
            if !inner.contains_key(*key) {
                return Err(ConfigError::MissingKey { key: format!("{section}.{key}") });
            }
        }
    }
    Ok(())
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse { message: e.to_string() })?;
    check_keys(&table)?;
    table.entry("run").or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let file = ConfigFile::deserialize(toml::Value::Table(table)).map_err(|e| ConfigError::Parse { message: e.to_string() })?;
    from_file(file)
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    parse_config(&text)
}

fn alpha_values(axis: &Axis<f64>) -> Result<Vec<f64>, ConfigError> {
    match axis {
        Axis::List(v) => Ok(v.clone()),
        Axis::Range { start, stop, step } => {
            if !(*step > 0.0) || !(stop >= start) {
                return Err(ConfigError::invalid("grid.alpha", "range needs step > 0 and stop >= start"));
            }
            let intervals = ((stop - start) / step).round();
            if ((start + intervals * step) - stop).abs() > 1e-9 {
                return Err(ConfigError::invalid("grid.alpha", "stop is not reachable from start in whole steps"));
            }
            Ok(evenly_spaced(*start, *stop, intervals as usize + 1))
        }
    }
}

fn k_bob_values(axis: &Axis<usize>) -> Result<Vec<usize>, ConfigError> {
    match axis {
        Axis::List(v) => Ok(v.clone()),
        Axis::Range { start, stop, step } => {
            if *step == 0 || stop < start {
                return Err(ConfigError::invalid("grid.k_bob", "range needs step > 0 and stop >= start"));
            }
            Ok((*start..=*stop).step_by(*step).collect())
        }
    }
}

fn from_file(file: ConfigFile) -> Result<RunConfig, ConfigError> {
    let s = &file.scene;
    let scene = Scene::new(SceneSpec {
        cs_tx_pos: Vec3::from(s.cs_tx_pos),
        an_tx_pos: Vec3::from(s.an_tx_pos),
        ris_center: Vec3::from(s.ris_center),
        ris_rows: s.ris_rows,
        ris_cols: s.ris_cols,
        element_spacing_row: s.element_spacing_row,
        element_spacing_col: s.element_spacing_col,
        bob_pos: Vec3::from(s.bob_pos),
        eve_pos: Vec3::from(s.eve_pos),
        ris_normal: Vec3::from(s.ris_normal),
        element_order: s.element_order.clone(),
    })
    .map_err(|e| ConfigError::invalid("scene", e))?;

    let p = &file.params;
    let params = SystemParams::new(
        p.carrier_freq_hz,
        dbm_to_watts(p.total_power_dbm),
        db_to_linear(p.tx_antenna_gain_dbi),
        dbm_to_watts(p.noise_power_bob_dbm),
        dbm_to_watts(p.noise_power_eve_dbm),
        p.cosine_exponent,
        p.sample_rate_hz,
    )
    .map_err(|e| match e {
        crate::Error::InvalidParameter { name, reason } => ConfigError::invalid(&format!("params.{name}"), reason),
        other => ConfigError::invalid("params", other),
    })?;

    let g = &file.grid;
    let grid = SweepGrid {
        alpha_values: alpha_values(&g.alpha)?,
        k_bob_values: k_bob_values(&g.k_bob)?,
        optimizer: OptimizerSettings { mode: g.optimizer_mode, max_passes: g.max_passes, objective: g.objective, init: g.init },
        seed: g.seed,
        baseline_seeds: file.run.baseline_seeds,
    };
    grid.validate(scene.num_elements()).map_err(|e| match e {
        crate::Error::KBobOutOfRange { .. } => ConfigError::invalid("grid.k_bob", e),
        crate::Error::InvalidParameter { name, reason } => ConfigError::invalid(&format!("grid.{name}"), reason),
        other => ConfigError::invalid("grid", other),
    })?;

    let r = &file.run;
    if r.oracle_enabled {
        if r.oracle_n_cap > SECRECY_ORACLE_CAP {
            return Err(ConfigError::invalid(
                "run.oracle_n_cap",
                format!("{} exceeds the hard limit {SECRECY_ORACLE_CAP}", r.oracle_n_cap),
            ));
        }
        if scene.num_elements() > r.oracle_n_cap {
            return Err(ConfigError::invalid(
                "run.oracle_enabled",
                format!("oracle cap exceeded: N = {} > oracle_n_cap = {}", scene.num_elements(), r.oracle_n_cap),
            ));
        }
    }
    Ok(RunConfig {
        scene,
        params,
        grid,
        output_path: r.output_path.clone(),
        output_format: r.output_format,
        oracle_enabled: r.oracle_enabled,
        oracle_n_cap: r.oracle_n_cap,
        symbols: r.symbols,
        source: file,
    })
}
