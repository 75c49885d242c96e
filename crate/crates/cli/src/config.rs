//! TOML run configuration. Every key is optional; omitted keys take the
//! defaults of the reference system (N = 128, L = 8, 1 MHz at 2 MHz).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clipofdm::fir;
use clipofdm::harness::{ExperimentSpec, ThresholdGrid};
use clipofdm::{ModScheme, OfdmParams};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Papr,
    Ber,
    Both,
}

impl Kind {
    pub fn runs_papr(self) -> bool {
        matches!(self, Kind::Papr | Kind::Both)
    }

    pub fn runs_ber(self) -> bool {
        matches!(self, Kind::Ber | Kind::Both)
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Missing { path: PathBuf, source: std::io::Error },
    Syntax { path: PathBuf, message: String },
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Missing { path, source } => write!(f, "cannot read config {}: {source}", path.display()),
            ConfigError::Syntax { path, message } => write!(f, "malformed config {}: {message}", path.display()),
            ConfigError::Invalid(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Option<Kind>,
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
    #[serde(default)]
    ofdm: RawOfdm,
    #[serde(default)]
    experiment: RawExperiment,
    #[serde(default)]
    hpf: RawHpf,
    #[serde(default)]
    lpf: RawLpf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOfdm {
    subcarriers: Option<usize>,
    oversample: Option<usize>,
    bandwidth_hz: Option<f64>,
    carrier_hz: Option<f64>,
    cp_len: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    schemes: Option<Vec<String>>,
    cr_values: Option<Vec<f64>>,
    ccdf_read_point: Option<f64>,
    n_symbols: Option<usize>,
    ebn0_db: Option<Vec<f64>>,
    bits_per_point: Option<usize>,
    count_cp_energy: Option<bool>,
    ccdf_start_db: Option<f64>,
    ccdf_step_db: Option<f64>,
    ccdf_points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHpf {
    num_taps: Option<usize>,
    stop_edge: Option<f64>,
    pass_edge: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLpf {
    num_taps: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kind: Kind,
    pub output_dir: PathBuf,
    pub spec: ExperimentSpec,
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Missing {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text).map_err(|e| match e {
        ConfigError::Syntax { message, .. } => ConfigError::Syntax {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax {
        path: PathBuf::new(),
        message: e.message().to_string(),
    })?;
    build(raw)
}

impl Default for RunConfig {
    fn default() -> Self {
        build(RawConfig::default()).expect("defaults are valid")
    }
}

fn build(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    let base = ExperimentSpec::default();
    let t1 = base.params;
    let o = raw.ofdm;
    let oversample = o.oversample.unwrap_or(t1.oversample());
    let bandwidth_hz = o.bandwidth_hz.unwrap_or(t1.bandwidth_hz());
    // default carrier sits at fs/4, which is 2 MHz for the reference system
    let carrier_hz = o.carrier_hz.unwrap_or(bandwidth_hz * oversample as f64 / 4.0);
    let params = OfdmParams::new(
        o.subcarriers.unwrap_or(t1.n_subcarriers()),
        oversample,
        bandwidth_hz,
        carrier_hz,
        o.cp_len.unwrap_or(t1.cp_len()),
    )
    .map_err(|e| invalid(format!("[ofdm] {}", strip(&e))))?;

    let e = raw.experiment;
    let schemes = match e.schemes {
        Some(names) => names
            .iter()
            .map(|n| ModScheme::from_str(n).map_err(|err| invalid(format!("experiment.schemes: {}", strip(&err)))))
            .collect::<Result<Vec<_>, _>>()?,
        None => base.schemes.clone(),
    };

    let h = raw.hpf;
    let hpf_taps = h.num_taps.unwrap_or(fir::DEFAULT_HPF_TAPS);
    let hpf = fir::default_hpf_spec(&params, hpf_taps)
        .and_then(|d| match (h.stop_edge, h.pass_edge) {
            (None, None) => Ok(d),
            (stop, pass) => fir::hpf_spec(stop.unwrap_or(d.bands[0].hi), pass.unwrap_or(d.bands[1].lo), hpf_taps),
        })
        .map_err(|e| invalid(format!("[hpf] {}", strip(&e))))?;

    let spec = ExperimentSpec {
        params,
        schemes,
        cr_values: e.cr_values.unwrap_or(base.cr_values.clone()),
        ccdf_read_point: e.ccdf_read_point.unwrap_or(base.ccdf_read_point),
        ccdf_grid: ThresholdGrid {
            start_db: e.ccdf_start_db.unwrap_or(base.ccdf_grid.start_db),
            step_db: e.ccdf_step_db.unwrap_or(base.ccdf_grid.step_db),
            count: e.ccdf_points.unwrap_or(base.ccdf_grid.count),
        },
        n_symbols: e.n_symbols.unwrap_or(base.n_symbols),
        ebn0_grid: e.ebn0_db.unwrap_or(base.ebn0_grid.clone()),
        bits_per_point: e.bits_per_point.unwrap_or(base.bits_per_point),
        seed: raw.seed.unwrap_or(base.seed),
        hpf,
        lpf_taps: raw.lpf.num_taps.unwrap_or(base.lpf_taps),
        count_cp_energy: e.count_cp_energy.unwrap_or(base.count_cp_energy),
    };
    validate_spec(&spec)?;

    let output_dir = raw.output_dir.unwrap_or_else(|| PathBuf::from("results"));
    check_output_dir(&output_dir)?;
    Ok(RunConfig {
        kind: raw.kind.unwrap_or(Kind::Both),
        output_dir,
        spec,
    })
}

/// Validation whose messages name the offending key.
pub fn validate_spec(spec: &ExperimentSpec) -> Result<(), ConfigError> {
    spec.validate().map_err(|e| invalid(strip(&e)))
}

pub fn check_output_dir(dir: &Path) -> Result<(), ConfigError> {
    if dir.exists() && !dir.is_dir() {
        return Err(invalid(format!("output_dir {} exists and is not a directory", dir.display())));
    }
    Ok(())
}

fn strip(e: &clipofdm::Error) -> String {
    match e.root() {
        clipofdm::Error::Config(msg) => msg.clone(),
        other => other.to_string(),
    }
}
