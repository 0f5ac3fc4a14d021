//! Experiment configuration: one TOML file per run, versioned schema,
//! unknown keys rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use floq::hamiltonian::RampShape;
use floq::propagator::Method;
use floq::readout::circuit::SidebandChoice;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Xgate,
    QuasiphaseScan,
    ReadoutTwoBody,
    ReadoutCircuit,
    InitMap,
    SolverBench,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Xgate => "xgate",
            ExperimentKind::QuasiphaseScan => "quasiphase-scan",
            ExperimentKind::ReadoutTwoBody => "readout-two-body",
            ExperimentKind::ReadoutCircuit => "readout-circuit",
            ExperimentKind::InitMap => "init-map",
            ExperimentKind::SolverBench => "solver-bench",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct IntegratorSection {
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_substeps")]
    pub substeps_per_fastest_period: u32,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_method() -> Method {
    Method::Cf4Magnus
}
fn default_substeps() -> u32 {
    64
}
fn default_tolerance() -> f64 {
    1e-8
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            method: default_method(),
            substeps_per_fastest_period: default_substeps(),
            tolerance: default_tolerance(),
        }
    }
}

impl IntegratorSection {
    pub fn to_config(&self) -> floq::propagator::IntegratorConfig {
        floq::propagator::IntegratorConfig::default()
            .with_method(self.method)
            .with_substeps(self.substeps_per_fastest_period)
            .with_tolerance(self.tolerance)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct XgateSection {
    pub omega0_ghz: f64,
    pub eps_d1_ghz: f64,
    pub omega_d1_ghz: f64,
    pub eps_d2_ghz: f64,
    /// Second-drive frequency as a ratio ω_d2/ω_d1. Absent: extracted from
    /// a quasiphase scan with `auto-numerators`.
    pub omega_d2_over_omega_d1: Option<f64>,
    #[serde(default = "default_auto_numerators")]
    pub auto_numerators: Vec<u32>,
    #[serde(default = "default_ramp_ns")]
    pub ramp_ns: f64,
    /// Hold time; absent means calibrate for a π pulse.
    pub hold_ns: Option<f64>,
    #[serde(default = "default_ramp_shape")]
    pub ramp_shape: RampShape,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_auto_numerators() -> Vec<u32> {
    (1..=6).collect()
}
fn default_ramp_ns() -> f64 {
    20.0
}
fn default_ramp_shape() -> RampShape {
    RampShape::Tanh
}
fn default_samples() -> usize {
    400
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct QuasiphaseSection {
    pub omega0_ghz: f64,
    pub eps_d1_ghz: f64,
    pub omega_d1_ghz: f64,
    pub eps_d2_ghz: f64,
    pub numerators: Vec<u32>,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
    #[serde(default = "default_max_points")]
    pub max_points: usize,
}

fn default_window() -> [f64; 2] {
    [0.01, 0.2]
}
fn default_max_points() -> usize {
    200
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ReadoutTwoBodySection {
    pub omega0_ghz: f64,
    pub eps_d1_ghz: f64,
    pub omega_r_ghz: f64,
    pub g_mod_ghz: f64,
    pub kappa_ghz: f64,
    pub tilts: Vec<f64>,
    #[serde(default = "default_cavity_levels")]
    pub cavity_levels: usize,
    #[serde(default = "default_t_end_kappa")]
    pub t_end_over_inv_kappa: f64,
    #[serde(default = "default_traj_samples")]
    pub samples: usize,
    /// Dispersive-comparison χ/κ; D(∞) is matched to the longitudinal one.
    #[serde(default = "default_chi_over_kappa")]
    pub chi_over_kappa: f64,
    #[serde(default = "default_t_map")]
    pub t_map_ns: f64,
}

fn default_cavity_levels() -> usize {
    20
}
fn default_t_end_kappa() -> f64 {
    5.0
}
fn default_traj_samples() -> usize {
    100
}
fn default_chi_over_kappa() -> f64 {
    0.5
}
fn default_t_map() -> f64 {
    30.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ReadoutCircuitSection {
    pub omega_a_ghz: f64,
    pub omega_b_ghz: f64,
    pub omega_c_ghz: f64,
    /// Half-anharmonicities α/2 as listed in parameter tables.
    pub alpha_b_half_ghz: f64,
    pub alpha_c_half_ghz: f64,
    #[serde(default)]
    pub g_ab_ghz: f64,
    pub g_bc_ghz: f64,
    pub g_ca_ghz: f64,
    pub mod_amp_ghz: f64,
    #[serde(default = "default_sidebands")]
    pub sidebands: SidebandChoice,
    pub eps_d1_ghz: f64,
    pub kappa_ghz: f64,
    pub tilt: f64,
    #[serde(default = "default_trunc")]
    pub trunc: [usize; 3],
    #[serde(default = "default_t_end_kappa")]
    pub t_end_over_inv_kappa: f64,
    #[serde(default = "default_circuit_samples")]
    pub samples: usize,
    /// Re-run with each truncation doubled and report the D(t) shift.
    #[serde(default)]
    pub check_truncation: bool,
}

fn default_sidebands() -> SidebandChoice {
    SidebandChoice::Both
}
fn default_trunc() -> [usize; 3] {
    [4, 6, 3]
}
fn default_circuit_samples() -> usize {
    60
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct InitMapSection {
    pub omega0_ghz: f64,
    pub eps_d1_ghz: f64,
    #[serde(default = "default_kinds")]
    pub kinds: Vec<floq::init::ProtocolKind>,
    #[serde(default = "default_ramp_shape")]
    pub ramp_shape: RampShape,
    pub tilt_range: [f64; 2],
    #[serde(default = "default_grid_n")]
    pub tilt_count: usize,
    pub ramp_range_ns: [f64; 2],
    #[serde(default = "default_grid_n")]
    pub ramp_count: usize,
    #[serde(default = "default_targets")]
    pub targets: Vec<f64>,
    /// Also run boundary searches and the scaling-law fits.
    #[serde(default)]
    pub boundaries: bool,
    #[serde(default = "default_resolution")]
    pub boundary_resolution_ns: f64,
}

fn default_kinds() -> Vec<floq::init::ProtocolKind> {
    vec![
        floq::init::ProtocolKind::Adiabatic,
        floq::init::ProtocolKind::Instantaneous,
    ]
}
fn default_grid_n() -> usize {
    20
}
fn default_targets() -> Vec<f64> {
    vec![0.99, 0.999, 0.9999]
}
fn default_resolution() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub schema_version: u32,
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    /// 0 means all available cores.
    #[serde(default)]
    pub workers: usize,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub integrator: IntegratorSection,
    pub xgate: Option<XgateSection>,
    pub quasiphase_scan: Option<QuasiphaseSection>,
    pub readout_two_body: Option<ReadoutTwoBodySection>,
    pub readout_circuit: Option<ReadoutCircuitSection>,
    pub init_map: Option<InitMapSection>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unsupported schema_version {found} (this tool reads version {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("experiment \"{experiment}\" needs a [{section}] section")]
    MissingSection {
        experiment: &'static str,
        section: &'static str,
    },
    #[error("section [{section}] does not belong to experiment \"{experiment}\"")]
    ExtraSection {
        experiment: &'static str,
        section: &'static str,
    },
    #[error("invalid value: {0}")]
    Invalid(String),
}

impl ConfigFile {
    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: ConfigFile = toml::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::SchemaVersion {
                found: self.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        let experiment = self.experiment.as_str();
        let sections: [(&'static str, bool, bool); 5] = [
            (
                "xgate",
                self.xgate.is_some(),
                self.experiment == ExperimentKind::Xgate,
            ),
            (
                "quasiphase-scan",
                self.quasiphase_scan.is_some(),
                matches!(
                    self.experiment,
                    ExperimentKind::QuasiphaseScan | ExperimentKind::SolverBench
                ),
            ),
            (
                "readout-two-body",
                self.readout_two_body.is_some(),
                self.experiment == ExperimentKind::ReadoutTwoBody,
            ),
            (
                "readout-circuit",
                self.readout_circuit.is_some(),
                self.experiment == ExperimentKind::ReadoutCircuit,
            ),
            (
                "init-map",
                self.init_map.is_some(),
                self.experiment == ExperimentKind::InitMap,
            ),
        ];
        for (name, present, wanted) in sections {
            if wanted && !present {
                return Err(ConfigError::MissingSection {
                    experiment,
                    section: name,
                });
            }
            if present && !wanted {
                return Err(ConfigError::ExtraSection {
                    experiment,
                    section: name,
                });
            }
        }
        self.check_positive()?;
        Ok(())
    }

    fn check_positive(&self) -> Result<(), ConfigError> {
        let bad = |what: &str| Err(ConfigError::Invalid(format!("{what} must be positive")));
        if let Some(x) = &self.xgate {
            if x.omega0_ghz <= 0.0 || x.omega_d1_ghz <= 0.0 {
                return bad("xgate frequencies");
            }
            if x.ramp_ns <= 0.0 {
                return bad("xgate.ramp-ns");
            }
        }
        if let Some(q) = &self.quasiphase_scan {
            if q.omega_d1_ghz <= 0.0 || q.omega0_ghz <= 0.0 {
                return bad("quasiphase-scan frequencies");
            }
            if q.numerators.is_empty() {
                return Err(ConfigError::Invalid(
                    "quasiphase-scan.numerators is empty".into(),
                ));
            }
            if !(0.0 < q.window[0] && q.window[0] < q.window[1]) {
                return Err(ConfigError::Invalid(format!(
                    "quasiphase-scan.window {:?} must satisfy 0 < lo < hi",
                    q.window
                )));
            }
        }
        if let Some(r) = &self.readout_two_body {
            if r.kappa_ghz <= 0.0 {
                return bad("readout-two-body.kappa-ghz");
            }
            if r.cavity_levels < 2 {
                return Err(ConfigError::Invalid(
                    "readout-two-body.cavity-levels must be ≥ 2".into(),
                ));
            }
        }
        if let Some(c) = &self.readout_circuit {
            if c.kappa_ghz <= 0.0 {
                return bad("readout-circuit.kappa-ghz");
            }
            if c.trunc.iter().any(|&t| t < 2) {
                return Err(ConfigError::Invalid(
                    "readout-circuit.trunc entries must be ≥ 2".into(),
                ));
            }
        }
        if let Some(i) = &self.init_map {
            if !(0.0 < i.tilt_range[0] && i.tilt_range[0] < i.tilt_range[1]) {
                return Err(ConfigError::Invalid(format!(
                    "init-map.tilt-range {:?} must satisfy 0 < lo < hi",
                    i.tilt_range
                )));
            }
            if !(0.0 < i.ramp_range_ns[0] && i.ramp_range_ns[0] < i.ramp_range_ns[1]) {
                return Err(ConfigError::Invalid(format!(
                    "init-map.ramp-range-ns {:?} must satisfy 0 < lo < hi",
                    i.ramp_range_ns
                )));
            }
        }
        Ok(())
    }

    /// Canonical JSON of the resolved config (used for hashing and
    /// embedding in outputs).
    pub fn resolved_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
