//! Run configuration: one JSON document per invocation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RunError;
use crate::cavity::{CavityParams, KerrMedia};
use crate::filter::SuperpositionSpec;
use crate::fock::ComplexAmplitude;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    PrepareFock,
    PrepareSuperposition,
    Entangle,
    ScanPon,
    Sweep,
    ValidateOracle,
    /// `|sigma(phi) conj(sigma(phi'))|` on a phase grid.
    SigmaMap,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::PrepareFock => "prepare-fock",
            Mode::PrepareSuperposition => "prepare-superposition",
            Mode::Entangle => "entangle",
            Mode::ScanPon => "scan-pon",
            Mode::Sweep => "sweep",
            Mode::ValidateOracle => "validate-oracle",
            Mode::SigmaMap => "sigma-map",
        }
    }
}

/// Cavity settings, either raw (`chi_t`, `psi`) or by comb (`l_star`, `n_star`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityConfig {
    pub tau: f64,
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_star: Option<f64>,
    #[serde(default = "default_n_kerr")]
    pub n_kerr: KerrMedia,
}

fn default_n_kerr() -> KerrMedia {
    KerrMedia::One
}

impl CavityConfig {
    pub fn resolve(&self) -> Result<CavityParams, RunError> {
        let params = match (self.chi_t, self.psi, self.l_star, self.n_star) {
            (Some(chi_t), psi, None, None) => {
                CavityParams::new(self.tau, chi_t, psi.unwrap_or(0.0), self.eta, self.n_kerr)?
            }
            (None, None, Some(l_star), n_star) => CavityParams::from_comb(
                l_star,
                n_star.unwrap_or(0.0),
                self.tau,
                self.eta,
                self.n_kerr,
            )?,
            _ => {
                return Err(RunError::Config(
                    "cavity needs either chi_t (and psi) or l_star (and n_star), not both".into(),
                ))
            }
        };
        Ok(params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SignalConfig {
    Coherent {
        beta: ComplexAmplitude,
    },
    Fock {
        n: usize,
    },
    /// Density-matrix JSON file, resolved against the config's directory.
    Custom {
        path: PathBuf,
    },
    /// Coherent state designed for `(|n*> + e^{i phase}|n*+l*>)/sqrt(2)`.
    Superposition {
        n_star: usize,
        l_star: usize,
        #[serde(default)]
        phase: f64,
    },
}

impl SignalConfig {
    pub fn superposition_spec(&self) -> Option<SuperpositionSpec> {
        match *self {
            SignalConfig::Superposition {
                n_star,
                l_star,
                phase,
            } => Some(SuperpositionSpec {
                n_star,
                l_star,
                phase,
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Tau,
    Eta,
    ChiT,
    Psi,
    AlphaAbs,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Swept axis: explicit `values`, or `steps` points from `min` to `max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub parameter: SweepParameter,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default)]
    pub spacing: Spacing,
}

impl SweepAxis {
    pub fn points(&self) -> Result<Vec<f64>, RunError> {
        if let Some(values) = &self.values {
            if self.min.is_some() || self.max.is_some() || self.steps.is_some() {
                return Err(RunError::Config(
                    "sweep takes either values or min/max/steps".into(),
                ));
            }
            return Ok(values.clone());
        }
        let steps = self
            .steps
            .ok_or_else(|| RunError::Config("sweep needs values or steps".into()))?;
        if steps == 0 {
            return Ok(Vec::new());
        }
        let (min, max) = match (self.min, self.max) {
            (Some(a), Some(b)) if a.is_finite() && b.is_finite() => (a, b),
            _ => return Err(RunError::Config("sweep needs finite min and max".into())),
        };
        if steps == 1 {
            return Ok(vec![min]);
        }
        let last = (steps - 1) as f64;
        match self.spacing {
            Spacing::Linear => Ok(pin_ends(
                (0..steps)
                    .map(|i| min + (max - min) * i as f64 / last)
                    .collect(),
                min,
                max,
            )),
            Spacing::Log => {
                if !(min > 0.0 && max > 0.0) {
                    return Err(RunError::Config(
                        "log spacing needs positive min and max".into(),
                    ));
                }
                let (la, lb) = (min.ln(), max.ln());
                Ok(pin_ends(
                    (0..steps)
                        .map(|i| (la + (lb - la) * i as f64 / last).exp())
                        .collect(),
                    min,
                    max,
                ))
            }
        }
    }
}

/// Endpoints exactly as configured, free of rounding in the interpolation.
fn pin_ends(mut points: Vec<f64>, min: f64, max: f64) -> Vec<f64> {
    if let Some(first) = points.first_mut() {
        *first = min;
    }
    if let Some(last) = points.last_mut() {
        *last = max;
    }
    points
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub n_max: usize,
    #[serde(default = "default_shots")]
    pub shots: u64,
}

fn default_shots() -> u64 {
    crate::tomography::DEFAULT_SHOTS
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_cases")]
    pub cases: usize,
    #[serde(default = "default_max_alpha")]
    pub max_alpha: f64,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

fn default_cases() -> usize {
    100
}

fn default_max_alpha() -> f64 {
    3.0
}

fn default_max_dim() -> usize {
    12
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            cases: default_cases(),
            max_alpha: default_max_alpha(),
            max_dim: default_max_dim(),
        }
    }
}

/// Phase grid in units of pi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaMapConfig {
    pub phi_min_over_pi: f64,
    pub phi_max_over_pi: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cavity: Option<CavityConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ComplexAmplitude>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<SignalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal2: Option<SignalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_trunc: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepAxis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_map: Option<SigmaMapConfig>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let config: RunConfig =
            serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        if config.schema_version != SCHEMA_VERSION {
            return Err(RunError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        Ok(config)
    }

    /// Loads a config file; relative `custom` paths are resolved against its directory.
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
        let mut config = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for signal in [&mut config.signal, &mut config.signal2]
            .into_iter()
            .flatten()
        {
            if let SignalConfig::Custom { path } = signal {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        Ok(config)
    }

    pub fn cavity(&self) -> Result<CavityParams, RunError> {
        self.cavity
            .as_ref()
            .ok_or_else(|| self.missing("cavity"))?
            .resolve()
    }

    pub fn alpha(&self) -> Result<ComplexAmplitude, RunError> {
        self.alpha.ok_or_else(|| self.missing("alpha"))
    }

    pub fn signal(&self) -> Result<&SignalConfig, RunError> {
        self.signal.as_ref().ok_or_else(|| self.missing("signal"))
    }

    pub fn n_trunc(&self) -> Result<usize, RunError> {
        let n = self.n_trunc.ok_or_else(|| self.missing("n_trunc"))?;
        if n < 1 {
            return Err(RunError::Config("n_trunc must be at least 1".into()));
        }
        Ok(n)
    }

    pub(crate) fn missing(&self, field: &str) -> RunError {
        RunError::Config(format!(
            "mode {} requires field `{field}`",
            self.mode.as_str()
        ))
    }
}

const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../../presets/fig2.json")),
    ("fig3", include_str!("../../presets/fig3.json")),
    (
        "fig3-tau-sweep",
        include_str!("../../presets/fig3-tau-sweep.json"),
    ),
    ("fig4-left", include_str!("../../presets/fig4-left.json")),
    ("fig4-right", include_str!("../../presets/fig4-right.json")),
    ("fig7-left", include_str!("../../presets/fig7-left.json")),
    ("fig7-right", include_str!("../../presets/fig7-right.json")),
    (
        "fig7-eta-sweep",
        include_str!("../../presets/fig7-eta-sweep.json"),
    ),
    ("entangle", include_str!("../../presets/entangle.json")),
    (
        "scan-coherent",
        include_str!("../../presets/scan-coherent.json"),
    ),
    (
        "validate-oracle",
        include_str!("../../presets/validate-oracle.json"),
    ),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

pub fn preset(name: &str) -> Result<RunConfig, RunError> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| RunError::Config(format!("unknown preset `{name}`")))?;
    RunConfig::from_json(text)
}
