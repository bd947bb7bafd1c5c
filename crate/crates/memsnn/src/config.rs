//! Layered run configuration.
//!
//! A run is described by a TOML file with sections `[memristor]`,
//! `[synapse]`, `[energy]`, `[network]` and `[experiments.*]`. Every key has
//! a default, so a missing file or empty table is a valid configuration.
//! Values layer in order: built-in defaults, then the file, then
//! `MEMSNN_`-prefixed environment variables, then CLI flags. Unknown keys
//! are rejected by name.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::energy::{reference_columns, EnergyColumn, EnergyParams, SweepAxis};
use crate::error::ModelError;
use crate::memristor::{DriveSpec, MemristorParams};
use crate::network::{Mode, NetworkConfig, NeuronParams};
use crate::synapse::{default_overhead, SynapseParams};

/// Environment prefix for overrides. A variable names a config path with
/// double-underscore separators, e.g. `MEMSNN_NETWORK__SEED=7` or
/// `MEMSNN_EXPERIMENTS__STDP_CURVE__DT_STEP=1e-6`.
pub const ENV_PREFIX: &str = "MEMSNN_";

/// Errors raised while assembling a configuration or reading a model file.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("environment override {key}: {message}")]
    Env { key: String, message: String },

    #[error("{path}: schema {found:?} but this build reads {expected:?}")]
    ModelSchema {
        path: String,
        found: String,
        expected: String,
    },

    #[error(transparent)]
    Invalid(#[from] ModelError),
}

/// Optional per-field synapse overrides.
///
/// Unset fields keep the consumer's baseline: device defaults for the
/// top-level `[synapse]` table, the tuned classification profile for
/// `[network.synapse]`. A left-out `e_overhead` is recomputed from the final
/// memristor parameters and pulse width so the calibration point stays
/// exact.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynapseOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_w_thr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_p_spike: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub latch_enabled: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_overhead: Option<f64>,
}

impl SynapseOverrides {
    /// Applies the set fields over a baseline.
    pub fn apply(&self, mut base: SynapseParams) -> SynapseParams {
        if let Some(v) = self.a_plus {
            base.a_plus = v;
        }
        if let Some(v) = self.a_minus {
            base.a_minus = v;
        }
        if let Some(v) = self.tau_p {
            base.tau_p = v;
        }
        if let Some(v) = self.tau_m {
            base.tau_m = v;
        }
        if let Some(v) = self.gamma {
            base.gamma = v;
        }
        if let Some(v) = self.tau_w {
            base.tau_w = v;
        }
        if let Some(v) = self.v_w_thr {
            base.v_w_thr = v;
        }
        if let Some(v) = self.t_p_spike {
            base.t_p_spike = v;
        }
        if let Some(v) = self.latch_enabled {
            base.latch_enabled = v;
        }
        base.e_overhead = self
            .e_overhead
            .unwrap_or_else(|| default_overhead(&base.mem, base.t_p_spike));
        base
    }
}

/// The `[network]` table. Scalar defaults mirror the tuned analog profile
/// of [`NetworkConfig::default`]; `latch_enabled` follows `mode` unless
/// overridden under `[network.synapse]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkSection {
    pub n_in: usize,
    pub n_out: usize,
    pub sample_duration: f64,
    pub max_input_rate: f64,
    pub neuron: NeuronParams,
    pub teacher_strength: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub mode: Mode,
    pub seed: u64,
    pub inter_sample_gap: f64,
    pub v_g_init: f64,
    pub history_stride: usize,
    /// Passes over the training split per `train` run.
    pub epochs: usize,
    /// Cap on total presentations; bistable mode defaults to 500 when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_samples: Option<usize>,
    pub synapse: SynapseOverrides,
}

impl Default for NetworkSection {
    fn default() -> Self {
        let base = NetworkConfig::default();
        Self {
            n_in: base.n_in,
            n_out: base.n_out,
            sample_duration: base.sample_duration,
            max_input_rate: base.max_input_rate,
            neuron: base.neuron,
            teacher_strength: base.teacher_strength,
            w_min: base.w_min,
            w_max: base.w_max,
            mode: base.mode,
            seed: base.seed,
            inter_sample_gap: base.inter_sample_gap,
            v_g_init: base.v_g_init,
            history_stride: base.history_stride,
            epochs: 1,
            max_samples: None,
            synapse: SynapseOverrides::default(),
        }
    }
}

/// `[experiments.hysteresis]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HysteresisSection {
    pub drive: DriveSpec,
    /// Initial gate voltage (V).
    pub v_g0: f64,
    /// Maximum allowed current magnitude where the trace crosses zero volts.
    pub origin_tolerance: f64,
}

impl Default for HysteresisSection {
    fn default() -> Self {
        Self {
            drive: DriveSpec::default(),
            v_g0: 0.2,
            origin_tolerance: 1e-12,
        }
    }
}

/// `[experiments.stdp_curve]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StdpCurveSection {
    /// Largest |Δt| probed (s).
    pub dt_max: f64,
    /// Grid spacing (s); the grid always contains Δt = 0.
    pub dt_step: f64,
    /// Time between successive pairings (s).
    pub spacing: f64,
    /// Initial gate voltage (V), mid-rail so no pairing clamps.
    pub v_g0: f64,
    /// Allowed relative error of the fitted time constants.
    pub fit_tolerance: f64,
}

impl Default for StdpCurveSection {
    fn default() -> Self {
        Self {
            dt_max: 10e-6,
            dt_step: 0.5e-6,
            spacing: 50e-6,
            v_g0: 0.6,
            fit_tolerance: 0.05,
        }
    }
}

/// `[experiments.bistability]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BistabilitySection {
    /// Initial gate voltage (V), below the latch threshold.
    pub v_g0: f64,
    /// Pair offset for the potentiation case (s); depression uses its
    /// negation.
    pub pairing_dt: f64,
    /// Time between successive pairings (s).
    pub spacing: f64,
    /// Give up if potentiation has not crossed the latch threshold by then.
    pub max_pairings: usize,
    /// Samples recorded along the settling transient.
    pub trace_points: usize,
    /// Voltage across the cell for the reported read current (V).
    pub read_voltage: f64,
}

impl Default for BistabilitySection {
    fn default() -> Self {
        Self {
            v_g0: 0.55,
            pairing_dt: 1e-6,
            spacing: 50e-6,
            max_pairings: 100,
            trace_points: 200,
            read_voltage: 0.6,
        }
    }
}

/// `[experiments.pairing_decay]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PairingDecaySection {
    /// Number of post-before-pre pairings.
    pub pairings: usize,
    /// Pair offset (s), negative for depression.
    pub dt: f64,
    /// Time between successive pairings (s).
    pub spacing: f64,
    /// Initial gate voltage (V), full rail.
    pub v_g0: f64,
    /// Voltage across the cell for the reported read current (V).
    pub read_voltage: f64,
    /// Allowed per-interval deviation between the latch-on and latch-off
    /// runs, as a fraction of the rail.
    pub deviation_limit: f64,
}

impl Default for PairingDecaySection {
    fn default() -> Self {
        Self {
            pairings: 20,
            dt: -1e-6,
            spacing: 50e-6,
            v_g0: 1.2,
            read_voltage: 0.6,
            deviation_limit: 0.025,
        }
    }
}

/// `[experiments.energy_table]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyTableSection {
    pub columns: Vec<EnergyColumn>,
}

impl Default for EnergyTableSection {
    fn default() -> Self {
        Self {
            columns: reference_columns(),
        }
    }
}

/// `[experiments.sweep]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            axis: SweepAxis::RLrs,
            start: 1e5,
            stop: 1e7,
            steps: 25,
        }
    }
}

/// The `[experiments]` table.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentsSection {
    pub hysteresis: HysteresisSection,
    pub stdp_curve: StdpCurveSection,
    pub bistability: BistabilitySection,
    pub pairing_decay: PairingDecaySection,
    pub energy_table: EnergyTableSection,
    pub sweep: SweepSection,
}

/// A fully layered run configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub memristor: MemristorParams,
    /// Overrides for the device-level experiments (STDP curve, bistability,
    /// pairing decay) over the bare synapse defaults.
    pub synapse: SynapseOverrides,
    pub energy: EnergyParams,
    pub network: NetworkSection,
    pub experiments: ExperimentsSection,
}

impl RunConfig {
    /// Loads a configuration file (or pure defaults when `path` is `None`)
    /// and applies environment overrides.
    pub fn load(path: Option<&Path>, env: &[(String, String)]) -> Result<RunConfig, ConfigError> {
        let (mut value, label) = match path {
            Some(p) => {
                let display = p.display().to_string();
                let text = fs::read_to_string(p).map_err(|source| ConfigError::Io {
                    path: display.clone(),
                    source,
                })?;
                let table = text
                    .parse::<toml::Table>()
                    .map_err(|e| ConfigError::Parse {
                        path: display.clone(),
                        message: e.to_string(),
                    })?;
                (toml::Value::Table(table), display)
            }
            None => (
                toml::Value::Table(toml::value::Table::new()),
                "<defaults>".to_string(),
            ),
        };
        apply_env_overrides(&mut value, env)?;
        value
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse {
                path: label,
                message: e.to_string(),
            })
    }

    /// Synapse parameters for the device-level experiments.
    pub fn device_synapse(&self) -> Result<SynapseParams, ModelError> {
        let base = SynapseParams {
            mem: self.memristor,
            v_dd: self.memristor.v_dd,
            ..SynapseParams::default()
        };
        let p = self.synapse.apply(base);
        p.validate()?;
        Ok(p)
    }

    /// The assembled network configuration.
    pub fn network_config(&self) -> Result<NetworkConfig, ModelError> {
        let net = &self.network;
        let syn_base = SynapseParams {
            mem: self.memristor,
            v_dd: self.memristor.v_dd,
            latch_enabled: net.mode == Mode::Bistable,
            ..NetworkConfig::default().synapse
        };
        let cfg = NetworkConfig {
            n_in: net.n_in,
            n_out: net.n_out,
            synapse: net.synapse.apply(syn_base),
            sample_duration: net.sample_duration,
            max_input_rate: net.max_input_rate,
            neuron: net.neuron,
            teacher_strength: net.teacher_strength,
            w_min: net.w_min,
            w_max: net.w_max,
            mode: net.mode,
            seed: net.seed,
            inter_sample_gap: net.inter_sample_gap,
            v_g_init: net.v_g_init,
            history_stride: net.history_stride,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Energy-model parameters.
    pub fn energy_params(&self) -> Result<EnergyParams, ModelError> {
        self.energy.validate()?;
        Ok(self.energy)
    }
}

fn apply_env_overrides(
    root: &mut toml::Value,
    env: &[(String, String)],
) -> Result<(), ConfigError> {
    for (key, raw) in env {
        let Some(rest) = key.strip_prefix(ENV_PREFIX) else {
            continue;
        };
        let segments: Vec<String> = rest.split("__").map(str::to_ascii_lowercase).collect();
        if segments.iter().any(String::is_empty) {
            return Err(ConfigError::Env {
                key: key.clone(),
                message: "empty path segment".to_string(),
            });
        }
        set_path(root, &segments, parse_scalar(raw)).map_err(|message| ConfigError::Env {
            key: key.clone(),
            message,
        })?;
    }
    Ok(())
}

/// Best-effort typing of an override string: bool, then integer, then
/// float, then plain string.
fn parse_scalar(raw: &str) -> toml::Value {
    if let Ok(b) = raw.parse::<bool>() {
        return toml::Value::Boolean(b);
    }
    if let Ok(i) = raw.parse::<i64>() {
        return toml::Value::Integer(i);
    }
    if let Ok(f) = raw.parse::<f64>() {
        return toml::Value::Float(f);
    }
    toml::Value::String(raw.to_string())
}

fn set_path(root: &mut toml::Value, segments: &[String], v: toml::Value) -> Result<(), String> {
    let (last, parents) = segments.split_last().expect("segments are non-empty");
    let mut node = root;
    for seg in parents {
        let table = node
            .as_table_mut()
            .ok_or_else(|| format!("{seg} is not a table"))?;
        node = table
            .entry(seg.clone())
            .or_insert_with(|| toml::Value::Table(toml::value::Table::new()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| format!("{last} cannot be set inside a scalar"))?;
    table.insert(last.clone(), v);
    Ok(())
}
