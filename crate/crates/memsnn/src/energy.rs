//! Closed-form energy model for a memristive spiking accelerator.
//!
//! Per-event energy is the sparsity-weighted synaptic read energy plus the
//! neuron energy: `E = η_sp · η_lrs · N_s · M · E_spk + N_n · P_n · T_p`,
//! with `E_spk = V²·T_p / R`. Throughput in images/s/W is the reciprocal,
//! and acceleration is quoted against a GPU baseline.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Inputs of the energy model.
///
/// Counts are carried as floats so design-space sweeps can scan them
/// continuously.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyParams {
    /// Nominal spike amplitude (V), reported for reference.
    pub v_p: f64,
    /// Effective voltage entering the spike-energy term (V).
    pub v_eff: f64,
    /// Spike pulse width (s).
    pub t_p: f64,
    /// Low-resistance state of one device (Ω).
    pub r_lrs: f64,
    /// High-resistance state of one device (Ω).
    pub r_hrs: f64,
    /// Fraction of neurons spiking per event.
    pub eta_sp: f64,
    /// Fraction of synapses in the low-resistance state.
    pub eta_lrs: f64,
    /// Synapse count.
    pub n_s: f64,
    /// Neuron count.
    pub n_n: f64,
    /// Per-neuron power (W); per-neuron energy per event is `p_n · t_p`.
    pub p_n: f64,
    /// Devices per compound synapse (a 4-bit synapse uses 16).
    pub devices_per_synapse: f64,
    /// GPU reference throughput (images/s/W).
    pub gpu_baseline: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        let t_p = 100e-9;
        Self {
            v_p: 0.3,
            v_eff: 1.2,
            t_p,
            r_lrs: 1e6,
            r_hrs: 16e6,
            eta_sp: 0.6,
            eta_lrs: 0.5,
            n_s: 61e6,
            n_n: 640e3,
            p_n: 260e-15 / t_p,
            devices_per_synapse: 16.0,
            gpu_baseline: 170.0,
        }
    }
}

impl EnergyParams {
    /// Checks the documented invariants.
    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("v_p", self.v_p),
            ("v_eff", self.v_eff),
            ("t_p", self.t_p),
            ("r_lrs", self.r_lrs),
            ("r_hrs", self.r_hrs),
            ("gpu_baseline", self.gpu_baseline),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidParam(format!(
                    "energy.{name} must be finite and positive, got {v}"
                )));
            }
        }
        let fractions = [("eta_sp", self.eta_sp), ("eta_lrs", self.eta_lrs)];
        for (name, v) in fractions {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(ModelError::InvalidParam(format!(
                    "energy.{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        let counts = [
            ("n_s", self.n_s),
            ("n_n", self.n_n),
            ("p_n", self.p_n),
            ("devices_per_synapse", self.devices_per_synapse),
        ];
        for (name, v) in counts {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ModelError::InvalidParam(format!(
                    "energy.{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if self.r_hrs <= self.r_lrs {
            return Err(ModelError::InvalidParam(format!(
                "energy.r_hrs ({}) must exceed r_lrs ({})",
                self.r_hrs, self.r_lrs
            )));
        }
        Ok(())
    }
}

/// Energy for one spike driving a resistance `r` (J): `v_eff²·t_p / r`.
pub fn spike_energy(v_eff: f64, t_p: f64, r: f64) -> Result<f64, ModelError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(ModelError::InvalidParam(format!(
            "spike_energy resistance must be positive, got {r}"
        )));
    }
    if !(t_p.is_finite() && t_p > 0.0) {
        return Err(ModelError::InvalidParam(format!(
            "spike_energy pulse width must be positive, got {t_p}"
        )));
    }
    Ok(v_eff * v_eff * t_p / r)
}

/// Total energy for one network event (J).
pub fn event_energy(p: &EnergyParams) -> Result<f64, ModelError> {
    p.validate()?;
    let e_spk = spike_energy(p.v_eff, p.t_p, p.r_lrs)?;
    Ok(p.eta_sp * p.eta_lrs * p.n_s * p.devices_per_synapse * e_spk + p.n_n * p.p_n * p.t_p)
}

/// Throughput for a per-image energy (images/s/W).
pub fn throughput(e_snn: f64) -> Result<f64, ModelError> {
    if !(e_snn.is_finite() && e_snn > 0.0) {
        return Err(ModelError::InvalidParam(format!(
            "throughput needs positive energy, got {e_snn}"
        )));
    }
    Ok(1.0 / e_snn)
}

/// Speed-up of a throughput figure over a baseline.
pub fn gpu_acceleration(images_per_s_per_w: f64, baseline: f64) -> Result<f64, ModelError> {
    if !(baseline.is_finite() && baseline > 0.0) {
        return Err(ModelError::InvalidParam(format!(
            "acceleration needs positive baseline, got {baseline}"
        )));
    }
    Ok(images_per_s_per_w / baseline)
}

/// One column of the reference table: a device resistance tier together with
/// its per-neuron event energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyColumn {
    /// Tier name.
    pub label: String,
    /// Device low-resistance state (Ω).
    pub r_lrs: f64,
    /// Per-neuron energy per event (J).
    pub e_n: f64,
}

/// The canonical three-tier column set of the reference table.
pub fn reference_columns() -> Vec<EnergyColumn> {
    vec![
        EnergyColumn {
            label: "Low".into(),
            r_lrs: 100e3,
            e_n: 1.56e-12,
        },
        EnergyColumn {
            label: "Medium".into(),
            r_lrs: 1e6,
            e_n: 260e-15,
        },
        EnergyColumn {
            label: "High".into(),
            r_lrs: 10e6,
            e_n: 43.3e-15,
        },
    ]
}

/// One fully derived row of the rendered table.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRow {
    pub label: String,
    pub r_lrs: f64,
    /// Per-spike, per-device energy (J).
    pub e_spk: f64,
    /// Per-neuron energy per event (J).
    pub e_n: f64,
    /// Total per-event energy (J).
    pub e_snn: f64,
    pub images_per_s_per_w: f64,
    pub acceleration: f64,
}

/// Renders one row per resistance, holding the per-neuron energy at the
/// value implied by `base.p_n`.
pub fn render_table(base: &EnergyParams, r_values: &[f64]) -> Result<Vec<EnergyRow>, ModelError> {
    if r_values.is_empty() {
        return Err(ModelError::Empty("resistance list"));
    }
    let e_n = base.p_n * base.t_p;
    let columns: Vec<EnergyColumn> = r_values
        .iter()
        .enumerate()
        .map(|(idx, &r_lrs)| EnergyColumn {
            label: format!("R{idx}"),
            r_lrs,
            e_n,
        })
        .collect();
    render_table_columns(base, &columns)
}

/// Renders one row per column, each column carrying its own resistance tier
/// and per-neuron energy.
pub fn render_table_columns(
    base: &EnergyParams,
    columns: &[EnergyColumn],
) -> Result<Vec<EnergyRow>, ModelError> {
    if columns.is_empty() {
        return Err(ModelError::Empty("column list"));
    }
    columns
        .iter()
        .map(|col| {
            let p = EnergyParams {
                r_lrs: col.r_lrs,
                p_n: col.e_n / base.t_p,
                ..*base
            };
            let e_spk = spike_energy(p.v_eff, p.t_p, p.r_lrs)?;
            let e_snn = event_energy(&p)?;
            let ips = throughput(e_snn)?;
            let acceleration = gpu_acceleration(ips, p.gpu_baseline)?;
            Ok(EnergyRow {
                label: col.label.clone(),
                r_lrs: col.r_lrs,
                e_spk,
                e_n: col.e_n,
                e_snn,
                images_per_s_per_w: ips,
                acceleration,
            })
        })
        .collect()
}

/// Axis choices for [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    RLrs,
    TP,
    VEff,
    EtaSp,
    Devices,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::RLrs => "r_lrs",
            SweepAxis::TP => "t_p",
            SweepAxis::VEff => "v_eff",
            SweepAxis::EtaSp => "eta_sp",
            SweepAxis::Devices => "devices_per_synapse",
        }
    }
}

/// One evaluated point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub e_snn: f64,
    pub images_per_s_per_w: f64,
    pub acceleration: f64,
}

/// Evaluates the model along one linearly spaced axis.
pub fn sweep(
    base: &EnergyParams,
    axis: SweepAxis,
    start: f64,
    stop: f64,
    steps: usize,
) -> Result<Vec<SweepPoint>, ModelError> {
    if steps == 0 {
        return Err(ModelError::InvalidParam(
            "sweep needs at least one step".into(),
        ));
    }
    if !(start.is_finite() && stop.is_finite()) {
        return Err(ModelError::InvalidParam(format!(
            "sweep range [{start}, {stop}] must be finite"
        )));
    }
    let mut out = Vec::with_capacity(steps);
    for k in 0..steps {
        let frac = if steps == 1 {
            0.0
        } else {
            k as f64 / (steps - 1) as f64
        };
        let value = start + (stop - start) * frac;
        let mut p = *base;
        match axis {
            SweepAxis::RLrs => p.r_lrs = value,
            SweepAxis::TP => p.t_p = value,
            SweepAxis::VEff => p.v_eff = value,
            SweepAxis::EtaSp => p.eta_sp = value,
            SweepAxis::Devices => p.devices_per_synapse = value,
        }
        let e_snn = event_energy(&p)?;
        let ips = throughput(e_snn)?;
        out.push(SweepPoint {
            axis_value: value,
            e_snn,
            images_per_s_per_w: ips,
            acceleration: gpu_acceleration(ips, p.gpu_baseline)?,
        });
    }
    Ok(out)
}
