//! Behavioral model of a CMOS memristor emulator cell.
//!
//! The cell stores its state as a gate voltage `v_g` on a hold capacitor.
//! The terminal conductance is a clamped linear function of `v_g`, and a
//! strobed transconductor integrates the applied terminal voltage onto the
//! capacitor, so the element behaves as a memristor: conductance with
//! memory, current pinched at the origin.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Emulator constants.
///
/// `beta` is the triode transconductance slope of the sensing MOSFET,
/// `g_m`/`c_m` set the state-integration rate, and the conductance clamps
/// pin the extreme low/high resistance states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MemristorParams {
    /// Transconductance slope (S/V).
    pub beta: f64,
    /// Sensing MOSFET threshold voltage (V).
    pub v_thn: f64,
    /// State-integrator transconductor gain (S).
    pub g_m: f64,
    /// State hold capacitance (F).
    pub c_m: f64,
    /// Lower conductance clamp — the high-resistance state (S).
    pub g_min: f64,
    /// Upper conductance clamp — the low-resistance state (S).
    pub g_max: f64,
    /// Supply rail (V); the state voltage lives in `[0, v_dd]`.
    pub v_dd: f64,
}

impl Default for MemristorParams {
    fn default() -> Self {
        let v_dd = 1.2;
        let v_thn = 0.3;
        let g_max = 2.5e-6; // 1 / 0.4 MΩ
        Self {
            // Slope chosen so a full-rail state voltage lands exactly on the
            // low-resistance clamp: beta = g_max / (v_dd - v_thn) ≈ 2.78 µS/V.
            beta: g_max / (v_dd - v_thn),
            v_thn,
            g_m: 1e-6,
            c_m: 100e-15,
            g_min: 6.25e-8, // 1 / 16 MΩ
            g_max,
            v_dd,
        }
    }
}

impl MemristorParams {
    /// Checks the documented invariants.
    pub fn validate(&self) -> Result<(), ModelError> {
        let all = [
            ("beta", self.beta),
            ("v_thn", self.v_thn),
            ("g_m", self.g_m),
            ("c_m", self.c_m),
            ("g_min", self.g_min),
            ("g_max", self.g_max),
            ("v_dd", self.v_dd),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidParam(format!(
                    "memristor.{name} must be finite and positive, got {v}"
                )));
            }
        }
        if self.g_min >= self.g_max {
            return Err(ModelError::InvalidParam(format!(
                "memristor.g_min ({}) must be below g_max ({})",
                self.g_min, self.g_max
            )));
        }
        if self.v_thn >= self.v_dd {
            return Err(ModelError::InvalidParam(format!(
                "memristor.v_thn ({}) must be below v_dd ({})",
                self.v_thn, self.v_dd
            )));
        }
        Ok(())
    }

    /// Conductance seen between the terminals for a stored state voltage (S).
    ///
    /// Linear in `v_g` above threshold, clamped to `[g_min, g_max]`.
    pub fn conductance(&self, v_g: f64) -> f64 {
        (self.beta * (v_g - self.v_thn)).clamp(self.g_min, self.g_max)
    }

    /// Terminal current for an applied terminal voltage (A).
    ///
    /// Exactly zero at `v_ab = 0` for every state: the pinched-origin
    /// signature.
    pub fn current(&self, v_g: f64, v_ab: f64) -> f64 {
        self.conductance(v_g) * v_ab
    }
}

/// Live state of one emulator cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemristorState {
    /// Stored gate/state voltage (V).
    pub v_g: f64,
    /// Strobe: the state integrator runs only while high; low holds the
    /// stored charge untouched.
    pub strobe: bool,
}

impl MemristorState {
    /// New cell with the strobe high.
    pub fn new(v_g: f64) -> Self {
        Self { v_g, strobe: true }
    }

    /// One explicit-Euler step of the state integrator.
    ///
    /// With the strobe low the state is held bit-identically. The state is
    /// clamped to `[0, v_dd]` after every step.
    pub fn integrate_state(&mut self, v_ab: f64, dt: f64, p: &MemristorParams) {
        debug_assert!(dt > 0.0, "integration step must be positive");
        if self.strobe {
            self.v_g = (self.v_g + p.g_m / p.c_m * v_ab * dt).clamp(0.0, p.v_dd);
        }
    }
}

/// One recorded point of an I–V sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvSample {
    /// Time (s).
    pub t: f64,
    /// Applied terminal voltage (V).
    pub v_ab: f64,
    /// Terminal current (A).
    pub i: f64,
}

/// Time-ordered I–V trace produced by the sweep harness.
#[derive(Debug, Clone, Default)]
pub struct IvTrace {
    pub samples: Vec<IvSample>,
}

impl IvTrace {
    /// Renders the trace as CSV with header `t_s,v_ab_V,i_A`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,v_ab_V,i_A\n");
        for s in &self.samples {
            out.push_str(&format!("{:e},{:e},{:e}\n", s.t, s.v_ab, s.i));
        }
        out
    }
}

/// Sinusoidal drive for [`run_iv_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSpec {
    /// Peak terminal voltage (V).
    pub amplitude: f64,
    /// Drive frequency (Hz).
    pub frequency: f64,
    /// Number of full periods to simulate.
    pub cycles: u32,
    /// Fixed integration step (s); must satisfy `dt <= 1 / (1000 * frequency)`.
    pub dt: f64,
}

impl Default for DriveSpec {
    fn default() -> Self {
        Self {
            amplitude: 0.3,
            frequency: 1e6,
            cycles: 2,
            dt: 1e-9,
        }
    }
}

/// Fixed-step simulation of a sinusoidal terminal drive with the strobe high.
///
/// Returns the full trace together with the final cell state, which is used
/// by the step-halving consistency check.
pub fn run_iv_sweep(
    p: &MemristorParams,
    drive: &DriveSpec,
    v_g0: f64,
) -> Result<(IvTrace, MemristorState), ModelError> {
    p.validate()?;
    if !(drive.frequency.is_finite() && drive.frequency > 0.0) {
        return Err(ModelError::InvalidParam(format!(
            "drive frequency must be positive, got {}",
            drive.frequency
        )));
    }
    if !(drive.dt.is_finite() && drive.dt > 0.0) {
        return Err(ModelError::InvalidParam(format!(
            "drive dt must be positive, got {}",
            drive.dt
        )));
    }
    let limit = 1.0 / (1000.0 * drive.frequency);
    if drive.dt > limit {
        return Err(ModelError::StepTooLarge {
            dt: drive.dt,
            limit,
        });
    }
    if !(drive.amplitude.is_finite() && drive.amplitude >= 0.0) {
        return Err(ModelError::InvalidParam(format!(
            "drive amplitude must be non-negative, got {}",
            drive.amplitude
        )));
    }

    let steps = (drive.cycles as f64 / (drive.frequency * drive.dt)).round() as usize;
    let omega = std::f64::consts::TAU * drive.frequency;
    let mut state = MemristorState::new(v_g0.clamp(0.0, p.v_dd));
    let mut samples = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 * drive.dt;
        let v_ab = drive.amplitude * (omega * t).sin();
        samples.push(IvSample {
            t,
            v_ab,
            i: p.current(state.v_g, v_ab),
        });
        if k < steps {
            state.integrate_state(v_ab, drive.dt, p);
        }
    }
    Ok((IvTrace { samples }, state))
}

/// Quantitative pinched-hysteresis signature of a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinchedMetrics {
    /// Largest |current| over samples with |voltage| below 1 µV (A).
    pub origin_residual: f64,
    /// Sum of the unsigned polygon areas of the loop's constant-polarity
    /// lobes (V·A). A pinched curve is a figure-eight whose two lobes have
    /// opposite handedness, so the raw signed area of the whole trace
    /// cancels; closing each lobe separately keeps the metric exactly zero
    /// for memoryless curves and positive as soon as the branches separate.
    pub loop_area: f64,
}

/// Voltage window treated as "at the origin" for the residual metric (V).
pub const ORIGIN_WINDOW: f64 = 1e-6;

/// Shoelace area of one lobe, closed back to its first sample.
fn lobe_area(chunk: &[IvSample]) -> f64 {
    let mut twice = 0.0;
    for w in chunk.windows(2) {
        twice += w[0].v_ab * w[1].i - w[1].v_ab * w[0].i;
    }
    let (first, last) = (chunk[0], chunk[chunk.len() - 1]);
    twice += last.v_ab * first.i - first.v_ab * last.i;
    (0.5 * twice).abs()
}

/// Computes [`PinchedMetrics`] for a trace.
pub fn pinched_metrics(trace: &IvTrace) -> Result<PinchedMetrics, ModelError> {
    let samples = &trace.samples;
    if samples.is_empty() {
        return Err(ModelError::Empty("trace"));
    }
    let origin_residual = samples
        .iter()
        .filter(|s| s.v_ab.abs() < ORIGIN_WINDOW)
        .map(|s| s.i.abs())
        .fold(0.0_f64, f64::max);

    let sign_of = |v: f64| {
        if v > 0.0 {
            1i8
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    };
    let mut loop_area = 0.0;
    let mut start = 0;
    let mut polarity = 0i8;
    for (k, s) in samples.iter().enumerate() {
        let sign = sign_of(s.v_ab);
        if sign != 0 && polarity != 0 && sign != polarity {
            loop_area += lobe_area(&samples[start..k]);
            start = k;
        }
        if sign != 0 {
            polarity = sign;
        }
    }
    loop_area += lobe_area(&samples[start..]);

    Ok(PinchedMetrics {
        origin_residual,
        loop_area,
    })
}

/// Companion circuit constants of the emulator cell.
///
/// These document the surrounding bias and leakage levels of the reference
/// implementation; they play no behavioral role in the model.
pub mod circuit_constants {
    /// Primary bias current of the emulator cell (A).
    pub const I_BIAS_PRIMARY: f64 = 10e-9;
    /// Secondary (subthreshold) bias current (A).
    pub const I_BIAS_SECONDARY: f64 = 100e-12;
    /// Leakage current, lower bound (A).
    pub const I_LEAK_LOW: f64 = 90e-12;
    /// Leakage current, upper bound (A).
    pub const I_LEAK_HIGH: f64 = 110e-12;
    /// Standby current of a full synapse cell (A).
    pub const I_STANDBY: f64 = 490e-12;
    /// Standby power of a full synapse cell (W).
    pub const P_STANDBY: f64 = 588e-12;
}
