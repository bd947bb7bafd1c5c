//! Bistable STDP synapse.
//!
//! Each spike launches an exponentially decaying voltage trace; the opposite
//! side's next spike samples that trace and moves the stored weight voltage
//! `v_g` up (pre→post) or down (post→pre). A weak latch slowly regenerates
//! `v_g` away from an unstable threshold toward one of the rails, giving the
//! synapse its two long-term states.

use crate::error::ModelError;
use crate::memristor::MemristorParams;

/// Tuning constants of one synapse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynapseParams {
    /// Potentiation trace amplitude (V): value the pre trace resets to.
    pub a_plus: f64,
    /// Depression trace amplitude (V): value the post trace resets to.
    pub a_minus: f64,
    /// Pre-trace decay time constant (s).
    pub tau_p: f64,
    /// Post-trace decay time constant (s).
    pub tau_m: f64,
    /// Update gain: volts of state change per volt of sampled trace.
    pub gamma: f64,
    /// Latch regeneration time constant (s); must be at least 100 × `tau_p`
    /// so the latch cannot disturb the short-term pairing window.
    pub tau_w: f64,
    /// Latch threshold (V): the unstable equilibrium separating the rails.
    pub v_w_thr: f64,
    /// Supply rail (V).
    pub v_dd: f64,
    /// Spike pulse width (s), used by the per-spike energy report.
    pub t_p_spike: f64,
    /// Whether the weak latch acts on `v_g` between events.
    pub latch_enabled: bool,
    /// Fixed per-spike circuit overhead energy (J) added on top of the Ohmic
    /// dissipation. The default is calibrated so a full-rail state read at
    /// 600 mV totals exactly 91.24 fJ per spike.
    pub e_overhead: f64,
    /// Conductance mapping of the underlying memristive element.
    pub mem: MemristorParams,
}

/// Reference per-spike total for the calibration point: full-rail state,
/// 600 mV across, default pulse width (J).
pub const E_SPIKE_LRS_600MV: f64 = 91.24e-15;

/// Read voltage of the calibration point (V).
pub const CALIBRATION_V_ACROSS: f64 = 0.6;

/// Circuit overhead implied by the calibration point: whatever energy the
/// Ohmic term does not account for at full rail and 600 mV across.
///
/// Both terms are within a factor of two of each other, so the subtraction
/// is exact in f64 and adding the Ohmic part back reproduces the total
/// bit-for-bit.
pub fn default_overhead(mem: &MemristorParams, t_p_spike: f64) -> f64 {
    let ohmic = mem.conductance(mem.v_dd) * CALIBRATION_V_ACROSS * CALIBRATION_V_ACROSS * t_p_spike;
    E_SPIKE_LRS_600MV - ohmic
}

impl Default for SynapseParams {
    fn default() -> Self {
        let mem = MemristorParams::default();
        let t_p_spike = 100e-9;
        Self {
            a_plus: 0.5,
            a_minus: 0.5,
            tau_p: 2e-6,
            tau_m: 2e-6,
            gamma: 0.2,
            tau_w: 2e-3,
            v_w_thr: 0.6,
            v_dd: mem.v_dd,
            t_p_spike,
            latch_enabled: true,
            e_overhead: default_overhead(&mem, t_p_spike),
            mem,
        }
    }
}

impl SynapseParams {
    /// Checks the documented invariants.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.mem.validate()?;
        let positive = [
            ("a_plus", self.a_plus),
            ("a_minus", self.a_minus),
            ("tau_p", self.tau_p),
            ("tau_m", self.tau_m),
            ("gamma", self.gamma),
            ("tau_w", self.tau_w),
            ("t_p_spike", self.t_p_spike),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidParam(format!(
                    "synapse.{name} must be finite and positive, got {v}"
                )));
            }
        }
        if !(self.v_w_thr > 0.0 && self.v_w_thr < self.v_dd) {
            return Err(ModelError::InvalidParam(format!(
                "synapse.v_w_thr ({}) must lie strictly inside (0, v_dd)",
                self.v_w_thr
            )));
        }
        if self.tau_w < 100.0 * self.tau_p {
            return Err(ModelError::InvalidParam(format!(
                "synapse.tau_w ({}) must be at least 100 * tau_p ({})",
                self.tau_w, self.tau_p
            )));
        }
        if self.v_dd != self.mem.v_dd {
            return Err(ModelError::InvalidParam(format!(
                "synapse.v_dd ({}) disagrees with memristor.v_dd ({})",
                self.v_dd, self.mem.v_dd
            )));
        }
        if !self.e_overhead.is_finite() || self.e_overhead < 0.0 {
            return Err(ModelError::InvalidParam(format!(
                "synapse.e_overhead must be finite and non-negative, got {}",
                self.e_overhead
            )));
        }
        Ok(())
    }
}

/// Long-term state classification of the stored voltage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LongTermState {
    /// Low-resistance state: `v_g` within 1 mV of the supply rail.
    Lrs,
    /// High-resistance state: `v_g` within 1 mV of ground.
    Hrs,
    /// Anywhere in between.
    Undecided,
}

/// Margin around the rails for the LRS/HRS classification (V).
pub const RAIL_MARGIN: f64 = 1e-3;

/// Kind of spike arriving at the synapse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpikeKind {
    Pre,
    Post,
}

/// A timestamped spike event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeEvent {
    /// Timestamp (s); finite and non-negative.
    pub t: f64,
    pub kind: SpikeKind,
}

/// Live state of one synapse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynapseState {
    /// Stored weight voltage (V), always in `[0, v_dd]`.
    pub v_g: f64,
    /// Current value of the pre-side trace (V).
    pub trace_pre: f64,
    /// Current value of the post-side trace (V).
    pub trace_post: f64,
    /// Timestamp of the last evolve (s).
    pub t_last: f64,
}

impl SynapseState {
    /// Fresh synapse with zero traces at time zero.
    pub fn new(v_g: f64) -> Self {
        Self {
            v_g,
            trace_pre: 0.0,
            trace_post: 0.0,
            t_last: 0.0,
        }
    }

    /// Advances traces and (if enabled) the latch to `t_now`.
    ///
    /// Traces decay exponentially. The latch integrates the unstable
    /// first-order dynamics `dv/dt = (v - v_w_thr) / tau_w` in closed form —
    /// exact for any step — and clamps to the rails. `t_now` may not precede
    /// the last update.
    pub fn evolve(&mut self, t_now: f64, p: &SynapseParams) -> Result<(), ModelError> {
        let dt = t_now - self.t_last;
        if dt < 0.0 {
            return Err(ModelError::TimeReversed {
                t: t_now,
                last: self.t_last,
            });
        }
        if dt == 0.0 {
            return Ok(());
        }
        self.trace_pre *= (-dt / p.tau_p).exp();
        self.trace_post *= (-dt / p.tau_m).exp();
        if p.latch_enabled {
            self.v_g =
                (p.v_w_thr + (self.v_g - p.v_w_thr) * (dt / p.tau_w).exp()).clamp(0.0, p.v_dd);
        }
        self.t_last = t_now;
        Ok(())
    }

    /// Processes a pre-synaptic spike at time `t`.
    ///
    /// The spike samples the decayed post trace, depressing the stored
    /// voltage, then restarts the pre trace at its full amplitude
    /// (nearest-neighbour pairing: the trace is re-armed, not accumulated).
    pub fn on_pre(&mut self, t: f64, p: &SynapseParams) -> Result<(), ModelError> {
        self.evolve(t, p)?;
        self.v_g = (self.v_g - p.gamma * self.trace_post).clamp(0.0, p.v_dd);
        self.trace_pre = p.a_plus;
        Ok(())
    }

    /// Processes a post-synaptic spike at time `t`.
    ///
    /// The spike samples the decayed pre trace, potentiating the stored
    /// voltage, then restarts the post trace at its full amplitude.
    pub fn on_post(&mut self, t: f64, p: &SynapseParams) -> Result<(), ModelError> {
        self.evolve(t, p)?;
        self.v_g = (self.v_g + p.gamma * self.trace_pre).clamp(0.0, p.v_dd);
        self.trace_post = p.a_minus;
        Ok(())
    }

    /// Current through the synapse for a given voltage across it (A).
    pub fn synaptic_current(&self, v_pre_minus_v_post: f64, p: &SynapseParams) -> f64 {
        p.mem.conductance(self.v_g) * v_pre_minus_v_post
    }

    /// Classifies the stored voltage against the rail margins.
    pub fn long_term_state(&self, p: &SynapseParams) -> LongTermState {
        if self.v_g >= p.v_dd - RAIL_MARGIN {
            LongTermState::Lrs
        } else if self.v_g <= RAIL_MARGIN {
            LongTermState::Hrs
        } else {
            LongTermState::Undecided
        }
    }

    /// Energy dissipated by one read spike of width `t_p_spike` (J): the
    /// Ohmic part through the current conductance plus the fixed circuit
    /// overhead.
    pub fn per_spike_energy_report(&self, v_across: f64, p: &SynapseParams) -> f64 {
        p.mem.conductance(self.v_g) * v_across * v_across * p.t_p_spike + p.e_overhead
    }
}

/// Closed-form state change produced by a single pre/post pair separated by
/// `dt = t_post - t_pre` (V).
///
/// Positive `dt` (pre before post) potentiates, negative depresses.
/// Simultaneous spikes are treated as causal pre→post and return the maximum
/// potentiation.
pub fn stdp_delta(dt: f64, p: &SynapseParams) -> f64 {
    if dt >= 0.0 {
        p.gamma * p.a_plus * (-dt / p.tau_p).exp()
    } else {
        -p.gamma * p.a_minus * (dt / p.tau_m).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn no_latch() -> SynapseParams {
        SynapseParams {
            latch_enabled: false,
            ..SynapseParams::default()
        }
    }

    #[test]
    fn evolve_zero_dt_is_identity() {
        let p = SynapseParams::default();
        let mut s = SynapseState::new(0.7);
        s.trace_pre = 0.3;
        s.trace_post = 0.2;
        let before = s;
        s.evolve(0.0, &p).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn evolve_threshold_is_fixed_point() {
        let p = SynapseParams::default();
        let mut s = SynapseState::new(p.v_w_thr);
        for k in 1..=10 {
            s.evolve(k as f64 * 1e-3, &p).unwrap();
            assert_eq!(s.v_g, p.v_w_thr);
        }
    }

    #[test]
    fn evolve_latch_closed_form_matches_fine_integration() {
        let p = SynapseParams::default();
        let mut s = SynapseState::new(0.7);
        s.evolve(2e-3, &p).unwrap();
        let expected = 0.6 + 0.1 * std::f64::consts::E;
        assert_relative_eq!(s.v_g, expected, max_relative = 1e-12);

        // Independent oracle: forward-Euler integration of the latch ODE at
        // a step far below tau_w.
        let mut v = 0.7_f64;
        let dt = 1e-8;
        let n = (2e-3 / dt) as usize;
        for _ in 0..n {
            v += (v - p.v_w_thr) / p.tau_w * dt;
        }
        assert_relative_eq!(s.v_g, v, max_relative = 1e-5);
    }

    #[test]
    fn evolve_rejects_backwards_time() {
        let p = SynapseParams::default();
        let mut s = SynapseState::new(0.5);
        s.evolve(1e-3, &p).unwrap();
        assert!(matches!(
            s.evolve(0.5e-3, &p),
            Err(ModelError::TimeReversed { .. })
        ));
    }

    #[test]
    fn on_pre_with_no_post_trace_only_arms_trace() {
        let p = no_latch();
        let mut s = SynapseState::new(0.8);
        s.on_pre(1e-6, &p).unwrap();
        assert_eq!(s.v_g, 0.8);
        assert_eq!(s.trace_pre, p.a_plus);
    }

    #[test]
    fn on_pre_after_post_depresses_by_sampled_trace() {
        let p = no_latch();
        let mut s = SynapseState::new(0.8);
        s.on_post(0.0, &p).unwrap();
        let before = s.v_g;
        s.on_pre(1e-6, &p).unwrap();
        let delta = s.v_g - before;
        // -gamma * a_minus * exp(-1/2) = -60.65 mV
        assert_relative_eq!(delta, -60.65e-3, max_relative = 1e-3);
        assert_relative_eq!(delta, stdp_delta(-1e-6, &p), max_relative = 1e-12);
    }

    #[test]
    fn on_pre_clamps_at_ground() {
        let p = no_latch();
        let mut s = SynapseState::new(0.0);
        s.on_post(0.0, &p).unwrap();
        s.on_pre(1e-7, &p).unwrap();
        assert_eq!(s.v_g, 0.0);
    }

    #[test]
    fn on_post_with_no_pre_trace_only_arms_trace() {
        let p = no_latch();
        let mut s = SynapseState::new(0.4);
        s.on_post(1e-6, &p).unwrap();
        assert_eq!(s.v_g, 0.4);
        assert_eq!(s.trace_post, p.a_minus);
    }

    #[test]
    fn on_post_one_tau_after_pre_gains_over_e() {
        let p = no_latch();
        let mut s = SynapseState::new(0.4);
        s.on_pre(0.0, &p).unwrap();
        let before = s.v_g;
        s.on_post(p.tau_p, &p).unwrap();
        assert_relative_eq!(
            s.v_g - before,
            p.gamma * p.a_plus / std::f64::consts::E,
            max_relative = 1e-12
        );
    }

    #[test]
    fn on_post_immediately_after_pre_is_maximum_update() {
        let p = no_latch();
        let mut s = SynapseState::new(0.4);
        s.on_pre(1e-6, &p).unwrap();
        let before = s.v_g;
        s.on_post(1e-6, &p).unwrap();
        assert_relative_eq!(s.v_g - before, p.gamma * p.a_plus, max_relative = 1e-12);
    }

    #[test]
    fn stdp_delta_far_tail_vanishes() {
        let p = SynapseParams::default();
        let d = stdp_delta(100.0 * p.tau_p, &p);
        assert!(d.abs() < 1e-40 * p.gamma * p.a_plus);
    }

    #[test]
    fn stdp_delta_minus_one_microsecond() {
        let p = SynapseParams::default();
        assert_relative_eq!(stdp_delta(-1e-6, &p), -60.65e-3, max_relative = 1e-3);
    }

    #[test]
    fn stdp_delta_tie_breaks_to_max_potentiation() {
        let p = SynapseParams::default();
        assert_eq!(stdp_delta(0.0, &p), p.gamma * p.a_plus);
    }

    #[test]
    fn synaptic_current_examples() {
        let p = SynapseParams::default();
        let lrs = SynapseState::new(p.v_dd);
        let hrs = SynapseState::new(0.0);
        assert_eq!(lrs.synaptic_current(0.0, &p), 0.0);
        assert_relative_eq!(lrs.synaptic_current(0.6, &p), 1.5e-6, max_relative = 1e-12);
        assert_relative_eq!(hrs.synaptic_current(0.6, &p), 37.5e-9, max_relative = 1e-12);
    }

    #[test]
    fn long_term_state_classification() {
        let p = SynapseParams::default();
        assert_eq!(
            SynapseState::new(p.v_dd).long_term_state(&p),
            LongTermState::Lrs
        );
        assert_eq!(
            SynapseState::new(0.0).long_term_state(&p),
            LongTermState::Hrs
        );
        assert_eq!(
            SynapseState::new(p.v_w_thr).long_term_state(&p),
            LongTermState::Undecided
        );
    }

    #[test]
    fn per_spike_energy_is_calibrated_exactly() {
        let p = SynapseParams::default();
        let lrs = SynapseState::new(p.v_dd);
        // Exact equality by construction of the overhead constant.
        assert_eq!(lrs.per_spike_energy_report(0.6, &p), E_SPIKE_LRS_600MV);
    }

    #[test]
    fn per_spike_energy_zero_drive_is_overhead_only() {
        let p = SynapseParams::default();
        let s = SynapseState::new(0.3);
        assert_eq!(s.per_spike_energy_report(0.0, &p), p.e_overhead);
    }

    #[test]
    fn per_spike_energy_hrs_ohmic_part() {
        let p = SynapseParams::default();
        let hrs = SynapseState::new(0.0);
        let ohmic = hrs.per_spike_energy_report(0.6, &p) - p.e_overhead;
        // 0.6² × 100 ns / 16 MΩ = 2.25 fJ.
        assert_relative_eq!(ohmic, 2.25e-15, max_relative = 1e-12);
    }

    #[test]
    fn repeated_pairings_depress_monotonically() {
        let p = SynapseParams::default(); // latch on
        let mut s = SynapseState::new(p.v_dd);
        let mut last = s.v_g;
        let mut clamped = false;
        for j in 0..20 {
            let base = j as f64 * 50e-6;
            s.on_post(base, &p).unwrap();
            s.on_pre(base + 1e-6, &p).unwrap();
            if clamped {
                assert_eq!(s.v_g, 0.0);
            } else if s.v_g == 0.0 {
                clamped = true;
            } else {
                assert!(s.v_g < last, "pairing {j}: {} !< {last}", s.v_g);
            }
            last = s.v_g;
        }
    }

    #[test]
    fn latch_reaches_rails_within_ten_tau() {
        let p = SynapseParams::default();
        let mut hi = SynapseState::new(p.v_w_thr + 0.01);
        let mut lo = SynapseState::new(p.v_w_thr - 0.01);
        hi.evolve(10.0 * p.tau_w, &p).unwrap();
        lo.evolve(10.0 * p.tau_w, &p).unwrap();
        assert!(hi.v_g >= p.v_dd - RAIL_MARGIN);
        assert!(lo.v_g <= RAIL_MARGIN);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_params() -> impl Strategy<Value = SynapseParams> {
            (
                0.1..1.0f64,     // a_plus
                0.1..1.0f64,     // a_minus
                0.5e-6..5e-6f64, // tau_p
                0.5e-6..5e-6f64, // tau_m
                0.05..0.5f64,    // gamma
            )
                .prop_map(|(a_plus, a_minus, tau_p, tau_m, gamma)| SynapseParams {
                    a_plus,
                    a_minus,
                    tau_p,
                    tau_m,
                    gamma,
                    tau_w: 1000.0 * tau_p.max(tau_m),
                    latch_enabled: false,
                    ..SynapseParams::default()
                })
        }

        proptest! {
            #[test]
            fn stdp_sign_correct(p in arb_params(), dt in -20e-6..20e-6f64) {
                let d = stdp_delta(dt, &p);
                if dt >= 0.0 {
                    prop_assert!(d > 0.0);
                } else {
                    prop_assert!(d < 0.0);
                }
            }

            #[test]
            fn stdp_window_strictly_shrinks(p in arb_params(), dt in 1e-9..10e-6f64, scale in 1.01..4.0f64) {
                prop_assert!(stdp_delta(dt * scale, &p).abs() < stdp_delta(dt, &p).abs());
                prop_assert!(stdp_delta(-dt * scale, &p).abs() < stdp_delta(-dt, &p).abs());
            }

            #[test]
            fn event_path_matches_closed_form(p in arb_params(), dt in -10e-6..10e-6f64) {
                // Single pair on a quiet synapse, mid-rail so no clamp engages.
                let mut s = SynapseState::new(0.6);
                let t0 = 1e-6;
                let measured = if dt >= 0.0 {
                    s.on_pre(t0, &p).unwrap();
                    let before = s.v_g;
                    s.on_post(t0 + dt, &p).unwrap();
                    s.v_g - before
                } else {
                    s.on_post(t0, &p).unwrap();
                    let before = s.v_g;
                    s.on_pre(t0 - dt, &p).unwrap();
                    s.v_g - before
                };
                let expected = stdp_delta(dt, &p);
                // The measured step is exact up to one rounding of the
                // stored voltage (0.6 V scale), which dominates when the
                // expected step is many orders smaller than the store.
                let tol = 1e-9 * expected.abs() + 8.0 * f64::EPSILON * 0.6;
                prop_assert!(
                    (measured - expected).abs() <= tol,
                    "measured {measured:e}, expected {expected:e}"
                );
            }

            #[test]
            fn update_is_additive_in_state(p in arb_params(), dt in -8e-6..8e-6f64, v0 in 0.5..0.7f64) {
                // The same pairing applied at two different starting voltages
                // moves both by the same amount. The start range keeps the
                // worst-case step (|Δ| < γ·a < 0.5) away from both rails so
                // the clamp never engages.
                let run = |start: f64| {
                    let mut s = SynapseState::new(start);
                    if dt >= 0.0 {
                        s.on_pre(0.0, &p).unwrap();
                        s.on_post(dt, &p).unwrap();
                    } else {
                        s.on_post(0.0, &p).unwrap();
                        s.on_pre(-dt, &p).unwrap();
                    }
                    s.v_g - start
                };
                let d1 = run(v0);
                let d2 = run(0.5);
                prop_assert!((d1 - d2).abs() < 1e-12);
            }

            #[test]
            fn latch_bistability_reaches_rails(margin in 3e-5..0.59f64, above in proptest::bool::ANY) {
                let p = SynapseParams::default();
                // Margins below v_dd·e⁻¹⁰ ≈ 27 µV cannot reach the rail in
                // 10·tau_w by construction of the exponential escape.
                let v0 = if above { p.v_w_thr + margin } else { p.v_w_thr - margin };
                let mut s = SynapseState::new(v0);
                let mut prev = s.v_g;
                for k in 1..=20 {
                    s.evolve(k as f64 * 0.5 * p.tau_w, &p).unwrap();
                    if above {
                        prop_assert!(s.v_g >= prev);
                    } else {
                        prop_assert!(s.v_g <= prev);
                    }
                    prev = s.v_g;
                }
                if above {
                    prop_assert!(s.v_g >= p.v_dd - RAIL_MARGIN);
                } else {
                    prop_assert!(s.v_g <= RAIL_MARGIN);
                }
            }

            #[test]
            fn latch_preserves_ordering(va in 0.0..1.2f64, vb in 0.0..1.2f64, dt in 1e-6..20e-3f64) {
                let p = SynapseParams::default();
                let (hi0, lo0) = if va >= vb { (va, vb) } else { (vb, va) };
                let mut hi = SynapseState::new(hi0);
                let mut lo = SynapseState::new(lo0);
                hi.evolve(dt, &p).unwrap();
                lo.evolve(dt, &p).unwrap();
                prop_assert!(hi.v_g >= lo.v_g);
            }

            #[test]
            fn state_clamped_under_random_events(
                v0 in 0.0..1.2f64,
                steps in prop::collection::vec((0_u8..3, 1e-9..60e-6f64), 1..100),
                latch in proptest::bool::ANY,
            ) {
                let p = SynapseParams {
                    latch_enabled: latch,
                    ..SynapseParams::default()
                };
                let mut s = SynapseState::new(v0);
                let mut t = 0.0;
                for (op, gap) in steps {
                    t += gap;
                    match op {
                        0 => s.on_pre(t, &p).unwrap(),
                        1 => s.on_post(t, &p).unwrap(),
                        _ => s.evolve(t, &p).unwrap(),
                    }
                    prop_assert!((0.0..=p.v_dd).contains(&s.v_g));
                    prop_assert!((0.0..=p.a_plus.max(p.a_minus)).contains(&s.trace_pre));
                    prop_assert!((0.0..=p.a_plus.max(p.a_minus)).contains(&s.trace_post));
                }
            }
        }
    }
}
