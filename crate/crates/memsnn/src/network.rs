//! Event-driven winner-take-all spiking network with plastic synapses.
//!
//! Rate-encoded inputs drive a full crossbar of synapses into leaky
//! integrate-and-fire outputs. A hard winner-take-all rule lets at most one
//! output fire per input event; the winner's lateral inhibition resets every
//! membrane and silences all outputs for a refractory window, so each window
//! is a fresh race decided by drive. Training presents labelled images with
//! a teacher injection into the labelled neuron; evaluation runs frozen
//! weights with plasticity off, so the test set can be sharded across
//! threads and merged deterministically.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, CLASSES, PIXELS};
use crate::error::ModelError;
use crate::rng::{channel_rng, poisson_train, DOMAIN_EVAL, DOMAIN_TRAIN};
use crate::synapse::{LongTermState, SynapseParams, SynapseState};

/// Training-sample cap applied by default in bistable mode.
pub const BISTABLE_DEFAULT_SAMPLES: usize = 500;
/// Latch-settling horizon after bistable training, in units of `tau_w`.
pub const SETTLE_TAU_FACTOR: f64 = 10.0;

/// Synapse operating regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Mode {
    /// Weights move continuously; the weak latch is disabled.
    Analog,
    /// The weak latch drifts every weight to a rail; after training the
    /// network settles and weights quantize to two values.
    Bistable,
}

/// Leaky integrate-and-fire output neuron parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NeuronParams {
    /// Firing threshold in accumulated weight units.
    pub threshold: f64,
    /// Membrane leak time constant (s).
    pub leak_tau: f64,
    /// Refractory / winner-take-all suppression window (s).
    pub refractory: f64,
}

impl Default for NeuronParams {
    fn default() -> Self {
        Self {
            threshold: 8.0,
            leak_tau: 10e-6,
            refractory: 2e-6,
        }
    }
}

/// Full description of a network run.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// Input line count.
    pub n_in: usize,
    /// Output neuron count.
    pub n_out: usize,
    /// Shared synapse parameters.
    pub synapse: SynapseParams,
    /// Presentation window per image (s).
    pub sample_duration: f64,
    /// Poisson rate of a full-intensity pixel (Hz).
    pub max_input_rate: f64,
    pub neuron: NeuronParams,
    /// Membrane injection added to the labelled neuron at each input event
    /// while training.
    pub teacher_strength: f64,
    /// Weight mapped to v_g = 0.
    pub w_min: f64,
    /// Weight mapped to v_g = v_dd.
    pub w_max: f64,
    pub mode: Mode,
    /// Run seed; every random stream derives from it.
    pub seed: u64,
    /// Silent gap between samples (s), at least 5·tau_p so traces decay.
    pub inter_sample_gap: f64,
    /// Initial gate voltage of every synapse (V).
    pub v_g_init: f64,
    /// Training-history row cadence, in samples.
    pub history_stride: usize,
}

impl Default for NetworkConfig {
    /// The tuned analog classification profile.
    ///
    /// Relative to the bare synapse defaults, training a rate-coded crossbar
    /// wants many tiny steps instead of few coarse ones: a short
    /// potentiation window keeps the per-spike potentiation proportional to
    /// the pixel rate, a small depression amplitude keeps the net drift
    /// positive for every active pixel, and a small gamma spreads learning
    /// over a full epoch so templates stay graded instead of clamping.
    fn default() -> Self {
        let synapse = SynapseParams {
            latch_enabled: false,
            tau_p: 0.4e-6,
            a_minus: 0.05,
            gamma: 1.2e-3,
            ..SynapseParams::default()
        };
        Self {
            n_in: PIXELS,
            n_out: CLASSES,
            synapse,
            sample_duration: 50e-6,
            max_input_rate: 1e6,
            neuron: NeuronParams::default(),
            teacher_strength: 1.0,
            w_min: 0.01,
            w_max: 1.0,
            mode: Mode::Analog,
            seed: 42,
            inter_sample_gap: 10e-6,
            v_g_init: 0.0,
            history_stride: 10,
        }
    }
}

impl NetworkConfig {
    /// Checks the documented invariants.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.synapse.validate()?;
        if self.n_in == 0 {
            return Err(ModelError::InvalidParam("n_in must be positive".into()));
        }
        if self.n_out == 0 || self.n_out > CLASSES {
            return Err(ModelError::InvalidParam(format!(
                "n_out must lie in 1..={CLASSES}, got {}",
                self.n_out
            )));
        }
        if !(self.sample_duration.is_finite() && self.sample_duration > 0.0) {
            return Err(ModelError::InvalidParam(format!(
                "sample_duration must be positive, got {}",
                self.sample_duration
            )));
        }
        if !(self.max_input_rate.is_finite() && self.max_input_rate >= 0.0) {
            return Err(ModelError::InvalidParam(format!(
                "max_input_rate must be non-negative, got {}",
                self.max_input_rate
            )));
        }
        let n = &self.neuron;
        if !(n.threshold.is_finite() && n.threshold > 0.0)
            || !(n.leak_tau.is_finite() && n.leak_tau > 0.0)
            || !(n.refractory.is_finite() && n.refractory > 0.0)
        {
            return Err(ModelError::InvalidParam(format!(
                "neuron parameters must be positive: threshold {}, leak_tau {}, refractory {}",
                n.threshold, n.leak_tau, n.refractory
            )));
        }
        if !(self.teacher_strength.is_finite() && self.teacher_strength >= 0.0) {
            return Err(ModelError::InvalidParam(format!(
                "teacher_strength must be non-negative, got {}",
                self.teacher_strength
            )));
        }
        if !(self.w_min > 0.0 && self.w_min < self.w_max && self.w_max <= 1.0) {
            return Err(ModelError::InvalidParam(format!(
                "weights need 0 < w_min < w_max <= 1, got [{}, {}]",
                self.w_min, self.w_max
            )));
        }
        if !(self.inter_sample_gap.is_finite() && self.inter_sample_gap >= 5.0 * self.synapse.tau_p)
        {
            return Err(ModelError::InvalidParam(format!(
                "inter_sample_gap must be at least 5·tau_p = {} s, got {}",
                5.0 * self.synapse.tau_p,
                self.inter_sample_gap
            )));
        }
        if !(0.0..=self.synapse.v_dd).contains(&self.v_g_init) {
            return Err(ModelError::InvalidParam(format!(
                "v_g_init must lie in [0, v_dd], got {}",
                self.v_g_init
            )));
        }
        if self.history_stride == 0 {
            return Err(ModelError::InvalidParam(
                "history_stride must be at least 1".into(),
            ));
        }
        let latch_wanted = self.mode == Mode::Bistable;
        if self.synapse.latch_enabled != latch_wanted {
            return Err(ModelError::InvalidParam(format!(
                "latch_enabled = {} conflicts with mode {:?}",
                self.synapse.latch_enabled, self.mode
            )));
        }
        Ok(())
    }

    /// Affine weight read-out of a gate voltage.
    pub fn weight_of(&self, v_g: f64) -> f64 {
        self.w_min + (self.w_max - self.w_min) * v_g / self.synapse.v_dd
    }
}

/// Poisson spike trains for one image, one train per input line.
///
/// Input `i` fires at rate `pixel_i/16 · max_input_rate` over the sample
/// window, drawn from the stream addressed by (seed, domain, presentation,
/// channel) — deterministic and independent of evaluation order.
pub fn encode_image(
    pixels: &[u8],
    cfg: &NetworkConfig,
    domain: u64,
    presentation: u64,
) -> Result<Vec<Vec<f64>>, ModelError> {
    if pixels.len() != cfg.n_in {
        return Err(ModelError::InvalidParam(format!(
            "expected {} pixels, got {}",
            cfg.n_in,
            pixels.len()
        )));
    }
    pixels
        .iter()
        .enumerate()
        .map(|(i, &px)| {
            if px > 16 {
                return Err(ModelError::InvalidParam(format!(
                    "pixel {i} has intensity {px}, outside 0..=16"
                )));
            }
            let rate = f64::from(px) / 16.0 * cfg.max_input_rate;
            let mut rng = channel_rng(cfg.seed, domain, presentation, i as u64);
            Ok(poisson_train(rate, cfg.sample_duration, &mut rng))
        })
        .collect()
}

/// Flattens per-channel spike lists into one (time, channel) stream sorted
/// by time, then channel. Times must be finite, non-decreasing per channel,
/// and inside `[0, duration)`.
fn merge_spikes(spikes: &[Vec<f64>], duration: f64) -> Result<Vec<(f64, usize)>, ModelError> {
    let mut merged = Vec::with_capacity(spikes.iter().map(Vec::len).sum());
    for (i, channel) in spikes.iter().enumerate() {
        let mut prev = 0.0;
        for &t in channel {
            if !t.is_finite() || !(0.0..duration).contains(&t) {
                return Err(ModelError::BadEvents(format!(
                    "input {i}: spike time {t} s outside [0, {duration})"
                )));
            }
            if t < prev {
                return Err(ModelError::BadEvents(format!(
                    "input {i}: spike times not sorted ({t} after {prev})"
                )));
            }
            prev = t;
            merged.push((t, i));
        }
    }
    merged.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(merged)
}

/// Index of the largest count, lowest index on ties.
fn argmax(counts: &[u32]) -> usize {
    let mut best = 0;
    for (k, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = k;
        }
    }
    best
}

/// What one presentation produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    /// Output spikes per neuron.
    pub counts: Vec<u32>,
    /// Every output fire as (absolute time, neuron), in order.
    pub fires: Vec<(f64, usize)>,
}

impl SampleOutcome {
    /// Predicted digit: most spikes, ties to the lowest index.
    pub fn predicted(&self) -> usize {
        argmax(&self.counts)
    }
}

/// One row of the training history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    pub sample_idx: u64,
    /// Fraction of training samples so far whose spike-count argmax matched
    /// the label (teacher on, so this is an optimistic diagnostic).
    pub accuracy_running: f64,
    /// Mean weight across the crossbar.
    pub mean_w: f64,
}

/// History rows collected at the configured stride, plus the final sample.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainHistory {
    pub rows: Vec<HistoryRow>,
}

/// Evaluation outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub accuracy: f64,
    /// Counts indexed by [true label][predicted label].
    pub confusion: [[u32; CLASSES]; CLASSES],
    pub n: usize,
}

/// A live network: crossbar synapse states plus output membranes.
#[derive(Debug, Clone)]
pub struct Network {
    cfg: NetworkConfig,
    /// Row-major: synapse (input i, output k) lives at `i·n_out + k`.
    synapses: Vec<SynapseState>,
    membranes: Vec<f64>,
    /// Time of the last processed input event (s); leak is applied lazily.
    last_event_t: f64,
    /// No output may fire before this time.
    wta_until: f64,
    /// Absolute clock (s); advances by sample_duration + gap per sample.
    t: f64,
    presentations: u64,
}

impl Network {
    pub fn new(cfg: NetworkConfig) -> Result<Self, ModelError> {
        cfg.validate()?;
        let synapses = vec![SynapseState::new(cfg.v_g_init); cfg.n_in * cfg.n_out];
        let membranes = vec![0.0; cfg.n_out];
        Ok(Self {
            synapses,
            membranes,
            last_event_t: 0.0,
            wta_until: f64::NEG_INFINITY,
            t: 0.0,
            presentations: 0,
            cfg,
        })
    }

    /// Rebuilds a network from persisted gate voltages with quiet traces.
    pub fn from_snapshot(
        cfg: NetworkConfig,
        v_g: &[f64],
        clock: f64,
        presentations: u64,
    ) -> Result<Self, ModelError> {
        cfg.validate()?;
        if v_g.len() != cfg.n_in * cfg.n_out {
            return Err(ModelError::InvalidParam(format!(
                "snapshot holds {} voltages, network needs {}",
                v_g.len(),
                cfg.n_in * cfg.n_out
            )));
        }
        if !(clock.is_finite() && clock >= 0.0) {
            return Err(ModelError::InvalidParam(format!(
                "snapshot clock must be non-negative, got {clock}"
            )));
        }
        for &v in v_g {
            if !(0.0..=cfg.synapse.v_dd).contains(&v) {
                return Err(ModelError::InvalidParam(format!(
                    "snapshot voltage {v} outside [0, {}]",
                    cfg.synapse.v_dd
                )));
            }
        }
        let synapses = v_g
            .iter()
            .map(|&v| SynapseState {
                v_g: v,
                trace_pre: 0.0,
                trace_post: 0.0,
                t_last: clock,
            })
            .collect();
        let membranes = vec![0.0; cfg.n_out];
        Ok(Self {
            synapses,
            membranes,
            last_event_t: clock,
            wta_until: f64::NEG_INFINITY,
            t: clock,
            presentations,
            cfg,
        })
    }

    pub fn cfg(&self) -> &NetworkConfig {
        &self.cfg
    }

    /// Absolute simulation clock (s).
    pub fn clock(&self) -> f64 {
        self.t
    }

    /// Samples presented with training on since construction.
    pub fn presentations(&self) -> u64 {
        self.presentations
    }

    /// Gate voltages evolved to the current clock, row-major.
    pub fn v_g_snapshot(&self) -> Vec<f64> {
        let p = &self.cfg.synapse;
        self.synapses
            .iter()
            .map(|s| {
                let mut s = *s;
                s.evolve(self.t, p).expect("clock precedes synapse state");
                s.v_g
            })
            .collect()
    }

    /// Weights at the current clock, row-major.
    pub fn weight_matrix(&self) -> Vec<f64> {
        self.v_g_snapshot()
            .into_iter()
            .map(|v| self.cfg.weight_of(v))
            .collect()
    }

    /// One weight map per output neuron, each `n_in` long in input order.
    pub fn export_weight_maps(&self) -> Vec<Vec<f64>> {
        let w = self.weight_matrix();
        (0..self.cfg.n_out)
            .map(|k| {
                (0..self.cfg.n_in)
                    .map(|i| w[i * self.cfg.n_out + k])
                    .collect()
            })
            .collect()
    }

    fn sync_synapses(&mut self) -> Result<(), ModelError> {
        let p = self.cfg.synapse;
        for s in &mut self.synapses {
            s.evolve(self.t, &p)?;
        }
        Ok(())
    }

    /// Runs one sample's events through the network.
    ///
    /// Spike times are sample-relative; the sample occupies
    /// `[clock, clock + sample_duration)` and the clock ends up at the
    /// window's end. Per event: membranes leak, the spiking input's row
    /// drives each membrane by its pre-update weight, plasticity and teacher
    /// apply when training, then at most one eligible above-threshold neuron
    /// fires (highest membrane, lowest index on ties). The fire resets every
    /// membrane — lateral inhibition — and suppresses all outputs for the
    /// refractory window.
    pub fn present_sample(
        &mut self,
        spikes: &[Vec<f64>],
        label: Option<u8>,
        train: bool,
    ) -> Result<SampleOutcome, ModelError> {
        if spikes.len() != self.cfg.n_in {
            return Err(ModelError::BadEvents(format!(
                "expected {} spike channels, got {}",
                self.cfg.n_in,
                spikes.len()
            )));
        }
        if let Some(l) = label {
            if usize::from(l) >= self.cfg.n_out {
                return Err(ModelError::InvalidParam(format!(
                    "label {l} outside 0..{}",
                    self.cfg.n_out
                )));
            }
        }
        let merged = merge_spikes(spikes, self.cfg.sample_duration)?;
        let p = self.cfg.synapse;
        let (n_in, n_out) = (self.cfg.n_in, self.cfg.n_out);
        let t0 = self.t;
        let mut counts = vec![0u32; n_out];
        let mut fires = Vec::new();
        for &(ts, i) in &merged {
            let t = t0 + ts;
            let leak = (-(t - self.last_event_t) / self.cfg.neuron.leak_tau).exp();
            for m in &mut self.membranes {
                *m *= leak;
            }
            self.last_event_t = t;
            let row = i * n_out;
            for k in 0..n_out {
                self.synapses[row + k].evolve(t, &p)?;
                self.membranes[k] += self.cfg.weight_of(self.synapses[row + k].v_g);
            }
            if train {
                for k in 0..n_out {
                    self.synapses[row + k].on_pre(t, &p)?;
                }
                if let Some(l) = label {
                    self.membranes[usize::from(l)] += self.cfg.teacher_strength;
                }
            }
            if t >= self.wta_until {
                let mut winner = None;
                for (k, &m) in self.membranes.iter().enumerate() {
                    if m >= self.cfg.neuron.threshold
                        && winner.is_none_or(|w: usize| m > self.membranes[w])
                    {
                        winner = Some(k);
                    }
                }
                if let Some(k) = winner {
                    if train {
                        for j in 0..n_in {
                            self.synapses[j * n_out + k].on_post(t, &p)?;
                        }
                    }
                    for m in &mut self.membranes {
                        *m = 0.0;
                    }
                    self.wta_until = t + self.cfg.neuron.refractory;
                    counts[k] += 1;
                    fires.push((t, k));
                }
            }
        }
        self.t = t0 + self.cfg.sample_duration;
        Ok(SampleOutcome { counts, fires })
    }

    fn history_row(
        &mut self,
        sample_idx: u64,
        correct: u64,
        presented: u64,
    ) -> Result<HistoryRow, ModelError> {
        self.sync_synapses()?;
        let w = self.weight_matrix();
        let mean_w = w.iter().sum::<f64>() / w.len() as f64;
        Ok(HistoryRow {
            sample_idx,
            accuracy_running: correct as f64 / presented as f64,
            mean_w,
        })
    }

    /// Presents the dataset in order with the teacher on.
    ///
    /// `max_samples` caps total presentations across epochs; bistable mode
    /// defaults the cap to [`BISTABLE_DEFAULT_SAMPLES`]. After training,
    /// bistable networks settle for `SETTLE_TAU_FACTOR · tau_w` and every
    /// weight quantizes to a rail.
    pub fn train(
        &mut self,
        ds: &Dataset,
        epochs: usize,
        max_samples: Option<usize>,
    ) -> Result<TrainHistory, ModelError> {
        if ds.is_empty() {
            return Err(ModelError::Empty("training dataset"));
        }
        if self.cfg.n_in != PIXELS {
            return Err(ModelError::InvalidParam(format!(
                "dataset images have {PIXELS} pixels but the network has {} inputs",
                self.cfg.n_in
            )));
        }
        let cap = max_samples.or(match self.cfg.mode {
            Mode::Bistable => Some(BISTABLE_DEFAULT_SAMPLES),
            Mode::Analog => None,
        });
        let mut history = TrainHistory::default();
        let mut last_recorded = None;
        let mut correct = 0u64;
        let mut presented = 0u64;
        'epochs: for _ in 0..epochs {
            for sample in &ds.samples {
                if cap.is_some_and(|c| presented >= c as u64) {
                    break 'epochs;
                }
                let spikes =
                    encode_image(&sample.pixels, &self.cfg, DOMAIN_TRAIN, self.presentations)?;
                let outcome = self.present_sample(&spikes, Some(sample.label), true)?;
                presented += 1;
                self.presentations += 1;
                if outcome.predicted() == usize::from(sample.label) {
                    correct += 1;
                }
                self.t += self.cfg.inter_sample_gap;
                let idx = presented - 1;
                if idx.is_multiple_of(self.cfg.history_stride as u64) {
                    history
                        .rows
                        .push(self.history_row(idx, correct, presented)?);
                    last_recorded = Some(idx);
                }
            }
        }
        if presented > 0 && last_recorded != Some(presented - 1) {
            history
                .rows
                .push(self.history_row(presented - 1, correct, presented)?);
        }
        self.sync_synapses()?;
        if self.cfg.mode == Mode::Bistable && presented > 0 {
            self.settle_and_quantize()?;
        }
        Ok(history)
    }

    /// Lets the latch run for its settling horizon, then snaps every gate
    /// voltage to a rail (nearest rail in the measure-zero undecided case).
    fn settle_and_quantize(&mut self) -> Result<(), ModelError> {
        let p = self.cfg.synapse;
        self.t += SETTLE_TAU_FACTOR * p.tau_w;
        self.sync_synapses()?;
        for s in &mut self.synapses {
            s.v_g = match s.long_term_state(&p) {
                LongTermState::Lrs => p.v_dd,
                LongTermState::Hrs => 0.0,
                LongTermState::Undecided => {
                    if s.v_g >= p.v_w_thr {
                        p.v_dd
                    } else {
                        0.0
                    }
                }
            };
        }
        Ok(())
    }

    /// Accuracy and confusion over a dataset with frozen weights.
    ///
    /// Each sample starts from rest and is simulated independently, so the
    /// set shards across `workers` threads by index with a deterministic
    /// merge: the result is bit-identical for any worker count.
    pub fn evaluate(&self, ds: &Dataset, workers: usize) -> Result<EvalResult, ModelError> {
        if ds.is_empty() {
            return Err(ModelError::Empty("evaluation dataset"));
        }
        if workers == 0 {
            return Err(ModelError::InvalidParam(
                "worker count must be positive".into(),
            ));
        }
        if self.cfg.n_in != PIXELS {
            return Err(ModelError::InvalidParam(format!(
                "dataset images have {PIXELS} pixels but the network has {} inputs",
                self.cfg.n_in
            )));
        }
        let weights = self.weight_matrix();
        let cfg = &self.cfg;
        let n = ds.len();
        let shards = std::thread::scope(|scope| {
            let weights = &weights;
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    scope.spawn(move || {
                        let mut correct = 0u64;
                        let mut confusion = [[0u32; CLASSES]; CLASSES];
                        for idx in (w..n).step_by(workers) {
                            let sample = &ds.samples[idx];
                            let spikes =
                                encode_image(&sample.pixels, cfg, DOMAIN_EVAL, idx as u64)?;
                            let counts = infer_counts(weights, &spikes, cfg)?;
                            let pred = argmax(&counts);
                            confusion[usize::from(sample.label)][pred] += 1;
                            if pred == usize::from(sample.label) {
                                correct += 1;
                            }
                        }
                        Ok((correct, confusion))
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("evaluation worker panicked"))
                .collect::<Result<Vec<_>, ModelError>>()
        })?;
        let mut correct = 0u64;
        let mut confusion = [[0u32; CLASSES]; CLASSES];
        for (c, shard) in shards {
            correct += c;
            for (sum_row, row) in confusion.iter_mut().zip(shard) {
                for (cell, v) in sum_row.iter_mut().zip(row) {
                    *cell += v;
                }
            }
        }
        Ok(EvalResult {
            accuracy: correct as f64 / n as f64,
            confusion,
            n,
        })
    }
}

/// Output spike counts of a frozen-weight network for one encoded sample.
///
/// Same event loop as training minus plasticity and teacher; membranes start
/// at rest and the winner-take-all window starts open.
pub fn infer_counts(
    weights: &[f64],
    spikes: &[Vec<f64>],
    cfg: &NetworkConfig,
) -> Result<Vec<u32>, ModelError> {
    if weights.len() != cfg.n_in * cfg.n_out {
        return Err(ModelError::InvalidParam(format!(
            "weight matrix holds {} entries, network needs {}",
            weights.len(),
            cfg.n_in * cfg.n_out
        )));
    }
    if spikes.len() != cfg.n_in {
        return Err(ModelError::BadEvents(format!(
            "expected {} spike channels, got {}",
            cfg.n_in,
            spikes.len()
        )));
    }
    let merged = merge_spikes(spikes, cfg.sample_duration)?;
    let mut membranes = vec![0.0; cfg.n_out];
    let mut counts = vec![0u32; cfg.n_out];
    let mut last_t = 0.0;
    let mut wta_until = f64::NEG_INFINITY;
    for &(t, i) in &merged {
        let leak = (-(t - last_t) / cfg.neuron.leak_tau).exp();
        for m in &mut membranes {
            *m *= leak;
        }
        last_t = t;
        let row = i * cfg.n_out;
        for (k, m) in membranes.iter_mut().enumerate() {
            *m += weights[row + k];
        }
        if t >= wta_until {
            let mut winner = None;
            for (k, &m) in membranes.iter().enumerate() {
                if m >= cfg.neuron.threshold && winner.is_none_or(|w: usize| m > membranes[w]) {
                    winner = Some(k);
                }
            }
            if let Some(k) = winner {
                membranes.fill(0.0);
                wta_until = t + cfg.neuron.refractory;
                counts[k] += 1;
            }
        }
    }
    Ok(counts)
}
