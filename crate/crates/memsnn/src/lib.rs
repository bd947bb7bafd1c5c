//! Behavioral model of a memristive synapse and the network built from it.
//!
//! The crate covers three layers:
//!
//! * **Device** — a CMOS memristor emulator with a threshold-linear
//!   conductance and a storage capacitor ([`memristor`]), wrapped by a
//!   pair-based plasticity rule and an optional weak latch ([`synapse`]).
//! * **Network** — an event-driven winner-take-all spiking layer that
//!   learns digit classes from rate-coded images ([`network`]), fed by the
//!   loaders in [`data`] and the deterministic streams in [`rng`]).
//! * **System** — a closed-form energy model of a crossbar accelerator
//!   built from such synapses ([`energy`]).
//!
//! [`experiments`] scripts the headline measurements, [`config`] layers
//! TOML files and environment overrides onto the built-in defaults, and
//! [`io`] renders every artefact the CLI writes.

pub mod config;
pub mod data;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod io;
pub mod memristor;
pub mod network;
pub mod rng;
pub mod synapse;
