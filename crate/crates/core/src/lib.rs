//! Thresholded activations of artificial neural networks, modelled as
//! discrete-time Poisson arrival processes.
//!
//! The pipeline is: capture the activations of one hidden layer while a
//! network processes a dataset ([`netlab`]), binarize them into spike trains
//! ([`spikes`]), fit a per-node arrival rate ([`process`]) and run the
//! assumption-testing battery ([`stats`], [`battery`]), then summarize the
//! layer with the firing-rate / Fano-factor indicators ([`indicators`]).
//!
//! Time is always the sample index: one processed sample is one time step.

pub mod battery;
pub mod error;
pub mod indicators;
pub mod netlab;
pub mod par;
pub mod process;
pub mod rng;
pub mod spikes;
pub mod stats;
pub mod trace_io;

pub use error::{Error, Result};
pub use spikes::{ActivationTrace, CountPath, IsiSequence, SpikeMatrix, SpikeTrain, TraceMeta};
