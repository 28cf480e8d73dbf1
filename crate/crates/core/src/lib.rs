//! Simulation of RIS-assisted secure transmission with artificial noise.
//!
//! A base station sends a communication signal (CS) toward Bob and
//! artificial noise (AN) toward Eve through a binary-phase RIS whose elements
//! are split into a Bob-oriented and an Eve-oriented partition. The crate
//! builds the free-space channel scene, optimizes the phases per partition,
//! and sweeps the power split `α` and partition size `K_b` to produce
//! capacity and secrecy-capacity surfaces.

pub mod cascade;
pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod optimizer;
pub mod output;
pub mod scene;
pub mod signal;
pub mod sweep;
pub mod trends;
pub mod units;
pub mod verify;

pub use cascade::{all_gains, cascaded_gain, partition_gains, CascadeGains, PhaseConfig};
pub use channel::{element_gain, generate_channels, path_coefficient, ChannelSet};
pub use error::{Error, Result};
pub use geometry::Vec3;
pub use metrics::{capacity, evaluate, secrecy_capacity, sinr, LinkMetrics};
pub use optimizer::{
    brute_force_partition, brute_force_secrecy, optimize_partitioned, random_config, Init, Mode, Objective,
    OptimizeReport, OptimizerSettings,
};
pub use scene::{Scene, SceneSpec, SystemParams};
pub use signal::{estimate_sinr, simulate_received, SignalFrame, SymbolKind};
pub use sweep::{run_sweep, SweepGrid, SweepRecord};
