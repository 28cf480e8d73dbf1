//! The (α, K_b) grid: one optimization per partition size, evaluated at
//! every power split, alongside a seeded random-phase baseline.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{all_gains, CascadeGains, PhaseConfig};
use crate::channel::{generate_channels, ChannelSet};
use crate::error::{Error, Result};
use crate::metrics::{evaluate_gains, LinkMetrics};
use crate::optimizer::{optimize_all_partitions, random_config, OptimizeReport, OptimizerSettings};
use crate::scene::{Scene, SystemParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub alpha_values: Vec<f64>,
    pub k_bob_values: Vec<usize>,
    pub optimizer: OptimizerSettings,
    pub seed: u64,
    /// Random configurations averaged per cell for the baseline columns.
    pub baseline_seeds: usize,
}

impl SweepGrid {
    /// `alpha ∈ {0, 0.01, …, 1}` and `K_b ∈ {0, 1, …, n}`.
    pub fn desk_default(n: usize) -> Self {
        Self {
            alpha_values: evenly_spaced(0.0, 1.0, 101),
            k_bob_values: (0..=n).collect(),
            optimizer: OptimizerSettings::default(),
            seed: 0,
            baseline_seeds: 100,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.alpha_values.is_empty() {
            return Err(Error::InvalidParameter { name: "alpha_values", reason: "empty".into() });
        }
        if self.k_bob_values.is_empty() {
            return Err(Error::InvalidParameter { name: "k_bob_values", reason: "empty".into() });
        }
        if let Some(a) = self.alpha_values.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::InvalidParameter { name: "alpha_values", reason: format!("{a} not in [0, 1]") });
        }
        if !self.alpha_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter { name: "alpha_values", reason: "must be strictly increasing".into() });
        }
        if let Some(&k) = self.k_bob_values.iter().find(|&&k| k > n) {
            return Err(Error::KBobOutOfRange { k_bob: k, n });
        }
        if !self.k_bob_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter { name: "k_bob_values", reason: "must be strictly increasing".into() });
        }
        if self.optimizer.max_passes == 0 {
            return Err(Error::InvalidParameter { name: "max_passes", reason: "must be >= 1".into() });
        }
        Ok(())
    }
}

/// `count` points from `start` to `stop` inclusive, computed as
/// `start + (stop − start)·i/(count − 1)` so that decimal grids land on
/// correctly rounded values.
pub fn evenly_spaced(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let last = (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { stop } else { start + (stop - start) * i as f64 / last })
                .collect()
        }
    }
}

/// Means over the random-phase draws of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub c_bob: f64,
    pub c_eve: f64,
    pub c_secrecy: f64,
    pub draws: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub alpha: f64,
    pub k_bob: usize,
    pub beta: f64,
    pub metrics: LinkMetrics,
    pub gains: CascadeGains,
    pub objective_bob: f64,
    pub objective_eve: f64,
    pub passes: usize,
    pub flips_total: usize,
    /// '0'/'1' per element in row-major grid order.
    pub phase_bits: String,
    pub baseline: BaselineSummary,
}

/// splitmix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one grid cell, from the master seed and the cell's `(α, K_b)`.
pub fn cell_seed(master: u64, alpha: f64, k_bob: usize) -> u64 {
    mix64(master ^ mix64(alpha.to_bits() ^ mix64(k_bob as u64)))
}

pub const SEED_RULE: &str =
    "cell_seed = mix64(seed ^ mix64(alpha_bits ^ mix64(k_bob))); draw j uses mix64(cell_seed + j); mix64 = splitmix64";

/// Converts partition-order phases to a row-major bitstring.
pub fn row_major_bits(config: &PhaseConfig, element_order: &[usize]) -> String {
    let mut bits = vec!['0'; config.len()];
    for (slot, &pos) in element_order.iter().enumerate() {
        if config.theta()[slot] {
            bits[pos] = '1';
        }
    }
    bits.into_iter().collect()
}

/// Inverse of [`row_major_bits`].
pub fn config_from_row_major(bits: &str, k_bob: usize, element_order: &[usize]) -> Result<PhaseConfig> {
    let grid = PhaseConfig::from_bitstring(bits, k_bob)?;
    if grid.len() != element_order.len() {
        return Err(Error::LengthMismatch { expected: element_order.len(), got: grid.len() });
    }
    PhaseConfig::new(element_order.iter().map(|&pos| grid.theta()[pos]).collect(), k_bob)
}

fn baseline(channels: &ChannelSet, params: &SystemParams, alpha: f64, k_bob: usize, draws: usize, seed: u64) -> Result<BaselineSummary> {
    let (mut cb, mut ce, mut cs) = (0.0, 0.0, 0.0);
    for j in 0..draws {
        let cfg = random_config(channels.len(), k_bob, mix64(seed.wrapping_add(j as u64)))?;
        let m = evaluate_gains(&all_gains(channels, &cfg)?, alpha, params)?;
        cb += m.c_bob;
        ce += m.c_eve;
        cs += m.c_secrecy;
    }
    let d = draws.max(1) as f64;
    Ok(BaselineSummary { c_bob: cb / d, c_eve: ce / d, c_secrecy: cs / d, draws })
}

fn record(
    channels: &ChannelSet,
    params: &SystemParams,
    grid: &SweepGrid,
    element_order: &[usize],
    alpha: f64,
    report: &OptimizeReport,
) -> Result<SweepRecord> {
    let k_bob = report.config.k_bob();
    let gains = all_gains(channels, &report.config)?;
    let metrics = evaluate_gains(&gains, alpha, params)?;
    let seed = cell_seed(grid.seed, alpha, k_bob);
    Ok(SweepRecord {
        alpha,
        k_bob,
        beta: report.config.beta(),
        metrics,
        gains,
        objective_bob: report.objective_bob,
        objective_eve: report.objective_eve,
        passes: report.passes,
        flips_total: report.flips_total,
        phase_bits: row_major_bits(&report.config, element_order),
        baseline: baseline(channels, params, alpha, k_bob, grid.baseline_seeds, seed)?,
    })
}

/// Sweeps an already generated channel set. Records come back in
/// `(α outer, K_b inner)` order.
pub fn run_sweep_on(
    channels: &ChannelSet,
    params: &SystemParams,
    grid: &SweepGrid,
    element_order: &[usize],
) -> Result<Vec<SweepRecord>> {
    let n = channels.len();
    grid.validate(n)?;
    let k_max = *grid.k_bob_values.last().expect("validated non-empty");
    let reports = optimize_all_partitions(channels, k_max, &grid.optimizer)?;
    let cells: Vec<(f64, usize)> = grid
        .alpha_values
        .iter()
        .flat_map(|&a| grid.k_bob_values.iter().map(move |&k| (a, k)))
        .collect();
    cells
        .par_iter()
        .map(|&(alpha, k)| record(channels, params, grid, element_order, alpha, &reports[k]))
        .collect()
}

pub fn run_sweep(scene: &Scene, params: &SystemParams, grid: &SweepGrid) -> Result<Vec<SweepRecord>> {
    let channels = generate_channels(scene, params)?;
    run_sweep_on(&channels, params, grid, scene.element_order())
}
