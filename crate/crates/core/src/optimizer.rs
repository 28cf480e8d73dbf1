//! Binary RIS phase selection.
//!
//! [`optimize_partitioned`] is the partition-based coordinate ascent: every
//! Bob-oriented element picks the state in {0, π} that maximizes the Bob
//! objective `|G_{s,b}|²` with the others held fixed, then every Eve-oriented
//! element does the same for `|G_{a,e}|²`. [`random_config`] is the unoptimized
//! baseline, and the two `brute_force_*` functions enumerate all `2^m` phase
//! vectors to serve as ground truth for small surfaces.

use std::ops::Range;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{element_terms, CascadeGains, PhaseConfig, RunningSum};
use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::metrics::evaluate_gains;
use crate::scene::SystemParams;

/// Relative tolerance under which the two phase states count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-15;
/// Relative slack for the monotone-improvement assertion.
pub const MONOTONE_TOLERANCE: f64 = 1e-12;
/// Running sums are rebuilt from scratch after this many flips.
pub const RESYNC_INTERVAL: usize = 64;
pub const PARTITION_ORACLE_CAP: usize = 24;
pub const SECRECY_ORACLE_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Each element visited exactly once, in index order.
    SinglePass,
    /// Repeat passes until one makes no flip or `max_passes` is reached.
    ToConvergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Each partition maximizes its own partial sum `G^{(b)}_{s,b}` / `G^{(e)}_{a,e}`.
    PartitionLocal,
    /// Each partition maximizes the full-surface `|G_{s,b}|²` / `|G_{a,e}|²`.
    FullSum,
}

/// Starting point of the coordinate ascent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// All phases at θ = 0.
    Zero,
    /// Bob phases for `K_b` start from the converged Bob phases for `K_b − 1`
    /// plus the better sign of the new element; Eve phases start at 0.
    Nested,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub mode: Mode,
    pub max_passes: usize,
    pub objective: Objective,
    pub init: Init,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { mode: Mode::ToConvergence, max_passes: 10, objective: Objective::PartitionLocal, init: Init::Nested }
    }
}

impl OptimizerSettings {
    pub fn with_init(self, init: Init) -> Self {
        Self { init, ..self }
    }

    pub fn with_mode(self, mode: Mode) -> Self {
        Self { mode, ..self }
    }

    pub fn with_objective(self, objective: Objective) -> Self {
        Self { objective, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.max_passes == 0 {
            return Err(Error::InvalidParameter { name: "max_passes", reason: "must be >= 1".into() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeReport {
    pub config: PhaseConfig,
    /// Bob objective (partition-local or full-sum, per settings) recomputed
    /// from scratch for the returned config.
    pub objective_bob: f64,
    pub objective_eve: f64,
    pub passes: usize,
    pub flips_total: usize,
    pub last_pass_flips: usize,
    /// True when the final pass made no flip.
    pub converged: bool,
    /// True when the Bob partition was negated as a block after the ascent.
    pub block_flipped: bool,
}

fn objective_ranges(objective: Objective, n: usize, k_bob: usize) -> (Range<usize>, Range<usize>) {
    match objective {
        Objective::PartitionLocal => (0..k_bob, k_bob..n),
        Objective::FullSum => (0..n, 0..n),
    }
}

struct Ascent {
    config: PhaseConfig,
    bob: RunningSum,
    eve: RunningSum,
    flips_since_resync: usize,
}

impl Ascent {
    fn new(channels: &ChannelSet, config: PhaseConfig, objective: Objective) -> Self {
        let (bob_range, eve_range) = objective_ranges(objective, config.len(), config.k_bob());
        let bob = RunningSum::new(element_terms(channels.h_s_ris(), channels.h_ris_bob()), bob_range, &config);
        let eve = RunningSum::new(element_terms(channels.h_a_ris(), channels.h_ris_eve()), eve_range, &config);
        Self { config, bob, eve, flips_since_resync: 0 }
    }

    /// Sets element `n` to the better of its two states for the objective
    /// tracked by `bob_side`. Returns whether it flipped.
    fn visit(&mut self, n: usize, bob_side: bool) -> Result<bool> {
        let sum = if bob_side { &self.bob } else { &self.eve };
        let sign = self.config.sign(n);
        let current = sum.power();
        let alternative = sum.with_flip(n, sign).norm_sqr();
        let (at_zero, at_pi) = if self.config.theta()[n] { (alternative, current) } else { (current, alternative) };
        let want_pi = at_pi > at_zero * (1.0 + TIE_TOLERANCE);
        if want_pi == self.config.theta()[n] {
            return Ok(false);
        }
        for s in [&mut self.bob, &mut self.eve] {
            if s.range().contains(&n) {
                s.apply_flip(n, sign);
            }
        }
        self.config.flip(n);
        let after = if bob_side { self.bob.power() } else { self.eve.power() };
        if after < current * (1.0 - MONOTONE_TOLERANCE) {
            return Err(Error::Invariant(format!(
                "objective decreased on flip of element {n}: {current:e} -> {after:e}"
            )));
        }
        self.flips_since_resync += 1;
        if self.flips_since_resync == RESYNC_INTERVAL {
            self.bob.resync(&self.config);
            self.eve.resync(&self.config);
            self.flips_since_resync = 0;
        }
        Ok(true)
    }

    fn run(mut self, settings: &OptimizerSettings) -> Result<OptimizeReport> {
        let k_bob = self.config.k_bob();
        let n = self.config.len();
        let mut passes = 0;
        let mut flips_total = 0;
        let mut last_pass_flips;
        loop {
            passes += 1;
            last_pass_flips = 0;
            for i in 0..k_bob {
                last_pass_flips += usize::from(self.visit(i, true)?);
            }
            for i in k_bob..n {
                last_pass_flips += usize::from(self.visit(i, false)?);
            }
            flips_total += last_pass_flips;
            if settings.mode == Mode::SinglePass || last_pass_flips == 0 || passes >= settings.max_passes {
                break;
            }
        }
        self.bob.resync(&self.config);
        self.eve.resync(&self.config);
        Ok(OptimizeReport {
            objective_bob: self.bob.power(),
            objective_eve: self.eve.power(),
            config: self.config,
            passes,
            flips_total,
            last_pass_flips,
            converged: last_pass_flips == 0,
            block_flipped: false,
        })
    }
}

/// Runs the coordinate ascent from an explicit starting configuration.
pub fn optimize_from(channels: &ChannelSet, start: PhaseConfig, settings: &OptimizerSettings) -> Result<OptimizeReport> {
    settings.validate()?;
    if start.len() != channels.len() {
        return Err(Error::LengthMismatch { expected: channels.len(), got: start.len() });
    }
    let mut report = Ascent::new(channels, start, settings.objective).run(settings)?;
    if settings.objective == Objective::PartitionLocal {
        report.block_flipped = align_bob_block(channels, &mut report.config);
    }
    Ok(report)
}

/// Chooses the global sign of the Bob partition.
///
/// Negating every Bob-side phase leaves both partition-local objectives and
/// the single-flip certificate unchanged, but decides whether the Bob and Eve
/// partitions add up or cancel in the full `G_{s,b}`. The sign giving the
/// larger `|G_{s,b}|²` is kept; on a tie, the one with `Re G^{(b)}_{s,b} ≥ 0`.
fn align_bob_block(channels: &ChannelSet, config: &mut PhaseConfig) -> bool {
    let k = config.k_bob();
    if k == 0 {
        return false;
    }
    let terms = element_terms(channels.h_s_ris(), channels.h_ris_bob());
    let own: Complex64 = (0..k).map(|i| terms[i] * config.sign(i)).sum();
    let rest: Complex64 = (k..config.len()).map(|i| terms[i] * config.sign(i)).sum();
    let (keep, flip) = ((rest + own).norm_sqr(), (rest - own).norm_sqr());
    let flip_block = if flip > keep * (1.0 + TIE_TOLERANCE) {
        true
    } else if keep > flip * (1.0 + TIE_TOLERANCE) {
        false
    } else {
        own.re < 0.0
    };
    if flip_block {
        for i in 0..k {
            config.flip(i);
        }
    }
    flip_block
}

/// Optimizes the phases for partition size `k_bob`, starting as
/// `settings.init` prescribes.
pub fn optimize_partitioned(channels: &ChannelSet, k_bob: usize, settings: &OptimizerSettings) -> Result<OptimizeReport> {
    let n = channels.len();
    if k_bob > n {
        return Err(Error::KBobOutOfRange { k_bob, n });
    }
    match settings.init {
        Init::Zero => optimize_from(channels, PhaseConfig::zeros(n, k_bob)?, settings),
        Init::Nested => Ok(optimize_nested(channels, k_bob, settings)?.pop().expect("chain is non-empty")),
    }
}

/// Reports for every partition size `0..=k_max` under `settings.init`.
pub fn optimize_all_partitions(
    channels: &ChannelSet,
    k_max: usize,
    settings: &OptimizerSettings,
) -> Result<Vec<OptimizeReport>> {
    let n = channels.len();
    if k_max > n {
        return Err(Error::KBobOutOfRange { k_bob: k_max, n });
    }
    match settings.init {
        Init::Zero => (0..=k_max)
            .into_par_iter()
            .map(|k| optimize_from(channels, PhaseConfig::zeros(n, k)?, settings))
            .collect(),
        Init::Nested => optimize_nested(channels, k_max, settings),
    }
}

fn optimize_nested(channels: &ChannelSet, k_max: usize, settings: &OptimizerSettings) -> Result<Vec<OptimizeReport>> {
    let n = channels.len();
    let bob_terms = element_terms(channels.h_s_ris(), channels.h_ris_bob());
    let mut out: Vec<OptimizeReport> = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut start = PhaseConfig::zeros(n, k)?;
        if let Some(prev) = out.last() {
            let mut sum = Complex64::new(0.0, 0.0);
            for i in 0..k - 1 {
                start.set(i, prev.config.theta()[i]);
                sum += bob_terms[i] * start.sign(i);
            }
            let t = bob_terms[k - 1];
            let pi_better = (sum - t).norm_sqr() > (sum + t).norm_sqr() * (1.0 + TIE_TOLERANCE);
            start.set(k - 1, pi_better);
        }
        out.push(optimize_from(channels, start, settings)?);
    }
    Ok(out)
}

/// Elements whose single flip would raise their partition's objective by
/// more than `rel_tol`, found by recomputing both objectives from scratch.
pub fn improving_single_flips(
    channels: &ChannelSet,
    config: &PhaseConfig,
    objective: Objective,
    rel_tol: f64,
) -> Vec<usize> {
    let (bob_range, eve_range) = objective_ranges(objective, config.len(), config.k_bob());
    let power = |h_tx: &[Complex64], h_rx: &[Complex64], range: &Range<usize>, cfg: &PhaseConfig| -> f64 {
        range.clone().map(|i| h_tx[i] * h_rx[i] * cfg.sign(i)).sum::<Complex64>().norm_sqr()
    };
    let mut improving = Vec::new();
    for i in 0..config.len() {
        let bob_side = i < config.k_bob();
        let (h_tx, h_rx, range) = if bob_side {
            (channels.h_s_ris(), channels.h_ris_bob(), &bob_range)
        } else {
            (channels.h_a_ris(), channels.h_ris_eve(), &eve_range)
        };
        let before = power(h_tx, h_rx, range, config);
        let mut probe = config.clone();
        probe.flip(i);
        let after = power(h_tx, h_rx, range, &probe);
        if after > before * (1.0 + rel_tol) {
            improving.push(i);
        }
    }
    improving
}

/// Independent fair draws over {0, π} for every element.
pub fn random_config(n: usize, k_bob: usize, seed: u64) -> Result<PhaseConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PhaseConfig::new((0..n).map(|_| rng.random::<bool>()).collect(), k_bob)
}

/// Low bits enumerated by Gray code inside each parallel chunk.
const INNER_BITS: usize = 12;

/// Exhaustive search over all sign vectors of `terms.len()` elements.
///
/// `terms[i][l]` is element `i`'s contribution to link `l`; `score` sees the
/// `L` signed sums. Codes map element `i` to bit `m − 1 − i`, so numeric order
/// is lexicographic bitstring order. Returns the smallest code whose score is
/// within `rel_tol` of the maximum.
fn exhaustive_max<const L: usize, F>(terms: &[[Complex64; L]], rel_tol: f64, score: F) -> (u64, f64)
where
    F: Fn(&[Complex64; L]) -> f64 + Sync,
{
    let m = terms.len();
    let inner = m.min(INNER_BITS);
    let outer = m - inner;

    // Calls `visit(code, score)` for every code sharing the outer bits `hi`.
    let scan_chunk = |hi: u64, visit: &mut dyn FnMut(u64, f64)| {
        let mut sums = [Complex64::new(0.0, 0.0); L];
        for (i, t) in terms.iter().enumerate() {
            let negative = i < outer && (hi >> (outer - 1 - i)) & 1 == 1;
            let s = if negative { -1.0 } else { 1.0 };
            for l in 0..L {
                sums[l] += t[l] * s;
            }
        }
        let mut lo: u64 = 0;
        visit(hi << inner, score(&sums));
        for step in 1u64..(1u64 << inner) {
            let bit = step.trailing_zeros() as usize;
            let elem = m - 1 - bit;
            let was_negative = (lo >> bit) & 1 == 1;
            let delta = if was_negative { 2.0 } else { -2.0 };
            for l in 0..L {
                sums[l] += terms[elem][l] * delta;
            }
            lo ^= 1 << bit;
            visit((hi << inner) | lo, score(&sums));
        }
    };

    let best = (0u64..(1u64 << outer))
        .into_par_iter()
        .map(|hi| {
            let mut best = f64::NEG_INFINITY;
            scan_chunk(hi, &mut |_, v| best = best.max(v));
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let threshold = best - rel_tol * best.abs();
    let code = (0u64..(1u64 << outer))
        .into_par_iter()
        .filter_map(|hi| {
            let mut first: Option<u64> = None;
            scan_chunk(hi, &mut |code, v| {
                if v >= threshold && first.is_none_or(|c| code < c) {
                    first = Some(code);
                }
            });
            first
        })
        .min()
        .expect("at least one code meets the maximum");
    (code, best)
}

fn code_to_bits(code: u64, m: usize) -> Vec<bool> {
    (0..m).map(|i| (code >> (m - 1 - i)) & 1 == 1).collect()
}

/// Exact maximizer of `|Σ_{n ∈ index_set} h_tx[n] e^{-jθ_n} h_rx[n]|²`.
///
/// The returned phases cover `index_set` only, in index order. Ties (within
/// 1e−12 relative) go to the lexicographically smallest bitstring.
pub fn brute_force_partition(
    h_tx: &[Complex64],
    h_rx: &[Complex64],
    index_set: Range<usize>,
) -> Result<(Vec<bool>, f64)> {
    let m = index_set.len();
    if m > PARTITION_ORACLE_CAP {
        return Err(Error::OracleCapExceeded { size: m, cap: PARTITION_ORACLE_CAP });
    }
    if index_set.end > h_tx.len() || h_tx.len() != h_rx.len() {
        return Err(Error::LengthMismatch { expected: index_set.end, got: h_tx.len().min(h_rx.len()) });
    }
    if m == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let terms: Vec<[Complex64; 1]> = index_set.clone().map(|i| [h_tx[i] * h_rx[i]]).collect();
    let (code, _) = exhaustive_max(&terms, 1e-12, |s| s[0].norm_sqr());
    let bits = code_to_bits(code, m);
    let value = terms
        .iter()
        .zip(&bits)
        .map(|(t, &b)| if b { -t[0] } else { t[0] })
        .sum::<Complex64>()
        .norm_sqr();
    Ok((bits, value))
}

/// Exact maximum of the secrecy capacity over all `2^N` phase vectors for a
/// fixed `(alpha, k_bob)`. `k_bob` only labels the returned config.
pub fn brute_force_secrecy(
    channels: &ChannelSet,
    k_bob: usize,
    alpha: f64,
    params: &SystemParams,
) -> Result<(PhaseConfig, f64)> {
    let n = channels.len();
    if n > SECRECY_ORACLE_CAP {
        return Err(Error::OracleCapExceeded { size: n, cap: SECRECY_ORACLE_CAP });
    }
    if k_bob > n {
        return Err(Error::KBobOutOfRange { k_bob, n });
    }
    // validates alpha once up front so the scoring closure can unwrap
    evaluate_gains(
        &CascadeGains {
            g_sb: Complex64::new(0.0, 0.0),
            g_se: Complex64::new(0.0, 0.0),
            g_ab: Complex64::new(0.0, 0.0),
            g_ae: Complex64::new(0.0, 0.0),
        },
        alpha,
        params,
    )?;
    if n == 0 {
        return Ok((PhaseConfig::zeros(0, 0)?, 0.0));
    }
    let terms: Vec<[Complex64; 4]> = (0..n)
        .map(|i| {
            [
                channels.h_s_ris()[i] * channels.h_ris_bob()[i],
                channels.h_s_ris()[i] * channels.h_ris_eve()[i],
                channels.h_a_ris()[i] * channels.h_ris_bob()[i],
                channels.h_a_ris()[i] * channels.h_ris_eve()[i],
            ]
        })
        .collect();
    let score = |s: &[Complex64; 4]| {
        let gains = CascadeGains { g_sb: s[0], g_se: s[1], g_ab: s[2], g_ae: s[3] };
        evaluate_gains(&gains, alpha, params).map(|m| m.c_secrecy).unwrap_or(f64::NEG_INFINITY)
    };
    let (code, _) = exhaustive_max(&terms, 1e-12, score);
    let config = PhaseConfig::new(code_to_bits(code, n), k_bob)?;
    let c_s = crate::metrics::evaluate(channels, &config, alpha, params)?.c_secrecy;
    Ok((config, c_s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::partition_gains;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ones(n: usize) -> Vec<Complex64> {
        vec![c(1.0, 0.0); n]
    }

    fn random_channels(n: usize, seed: u64) -> ChannelSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = || (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect::<Vec<_>>();
        let (a, b, cc, d) = (v(), v(), v(), v());
        ChannelSet::new(a, b, cc, d).unwrap()
    }

    fn zero_init() -> OptimizerSettings {
        OptimizerSettings::default().with_init(Init::Zero)
    }

    #[test]
    fn single_element_sign_correction() {
        let ch = ChannelSet::new(vec![c(-1.0, 0.0)], ones(1), ones(1), ones(1)).unwrap();
        let r = optimize_partitioned(&ch, 1, &zero_init()).unwrap();
        assert_eq!(r.config.theta(), &[true]);
        assert_eq!(r.objective_bob, 1.0);
        // the per-element visit ties and keeps θ = 0; the block alignment flips it
        assert_eq!(r.flips_total, 0);
        assert!(r.block_flipped);
    }

    #[test]
    fn block_alignment_adds_partitions_coherently() {
        // Bob block sums to -2, Eve block to +1: the aligned surface gives |2 + 1|²
        let h = vec![c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)];
        let ch = ChannelSet::new(h.clone(), ones(3), h, ones(3)).unwrap();
        let start = PhaseConfig::new(vec![true, false, false], 2).unwrap();
        let r = optimize_from(&ch, start, &zero_init()).unwrap();
        assert_eq!(r.objective_bob, 4.0);
        let g = crate::cascade::cascaded_gain(ch.h_s_ris(), &r.config, ch.h_ris_bob()).unwrap();
        assert_eq!(g.norm_sqr(), 9.0);
        let full = optimize_from(&ch, PhaseConfig::zeros(3, 2).unwrap(), &zero_init().with_objective(Objective::FullSum)).unwrap();
        assert!(!full.block_flipped);
    }

    #[test]
    fn two_element_alignment() {
        let ch = ChannelSet::new(vec![c(1.0, 0.0), c(-1.0, 0.0)], ones(2), ones(2), ones(2)).unwrap();
        for settings in [zero_init(), OptimizerSettings::default()] {
            let r = optimize_partitioned(&ch, 2, &settings).unwrap();
            assert_eq!(r.config.theta(), &[false, true]);
            assert_eq!(r.objective_bob, 4.0);
        }
    }

    #[test]
    fn four_elements_match_oracle() {
        let ch = random_channels(4, 11);
        let r = optimize_partitioned(&ch, 2, &zero_init()).unwrap();
        let (_, best) = brute_force_partition(ch.h_s_ris(), ch.h_ris_bob(), 0..2).unwrap();
        assert!((r.objective_bob - best).abs() <= 1e-12 * best);
    }

    #[test]
    fn k_bob_out_of_range() {
        let ch = random_channels(4, 0);
        assert!(matches!(
            optimize_partitioned(&ch, 5, &OptimizerSettings::default()),
            Err(Error::KBobOutOfRange { .. })
        ));
    }

    #[test]
    fn objectives_match_recomputation() {
        let ch = random_channels(16, 3);
        for settings in [zero_init(), OptimizerSettings::default(), zero_init().with_mode(Mode::SinglePass)] {
            let r = optimize_partitioned(&ch, 6, &settings).unwrap();
            let (gb, _) = partition_gains(ch.h_s_ris(), &r.config, ch.h_ris_bob()).unwrap();
            let (_, ge) = partition_gains(ch.h_a_ris(), &r.config, ch.h_ris_eve()).unwrap();
            assert!((r.objective_bob - gb.norm_sqr()).abs() <= 1e-12 * gb.norm_sqr());
            assert!((r.objective_eve - ge.norm_sqr()).abs() <= 1e-12 * ge.norm_sqr());
        }
    }

    #[test]
    fn single_pass_visits_each_element_once() {
        let ch = random_channels(12, 5);
        let r = optimize_partitioned(&ch, 5, &zero_init().with_mode(Mode::SinglePass)).unwrap();
        assert_eq!(r.passes, 1);
        assert!(r.flips_total <= 12);
    }

    #[test]
    fn convergence_is_a_local_optimum() {
        for seed in 0..20 {
            let ch = random_channels(20, seed);
            let r = optimize_partitioned(&ch, 9, &zero_init()).unwrap();
            assert!(r.converged);
            assert_eq!(r.last_pass_flips, 0);
            assert!(improving_single_flips(&ch, &r.config, Objective::PartitionLocal, 1e-12).is_empty());
            // Full-sum partitions share terms and can cycle; only a converged run is certified.
            let settings = zero_init().with_objective(Objective::FullSum);
            let r = optimize_partitioned(&ch, 9, &settings).unwrap();
            if r.converged {
                assert!(improving_single_flips(&ch, &r.config, Objective::FullSum, 1e-12).is_empty());
            }
        }
    }

    #[test]
    fn nested_bob_objective_is_monotone() {
        let ch = random_channels(24, 9);
        let reports = optimize_all_partitions(&ch, 24, &OptimizerSettings::default()).unwrap();
        for w in reports.windows(2) {
            assert!(w[1].objective_bob >= w[0].objective_bob);
        }
        let direct = optimize_partitioned(&ch, 13, &OptimizerSettings::default()).unwrap();
        assert_eq!(direct, reports[13]);
    }

    #[test]
    fn all_partitions_zero_init_matches_direct_calls() {
        let ch = random_channels(10, 2);
        let all = optimize_all_partitions(&ch, 10, &zero_init()).unwrap();
        for (k, r) in all.iter().enumerate() {
            assert_eq!(r, &optimize_partitioned(&ch, k, &zero_init()).unwrap());
        }
    }

    #[test]
    fn random_config_is_deterministic() {
        assert_eq!(random_config(64, 10, 42).unwrap(), random_config(64, 10, 42).unwrap());
        assert_ne!(random_config(64, 10, 42).unwrap(), random_config(64, 10, 43).unwrap());
        assert!(random_config(0, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn random_config_is_fair() {
        let n = 16;
        let mut counts = vec![0usize; n];
        for seed in 0..10_000 {
            for (i, &b) in random_config(n, 0, seed).unwrap().theta().iter().enumerate() {
                counts[i] += usize::from(b);
            }
        }
        for c in counts {
            let f = c as f64 / 10_000.0;
            assert!((0.48..=0.52).contains(&f), "{f}");
        }
    }

    #[test]
    fn oracle_single_element() {
        let (bits, v) = brute_force_partition(&[c(0.0, 2.0)], &[c(0.0, 1.0)], 0..1).unwrap();
        assert_eq!(bits, vec![false]);
        assert_eq!(v, 4.0);
    }

    #[test]
    fn oracle_aligned_terms() {
        let h: Vec<_> = (1..=9).map(|i| c(i as f64, 0.0)).collect();
        let (bits, v) = brute_force_partition(&h, &ones(9), 0..9).unwrap();
        assert!(bits.iter().all(|b| !b));
        assert_eq!(v, 45.0 * 45.0);
    }

    #[test]
    fn oracle_cap() {
        let h = ones(30);
        assert!(matches!(
            brute_force_partition(&h, &h, 0..25),
            Err(Error::OracleCapExceeded { size: 25, cap: 24 })
        ));
        let ch = random_channels(21, 0);
        assert!(matches!(
            brute_force_secrecy(&ch, 0, 0.5, &SystemParams::desk_default()),
            Err(Error::OracleCapExceeded { .. })
        ));
    }

    /// Plain loop over every bitstring, independent of the Gray-code path.
    fn naive_partition_max(h: &[Complex64], r: &[Complex64], range: Range<usize>) -> (Vec<bool>, f64) {
        let m = range.len();
        let mut best = (Vec::new(), -1.0);
        for code in 0u64..(1 << m) {
            let bits = code_to_bits(code, m);
            let v = range
                .clone()
                .zip(&bits)
                .map(|(i, &b)| h[i] * r[i] * if b { -1.0 } else { 1.0 })
                .sum::<Complex64>()
                .norm_sqr();
            if v > best.1 * (1.0 + 1e-12) {
                best = (bits, v);
            }
        }
        best
    }

    #[test]
    fn oracle_agrees_with_naive_enumeration() {
        for (seed, n, range) in [(1, 10, 0..10), (2, 14, 3..14), (3, 16, 0..13), (4, 6, 2..4)] {
            let ch = random_channels(n, seed);
            let (bits, v) = brute_force_partition(ch.h_s_ris(), ch.h_ris_bob(), range.clone()).unwrap();
            let (nbits, nv) = naive_partition_max(ch.h_s_ris(), ch.h_ris_bob(), range);
            assert!((v - nv).abs() <= 1e-12 * nv);
            assert_eq!(bits, nbits);
            assert!(!bits[0], "tie-break keeps the first bit at 0");
        }
    }

    #[test]
    fn oracle_n10_fixture() {
        let ch = random_channels(10, 2024);
        let (bits, v) = brute_force_partition(ch.h_s_ris(), ch.h_ris_bob(), 0..10).unwrap();
        let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        assert_eq!(s, FIXTURE_N10_BITS);
        assert!((v - FIXTURE_N10_VALUE).abs() <= 1e-9 * FIXTURE_N10_VALUE);
    }

    // Frozen from the naive enumeration above.
    const FIXTURE_N10_BITS: &str = "0010110000";
    const FIXTURE_N10_VALUE: f64 = 2.03482374485416848e1;


    #[test]
    fn secrecy_oracle_single_element_alpha_one() {
        let params = SystemParams::desk_default();
        let ch = ChannelSet::new(vec![c(1e-3, 0.0)], vec![c(1e-3, 0.0)], vec![c(-1.0, 0.5)], vec![c(0.1, 0.0)]).unwrap();
        let (cfg, cs) = brute_force_secrecy(&ch, 1, 1.0, &params).unwrap();
        // with a single element both signs give the same |G|² on every link
        assert_eq!(cfg.theta(), &[false]);
        let both: Vec<f64> = [false, true]
            .iter()
            .map(|&b| crate::metrics::evaluate(&ch, &PhaseConfig::new(vec![b], 1).unwrap(), 1.0, &params).unwrap().c_secrecy)
            .collect();
        assert!((both[0] - both[1]).abs() < 1e-12 && (cs - both[0]).abs() < 1e-12);
    }

    #[test]
    fn secrecy_oracle_clamps_to_zero() {
        let params = SystemParams::desk_default();
        // Eve sees the CS through a stronger channel than Bob for every config
        let ch = ChannelSet::new(ones(3), vec![c(0.0, 0.0); 3], vec![c(1e-4, 0.0); 3], vec![c(1.0, 0.0); 3]).unwrap();
        let (cfg, cs) = brute_force_secrecy(&ch, 1, 0.7, &params).unwrap();
        assert_eq!(cs, 0.0);
        assert_eq!(cfg.to_bitstring(), "000");
    }

    #[test]
    fn secrecy_oracle_dominates_greedy() {
        let params = SystemParams::desk_default();
        let scene_ch = random_channels(8, 77);
        let scale = 3e-3;
        let scaled = |v: &[Complex64]| v.iter().map(|h| h * scale).collect::<Vec<_>>();
        let ch = ChannelSet::new(
            scaled(scene_ch.h_s_ris()),
            scaled(scene_ch.h_a_ris()),
            scaled(scene_ch.h_ris_bob()),
            scaled(scene_ch.h_ris_eve()),
        )
        .unwrap();
        let (_, best) = brute_force_secrecy(&ch, 4, 0.6, &params).unwrap();
        let r = optimize_partitioned(&ch, 4, &OptimizerSettings::default()).unwrap();
        let greedy = crate::metrics::evaluate(&ch, &r.config, 0.6, &params).unwrap().c_secrecy;
        assert!(best >= greedy - 1e-12);
    }
}
