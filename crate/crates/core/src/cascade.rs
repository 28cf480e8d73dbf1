//! Partitioned cascaded-channel algebra over a binary phase configuration.
//!
//! With `θ_n ∈ {0, π}` the reflection factor `e^{-jθ_n}` is exactly `±1`, so
//! every cascaded sum is a signed sum of the per-element products
//! `h_{pn} h_{nu}`.

use std::ops::Range;

use num_complex::Complex64;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};

/// Binary RIS phases plus the Bob/Eve partition boundary.
///
/// `theta[n] == false` is θ = 0 and `true` is θ = π. Elements `0..k_bob` are
/// Bob-oriented, `k_bob..N` Eve-oriented.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhaseConfig {
    theta: Vec<bool>,
    k_bob: usize,
}

impl PhaseConfig {
    pub fn new(theta: Vec<bool>, k_bob: usize) -> Result<Self> {
        if k_bob > theta.len() {
            return Err(Error::KBobOutOfRange { k_bob, n: theta.len() });
        }
        Ok(Self { theta, k_bob })
    }

    /// All phases at θ = 0.
    pub fn zeros(n: usize, k_bob: usize) -> Result<Self> {
        Self::new(vec![false; n], k_bob)
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn k_bob(&self) -> usize {
        self.k_bob
    }

    /// `K_b / N`; zero for an empty surface.
    pub fn beta(&self) -> f64 {
        if self.theta.is_empty() {
            0.0
        } else {
            self.k_bob as f64 / self.theta.len() as f64
        }
    }

    pub fn theta(&self) -> &[bool] {
        &self.theta
    }

    pub fn bob_range(&self) -> Range<usize> {
        0..self.k_bob
    }

    pub fn eve_range(&self) -> Range<usize> {
        self.k_bob..self.theta.len()
    }

    /// Reflection factor `e^{-jθ_n}` as a real sign.
    pub fn sign(&self, n: usize) -> f64 {
        if self.theta[n] {
            -1.0
        } else {
            1.0
        }
    }

    pub fn flip(&mut self, n: usize) {
        self.theta[n] = !self.theta[n];
    }

    pub fn set(&mut self, n: usize, pi: bool) {
        self.theta[n] = pi;
    }

    /// Every phase toggled.
    pub fn flipped_all(&self) -> Self {
        Self { theta: self.theta.iter().map(|b| !b).collect(), k_bob: self.k_bob }
    }

    /// '0' for θ = 0, '1' for θ = π, in element order.
    pub fn to_bitstring(&self) -> String {
        self.theta.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn from_bitstring(bits: &str, k_bob: usize) -> Result<Self> {
        let theta = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter {
                    name: "phase_bits",
                    reason: format!("unexpected character {other:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(theta, k_bob)
    }
}

/// The four cascaded gains `G_{p,u}` for `p ∈ {s, a}`, `u ∈ {b, e}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeGains {
    pub g_sb: Complex64,
    pub g_se: Complex64,
    pub g_ab: Complex64,
    pub g_ae: Complex64,
}

fn check_lengths(h_tx: &[Complex64], config: &PhaseConfig, h_rx: &[Complex64]) -> Result<()> {
    let n = config.len();
    for len in [h_tx.len(), h_rx.len()] {
        if len != n {
            return Err(Error::LengthMismatch { expected: n, got: len });
        }
    }
    Ok(())
}

/// Per-element products `h_tx[n]·h_rx[n]`.
pub fn element_terms(h_tx: &[Complex64], h_rx: &[Complex64]) -> Vec<Complex64> {
    h_tx.iter().zip(h_rx).map(|(a, b)| a * b).collect()
}

fn signed_sum(h_tx: &[Complex64], config: &PhaseConfig, h_rx: &[Complex64], range: Range<usize>) -> Complex64 {
    range.map(|n| h_tx[n] * h_rx[n] * config.sign(n)).sum()
}

/// `G = Σ_n h_tx[n] e^{-jθ_n} h_rx[n]` over all elements.
pub fn cascaded_gain(h_tx: &[Complex64], config: &PhaseConfig, h_rx: &[Complex64]) -> Result<Complex64> {
    check_lengths(h_tx, config, h_rx)?;
    Ok(signed_sum(h_tx, config, h_rx, 0..config.len()))
}

/// `(G^{(b)}, G^{(e)})`: the Bob-partition and Eve-partition contributions.
pub fn partition_gains(
    h_tx: &[Complex64],
    config: &PhaseConfig,
    h_rx: &[Complex64],
) -> Result<(Complex64, Complex64)> {
    check_lengths(h_tx, config, h_rx)?;
    Ok((
        signed_sum(h_tx, config, h_rx, config.bob_range()),
        signed_sum(h_tx, config, h_rx, config.eve_range()),
    ))
}

/// All four cascaded gains for one physical phase configuration.
pub fn all_gains(channels: &ChannelSet, config: &PhaseConfig) -> Result<CascadeGains> {
    Ok(CascadeGains {
        g_sb: cascaded_gain(channels.h_s_ris(), config, channels.h_ris_bob())?,
        g_se: cascaded_gain(channels.h_s_ris(), config, channels.h_ris_eve())?,
        g_ab: cascaded_gain(channels.h_a_ris(), config, channels.h_ris_bob())?,
        g_ae: cascaded_gain(channels.h_a_ris(), config, channels.h_ris_eve())?,
    })
}

/// Running signed sum over a subset of element terms, updated in O(1) per
/// flip. Call [`RunningSum::resync`] periodically to discard accumulated
/// rounding drift.
#[derive(Debug, Clone)]
pub struct RunningSum {
    terms: Vec<Complex64>,
    range: Range<usize>,
    value: Complex64,
}

impl RunningSum {
    /// `terms` is indexed by absolute element index; only `range` contributes.
    pub fn new(terms: Vec<Complex64>, range: Range<usize>, signs: &PhaseConfig) -> Self {
        let mut s = Self { terms, range, value: Complex64::new(0.0, 0.0) };
        s.resync(signs);
        s
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn power(&self) -> f64 {
        self.value.norm_sqr()
    }

    /// Sum if element `n` (currently carrying `sign`) were flipped.
    pub fn with_flip(&self, n: usize, sign: f64) -> Complex64 {
        self.value - self.terms[n] * (2.0 * sign)
    }

    pub fn apply_flip(&mut self, n: usize, sign: f64) {
        self.value = self.with_flip(n, sign);
    }

    /// Recomputes from scratch; returns the absolute drift that was removed.
    pub fn resync(&mut self, signs: &PhaseConfig) -> f64 {
        let fresh: Complex64 = self.range.clone().map(|n| self.terms[n] * signs.sign(n)).sum();
        let drift = (fresh - self.value).norm();
        self.value = fresh;
        drift
    }

    pub fn range(&self) -> Range<usize> {
        self.range.clone()
    }
}
