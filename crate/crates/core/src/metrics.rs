//! SINR, spectral efficiency and secrecy capacity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cascade::{all_gains, CascadeGains, PhaseConfig};
use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::scene::SystemParams;

/// Per-receiver SINRs and rates (bits/s/Hz) for one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkMetrics {
    pub sinr_bob: f64,
    pub sinr_eve: f64,
    pub c_bob: f64,
    pub c_eve: f64,
    pub c_secrecy: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "alpha", reason: format!("{alpha} not in [0, 1]") })
    }
}

/// `αP|G_s|² / ((1−α)P|G_a|² + σ²)`.
pub fn sinr(alpha: f64, total_power: f64, g_signal: Complex64, g_noise: Complex64, noise_power: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(total_power > 0.0 && total_power.is_finite()) {
        return Err(Error::InvalidParameter { name: "total_power", reason: format!("{total_power} must be positive") });
    }
    if !(noise_power > 0.0 && noise_power.is_finite()) {
        return Err(Error::InvalidParameter { name: "noise_power", reason: format!("{noise_power} must be positive") });
    }
    let signal = alpha * total_power * g_signal.norm_sqr();
    let interference = (1.0 - alpha) * total_power * g_noise.norm_sqr();
    Ok(signal / (interference + noise_power))
}

/// `log₂(1 + γ)`.
pub fn capacity(gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter { name: "gamma", reason: format!("{gamma} must be >= 0") });
    }
    Ok(gamma.ln_1p() / std::f64::consts::LN_2)
}

/// `[c_bob − c_eve]⁺`.
pub fn secrecy_capacity(c_bob: f64, c_eve: f64) -> f64 {
    (c_bob - c_eve).max(0.0)
}

/// Metrics from precomputed cascade gains.
pub fn evaluate_gains(gains: &CascadeGains, alpha: f64, params: &SystemParams) -> Result<LinkMetrics> {
    let p = params.total_power();
    let sinr_bob = sinr(alpha, p, gains.g_sb, gains.g_ab, params.noise_power_bob())?;
    let sinr_eve = sinr(alpha, p, gains.g_se, gains.g_ae, params.noise_power_eve())?;
    let c_bob = capacity(sinr_bob)?;
    let c_eve = capacity(sinr_eve)?;
    Ok(LinkMetrics { sinr_bob, sinr_eve, c_bob, c_eve, c_secrecy: secrecy_capacity(c_bob, c_eve) })
}

pub fn evaluate(channels: &ChannelSet, config: &PhaseConfig, alpha: f64, params: &SystemParams) -> Result<LinkMetrics> {
    evaluate_gains(&all_gains(channels, config)?, alpha, params)
}
