//! Sample-level simulation of the received signals and a genie-aided SINR
//! estimate used to cross-check the analytic formula.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cascade::{all_gains, PhaseConfig};
use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::scene::SystemParams;

/// Empirical SINR ceiling, +150 dB.
pub const SINR_CLAMP: f64 = 1e15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    /// Circularly-symmetric complex Gaussian, unit variance.
    #[default]
    Gaussian,
    /// Unit-power QPSK, `(±1 ± j)/√2`.
    Qpsk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalFrame {
    pub s_samples: Vec<Complex64>,
    pub a_samples: Vec<Complex64>,
    pub y_bob: Vec<Complex64>,
    pub y_eve: Vec<Complex64>,
    pub sample_count: usize,
    pub sample_rate: f64,
}

impl SignalFrame {
    /// Timestamp of sample `i` in seconds.
    pub fn time(&self, i: usize) -> f64 {
        i as f64 / self.sample_rate
    }
}

pub fn mean_power(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64
}

fn draw_symbol(rng: &mut ChaCha8Rng, kind: SymbolKind) -> Complex64 {
    match kind {
        SymbolKind::Gaussian => {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        }
        SymbolKind::Qpsk => {
            let re = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let im = if rng.random::<bool>() { 1.0 } else { -1.0 };
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        }
    }
}

fn draw_noise(rng: &mut ChaCha8Rng, variance: f64) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * (variance / 2.0).sqrt()
}

/// `y_u = √(αP) G_{s,u} s + √((1−α)P) G_{a,u} a + n_u` with Gaussian symbols.
pub fn simulate_received(
    channels: &ChannelSet,
    config: &PhaseConfig,
    alpha: f64,
    params: &SystemParams,
    sample_count: usize,
    seed: u64,
) -> Result<SignalFrame> {
    simulate_received_with(channels, config, alpha, params, sample_count, seed, SymbolKind::Gaussian)
}

pub fn simulate_received_with(
    channels: &ChannelSet,
    config: &PhaseConfig,
    alpha: f64,
    params: &SystemParams,
    sample_count: usize,
    seed: u64,
    kind: SymbolKind,
) -> Result<SignalFrame> {
    if sample_count == 0 {
        return Err(Error::InvalidParameter { name: "sample_count", reason: "must be >= 1".into() });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter { name: "alpha", reason: format!("{alpha} not in [0, 1]") });
    }
    let g = all_gains(channels, config)?;
    let cs_amp = (alpha * params.total_power()).sqrt();
    let an_amp = ((1.0 - alpha) * params.total_power()).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frame = SignalFrame {
        s_samples: Vec::with_capacity(sample_count),
        a_samples: Vec::with_capacity(sample_count),
        y_bob: Vec::with_capacity(sample_count),
        y_eve: Vec::with_capacity(sample_count),
        sample_count,
        sample_rate: params.sample_rate(),
    };
    for _ in 0..sample_count {
        let s = draw_symbol(&mut rng, kind);
        let a = draw_symbol(&mut rng, kind);
        let n_b = draw_noise(&mut rng, params.noise_power_bob());
        let n_e = draw_noise(&mut rng, params.noise_power_eve());
        frame.y_bob.push(g.g_sb * s * cs_amp + g.g_ab * a * an_amp + n_b);
        frame.y_eve.push(g.g_se * s * cs_amp + g.g_ae * a * an_amp + n_e);
        frame.s_samples.push(s);
        frame.a_samples.push(a);
    }
    Ok(frame)
}

/// Empirical `(γ_b, γ_e)`.
///
/// The estimator knows the transmitted CS sequence and the effective CS
/// coefficient, so it can subtract the desired component exactly; the
/// residual is the measured interference-plus-noise. Values are capped at
/// [`SINR_CLAMP`].
pub fn estimate_sinr(
    frame: &SignalFrame,
    channels: &ChannelSet,
    config: &PhaseConfig,
    alpha: f64,
    params: &SystemParams,
) -> Result<(f64, f64)> {
    if frame.sample_count == 0 || frame.y_bob.len() != frame.sample_count {
        return Err(Error::DegenerateFrame("frame has no samples".into()));
    }
    let g = all_gains(channels, config)?;
    let cs_amp = (alpha * params.total_power()).sqrt();
    let one = |y: &[Complex64], g_s: Complex64, link: &str| -> Result<f64> {
        if mean_power(y) == 0.0 {
            return Err(Error::DegenerateFrame(format!("zero received power at {link}")));
        }
        let wanted: Vec<Complex64> = frame.s_samples.iter().map(|s| g_s * s * cs_amp).collect();
        let signal = mean_power(&wanted);
        let residual: Vec<Complex64> = y.iter().zip(&wanted).map(|(y, w)| y - w).collect();
        let rest = mean_power(&residual);
        if rest == 0.0 || signal / rest > SINR_CLAMP {
            Ok(SINR_CLAMP)
        } else {
            Ok(signal / rest)
        }
    };
    Ok((one(&frame.y_bob, g.g_sb, "bob")?, one(&frame.y_eve, g.g_se, "eve")?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::evaluate;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn toy() -> (ChannelSet, PhaseConfig, SystemParams) {
        let ch = ChannelSet::new(
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.5, 0.5), c(1.0, 0.0)],
            vec![c(0.7, 0.0), c(0.2, 0.3)],
            vec![c(0.1, -0.4), c(0.6, 0.0)],
        )
        .unwrap();
        let params = SystemParams::desk_default().with_total_power(2.0).unwrap().with_noise_powers(1.0, 1.0).unwrap();
        (ch, PhaseConfig::new(vec![false, true], 1).unwrap(), params)
    }

    #[test]
    fn unit_power_symbols() {
        let (ch, cfg, p) = toy();
        for kind in [SymbolKind::Gaussian, SymbolKind::Qpsk] {
            let f = simulate_received_with(&ch, &cfg, 0.5, &p, 100_000, 1, kind).unwrap();
            for x in [&f.s_samples, &f.a_samples] {
                let pw = mean_power(x);
                assert!((0.99..=1.01).contains(&pw), "{kind:?} {pw}");
            }
        }
    }

    #[test]
    fn noiseless_an_free_recovers_symbols() {
        let (ch, cfg, p) = toy();
        let p = p.with_noise_powers(1e-300, 1e-300).unwrap();
        let f = simulate_received(&ch, &cfg, 1.0, &p, 1000, 4).unwrap();
        let g = all_gains(&ch, &cfg).unwrap();
        let scale = p.total_power().sqrt() * g.g_sb;
        for (y, s) in f.y_bob.iter().zip(&f.s_samples) {
            assert!((y / scale - s).norm() < 1e-12);
        }
        let (gb, _) = estimate_sinr(&f, &ch, &cfg, 1.0, &p).unwrap();
        assert_eq!(gb, SINR_CLAMP);
    }

    #[test]
    fn received_power_is_additive() {
        let (ch, cfg, p) = toy();
        let alpha = 0.3;
        let f = simulate_received(&ch, &cfg, alpha, &p, 1_000_000, 9).unwrap();
        let g = all_gains(&ch, &cfg).unwrap();
        let pt = p.total_power();
        let expected = alpha * pt * g.g_sb.norm_sqr() + (1.0 - alpha) * pt * g.g_ab.norm_sqr() + p.noise_power_bob();
        let got = mean_power(&f.y_bob);
        assert!((got / expected - 1.0).abs() < 0.01, "{got} vs {expected}");
    }

    #[test]
    fn zero_channels_give_noise_only() {
        let z = vec![c(0.0, 0.0); 3];
        let ch = ChannelSet::new(z.clone(), z.clone(), z.clone(), z).unwrap();
        let cfg = PhaseConfig::zeros(3, 1).unwrap();
        let p = SystemParams::desk_default();
        let f = simulate_received(&ch, &cfg, 0.4, &p, 200_000, 2).unwrap();
        let ratio = mean_power(&f.y_eve) / p.noise_power_eve();
        assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
    }

    #[test]
    fn half_sinr_scenario_within_tolerance() {
        // αP|G_s|²/((1−α)P|G_a|²+σ²) = 0.5 with the unit gains of the toy case
        let one = vec![c(1.0, 0.0)];
        let ch = ChannelSet::new(one.clone(), one.clone(), one.clone(), one).unwrap();
        let cfg = PhaseConfig::zeros(1, 1).unwrap();
        let p = SystemParams::desk_default().with_total_power(2.0).unwrap().with_noise_powers(1.0, 1.0).unwrap();
        let analytic = evaluate(&ch, &cfg, 0.5, &p).unwrap().sinr_bob;
        assert!((analytic - 0.5).abs() < 1e-15);
        let f = simulate_received(&ch, &cfg, 0.5, &p, 100_000, 17).unwrap();
        let (gb, _) = estimate_sinr(&f, &ch, &cfg, 0.5, &p).unwrap();
        assert!((10.0 * (gb / analytic).log10()).abs() < 0.2);
    }

    #[test]
    fn alpha_zero_estimates_zero() {
        let (ch, cfg, p) = toy();
        let f = simulate_received(&ch, &cfg, 0.0, &p, 1000, 3).unwrap();
        let (gb, ge) = estimate_sinr(&f, &ch, &cfg, 0.0, &p).unwrap();
        assert_eq!((gb, ge), (0.0, 0.0));
    }

    #[test]
    fn seeded_frames_repeat() {
        let (ch, cfg, p) = toy();
        let a = simulate_received(&ch, &cfg, 0.5, &p, 64, 5).unwrap();
        let b = simulate_received(&ch, &cfg, 0.5, &p, 64, 5).unwrap();
        assert_eq!(a, b);
        assert!((a.time(5) - 5.0 / p.sample_rate()).abs() < 1e-18);
    }

    #[test]
    fn degenerate_frame_is_rejected() {
        let (ch, cfg, p) = toy();
        let mut f = simulate_received(&ch, &cfg, 0.5, &p, 8, 5).unwrap();
        f.y_bob.iter_mut().for_each(|y| *y = c(0.0, 0.0));
        assert!(matches!(estimate_sinr(&f, &ch, &cfg, 0.5, &p), Err(Error::DegenerateFrame(_))));
        assert!(simulate_received(&ch, &cfg, 0.5, &p, 0, 5).is_err());
    }
}
