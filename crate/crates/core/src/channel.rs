//! Deterministic line-of-sight channel coefficients between the terminals
//! and every RIS element.
//!
//! Each hop is a free-space link `|h| e^{-jφ}` with `|h| = λ/(4πd)·√(G_tx G_rx)`
//! and `φ = 2πd/λ`. Transmit antennas and RIS elements radiate with a cosine
//! power pattern `max(0, cos ψ)^{2q}`; the horn additionally carries its
//! scalar gain. Receivers are isotropic. There is no direct
//! transmitter→receiver path.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scene::{Scene, SystemParams};

/// Free-space coefficient of a single hop.
pub fn path_coefficient(
    tx_pos: Vec3,
    rx_pos: Vec3,
    params: &SystemParams,
    tx_gain: f64,
    rx_gain: f64,
) -> Result<Complex64> {
    let d = tx_pos.distance(rx_pos);
    if !(d > 0.0) {
        return Err(Error::DegenerateGeometry(format!(
            "zero-length link between {tx_pos:?} and {rx_pos:?}"
        )));
    }
    let lambda = params.wavelength();
    let amplitude = lambda / (4.0 * PI * d) * (tx_gain * rx_gain).sqrt();
    // reduce d/λ first so whole-wavelength distances land on phase 0 exactly
    let cycles = (d / lambda).fract();
    Ok(Complex64::from_polar(amplitude, -2.0 * PI * cycles))
}

/// Cosine power pattern relative to `surface_normal` (both unit vectors).
pub fn element_gain(direction: Vec3, surface_normal: Vec3, exponent: f64) -> f64 {
    let cos = direction.dot(surface_normal).clamp(-1.0, 1.0);
    if exponent == 0.0 {
        return 1.0;
    }
    cos.max(0.0).powf(2.0 * exponent)
}

/// The four per-element link vectors `h_{sn}`, `h_{an}`, `h_{nb}`, `h_{ne}`,
/// in partition order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    h_s_ris: Vec<Complex64>,
    h_a_ris: Vec<Complex64>,
    h_ris_bob: Vec<Complex64>,
    h_ris_eve: Vec<Complex64>,
}

impl ChannelSet {
    pub fn new(
        h_s_ris: Vec<Complex64>,
        h_a_ris: Vec<Complex64>,
        h_ris_bob: Vec<Complex64>,
        h_ris_eve: Vec<Complex64>,
    ) -> Result<Self> {
        let n = h_s_ris.len();
        for v in [&h_a_ris, &h_ris_bob, &h_ris_eve] {
            if v.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: v.len() });
            }
        }
        let all = h_s_ris.iter().chain(&h_a_ris).chain(&h_ris_bob).chain(&h_ris_eve);
        if all.into_iter().any(|h| !(h.re.is_finite() && h.im.is_finite())) {
            return Err(Error::InvalidParameter { name: "channels", reason: "non-finite coefficient".into() });
        }
        Ok(Self { h_s_ris, h_a_ris, h_ris_bob, h_ris_eve })
    }

    pub fn len(&self) -> usize {
        self.h_s_ris.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_s_ris.is_empty()
    }

    pub fn h_s_ris(&self) -> &[Complex64] {
        &self.h_s_ris
    }

    pub fn h_a_ris(&self) -> &[Complex64] {
        &self.h_a_ris
    }

    pub fn h_ris_bob(&self) -> &[Complex64] {
        &self.h_ris_bob
    }

    pub fn h_ris_eve(&self) -> &[Complex64] {
        &self.h_ris_eve
    }

    /// Bob and Eve exchanged.
    pub fn swap_receivers(&self) -> Self {
        Self {
            h_s_ris: self.h_s_ris.clone(),
            h_a_ris: self.h_a_ris.clone(),
            h_ris_bob: self.h_ris_eve.clone(),
            h_ris_eve: self.h_ris_bob.clone(),
        }
    }

    /// Copy with the AN transmitter's links replaced by zeros.
    pub fn without_an(&self) -> Self {
        Self { h_a_ris: vec![Complex64::new(0.0, 0.0); self.len()], ..self.clone() }
    }

    /// Copy where every coefficient is rotated by an independent uniform
    /// phase drawn from `seed`. Amplitudes are preserved.
    pub fn with_random_phases(&self, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rotate = |v: &[Complex64]| -> Vec<Complex64> {
            v.iter()
                .map(|h| h * Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)))
                .collect()
        };
        let h_s_ris = rotate(&self.h_s_ris);
        let h_a_ris = rotate(&self.h_a_ris);
        let h_ris_bob = rotate(&self.h_ris_bob);
        let h_ris_eve = rotate(&self.h_ris_eve);
        Self { h_s_ris, h_a_ris, h_ris_bob, h_ris_eve }
    }
}

fn transmitter_links(
    tx: Vec3,
    boresight: Vec3,
    positions: &[Vec3],
    normal: Vec3,
    params: &SystemParams,
) -> Result<Vec<Complex64>> {
    let q = params.cosine_exponent();
    positions
        .iter()
        .map(|&p| {
            let out = (p - tx)
                .normalized()
                .ok_or_else(|| Error::DegenerateGeometry("transmitter on RIS element".into()))?;
            let tx_gain = params.tx_antenna_gain() * element_gain(out, boresight, q);
            let rx_gain = element_gain(-out, normal, q);
            path_coefficient(tx, p, params, tx_gain, rx_gain)
        })
        .collect()
}

fn receiver_links(rx: Vec3, positions: &[Vec3], normal: Vec3, params: &SystemParams) -> Result<Vec<Complex64>> {
    let q = params.cosine_exponent();
    positions
        .iter()
        .map(|&p| {
            let out = (rx - p)
                .normalized()
                .ok_or_else(|| Error::DegenerateGeometry("receiver on RIS element".into()))?;
            path_coefficient(p, rx, params, element_gain(out, normal, q), 1.0)
        })
        .collect()
}

/// Builds the channel set of a scene. Both transmit horns are aimed at the
/// RIS center.
pub fn generate_channels(scene: &Scene, params: &SystemParams) -> Result<ChannelSet> {
    let positions = scene.element_positions();
    let normal = scene.ris_normal();
    let boresight = |tx: Vec3| {
        (scene.ris_center() - tx)
            .normalized()
            .ok_or_else(|| Error::DegenerateGeometry("transmitter at RIS center".into()))
    };
    let cs = scene.cs_tx_pos();
    let an = scene.an_tx_pos();
    ChannelSet::new(
        transmitter_links(cs, boresight(cs)?, &positions, normal, params)?,
        transmitter_links(an, boresight(an)?, &positions, normal, params)?,
        receiver_links(scene.bob_pos(), &positions, normal, params)?,
        receiver_links(scene.eve_pos(), &positions, normal, params)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::SceneSpec;

    fn unit_params() -> SystemParams {
        SystemParams::desk_default()
    }

    #[test]
    fn amplitude_fixed_point() {
        let p = unit_params();
        let d = p.wavelength() / (4.0 * PI);
        let h = path_coefficient(Vec3::default(), Vec3::new(d, 0.0, 0.0), &p, 1.0, 1.0).unwrap();
        assert!((h.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_meter_loss() {
        let p = unit_params();
        let h = path_coefficient(Vec3::default(), Vec3::new(1.0, 0.0, 0.0), &p, 1.0, 1.0).unwrap();
        // 20·log10(0.0799447 / 4π) evaluated by hand
        let db = 10.0 * h.norm_sqr().log10();
        assert!((db - (-43.928)).abs() < 0.01, "{db}");
    }

    #[test]
    fn whole_wavelength_has_zero_phase() {
        let p = unit_params();
        for k in 1..20 {
            let d = k as f64 * p.wavelength();
            let h = path_coefficient(Vec3::default(), Vec3::new(0.0, d, 0.0), &p, 1.0, 1.0).unwrap();
            let phase = h.arg();
            assert!(phase.abs() < 1e-9 || (phase.abs() - 2.0 * PI).abs() < 1e-9, "k={k} phase={phase}");
        }
    }

    #[test]
    fn zero_distance_is_degenerate() {
        let p = unit_params();
        let r = path_coefficient(Vec3::new(1.0, 2.0, 3.0), Vec3::new(1.0, 2.0, 3.0), &p, 1.0, 1.0);
        assert!(matches!(r, Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn cosine_pattern() {
        let n = Vec3::new(1.0, 0.0, 0.0);
        assert_eq!(element_gain(n, n, 1.0), 1.0);
        assert_eq!(element_gain(Vec3::new(0.0, 1.0, 0.0), n, 1.0), 0.0);
        assert_eq!(element_gain(-n, n, 1.0), 0.0);
        let sixty = Vec3::new(0.5, 3f64.sqrt() / 2.0, 0.0);
        assert!((element_gain(sixty, n, 1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn default_channels_are_distinct_and_nonzero() {
        let ch = generate_channels(&Scene::desk_default(), &unit_params()).unwrap();
        assert_eq!(ch.len(), 64);
        assert_ne!(ch.h_s_ris(), ch.h_a_ris());
        for v in [ch.h_s_ris(), ch.h_a_ris(), ch.h_ris_bob(), ch.h_ris_eve()] {
            assert!(v.iter().all(|h| h.norm() > 0.0));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_channels(&Scene::desk_default(), &unit_params()).unwrap();
        let b = generate_channels(&Scene::desk_default(), &unit_params()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mirrored_layout_gives_equal_receiver_norms() {
        let ch = generate_channels(&Scene::desk_default(), &unit_params()).unwrap();
        let norm = |v: &[Complex64]| v.iter().map(|h| h.norm_sqr()).sum::<f64>().sqrt();
        let nb = norm(ch.h_ris_bob());
        let ne = norm(ch.h_ris_eve());
        assert!((nb - ne).abs() / nb < 1e-12);

        // independent recomputation of ‖h_ris_bob‖ from per-element distances
        let scene = Scene::desk_default();
        let p = unit_params();
        let lambda = p.wavelength();
        let mut acc = 0.0;
        for e in scene.element_positions() {
            let to_bob = scene.bob_pos() - e;
            let d = to_bob.norm();
            let cos = (to_bob.x / d).max(0.0);
            let amp = lambda / (4.0 * PI * d) * cos; // cos² power → cos amplitude
            acc += amp * amp;
        }
        assert!((acc.sqrt() - nb).abs() / nb < 1e-12);
    }

    #[test]
    fn far_field_scaling() {
        let p = unit_params();
        let mut spec = SceneSpec::desk_default();
        spec.bob_pos = Vec3::new(10.0, 2.0, 0.0);
        let near = generate_channels(&Scene::new(spec.clone()).unwrap(), &p).unwrap();
        spec.bob_pos = spec.ris_center + (Vec3::new(10.0, 2.0, 0.0) - spec.ris_center) * 2.0;
        let far = generate_channels(&Scene::new(spec).unwrap(), &p).unwrap();
        for (a, b) in near.h_ris_bob().iter().zip(far.h_ris_bob()) {
            let ratio = b.norm() / a.norm();
            assert!((ratio - 0.5).abs() < 0.005, "{ratio}");
        }
    }

    #[test]
    fn reciprocity_of_magnitude() {
        let p = unit_params();
        let a = Vec3::new(0.1, 0.2, 0.3);
        let b = Vec3::new(1.0, -0.7, 0.0);
        let ab = path_coefficient(a, b, &p, 2.0, 0.5).unwrap();
        let ba = path_coefficient(b, a, &p, 0.5, 2.0).unwrap();
        assert!((ab.norm() - ba.norm()).abs() < 1e-18);
    }

    #[test]
    fn random_phases_keep_amplitudes() {
        let ch = generate_channels(&Scene::desk_default(), &unit_params()).unwrap();
        let r = ch.with_random_phases(7);
        assert_ne!(r, ch);
        for (a, b) in ch.h_s_ris().iter().zip(r.h_s_ris()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
        assert_eq!(r, ch.with_random_phases(7));
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let one = vec![Complex64::new(1.0, 0.0)];
        let r = ChannelSet::new(one.clone(), one.clone(), one, vec![]);
        assert!(matches!(r, Err(Error::LengthMismatch { .. })));
    }
}
