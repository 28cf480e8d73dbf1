//! Physical placement of the transmitters, the RIS panel and the two
//! receivers, plus the link-level system parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::units::SPEED_OF_LIGHT;

/// Geometric layout of the link. Constructed only through [`Scene::new`],
/// which enforces the grid and separation invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    cs_tx_pos: Vec3,
    an_tx_pos: Vec3,
    ris_center: Vec3,
    ris_rows: usize,
    ris_cols: usize,
    element_spacing_row: f64,
    element_spacing_col: f64,
    bob_pos: Vec3,
    eve_pos: Vec3,
    ris_normal: Vec3,
    element_order: Vec<usize>,
}

/// Plain-data description of a [`Scene`], validated by [`Scene::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub cs_tx_pos: Vec3,
    pub an_tx_pos: Vec3,
    pub ris_center: Vec3,
    pub ris_rows: usize,
    pub ris_cols: usize,
    pub element_spacing_row: f64,
    pub element_spacing_col: f64,
    pub bob_pos: Vec3,
    pub eve_pos: Vec3,
    pub ris_normal: Vec3,
    /// Partition enumeration: `element_order[n]` is the row-major index of
    /// the element that occupies partition slot `n`. `None` means row-major.
    pub element_order: Option<Vec<usize>>,
}

impl SceneSpec {
    /// The desk-scale layout used throughout the simulations: an 8×8 panel
    /// with 0.041 m pitch at (0, 0, 0.4) facing +x.
    pub fn desk_default() -> Self {
        Self {
            cs_tx_pos: Vec3::new(0.74, 0.31, 0.0),
            an_tx_pos: Vec3::new(0.74, -0.31, 0.0),
            ris_center: Vec3::new(0.0, 0.0, 0.4),
            ris_rows: 8,
            ris_cols: 8,
            element_spacing_row: 0.041,
            element_spacing_col: 0.041,
            bob_pos: Vec3::new(1.19, 1.41, 0.0),
            eve_pos: Vec3::new(1.19, -1.41, 0.0),
            ris_normal: Vec3::new(1.0, 0.0, 0.0),
            element_order: None,
        }
    }
}

impl Scene {
    pub fn new(spec: SceneSpec) -> Result<Self> {
        let n = spec.ris_rows * spec.ris_cols;
        if n == 0 {
            return Err(Error::InvalidScene("ris_rows × ris_cols must be positive".into()));
        }
        for (name, d) in [
            ("element_spacing_row", spec.element_spacing_row),
            ("element_spacing_col", spec.element_spacing_col),
        ] {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::InvalidScene(format!("{name} must be positive, got {d}")));
            }
        }
        for (name, p) in [
            ("cs_tx_pos", spec.cs_tx_pos),
            ("an_tx_pos", spec.an_tx_pos),
            ("ris_center", spec.ris_center),
            ("bob_pos", spec.bob_pos),
            ("eve_pos", spec.eve_pos),
        ] {
            if !p.is_finite() {
                return Err(Error::InvalidScene(format!("{name} is not finite")));
            }
        }
        let normal = spec
            .ris_normal
            .normalized()
            .ok_or_else(|| Error::InvalidScene("ris_normal must be non-zero".into()))?;
        let element_order = match spec.element_order {
            None => (0..n).collect(),
            Some(order) => {
                let mut seen = vec![false; n];
                if order.len() != n {
                    return Err(Error::InvalidScene(format!(
                        "element_order has {} entries, expected {n}",
                        order.len()
                    )));
                }
                for &i in &order {
                    if i >= n || seen[i] {
                        return Err(Error::InvalidScene(
                            "element_order must be a permutation of 0..N".into(),
                        ));
                    }
                    seen[i] = true;
                }
                order
            }
        };
        let scene = Self {
            cs_tx_pos: spec.cs_tx_pos,
            an_tx_pos: spec.an_tx_pos,
            ris_center: spec.ris_center,
            ris_rows: spec.ris_rows,
            ris_cols: spec.ris_cols,
            element_spacing_row: spec.element_spacing_row,
            element_spacing_col: spec.element_spacing_col,
            bob_pos: spec.bob_pos,
            eve_pos: spec.eve_pos,
            ris_normal: normal,
            element_order,
        };
        for p in scene.element_positions_row_major() {
            for (name, t) in scene.terminals() {
                if p.distance(t) <= 0.0 {
                    return Err(Error::DegenerateGeometry(format!(
                        "{name} coincides with an RIS element"
                    )));
                }
            }
        }
        Ok(scene)
    }

    pub fn desk_default() -> Self {
        Self::new(SceneSpec::desk_default()).expect("default scene is valid")
    }

    pub fn spec(&self) -> SceneSpec {
        let identity = self.element_order.iter().enumerate().all(|(i, &j)| i == j);
        SceneSpec {
            cs_tx_pos: self.cs_tx_pos,
            an_tx_pos: self.an_tx_pos,
            ris_center: self.ris_center,
            ris_rows: self.ris_rows,
            ris_cols: self.ris_cols,
            element_spacing_row: self.element_spacing_row,
            element_spacing_col: self.element_spacing_col,
            bob_pos: self.bob_pos,
            eve_pos: self.eve_pos,
            ris_normal: self.ris_normal,
            element_order: (!identity).then(|| self.element_order.clone()),
        }
    }

    fn terminals(&self) -> [(&'static str, Vec3); 4] {
        [
            ("cs_tx_pos", self.cs_tx_pos),
            ("an_tx_pos", self.an_tx_pos),
            ("bob_pos", self.bob_pos),
            ("eve_pos", self.eve_pos),
        ]
    }

    pub fn num_elements(&self) -> usize {
        self.ris_rows * self.ris_cols
    }

    pub fn rows(&self) -> usize {
        self.ris_rows
    }

    pub fn cols(&self) -> usize {
        self.ris_cols
    }

    pub fn cs_tx_pos(&self) -> Vec3 {
        self.cs_tx_pos
    }

    pub fn an_tx_pos(&self) -> Vec3 {
        self.an_tx_pos
    }

    pub fn ris_center(&self) -> Vec3 {
        self.ris_center
    }

    pub fn bob_pos(&self) -> Vec3 {
        self.bob_pos
    }

    pub fn eve_pos(&self) -> Vec3 {
        self.eve_pos
    }

    pub fn ris_normal(&self) -> Vec3 {
        self.ris_normal
    }

    pub fn element_order(&self) -> &[usize] {
        &self.element_order
    }

    /// Same scene with Bob and Eve swapped.
    pub fn with_receivers_swapped(&self) -> Self {
        let mut s = self.clone();
        std::mem::swap(&mut s.bob_pos, &mut s.eve_pos);
        s
    }

    /// In-plane unit axes `(row_dir, col_dir)`. Column index grows along
    /// `col_dir = up × normal` (with `up = +z`, or `+x` when the panel faces
    /// ±z); row index grows along `row_dir = col_dir × normal`, so row 0 is the
    /// top row and column 0 the leftmost one as seen from the front.
    pub fn panel_axes(&self) -> (Vec3, Vec3) {
        let n = self.ris_normal;
        let up = if n.z.abs() > 1.0 - 1e-9 {
            Vec3::new(1.0, 0.0, 0.0)
        } else {
            Vec3::new(0.0, 0.0, 1.0)
        };
        let col_dir = up.cross(n).normalized().expect("up is not parallel to normal");
        let row_dir = col_dir.cross(n);
        (row_dir, col_dir)
    }

    /// Element positions in row-major grid order.
    pub fn element_positions_row_major(&self) -> Vec<Vec3> {
        let (row_dir, col_dir) = self.panel_axes();
        let r0 = (self.ris_rows as f64 - 1.0) / 2.0;
        let c0 = (self.ris_cols as f64 - 1.0) / 2.0;
        let mut out = Vec::with_capacity(self.num_elements());
        for r in 0..self.ris_rows {
            for c in 0..self.ris_cols {
                let dr = (r as f64 - r0) * self.element_spacing_row;
                let dc = (c as f64 - c0) * self.element_spacing_col;
                out.push(self.ris_center + row_dir * dr + col_dir * dc);
            }
        }
        out
    }

    /// Element positions in partition order (row-major unless the scene
    /// carries an explicit `element_order`).
    pub fn element_positions(&self) -> Vec<Vec3> {
        let grid = self.element_positions_row_major();
        self.element_order.iter().map(|&i| grid[i]).collect()
    }
}

/// Link budget parameters, all in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    carrier_freq: f64,
    total_power: f64,
    tx_antenna_gain: f64,
    noise_power_bob: f64,
    noise_power_eve: f64,
    cosine_exponent: f64,
    sample_rate: f64,
}

impl SystemParams {
    /// All arguments are linear: Hz, watts and linear gain.
    pub fn new(
        carrier_freq: f64,
        total_power: f64,
        tx_antenna_gain: f64,
        noise_power_bob: f64,
        noise_power_eve: f64,
        cosine_exponent: f64,
        sample_rate: f64,
    ) -> Result<Self> {
        fn positive(name: &'static str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: format!("must be positive and finite, got {v}") })
            }
        }
        positive("carrier_freq", carrier_freq)?;
        positive("total_power", total_power)?;
        positive("tx_antenna_gain", tx_antenna_gain)?;
        positive("noise_power_bob", noise_power_bob)?;
        positive("noise_power_eve", noise_power_eve)?;
        positive("sample_rate", sample_rate)?;
        if !(cosine_exponent >= 0.0 && cosine_exponent.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "cosine_exponent",
                reason: format!("must be finite and >= 0, got {cosine_exponent}"),
            });
        }
        let p = Self {
            carrier_freq,
            total_power,
            tx_antenna_gain,
            noise_power_bob,
            noise_power_eve,
            cosine_exponent,
            sample_rate,
        };
        let lambda = p.wavelength();
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter { name: "carrier_freq", reason: "wavelength is not finite".into() });
        }
        Ok(p)
    }

    /// 3.75 GHz, −9 dBm, 13 dBi horn, −90 dBm noise at both receivers,
    /// 0.5 MHz sampling, cosine exponent 1.
    pub fn desk_default() -> Self {
        use crate::units::{db_to_linear, dbm_to_watts};
        Self::new(
            3.75e9,
            dbm_to_watts(-9.0),
            db_to_linear(13.0),
            dbm_to_watts(-90.0),
            dbm_to_watts(-90.0),
            1.0,
            0.5e6,
        )
        .expect("default parameters are valid")
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq
    }

    pub fn carrier_freq(&self) -> f64 {
        self.carrier_freq
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    pub fn tx_antenna_gain(&self) -> f64 {
        self.tx_antenna_gain
    }

    pub fn noise_power_bob(&self) -> f64 {
        self.noise_power_bob
    }

    pub fn noise_power_eve(&self) -> f64 {
        self.noise_power_eve
    }

    pub fn cosine_exponent(&self) -> f64 {
        self.cosine_exponent
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn with_noise_powers(self, bob: f64, eve: f64) -> Result<Self> {
        Self::new(
            self.carrier_freq,
            self.total_power,
            self.tx_antenna_gain,
            bob,
            eve,
            self.cosine_exponent,
            self.sample_rate,
        )
    }

    pub fn with_total_power(self, watts: f64) -> Result<Self> {
        Self::new(
            self.carrier_freq,
            watts,
            self.tx_antenna_gain,
            self.noise_power_bob,
            self.noise_power_eve,
            self.cosine_exponent,
            self.sample_rate,
        )
    }

    pub fn with_cosine_exponent(self, q: f64) -> Result<Self> {
        Self::new(
            self.carrier_freq,
            self.total_power,
            self.tx_antenna_gain,
            self.noise_power_bob,
            self.noise_power_eve,
            q,
            self.sample_rate,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_with_grid(rows: usize, cols: usize, d: f64) -> SceneSpec {
        SceneSpec { ris_rows: rows, ris_cols: cols, element_spacing_row: d, element_spacing_col: d, ..SceneSpec::desk_default() }
    }

    #[test]
    fn single_element_sits_at_center() {
        let mut spec = spec_with_grid(1, 1, 0.041);
        spec.ris_center = Vec3::default();
        let scene = Scene::new(spec).unwrap();
        assert_eq!(scene.element_positions(), vec![Vec3::default()]);
    }

    #[test]
    fn two_by_one_grid() {
        let scene = Scene::new(spec_with_grid(2, 1, 0.041)).unwrap();
        let p = scene.element_positions();
        assert_eq!(p.len(), 2);
        assert!((p[0].distance(p[1]) - 0.041).abs() < 1e-15);
        let mid = (p[0] + p[1]) * 0.5;
        assert!(mid.distance(Vec3::new(0.0, 0.0, 0.4)) < 1e-15);
    }

    #[test]
    fn eight_by_eight_aperture() {
        let scene = Scene::desk_default();
        let p = scene.element_positions();
        assert_eq!(p.len(), 64);
        // corners of the first row and first column
        assert!((p[0].distance(p[7]) - 0.287).abs() < 1e-12);
        assert!((p[0].distance(p[56]) - 0.287).abs() < 1e-12);
        // neighbours along a row use the column pitch
        assert!((p[0].distance(p[1]) - 0.041).abs() < 1e-12);
        assert!((p[0].distance(p[8]) - 0.041).abs() < 1e-12);
        // panel is orthogonal to the normal
        for q in &p {
            assert!((*q - scene.ris_center()).dot(scene.ris_normal()).abs() < 1e-15);
        }
    }

    #[test]
    fn default_orientation_row_zero_on_top() {
        let p = Scene::desk_default().element_positions();
        assert!(p[0].z > p[56].z);
        assert!(p[0].y < p[7].y);
    }

    #[test]
    fn rejects_empty_grid() {
        assert!(matches!(Scene::new(spec_with_grid(0, 8, 0.041)), Err(Error::InvalidScene(_))));
    }

    #[test]
    fn rejects_non_positive_spacing() {
        assert!(Scene::new(spec_with_grid(2, 2, 0.0)).is_err());
        assert!(Scene::new(spec_with_grid(2, 2, -0.1)).is_err());
    }

    #[test]
    fn rejects_terminal_on_element() {
        let mut spec = spec_with_grid(1, 1, 0.041);
        spec.bob_pos = spec.ris_center;
        assert!(matches!(Scene::new(spec), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn element_order_must_be_permutation() {
        let mut spec = spec_with_grid(1, 2, 0.041);
        spec.element_order = Some(vec![1, 1]);
        assert!(Scene::new(spec.clone()).is_err());
        spec.element_order = Some(vec![1, 0]);
        let scene = Scene::new(spec).unwrap();
        let grid = scene.element_positions_row_major();
        assert_eq!(scene.element_positions(), vec![grid[1], grid[0]]);
    }

    #[test]
    fn params_reject_non_positive() {
        assert!(SystemParams::new(3.75e9, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(SystemParams::new(3.75e9, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0).is_err());
        assert!(SystemParams::new(f64::INFINITY, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn default_wavelength() {
        let lambda = SystemParams::desk_default().wavelength();
        assert!((lambda - 0.079_944_655_5).abs() < 1e-9);
    }
}
