//! Logarithmic ↔ linear conversions. Configuration files carry dBm/dBi;
//! everything in memory is watts and linear gains.

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts * 1e3).log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minus_nine_dbm() {
        let w = dbm_to_watts(-9.0);
        assert!((w - 1.2589e-4).abs() / 1.2589e-4 < 1e-4);
    }

    #[test]
    fn thirteen_dbi() {
        assert!((db_to_linear(13.0) - 19.952_623_149_688_8).abs() < 1e-9);
    }

    #[test]
    fn inverse_conversions() {
        for v in [-90.0, -9.0, 0.0, 13.0, 30.0] {
            assert!((watts_to_dbm(dbm_to_watts(v)) - v).abs() < 1e-12);
            assert!((linear_to_db(db_to_linear(v)) - v).abs() < 1e-12);
        }
    }
}
