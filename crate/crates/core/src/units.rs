//! Boundary conversions between user-facing units and the SI/linear values
//! used everywhere else in the crate.

/// Square meters per square kilometer.
pub const M2_PER_KM2: f64 = 1.0e6;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn per_km2_to_per_m2(density: f64) -> f64 {
    density / M2_PER_KM2
}

pub fn per_m2_to_per_km2(density: f64) -> f64 {
    density * M2_PER_KM2
}

/// Noise-to-reference-signal ratio β₀ from the SNR at the reference distance, in dB.
pub fn beta0_from_snr_db(snr_db: f64) -> f64 {
    db_to_linear(-snr_db)
}

pub fn snr_db_from_beta0(beta0: f64) -> f64 {
    -linear_to_db(beta0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((db_to_linear(-15.0) - 10f64.powf(-1.5)).abs() < 1e-15);
        assert!((beta0_from_snr_db(40.0) - 1e-4).abs() < 1e-18);
        assert_eq!(per_km2_to_per_m2(1.0), 1e-6);
    }

    #[test]
    fn round_trips() {
        for db in [-20.0, -3.0, 0.0, 7.5, 50.0] {
            assert!((linear_to_db(db_to_linear(db)) - db).abs() < 1e-12);
            assert!((snr_db_from_beta0(beta0_from_snr_db(db)) - db).abs() < 1e-12);
        }
        assert!((per_m2_to_per_km2(per_km2_to_per_m2(3.7)) - 3.7).abs() < 1e-15);
    }
}
