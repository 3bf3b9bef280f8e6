//! Benchmark fixtures shared by the criterion benches.

use spdc_g2::{FrequencyGrid, PhaseMismatch, SourceFields, SourceSpec};

/// Physical source at gain 1 with a linear mismatch on an `n`-point grid
/// spanning ±20 rad/ps.
pub fn physical_source(n: usize) -> SourceFields {
    let grid = FrequencyGrid::new(n, 40.0 / n as f64).expect("power-of-two grid");
    SourceSpec::physical(1.0, PhaseMismatch::new(vec![0.0, 1.0]).expect("valid mismatch"))
        .evaluate(&grid)
        .expect("source evaluates")
}

pub fn gaussian_source(n: usize, delta_omega: f64, bandwidth: f64) -> SourceFields {
    let grid = FrequencyGrid::new(n, delta_omega).expect("power-of-two grid");
    SourceSpec::gaussian(bandwidth).evaluate(&grid).expect("source evaluates")
}
