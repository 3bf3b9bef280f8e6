use std::f64::consts::PI;

use spdc_g2::{BeamConfig, Complex64, DispersiveElement, FrequencyGrid, PhaseMismatch, SourceFields};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("perturbative amplitude only valid for gain <= 0.05, got {0}")]
    GainTooLarge(f64),
}

pub const MAX_TAUS: usize = 4096;

/// Composite Simpson weights for `n` uniformly spaced samples with step
/// `h`. An even sample count closes the last interval with a trapezoid.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 3);
    let odd_n = if n % 2 == 1 { n } else { n - 1 };
    let mut w = vec![0.0; n];
    for (i, wi) in w.iter_mut().enumerate().take(odd_n) {
        *wi = if i == 0 || i == odd_n - 1 {
            h / 3.0
        } else if i % 2 == 1 {
            4.0 * h / 3.0
        } else {
            2.0 * h / 3.0
        };
    }
    if odd_n < n {
        w[n - 2] += 0.5 * h;
        w[n - 1] += 0.5 * h;
    }
    w
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn element_phase(el: &DispersiveElement, omega: f64) -> f64 {
    el.phase_coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * omega.powi(i as i32 + 1) / factorial(i + 1))
        .sum()
}

/// `G²(τ)` by direct quadrature for each delay in `taus`. Same contract as
/// the FFT correlators, O(n·len(taus)).
pub fn quadrature_g2(
    source: &SourceFields,
    h1: &DispersiveElement,
    h2: &DispersiveElement,
    beam: BeamConfig,
    taus: &[f64],
) -> Vec<f64> {
    assert!(taus.len() <= MAX_TAUS, "oracle limited to {MAX_TAUS} delays");
    let grid = &source.grid;
    let n = grid.n_points();
    let dw = grid.delta_omega();
    let w = simpson_weights(n, dw);
    let omega = |k: usize| -(n as f64 / 2.0) * dw + k as f64 * dw;

    let filtered: Vec<Complex64> = (0..n)
        .map(|k| {
            let o = omega(k);
            match beam {
                BeamConfig::Interbeam => {
                    source.r[k] * Complex64::from_polar(1.0, element_phase(h1, o) + element_phase(h2, -o))
                }
                BeamConfig::Intrabeam => {
                    source.s[k] * Complex64::from_polar(1.0, element_phase(h2, o) - element_phase(h1, o))
                }
            }
        })
        .collect();
    let flux: f64 = source.s.iter().zip(&w).map(|(s, wk)| s * wk).sum::<f64>() / (2.0 * PI);

    taus.iter()
        .map(|&tau| {
            let c: Complex64 = filtered
                .iter()
                .enumerate()
                .map(|(k, f)| f * Complex64::from_polar(w[k], omega(k) * tau))
                .sum::<Complex64>()
                / (2.0 * PI);
            flux * flux + c.norm_sqr()
        })
        .collect()
}

/// Structured term `|C(τ)|²` for a Gaussian pair amplitude
/// `R = exp(-Ω²/4B²)` behind a total GDD `D`, in closed form.
pub fn chirped_gaussian_structure(bandwidth: f64, gdd: f64, tau: f64) -> f64 {
    let a = Complex64::new(1.0 / (4.0 * bandwidth * bandwidth), -0.5 * gdd);
    let c = (Complex64::new(PI, 0.0) / a).sqrt() * (-(tau * tau) / (4.0 * a)).exp() / (2.0 * PI);
    c.norm_sqr()
}

/// RMS width of a transform-limited Gaussian trace after GDD `D`:
/// `sqrt(τ₀² + (D/2τ₀)²)`.
pub fn chirped_width(tau0: f64, gdd: f64) -> f64 {
    (tau0 * tau0 + (gdd / (2.0 * tau0)).powi(2)).sqrt()
}

/// First-order (low gain) signal amplitude `-i·gain·e^{iΔL/2}·sinc(ΔL/2)`.
pub fn perturbative_v(
    gain: f64,
    mismatch: &PhaseMismatch,
    grid: &FrequencyGrid,
) -> Result<Vec<Complex64>, OracleError> {
    if gain > 0.05 {
        return Err(OracleError::GainTooLarge(gain));
    }
    Ok((0..grid.n_points())
        .map(|k| {
            let o = grid.omega(k);
            let dl: f64 = mismatch
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, d)| d * o.powi(i as i32 + 1))
                .sum();
            let half = 0.5 * dl;
            let sinc = if half == 0.0 { 1.0 } else { half.sin() / half };
            Complex64::new(0.0, -gain) * Complex64::from_polar(sinc, half)
        })
        .collect())
}

/// `J_n(x) = (1/π) ∫₀^π cos(nθ - x sin θ) dθ`, 2048-interval Simpson.
pub fn bessel_quadrature(n: i64, x: f64) -> f64 {
    const INTERVALS: usize = 2048;
    let h = PI / INTERVALS as f64;
    let w = simpson_weights(INTERVALS + 1, h);
    (0..=INTERVALS)
        .map(|i| {
            let t = i as f64 * h;
            w[i] * (n as f64 * t - x * t.sin()).cos()
        })
        .sum::<f64>()
        / PI
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalModel {
    /// Two identical coherent pulses, one per dispersive arm.
    CoherentPulses,
    /// Thermal light split into two dispersive arms.
    ThermalSplit,
}

/// Gaussian-envelope reference widths of the classical comparison cases,
/// with unit scale: `τ₀² + (Φ₁²+Φ₂²)/4τ₀²` (coherent) and
/// `τ₀² + (Φ₁-Φ₂)²/4τ₀²` (thermal).
pub fn classical_reference_width(tau0: f64, phi1: f64, phi2: f64, model: ClassicalModel) -> f64 {
    let spread = match model {
        ClassicalModel::CoherentPulses => phi1 * phi1 + phi2 * phi2,
        ClassicalModel::ThermalSplit => (phi1 - phi2).powi(2),
    };
    (tau0 * tau0 + spread / (4.0 * tau0 * tau0)).sqrt()
}
