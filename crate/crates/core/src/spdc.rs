//! Closed-form Heisenberg-picture solution of CW-pumped degenerate SPDC.
//!
//! The signal/idler annihilation operators at the crystal output are a
//! Bogoliubov mix of the input vacuum modes, `a_s(Ω) = U(Ω) b_s(Ω) +
//! V(Ω) b_i†(-Ω)`. Everything downstream only needs the sampled transfer
//! functions and the two derived spectra:
//!
//! * `R(Ω) = U(Ω) V(-Ω)`, the signal-idler pair amplitude,
//! * `S(Ω) = |V(Ω)|²`, the photon spectrum of either beam.
//!
//! Units: `Ω` in rad/ps, gain is the dimensionless product `σL`, and the
//! phase mismatch is given as `Δ(Ω)·L = Σ_k d_k Ω^k` with `d_k` in ps^k.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;

const SERIES_THRESHOLD: f64 = 1e-6;

/// Taylor expansion of the phase mismatch `Δ(Ω)·L`, constant term excluded.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseMismatch {
    coeffs: Vec<f64>,
}

impl PhaseMismatch {
    pub const MAX_ORDER: usize = 6;

    /// `coeffs[i]` multiplies `Ω^(i+1)`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() > Self::MAX_ORDER {
            return Err(Error::InvalidSource(format!(
                "phase mismatch expansion limited to order {}, got {}",
                Self::MAX_ORDER,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSource("non-finite mismatch coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    /// Accepts an explicit constant term, which must vanish: the source is
    /// assumed phase matched at degeneracy.
    pub fn with_constant(constant: f64, coeffs: Vec<f64>) -> Result<Self> {
        if constant != 0.0 {
            return Err(Error::InvalidSource(format!(
                "constant phase mismatch must be zero (degenerate phase matching), got {constant}"
            )));
        }
        Self::new(coeffs)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `Δ(Ω)·L`
    pub fn eval(&self, omega: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &d| (acc + d) * omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeShape {
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceSpec {
    /// Bogoliubov solution with gain `σL` and a phase mismatch.
    Physical {
        gain: f64,
        mismatch: PhaseMismatch,
        /// `ω₀` in rad/ps; carried for reports only.
        center_frequency: Option<f64>,
    },
    /// Prescribed envelopes: `R(Ω) = exp(-Ω²/4B²)`, `S = R²`.
    Analytic {
        bandwidth: f64,
        shape: EnvelopeShape,
        center_frequency: Option<f64>,
    },
}

impl SourceSpec {
    pub fn physical(gain: f64, mismatch: PhaseMismatch) -> Self {
        SourceSpec::Physical {
            gain,
            mismatch,
            center_frequency: None,
        }
    }

    pub fn gaussian(bandwidth: f64) -> Self {
        SourceSpec::Analytic {
            bandwidth,
            shape: EnvelopeShape::Gaussian,
            center_frequency: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SourceSpec::Physical { gain, .. } => {
                if !(gain >= 0.0 && gain.is_finite()) {
                    return Err(Error::InvalidSource(format!("gain must be >= 0, got {gain}")));
                }
            }
            SourceSpec::Analytic { bandwidth, .. } => {
                if !(bandwidth > 0.0 && bandwidth.is_finite()) {
                    return Err(Error::InvalidSource(format!(
                        "envelope bandwidth must be > 0, got {bandwidth}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Samples the source on `grid`.
    pub fn evaluate(&self, grid: &FrequencyGrid) -> Result<SourceFields> {
        match self {
            SourceSpec::Physical { .. } => evaluate_uv(self, grid),
            SourceSpec::Analytic { .. } => evaluate_analytic(self, grid),
        }
    }
}

/// Source quantities sampled on a [`FrequencyGrid`].
#[derive(Debug, Clone)]
pub struct SourceFields {
    pub spec: SourceSpec,
    pub grid: FrequencyGrid,
    /// `None` for analytic sources.
    pub u: Option<Vec<Complex64>>,
    pub v: Option<Vec<Complex64>>,
    pub r: Vec<Complex64>,
    pub s: Vec<f64>,
    /// `N = (1/2π) ∫ S(Ω) dΩ`, photons per ps.
    pub flux: f64,
}

impl SourceFields {
    pub fn is_physical(&self) -> bool {
        self.u.is_some()
    }

    /// Per-frequency flux density `N(Ω) = S(Ω)/2π`.
    pub fn flux_density(&self) -> Vec<f64> {
        self.s.iter().map(|s| s / (2.0 * PI)).collect()
    }

    /// RMS width of the photon spectrum `S(Ω)`, rad/ps.
    pub fn rms_bandwidth(&self) -> f64 {
        let omegas = self.grid.omegas();
        let mass: f64 = self.s.iter().sum();
        if mass <= 0.0 {
            return 0.0;
        }
        let mean = omegas.iter().zip(&self.s).map(|(w, s)| w * s).sum::<f64>() / mass;
        let var = omegas
            .iter()
            .zip(&self.s)
            .map(|(w, s)| (w - mean).powi(2) * s)
            .sum::<f64>()
            / mass;
        var.sqrt()
    }
}

/// `ΓL = (gain² - (ΔL)²/4)^{1/2}`, principal branch.
pub fn gamma_of(gain: f64, mismatch_phase: f64) -> Complex64 {
    Complex64::new(gain * gain - 0.25 * mismatch_phase * mismatch_phase, 0.0).sqrt()
}

/// `(cosh z, sinh z / z)`, with a series expansion near the branch point.
fn cosh_and_sinhc(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < SERIES_THRESHOLD {
        let z2 = z * z;
        let z4 = z2 * z2;
        (1.0 + z2 / 2.0 + z4 / 24.0, 1.0 + z2 / 6.0 + z4 / 120.0)
    } else {
        (z.cosh(), z.sinh() / z)
    }
}

/// `U` and `V` at a single detuning for the given gain and mismatch phase `ΔL`.
pub fn bogoliubov_uv(gain: f64, mismatch_phase: f64) -> (Complex64, Complex64) {
    let gamma = gamma_of(gain, mismatch_phase);
    let (cosh, sinhc) = cosh_and_sinhc(gamma);
    let carrier = Complex64::from_polar(1.0, 0.5 * mismatch_phase);
    let i = Complex64::i();
    let u = carrier * (cosh - i * (0.5 * mismatch_phase) * sinhc);
    let v = -i * gain * carrier * sinhc;
    (u, v)
}

pub fn evaluate_uv(spec: &SourceSpec, grid: &FrequencyGrid) -> Result<SourceFields> {
    spec.validate()?;
    let SourceSpec::Physical { gain, mismatch, .. } = spec else {
        return Err(Error::RequiresPhysicalSource);
    };
    let n = grid.n_points();
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    for k in 0..n {
        let omega = grid.omega(k);
        let (uk, vk) = bogoliubov_uv(*gain, mismatch.eval(omega));
        let (_, v_mirror) = bogoliubov_uv(*gain, mismatch.eval(-omega));
        u.push(uk);
        v.push(vk);
        r.push(uk * v_mirror);
    }
    let s: Vec<f64> = v.iter().map(|x| x.norm_sqr()).collect();
    let flux = grid.integrate(s.iter().copied()) / (2.0 * PI);
    Ok(SourceFields {
        spec: spec.clone(),
        grid: *grid,
        u: Some(u),
        v: Some(v),
        r,
        s,
        flux,
    })
}

pub fn evaluate_analytic(spec: &SourceSpec, grid: &FrequencyGrid) -> Result<SourceFields> {
    spec.validate()?;
    let SourceSpec::Analytic {
        bandwidth, shape, ..
    } = spec
    else {
        return Err(Error::InvalidSource("expected an analytic source".into()));
    };
    let r: Vec<Complex64> = match shape {
        EnvelopeShape::Gaussian => grid
            .omegas()
            .into_iter()
            .map(|w| Complex64::new((-w * w / (4.0 * bandwidth * bandwidth)).exp(), 0.0))
            .collect(),
    };
    let s: Vec<f64> = r.iter().map(|x| x.re * x.re).collect();
    let flux = grid.integrate(s.iter().copied()) / (2.0 * PI);
    Ok(SourceFields {
        spec: spec.clone(),
        grid: *grid,
        u: None,
        v: None,
        r,
        s,
        flux,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grid() -> FrequencyGrid {
        FrequencyGrid::new(1024, 0.02).unwrap()
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_of(1.0, 0.0), Complex64::new(1.0, 0.0));
        let g = gamma_of(0.0, 2.0);
        assert!(g.re.abs() < 1e-15 && (g.im - 1.0).abs() < 1e-15);
        assert_eq!(gamma_of(0.5, 1.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn branch_point_uses_series() {
        // ΓL = 0 exactly: sinh(ΓL)/ΓL -> 1
        let (u, v) = bogoliubov_uv(0.5, 1.0);
        assert!(u.is_finite() && v.is_finite());
        assert_relative_eq!(v.norm(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(u.norm_sqr() - v.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_gain_is_identity() {
        let m = PhaseMismatch::new(vec![0.7, 1.3, -0.2]).unwrap();
        let f = evaluate_uv(&SourceSpec::physical(0.0, m), &grid()).unwrap();
        for (u, v) in f.u.as_ref().unwrap().iter().zip(f.v.as_ref().unwrap()) {
            assert!((u - 1.0).norm() < 1e-14);
            assert_eq!(v.norm(), 0.0);
        }
        assert_eq!(f.flux, 0.0);
    }

    #[test]
    fn phase_matched_unit_gain() {
        let f = evaluate_uv(&SourceSpec::physical(1.0, PhaseMismatch::zero()), &grid()).unwrap();
        let k0 = f.grid.zero_delay_index();
        let u0 = f.u.as_ref().unwrap()[k0];
        let v0 = f.v.as_ref().unwrap()[k0];
        assert_relative_eq!(u0.re, 1.543_080_634_815_243_8, epsilon = 1e-14);
        assert!(u0.im.abs() < 1e-15);
        assert!(v0.re.abs() < 1e-15);
        assert_relative_eq!(v0.im, -1.175_201_193_643_801_4, epsilon = 1e-14);
    }

    #[test]
    fn low_gain_sinc_at_half_period() {
        // d1 chosen so that ΔL = π at Ω* = 1 rad/ps
        let grid = FrequencyGrid::new(256, 0.25).unwrap();
        let m = PhaseMismatch::new(vec![PI]).unwrap();
        let f = evaluate_uv(&SourceSpec::physical(0.01, m), &grid).unwrap();
        let k = grid.index_of(1.0).unwrap();
        let v = f.v.as_ref().unwrap()[k].norm();
        assert_relative_eq!(v, 0.006_366_197_723_675_814, max_relative = 1e-4);
    }

    #[test]
    fn analytic_gaussian() {
        let grid = FrequencyGrid::new(4096, 0.01).unwrap();
        let f = evaluate_analytic(&SourceSpec::gaussian(1.0), &grid).unwrap();
        let k0 = grid.zero_delay_index();
        assert_eq!(f.r[k0].re, 1.0);
        let k2 = grid.index_of(2.0).unwrap();
        assert_relative_eq!(f.r[k2].re, (-1.0f64).exp(), epsilon = 1e-15);
        for (r, s) in f.r.iter().zip(&f.s) {
            assert_eq!(*s, r.re * r.re);
        }
        assert!(f.u.is_none() && f.v.is_none());
        assert_relative_eq!(f.flux, 0.398_942_280_401_432_7, epsilon = 1e-6);
        assert_relative_eq!(f.rms_bandwidth(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn rejects_invalid_specs() {
        let grid = grid();
        assert!(evaluate_analytic(&SourceSpec::gaussian(0.0), &grid).is_err());
        assert!(evaluate_analytic(&SourceSpec::gaussian(-1.0), &grid).is_err());
        assert!(evaluate_uv(&SourceSpec::physical(-0.1, PhaseMismatch::zero()), &grid).is_err());
        assert_eq!(
            evaluate_uv(&SourceSpec::gaussian(1.0), &grid).unwrap_err(),
            Error::RequiresPhysicalSource
        );
        assert!(PhaseMismatch::with_constant(0.1, vec![1.0]).is_err());
        assert!(PhaseMismatch::with_constant(0.0, vec![1.0]).is_ok());
        assert!(PhaseMismatch::new(vec![0.0; 7]).is_err());
    }

    #[test]
    fn mismatch_polynomial() {
        let m = PhaseMismatch::new(vec![2.0, 0.5, -1.0]).unwrap();
        let w = 1.5f64;
        assert_relative_eq!(m.eval(w), 2.0 * w + 0.5 * w * w - w.powi(3), epsilon = 1e-14);
        assert_eq!(m.eval(0.0), 0.0);
    }

    #[test]
    fn branch_point_continuity() {
        for gain in [0.01, 0.3, 1.0, 4.0] {
            let below = bogoliubov_uv(gain, 2.0 * gain * (1.0 - 1e-9));
            let above = bogoliubov_uv(gain, 2.0 * gain * (1.0 + 1e-9));
            assert!((below.0 - above.0).norm() < 1e-6 * below.0.norm());
            assert!((below.1 - above.1).norm() < 1e-6 * below.1.norm());
        }
    }

    #[test]
    fn flux_increases_with_gain() {
        let m = PhaseMismatch::new(vec![0.0, 1.0]).unwrap();
        let fluxes: Vec<f64> = [0.05, 0.2, 0.5, 1.0, 2.0]
            .iter()
            .map(|&g| evaluate_uv(&SourceSpec::physical(g, m.clone()), &grid()).unwrap().flux)
            .collect();
        assert!(fluxes.windows(2).all(|w| w[1] > w[0]), "{fluxes:?}");
    }

    proptest! {
        #[test]
        fn unitarity(gain in 0.0f64..5.0, d1 in -3.0f64..3.0, d2 in -2.0f64..2.0) {
            let grid = FrequencyGrid::new(256, 0.05).unwrap();
            let m = PhaseMismatch::new(vec![d1, d2]).unwrap();
            let f = evaluate_uv(&SourceSpec::physical(gain, m), &grid).unwrap();
            for (u, v) in f.u.as_ref().unwrap().iter().zip(f.v.as_ref().unwrap()) {
                prop_assert!((u.norm_sqr() - v.norm_sqr() - 1.0).abs() < 1e-10);
            }
            prop_assert!(f.s.iter().all(|&s| s >= 0.0));
            prop_assert!(f.flux >= 0.0);
        }
    }
}
