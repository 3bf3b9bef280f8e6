//! Passive elements placed in paths 1 and 2: dispersive media and
//! sinusoidally driven phase modulators.

use num_complex::Complex64;

use crate::bessel::bessel_j_sequence;
use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;

/// Pure-phase medium `H(ω₀+Ω) = exp(i Σ_k Φ_k Ω^k / k!)`.
///
/// `phase_coeffs[i]` is `Φ_{i+1}` in ps^(i+1): delay, GDD, third-order
/// dispersion, and so on up to fifth order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DispersiveElement {
    phase_coeffs: Vec<f64>,
}

impl DispersiveElement {
    pub const MAX_ORDER: usize = 5;

    pub fn new(phase_coeffs: Vec<f64>) -> Result<Self> {
        if phase_coeffs.len() > Self::MAX_ORDER {
            return Err(Error::InvalidElement(format!(
                "dispersion expansion limited to order {}, got {}",
                Self::MAX_ORDER,
                phase_coeffs.len()
            )));
        }
        if phase_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidElement("non-finite dispersion coefficient".into()));
        }
        Ok(Self { phase_coeffs })
    }

    pub fn identity() -> Self {
        Self::default()
    }

    /// Pure group-delay dispersion `Φ₂` (ps²).
    pub fn gdd(phi2: f64) -> Self {
        Self {
            phase_coeffs: vec![0.0, phi2],
        }
    }

    pub fn phase_coeffs(&self) -> &[f64] {
        &self.phase_coeffs
    }

    pub fn is_identity(&self) -> bool {
        self.phase_coeffs.iter().all(|&c| c == 0.0)
    }

    /// Spectral phase `Σ_k Φ_k Ω^k / k!`.
    pub fn phase(&self, omega: f64) -> f64 {
        taylor_phase(&self.phase_coeffs, omega)
    }

    pub fn transfer(&self, omega: f64) -> Complex64 {
        if self.phase_coeffs.is_empty() {
            return Complex64::new(1.0, 0.0);
        }
        Complex64::from_polar(1.0, self.phase(omega))
    }
}

/// `Σ_k c_k Ω^k / k!` for `coeffs[i] = c_{i+1}`.
pub(crate) fn taylor_phase(coeffs: &[f64], omega: f64) -> f64 {
    let mut term = 1.0;
    let mut acc = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        term *= omega / (i + 1) as f64;
        acc += c * term;
    }
    acc
}

/// Derivative of [`taylor_phase`], i.e. the group delay.
pub(crate) fn taylor_group_delay(coeffs: &[f64], omega: f64) -> f64 {
    let mut term = 1.0;
    let mut acc = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        if i > 0 {
            term *= omega / i as f64;
        }
        acc += c * term;
    }
    acc
}

pub fn dispersive_transfer(element: &DispersiveElement, grid: &FrequencyGrid) -> Vec<Complex64> {
    (0..grid.n_points())
        .map(|k| element.transfer(grid.omega(k)))
        .collect()
}

/// Sideband line of a phase modulator comb.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombLine {
    pub n: i64,
    pub weight: f64,
}

/// Frequency response `M(Ω) = Σ_n J_n(Δθ) δ(Ω - nΩ_m)` of a modulator
/// driven as `exp(iΔθ sin Ω_m t)`, kept as a sparse list of lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatorComb {
    mod_freq: f64,
    index: f64,
    lines: Vec<CombLine>,
}

impl ModulatorComb {
    pub const PRUNE_BELOW: f64 = 1e-12;
    pub const MAX_INDEX: f64 = 20.0;

    pub fn mod_freq(&self) -> f64 {
        self.mod_freq
    }

    pub fn index(&self) -> f64 {
        self.index
    }

    /// Lines in increasing `n`.
    pub fn lines(&self) -> &[CombLine] {
        &self.lines
    }

    pub fn n_max(&self) -> i64 {
        self.lines.iter().map(|l| l.n.abs()).max().unwrap_or(0)
    }

    pub fn weight(&self, n: i64) -> f64 {
        self.lines
            .binary_search_by_key(&n, |l| l.n)
            .map(|i| self.lines[i].weight)
            .unwrap_or(0.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.lines.iter().map(|l| l.weight * l.weight).sum()
    }
}

pub fn build_comb(mod_freq: f64, index: f64) -> Result<ModulatorComb> {
    if !(mod_freq > 0.0 && mod_freq.is_finite()) {
        return Err(Error::InvalidElement(format!(
            "modulation frequency must be > 0, got {mod_freq}"
        )));
    }
    if !(index.abs() <= ModulatorComb::MAX_INDEX) {
        return Err(Error::InvalidElement(format!(
            "modulation index must satisfy |Δθ| <= {}, got {index}",
            ModulatorComb::MAX_INDEX
        )));
    }
    // J_n(20) < 1e-12 well before n = 60
    let top = (index.abs().ceil() as usize + 40).min(crate::bessel::MAX_ORDER as usize);
    let seq = bessel_j_sequence(index, top)?;
    let mut lines = Vec::new();
    for (n, &j) in seq.iter().enumerate().rev().filter(|(_, j)| j.abs() >= ModulatorComb::PRUNE_BELOW) {
        if n > 0 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            lines.push(CombLine {
                n: -(n as i64),
                weight: sign * j,
            });
        }
    }
    lines.extend(
        seq.iter()
            .enumerate()
            .filter(|(_, j)| j.abs() >= ModulatorComb::PRUNE_BELOW)
            .map(|(n, &j)| CombLine { n: n as i64, weight: j }),
    );
    Ok(ModulatorComb {
        mod_freq,
        index,
        lines,
    })
}
