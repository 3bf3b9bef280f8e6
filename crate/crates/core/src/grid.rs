//! Uniform, symmetric detuning grid and its FFT-paired delay grid.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Discretization of the detuning `Ω` from the degenerate frequency.
///
/// Sample `k` sits at `Ω = (k - n/2)·δΩ`, so the grid runs from `-Ω_max`
/// to `Ω_max - δΩ`. The paired delay grid uses the same index convention
/// with step `2π / (n·δΩ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    n_points: usize,
    delta_omega: f64,
}

impl FrequencyGrid {
    pub const MIN_POINTS: usize = 64;

    pub fn new(n_points: usize, delta_omega: f64) -> Result<Self> {
        if n_points < Self::MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points must be a power of two >= {}, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        if !(delta_omega > 0.0 && delta_omega.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "delta_omega must be positive and finite, got {delta_omega}"
            )));
        }
        Ok(Self {
            n_points,
            delta_omega,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn delta_omega(&self) -> f64 {
        self.delta_omega
    }

    pub fn omega_max(&self) -> f64 {
        (self.n_points / 2) as f64 * self.delta_omega
    }

    #[inline]
    pub fn omega(&self, k: usize) -> f64 {
        (k as f64 - (self.n_points / 2) as f64) * self.delta_omega
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.omega(k)).collect()
    }

    /// Index holding `-Ω_k`. The `k = 0` endpoint (`-Ω_max`) has no mirror
    /// on the grid and maps to itself.
    #[inline]
    pub fn reflect(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.n_points - k
        }
    }

    /// Nearest sample index for a detuning, if it lies on the grid.
    pub fn index_of(&self, omega: f64) -> Option<usize> {
        let k = (omega / self.delta_omega).round() as i64 + (self.n_points / 2) as i64;
        (0..self.n_points as i64).contains(&k).then_some(k as usize)
    }

    pub fn delay_step(&self) -> f64 {
        2.0 * PI / (self.n_points as f64 * self.delta_omega)
    }

    /// Full extent of the delay window, `n·δτ = 2π/δΩ`.
    pub fn delay_window(&self) -> f64 {
        2.0 * PI / self.delta_omega
    }

    #[inline]
    pub fn tau(&self, j: usize) -> f64 {
        (j as f64 - (self.n_points / 2) as f64) * self.delay_step()
    }

    pub fn taus(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.tau(j)).collect()
    }

    /// Index of `τ = 0` on the delay grid.
    pub fn zero_delay_index(&self) -> usize {
        self.n_points / 2
    }

    /// Riemann sum `Σ f(Ω_k)·δΩ`.
    pub fn integrate(&self, samples: impl IntoIterator<Item = f64>) -> f64 {
        samples.into_iter().sum::<f64>() * self.delta_omega
    }
}
