//! Second-order correlation observables of the signal/idler beams.
//!
//! Temporal correlators (dispersive elements in the two paths) are built
//! from one FFT of a filtered spectrum; spectral correlators (phase
//! modulators in the two paths) are returned either as a sparse comb under
//! the narrowband-modulator approximation or as a dense joint grid from
//! the exact double sideband sum. A continuum delta is represented on the
//! grid as `1/δΩ` on a single sample.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::elements::{build_comb, taylor_group_delay, DispersiveElement, ModulatorComb};
use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::spdc::SourceFields;

/// Fraction of the delay window a predicted trace may occupy.
pub const ALIAS_WINDOW_FRACTION: f64 = 0.4;
/// Largest comb span / source bandwidth accepted by the narrowband path.
pub const NARROWBAND_MAX_RATIO: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BeamConfig {
    /// Signal-idler (frequency anticorrelated) pairs.
    Interbeam,
    /// Two halves of the signal beam (frequency correlated).
    Intrabeam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Configuration {
    InterTime,
    IntraTime,
    InterFreq,
    IntraFreq,
}

impl Configuration {
    pub fn beam(self) -> BeamConfig {
        match self {
            Configuration::InterTime | Configuration::InterFreq => BeamConfig::Interbeam,
            Configuration::IntraTime | Configuration::IntraFreq => BeamConfig::Intrabeam,
        }
    }

    pub fn is_temporal(self) -> bool {
        matches!(self, Configuration::InterTime | Configuration::IntraTime)
    }

    pub fn name(self) -> &'static str {
        match self {
            Configuration::InterTime => "inter_time",
            Configuration::IntraTime => "intra_time",
            Configuration::InterFreq => "inter_freq",
            Configuration::IntraFreq => "intra_freq",
        }
    }
}

/// Temporal coincidence trace `G²(τ) = N² + |structure(τ)|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation1D {
    pub tau: Vec<f64>,
    pub values: Vec<f64>,
    /// Accidental floor `N²`.
    pub background: f64,
    pub peak_tau: f64,
}

impl Correlation1D {
    pub fn delay_step(&self) -> f64 {
        self.tau[1] - self.tau[0]
    }

    pub fn peak_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Value at `τ = 0`.
    pub fn zero_delay_value(&self) -> f64 {
        self.values[self.tau.len() / 2]
    }

    /// Background-subtracted trace.
    pub fn structure(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(move |v| v - self.background)
    }
}

/// `(1/2π) ∫ dΩ e^{iΩτ} F(Ω)` on the delay grid paired with `grid`.
pub fn delay_transform(grid: &FrequencyGrid, spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n_points();
    assert_eq!(spectrum.len(), n);
    // Ω_k τ_j = 2π (k - n/2)(j - n/2)/n; with n/2 even the cross terms
    // reduce to (-1)^k (-1)^j around a plain inverse DFT
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .enumerate()
        .map(|(k, &f)| if k % 2 == 0 { f } else { -f })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = grid.delta_omega() / (2.0 * PI);
    buf.iter_mut().enumerate().for_each(|(j, c)| {
        *c *= if j % 2 == 0 { scale } else { -scale };
    });
    buf
}

/// Phase coefficients of the product filter seen by the correlator.
///
/// Interbeam: `H₁(Ω)H₂(-Ω)` so odd orders of path 2 flip sign.
/// Intrabeam: `H₁*(Ω)H₂(Ω)`.
pub fn combined_phase_coeffs(
    h1: &DispersiveElement,
    h2: &DispersiveElement,
    beam: BeamConfig,
) -> Vec<f64> {
    let (a, b) = (h1.phase_coeffs(), h2.phase_coeffs());
    (0..a.len().max(b.len()))
        .map(|i| {
            let c1 = a.get(i).copied().unwrap_or(0.0);
            let c2 = b.get(i).copied().unwrap_or(0.0);
            let order = i + 1;
            match beam {
                BeamConfig::Interbeam if order % 2 == 0 => c1 + c2,
                BeamConfig::Interbeam => c1 - c2,
                BeamConfig::Intrabeam => c2 - c1,
            }
        })
        .collect()
}

fn check_alias(grid: &FrequencyGrid, spectrum: &[Complex64], combined: &[f64]) -> Result<()> {
    let weights: Vec<f64> = spectrum.iter().map(|f| f.norm_sqr()).collect();
    let mass: f64 = weights.iter().sum();
    let base = if mass > 0.0 {
        let omegas = grid.omegas();
        let mean = omegas.iter().zip(&weights).map(|(w, p)| w * p).sum::<f64>() / mass;
        let var = omegas
            .iter()
            .zip(&weights)
            .map(|(w, p)| (w - mean).powi(2) * p)
            .sum::<f64>()
            / mass;
        if var > 0.0 {
            0.5 / var.sqrt()
        } else {
            0.0
        }
    } else {
        0.0
    };
    let spread = (0..grid.n_points())
        .map(|k| taylor_group_delay(combined, grid.omega(k)).abs())
        .fold(0.0, f64::max);
    let predicted = base + spread;
    let window = grid.delay_window();
    if predicted > ALIAS_WINDOW_FRACTION * window {
        return Err(Error::AliasRisk { predicted, window });
    }
    Ok(())
}

fn trace_from_spectrum(source: &SourceFields, spectrum: &[Complex64]) -> Correlation1D {
    let grid = &source.grid;
    let background = source.flux * source.flux;
    let values: Vec<f64> = delay_transform(grid, spectrum)
        .iter()
        .map(|c| background + c.norm_sqr())
        .collect();
    let peak = values
        .iter()
        .enumerate()
        .fold(0, |best, (j, v)| if *v > values[best] { j } else { best });
    Correlation1D {
        tau: grid.taus(),
        values,
        background,
        peak_tau: grid.tau(peak),
    }
}

/// Signal-idler coincidence trace with `h1` in the signal path and `h2` in
/// the idler path.
pub fn g2_inter_time(
    source: &SourceFields,
    h1: &DispersiveElement,
    h2: &DispersiveElement,
) -> Result<Correlation1D> {
    let grid = &source.grid;
    let spectrum: Vec<Complex64> = (0..grid.n_points())
        .map(|k| source.r[k] * h1.transfer(grid.omega(k)) * h2.transfer(grid.omega(grid.reflect(k))))
        .collect();
    check_alias(grid, &spectrum, &combined_phase_coeffs(h1, h2, BeamConfig::Interbeam))?;
    Ok(trace_from_spectrum(source, &spectrum))
}

/// Signal-signal coincidence trace after a beam splitter, `h1` and `h2` in
/// the two output paths.
pub fn g2_intra_time(
    source: &SourceFields,
    h1: &DispersiveElement,
    h2: &DispersiveElement,
) -> Result<Correlation1D> {
    let grid = &source.grid;
    let spectrum: Vec<Complex64> = (0..grid.n_points())
        .map(|k| {
            let w = grid.omega(k);
            source.s[k] * h1.transfer(w).conj() * h2.transfer(w)
        })
        .collect();
    check_alias(grid, &spectrum, &combined_phase_coeffs(h1, h2, BeamConfig::Intrabeam))?;
    Ok(trace_from_spectrum(source, &spectrum))
}

/// Which frequency combination carries the comb.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RidgeAxis {
    /// Lines at `Ω₁ + Ω₂ = nΩ_m` (interbeam).
    OmegaPlus,
    /// Lines at `Ω₁ - Ω₂ = nΩ_m` (intrabeam).
    OmegaMinus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointLine {
    pub n: i64,
    /// Squared Bessel weight of the effective modulation index.
    pub coefficient: f64,
}

/// Joint spectral correlation under the narrowband-modulator approximation.
///
/// The structured part is `Σ_n coefficient(n) · envelope(free) · δ(ridge - nΩ_m)`;
/// the envelope is shared by every line. The background is separable,
/// `N₁(Ω₁)·N₂(Ω₂)`, both factors sampled on the source grid.
#[derive(Debug, Clone, PartialEq)]
pub struct JointComb {
    pub ridge_axis: RidgeAxis,
    pub mod_freq: f64,
    pub lines: Vec<JointLine>,
    /// Free-axis coordinate (`Ω₋` for interbeam, `Ω₊` for intrabeam), rad/ps.
    pub free_axis: Vec<f64>,
    pub envelope: Vec<f64>,
    pub background_1: Vec<f64>,
    pub background_2: Vec<f64>,
    pub grid: FrequencyGrid,
}

impl JointComb {
    pub fn coefficient(&self, n: i64) -> f64 {
        self.lines
            .iter()
            .find(|l| l.n == n)
            .map(|l| l.coefficient)
            .unwrap_or(0.0)
    }

    pub fn ridge(&self, n: i64) -> f64 {
        n as f64 * self.mod_freq
    }

    /// `∫∫ dΩ₁ dΩ₂` of the structured term. The Jacobian of
    /// `(Ω₁, Ω₂) -> (Ω₊, Ω₋)` contributes the factor 1/2.
    pub fn ridge_energy(&self) -> f64 {
        let step = 2.0 * self.grid.delta_omega();
        let env: f64 = self.envelope.iter().sum::<f64>() * step * 0.5;
        self.lines.iter().map(|l| l.coefficient).sum::<f64>() * env
    }

    /// Structured value on line `n` at free-axis sample `i`, with the
    /// ridge delta left implicit.
    pub fn line_value(&self, n: i64, i: usize) -> f64 {
        self.coefficient(n) * self.envelope[i]
    }
}

fn same_drive(m1: &ModulatorComb, m2: &ModulatorComb) -> Result<f64> {
    let (a, b) = (m1.mod_freq(), m2.mod_freq());
    if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
        return Err(Error::MismatchedDrive(a, b));
    }
    Ok(a)
}

fn narrowband_ratio(source: &SourceFields, m1: &ModulatorComb, m2: &ModulatorComb) -> f64 {
    let span = m1.mod_freq() * (m1.n_max() + m2.n_max()) as f64;
    if span == 0.0 {
        return 0.0;
    }
    let bw = source.rms_bandwidth();
    if bw > 0.0 {
        span / bw
    } else {
        f64::INFINITY
    }
}

fn narrowband(
    source: &SourceFields,
    m1: &ModulatorComb,
    m2: &ModulatorComb,
    beam: BeamConfig,
) -> Result<JointComb> {
    let mod_freq = same_drive(m1, m2)?;
    let ratio = narrowband_ratio(source, m1, m2);
    if !(ratio < NARROWBAND_MAX_RATIO) {
        return Err(Error::NarrowbandInvalid { ratio });
    }
    let (effective, ridge_axis, envelope) = match beam {
        BeamConfig::Interbeam => (
            m1.index() + m2.index(),
            RidgeAxis::OmegaPlus,
            source.r.iter().map(|r| r.norm_sqr()).collect::<Vec<_>>(),
        ),
        BeamConfig::Intrabeam => (
            m1.index() - m2.index(),
            RidgeAxis::OmegaMinus,
            source.s.iter().map(|s| s * s).collect(),
        ),
    };
    let comb = build_comb(mod_freq, effective)?;
    let lines = comb
        .lines()
        .iter()
        .map(|l| JointLine {
            n: l.n,
            coefficient: l.weight * l.weight,
        })
        .collect();
    let grid = source.grid;
    let density = source.flux_density();
    Ok(JointComb {
        ridge_axis,
        mod_freq,
        lines,
        free_axis: grid.omegas().iter().map(|w| 2.0 * w).collect(),
        envelope,
        background_1: density.clone(),
        background_2: density,
        grid,
    })
}

/// Interbeam joint spectrum: comb on `Ω₊` with coefficients `J_n(Δθ₁+Δθ₂)²`
/// and envelope `|R(Ω₋/2)|²`.
pub fn g2_inter_freq_narrowband(
    source: &SourceFields,
    m1: &ModulatorComb,
    m2: &ModulatorComb,
) -> Result<JointComb> {
    narrowband(source, m1, m2, BeamConfig::Interbeam)
}

/// Intrabeam joint spectrum: comb on `Ω₋` with coefficients `J_n(Δθ₁-Δθ₂)²`
/// and envelope `S(Ω₊/2)²`.
pub fn g2_intra_freq_narrowband(
    source: &SourceFields,
    m1: &ModulatorComb,
    m2: &ModulatorComb,
) -> Result<JointComb> {
    narrowband(source, m1, m2, BeamConfig::Intrabeam)
}

/// Dense joint spectrum from the exact double sideband sum.
#[derive(Debug, Clone, PartialEq)]
pub struct JointGrid {
    pub grid: FrequencyGrid,
    pub beam: BeamConfig,
    /// `Ω_m / δΩ`.
    pub step: usize,
    /// Row-major `[k1 * n + k2]`.
    pub values: Vec<f64>,
    pub background_1: Vec<f64>,
    pub background_2: Vec<f64>,
    /// Unmodulated line envelope, `|R(Ω₁)|²` or `S(Ω₁)²`.
    pub envelope: Vec<f64>,
}

impl JointGrid {
    pub fn n(&self) -> usize {
        self.grid.n_points()
    }

    pub fn get(&self, k1: usize, k2: usize) -> f64 {
        self.values[k1 * self.n() + k2]
    }

    pub fn background(&self, k1: usize, k2: usize) -> f64 {
        self.background_1[k1] * self.background_2[k2]
    }

    /// Column index of line `line` in row `k1`, if on the grid.
    pub fn ridge_index(&self, line: i64, k1: usize) -> Option<usize> {
        let n = self.n() as i64;
        let shift = line * self.step as i64;
        let k2 = match self.beam {
            BeamConfig::Interbeam => n - k1 as i64 + shift,
            BeamConfig::Intrabeam => k1 as i64 - shift,
        };
        (0..n).contains(&k2).then_some(k2 as usize)
    }

    /// `∫ dΩ₁` of the structured term along line `line`, over rows `rows`.
    pub fn line_weight(&self, line: i64, rows: std::ops::Range<usize>) -> f64 {
        let dw = self.grid.delta_omega();
        rows.filter_map(|k1| {
            self.ridge_index(line, k1)
                .map(|k2| (self.get(k1, k2) - self.background(k1, k2)) * dw)
        })
        .sum::<f64>()
            * dw
    }

    /// Line weight relative to the unmodulated envelope energy over the
    /// same rows.
    pub fn normalized_line_weight(&self, line: i64, rows: std::ops::Range<usize>) -> f64 {
        let env: f64 = self.envelope[rows.clone()].iter().sum::<f64>() * self.grid.delta_omega();
        self.line_weight(line, rows) / env
    }
}

/// Exact joint spectrum for modulators whose drive frequency is an integer
/// multiple of the grid step.
pub fn g2_freq_exact(
    source: &SourceFields,
    m1: &ModulatorComb,
    m2: &ModulatorComb,
    beam: BeamConfig,
) -> Result<JointGrid> {
    let grid = source.grid;
    let mod_freq = same_drive(m1, m2)?;
    let dw = grid.delta_omega();
    let ratio = mod_freq / dw;
    let step = ratio.round();
    if step < 1.0 || (ratio - step).abs() > 1e-9 * ratio {
        return Err(Error::GridIncommensurate {
            mod_freq,
            delta_omega: dw,
        });
    }
    let step = step as i64;
    let n = grid.n_points();
    let ni = n as i64;

    let shifted = |samples: &[f64], comb: &ModulatorComb| -> Vec<f64> {
        (0..ni)
            .map(|k| {
                comb.lines()
                    .iter()
                    .filter_map(|l| {
                        let src = k - l.n * step;
                        (0..ni)
                            .contains(&src)
                            .then(|| l.weight * l.weight * samples[src as usize])
                    })
                    .sum::<f64>()
                    / (2.0 * PI)
            })
            .collect()
    };
    let background_1 = shifted(&source.s, m1);
    let background_2 = shifted(&source.s, m2);

    let mut values = vec![0.0; n * n];
    for (k1, row) in values.chunks_exact_mut(n).enumerate() {
        let b1 = background_1[k1];
        row.iter_mut()
            .zip(&background_2)
            .for_each(|(v, b2)| *v = b1 * b2);
    }

    let span = m1.n_max() + m2.n_max();
    for line in -span..=span {
        for k1 in 0..ni {
            let amplitude = match beam {
                BeamConfig::Interbeam => {
                    let k2 = ni - k1 + line * step;
                    if !(0..ni).contains(&k2) {
                        continue;
                    }
                    let a: Complex64 = m1
                        .lines()
                        .iter()
                        .filter_map(|l| {
                            let src = k1 - l.n * step;
                            let w2 = m2.weight(line - l.n);
                            ((0..ni).contains(&src) && w2 != 0.0)
                                .then(|| source.r[src as usize] * (l.weight * w2))
                        })
                        .sum();
                    (k2, a.norm_sqr())
                }
                BeamConfig::Intrabeam => {
                    let k2 = k1 - line * step;
                    if !(0..ni).contains(&k2) {
                        continue;
                    }
                    let a: f64 = m2
                        .lines()
                        .iter()
                        .filter_map(|l| {
                            let src = k2 - l.n * step;
                            let w1 = m1.weight(line + l.n);
                            ((0..ni).contains(&src) && w1 != 0.0)
                                .then(|| source.s[src as usize] * w1 * l.weight)
                        })
                        .sum();
                    (k2, a * a)
                }
            };
            let (k2, power) = amplitude;
            values[k1 as usize * n + k2 as usize] += power / dw;
        }
    }

    let envelope = match beam {
        BeamConfig::Interbeam => source.r.iter().map(|r| r.norm_sqr()).collect(),
        BeamConfig::Intrabeam => source.s.iter().map(|s| s * s).collect(),
    };
    Ok(JointGrid {
        grid,
        beam,
        step: step as usize,
        values,
        background_1,
        background_2,
        envelope,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Baseline {
    Time(Correlation1D),
    Freq(JointComb),
}

/// Correlator output with identity elements in both paths.
pub fn baseline(source: &SourceFields, config: Configuration) -> Result<Baseline> {
    let id = DispersiveElement::identity();
    let comb = || build_comb(source.grid.delta_omega(), 0.0);
    Ok(match config {
        Configuration::InterTime => Baseline::Time(g2_inter_time(source, &id, &id)?),
        Configuration::IntraTime => Baseline::Time(g2_intra_time(source, &id, &id)?),
        Configuration::InterFreq => {
            Baseline::Freq(g2_inter_freq_narrowband(source, &comb()?, &comb()?)?)
        }
        Configuration::IntraFreq => {
            Baseline::Freq(g2_intra_freq_narrowband(source, &comb()?, &comb()?)?)
        }
    })
}
