//! Figures of merit extracted from correlation results.

use crate::correlators::{baseline, Baseline, BeamConfig, Configuration, Correlation1D, JointComb};
use crate::error::{Error, Result};
use crate::spdc::SourceFields;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthReport {
    /// Second central moment of the background-subtracted trace, ps.
    pub rms_width: f64,
    /// Full width at half maximum, linearly interpolated, ps.
    pub fwhm: f64,
    pub centroid: f64,
}

pub fn rms_width(corr: &Correlation1D) -> Result<WidthReport> {
    let sub: Vec<f64> = corr.structure().collect();
    let dt = corr.delay_step();
    let mass: f64 = sub.iter().sum::<f64>() * dt;
    let window = dt * corr.tau.len() as f64;
    if !(mass > 1e-15 * corr.peak_value() * window) {
        return Err(Error::DegenerateTrace);
    }
    let total: f64 = sub.iter().sum();
    let centroid = corr.tau.iter().zip(&sub).map(|(t, s)| t * s).sum::<f64>() / total;
    let var = corr
        .tau
        .iter()
        .zip(&sub)
        .map(|(t, s)| (t - centroid).powi(2) * s)
        .sum::<f64>()
        / total;
    Ok(WidthReport {
        rms_width: var.max(0.0).sqrt(),
        fwhm: fwhm(&corr.tau, &sub),
        centroid,
    })
}

fn fwhm(tau: &[f64], sub: &[f64]) -> f64 {
    let (peak, &max) = sub
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty trace");
    if max <= 0.0 {
        return 0.0;
    }
    let half = 0.5 * max;
    let cross = |i: usize, j: usize| {
        // sub[i] >= half > sub[j]
        let f = (sub[i] - half) / (sub[i] - sub[j]);
        tau[i] + f * (tau[j] - tau[i])
    };
    let left = (1..=peak)
        .rev()
        .find(|&i| sub[i - 1] < half)
        .map(|i| cross(i, i - 1))
        .unwrap_or(tau[0]);
    let right = (peak..sub.len() - 1)
        .find(|&i| sub[i + 1] < half)
        .map(|i| cross(i, i + 1))
        .unwrap_or(tau[sub.len() - 1]);
    right - left
}

/// `(peak - N²) / N²`.
pub fn signal_to_background(corr: &Correlation1D) -> Result<f64> {
    if !(corr.background > 0.0) {
        return Err(Error::ZeroBackground);
    }
    let signal = corr.peak_value() - corr.background;
    Ok(if signal > 0.0 {
        signal / corr.background
    } else {
        0.0
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthSample {
    pub phi1: f64,
    pub phi2: f64,
    pub width: f64,
}

/// `width² = a + b·x` with `x = (Φ₁ ± Φ₂)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BroadeningFit {
    pub a: f64,
    pub b: f64,
    pub max_relative_residual: f64,
}

impl BroadeningFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.a + self.b * x
    }
}

/// Least-squares fit of squared widths against the squared GDD sum
/// (interbeam) or difference (intrabeam). If every sample has the same
/// abscissa the slope is reported as zero.
pub fn broadening_fit(samples: &[WidthSample], beam: BeamConfig) -> Result<BroadeningFit> {
    if samples.len() < 5 {
        return Err(Error::InsufficientSamples(samples.len()));
    }
    let xy: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| {
            let d = match beam {
                BeamConfig::Interbeam => s.phi1 + s.phi2,
                BeamConfig::Intrabeam => s.phi1 - s.phi2,
            };
            (d * d, s.width * s.width)
        })
        .collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let scale: f64 = xy.iter().map(|p| p.0 * p.0).sum();
    let b = if sxx == 0.0 {
        0.0
    } else if sxx < 1e-12 * scale {
        return Err(Error::PoorConditioning);
    } else {
        sxy / sxx
    };
    let a = my - b * mx;
    let max_relative_residual = xy
        .iter()
        .map(|&(x, y)| ((y - (a + b * x)) / y).abs())
        .fold(0.0, f64::max);
    Ok(BroadeningFit {
        a,
        b,
        max_relative_residual,
    })
}

/// Weight outside the `n = 0` line.
pub fn comb_leakage(comb: &JointComb) -> f64 {
    comb.lines
        .iter()
        .filter(|l| l.n != 0)
        .fold(0.0, |acc, l| acc + l.coefficient)
}

/// `[g²_si(0)]² / (g²_ss(0)·g²_ii(0))` from the baseline correlators.
/// Classical fields satisfy ratio ≤ 1.
pub fn cauchy_schwarz_ratio(source: &SourceFields) -> Result<f64> {
    if !source.is_physical() {
        return Err(Error::RequiresPhysicalSource);
    }
    if !(source.flux > 0.0) {
        return Err(Error::ZeroBackground);
    }
    let zero_delay = |config| -> Result<f64> {
        match baseline(source, config)? {
            Baseline::Time(c) => Ok(c.zero_delay_value() / c.background),
            Baseline::Freq(_) => unreachable!("temporal configuration"),
        }
    };
    let g_si = zero_delay(Configuration::InterTime)?;
    // signal and idler share the photon spectrum |V|², so g²_ii = g²_ss
    let g_ss = zero_delay(Configuration::IntraTime)?;
    Ok(g_si * g_si / (g_ss * g_ss))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictMetric {
    WidthRatio,
    CombLeakage,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CancelationVerdict {
    pub configuration: Configuration,
    pub metric_kind: VerdictMetric,
    pub metric: f64,
    pub tolerance: f64,
    pub canceled: bool,
}

/// Width of `dispersed` relative to `reference`; canceled when within
/// `tolerance` of one.
pub fn dispersion_verdict(
    configuration: Configuration,
    reference: &Correlation1D,
    dispersed: &Correlation1D,
    tolerance: f64,
) -> Result<CancelationVerdict> {
    let ratio = rms_width(dispersed)?.rms_width / rms_width(reference)?.rms_width;
    Ok(CancelationVerdict {
        configuration,
        metric_kind: VerdictMetric::WidthRatio,
        metric: ratio,
        tolerance,
        canceled: (ratio - 1.0).abs() <= tolerance,
    })
}

pub fn modulation_verdict(
    configuration: Configuration,
    comb: &JointComb,
    tolerance: f64,
) -> CancelationVerdict {
    let leakage = comb_leakage(comb);
    CancelationVerdict {
        configuration,
        metric_kind: VerdictMetric::CombLeakage,
        metric: leakage,
        tolerance,
        canceled: leakage <= tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlators::{g2_inter_freq_narrowband, g2_inter_time};
    use crate::elements::{build_comb, DispersiveElement};
    use crate::grid::FrequencyGrid;
    use crate::spdc::{PhaseMismatch, SourceSpec};
    use approx::assert_relative_eq;

    fn synthetic(tau0: f64, n: usize, dt: f64, background: f64) -> Correlation1D {
        let tau: Vec<f64> = (0..n).map(|j| (j as f64 - (n / 2) as f64) * dt).collect();
        let values = tau
            .iter()
            .map(|t| background + (-t * t / (2.0 * tau0 * tau0)).exp())
            .collect();
        Correlation1D {
            tau,
            values,
            background,
            peak_tau: 0.0,
        }
    }

    #[test]
    fn gaussian_moments() {
        let c = synthetic(0.5, 2048, 0.01, 0.3);
        let w = rms_width(&c).unwrap();
        assert_relative_eq!(w.rms_width, 0.5, max_relative = 1e-3);
        assert_relative_eq!(w.fwhm, 2.0 * (2.0 * 2f64.ln()).sqrt() * 0.5, max_relative = 1e-3);
        assert!(w.centroid.abs() < 1e-12);
    }

    #[test]
    fn flat_trace_is_degenerate() {
        let mut c = synthetic(0.5, 256, 0.01, 1.0);
        c.values.iter_mut().for_each(|v| *v = 1.0);
        assert_eq!(rms_width(&c).unwrap_err(), Error::DegenerateTrace);
        assert_eq!(signal_to_background(&c).unwrap(), 0.0);
        c.background = 0.0;
        assert_eq!(signal_to_background(&c).unwrap_err(), Error::ZeroBackground);
    }

    #[test]
    fn fit_recovers_exact_law() {
        let (a, b) = (0.37, 2.5);
        let samples: Vec<WidthSample> = [0.0, 1.0, 2.0, 3.5, 5.0, 7.0]
            .iter()
            .map(|&d: &f64| WidthSample {
                phi1: 0.3 * d,
                phi2: 0.7 * d,
                width: (a + b * d * d).sqrt(),
            })
            .collect();
        let fit = broadening_fit(&samples, BeamConfig::Interbeam).unwrap();
        assert_relative_eq!(fit.a, a, max_relative = 1e-10);
        assert_relative_eq!(fit.b, b, max_relative = 1e-10);
        assert!(fit.max_relative_residual < 1e-10);
    }

    #[test]
    fn fit_errors() {
        let s = WidthSample {
            phi1: 0.0,
            phi2: 0.0,
            width: 1.0,
        };
        assert_eq!(
            broadening_fit(&[s; 4], BeamConfig::Interbeam).unwrap_err(),
            Error::InsufficientSamples(4)
        );
        let near: Vec<WidthSample> = (0..5)
            .map(|i| WidthSample {
                phi1: 1e4 + i as f64 * 1e-12,
                phi2: 0.0,
                width: 1.0,
            })
            .collect();
        assert_eq!(
            broadening_fit(&near, BeamConfig::Interbeam).unwrap_err(),
            Error::PoorConditioning
        );
        // equal Φ ladder in the intrabeam law has a single abscissa
        let ladder: Vec<WidthSample> = (0..5)
            .map(|i| WidthSample {
                phi1: i as f64,
                phi2: i as f64,
                width: 0.5,
            })
            .collect();
        let fit = broadening_fit(&ladder, BeamConfig::Intrabeam).unwrap();
        assert_eq!(fit.b, 0.0);
        assert_relative_eq!(fit.a.sqrt(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn leakage_values() {
        let grid = FrequencyGrid::new(1024, 0.05).unwrap();
        let src = SourceSpec::gaussian(10.0).evaluate(&grid).unwrap();
        for (t1, t2, want) in [(0.6, 0.6, 0.549_580_839_576_185_5), (0.8, -0.8, 0.0)] {
            let comb = g2_inter_freq_narrowband(
                &src,
                &build_comb(0.01, t1).unwrap(),
                &build_comb(0.01, t2).unwrap(),
            )
            .unwrap();
            let leak = comb_leakage(&comb);
            assert!((leak - want).abs() < 1e-12, "{leak}");
            assert!((leak + comb.coefficient(0) - 1.0).abs() < 1e-12);
            let v = modulation_verdict(Configuration::InterFreq, &comb, 1e-12);
            assert_eq!(v.canceled, want == 0.0);
        }
    }

    #[test]
    fn cauchy_schwarz_requires_physical_flux() {
        let grid = FrequencyGrid::new(256, 0.05).unwrap();
        let analytic = SourceSpec::gaussian(1.0).evaluate(&grid).unwrap();
        assert_eq!(
            cauchy_schwarz_ratio(&analytic).unwrap_err(),
            Error::RequiresPhysicalSource
        );
        let dark = SourceSpec::physical(0.0, PhaseMismatch::zero()).evaluate(&grid).unwrap();
        assert_eq!(cauchy_schwarz_ratio(&dark).unwrap_err(), Error::ZeroBackground);
        let bright = SourceSpec::physical(0.05, PhaseMismatch::zero()).evaluate(&grid).unwrap();
        assert!(cauchy_schwarz_ratio(&bright).unwrap() > 1e3);
    }

    #[test]
    fn verdicts() {
        let grid = FrequencyGrid::new(4096, 0.01).unwrap();
        let src = SourceSpec::gaussian(1.0).evaluate(&grid).unwrap();
        let id = DispersiveElement::identity();
        let base = g2_inter_time(&src, &id, &id).unwrap();
        let canceled = g2_inter_time(&src, &DispersiveElement::gdd(5.0), &DispersiveElement::gdd(-5.0)).unwrap();
        let broadened = g2_inter_time(&src, &DispersiveElement::gdd(2.0), &DispersiveElement::gdd(2.0)).unwrap();
        assert!(dispersion_verdict(Configuration::InterTime, &base, &canceled, 1e-6).unwrap().canceled);
        let v = dispersion_verdict(Configuration::InterTime, &base, &broadened, 1e-6).unwrap();
        assert!(!v.canceled && v.metric > 1.0);
    }
}
