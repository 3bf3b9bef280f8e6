use approx::assert_relative_eq;
use proptest::prelude::*;
use spdc_g2::{
    baseline, build_comb, comb_leakage, g2_freq_exact, g2_inter_freq_narrowband, g2_inter_time,
    g2_intra_freq_narrowband, g2_intra_time, rms_width, signal_to_background, Baseline, BeamConfig,
    Configuration, DispersiveElement, Error, FrequencyGrid, PhaseMismatch, SourceFields, SourceSpec,
};

fn physical(gain: f64, n: usize, dw: f64) -> SourceFields {
    SourceSpec::physical(gain, PhaseMismatch::new(vec![0.0, 1.0]).unwrap())
        .evaluate(&FrequencyGrid::new(n, dw).unwrap())
        .unwrap()
}

fn gaussian(bw: f64, n: usize, dw: f64) -> SourceFields {
    SourceSpec::gaussian(bw)
        .evaluate(&FrequencyGrid::new(n, dw).unwrap())
        .unwrap()
}

#[test]
fn background_is_flux_squared_for_every_element() {
    let src = physical(0.7, 2048, 0.02);
    let n2 = src.flux * src.flux;
    for coeffs in [vec![], vec![0.0, 2.0], vec![0.3, -0.5, 0.05]] {
        let h = DispersiveElement::new(coeffs).unwrap();
        let id = DispersiveElement::identity();
        assert_eq!(g2_inter_time(&src, &h, &id).unwrap().background, n2);
        assert_eq!(g2_intra_time(&src, &id, &h).unwrap().background, n2);
    }
}

#[test]
fn trace_integral_is_element_independent() {
    // ∫(g² - N²)dτ = (1/2π)∫|R|² dΩ whatever the pure-phase filters
    let src = physical(0.4, 2048, 0.02);
    let mass = |t: &spdc_g2::Correlation1D| t.structure().sum::<f64>() * t.delay_step();
    let id = DispersiveElement::identity();
    let reference = mass(&g2_inter_time(&src, &id, &id).unwrap());
    let h = DispersiveElement::new(vec![1.0, 1.0, -0.05]).unwrap();
    assert_relative_eq!(mass(&g2_inter_time(&src, &h, &id).unwrap()), reference, max_relative = 1e-10);
}

#[test]
fn pure_delay_shifts_the_peak() {
    let src = gaussian(1.0, 2048, 0.01);
    let t0 = 4.0 * src.grid.delay_step();
    let h1 = DispersiveElement::new(vec![t0]).unwrap();
    let id = DispersiveElement::identity();
    let trace = g2_inter_time(&src, &h1, &id).unwrap();
    assert_relative_eq!(trace.peak_tau.abs(), t0, epsilon = 1e-12);
    let w = rms_width(&trace).unwrap();
    assert_relative_eq!(w.centroid.abs(), t0, epsilon = 1e-9);
}

#[test]
fn alias_risk_is_a_physics_precondition() {
    let src = gaussian(1.0, 512, 0.05);
    let err = g2_inter_time(&src, &DispersiveElement::gdd(40.0), &DispersiveElement::gdd(40.0)).unwrap_err();
    assert!(matches!(err, Error::AliasRisk { .. }));
    assert!(err.is_physics_precondition());
    // the same dispersion cancels and is safe
    assert!(g2_inter_time(&src, &DispersiveElement::gdd(40.0), &DispersiveElement::gdd(-40.0)).is_ok());
}

#[test]
fn baselines_match_identity_elements() {
    let src = physical(1.0, 1024, 0.04);
    let id = DispersiveElement::identity();
    let Baseline::Time(t) = baseline(&src, Configuration::IntraTime).unwrap() else {
        panic!("temporal baseline expected")
    };
    assert_eq!(t, g2_intra_time(&src, &id, &id).unwrap());
    let Baseline::Freq(c) = baseline(&src, Configuration::InterFreq).unwrap() else {
        panic!("spectral baseline expected")
    };
    assert_eq!(c.lines.len(), 1);
    assert_eq!(comb_leakage(&c), 0.0);
}

#[test]
fn thermal_peak_at_every_gain() {
    let id = DispersiveElement::identity();
    for gain in [0.01, 0.5, 2.0, 4.0] {
        let src = physical(gain, 2048, 0.02);
        let trace = g2_intra_time(&src, &id, &id).unwrap();
        assert_relative_eq!(trace.zero_delay_value() / trace.background, 2.0, epsilon = 1e-9);
        assert_relative_eq!(signal_to_background(&trace).unwrap(), 1.0, epsilon = 1e-9);
    }
}

#[test]
fn mismatched_drive_rejected_everywhere() {
    let src = gaussian(10.0, 512, 0.05);
    let a = build_comb(0.01, 0.5).unwrap();
    let b = build_comb(0.02, 0.5).unwrap();
    assert!(matches!(g2_inter_freq_narrowband(&src, &a, &b), Err(Error::MismatchedDrive(..))));
    assert!(matches!(g2_intra_freq_narrowband(&src, &a, &b), Err(Error::MismatchedDrive(..))));
    assert!(matches!(g2_freq_exact(&src, &a, &b, BeamConfig::Interbeam), Err(Error::MismatchedDrive(..))));
}

#[test]
fn exact_grid_requires_commensurate_drive() {
    let src = gaussian(1.0, 256, 0.05);
    let m = build_comb(0.07, 0.5).unwrap();
    assert!(matches!(
        g2_freq_exact(&src, &m, &m, BeamConfig::Intrabeam),
        Err(Error::GridIncommensurate { .. })
    ));
}

#[test]
fn exact_grid_cancelation_leaves_only_central_line() {
    // cancelation is exact only where the envelope is flat across the comb
    let src = gaussian(1e8, 256, 0.05);
    let rows = 40..216;
    let a = build_comb(0.1, 0.9).unwrap();
    let b = build_comb(0.1, -0.9).unwrap();
    let inter = g2_freq_exact(&src, &a, &b, BeamConfig::Interbeam).unwrap();
    let intra = g2_freq_exact(&src, &a, &a, BeamConfig::Intrabeam).unwrap();
    for joint in [&inter, &intra] {
        assert_relative_eq!(joint.normalized_line_weight(0, rows.clone()), 1.0, epsilon = 1e-12);
        for n in [-3, -1, 1, 2] {
            assert!(joint.normalized_line_weight(n, rows.clone()).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn inter_and_intra_combs_agree_on_line_sum(t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
        let src = gaussian(10.0, 1024, 0.05);
        let m1 = build_comb(0.001, t1).unwrap();
        let m2 = build_comb(0.001, t2).unwrap();
        let inter = g2_inter_freq_narrowband(&src, &m1, &m2).unwrap();
        let intra = g2_intra_freq_narrowband(&src, &m1, &m2).unwrap();
        let total = |c: &spdc_g2::JointComb| c.lines.iter().map(|l| l.coefficient).sum::<f64>();
        prop_assert!((total(&inter) - 1.0).abs() < 1e-11);
        prop_assert!((total(&intra) - 1.0).abs() < 1e-11);
        prop_assert!((inter.coefficient(0) - spdc_g2::bessel_j(0, t1 + t2).unwrap().powi(2)).abs() < 1e-12);
        prop_assert!((intra.coefficient(0) - spdc_g2::bessel_j(0, t1 - t2).unwrap().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn intrabeam_identical_filters_cancel(c2 in -3.0f64..3.0, c3 in -1.0f64..1.0) {
        let src = physical(0.8, 1024, 0.04);
        let id = DispersiveElement::identity();
        let h = DispersiveElement::new(vec![0.0, c2, c3]).unwrap();
        let a = g2_intra_time(&src, &h, &h).unwrap();
        let b = g2_intra_time(&src, &id, &id).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs());
        }
    }
}
