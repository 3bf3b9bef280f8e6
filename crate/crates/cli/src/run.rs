//! Scenario execution and report writing.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use spdc_g2::analysis::{dispersion_verdict, modulation_verdict, VerdictMetric};
use spdc_g2::{
    baseline, cauchy_schwarz_ratio, comb_leakage, g2_freq_exact, g2_inter_freq_narrowband,
    g2_inter_time, g2_intra_freq_narrowband, g2_intra_time, rms_width, signal_to_background,
    Baseline, BeamConfig, CancelationVerdict, JointGrid, ModulatorComb,
};

use crate::error::{CliError, Result};
use crate::output::{self, write_atomic};
use crate::scenario::{Analysis, Elements, Method, Scenario};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Sweep worker threads; 0 uses the available parallelism.
    pub workers: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    pub points: Vec<PointReport>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PointReport {
    pub index: usize,
    pub param: Option<f64>,
    pub flux: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rms_width_ps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fwhm_ps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centroid_ps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_over_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comb_leakage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cauchy_schwarz_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub metric: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub canceled: bool,
}

impl From<CancelationVerdict> for VerdictReport {
    fn from(v: CancelationVerdict) -> Self {
        Self {
            metric: match v.metric_kind {
                VerdictMetric::WidthRatio => "width_ratio",
                VerdictMetric::CombLeakage => "comb_leakage",
            },
            value: v.metric,
            tolerance: v.tolerance,
            canceled: v.canceled,
        }
    }
}

/// Runs `scenario`, writing its files into `out` (created if missing).
/// Returns the report that was written alongside them.
pub fn run(scenario: &Scenario, out: &Path, options: RunOptions) -> Result<Report> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let points = scenario.points();
    let sweeping = scenario.sweep.is_some();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| CliError::Other(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<PointReport>> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(index, (param, point))| {
                let file = if !sweeping {
                    None
                } else if scenario.outputs.point_files {
                    let kind = if point.configuration().is_temporal() { "trace" } else { "comb" };
                    Some(format!("{kind}_{index:04}.csv"))
                } else {
                    None
                };
                run_point(point, index, *param, sweeping, file, out).map_err(|e| match e {
                    CliError::Compute { context, source } => CliError::Compute {
                        context: match param {
                            Some(x) => format!("sweep point #{index} ({x}): {context}"),
                            None => context,
                        },
                        source,
                    },
                    other => other,
                })
            })
            .collect()
    });
    let points: Vec<PointReport> = results.into_iter().collect::<Result<_>>()?;

    let mut files = Vec::new();
    if sweeping {
        let temporal = scenario.configuration().is_temporal();
        let mut csv = String::new();
        csv.push_str(if temporal { output::SWEEP_TIME_HEADER } else { output::SWEEP_FREQ_HEADER });
        csv.push('\n');
        for p in &points {
            let param = output::num(p.param.unwrap_or(f64::NAN));
            let row = if temporal {
                format!(
                    "{param},{},{},{}",
                    output::num(p.rms_width_ps.unwrap_or(f64::NAN)),
                    output::num(p.fwhm_ps.unwrap_or(f64::NAN)),
                    output::num(p.s_over_b.unwrap_or(f64::NAN))
                )
            } else {
                format!("{param},{}", output::num(p.comb_leakage.unwrap_or(f64::NAN)))
            };
            csv.push_str(&row);
            csv.push('\n');
        }
        write_atomic(&out.join(&scenario.outputs.sweep_file), csv.as_bytes())?;
        files.push(scenario.outputs.sweep_file.clone());
        files.extend(points.iter().filter_map(|p| p.file.clone()));
    } else {
        files.extend(points[0].file.clone());
    }
    if !sweeping && scenario.method() == Method::Exact {
        files.push(scenario.outputs.joint_grid_file.clone());
    }
    files.push(scenario.outputs.report_file.clone());

    let report = Report {
        scenario: scenario.clone(),
        points,
        files,
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_atomic(&out.join(&scenario.outputs.report_file), json.as_bytes())?;
    Ok(report)
}

fn compute<T>(what: &str, r: spdc_g2::Result<T>) -> Result<T> {
    r.map_err(|source| CliError::Compute {
        context: what.to_string(),
        source,
    })
}

fn run_point(
    point: &Scenario,
    index: usize,
    param: Option<f64>,
    sweeping: bool,
    sweep_file: Option<String>,
    out: &Path,
) -> Result<PointReport> {
    let grid = compute("grid", point.grid())?;
    let source = compute("source", point.source_spec().and_then(|s| s.evaluate(&grid)))?;
    let elements = compute("elements", point.elements())?;
    let analyses = point.analyses();
    let wants = |a: Analysis| analyses.contains(&a);
    let config = point.configuration();
    let tolerance = point.verdict_tolerance();
    let mut report = PointReport {
        index,
        param,
        flux: source.flux,
        ..Default::default()
    };
    let file = if sweeping {
        sweep_file
    } else if config.is_temporal() {
        Some(point.outputs.trace_file.clone())
    } else {
        Some(point.outputs.comb_file.clone())
    };
    let target = |name: &String| -> PathBuf { out.join(name) };

    match elements {
        Elements::Dispersive(h1, h2) => {
            let trace = compute(config.name(), match config.beam() {
                BeamConfig::Interbeam => g2_inter_time(&source, &h1, &h2),
                BeamConfig::Intrabeam => g2_intra_time(&source, &h1, &h2),
            })?;
            if wants(Analysis::Width) || sweeping {
                let w = compute("rms_width", rms_width(&trace))?;
                report.rms_width_ps = Some(w.rms_width);
                report.fwhm_ps = Some(w.fwhm);
                report.centroid_ps = Some(w.centroid);
            }
            if wants(Analysis::SOverB) || sweeping {
                report.s_over_b = Some(compute("s_over_b", signal_to_background(&trace))?);
            }
            if wants(Analysis::Verdict) {
                let Baseline::Time(reference) = compute("baseline", baseline(&source, config))? else {
                    unreachable!("temporal configuration has a temporal baseline")
                };
                let v = compute("verdict", dispersion_verdict(config, &reference, &trace, tolerance))?;
                report.verdict = Some(v.into());
            }
            if let Some(name) = &file {
                write_atomic(&target(name), output::trace_csv(&trace).as_bytes())?;
            }
        }
        Elements::Modulators(m1, m2) => match point.method() {
            Method::Exact => {
                let joint = compute(config.name(), g2_freq_exact(&source, &m1, &m2, config.beam()))?;
                let lines = line_span(&m1, &m2);
                let rows = interior_rows(&joint, &m1, &m2);
                let leakage: f64 = lines
                    .iter()
                    .filter(|&&n| n != 0)
                    .map(|&n| joint.normalized_line_weight(n, rows.clone()))
                    .fold(0.0, |a, b| a + b);
                report.comb_leakage = Some(leakage);
                if wants(Analysis::Verdict) {
                    report.verdict = Some(VerdictReport {
                        metric: "comb_leakage",
                        value: leakage,
                        tolerance,
                        canceled: leakage.abs() <= tolerance,
                    });
                }
                if let Some(name) = &file {
                    let csv = output::exact_comb_csv(&joint, &lines, rows);
                    write_atomic(&target(name), csv.as_bytes())?;
                }
                if !sweeping {
                    let csv = output::joint_grid_csv(&joint, &lines);
                    write_atomic(&target(&point.outputs.joint_grid_file), csv.as_bytes())?;
                }
            }
            Method::Narrowband | Method::Fft => {
                let comb = compute(config.name(), match config.beam() {
                    BeamConfig::Interbeam => g2_inter_freq_narrowband(&source, &m1, &m2),
                    BeamConfig::Intrabeam => g2_intra_freq_narrowband(&source, &m1, &m2),
                })?;
                report.comb_leakage = Some(comb_leakage(&comb));
                if wants(Analysis::Verdict) {
                    report.verdict = Some(modulation_verdict(config, &comb, tolerance).into());
                }
                if let Some(name) = &file {
                    write_atomic(&target(name), output::comb_csv(&comb).as_bytes())?;
                }
            }
        },
    }
    if !wants(Analysis::Leakage) && !sweeping {
        report.comb_leakage = None;
    }
    if wants(Analysis::CauchySchwarz) {
        report.cauchy_schwarz_ratio = Some(compute("cauchy_schwarz", cauchy_schwarz_ratio(&source))?);
    }
    report.file = file;
    Ok(report)
}

fn line_span(m1: &ModulatorComb, m2: &ModulatorComb) -> Vec<i64> {
    let span = m1.n_max() + m2.n_max();
    (-span..=span).collect()
}

/// Rows whose every line stays on the grid, so line weights are not
/// truncated by the edges.
fn interior_rows(joint: &JointGrid, m1: &ModulatorComb, m2: &ModulatorComb) -> std::ops::Range<usize> {
    let margin = (m1.n_max() + m2.n_max()) as usize * joint.step;
    if 2 * margin < joint.n() {
        margin..joint.n() - margin
    } else {
        0..joint.n()
    }
}
