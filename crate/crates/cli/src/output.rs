//! CSV formatting and atomic file writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use spdc_g2::{Correlation1D, JointComb, JointGrid};

use crate::error::{CliError, Result};

pub const TRACE_HEADER: &str = "tau_ps,g2,background";
pub const COMB_HEADER: &str = "n,coefficient,ridge,envelope_axis_radps,envelope_value";
pub const SWEEP_TIME_HEADER: &str = "param,rms_width_ps,fwhm_ps,s_over_b";
pub const SWEEP_FREQ_HEADER: &str = "param,comb_leakage";
pub const JOINT_GRID_HEADER: &str = "line,omega1_radps,omega2_radps,g2,background";

/// 17 significant digits, enough to recover every double exactly.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trace_csv(trace: &Correlation1D) -> String {
    let mut out = String::with_capacity(64 * trace.tau.len());
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for (t, v) in trace.tau.iter().zip(&trace.values) {
        let _ = writeln!(out, "{},{},{}", num(*t), num(*v), num(trace.background));
    }
    out
}

/// One row per line and free-axis sample; the envelope is shared by all
/// lines.
pub fn comb_csv(comb: &JointComb) -> String {
    let mut out = String::new();
    out.push_str(COMB_HEADER);
    out.push('\n');
    for line in &comb.lines {
        let head = format!("{},{},{}", line.n, num(line.coefficient), num(comb.ridge(line.n)));
        for (w, e) in comb.free_axis.iter().zip(&comb.envelope) {
            let _ = writeln!(out, "{head},{},{}", num(*w), num(*e));
        }
    }
    out
}

/// Lines of the exact joint spectrum resolved along `Ω₁`. The coefficient
/// is the normalized line weight over `rows`; the envelope value is the
/// structured density on the ridge, integrated across it.
pub fn exact_comb_csv(joint: &JointGrid, lines: &[i64], rows: std::ops::Range<usize>) -> String {
    let dw = joint.grid.delta_omega();
    let mod_freq = joint.step as f64 * dw;
    let mut out = String::new();
    out.push_str(COMB_HEADER);
    out.push('\n');
    for &n in lines {
        let head = format!(
            "{n},{},{}",
            num(joint.normalized_line_weight(n, rows.clone())),
            num(n as f64 * mod_freq)
        );
        for k1 in 0..joint.n() {
            if let Some(k2) = joint.ridge_index(n, k1) {
                let density = (joint.get(k1, k2) - joint.background(k1, k2)) * dw;
                let _ = writeln!(out, "{head},{},{}", num(joint.grid.omega(k1)), num(density));
            }
        }
    }
    out
}

/// The ridge entries of the dense joint spectrum; off-ridge entries are
/// pure background `N₁(Ω₁)N₂(Ω₂)`.
pub fn joint_grid_csv(joint: &JointGrid, lines: &[i64]) -> String {
    let mut out = String::new();
    out.push_str(JOINT_GRID_HEADER);
    out.push('\n');
    for &n in lines {
        for k1 in 0..joint.n() {
            if let Some(k2) = joint.ridge_index(n, k1) {
                let _ = writeln!(
                    out,
                    "{n},{},{},{},{}",
                    num(joint.grid.omega(k1)),
                    num(joint.grid.omega(k2)),
                    num(joint.get(k1, k2)),
                    num(joint.background(k1, k2))
                );
            }
        }
    }
    out
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
