//! Declarative scenario documents.
//!
//! A scenario is a JSON object with `schema_version: 1`. Unknown keys are
//! rejected. Quantities are plain numbers in rad/ps, ps and ps^k.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "grid": { "n_points": 4096, "delta_omega": 0.01 },
//!   "source": { "mode": "analytic", "envelope_bandwidth": 1.0 },
//!   "configuration": "inter_time",
//!   "path1": { "kind": "dispersive", "phase_coeffs": [0.0, 5.0] },
//!   "path2": { "kind": "dispersive", "phase_coeffs": [0.0, -5.0] }
//! }
//! ```

use serde::{Deserialize, Serialize};
use serde_json::Value;
use spdc_g2::{
    build_comb, Configuration, DispersiveElement, EnvelopeShape, Error, FrequencyGrid,
    ModulatorComb, PhaseMismatch, SourceSpec,
};

use crate::error::{CliError, Location, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest grid accepted for the dense exact joint spectrum (n² doubles).
pub const EXACT_MAX_POINTS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub grid: GridDoc,
    pub source: SourceDoc,
    pub configuration: ConfigurationDoc,
    pub path1: ElementDoc,
    pub path2: ElementDoc,
    #[serde(default)]
    pub method: Option<Method>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub n_points: usize,
    /// rad/ps
    pub delta_omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceDoc {
    Physical {
        /// σL
        gain: f64,
        /// `mismatch[i]` multiplies Ω^(i+1); units ps^(i+1).
        #[serde(default)]
        mismatch: Vec<f64>,
        /// Constant term of ΔL; only zero is supported.
        #[serde(default)]
        mismatch_constant: f64,
        #[serde(default)]
        center_frequency: Option<f64>,
    },
    Analytic {
        /// rad/ps
        envelope_bandwidth: f64,
        #[serde(default)]
        envelope_shape: ShapeDoc,
        #[serde(default)]
        center_frequency: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeDoc {
    #[default]
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigurationDoc {
    InterTime,
    IntraTime,
    InterFreq,
    IntraFreq,
}

impl From<ConfigurationDoc> for Configuration {
    fn from(c: ConfigurationDoc) -> Self {
        match c {
            ConfigurationDoc::InterTime => Configuration::InterTime,
            ConfigurationDoc::IntraTime => Configuration::IntraTime,
            ConfigurationDoc::InterFreq => Configuration::InterFreq,
            ConfigurationDoc::IntraFreq => Configuration::IntraFreq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementDoc {
    Dispersive {
        /// `phase_coeffs[i]` is Φ_(i+1) in ps^(i+1).
        #[serde(default)]
        phase_coeffs: Vec<f64>,
    },
    Modulator {
        /// Ω_m, rad/ps
        mod_freq: f64,
        /// Δθ, rad
        index: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Delay-domain FFT correlators; the only method for `*_time`.
    Fft,
    Narrowband,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// Dotted path into the scenario, e.g. `path2.phase_coeffs[1]`.
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Width,
    SOverB,
    Verdict,
    Leakage,
    CauchySchwarz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub analyses: Option<Vec<Analysis>>,
    pub verdict_tolerance: Option<f64>,
    /// Write one trace or comb file per sweep point.
    pub point_files: bool,
    pub trace_file: String,
    pub comb_file: String,
    pub joint_grid_file: String,
    pub sweep_file: String,
    pub report_file: String,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            analyses: None,
            verdict_tolerance: None,
            point_files: true,
            trace_file: "trace.csv".into(),
            comb_file: "comb.csv".into(),
            joint_grid_file: "joint_grid.csv".into(),
            sweep_file: "sweep.csv".into(),
            report_file: "report.json".into(),
        }
    }
}

/// Command-line replacements applied before validation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub grid_points: Option<usize>,
    pub grid_domega: Option<f64>,
}

/// Dispersive elements or modulator combs for the two paths.
#[derive(Debug, Clone)]
pub enum Elements {
    Dispersive(DispersiveElement, DispersiveElement),
    Modulators(ModulatorComb, ModulatorComb),
}

pub fn parse_scenario(document: &str) -> Result<Scenario> {
    parse_scenario_with(document, Overrides::default())
}

/// Parses, applies `overrides`, fills defaults and checks every invariant,
/// including those of each sweep point.
pub fn parse_scenario_with(document: &str, overrides: Overrides) -> Result<Scenario> {
    let mut scenario: Scenario = serde_json::from_str(document).map_err(|e| CliError::Scenario {
        location: (e.line() > 0).then(|| Location {
            line: e.line(),
            column: e.column(),
        }),
        message: e.to_string(),
        source: None,
    })?;
    if let Some(n) = overrides.grid_points {
        scenario.grid.n_points = n;
    }
    if let Some(dw) = overrides.grid_domega {
        scenario.grid.delta_omega = dw;
    }
    if scenario.schema_version != SCHEMA_VERSION {
        return Err(anchored(
            document,
            &["schema_version"],
            format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                scenario.schema_version
            ),
            None,
        ));
    }
    scenario.resolve();
    scenario.check().map_err(|(path, msg, src)| anchored(document, &path, msg, src))?;

    if let Some(sweep) = &scenario.sweep {
        let at_sweep = |msg: String, src| anchored(document, &["sweep"], msg, src);
        if sweep.values.is_empty() {
            return Err(at_sweep("sweep needs at least one value".into(), None));
        }
        let path = parse_path(&sweep.parameter).map_err(|m| at_sweep(m, None))?;
        let base = scenario.base_value();
        if lookup(&base, &path).is_none_or(|v| !v.is_number()) {
            return Err(at_sweep(
                format!("sweep parameter `{}` does not name a numeric field", sweep.parameter),
                None,
            ));
        }
        for (i, &x) in sweep.values.iter().enumerate() {
            scenario
                .point_at(&path, x)
                .map_err(|(msg, src)| at_sweep(format!("sweep value #{i} ({x}): {msg}"), src))?;
        }
    }
    Ok(scenario)
}

type Failure = (Vec<&'static str>, String, Option<Error>);

impl Scenario {
    pub fn configuration(&self) -> Configuration {
        self.configuration.into()
    }

    pub fn method(&self) -> Method {
        self.method.unwrap_or(match self.configuration {
            ConfigurationDoc::InterTime | ConfigurationDoc::IntraTime => Method::Fft,
            _ => Method::Narrowband,
        })
    }

    pub fn analyses(&self) -> Vec<Analysis> {
        self.outputs.analyses.clone().unwrap_or_else(|| {
            if self.configuration().is_temporal() {
                vec![Analysis::Width, Analysis::SOverB, Analysis::Verdict]
            } else {
                vec![Analysis::Leakage, Analysis::Verdict]
            }
        })
    }

    pub fn verdict_tolerance(&self) -> f64 {
        self.outputs
            .verdict_tolerance
            .unwrap_or(if self.configuration().is_temporal() { 1e-6 } else { 1e-12 })
    }

    pub fn grid(&self) -> spdc_g2::Result<FrequencyGrid> {
        FrequencyGrid::new(self.grid.n_points, self.grid.delta_omega)
    }

    pub fn source_spec(&self) -> spdc_g2::Result<SourceSpec> {
        let spec = match &self.source {
            SourceDoc::Physical {
                gain,
                mismatch,
                mismatch_constant,
                center_frequency,
            } => SourceSpec::Physical {
                gain: *gain,
                mismatch: PhaseMismatch::with_constant(*mismatch_constant, mismatch.clone())?,
                center_frequency: *center_frequency,
            },
            SourceDoc::Analytic {
                envelope_bandwidth,
                envelope_shape: ShapeDoc::Gaussian,
                center_frequency,
            } => SourceSpec::Analytic {
                bandwidth: *envelope_bandwidth,
                shape: EnvelopeShape::Gaussian,
                center_frequency: *center_frequency,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn elements(&self) -> spdc_g2::Result<Elements> {
        match (&self.path1, &self.path2) {
            (
                ElementDoc::Dispersive { phase_coeffs: a },
                ElementDoc::Dispersive { phase_coeffs: b },
            ) => Ok(Elements::Dispersive(
                DispersiveElement::new(a.clone())?,
                DispersiveElement::new(b.clone())?,
            )),
            (
                ElementDoc::Modulator { mod_freq: f1, index: t1 },
                ElementDoc::Modulator { mod_freq: f2, index: t2 },
            ) => Ok(Elements::Modulators(build_comb(*f1, *t1)?, build_comb(*f2, *t2)?)),
            _ => Err(Error::InvalidElement("paths must hold elements of the same kind".into())),
        }
    }

    /// Sweep points in order; a scenario without a sweep is its own single
    /// point.
    pub fn points(&self) -> Vec<(Option<f64>, Scenario)> {
        let Some(sweep) = &self.sweep else {
            return vec![(None, self.clone())];
        };
        let path = parse_path(&sweep.parameter).expect("validated at parse time");
        sweep
            .values
            .iter()
            .map(|&x| (Some(x), self.point_at(&path, x).expect("validated at parse time")))
            .collect()
    }

    fn resolve(&mut self) {
        self.method = Some(self.method());
        self.outputs.analyses = Some(self.analyses());
        self.outputs.verdict_tolerance = Some(self.verdict_tolerance());
    }

    fn base_value(&self) -> Value {
        let mut base = self.clone();
        base.sweep = None;
        serde_json::to_value(base).expect("scenario serializes")
    }

    fn point_at(&self, path: &[Segment], x: f64) -> std::result::Result<Scenario, (String, Option<Error>)> {
        let mut value = self.base_value();
        let slot = lookup_mut(&mut value, path).ok_or_else(|| ("parameter not found".to_string(), None))?;
        *slot = number_value(x, slot.is_u64());
        let point: Scenario = serde_json::from_value(value).map_err(|e| (e.to_string(), None))?;
        point.check().map_err(|(_, msg, src)| (msg, src))?;
        Ok(point)
    }

    fn check(&self) -> std::result::Result<(), Failure> {
        let fail = |path: &[&'static str], e: Error| (path.to_vec(), e.to_string(), Some(e));
        let grid = self.grid().map_err(|e| fail(&["grid"], e))?;
        if let SourceDoc::Physical { mismatch, .. } = &self.source {
            PhaseMismatch::new(mismatch.clone()).map_err(|e| fail(&["source", "mismatch"], e))?;
        }
        self.source_spec().map_err(|e| fail(&["source"], e))?;

        let temporal = self.configuration().is_temporal();
        for (name, element) in [("path1", &self.path1), ("path2", &self.path2)] {
            let dispersive = matches!(element, ElementDoc::Dispersive { .. });
            if dispersive != temporal {
                let want = if temporal { "dispersive" } else { "modulator" };
                return Err((
                    vec![name],
                    format!("{} configuration needs {want} elements", self.configuration().name()),
                    None,
                ));
            }
            let built = match element {
                ElementDoc::Dispersive { phase_coeffs } => {
                    DispersiveElement::new(phase_coeffs.clone()).map(|_| ())
                }
                ElementDoc::Modulator { mod_freq, index } => build_comb(*mod_freq, *index).map(|_| ()),
            };
            built.map_err(|e| fail(&[name], e))?;
        }

        let method = self.method();
        let method_ok = match method {
            Method::Fft => temporal,
            Method::Narrowband | Method::Exact => !temporal,
        };
        if !method_ok {
            return Err((
                vec!["method"],
                format!("method {method:?} does not apply to {}", self.configuration().name()),
                None,
            ));
        }

        if let (
            ElementDoc::Modulator { mod_freq: f1, .. },
            ElementDoc::Modulator { mod_freq: f2, .. },
        ) = (&self.path1, &self.path2)
        {
            if (f1 - f2).abs() > 1e-12 * f1.abs().max(f2.abs()) {
                return Err(fail(&["path2", "mod_freq"], Error::MismatchedDrive(*f1, *f2)));
            }
            if method == Method::Exact {
                let dw = grid.delta_omega();
                let ratio = f1 / dw;
                if ratio.round() < 1.0 || (ratio - ratio.round()).abs() > 1e-9 * ratio {
                    return Err(fail(
                        &["path1", "mod_freq"],
                        Error::GridIncommensurate {
                            mod_freq: *f1,
                            delta_omega: dw,
                        },
                    ));
                }
                if grid.n_points() > EXACT_MAX_POINTS {
                    return Err((
                        vec!["grid", "n_points"],
                        format!("exact method is limited to {EXACT_MAX_POINTS} grid points"),
                        None,
                    ));
                }
            }
        }

        for analysis in self.analyses() {
            let ok = match analysis {
                Analysis::Width | Analysis::SOverB => temporal,
                Analysis::Leakage => !temporal,
                Analysis::Verdict => true,
                Analysis::CauchySchwarz => matches!(self.source, SourceDoc::Physical { .. }),
            };
            if !ok {
                return Err((
                    vec!["outputs", "analyses"],
                    format!(
                        "analysis {analysis:?} is not available for {} with this source",
                        self.configuration().name()
                    ),
                    None,
                ));
            }
        }
        let tol = self.verdict_tolerance();
        if !(tol > 0.0 && tol.is_finite()) {
            return Err((
                vec!["outputs", "verdict_tolerance"],
                format!("verdict_tolerance must be > 0, got {tol}"),
                None,
            ));
        }
        let o = &self.outputs;
        let names = [&o.trace_file, &o.comb_file, &o.joint_grid_file, &o.sweep_file, &o.report_file];
        for name in names {
            if name.is_empty() || name == "." || name == ".." || name.contains(['/', '\\']) {
                return Err((
                    vec!["outputs"],
                    format!("output name `{name}` must be a plain file name"),
                    None,
                ));
            }
        }
        Ok(())
    }
}

fn anchored(document: &str, path: &[&str], message: String, source: Option<Error>) -> CliError {
    CliError::Scenario {
        location: locate(document, path),
        message: format!("{}: {message}", path.join(".")),
        source,
    }
}

/// Finds the key chain `path` in the raw text, each key searched after the
/// previous one. Returns the deepest key found.
fn locate(document: &str, path: &[&str]) -> Option<Location> {
    let mut from = 0;
    let mut found = None;
    for key in path {
        let quoted = format!("\"{key}\"");
        let mut search = from;
        let hit = loop {
            let Some(i) = document[search..].find(&quoted) else { break None };
            let at = search + i;
            let rest = document[at + quoted.len()..].trim_start();
            if rest.starts_with(':') {
                break Some(at);
            }
            search = at + quoted.len();
        };
        match hit {
            Some(at) => {
                from = at + quoted.len();
                found = Some(at);
            }
            None => break,
        }
    }
    found.map(|at| {
        let before = &document[..at];
        let line = before.matches('\n').count() + 1;
        let column = at - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        Location { line, column }
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Segment {
    Key(String),
    Index(usize),
}

fn parse_path(path: &str) -> std::result::Result<Vec<Segment>, String> {
    let bad = || format!("malformed parameter path `{path}`");
    let mut out = Vec::new();
    for part in path.split('.') {
        let (key, mut rest) = part.split_at(part.find('[').unwrap_or(part.len()));
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(bad());
        }
        out.push(Segment::Key(key.to_string()));
        while !rest.is_empty() {
            let close = rest.find(']').ok_or_else(bad)?;
            let idx = rest[1..close].parse().map_err(|_| bad())?;
            out.push(Segment::Index(idx));
            rest = &rest[close + 1..];
            if !rest.is_empty() && !rest.starts_with('[') {
                return Err(bad());
            }
        }
    }
    match out.first() {
        Some(Segment::Key(root)) if ["grid", "source", "path1", "path2"].contains(&root.as_str()) => {
            Ok(out)
        }
        _ => Err(format!("sweep parameter `{path}` must lie under grid, source, path1 or path2")),
    }
}

fn lookup<'a>(value: &'a Value, path: &[Segment]) -> Option<&'a Value> {
    path.iter().try_fold(value, |v, seg| match seg {
        Segment::Key(k) => v.get(k.as_str()),
        Segment::Index(i) => v.get(*i),
    })
}

fn lookup_mut<'a>(value: &'a mut Value, path: &[Segment]) -> Option<&'a mut Value> {
    path.iter().try_fold(value, |v, seg| match seg {
        Segment::Key(k) => v.get_mut(k.as_str()),
        Segment::Index(i) => v.get_mut(*i),
    })
}

fn number_value(x: f64, integral_slot: bool) -> Value {
    if integral_slot && x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Value::from(x as u64)
    } else {
        serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
    }
}
