//! Built-in verification suite: the library acceptance criteria plus the
//! command-line determinism check.

use std::path::Path;

use spdc_g2_verify::acceptance::{self, Criterion, Outcome};

use crate::run::{run, RunOptions};
use crate::scenario::parse_scenario;

const DETERMINISM_SCENARIOS: [(&str, &str); 3] = [
    ("gdd_sweep", include_str!("../scenarios/gdd_sweep.json")),
    ("modulation_sweep", include_str!("../scenarios/modulation_sweep.json")),
    ("modulation_exact", include_str!("../scenarios/modulation_exact.json")),
];

pub fn criteria() -> Vec<Criterion> {
    let mut all = acceptance::criteria();
    all.push(Criterion {
        id: 13,
        name: "cli_determinism",
        check: determinism,
    });
    all
}

/// Criteria whose id equals `filter` or whose name contains it.
pub fn select(filter: Option<&str>) -> Vec<Criterion> {
    criteria()
        .into_iter()
        .filter(|c| filter.is_none_or(|f| c.name.contains(f) || f.parse() == Ok(c.id)))
        .collect()
}

/// Runs `selected`, printing one line per criterion. True when all pass.
pub fn run_suite(selected: &[Criterion], mut emit: impl FnMut(&str)) -> bool {
    let mut failed = 0;
    for c in selected {
        let outcome = c.run();
        if !outcome.passed {
            failed += 1;
        }
        emit(&acceptance::format_line(c, &outcome));
    }
    emit(&format!("{} of {} criteria passed", selected.len() - failed, selected.len()));
    failed == 0
}

/// Runs each bundled scenario twice, once serially and once on the
/// default pool, and compares every CSV byte for byte.
pub fn determinism() -> Outcome {
    match compare_runs() {
        Ok(files) => Outcome {
            passed: true,
            detail: format!("{files} CSV files byte-identical across runs"),
        },
        Err(detail) => Outcome {
            passed: false,
            detail,
        },
    }
}

fn compare_runs() -> Result<usize, String> {
    let mut compared = 0;
    for (name, doc) in DETERMINISM_SCENARIOS {
        let scenario = parse_scenario(doc).map_err(|e| format!("{name}: {e}"))?;
        let dirs = [tempdir()?, tempdir()?];
        for (dir, workers) in dirs.iter().zip([1, 0]) {
            run(&scenario, dir.path(), RunOptions { workers }).map_err(|e| format!("{name}: {e}"))?;
        }
        let a = csv_files(dirs[0].path())?;
        let b = csv_files(dirs[1].path())?;
        if a.len() != b.len() || a.is_empty() {
            return Err(format!("{name}: runs wrote different file sets"));
        }
        for ((fa, ca), (fb, cb)) in a.iter().zip(&b) {
            if fa != fb || ca != cb {
                return Err(format!("{name}: {fa} differs between runs"));
            }
        }
        compared += a.len();
    }
    Ok(compared)
}

fn tempdir() -> Result<tempfile::TempDir, String> {
    tempfile::tempdir().map_err(|e| e.to_string())
}

pub fn csv_files(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_some_and(|x| x == "csv") {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            files.push((name, std::fs::read(&path).map_err(|e| e.to_string())?));
        }
    }
    files.sort();
    Ok(files)
}
