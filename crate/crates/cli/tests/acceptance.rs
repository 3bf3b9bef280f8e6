//! Acceptance suite: every criterion at its pinned tolerance, one line each.
//! Criterion 13 also drives the compiled binary.

use std::path::Path;
use std::process::{Command, ExitCode};

use spdc_g2_cli::selftest::{self, csv_files};
use spdc_g2_verify::acceptance::{format_line, Outcome};

const BIN: &str = env!("CARGO_BIN_EXE_spdc-g2");

fn scenario(name: &str) -> String {
    format!("{}/scenarios/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn binary_determinism() -> Outcome {
    let fail = |detail: String| Outcome { passed: false, detail };
    let selftest = Command::new(BIN).args(["selftest", "--filter", "cli_determinism"]).output();
    match selftest {
        Ok(o) if o.status.success() => {}
        Ok(o) => return fail(format!("selftest exited with {}", o.status)),
        Err(e) => return fail(format!("cannot start binary: {e}")),
    }
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for (dir, workers) in dirs.iter().zip(["1", "4"]) {
        let status = Command::new(BIN)
            .args(["sweep", "--scenario", &scenario("gdd_sweep"), "--workers", workers, "--out"])
            .arg(dir.path())
            .output()
            .map(|o| o.status);
        if !matches!(status, Ok(s) if s.success()) {
            return fail(format!("sweep run failed: {status:?}"));
        }
    }
    let read = |p: &Path| csv_files(p).unwrap_or_default();
    let (a, b) = (read(dirs[0].path()), read(dirs[1].path()));
    if a.is_empty() || a != b {
        return fail("binary runs produced different CSV files".into());
    }
    Outcome {
        passed: true,
        detail: format!("binary selftest ok; {} CSV files identical across two runs", a.len()),
    }
}

fn main() -> ExitCode {
    let mut failed = 0;
    for c in selftest::criteria() {
        let mut outcome = c.run();
        if c.id == 13 && outcome.passed {
            let bin = binary_determinism();
            outcome = Outcome {
                passed: bin.passed,
                detail: format!("{}; {}", outcome.detail, bin.detail),
            };
        }
        if !outcome.passed {
            failed += 1;
        }
        println!("{}", format_line(&c, &outcome));
    }
    if failed == 0 {
        println!("acceptance: all 13 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
