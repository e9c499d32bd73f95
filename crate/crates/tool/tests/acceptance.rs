//! Runs every acceptance criterion at its stated tolerance and prints one
//! PASS/FAIL line per criterion, followed by the individual checks.

use std::process::{Command, ExitCode};
use std::time::Instant;

use ndgs_core::acceptance::{self, holds, less_than, AcceptanceOptions, CriterionReport};

fn ndgs(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_ndgs")).args(args).output().ok().and_then(|o| o.status.code())
}

/// Criterion 8 plus the exit codes of `ndgs check`.
fn criterion_8_with_cli() -> CriterionReport {
    let start = Instant::now();
    let mut rep = acceptance::criterion_8();
    rep.checks.pop();

    rep.checks.push(holds("`ndgs check` exits 0", ndgs(&["check"]) == Some(0)));
    rep.checks.push(holds(
        "`ndgs check --only 1 --tolerance 0` exits 2",
        ndgs(&["check", "--only", "1", "--tolerance", "0"]) == Some(2),
    ));
    let dir = tempfile::tempdir().expect("temp dir");
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "tolerance = none\n").expect("write config");
    rep.checks.push(holds(
        "`ndgs check` with a malformed config exits 1",
        ndgs(&["--config", conf.to_str().unwrap(), "check"]) == Some(1),
    ));
    rep.checks.push(holds("`ndgs frobnicate` exits 1", ndgs(&["frobnicate"]) == Some(1)));

    rep.elapsed += start.elapsed();
    rep.checks.push(less_than("runtime [s]", rep.elapsed.as_secs_f64(), 60.0));
    rep
}

fn main() -> ExitCode {
    let opts = AcceptanceOptions::default();
    let mut sweep = None;
    let mut reports = Vec::new();
    for id in 1..=8 {
        let rep = match id {
            1 => acceptance::criterion_1(&opts),
            2 => acceptance::criterion_2(),
            3 => acceptance::criterion_3(),
            4 => acceptance::criterion_4(),
            5 => acceptance::criterion_5(sweep.get_or_insert_with(acceptance::acceptance_sweep)),
            6 => acceptance::criterion_6(),
            7 => acceptance::criterion_7(sweep.get_or_insert_with(acceptance::acceptance_sweep)),
            _ => criterion_8_with_cli(),
        };
        println!("{}", rep.summary_line());
        reports.push(rep);
    }
    println!();
    for rep in &reports {
        println!("criterion {}: {}", rep.id, rep.name);
        for line in rep.detail_lines() {
            println!("{line}");
        }
    }
    let failed: Vec<u32> = reports.iter().filter(|r| !r.passed()).map(|r| r.id).collect();
    println!("\n{} of {} criteria passed", reports.len() - failed.len(), reports.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing: {failed:?}");
        ExitCode::FAILURE
    }
}
