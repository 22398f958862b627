//! Acceptance criteria A1–A13, one line per criterion.

use std::process::ExitCode;

use realpos_cli::suites::{run_suite, RunConfig, SuiteReport};

const SEED: u64 = 42;

const CRITERIA: &[(&str, &str, &[&str])] = &[
    ("A1", "F-transform bijection", &["f-bijection"]),
    ("A2", "root laws", &["root-laws"]),
    ("A3", "method agreement", &["method-agreement"]),
    ("A4", "sector bound", &["sector-bound"]),
    ("A5", "support projections", &["support"]),
    ("A6", "peak projections", &["peak"]),
    ("A7", "half-F root monotonicity", &["root-monotonicity"]),
    ("A8", "Le Merdy counterexample", &["lemerdy"]),
    ("A9", "A_H and amplification", &["a-h"]),
    ("A10", "oa(S) unitality", &["oa-unital"]),
    (
        "A11",
        "interpolation",
        &[
            "interp-dominate",
            "interp-decompose",
            "interp-np",
            "interp-urysohn",
            "interp-strict-urysohn",
            "interp-peak",
            "interp-tietze",
        ],
    ),
    ("A12", "vav identity", &["vav"]),
    ("A13", "kernel invariants", &["kernel", "srp-roots"]),
];

fn detail(r: &SuiteReport) -> String {
    format!(
        "{} {}/{} failed (allowed {}), worst margin {}",
        r.suite,
        r.failures.len(),
        r.cases,
        r.allowed_failures,
        r.worst_margin.map_or("n/a".into(), |m| format!("{m:+.2e}"))
    )
}

fn main() -> ExitCode {
    let cfg = RunConfig {
        seed: SEED,
        ..RunConfig::default()
    };
    let mut all = true;
    for (id, title, suites) in CRITERIA {
        let mut parts = Vec::new();
        let mut ok = true;
        for name in *suites {
            match run_suite(name, &cfg) {
                Ok(r) => {
                    ok &= r.passed;
                    for f in &r.failures {
                        eprintln!("  {id} {} case {} seed {} n {}: {:?}", r.suite, f.case, f.seed, f.n, f.failed);
                    }
                    parts.push(detail(&r));
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!("{name} error: {e}"));
                }
            }
        }
        all &= ok;
        println!("{id:<4} {} {title}: {}", if ok { "PASS" } else { "FAIL" }, parts.join("; "));
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
