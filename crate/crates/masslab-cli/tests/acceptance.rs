use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use masslab::checks::{self, SuiteConfig, SUITES};

fn report(id: usize, name: &str, pass: bool, elapsed: Duration, limit: u64, note: &str) -> bool {
    let in_time = elapsed.as_secs_f64() <= limit as f64;
    let ok = pass && in_time;
    let line = format!(
        "criterion {id:>2} {name:<14} {}  {:.2}s / {limit}s{}{note}\n",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        if in_time { "" } else { "  over the time limit" },
    );
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    ok
}

fn cli_check() -> (bool, Duration, String) {
    let start = Instant::now();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_masslab"))
            .args(["check", "--suite", "all", "--seed", "7", "--format", "table"])
            .env_remove("MASSLAB_BUDGET")
            .output()
            .expect("binary runs")
    };
    let a = run();
    let b = run();
    let elapsed = start.elapsed();
    let same = a.stdout == b.stdout;
    let ok = a.status.code() == Some(0) && b.status.code() == Some(0) && same;
    let note = if ok {
        String::new()
    } else {
        format!(
            "  exit {:?}/{:?}, identical {same}\n{}",
            a.status.code(),
            b.status.code(),
            String::from_utf8_lossy(&a.stdout)
        )
    };
    (ok, elapsed, note)
}

#[test]
fn acceptance_criteria() {
    let cfg = SuiteConfig::default();
    let mut all = true;
    for &(id, name, limit) in &SUITES {
        let r = checks::run(id, &cfg).expect("known suite");
        let note = match r.failures.first() {
            Some(f) => format!("  {} cases, first failure: {f}", r.cases),
            None => format!("  {} cases", r.cases),
        };
        all &= report(id, name, r.pass, r.elapsed, limit, &note);
    }
    let (ok, elapsed, note) = cli_check();
    all &= report(10, "cli", ok, elapsed, 300, &note);
    assert!(all, "some acceptance criteria failed");
}
