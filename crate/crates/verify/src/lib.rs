//! Runner for the acceptance criteria in `tests/acceptance.rs`.
//!
//! Each criterion prints exactly one `[PASS]`/`[FAIL]` line; the process fails
//! if any criterion does, after all of them have run.

use std::io::Write;
use std::time::Instant;

pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub check: fn() -> Verdict,
}

/// Runs every criterion in order, printing one line each, and returns the number of failures.
pub fn run_all(criteria: &[Criterion], out: &mut dyn Write) -> usize {
    let mut failed = 0;
    for c in criteria {
        let start = Instant::now();
        let v = (c.check)();
        let secs = start.elapsed().as_secs_f64();
        if !v.pass {
            failed += 1;
        }
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "[{tag}] criterion {} ({}): {} [{secs:.1}s]",
            c.id, c.title, v.detail
        );
        let _ = out.flush();
    }
    let _ = writeln!(out, "acceptance: {} passed, {failed} failed", criteria.len() - failed);
    failed
}
