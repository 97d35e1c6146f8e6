//! Reporting helpers for the acceptance suite in `tests/acceptance.rs`.

use std::io::Write;
use std::time::{Duration, Instant};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub checks: Vec<(String, bool)>,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    /// One PASS/FAIL line plus an indented line per failed check. Written
    /// straight to the process stdout so the test harness does not swallow it.
    pub fn print(&self) {
        let mut out = String::new();
        out.push_str(&format!(
            "criterion {:>2} {} {} [{:.2?}]\n",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            self.elapsed
        ));
        for (what, ok) in &self.checks {
            out.push_str(&format!("    {} {what}\n", if *ok { "ok " } else { "BAD" }));
        }
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        let _ = lock.write_all(out.as_bytes());
        let _ = lock.flush();
    }
}

/// Collects named checks for one criterion and times it.
pub struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<(String, bool)>,
    start: Instant,
}

impl Criterion {
    pub fn new(id: u32, title: &'static str) -> Self {
        Criterion { id, title, checks: Vec::new(), start: Instant::now() }
    }

    pub fn check(&mut self, what: impl Into<String>, ok: bool) -> &mut Self {
        self.checks.push((what.into(), ok));
        self
    }

    /// |value − target| < tol.
    pub fn near(&mut self, what: &str, value: f64, target: f64, tol: f64) -> &mut Self {
        let ok = (value - target).abs() < tol;
        self.check(format!("{what}: {value:.6} vs {target:.6} (tol {tol})"), ok)
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    /// Prints the report line and panics when any check failed.
    pub fn finish(self) {
        let outcome = Outcome { id: self.id, title: self.title, checks: self.checks, elapsed: self.start.elapsed() };
        outcome.print();
        assert!(outcome.passed(), "criterion {} failed", outcome.id);
    }
}

/// Peak resident set size of this process in bytes, where the platform reports it.
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib * 1024)
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_workers<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool").install(f)
}
