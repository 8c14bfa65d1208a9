//! Run reports (TOML) and sweep tables (CSV).
//!
//! Every real number in a report carries 17 significant digits. The
//! configuration is echoed in a trailing `[config]` table and parses back to
//! the same [`ExperimentConfig`].

use std::fmt::Write as _;

use serde::Serialize;

use crate::linalg::C64;

use super::config::{ExperimentConfig, Mode, Pipeline};
use super::{HarnessError, EXIT_NOT_CONVERGED, EXIT_NUMERICAL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Converged,
    NotConverged,
    /// Numerical failure, such as a singular shift after the retry.
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::NotConverged => "not-converged",
            Status::Failed => "failed",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Converged => 0,
            Status::NotConverged => EXIT_NOT_CONVERGED,
            Status::Failed => EXIT_NUMERICAL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveBlock {
    pub pipeline: Pipeline,
    pub outer_iterations: usize,
    pub shift: C64,
    pub history: Vec<f64>,
    /// `(λ, ‖T(λ)u‖/‖u‖)` sorted by distance to the shift.
    pub pairs: Vec<(C64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleBlock {
    /// `"closed-form"`, `"companion-eig"` or `"newton-trace"`.
    pub kind: &'static str,
    pub grid_density: usize,
    pub eigenvalues: Vec<C64>,
    pub dropped_seeds: usize,
    /// Largest distance from a computed eigenvalue to its nearest oracle
    /// eigenvalue; absent when either list is empty.
    pub max_abs_diff: Option<f64>,
    /// Oracle eigenvalues with no computed eigenvalue within `match_tol`.
    pub unmatched: usize,
    pub match_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub m: usize,
    pub error_cauchy: Option<f64>,
    pub error_chebyshev: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepBlock {
    pub rows: Vec<SweepRow>,
    pub ratio_cauchy: Option<f64>,
    pub ratio_chebyshev: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub config: ExperimentConfig,
    pub status: Status,
    pub message: Option<String>,
    pub solve: Option<SolveBlock>,
    pub oracle: Option<OracleBlock>,
    pub sweep: Option<SweepBlock>,
    /// Wall-clock seconds per phase; rendered only when the configuration
    /// asks for timings.
    pub timings: Vec<(&'static str, f64)>,
}

/// `{:.16e}` with the TOML spellings of the special values.
fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn complex(z: C64) -> String {
    format!("{{ re = {}, im = {} }}", num(z.re), num(z.im))
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn list<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    let parts: Vec<String> = items.iter().map(f).collect();
    format!("[{}]", parts.join(", "))
}

#[derive(Serialize)]
struct Echo<'a> {
    config: &'a ExperimentConfig,
}

impl Report {
    pub fn new(config: ExperimentConfig) -> Self {
        Self {
            config,
            status: Status::Converged,
            message: None,
            solve: None,
            oracle: None,
            sweep: None,
            timings: Vec::new(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    /// Number of reported eigenpairs.
    pub fn eigenvalue_count(&self) -> usize {
        self.solve.as_ref().map_or(0, |s| s.pairs.len())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "# nlevp report");
        let _ = writeln!(w, "[summary]");
        let _ = writeln!(w, "mode = {}", quoted(self.config.mode.as_str()));
        let _ = writeln!(w, "status = {}", quoted(self.status.as_str()));
        let _ = writeln!(w, "exit_code = {}", self.exit_code());
        if let Some(msg) = &self.message {
            let _ = writeln!(w, "message = {}", quoted(msg));
        }
        if let Some(s) = &self.solve {
            let max_res = s.pairs.iter().map(|p| p.1).fold(0.0, f64::max);
            let _ = writeln!(w, "pipeline = {}", quoted(s.pipeline.as_str()));
            let _ = writeln!(w, "outer_iterations = {}", s.outer_iterations);
            let _ = writeln!(w, "eigenvalue_count = {}", s.pairs.len());
            let _ = writeln!(w, "max_residual = {}", num(max_res));
            let _ = writeln!(w, "shift = {}", complex(s.shift));
            let _ = writeln!(w, "history = {}", list(&s.history, |x| num(*x)));
            for (lambda, res) in &s.pairs {
                let _ = writeln!(w, "\n[[eigenpairs]]");
                let _ = writeln!(w, "re = {}", num(lambda.re));
                let _ = writeln!(w, "im = {}", num(lambda.im));
                let _ = writeln!(w, "residual = {}", num(*res));
            }
        }
        if let Some(o) = &self.oracle {
            let _ = writeln!(w, "\n[oracle]");
            let _ = writeln!(w, "kind = {}", quoted(o.kind));
            let _ = writeln!(w, "grid_density = {}", o.grid_density);
            let _ = writeln!(w, "count = {}", o.eigenvalues.len());
            let _ = writeln!(w, "eigenvalues = {}", list(&o.eigenvalues, |z| complex(*z)));
            let _ = writeln!(w, "dropped_seeds = {}", o.dropped_seeds);
            if let Some(d) = o.max_abs_diff {
                let _ = writeln!(w, "max_abs_diff = {}", num(d));
            }
            let _ = writeln!(w, "match_tol = {}", num(o.match_tol));
            let _ = writeln!(w, "unmatched = {}", o.unmatched);
        }
        if let Some(s) = &self.sweep {
            let opt = |x: &Option<f64>| num(x.unwrap_or(f64::NAN));
            let _ = writeln!(w, "\n[sweep]");
            let _ = writeln!(w, "m = {}", list(&s.rows, |r| r.m.to_string()));
            let _ = writeln!(w, "error_cauchy = {}", list(&s.rows, |r| opt(&r.error_cauchy)));
            let _ = writeln!(w, "error_chebyshev = {}", list(&s.rows, |r| opt(&r.error_chebyshev)));
            let _ = writeln!(w, "ratio_cauchy = {}", opt(&s.ratio_cauchy));
            let _ = writeln!(w, "ratio_chebyshev = {}", opt(&s.ratio_chebyshev));
        }
        if self.config.output.timings && !self.timings.is_empty() {
            let _ = writeln!(w, "\n[timings]");
            for (phase, secs) in &self.timings {
                let _ = writeln!(w, "{phase} = {}", num(*secs));
            }
        }
        let _ = writeln!(w);
        out.push_str(&toml::to_string(&Echo { config: &self.config }).expect("configuration serializes"));
        out
    }

    /// The sweep table with header `m,error_cauchy,error_chebyshev`; methods
    /// that do not apply to the domain are written as `nan`.
    pub fn csv(&self) -> Option<String> {
        let s = self.sweep.as_ref()?;
        let mut out = String::from("m,error_cauchy,error_chebyshev\n");
        for r in &s.rows {
            let f = |x: Option<f64>| x.map_or_else(|| "nan".to_string(), |v| format!("{v:.16e}"));
            let _ = writeln!(out, "{},{},{}", r.m, f(r.error_cauchy), f(r.error_chebyshev));
        }
        Some(out)
    }
}

/// The configuration echoed in a rendered report.
pub fn echoed_config(report: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut doc: toml::Table = toml::from_str(report).map_err(|e| HarnessError::Config(e.to_string()))?;
    let cfg = doc
        .remove("config")
        .ok_or_else(|| HarnessError::Config("report has no [config] table".into()))?;
    cfg.try_into()
        .map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))
}
