//! Drivers for the three modes of the `nlevp` binary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::approx::{build_chebyshev, build_rational, default_grid, fitted_ratio, sup_error, DECAY_FLOOR_RTOL};
use crate::error::Error;
use crate::gallery::{newton_trace_oracle, OracleKind};
use crate::linalg::C64;
use crate::quadrature::{Contour, Quadrature};
use crate::solvers::{arnoldi_pipeline, reduced_subspace_iteration, EigenResult};

use super::config::{ExperimentConfig, Mode, Pipeline, Prepared};
use super::report::{OracleBlock, Report, SolveBlock, Status, SweepBlock, SweepRow};
use super::HarnessError;

/// Computed and oracle eigenvalues closer than this count as matched.
const ORACLE_MATCH_TOL: f64 = 1e-6;

/// Runs `config` in its own mode.
pub fn run(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    match config.mode {
        Mode::Solve => run_solve(config),
        Mode::Sweep => run_sweep(config),
        Mode::Oracle => run_oracle(config),
    }
}

fn classify(e: Error) -> Result<(Status, Option<EigenResult>, String), HarnessError> {
    let message = e.to_string();
    match e.root() {
        Error::InvalidArgument(msg) => Err(HarnessError::config("solver", msg)),
        Error::NotConverged(_) => match e {
            Error::NotConverged(partial) => Ok((Status::NotConverged, Some(*partial), message)),
            Error::Context { source, .. } => classify(*source),
            _ => unreachable!("root is NotConverged"),
        },
        Error::ArnoldiNoConvergence { .. } => Ok((Status::NotConverged, None, message)),
        _ => Ok((Status::Failed, None, message)),
    }
}

fn solve_block(pipeline: Pipeline, result: &EigenResult) -> SolveBlock {
    SolveBlock {
        pipeline,
        outer_iterations: result.outer_iterations,
        shift: result.shift,
        history: result.history.clone(),
        pairs: result.pairs.iter().map(|p| (p.lambda, p.residual)).collect(),
    }
}

fn solve_into(report: &mut Report, prepared: &Prepared) -> Result<(), HarnessError> {
    let pipeline = report.config.solver.pipeline;
    let start = Instant::now();
    let outcome = match pipeline {
        Pipeline::Reduced => reduced_subspace_iteration(prepared.problem(), &prepared.solver, &prepared.domain),
        Pipeline::Arnoldi => arnoldi_pipeline(prepared.problem(), &prepared.solver, &prepared.domain),
    };
    report.timings.push(("solve", start.elapsed().as_secs_f64()));
    match outcome {
        Ok(result) => {
            report.status = Status::Converged;
            report.solve = Some(solve_block(pipeline, &result));
        }
        Err(e) => {
            let (status, partial, message) = classify(e)?;
            report.status = status;
            report.message = Some(message);
            report.solve = partial.map(|r| solve_block(pipeline, &r));
        }
    }
    Ok(())
}

fn prepare_timed(report: &mut Report) -> Result<Prepared, HarnessError> {
    let start = Instant::now();
    let prepared = report.config.prepare()?;
    report.timings.push(("setup", start.elapsed().as_secs_f64()));
    Ok(prepared)
}

/// Runs the selected pipeline. Exit status 0 on convergence, 2 when the
/// iteration stopped early (the partial result is kept), 3 after a
/// numerical failure.
pub fn run_solve(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let mut report = Report::new(config.clone());
    let prepared = prepare_timed(&mut report)?;
    solve_into(&mut report, &prepared)?;
    Ok(report)
}

/// [`run_solve`] followed by the reference oracle of the gallery problem
/// on the same domain.
pub fn run_oracle(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let mut report = Report::new(config.clone());
    let prepared = prepare_timed(&mut report)?;
    solve_into(&mut report, &prepared)?;
    let start = Instant::now();
    let grid = config.output.oracle_grid;
    let g = &prepared.gallery;
    let (kind, eigenvalues, dropped) = match g.oracle {
        OracleKind::NewtonTrace => {
            let out = newton_trace_oracle(&g.problem, &prepared.domain, grid).map_err(numerical(&mut report));
            match out {
                Ok(o) => ("newton-trace", o.roots, o.dropped.len()),
                Err(()) => return Ok(report),
            }
        }
        kind => {
            let roots = g.reference_in(&prepared.domain, grid).map_err(numerical(&mut report));
            match roots {
                Ok(r) => (
                    if kind == OracleKind::ClosedForm {
                        "closed-form"
                    } else {
                        "companion-eig"
                    },
                    r,
                    0,
                ),
                Err(()) => return Ok(report),
            }
        }
    };
    report.timings.push(("oracle", start.elapsed().as_secs_f64()));
    let computed: Vec<C64> = report
        .solve
        .as_ref()
        .map(|s| s.pairs.iter().map(|p| p.0).collect())
        .unwrap_or_default();
    let nearest = |z: C64, set: &[C64]| set.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min);
    let max_abs_diff = (!computed.is_empty() && !eigenvalues.is_empty())
        .then(|| computed.iter().map(|&z| nearest(z, &eigenvalues)).fold(0.0, f64::max));
    let unmatched = eigenvalues
        .iter()
        .filter(|&&z| nearest(z, &computed) > ORACLE_MATCH_TOL)
        .count();
    report.oracle = Some(OracleBlock {
        kind,
        grid_density: grid,
        eigenvalues,
        dropped_seeds: dropped,
        max_abs_diff,
        unmatched,
        match_tol: ORACLE_MATCH_TOL,
    });
    Ok(report)
}

fn numerical(report: &mut Report) -> impl FnOnce(Error) + '_ {
    |e| {
        report.status = Status::Failed;
        report.message = Some(format!("oracle: {e}"));
    }
}

/// The real interval on which a Chebyshev interpolant is compared with the
/// rational approximant of a closed contour centered on the real axis.
fn chebyshev_interval(domain: &Contour) -> Option<Contour> {
    match *domain {
        Contour::Interval { .. } => Some(*domain),
        Contour::Circle { center, radius: h }
        | Contour::Ellipse {
            center, semi_major: h, ..
        } => (center.im == 0.0).then_some(Contour::Interval {
            a: center.re - h,
            b: center.re + h,
        }),
    }
}

/// Approximation error against order for the Cauchy approximant (closed
/// contours) and the Chebyshev interpolant (intervals, and the real
/// diameter of contours centered on the real axis), on [`default_grid`].
pub fn run_sweep(config: &ExperimentConfig) -> Result<Report, HarnessError> {
    let mut report = Report::new(config.clone());
    let prepared = prepare_timed(&mut report)?;
    let start = Instant::now();
    let problem = prepared.problem();
    let domain = prepared.domain;
    let grid = default_grid(&domain);
    let interval = chebyshev_interval(&domain);
    let mut rows = Vec::with_capacity(config.output.sweep_m.len());
    let result: crate::Result<()> = (|| {
        for &m in &config.output.sweep_m {
            let error_cauchy = if domain.is_closed_curve() {
                let quad = Quadrature::new(config.solver.rule, domain, m)?;
                Some(sup_error(&build_rational(problem, &quad)?, problem, &grid)?)
            } else {
                None
            };
            let error_chebyshev = match &interval {
                Some(iv) => Some(sup_error(&build_chebyshev(problem, iv, m)?, problem, &grid)?),
                None => None,
            };
            rows.push(SweepRow {
                m,
                error_cauchy,
                error_chebyshev,
            });
        }
        Ok(())
    })();
    report.timings.push(("sweep", start.elapsed().as_secs_f64()));
    if let Err(e) = result {
        report.status = Status::Failed;
        report.message = Some(e.to_string());
    }
    let scale = grid
        .iter()
        .map(|&z| problem.eval(z).norm_max())
        .fold(f64::MIN_POSITIVE, f64::max);
    let floor = DECAY_FLOOR_RTOL * scale;
    let ratio = |pick: fn(&SweepRow) -> Option<f64>| {
        let errs: Option<Vec<(usize, f64)>> = rows.iter().map(|r| pick(r).map(|e| (r.m, e))).collect();
        errs.filter(|e| !e.is_empty()).map(|e| fitted_ratio(&e, floor))
    };
    let ratio_cauchy = ratio(|r| r.error_cauchy);
    let ratio_chebyshev = ratio(|r| r.error_chebyshev);
    report.sweep = Some(SweepBlock {
        rows,
        ratio_cauchy,
        ratio_chebyshev,
    });
    Ok(report)
}

/// Where the sweep table goes: the configured path, else next to the report.
pub fn csv_path(config: &ExperimentConfig) -> Option<PathBuf> {
    config
        .output
        .csv
        .clone()
        .or_else(|| config.output.report.as_ref().map(|p| p.with_extension("csv")))
}

fn write_file(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the report and sweep table to their configured paths, or returns
/// the text meant for standard output when no path is set.
pub fn write_outputs(report: &Report) -> Result<String, HarnessError> {
    let mut stdout = String::new();
    let text = report.render();
    match &report.config.output.report {
        Some(p) => write_file(p, &text)?,
        None => stdout.push_str(&text),
    }
    if let Some(csv) = report.csv() {
        match csv_path(&report.config) {
            Some(p) => write_file(&p, &csv)?,
            None => {
                stdout.push('\n');
                stdout.push_str(&csv);
            }
        }
    }
    Ok(stdout)
}
