//! Experiment configuration files.
//!
//! A configuration is a TOML document with a handful of tables:
//!
//! ```toml
//! mode = "solve"
//!
//! [problem]
//! name = "delay"
//! tau = 1.0
//! random = { n = 6, inside = 3, seed = 7 }
//!
//! [domain]
//! kind = "circle"
//! radius = 1.0
//!
//! [solver]
//! pipeline = "reduced"
//! m = 25
//! nu = 6
//! k = 3
//!
//! [output]
//! report = "report.toml"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::approx::NlevpProblem;
use crate::gallery::{make_delay, make_diagonal, make_quadratic, random_delay, random_quadratic, GalleryProblem};
use crate::linalg::{DenseMatrix, C64};
use crate::quadrature::{Contour, QuadratureRule};
use crate::solvers::{Method, SolverConfig};

use super::HarnessError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Solve,
    Sweep,
    Oracle,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Solve => "solve",
            Mode::Sweep => "sweep",
            Mode::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    /// Reduced (Rayleigh-Ritz) subspace iteration.
    #[default]
    Reduced,
    /// Arnoldi on the full structured pencil.
    Arnoldi,
}

impl Pipeline {
    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::Reduced => "reduced",
            Pipeline::Arnoldi => "arnoldi",
        }
    }
}

/// A dense matrix written row by row, with an optional imaginary part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixSpec {
    fn to_dense(&self, field: &str) -> Result<DenseMatrix, HarnessError> {
        let n = self.re.len();
        if n == 0 || self.re.iter().any(|row| row.len() != n) {
            return Err(HarnessError::config(field, "matrix must be square and non-empty"));
        }
        if let Some(im) = &self.im {
            if im.len() != n || im.iter().any(|row| row.len() != n) {
                return Err(HarnessError::config(
                    field,
                    "imaginary part must have the shape of the real part",
                ));
            }
        }
        Ok(DenseMatrix::from_fn(n, n, |i, j| {
            C64::new(self.re[i][j], self.im.as_ref().map_or(0.0, |im| im[i][j]))
        }))
    }
}

/// Seeded random gallery instance: `inside` eigenvalues within a quarter
/// radius of the center, the rest well outside the radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomInstance {
    pub n: usize,
    pub inside: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub center_re: f64,
    #[serde(default)]
    pub center_im: f64,
    #[serde(default = "unit")]
    pub radius: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemName {
    /// `diag(z − ρ_1, …, z − ρ_k, 1, …, 1)`
    Diag,
    /// `z²M₂ + zC₁ + K₀`, explicit or random.
    Quadratic,
    /// `−zI + A₀ + A₁e^{−τz}`, explicit or random.
    Delay,
}

impl ProblemName {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemName::Diag => "diag",
            ProblemName::Quadratic => "quadratic",
            ProblemName::Delay => "delay",
        }
    }
}

/// The `[problem]` table. Which of the optional keys are allowed depends on
/// `name`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: ProblemName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots_re: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots_im: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomInstance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m2: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a1: Option<MatrixSpec>,
}

impl ProblemSpec {
    /// A spec with only `name` set.
    pub fn named(name: ProblemName) -> Self {
        Self {
            name,
            n: None,
            roots_re: None,
            roots_im: None,
            tau: None,
            random: None,
            m2: None,
            c1: None,
            k0: None,
            a0: None,
            a1: None,
        }
    }

    fn present_keys(&self) -> Vec<&'static str> {
        let keys = [
            ("n", self.n.is_some()),
            ("roots_re", self.roots_re.is_some()),
            ("roots_im", self.roots_im.is_some()),
            ("tau", self.tau.is_some()),
            ("random", self.random.is_some()),
            ("m2", self.m2.is_some()),
            ("c1", self.c1.is_some()),
            ("k0", self.k0.is_some()),
            ("a0", self.a0.is_some()),
            ("a1", self.a1.is_some()),
        ];
        keys.into_iter().filter(|k| k.1).map(|k| k.0).collect()
    }

    pub fn build(&self) -> Result<GalleryProblem, HarnessError> {
        let allowed: &[&str] = match self.name {
            ProblemName::Diag => &["n", "roots_re", "roots_im"],
            ProblemName::Quadratic => &["random", "m2", "c1", "k0"],
            ProblemName::Delay => &["tau", "random", "a0", "a1"],
        };
        if let Some(k) = self.present_keys().into_iter().find(|k| !allowed.contains(k)) {
            return Err(HarnessError::config(
                &format!("problem.{k}"),
                format!("does not apply to problem `{}`", self.name.as_str()),
            ));
        }
        let numeric = |e: crate::Error| HarnessError::config("problem", e.to_string());
        match self.name {
            ProblemName::Diag => {
                let roots_re = self.roots_re.as_deref().unwrap_or_default();
                let roots_im = self.roots_im.as_deref().unwrap_or_default();
                if !roots_im.is_empty() && roots_im.len() != roots_re.len() {
                    return Err(HarnessError::config(
                        "problem.roots_im",
                        format!("has {} entries but roots_re has {}", roots_im.len(), roots_re.len()),
                    ));
                }
                let n = self.n.ok_or_else(|| HarnessError::config("problem.n", "missing"))?;
                if roots_re.len() > n {
                    return Err(HarnessError::config(
                        "problem.n",
                        format!("n = {n} is smaller than the number of roots {}", roots_re.len()),
                    ));
                }
                let roots: Vec<C64> = roots_re
                    .iter()
                    .enumerate()
                    .map(|(i, &re)| C64::new(re, roots_im.get(i).copied().unwrap_or(0.0)))
                    .collect();
                make_diagonal(&roots, n).map_err(numeric)
            }
            ProblemName::Quadratic => match (&self.random, &self.m2, &self.c1, &self.k0) {
                (Some(r), None, None, None) => {
                    r.check()?;
                    random_quadratic(r.n, r.inside, r.center(), r.radius, r.seed).map_err(numeric)
                }
                (None, Some(m2), Some(c1), Some(k0)) => {
                    let (m2, c1, k0) = (
                        m2.to_dense("problem.m2")?,
                        c1.to_dense("problem.c1")?,
                        k0.to_dense("problem.k0")?,
                    );
                    make_quadratic(&m2, &c1, &k0).map_err(numeric)
                }
                _ => Err(HarnessError::config(
                    "problem",
                    "a quadratic problem needs either `random` or all of `m2`, `c1`, `k0`",
                )),
            },
            ProblemName::Delay => {
                let tau = self.tau.unwrap_or(1.0);
                if !(tau > 0.0 && tau.is_finite()) {
                    return Err(HarnessError::config(
                        "problem.tau",
                        format!("must be positive, got {tau}"),
                    ));
                }
                match (&self.random, &self.a0, &self.a1) {
                    (Some(r), None, None) => {
                        r.check()?;
                        if tau != 1.0 {
                            return Err(HarnessError::config(
                                "problem.tau",
                                "random delay instances use tau = 1",
                            ));
                        }
                        random_delay(r.n, r.inside, r.center(), r.radius, r.seed).map_err(numeric)
                    }
                    (None, Some(a0), Some(a1)) => {
                        let (a0, a1) = (a0.to_dense("problem.a0")?, a1.to_dense("problem.a1")?);
                        make_delay(&a0, &a1, tau).map_err(numeric)
                    }
                    _ => Err(HarnessError::config(
                        "problem",
                        "a delay problem needs either `random` or both `a0` and `a1`",
                    )),
                }
            }
        }
    }
}

impl RandomInstance {
    fn center(&self) -> C64 {
        C64::new(self.center_re, self.center_im)
    }

    fn check(&self) -> Result<(), HarnessError> {
        if self.n == 0 || self.inside > self.n {
            return Err(HarnessError::config(
                "problem.random",
                format!(
                    "need n >= 1 and inside <= n, got n = {}, inside = {}",
                    self.n, self.inside
                ),
            ));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(HarnessError::config("problem.random.radius", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Circle,
    Ellipse,
    Interval,
}

/// The `[domain]` table: `center_re`, `center_im` and `radius` for a
/// circle, `semi_major` and `semi_minor` instead of `radius` for an
/// ellipse, `a` and `b` for an interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: DomainKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center_im: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semi_major: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semi_minor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

impl DomainSpec {
    pub fn circle(center: C64, radius: f64) -> Self {
        Self {
            kind: DomainKind::Circle,
            center_re: Some(center.re),
            center_im: Some(center.im),
            radius: Some(radius),
            semi_major: None,
            semi_minor: None,
            a: None,
            b: None,
        }
    }

    pub fn interval(a: f64, b: f64) -> Self {
        Self {
            kind: DomainKind::Interval,
            center_re: None,
            center_im: None,
            radius: None,
            semi_major: None,
            semi_minor: None,
            a: Some(a),
            b: Some(b),
        }
    }

    pub fn contour(&self) -> Result<Contour, HarnessError> {
        let keys = [
            ("center_re", self.center_re.is_some()),
            ("center_im", self.center_im.is_some()),
            ("radius", self.radius.is_some()),
            ("semi_major", self.semi_major.is_some()),
            ("semi_minor", self.semi_minor.is_some()),
            ("a", self.a.is_some()),
            ("b", self.b.is_some()),
        ];
        let allowed: &[&str] = match self.kind {
            DomainKind::Circle => &["center_re", "center_im", "radius"],
            DomainKind::Ellipse => &["center_re", "center_im", "semi_major", "semi_minor"],
            DomainKind::Interval => &["a", "b"],
        };
        if let Some((k, _)) = keys.iter().find(|(k, present)| *present && !allowed.contains(k)) {
            return Err(HarnessError::config(
                &format!("domain.{k}"),
                "does not apply to this domain kind",
            ));
        }
        let need = |v: Option<f64>, k: &str| v.ok_or_else(|| HarnessError::config(&format!("domain.{k}"), "missing"));
        let center = C64::new(self.center_re.unwrap_or(0.0), self.center_im.unwrap_or(0.0));
        let c = match self.kind {
            DomainKind::Circle => Contour::circle(center, need(self.radius, "radius")?),
            DomainKind::Ellipse => Contour::ellipse(
                center,
                need(self.semi_major, "semi_major")?,
                need(self.semi_minor, "semi_minor")?,
            ),
            DomainKind::Interval => Contour::interval(need(self.a, "a")?, need(self.b, "b")?),
        };
        c.map_err(|e| HarnessError::config("domain", e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub pipeline: Pipeline,
    pub method: Method,
    pub rule: QuadratureRule,
    pub m: usize,
    pub nu: usize,
    pub q: usize,
    pub k: usize,
    pub tol: f64,
    pub max_outer: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub krylov_max: Option<usize>,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            pipeline: Pipeline::Reduced,
            method: d.method,
            rule: d.rule,
            m: d.m,
            nu: d.nu,
            q: d.q,
            k: d.k,
            tol: d.tol,
            max_outer: d.max_outer,
            seed: d.seed,
            shift_re: None,
            shift_im: None,
            krylov_max: None,
        }
    }
}

impl SolverSection {
    pub fn to_solver_config(&self) -> SolverConfig {
        let shift = match (self.shift_re, self.shift_im) {
            (None, None) => None,
            (re, im) => Some(C64::new(re.unwrap_or(0.0), im.unwrap_or(0.0))),
        };
        SolverConfig {
            method: self.method,
            rule: self.rule,
            m: self.m,
            nu: self.nu,
            q: self.q,
            k: self.k,
            tol: self.tol,
            max_outer: self.max_outer,
            shift,
            seed: self.seed,
            krylov_max: self.krylov_max,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Report path; standard output when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    /// Sweep table path; defaults to the report path with extension `csv`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Orders of the decay sweep.
    pub sweep_m: Vec<usize>,
    /// Grid density of the Newton trace oracle.
    pub oracle_grid: usize,
    /// Adds wall-clock timings to the report, which makes it vary between runs.
    pub timings: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            report: None,
            csv: None,
            sweep_m: Vec::new(),
            oracle_grid: 50,
            timings: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub mode: Mode,
    pub problem: ProblemSpec,
    pub domain: DomainSpec,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// A configuration together with everything derived from it.
#[derive(Debug)]
pub struct Prepared {
    pub gallery: GalleryProblem,
    pub domain: Contour,
    pub solver: SolverConfig,
}

impl Prepared {
    pub fn problem(&self) -> &NlevpProblem {
        &self.gallery.problem
    }
}

impl ExperimentConfig {
    /// Parses TOML; syntax and type errors carry line and column.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration values are always representable in TOML")
    }

    /// Checks every invariant and builds the problem and domain.
    pub fn prepare(&self) -> Result<Prepared, HarnessError> {
        let domain = self.domain.contour()?;
        let solver = self.solver.to_solver_config();
        solver
            .validate()
            .map_err(|e| HarnessError::config("solver", e.root().to_string()))?;
        match (self.solver.method, domain.is_closed_curve() || self.mode == Mode::Sweep) {
            (Method::Cauchy, false) => {
                return Err(HarnessError::config(
                    "solver.method",
                    "the cauchy method needs a circle or ellipse domain",
                ))
            }
            (Method::Chebyshev, true) => {
                return Err(HarnessError::config(
                    "solver.method",
                    "the chebyshev method needs an interval domain",
                ))
            }
            _ => {}
        }
        let gallery = self.problem.build()?;
        let n = gallery.problem.dim();
        if self.mode != Mode::Sweep && self.solver.pipeline == Pipeline::Reduced && self.solver.nu > n {
            return Err(HarnessError::config(
                "solver.nu",
                format!("nu = {} exceeds the problem size n = {n}", self.solver.nu),
            ));
        }
        if self.mode == Mode::Sweep {
            let ms = &self.output.sweep_m;
            if ms.is_empty() {
                return Err(HarnessError::config(
                    "output.sweep_m",
                    "a sweep needs at least one order",
                ));
            }
            if ms[0] < 2 || ms.windows(2).any(|w| w[0] >= w[1]) {
                return Err(HarnessError::config(
                    "output.sweep_m",
                    "orders must be at least 2 and strictly increasing",
                ));
            }
        }
        if self.output.oracle_grid < 3 {
            return Err(HarnessError::config("output.oracle_grid", "must be at least 3"));
        }
        for (field, path) in [("output.report", &self.output.report), ("output.csv", &self.output.csv)] {
            if let Some(p) = path {
                check_writable(field, p)?;
            }
        }
        Ok(Prepared {
            gallery,
            domain,
            solver,
        })
    }
}

fn check_writable(field: &str, path: &Path) -> Result<(), HarnessError> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !parent.is_dir() {
        return Err(HarnessError::config(
            field,
            format!("directory {} does not exist", parent.display()),
        ));
    }
    if path.is_dir() {
        return Err(HarnessError::config(
            field,
            format!("{} is a directory", path.display()),
        ));
    }
    Ok(())
}
