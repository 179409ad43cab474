//! Run manifests: a flat TOML file of optional keys. Command-line flags
//! override the corresponding keys.
//!
//! ```toml
//! out = "kepler.csv"
//! experiment = "kepler-compare"
//! tol = 1e-10
//! workers = 4
//! ```

use std::path::{Path, PathBuf};

use parareal_cg::newton::JacobianMode;
use parareal_cg::parareal::Initialization;
use parareal_cg::propagators::CgSolver;
use parareal_cg::{PropagatorKind, PropagatorSpec};
use serde::Deserialize;

use crate::CliError;

/// Every key a manifest may contain. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// Subcommand; when given it must match the one on the command line.
    pub command: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    /// Parareal stopping tolerance.
    pub tol: Option<f64>,

    /// Propagators for `analyze`, as `name:n` (`cg:6`, `euler:2`).
    pub specs: Option<Vec<String>>,
    /// Explicit sample points (`analyze`) or `z_max` list (`mmin`).
    pub z_values: Option<Vec<f64>>,
    pub z_min: Option<f64>,
    pub z_max: Option<f64>,
    pub z_points: Option<usize>,

    /// `dahlquist`, `diag-spectrum`, `laplacian-1d`, `kepler`, `burgers`.
    pub problem: Option<String>,
    pub lambda: Option<f64>,
    pub m: Option<usize>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub nu: Option<f64>,
    pub nx: Option<usize>,
    pub t_final: Option<f64>,
    /// Coarse step; `n` takes precedence.
    pub dt: Option<f64>,
    /// Number of coarse subintervals.
    pub n: Option<usize>,
    pub coarse: Option<String>,
    pub fine: Option<String>,
    pub max_k: Option<usize>,
    /// `coarse` or `random`.
    pub init: Option<String>,
    /// `picard`, `newton` or `auto`.
    pub cg_solver: Option<String>,
    pub picard_max_iter: Option<usize>,
    /// `analytic` or `fd`.
    pub jacobian: Option<String>,

    /// `kepler-compare`, `burgers-dt`, `burgers-dx`, `burgers-m`.
    pub experiment: Option<String>,
    /// Kepler comparison algorithms, as `name:n`.
    pub algorithms: Option<Vec<String>>,
    pub nu_values: Option<Vec<f64>>,
    /// Sweep exponents `e` for `dT = 2^-e`.
    pub dt_exponents: Option<Vec<i32>>,
    /// Sweep exponents `e` for `dx = 2^-e`.
    pub dx_exponents: Option<Vec<i32>>,
    pub m_values: Option<Vec<usize>>,
    pub dx: Option<f64>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Manifest(msg) => CliError::Manifest(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Manifest(e.to_string()))
    }

    pub fn init(&self) -> Result<Initialization, CliError> {
        match self.init.as_deref().unwrap_or("coarse") {
            "coarse" => Ok(Initialization::CoarseSweep),
            "random" => Ok(Initialization::Random(self.seed.unwrap_or(0))),
            other => Err(CliError::Manifest(format!("unknown init `{other}`"))),
        }
    }

    pub fn cg_solver(&self, default: CgSolver) -> Result<CgSolver, CliError> {
        match self.cg_solver.as_deref() {
            None => Ok(default),
            Some("picard") => Ok(CgSolver::Picard),
            Some("newton") => Ok(CgSolver::Newton),
            Some("auto") => Ok(CgSolver::Auto),
            Some(other) => Err(CliError::Manifest(format!("unknown cg_solver `{other}`"))),
        }
    }

    pub fn jacobian(&self, default: JacobianMode) -> Result<JacobianMode, CliError> {
        match self.jacobian.as_deref() {
            None => Ok(default),
            Some("analytic") => Ok(JacobianMode::Analytic),
            Some("fd") => Ok(JacobianMode::FiniteDifference),
            Some(other) => Err(CliError::Manifest(format!("unknown jacobian `{other}`"))),
        }
    }

    /// Applies solver settings from the manifest to a propagator.
    pub fn tune(&self, mut spec: PropagatorSpec, solver: CgSolver, jacobian: JacobianMode) -> Result<PropagatorSpec, CliError> {
        spec.cg_solver = self.cg_solver(solver)?;
        spec.newton.jacobian = self.jacobian(jacobian)?;
        if let Some(it) = self.picard_max_iter {
            spec.picard.max_iter = it;
        }
        Ok(spec)
    }
}

/// Parses `name:n`: `n` is `M` for `cg` and the substep count otherwise.
pub fn parse_spec(text: &str) -> Result<PropagatorSpec, CliError> {
    let bad = || CliError::Manifest(format!("bad propagator `{text}`, expected name:n such as cg:6 or euler:1"));
    let (name, n) = text.split_once(':').ok_or_else(bad)?;
    let kind = PropagatorKind::from_name(name.trim()).ok_or_else(bad)?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    let spec = match kind {
        PropagatorKind::ChebyshevGauss => PropagatorSpec::chebyshev_gauss(n),
        _ => PropagatorSpec::new(kind, n),
    };
    spec.validate().map_err(|e| CliError::Manifest(format!("`{text}`: {e}")))?;
    Ok(spec)
}
