use std::path::PathBuf;

use parareal_cg::analysis::{self, GridPolicy};
use parareal_cg::newton::JacobianMode;
use parareal_cg::parareal::{self, ParealConfig};
use parareal_cg::problems::{build_burgers, spd_catalog, IvpProblem, KeplerProblem, SpdParams};
use parareal_cg::propagators::CgSolver;
use parareal_cg::{Error, Propagator};

use crate::manifest::{parse_spec, Manifest};
use crate::output::{write_table, Cell, Table};
use crate::{experiments, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Mmin,
    Run,
    Experiment,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Mmin => "mmin",
            Command::Run => "run",
            Command::Experiment => "experiment",
        }
    }
}

/// Values given on the command line; each replaces the manifest key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub tol: Option<f64>,
    pub experiment: Option<String>,
}

impl Overrides {
    pub fn apply(&self, m: &mut Manifest) {
        if let Some(v) = &self.out {
            m.out = Some(v.clone());
        }
        if let Some(v) = self.seed {
            m.seed = Some(v);
        }
        if let Some(v) = self.workers {
            m.workers = Some(v);
        }
        if let Some(v) = self.tol {
            m.tol = Some(v);
        }
        if let Some(v) = &self.experiment {
            m.experiment = Some(v.clone());
        }
    }
}

/// Builds the table for `cmd`; nothing is written.
pub fn build_table(cmd: Command, m: &Manifest) -> Result<Table, CliError> {
    if let Some(c) = &m.command {
        if c != cmd.name() {
            return Err(CliError::Manifest(format!(
                "manifest is for `{c}`, invoked as `{}`",
                cmd.name()
            )));
        }
    }
    match cmd {
        Command::Analyze => analyze(m),
        Command::Mmin => mmin(m),
        Command::Run => run(m),
        Command::Experiment => experiments::experiment(m),
    }
}

/// Runs `cmd` and writes the CSV to the manifest's `out` path, or returns
/// the bytes when there is none.
pub fn execute(cmd: Command, m: &Manifest) -> Result<Option<Vec<u8>>, CliError> {
    let table = build_table(cmd, m)?;
    match &m.out {
        Some(path) => {
            write_table(path, &table)?;
            Ok(None)
        }
        None => table.to_csv().map(Some),
    }
}

fn z_samples(m: &Manifest) -> Result<Vec<f64>, CliError> {
    if let Some(z) = &m.z_values {
        if z.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(CliError::Manifest("z_values must be finite and >= 0".into()));
        }
        return Ok(z.clone());
    }
    let lo = m.z_min.unwrap_or(1e-2);
    let hi = m.z_max.unwrap_or(1e4);
    let n = m.z_points.unwrap_or(121);
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n < 2 {
        return Err(CliError::Manifest(format!(
            "need 0 < z_min < z_max and z_points >= 2, got [{lo}, {hi}] with {n} points"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut z: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    z[0] = lo;
    z[n - 1] = hi;
    Ok(z)
}

/// `|R(z)|` and `K(z)` for each propagator on a list of `z`.
pub fn analyze(m: &Manifest) -> Result<Table, CliError> {
    let specs = m.specs.as_deref().unwrap_or_default();
    if specs.is_empty() {
        return Err(CliError::Manifest("analyze needs a non-empty `specs` list".into()));
    }
    let props = specs
        .iter()
        .map(|s| {
            let spec = parse_spec(s)?;
            Propagator::new(spec).map_err(CliError::solver(s.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let z = z_samples(m)?;

    let mut header = vec!["z".to_string()];
    for p in &props {
        let label = p.spec().label();
        header.push(format!("abs_R_{label}"));
        header.push(format!("K_{label}"));
    }
    let mut table = Table::new(header);
    for &zi in &z {
        let mut row = vec![Cell::Float(zi)];
        for p in &props {
            let r = p.stability(zi).map(f64::abs).unwrap_or(f64::INFINITY);
            row.push(Cell::Float(r));
            row.push(Cell::Float(analysis::contraction_with(p, zi)));
        }
        table.push(row);
    }
    Ok(table)
}

/// `m_min` with its branch and endpoint condition for each `z_max`.
pub fn mmin(m: &Manifest) -> Result<Table, CliError> {
    let z = m
        .z_values
        .as_deref()
        .filter(|z| !z.is_empty())
        .ok_or_else(|| CliError::Manifest("mmin needs a non-empty `z_values` list".into()))?;
    let mut table = Table::new(["z_max", "m_min", "branch", "condition_value", "threshold"]);
    for &zi in z {
        let r = analysis::m_min(zi).map_err(CliError::solver(format!("z_max = {zi}")))?;
        table.push(vec![
            r.z_max.into(),
            r.m_min.into(),
            r.branch.name().into(),
            r.condition_value.into(),
            r.threshold.into(),
        ]);
    }
    Ok(table)
}

/// The problem named in the manifest; `t_final` replaces its default horizon.
pub fn build_problem(m: &Manifest) -> Result<IvpProblem, CliError> {
    let name = m.problem.as_deref().unwrap_or("diag-spectrum");
    let ctx = || format!("problem `{name}`");
    let mut p = match name {
        "dahlquist" => IvpProblem::dahlquist(m.lambda.unwrap_or(1.0), 1.0, 1.0),
        "diag-spectrum" | "laplacian-1d" => {
            let d = SpdParams::default();
            let params = SpdParams {
                m: m.m.unwrap_or(d.m),
                lambda_min: m.lambda_min.unwrap_or(d.lambda_min),
                lambda_max: m.lambda_max.unwrap_or(d.lambda_max),
                u0: None,
                t_final: m.t_final.unwrap_or(d.t_final),
            };
            spd_catalog(name, &params).map_err(CliError::solver(ctx()))?.to_ivp()
        }
        "kepler" => KeplerProblem::default().to_ivp(),
        "burgers" => {
            let nx = match (m.nx, m.dx) {
                (Some(nx), _) => nx,
                (None, Some(dx)) => experiments::nx_for(dx)?,
                (None, None) => 8,
            };
            build_burgers(m.nu.unwrap_or(0.05), nx)
                .map_err(CliError::solver(ctx()))?
                .to_ivp()
        }
        other => return Err(CliError::Manifest(format!("unknown problem `{other}`"))),
    };
    if let Some(t) = m.t_final {
        p.t_final = t;
    }
    Ok(p)
}

/// Subinterval count from `n`, or from `t_final / dt` when that is an integer.
pub fn subintervals(t_final: f64, n: Option<usize>, dt: Option<f64>) -> Result<usize, CliError> {
    if let Some(n) = n {
        return Ok(n);
    }
    let Some(dt) = dt else {
        return Ok(10);
    };
    let ratio = t_final / dt;
    let n = ratio.round();
    if !(dt > 0.0) || (ratio - n).abs() > 1e-9 * ratio.max(1.0) || n < 1.0 {
        return Err(CliError::Manifest(format!(
            "dt = {dt} does not divide t_final = {t_final}"
        )));
    }
    Ok(n as usize)
}

/// Parareal settings shared by `run` and the experiments.
pub fn parareal_config(
    m: &Manifest,
    t_final: f64,
    n: usize,
    coarse: &str,
    fine: parareal_cg::PropagatorSpec,
) -> Result<ParealConfig, CliError> {
    let coarse = parse_spec(m.coarse.as_deref().unwrap_or(coarse))?;
    let mut cfg = ParealConfig::new(t_final, n, coarse, fine);
    if let Some(tol) = m.tol {
        cfg.tol = tol;
    }
    if let Some(k) = m.max_k {
        cfg.max_k = k;
    }
    cfg.init = m.init()?;
    cfg.workers = m.workers.unwrap_or(0);
    Ok(cfg)
}

/// Per-iteration errors of one parareal run.
pub fn run(m: &Manifest) -> Result<Table, CliError> {
    let problem = build_problem(m)?;
    let n = subintervals(problem.t_final, m.n, m.dt)?;
    let fine = parse_spec(m.fine.as_deref().unwrap_or("cg:8"))?;
    let fine = m.tune(fine, CgSolver::Auto, JacobianMode::FiniteDifference)?;
    let cfg = parareal_config(m, problem.t_final, n, "euler:1", fine)?;
    let ctx = format!("run {} with {}", problem.name, cfg.fine);
    let history = match parareal::run(&cfg, &problem) {
        Ok(out) => out.history,
        Err(Error::MaxIterationsExceeded { history, .. }) => {
            eprintln!("warning: {ctx}: not converged after {} iterations", history.len());
            history
        }
        Err(e) => return Err(CliError::solver(ctx)(e)),
    };
    let with_abs = problem.reference.is_some();
    let mut header = vec!["k", "iter_error"];
    if with_abs {
        header.push("abs_error");
    }
    header.push("unconverged_fine");
    let mut table = Table::new(header);
    for r in &history {
        let mut row = vec![r.k.into(), r.iter_error.into()];
        if with_abs {
            row.push(r.abs_error.unwrap_or(f64::NAN).into());
        }
        row.push(r.unconverged_fine.into());
        table.push(row);
    }
    Ok(table)
}

/// Refined `rho` over `[0, z_max]` for a propagator.
pub fn rho(spec: &str, z_max: f64) -> Result<f64, CliError> {
    let spec = parse_spec(spec)?;
    analysis::rho_over_interval(&spec, z_max, &GridPolicy::default())
        .map(|r| r.rho)
        .map_err(CliError::solver(format!("rho for {spec}")))
}
