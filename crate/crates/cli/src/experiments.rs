//! Parameter sweeps on the two-body and Burgers problems. Each experiment
//! returns one long-format table with a row per parareal iteration.

use parareal_cg::newton::JacobianMode;
use parareal_cg::parareal::{self, ConvergenceRecord};
use parareal_cg::problems::{build_burgers, KeplerProblem};
use parareal_cg::propagators::CgSolver;
use parareal_cg::PropagatorSpec;

use crate::commands::{parareal_config, subintervals};
use crate::manifest::{parse_spec, Manifest};
use crate::output::Table;
use crate::CliError;

pub const EXPERIMENTS: [&str; 4] = ["kepler-compare", "burgers-dt", "burgers-dx", "burgers-m"];

pub const KEPLER_ALGORITHMS: [&str; 4] = ["cg:6", "euler:6", "tr:6", "gauss4:6"];

pub const NU_VALUES: [f64; 2] = [0.05, 0.005];

pub fn experiment(m: &Manifest) -> Result<Table, CliError> {
    match m.experiment.as_deref() {
        Some("kepler-compare") => kepler_compare(m),
        Some("burgers-dt") => burgers(m, Sweep::Dt),
        Some("burgers-dx") => burgers(m, Sweep::Dx),
        Some("burgers-m") => burgers(m, Sweep::M),
        Some(other) => Err(CliError::Manifest(format!(
            "unknown experiment `{other}`, expected one of {}",
            EXPERIMENTS.join(", ")
        ))),
        None => Err(CliError::Manifest("missing `experiment`".into())),
    }
}

fn history(
    cfg: &parareal::ParealConfig,
    problem: &parareal_cg::problems::IvpProblem,
    ctx: String,
) -> Result<Vec<ConvergenceRecord>, CliError> {
    parareal::run(cfg, problem)
        .map(|o| o.history)
        .map_err(CliError::solver(ctx))
}

/// Parareal with several fine propagators on the low Earth orbit case.
/// Errors are measured against the analytic F&G solution, over all six
/// components and over the position only.
pub fn kepler_compare(m: &Manifest) -> Result<Table, CliError> {
    let problem = KeplerProblem {
        t_final: m.t_final.unwrap_or(50.0),
        ..Default::default()
    };
    let ivp = problem.to_ivp();
    let n = subintervals(problem.t_final, m.n, Some(m.dt.unwrap_or(0.25)))?;
    let algorithms: Vec<String> = match &m.algorithms {
        Some(a) => a.clone(),
        None => KEPLER_ALGORITHMS.iter().map(|s| s.to_string()).collect(),
    };
    let mut table = Table::new(["algorithm", "k", "iter_error", "abs_error", "abs_error_position"]);
    for name in &algorithms {
        let fine = m.tune(parse_spec(name)?, CgSolver::Auto, JacobianMode::FiniteDifference)?;
        let label = fine.label();
        let cfg = parareal_config(m, problem.t_final, n, "euler:1", fine)?;
        for r in history(&cfg, &ivp, format!("kepler-compare, {label}"))? {
            let comps = r.abs_error_components.unwrap_or_default();
            let position = comps.iter().take(3).copied().fold(0.0, f64::max);
            table.push(vec![
                label.clone().into(),
                r.k.into(),
                r.iter_error.into(),
                r.abs_error.unwrap_or(f64::NAN).into(),
                position.into(),
            ]);
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    Dt,
    Dx,
    M,
}

/// Grid size for a Burgers spacing on `[0, 2)`.
pub fn nx_for(dx: f64) -> Result<usize, CliError> {
    let nx = 2.0 / dx;
    if !(dx > 0.0) || (nx - nx.round()).abs() > 1e-9 * nx.max(1.0) {
        return Err(CliError::Manifest(format!("dx = {dx} does not divide the period 2")));
    }
    Ok(nx.round() as usize)
}

fn pow2(e: i32) -> f64 {
    2f64.powi(-e)
}

/// One sweep over `dT`, `dx` or `M` for each viscosity, other parameters
/// held at their defaults (`dx = 1/4`, `M = 4`, `dT = 1/64` for the `dx`
/// sweep and `1/32` for the `M` sweep).
pub fn burgers(m: &Manifest, sweep: Sweep) -> Result<Table, CliError> {
    let t_final = m.t_final.unwrap_or(4.0);
    let nus = m.nu_values.clone().unwrap_or_else(|| NU_VALUES.to_vec());
    let dx0 = m.dx.unwrap_or(0.25);
    let m0 = m.m.unwrap_or(4);
    let points: Vec<(f64, f64, usize)> = match sweep {
        Sweep::Dt => {
            let e = m.dt_exponents.clone().unwrap_or_else(|| (3..=8).collect());
            e.into_iter().map(|e| (pow2(e), dx0, m0)).collect()
        }
        Sweep::Dx => {
            let dt = m.dt.unwrap_or(1.0 / 64.0);
            let e = m.dx_exponents.clone().unwrap_or_else(|| (1..=5).collect());
            e.into_iter().map(|e| (dt, pow2(e), m0)).collect()
        }
        Sweep::M => {
            let dt = m.dt.unwrap_or(1.0 / 32.0);
            let ms = m.m_values.clone().unwrap_or_else(|| vec![2, 4, 8, 16, 32, 64]);
            ms.into_iter().map(|mm| (dt, dx0, mm)).collect()
        }
    };

    let mut table = Table::new(["nu", "dt", "dx", "m", "k", "iter_error", "abs_error"]);
    for &nu in &nus {
        for &(dt, dx, mm) in &points {
            let ctx = format!("burgers nu = {nu}, dt = {dt}, dx = {dx}, M = {mm}");
            let problem = build_burgers(nu, nx_for(dx)?).map_err(CliError::solver(ctx.clone()))?;
            let mut ivp = problem.to_ivp();
            ivp.t_final = t_final;
            let n = subintervals(t_final, None, Some(dt))?;
            let fine = m.tune(PropagatorSpec::chebyshev_gauss(mm), CgSolver::Auto, JacobianMode::Analytic)?;
            let cfg = parareal_config(m, t_final, n, "euler:1", fine)?;
            for r in history(&cfg, &ivp, ctx)? {
                table.push(vec![
                    nu.into(),
                    dt.into(),
                    dx.into(),
                    mm.into(),
                    r.k.into(),
                    r.iter_error.into(),
                    r.abs_error.unwrap_or(f64::NAN).into(),
                ]);
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        assert_eq!(nx_for(0.25).unwrap(), 8);
        assert_eq!(nx_for(pow2(5)).unwrap(), 64);
        assert!(nx_for(0.3).is_err());
    }

    #[test]
    fn unknown_experiment() {
        let m = Manifest {
            experiment: Some("heat".into()),
            ..Default::default()
        };
        assert!(experiment(&m).is_err());
        assert!(experiment(&Manifest::default()).is_err());
    }

    #[test]
    fn small_burgers_sweep() {
        let m = Manifest {
            nu_values: Some(vec![0.05]),
            dt_exponents: Some(vec![3]),
            ..Default::default()
        };
        let t = burgers(&m, Sweep::Dt).unwrap();
        let k = t.floats("k");
        assert_eq!(k.first(), Some(&1.0));
        for w in k.windows(2) {
            assert_eq!(w[1], w[0] + 1.0);
        }
        assert!(t.floats("iter_error").iter().all(|e| e.is_finite() && *e >= 0.0));
    }
}
