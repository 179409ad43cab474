//! Convergence behavior of the parareal driver on the SPD and Kepler cases.

use nalgebra::DVector;
use parareal_cg::analysis;
use parareal_cg::parareal::{run, Initialization, ParealConfig, Parareal};
use parareal_cg::problems::{spd_catalog, IvpProblem, KeplerProblem, SpdParams};
use parareal_cg::propagators::CgSolver;
use parareal_cg::PropagatorSpec;

fn diag_problem(dim: usize, t_final: f64) -> IvpProblem {
    let params = SpdParams {
        m: dim,
        lambda_min: 1.0,
        lambda_max: 100.0,
        u0: None,
        t_final,
    };
    spd_catalog("diag-spectrum", &params).unwrap().to_ivp()
}

fn errors(cfg: &ParealConfig, p: &IvpProblem) -> Vec<f64> {
    run(cfg, p).unwrap().history.iter().map(|r| r.iter_error).collect()
}

#[test]
fn spd_ratio_and_monotone_tail() {
    let (t, n) = (10.0, 40);
    let m = analysis::m_min(100.0 * t / n as f64).unwrap().m_min;
    let p = diag_problem(20, t);
    let mut cfg = ParealConfig::new(t, n, PropagatorSpec::backward_euler(1), PropagatorSpec::chebyshev_gauss(m));
    cfg.tol = 1e-12;
    for init in [Initialization::CoarseSweep, Initialization::Random(3)] {
        cfg.init = init;
        let e = errors(&cfg, &p);
        assert!(*e.last().unwrap() <= cfg.tol, "{init:?}: {e:?}");
        for w in e.windows(2).skip(1) {
            assert!(w[1] <= w[0], "{init:?}: tail not monotone {e:?}");
            if w[0] > 1e-11 {
                assert!(w[1] / w[0] <= 0.35, "{init:?}: ratio {} in {e:?}", w[1] / w[0]);
            }
        }
    }
}

#[test]
fn converged_solution_matches_serial_fine() {
    let p = diag_problem(5, 2.0);
    let cfg = ParealConfig::new(2.0, 8, PropagatorSpec::backward_euler(1), PropagatorSpec::chebyshev_gauss(6));
    let par = Parareal::new(cfg).unwrap();
    let out = par.run(&p).unwrap();
    let serial = par.serial_fine(&p).unwrap();
    for (a, b) in out.states.iter().zip(&serial) {
        assert!((a - b).amax() <= 1e-10);
    }
    let exact = (p.reference.as_ref().unwrap())(2.0);
    assert!((out.states.last().unwrap() - exact).amax() <= 1e-8);
}

#[test]
fn kepler_cg_beats_euler() {
    let k = KeplerProblem::default();
    let p = k.to_ivp();
    let run_with = |fine: PropagatorSpec| {
        let cfg = ParealConfig::new(k.t_final, 200, PropagatorSpec::backward_euler(1), fine.with_cg_solver(CgSolver::Auto));
        run(&cfg, &p).unwrap()
    };
    let cg = run_with(PropagatorSpec::chebyshev_gauss(6));
    let euler = run_with(PropagatorSpec::backward_euler(6));
    assert!(cg.iterations() <= euler.iterations());
    let last = |h: &[parareal_cg::parareal::ConvergenceRecord]| h.last().unwrap().abs_error.unwrap();
    assert!(last(&cg.history) < 1e-9);
    assert!(last(&cg.history) < last(&euler.history));
}

#[test]
fn history_is_contiguous_and_finite() {
    let p = IvpProblem::new("cubic", DVector::from_element(1, 1.0), 1.0, |_t, u| u.map(|x| -x * x * x));
    let cfg = ParealConfig::new(1.0, 5, PropagatorSpec::backward_euler(1), PropagatorSpec::chebyshev_gauss(4));
    let out = run(&cfg, &p).unwrap();
    for (i, r) in out.history.iter().enumerate() {
        assert_eq!(r.k, i + 1);
        assert!(r.iter_error.is_finite() && r.iter_error >= 0.0);
    }
    // u' = -u^3, u(0) = 1 gives u(t) = 1 / sqrt(1 + 2t)
    assert!((out.states[5][0] - 1.0 / 3f64.sqrt()).abs() < 1e-8);
}
