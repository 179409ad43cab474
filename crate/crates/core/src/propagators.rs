//! One-step time integrators with a uniform "advance over `dT`" contract, used
//! in both the coarse and the fine role, and their linear stability functions.
//!
//! Stability functions follow the convention of the test equation
//! `u' = -lambda u` with `z = lambda * dT >= 0`; a method with `J` substeps
//! has `R(z) = r(z / J)^J` where `r` is its one-step factor.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::chebyshev::{build_operator, cg_points, CollocationOperator};
use crate::collocation::{solve_linear, solve_nonlinear, solve_nonlinear_newton, PicardConfig};
use crate::error::{Error, Result};
use crate::newton::{newton_solve, JacobianMode, NewtonConfig};
use crate::problems::IvpProblem;

/// `gamma = 2 - sqrt(2)` for the TR/BDF2 splitting.
pub const TR_BDF2_GAMMA: f64 = 2.0 - std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropagatorKind {
    BackwardEuler,
    ForwardEuler,
    Trapezoidal,
    TrBdf2,
    /// Two-stage Gauss-Legendre implicit Runge-Kutta, order 4.
    Gauss4,
    /// Classical explicit Runge-Kutta, order 4.
    Erk4,
    /// Chebyshev-Gauss spectral collocation over the whole step.
    ChebyshevGauss,
}

impl PropagatorKind {
    pub const ALL: [PropagatorKind; 7] = [
        PropagatorKind::BackwardEuler,
        PropagatorKind::ForwardEuler,
        PropagatorKind::Trapezoidal,
        PropagatorKind::TrBdf2,
        PropagatorKind::Gauss4,
        PropagatorKind::Erk4,
        PropagatorKind::ChebyshevGauss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropagatorKind::BackwardEuler => "euler",
            PropagatorKind::ForwardEuler => "feuler",
            PropagatorKind::Trapezoidal => "tr",
            PropagatorKind::TrBdf2 => "trbdf2",
            PropagatorKind::Gauss4 => "gauss4",
            PropagatorKind::Erk4 => "erk4",
            PropagatorKind::ChebyshevGauss => "cg",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    fn is_implicit(self) -> bool {
        !matches!(
            self,
            PropagatorKind::ForwardEuler | PropagatorKind::Erk4 | PropagatorKind::ChebyshevGauss
        )
    }
}

/// How the collocation propagator resolves nonlinear problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CgSolver {
    #[default]
    Picard,
    Newton,
    /// Picard, retried with Newton when Picard diverges or stalls.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorSpec {
    pub kind: PropagatorKind,
    /// Substeps `J` per advance; ignored by `ChebyshevGauss`.
    pub substeps: usize,
    /// Highest collocation node index `M` (`M + 1` nodes); `ChebyshevGauss` only.
    pub cg_points: usize,
    pub newton: NewtonConfig,
    pub picard: PicardConfig,
    pub cg_solver: CgSolver,
}

impl PropagatorSpec {
    pub fn new(kind: PropagatorKind, substeps: usize) -> Self {
        Self {
            kind,
            substeps,
            cg_points: 0,
            newton: NewtonConfig::default(),
            picard: PicardConfig::default(),
            cg_solver: CgSolver::Picard,
        }
    }

    pub fn backward_euler(substeps: usize) -> Self {
        Self::new(PropagatorKind::BackwardEuler, substeps)
    }

    pub fn forward_euler(substeps: usize) -> Self {
        Self::new(PropagatorKind::ForwardEuler, substeps)
    }

    pub fn trapezoidal(substeps: usize) -> Self {
        Self::new(PropagatorKind::Trapezoidal, substeps)
    }

    pub fn tr_bdf2(substeps: usize) -> Self {
        Self::new(PropagatorKind::TrBdf2, substeps)
    }

    pub fn gauss4(substeps: usize) -> Self {
        Self::new(PropagatorKind::Gauss4, substeps)
    }

    pub fn erk4(substeps: usize) -> Self {
        Self::new(PropagatorKind::Erk4, substeps)
    }

    pub fn chebyshev_gauss(m: usize) -> Self {
        Self {
            cg_points: m,
            ..Self::new(PropagatorKind::ChebyshevGauss, 1)
        }
    }

    pub fn with_newton(mut self, newton: NewtonConfig) -> Self {
        self.newton = newton;
        self
    }

    pub fn with_picard(mut self, picard: PicardConfig) -> Self {
        self.picard = picard;
        self
    }

    pub fn with_cg_solver(mut self, solver: CgSolver) -> Self {
        self.cg_solver = solver;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.substeps == 0 {
            return Err(Error::InvalidParams("substeps J must be >= 1".into()));
        }
        if self.kind.is_implicit() {
            self.newton.validate()?;
        }
        if self.kind == PropagatorKind::ChebyshevGauss {
            self.picard.validate()?;
        }
        Ok(())
    }

    /// Effective number of substeps.
    pub fn steps(&self) -> usize {
        match self.kind {
            PropagatorKind::ChebyshevGauss => 1,
            _ => self.substeps,
        }
    }

    /// Short label such as `cg(M=6)` or `euler(J=2)`.
    pub fn label(&self) -> String {
        match self.kind {
            PropagatorKind::ChebyshevGauss => format!("cg(M={})", self.cg_points),
            k => format!("{}(J={})", k.name(), self.substeps),
        }
    }
}

impl fmt::Display for PropagatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// One-step stability factor `r(z)` of each kind (collocation excluded).
pub fn one_step_factor(kind: PropagatorKind, z: f64) -> f64 {
    match kind {
        PropagatorKind::BackwardEuler => 1.0 / (1.0 + z),
        PropagatorKind::ForwardEuler => 1.0 - z,
        PropagatorKind::Trapezoidal => (1.0 - 0.5 * z) / (1.0 + 0.5 * z),
        PropagatorKind::TrBdf2 => {
            let g = TR_BDF2_GAMMA;
            let trapezoid = (1.0 - 0.5 * g * z) / (1.0 + 0.5 * g * z);
            let bdf = 1.0 + z * (1.0 - g) / (2.0 - g);
            (trapezoid - (1.0 - g).powi(2)) / (g * (2.0 - g) * bdf)
        }
        PropagatorKind::Gauss4 => (z * z - 6.0 * z + 12.0) / (z * z + 6.0 * z + 12.0),
        PropagatorKind::Erk4 => 1.0 - z + z * z / 2.0 - z.powi(3) / 6.0 + z.powi(4) / 24.0,
        PropagatorKind::ChebyshevGauss => unreachable!("collocation has no one-step factor"),
    }
}

/// Collocation stability function
/// `R(z, M) = 1^T (I2 - z C_alpha (I1 + z T1 C_alpha)^{-1} T1) E`.
pub fn cg_stability(op: &CollocationOperator, z: f64) -> Result<f64> {
    let n = op.nodes();
    let system = DMatrix::identity(n, n) + op.t1_c_alpha() * z;
    // T1 E is the first column of T1, all ones.
    let rhs = DVector::from_element(n, 1.0);
    let x = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular(format!("stability function pole, M = {}, z = {z}", op.m())))?;
    let r = 1.0 - z * (op.c_alpha() * x).sum();
    if !r.is_finite() {
        return Err(Error::Singular(format!(
            "stability function pole, M = {}, z = {z}",
            op.m()
        )));
    }
    Ok(r)
}

/// A propagator ready to run: the spec plus any precomputed operator.
#[derive(Debug, Clone)]
pub struct Propagator {
    spec: PropagatorSpec,
    op: Option<Arc<CollocationOperator>>,
}

impl Propagator {
    pub fn new(spec: PropagatorSpec) -> Result<Self> {
        spec.validate()?;
        let op = (spec.kind == PropagatorKind::ChebyshevGauss)
            .then(|| Arc::new(build_operator(spec.cg_points)));
        Ok(Self { spec, op })
    }

    pub fn spec(&self) -> &PropagatorSpec {
        &self.spec
    }

    pub fn operator(&self) -> Option<&CollocationOperator> {
        self.op.as_deref()
    }

    /// Stability function `R(z)` for `z >= 0`.
    pub fn stability(&self, z: f64) -> Result<f64> {
        if !(z >= 0.0) {
            return Err(Error::Domain(format!("stability needs z >= 0, got {z}")));
        }
        match &self.op {
            Some(op) => cg_stability(op, z),
            None => {
                let j = self.spec.substeps;
                Ok(one_step_factor(self.spec.kind, z / j as f64).powi(j as i32))
            }
        }
    }

    /// State at `t + dt` starting from `u` at `t`.
    pub fn advance(&self, problem: &IvpProblem, t: f64, u: &DVector<f64>, dt: f64) -> Result<DVector<f64>> {
        self.advance_with_status(problem, t, u, dt).map(|(v, _)| v)
    }

    /// Like [`Propagator::advance`], also reporting whether every inner
    /// iteration converged (only an accepted, unconverged Picard solve can
    /// make this `false`).
    pub fn advance_with_status(
        &self,
        problem: &IvpProblem,
        t: f64,
        u: &DVector<f64>,
        dt: f64,
    ) -> Result<(DVector<f64>, bool)> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("step must be positive, got {dt}")));
        }
        if u.len() != problem.dim {
            return Err(Error::DimensionMismatch {
                expected: problem.dim,
                got: u.len(),
            });
        }
        if let Some(op) = &self.op {
            return self.advance_collocation(op, problem, t, u, dt);
        }
        let j = self.spec.substeps;
        let h = dt / j as f64;
        let mut state = u.clone();
        for step in 0..j {
            let ts = t + step as f64 * h;
            state = self.one_step(problem, ts, &state, h)?;
        }
        Ok((state, true))
    }

    fn advance_collocation(
        &self,
        op: &CollocationOperator,
        problem: &IvpProblem,
        t: f64,
        u: &DVector<f64>,
        dt: f64,
    ) -> Result<(DVector<f64>, bool)> {
        let points = cg_points(op.m(), t, t + dt)?;
        let sol = if let Some(lin) = &problem.linear {
            solve_linear(op, &lin.a, &|s| lin.forcing(s), &points, u)?
        } else {
            let mode = self.spec.newton.jacobian;
            let jac = |s: f64, v: &DVector<f64>| problem.jacobian_at(s, v, mode);
            let newton = || solve_nonlinear_newton(op, &*problem.f, &jac, &points, u, &self.spec.newton);
            match self.spec.cg_solver {
                CgSolver::Picard => solve_nonlinear(op, &*problem.f, &points, u, &self.spec.picard)?,
                CgSolver::Newton => newton()?,
                CgSolver::Auto => match solve_nonlinear(op, &*problem.f, &points, u, &self.spec.picard) {
                    Ok(sol) if sol.converged => sol,
                    Ok(_) | Err(Error::PicardNonConvergence { .. }) | Err(Error::NonFiniteRhs { .. }) => newton()?,
                    Err(e) => return Err(e),
                },
            }
        };
        Ok((sol.u_end, sol.converged))
    }

    fn jacobian_mode(&self, problem: &IvpProblem) -> JacobianMode {
        if problem.linear.is_some() {
            JacobianMode::Analytic
        } else {
            self.spec.newton.jacobian
        }
    }

    /// Solves `y = base + beta * f(t, y)` by Newton from the guess `y0`.
    fn implicit_solve(
        &self,
        problem: &IvpProblem,
        t: f64,
        base: &DVector<f64>,
        beta: f64,
        y0: DVector<f64>,
    ) -> Result<DVector<f64>> {
        let mode = self.jacobian_mode(problem);
        let n = problem.dim;
        newton_solve(
            y0,
            |y| y - base - problem.rhs(t, y) * beta,
            |y| DMatrix::identity(n, n) - problem.jacobian_at(t, y, mode) * beta,
            &self.spec.newton,
        )
        .map(|(y, _)| y)
    }

    fn one_step(&self, problem: &IvpProblem, t: f64, u: &DVector<f64>, h: f64) -> Result<DVector<f64>> {
        match self.spec.kind {
            PropagatorKind::ForwardEuler => Ok(u + problem.rhs(t, u) * h),
            PropagatorKind::Erk4 => {
                let k1 = problem.rhs(t, u);
                let k2 = problem.rhs(t + 0.5 * h, &(u + &k1 * (0.5 * h)));
                let k3 = problem.rhs(t + 0.5 * h, &(u + &k2 * (0.5 * h)));
                let k4 = problem.rhs(t + h, &(u + &k3 * h));
                Ok(u + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
            }
            PropagatorKind::BackwardEuler => self.implicit_solve(problem, t + h, u, h, u.clone()),
            PropagatorKind::Trapezoidal => {
                let f0 = problem.rhs(t, u);
                let base = u + &f0 * (0.5 * h);
                self.implicit_solve(problem, t + h, &base, 0.5 * h, u + f0 * h)
            }
            PropagatorKind::TrBdf2 => {
                let g = TR_BDF2_GAMMA;
                let f0 = problem.rhs(t, u);
                let base = u + &f0 * (0.5 * g * h);
                let mid = self.implicit_solve(problem, t + g * h, &base, 0.5 * g * h, u + f0 * (g * h))?;
                let w = g * (2.0 - g);
                let base2 = (&mid - u * (1.0 - g).powi(2)) / w;
                let beta = h * (1.0 - g) / (2.0 - g);
                self.implicit_solve(problem, t + h, &base2, beta, mid)
            }
            PropagatorKind::Gauss4 => self.gauss4_step(problem, t, u, h),
            PropagatorKind::ChebyshevGauss => unreachable!("handled by advance_collocation"),
        }
    }

    fn gauss4_step(&self, problem: &IvpProblem, t: f64, u: &DVector<f64>, h: f64) -> Result<DVector<f64>> {
        let r3 = 3f64.sqrt() / 6.0;
        let c = [0.5 - r3, 0.5 + r3];
        let a = [[0.25, 0.25 - r3], [0.25 + r3, 0.25]];
        let n = problem.dim;
        let mode = self.jacobian_mode(problem);

        let stage_states = |k: &DVector<f64>| -> [DVector<f64>; 2] {
            let k1 = k.rows(0, n);
            let k2 = k.rows(n, n);
            [
                u + k1 * (h * a[0][0]) + k2 * (h * a[0][1]),
                u + k1 * (h * a[1][0]) + k2 * (h * a[1][1]),
            ]
        };

        let f0 = problem.rhs(t, u);
        let mut k0 = DVector::zeros(2 * n);
        k0.rows_mut(0, n).copy_from(&f0);
        k0.rows_mut(n, n).copy_from(&f0);

        let (k, _) = newton_solve(
            k0,
            |k| {
                let y = stage_states(k);
                let mut r = k.clone();
                for i in 0..2 {
                    let mut block = r.rows_mut(i * n, n);
                    block -= problem.rhs(t + c[i] * h, &y[i]);
                }
                r
            },
            |k| {
                let y = stage_states(k);
                let mut jm = DMatrix::identity(2 * n, 2 * n);
                for i in 0..2 {
                    let local = problem.jacobian_at(t + c[i] * h, &y[i], mode);
                    for j in 0..2 {
                        let mut block = jm.view_mut((i * n, j * n), (n, n));
                        block -= &local * (h * a[i][j]);
                    }
                }
                jm
            },
            &self.spec.newton,
        )?;
        Ok(u + (k.rows(0, n) + k.rows(n, n)) * (0.5 * h))
    }
}

/// Advances `u` from `t_n` over `dt` with a freshly built propagator.
pub fn advance(
    spec: &PropagatorSpec,
    problem: &IvpProblem,
    t_n: f64,
    u_n: &DVector<f64>,
    dt: f64,
) -> Result<DVector<f64>> {
    Propagator::new(spec.clone())?.advance(problem, t_n, u_n, dt)
}

/// Stability function of `spec` at `z >= 0`.
pub fn stability(spec: &PropagatorSpec, z: f64) -> Result<f64> {
    Propagator::new(spec.clone())?.stability(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn scalar(x: f64) -> DVector<f64> {
        DVector::from_element(1, x)
    }

    fn all_specs() -> Vec<PropagatorSpec> {
        vec![
            PropagatorSpec::backward_euler(3),
            PropagatorSpec::forward_euler(3),
            PropagatorSpec::trapezoidal(2),
            PropagatorSpec::tr_bdf2(2),
            PropagatorSpec::gauss4(2),
            PropagatorSpec::erk4(1),
            PropagatorSpec::chebyshev_gauss(0),
            PropagatorSpec::chebyshev_gauss(5),
        ]
    }

    #[test]
    fn backward_euler_single_step() {
        let p = IvpProblem::dahlquist(1.0, 1.0, 1.0);
        let v = advance(&PropagatorSpec::backward_euler(1), &p, 0.0, &scalar(1.0), 1.0).unwrap();
        assert_abs_diff_eq!(v[0], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn trapezoidal_single_step() {
        let p = IvpProblem::dahlquist(1.0, 1.0, 1.0);
        let v = advance(&PropagatorSpec::trapezoidal(1), &p, 0.0, &scalar(1.0), 1.0).unwrap();
        assert_abs_diff_eq!(v[0], 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn gauss4_two_steps() {
        let p = IvpProblem::dahlquist(1.0, 1.0, 1.0);
        let v = advance(&PropagatorSpec::gauss4(2), &p, 0.0, &scalar(1.0), 1.0).unwrap();
        let r: f64 = 9.25 / 15.25;
        assert_abs_diff_eq!(v[0], r * r, epsilon = 1e-14);
    }

    #[test]
    fn stability_examples() {
        let cg0 = PropagatorSpec::chebyshev_gauss(0);
        assert_abs_diff_eq!(stability(&cg0, 1.0).unwrap(), 1.0 / 3.0, epsilon = 1e-14);
        let cg1 = PropagatorSpec::chebyshev_gauss(1);
        assert_abs_diff_eq!(stability(&cg1, 2.0).unwrap(), 1.0 / 9.0, epsilon = 1e-14);
        let cg20 = PropagatorSpec::chebyshev_gauss(20);
        assert_abs_diff_eq!(stability(&cg20, 3.0).unwrap(), (-3.0f64).exp(), epsilon = 1e-10);
        let be4 = PropagatorSpec::backward_euler(4);
        assert_abs_diff_eq!(stability(&be4, 2.0).unwrap(), (2.0f64 / 3.0).powi(4), epsilon = 1e-15);
    }

    #[test]
    fn stability_rejects_negative() {
        assert!(matches!(
            stability(&PropagatorSpec::trapezoidal(1), -0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn advance_realizes_stability() {
        for spec in all_specs() {
            let prop = Propagator::new(spec.clone()).unwrap();
            for z in [0.1, 0.5, 1.0, 2.0, 5.0] {
                let p = IvpProblem::dahlquist(z, 1.0, 1.0);
                let v = prop.advance(&p, 0.0, &scalar(1.0), 1.0).unwrap();
                let r = prop.stability(z).unwrap();
                assert!((v[0] - r).abs() < 1e-10, "{spec} z={z}: {} vs {r}", v[0]);
            }
        }
    }

    #[test]
    fn nonlinear_paths_realize_stability() {
        // black-box f: implicit kinds go through finite-difference Newton
        for spec in all_specs() {
            let prop = Propagator::new(spec.clone().with_cg_solver(CgSolver::Newton)).unwrap();
            for z in [0.1, 0.5, 1.0] {
                let p = IvpProblem::dahlquist(z, 1.0, 1.0).as_nonlinear();
                let v = prop.advance(&p, 0.0, &scalar(1.0), 1.0).unwrap();
                let r = prop.stability(z).unwrap();
                assert!((v[0] - r).abs() < 1e-10, "{spec} z={z}: {} vs {r}", v[0]);
            }
        }
    }

    #[test]
    fn auto_solver_falls_back_to_newton() {
        // z = 4 is past the Picard limit for M = 0
        let p = IvpProblem::dahlquist(4.0, 1.0, 1.0).as_nonlinear();
        let picard = Propagator::new(PropagatorSpec::chebyshev_gauss(0)).unwrap();
        assert!(picard.advance(&p, 0.0, &scalar(1.0), 1.0).is_err());
        let auto = Propagator::new(PropagatorSpec::chebyshev_gauss(0).with_cg_solver(CgSolver::Auto)).unwrap();
        let v = auto.advance(&p, 0.0, &scalar(1.0), 1.0).unwrap();
        assert_abs_diff_eq!(v[0], -1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_at_zero() {
        for spec in all_specs() {
            assert_abs_diff_eq!(stability(&spec, 0.0).unwrap(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn a_stability_spot_checks() {
        let zs = [0.01, 0.3, 1.0, 3.0, 10.0, 100.0, 1e4];
        let stable = [
            PropagatorSpec::backward_euler(1),
            PropagatorSpec::trapezoidal(1),
            PropagatorSpec::tr_bdf2(1),
            PropagatorSpec::gauss4(1),
        ];
        for spec in stable {
            for z in zs {
                assert!(stability(&spec, z).unwrap().abs() < 1.0, "{spec} z={z}");
            }
        }
        for m in [0, 1, 2, 4, 8, 16, 32] {
            let prop = Propagator::new(PropagatorSpec::chebyshev_gauss(m)).unwrap();
            for z in zs {
                assert!(prop.stability(z).unwrap().abs() < 1.0, "M={m} z={z}");
            }
        }
        assert!(stability(&PropagatorSpec::forward_euler(1), 3.0).unwrap().abs() > 1.0);
        assert!(stability(&PropagatorSpec::erk4(1), 3.0).unwrap().abs() > 1.0);
    }

    #[test]
    fn cg_limit_at_infinity() {
        for m in [0, 1, 2, 4, 20] {
            let r = stability(&PropagatorSpec::chebyshev_gauss(m), 1e8).unwrap();
            assert!((r.abs() - 1.0).abs() < 1e-3, "M={m}: {r}");
        }
    }

    #[test]
    fn tr_bdf2_factor_matches_stage_algebra() {
        // compose the two stages by hand for the scalar test equation
        let g = TR_BDF2_GAMMA;
        for z in [0.2, 1.0, 7.0] {
            let mid = (1.0 - g * z / 2.0) / (1.0 + g * z / 2.0);
            let w = g * (2.0 - g);
            let end = ((mid - (1.0 - g) * (1.0 - g)) / w) / (1.0 + z * (1.0 - g) / (2.0 - g));
            assert_abs_diff_eq!(one_step_factor(PropagatorKind::TrBdf2, z), end, epsilon = 1e-15);
        }
        // second order: r(z) = 1 - z + z^2/2 + O(z^3)
        let z: f64 = 1e-3;
        let r = one_step_factor(PropagatorKind::TrBdf2, z);
        assert!((r - (1.0 - z + z * z / 2.0)).abs() < 1e-9);
    }

    #[test]
    fn orders_of_accuracy() {
        // u' = -u on [0, 1]; halving h divides the error by 2^p
        let p = IvpProblem::dahlquist(1.0, 1.0, 1.0).as_nonlinear();
        let exact = (-1.0f64).exp();
        for (kind, order) in [
            (PropagatorKind::BackwardEuler, 1),
            (PropagatorKind::ForwardEuler, 1),
            (PropagatorKind::Trapezoidal, 2),
            (PropagatorKind::TrBdf2, 2),
            (PropagatorKind::Gauss4, 4),
            (PropagatorKind::Erk4, 4),
        ] {
            let err = |j| {
                let v = advance(&PropagatorSpec::new(kind, j), &p, 0.0, &scalar(1.0), 1.0).unwrap();
                (v[0] - exact).abs()
            };
            let ratio = err(8) / err(16);
            let want = 2f64.powi(order);
            assert!((ratio / want - 1.0).abs() < 0.15, "{kind:?}: ratio {ratio}");
        }
    }

    #[test]
    fn time_dependent_forcing() {
        // u' = cos t, u(0) = 0 -> sin t
        let p = IvpProblem::new("cos", scalar(0.0), 1.0, |t, _u| DVector::from_element(1, t.cos()));
        for spec in [PropagatorSpec::gauss4(16), PropagatorSpec::erk4(16), PropagatorSpec::chebyshev_gauss(10)] {
            let v = advance(&spec, &p, 0.2, &scalar(0.2f64.sin()), 0.8).unwrap();
            assert!((v[0] - 1f64.sin()).abs() < 1e-7, "{spec}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = IvpProblem::dahlquist(1.0, 1.0, 1.0);
        let prop = Propagator::new(PropagatorSpec::backward_euler(1)).unwrap();
        assert!(prop.advance(&p, 0.0, &scalar(1.0), 0.0).is_err());
        assert!(prop.advance(&p, 0.0, &DVector::zeros(2), 1.0).is_err());
        assert!(Propagator::new(PropagatorSpec::backward_euler(0)).is_err());
    }

    #[test]
    fn names_roundtrip() {
        for k in PropagatorKind::ALL {
            assert_eq!(PropagatorKind::from_name(k.name()), Some(k));
        }
        assert_eq!(PropagatorSpec::chebyshev_gauss(6).label(), "cg(M=6)");
        assert_eq!(PropagatorSpec::gauss4(6).label(), "gauss4(J=6)");
    }
}
