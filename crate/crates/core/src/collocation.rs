//! Chebyshev-Gauss spectral collocation on a single interval `[a, b]`.
//!
//! The solution is the degree `M + 1` polynomial
//! `u(t) = sum_l u_hat[l] T_l(2 (t - a) / (b - a) - 1)` whose derivative
//! interpolates `f(t, u(t))` at the `M + 1` Chebyshev-Gauss nodes and which
//! takes the value `u_a` at `t = a`. In matrix form, with `U0 = [u_a, 0, ..., 0]`,
//!
//! ```text
//! u_hat   = U0 + dT * C_alpha * F(u_nodes)
//! u_nodes = T1 * u_hat
//! ```
//!
//! Nonlinear problems iterate this map (Picard); linear problems solve the
//! fixed point directly. Since `T_l(1) = 1`, the value at `b` is the sum of the
//! coefficients.
//!
//! States are stored node-major: row `m` of a node matrix is the state at
//! node `m`, row `l` of a coefficient matrix holds the `l`-th Chebyshev
//! coefficient of every component.

use nalgebra::{DMatrix, DVector};

use crate::chebyshev::{CgPointSet, CollocationOperator};
use crate::error::{Error, Result};
use crate::newton::{newton_solve, NewtonConfig};

/// Output of one collocation solve.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSolution {
    /// `(M + 2) x dim` Chebyshev coefficients.
    pub u_hat: DMatrix<f64>,
    /// `(M + 1) x dim` values at the collocation nodes.
    pub u_nodes: DMatrix<f64>,
    /// State at the right endpoint.
    pub u_end: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Last max-norm change between successive node values (0 for direct solves).
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialGuess {
    /// `u_a` at every node.
    #[default]
    ConstantInitialValue,
    /// Node-major `(M + 1) x dim` guess.
    Provided(DMatrix<f64>),
}

/// What `solve_nonlinear` does when `max_iter` is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NonConvergencePolicy {
    #[default]
    Error,
    /// Return the last iterate with `converged = false`.
    Accept,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardConfig {
    /// Stop once `max |u^{p+1} - u^p| < tol * max(1, max |u^{p+1}|)`.
    pub tol: f64,
    pub max_iter: usize,
    pub initial_guess: InitialGuess,
    pub on_nonconvergence: NonConvergencePolicy,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100,
            initial_guess: InitialGuess::ConstantInitialValue,
            on_nonconvergence: NonConvergencePolicy::Error,
        }
    }
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidParams(format!(
                "Picard needs tol > 0 and max_iter >= 1, got tol={} max_iter={}",
                self.tol, self.max_iter
            )));
        }
        Ok(())
    }
}

fn check_points(op: &CollocationOperator, points: &CgPointSet) -> Result<()> {
    if points.m != op.m() {
        return Err(Error::DimensionMismatch {
            expected: op.nodes(),
            got: points.len(),
        });
    }
    Ok(())
}

/// Evaluates `f` at every node; row `m` is `f(t_m, u_nodes[m])`.
fn rhs_at_nodes<F>(f: &F, points: &CgPointSet, u_nodes: &DMatrix<f64>) -> Result<DMatrix<f64>>
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64> + ?Sized,
{
    let dim = u_nodes.ncols();
    let mut values = DMatrix::zeros(u_nodes.nrows(), dim);
    for (m, &t) in points.t.iter().enumerate() {
        let fm = f(t, &u_nodes.row(m).transpose());
        if fm.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: fm.len(),
            });
        }
        if fm.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteRhs { node: m });
        }
        values.set_row(m, &fm.transpose());
    }
    Ok(values)
}

/// Coefficients `U0 + dT * C_alpha * F`, node values and endpoint value.
///
/// `u_a` is added after the increment is formed and summed, which keeps the
/// rounding error at the scale of the increment rather than of the state.
fn assemble(
    op: &CollocationOperator,
    width: f64,
    u_a: &DVector<f64>,
    f_values: &DMatrix<f64>,
) -> (DMatrix<f64>, DMatrix<f64>, DVector<f64>) {
    let increment = op.c_alpha() * f_values * width;
    let mut u_nodes = op.t1() * &increment;
    for mut row in u_nodes.row_iter_mut() {
        row += u_a.transpose();
    }
    let u_end = u_a + increment.row_sum().transpose();
    let mut u_hat = increment;
    let mut first = u_hat.row_mut(0);
    first += u_a.transpose();
    (u_hat, u_nodes, u_end)
}

/// One Picard update from the node values `u_prev_nodes`. Returns the new
/// coefficients and node values.
pub fn picard_sweep<F>(
    op: &CollocationOperator,
    f: &F,
    points: &CgPointSet,
    u_a: &DVector<f64>,
    u_prev_nodes: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)>
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64> + ?Sized,
{
    check_points(op, points)?;
    if u_prev_nodes.shape() != (op.nodes(), u_a.len()) {
        return Err(Error::DimensionMismatch {
            expected: op.nodes() * u_a.len(),
            got: u_prev_nodes.len(),
        });
    }
    let (u_hat, u_nodes, _) = sweep(op, f, points, u_a, u_prev_nodes)?;
    Ok((u_hat, u_nodes))
}

fn sweep<F>(
    op: &CollocationOperator,
    f: &F,
    points: &CgPointSet,
    u_a: &DVector<f64>,
    u_prev_nodes: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DVector<f64>)>
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64> + ?Sized,
{
    let f_values = rhs_at_nodes(f, points, u_prev_nodes)?;
    Ok(assemble(op, points.width(), u_a, &f_values))
}

/// State at the right endpoint: column sums of the coefficients.
pub fn endpoint_value(u_hat: &DMatrix<f64>) -> DVector<f64> {
    u_hat.row_sum().transpose()
}

/// Picard iteration of the collocation map until successive node values agree.
pub fn solve_nonlinear<F>(
    op: &CollocationOperator,
    f: &F,
    points: &CgPointSet,
    u_a: &DVector<f64>,
    cfg: &PicardConfig,
) -> Result<CollocationSolution>
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64> + ?Sized,
{
    cfg.validate()?;
    check_points(op, points)?;
    let dim = u_a.len();
    let mut nodes = match &cfg.initial_guess {
        InitialGuess::ConstantInitialValue => {
            DMatrix::from_fn(op.nodes(), dim, |_, j| u_a[j])
        }
        InitialGuess::Provided(g) => {
            if g.shape() != (op.nodes(), dim) {
                return Err(Error::DimensionMismatch {
                    expected: op.nodes() * dim,
                    got: g.len(),
                });
            }
            g.clone()
        }
    };

    let mut residual = f64::INFINITY;
    let mut u_hat = DMatrix::zeros(op.coefficients(), dim);
    let mut u_end = u_a.clone();
    for p in 1..=cfg.max_iter {
        let (hat, next, end) = sweep(op, f, points, u_a, &nodes)?;
        residual = (&next - &nodes).amax();
        let scale = next.amax().max(1.0);
        u_hat = hat;
        u_end = end;
        nodes = next;
        if !residual.is_finite() {
            return Err(Error::PicardNonConvergence {
                iterations: p,
                residual,
            });
        }
        if residual < cfg.tol * scale {
            return Ok(CollocationSolution {
                u_end,
                u_hat,
                u_nodes: nodes,
                iterations: p,
                converged: true,
                residual,
            });
        }
    }
    match cfg.on_nonconvergence {
        NonConvergencePolicy::Error => Err(Error::PicardNonConvergence {
            iterations: cfg.max_iter,
            residual,
        }),
        NonConvergencePolicy::Accept => Ok(CollocationSolution {
            u_end,
            u_hat,
            u_nodes: nodes,
            iterations: cfg.max_iter,
            converged: false,
            residual,
        }),
    }
}

/// Pivot test on the `U` factor of a partially pivoted LU of a matrix whose
/// largest entry is `scale`.
fn nearly_singular(u: DMatrix<f64>, scale: f64) -> bool {
    u.diagonal().abs().min() <= 1e-14 * scale
}

/// Direct solve of the collocation system for `u' + A u = g(t)`.
///
/// The node values satisfy `(I + dT * (T1 C_alpha) (x) A) u = u_a + dT * T1 C_alpha g`,
/// one dense system of size `(M + 1) * dim`.
pub fn solve_linear<G>(
    op: &CollocationOperator,
    a: &DMatrix<f64>,
    g: &G,
    points: &CgPointSet,
    u_a: &DVector<f64>,
) -> Result<CollocationSolution>
where
    G: Fn(f64) -> DVector<f64> + ?Sized,
{
    check_points(op, points)?;
    let dim = u_a.len();
    if a.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            got: a.len(),
        });
    }
    let width = points.width();
    let n = op.nodes();

    let mut g_values = DMatrix::zeros(n, dim);
    for (m, &t) in points.t.iter().enumerate() {
        let gm = g(t);
        if gm.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: gm.len(),
            });
        }
        g_values.set_row(m, &gm.transpose());
    }

    let b = op.t1_c_alpha() * width;
    let system = DMatrix::identity(n * dim, n * dim) + b.kronecker(a);
    let forced = &b * &g_values;
    let rhs = DVector::from_fn(n * dim, |k, _| u_a[k % dim] + forced[(k / dim, k % dim)]);

    let scale = 1f64.max(b.amax() * a.amax());
    let lu = system.lu();
    let singular = || Error::Singular(format!("collocation system, M = {}", op.m()));
    if nearly_singular(lu.u(), scale) {
        return Err(singular());
    }
    let sol = lu
        .solve(&rhs)
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .ok_or_else(singular)?;
    let u_nodes = DMatrix::from_fn(n, dim, |m, i| sol[m * dim + i]);

    let f_values = g_values - &u_nodes * a.transpose();
    let (u_hat, _, u_end) = assemble(op, width, u_a, &f_values);
    Ok(CollocationSolution {
        u_end,
        u_hat,
        u_nodes,
        iterations: 0,
        converged: true,
        residual: 0.0,
    })
}

/// Newton solve of the nonlinear collocation equations
/// `u - u_a - dT * T1 C_alpha F(u) = 0` on the node values.
///
/// Reaches the same discrete solution as `solve_nonlinear` but does not need
/// the Picard contraction condition, at the price of an `(M + 1) * dim`
/// dense factorization per iteration.
pub fn solve_nonlinear_newton<F, J>(
    op: &CollocationOperator,
    f: &F,
    jac: &J,
    points: &CgPointSet,
    u_a: &DVector<f64>,
    cfg: &NewtonConfig,
) -> Result<CollocationSolution>
where
    F: Fn(f64, &DVector<f64>) -> DVector<f64> + ?Sized,
    J: Fn(f64, &DVector<f64>) -> DMatrix<f64> + ?Sized,
{
    cfg.validate()?;
    check_points(op, points)?;
    let dim = u_a.len();
    let n = op.nodes();
    let b = op.t1_c_alpha() * points.width();
    let unpack = |x: &DVector<f64>| DMatrix::from_fn(n, dim, |m, i| x[m * dim + i]);

    let x0 = DVector::from_fn(n * dim, |k, _| u_a[k % dim]);
    let mut failure = None;
    let (x, iterations) = newton_solve(
        x0,
        |x| {
            let nodes = unpack(x);
            match rhs_at_nodes(f, points, &nodes) {
                Ok(fv) => {
                    let integral = &b * fv;
                    DVector::from_fn(n * dim, |k, _| {
                        let (m, i) = (k / dim, k % dim);
                        nodes[(m, i)] - u_a[i] - integral[(m, i)]
                    })
                }
                Err(e) => {
                    failure = Some(e);
                    DVector::from_element(n * dim, f64::NAN)
                }
            }
        },
        |x| {
            let nodes = unpack(x);
            let mut jm = DMatrix::identity(n * dim, n * dim);
            for mp in 0..n {
                let local = jac(points.t[mp], &nodes.row(mp).transpose());
                for m in 0..n {
                    let w = b[(m, mp)];
                    if w == 0.0 {
                        continue;
                    }
                    let mut block = jm.view_mut((m * dim, mp * dim), (dim, dim));
                    block -= &local * w;
                }
            }
            jm
        },
        cfg,
    )
    .map_err(|e| failure.take().unwrap_or(e))?;

    let u_nodes = unpack(&x);
    let f_values = rhs_at_nodes(f, points, &u_nodes)?;
    let (u_hat, _, u_end) = assemble(op, points.width(), u_a, &f_values);
    Ok(CollocationSolution {
        u_end,
        u_hat,
        u_nodes,
        iterations,
        converged: true,
        residual: 0.0,
    })
}
