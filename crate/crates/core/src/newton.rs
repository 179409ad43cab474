//! Newton iteration for the implicit stage equations.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// How the Jacobian of the right-hand side is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JacobianMode {
    /// Problem-supplied Jacobian; falls back to finite differences when the
    /// problem has none.
    Analytic,
    #[default]
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Update threshold, relative to `max(1, |x|_inf)`.
    pub tol: f64,
    pub max_iter: usize,
    pub jacobian: JacobianMode,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_iter: 50,
            jacobian: JacobianMode::FiniteDifference,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidParams(format!(
                "Newton needs tol > 0 and max_iter >= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Forward-difference Jacobian of `f` at `u` with steps
/// `sqrt(eps) * (1 + |u_j|)`.
pub fn fd_jacobian<F>(f: F, u: &DVector<f64>) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let n = u.len();
    let f0 = f(u);
    let mut jac = DMatrix::zeros(f0.len(), n);
    let mut probe = u.clone();
    for j in 0..n {
        let h = f64::EPSILON.sqrt() * (1.0 + u[j].abs());
        probe[j] = u[j] + h;
        let fj = f(&probe);
        probe[j] = u[j];
        jac.set_column(j, &((fj - &f0) / h));
    }
    jac
}

/// Solves `residual(x) = 0` starting from `x`. Returns the root and the
/// number of iterations used.
pub(crate) fn newton_solve<R, J>(
    mut x: DVector<f64>,
    mut residual: R,
    mut jacobian: J,
    cfg: &NewtonConfig,
) -> Result<(DVector<f64>, usize)>
where
    R: FnMut(&DVector<f64>) -> DVector<f64>,
    J: FnMut(&DVector<f64>) -> DMatrix<f64>,
{
    let mut last = f64::INFINITY;
    for iter in 1..=cfg.max_iter {
        let r = residual(&x);
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NewtonNonConvergence {
                iterations: iter,
                residual: f64::NAN,
            });
        }
        let jac = jacobian(&x);
        let dx = jac
            .lu()
            .solve(&r)
            .ok_or_else(|| Error::Singular("Newton Jacobian".into()))?;
        x -= &dx;
        last = dx.amax();
        if last <= cfg.tol * x.amax().max(1.0) {
            return Ok((x, iter));
        }
    }
    Err(Error::NewtonNonConvergence {
        iterations: cfg.max_iter,
        residual: last,
    })
}
