//! Initial value problems and the test-problem catalog.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::newton::{fd_jacobian, JacobianMode};

mod burgers;
mod kepler;
mod spd;

pub use burgers::{burgers_exact, build_burgers, BurgersProblem, CirculantTridiagonal};
pub use kepler::{kepler_reference, KeplerProblem, KeplerState, MU_EARTH};
pub use spd::{spd_catalog, SpdLinearProblem, SpdParams};

/// Right-hand side `f(t, u)` of `u' = f(t, u)`.
pub type RhsFn = dyn Fn(f64, &DVector<f64>) -> DVector<f64> + Send + Sync;
/// Jacobian `df/du` at `(t, u)`.
pub type JacobianFn = dyn Fn(f64, &DVector<f64>) -> DMatrix<f64> + Send + Sync;
/// Exact or high-accuracy solution `t -> u(t)`.
pub type ReferenceFn = dyn Fn(f64) -> DVector<f64> + Send + Sync;
/// Forcing term `g(t)` of a linear problem.
pub type ForcingFn = dyn Fn(f64) -> DVector<f64> + Send + Sync;

/// Linear structure `u' + A u = g(t)`, so that `f(t, u) = g(t) - A u`.
#[derive(Clone)]
pub struct LinearForm {
    pub a: DMatrix<f64>,
    /// `None` means `g = 0`.
    pub g: Option<Arc<ForcingFn>>,
}

impl LinearForm {
    pub fn forcing(&self, t: f64) -> DVector<f64> {
        match &self.g {
            Some(g) => g(t),
            None => DVector::zeros(self.a.nrows()),
        }
    }
}

/// `u' = f(t, u)`, `u(0) = u0`, on `[0, t_final]`.
#[derive(Clone)]
pub struct IvpProblem {
    pub name: String,
    pub dim: usize,
    pub f: Arc<RhsFn>,
    pub u0: DVector<f64>,
    pub t_final: f64,
    pub reference: Option<Arc<ReferenceFn>>,
    pub jacobian: Option<Arc<JacobianFn>>,
    /// Set when `f` is affine in `u`; lets the collocation propagator use a
    /// direct solve instead of Picard iteration.
    pub linear: Option<LinearForm>,
}

impl fmt::Debug for IvpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IvpProblem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("u0", &self.u0.as_slice())
            .field("t_final", &self.t_final)
            .field("reference", &self.reference.is_some())
            .field("jacobian", &self.jacobian.is_some())
            .field("linear", &self.linear.is_some())
            .finish()
    }
}

impl IvpProblem {
    pub fn new<F>(name: impl Into<String>, u0: DVector<f64>, t_final: f64, f: F) -> Self
    where
        F: Fn(f64, &DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            dim: u0.len(),
            f: Arc::new(f),
            u0,
            t_final,
            reference: None,
            jacobian: None,
            linear: None,
        }
    }

    /// `u' + A u = g(t)`, with the analytic Jacobian `-A` attached.
    pub fn linear(
        name: impl Into<String>,
        a: DMatrix<f64>,
        g: Option<Arc<ForcingFn>>,
        u0: DVector<f64>,
        t_final: f64,
    ) -> Self {
        let form = LinearForm { a, g };
        let rhs_form = form.clone();
        let neg_a = -form.a.clone();
        let mut p = Self::new(name, u0, t_final, move |t, u| {
            rhs_form.forcing(t) - &rhs_form.a * u
        });
        p.jacobian = Some(Arc::new(move |_, _| neg_a.clone()));
        p.linear = Some(form);
        p
    }

    /// Scalar test equation `u' = -lambda u`, `u(0) = u0`.
    pub fn dahlquist(lambda: f64, u0: f64, t_final: f64) -> Self {
        let mut p = Self::linear(
            format!("dahlquist({lambda})"),
            DMatrix::from_element(1, 1, lambda),
            None,
            DVector::from_element(1, u0),
            t_final,
        );
        p.reference = Some(Arc::new(move |t| {
            DVector::from_element(1, u0 * (-lambda * t).exp())
        }));
        p
    }

    pub fn with_reference<R>(mut self, r: R) -> Self
    where
        R: Fn(f64) -> DVector<f64> + Send + Sync + 'static,
    {
        self.reference = Some(Arc::new(r));
        self
    }

    pub fn with_jacobian<J>(mut self, j: J) -> Self
    where
        J: Fn(f64, &DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(j));
        self
    }

    /// Drops the linear structure so that solvers treat `f` as a black box.
    pub fn as_nonlinear(mut self) -> Self {
        self.linear = None;
        self
    }

    pub fn rhs(&self, t: f64, u: &DVector<f64>) -> DVector<f64> {
        (self.f)(t, u)
    }

    pub fn jacobian_at(&self, t: f64, u: &DVector<f64>, mode: JacobianMode) -> DMatrix<f64> {
        match (mode, &self.jacobian) {
            (JacobianMode::Analytic, Some(j)) => j(t, u),
            _ => fd_jacobian(|v| (self.f)(t, v), u),
        }
    }
}
