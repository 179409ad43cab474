use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{ForcingFn, IvpProblem};
use crate::error::{Error, Result};

/// `u' + A u = g(t)` with `A` symmetric positive definite.
#[derive(Clone)]
pub struct SpdLinearProblem {
    pub name: String,
    pub a: DMatrix<f64>,
    pub g: Option<Arc<ForcingFn>>,
    pub u0: DVector<f64>,
    pub t_final: f64,
    eigen: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl std::fmt::Debug for SpdLinearProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpdLinearProblem")
            .field("name", &self.name)
            .field("dim", &self.a.nrows())
            .field("t_final", &self.t_final)
            .finish()
    }
}

/// Parameters for [`spd_catalog`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpdParams {
    /// Matrix dimension.
    pub m: usize,
    /// Smallest eigenvalue (`diag-spectrum` only).
    pub lambda_min: f64,
    /// Largest eigenvalue (`diag-spectrum` only).
    pub lambda_max: f64,
    /// Initial state; all ones when `None`.
    pub u0: Option<DVector<f64>>,
    pub t_final: f64,
}

impl Default for SpdParams {
    fn default() -> Self {
        Self {
            m: 3,
            lambda_min: 1.0,
            lambda_max: 100.0,
            u0: None,
            t_final: 1.0,
        }
    }
}

impl SpdLinearProblem {
    /// Checks symmetry and positivity of `a` before accepting it.
    pub fn new(
        name: impl Into<String>,
        a: DMatrix<f64>,
        g: Option<Arc<ForcingFn>>,
        u0: DVector<f64>,
        t_final: f64,
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || u0.len() != n || n == 0 {
            return Err(Error::InvalidParams(format!(
                "need a square matrix matching u0, got {}x{} and {}",
                a.nrows(),
                a.ncols(),
                u0.len()
            )));
        }
        let scale = a.amax().max(1.0);
        if (&a - a.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidParams("matrix is not symmetric".into()));
        }
        let eigen = SymmetricEigen::new(a.clone());
        if eigen.eigenvalues.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::InvalidParams("matrix is not positive definite".into()));
        }
        Ok(Self {
            name: name.into(),
            a,
            g,
            u0,
            t_final,
            eigen,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.eigen.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigen.eigenvalues.max()
    }

    /// `exp(-A t) u0`, exact for `g = 0`.
    pub fn homogeneous_solution(&self, t: f64) -> DVector<f64> {
        let q = &self.eigen.eigenvectors;
        let decay = DVector::from_iterator(
            self.dim(),
            self.eigen.eigenvalues.iter().map(|&l| (-l * t).exp()),
        );
        q * (q.transpose() * &self.u0).component_mul(&decay)
    }

    /// First-order form; the exact solution is attached when `g = 0`.
    pub fn to_ivp(&self) -> IvpProblem {
        let mut p = IvpProblem::linear(
            self.name.clone(),
            self.a.clone(),
            self.g.clone(),
            self.u0.clone(),
            self.t_final,
        );
        if self.g.is_none() {
            let me = self.clone();
            p.reference = Some(Arc::new(move |t| me.homogeneous_solution(t)));
        }
        p
    }
}

/// Catalog of SPD test matrices: `diag-spectrum` (log-spaced eigenvalues in
/// `[lambda_min, lambda_max]`) and `laplacian-1d` (second differences on
/// `m` interior points of the unit interval, scaled by `1/dx^2`).
pub fn spd_catalog(name: &str, params: &SpdParams) -> Result<SpdLinearProblem> {
    let m = params.m;
    if m == 0 {
        return Err(Error::InvalidParams("dimension m must be >= 1".into()));
    }
    if !(params.t_final > 0.0) {
        return Err(Error::InvalidParams("t_final must be positive".into()));
    }
    let a = match name {
        "diag-spectrum" => {
            let (lo, hi) = (params.lambda_min, params.lambda_max);
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "need 0 < lambda_min <= lambda_max, got [{lo}, {hi}]"
                )));
            }
            let lambdas = DVector::from_fn(m, |i, _| {
                if m == 1 {
                    lo
                } else {
                    lo * (hi / lo).powf(i as f64 / (m - 1) as f64)
                }
            });
            DMatrix::from_diagonal(&lambdas)
        }
        "laplacian-1d" => {
            let dx = 1.0 / (m + 1) as f64;
            let s = 1.0 / (dx * dx);
            DMatrix::from_fn(m, m, |i, j| match i.abs_diff(j) {
                0 => 2.0 * s,
                1 => -s,
                _ => 0.0,
            })
        }
        other => {
            return Err(Error::InvalidParams(format!("unknown SPD catalog entry `{other}`")));
        }
    };
    let u0 = params.u0.clone().unwrap_or_else(|| DVector::from_element(m, 1.0));
    SpdLinearProblem::new(name, a, None, u0, params.t_final)
}
