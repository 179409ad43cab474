//! Viscous Burgers equation on the periodic interval `[0, 2)`, semi-discretized
//! by fourth-order compact finite differences:
//!
//! ```text
//! u' = -A1 u - u .* (A2 u)
//! A1 = -(nu / dx^2) P1^{-1} Q1,   P1 = circ(1/12, 5/6, 1/12),  Q1 = circ(1, -2, 1)
//! A2 = (1 / (2 dx)) P2^{-1} Q2,   P2 = circ(1/6, 2/3, 1/6),    Q2 = circ(-1, 0, 1)
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::IvpProblem;
use crate::error::{Error, Result};

/// Symmetric circulant tridiagonal matrix `circ(off, diag, off)` with a
/// precomputed cyclic Thomas factorization.
#[derive(Debug, Clone)]
pub struct CirculantTridiagonal {
    n: usize,
    diag: f64,
    off: f64,
    // Thomas factors for the modified (non-cyclic) system
    c_prime: Vec<f64>,
    denom: Vec<f64>,
    // Sherman-Morrison correction vector z = B^{-1} w
    z: Vec<f64>,
    gamma: f64,
}

impl CirculantTridiagonal {
    pub fn new(n: usize, diag: f64, off: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParams(format!("circulant size must be >= 3, got {n}")));
        }
        // P = B + w v^T, w = [gamma, 0, .., off], v = [1, 0, .., off / gamma]
        let gamma = -diag;
        let mut b_diag = vec![diag; n];
        b_diag[0] = diag - gamma;
        b_diag[n - 1] = diag - off * off / gamma;
        let mut c_prime = vec![0.0; n];
        let mut denom = vec![0.0; n];
        denom[0] = b_diag[0];
        c_prime[0] = off / denom[0];
        for i in 1..n {
            denom[i] = b_diag[i] - off * c_prime[i - 1];
            if denom[i] == 0.0 {
                return Err(Error::Singular("circulant tridiagonal factorization".into()));
            }
            c_prime[i] = if i + 1 < n { off / denom[i] } else { 0.0 };
        }
        let mut me = Self {
            n,
            diag,
            off,
            c_prime,
            denom,
            z: Vec::new(),
            gamma,
        };
        let mut w = vec![0.0; n];
        w[0] = gamma;
        w[n - 1] = off;
        me.z = me.thomas(&w);
        Ok(me)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn thomas(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        y[0] = rhs[0] / self.denom[0];
        for i in 1..n {
            y[i] = (rhs[i] - self.off * y[i - 1]) / self.denom[i];
        }
        for i in (0..n - 1).rev() {
            y[i] -= self.c_prime[i] * y[i + 1];
        }
        y
    }

    /// Solves `P x = rhs`.
    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let y = self.thomas(rhs.as_slice());
        // v^T = [1, 0, ..., off / gamma]
        let vy = y[0] + self.off / self.gamma * y[n - 1];
        let vz = self.z[0] + self.off / self.gamma * self.z[n - 1];
        let factor = vy / (1.0 + vz);
        DVector::from_fn(n, |i, _| y[i] - factor * self.z[i])
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        circulant(self.n, self.off, self.diag, self.off)
    }
}

/// Dense circulant with `sub`, `diag`, `sup` on the three wrapped diagonals.
fn circulant(n: usize, sub: f64, diag: f64, sup: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag;
        m[(i, (i + 1) % n)] += sup;
        m[(i, (i + n - 1) % n)] += sub;
    }
    m
}

#[derive(Debug, Clone)]
pub struct BurgersProblem {
    pub nu: f64,
    pub alpha: f64,
    pub nx: usize,
    pub dx: f64,
    /// Grid `x_j = j dx`, `j = 0..nx`.
    pub x: Vec<f64>,
    pub t_final: f64,
    /// Diffusion operator, dense.
    pub a1: DMatrix<f64>,
    /// First-derivative operator, dense.
    pub a2: DMatrix<f64>,
    pub p1: CirculantTridiagonal,
    pub p2: CirculantTridiagonal,
}

/// Closed-form solution `2 nu pi e sin(pi x) / (alpha + e cos(pi x))`,
/// `e = exp(-pi^2 nu t)`.
pub fn burgers_exact(problem: &BurgersProblem, x: f64, t: f64) -> f64 {
    let e = (-PI * PI * problem.nu * t).exp();
    2.0 * problem.nu * PI * e * (PI * x).sin() / (problem.alpha + e * (PI * x).cos())
}

/// Assembles the compact-difference operators on `nx` periodic points.
pub fn build_burgers(nu: f64, nx: usize) -> Result<BurgersProblem> {
    if nx < 4 {
        return Err(Error::InvalidParams(format!("need nx >= 4, got {nx}")));
    }
    if !(nu > 0.0) {
        return Err(Error::InvalidParams(format!("viscosity must be positive, got {nu}")));
    }
    let dx = 2.0 / nx as f64;
    let x = (0..nx).map(|j| j as f64 * dx).collect();

    let p1 = CirculantTridiagonal::new(nx, 5.0 / 6.0, 1.0 / 12.0)?;
    let p2 = CirculantTridiagonal::new(nx, 2.0 / 3.0, 1.0 / 6.0)?;
    let q1 = circulant(nx, 1.0, -2.0, 1.0);
    let q2 = circulant(nx, -1.0, 0.0, 1.0);

    let solve_columns = |p: &CirculantTridiagonal, q: &DMatrix<f64>| {
        let mut out = DMatrix::zeros(nx, nx);
        for j in 0..nx {
            out.set_column(j, &p.solve(&q.column(j).into_owned()));
        }
        out
    };
    let a1 = solve_columns(&p1, &q1) * (-nu / (dx * dx));
    let a2 = solve_columns(&p2, &q2) * (1.0 / (2.0 * dx));

    Ok(BurgersProblem {
        nu,
        alpha: 2.0,
        nx,
        dx,
        x,
        t_final: 4.0,
        a1,
        a2,
        p1,
        p2,
    })
}

impl BurgersProblem {
    pub fn initial_condition(&self) -> DVector<f64> {
        DVector::from_iterator(self.nx, self.x.iter().map(|&x| burgers_exact(self, x, 0.0)))
    }

    pub fn exact_on_grid(&self, t: f64) -> DVector<f64> {
        DVector::from_iterator(self.nx, self.x.iter().map(|&x| burgers_exact(self, x, t)))
    }

    pub fn rhs(&self, u: &DVector<f64>) -> DVector<f64> {
        -(&self.a1 * u) - u.component_mul(&(&self.a2 * u))
    }

    pub fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let a2u = &self.a2 * u;
        let mut j = -&self.a1;
        for i in 0..self.nx {
            j[(i, i)] -= a2u[i];
            for k in 0..self.nx {
                j[(i, k)] -= u[i] * self.a2[(i, k)];
            }
        }
        j
    }

    /// Semi-discrete system with its analytic Jacobian; the reference is the
    /// PDE solution sampled on the grid.
    pub fn to_ivp(&self) -> IvpProblem {
        let me = Arc::new(self.clone());
        let (m1, m2, m3) = (me.clone(), me.clone(), me.clone());
        IvpProblem::new(
            format!("burgers(nu={}, nx={})", self.nu, self.nx),
            self.initial_condition(),
            self.t_final,
            move |_t, u| m1.rhs(u),
        )
        .with_jacobian(move |_t, u| m2.jacobian(u))
        .with_reference(move |t| m3.exact_on_grid(t))
    }
}
