//! Two-body motion and its analytic reference via Lagrange F and G
//! coefficients in universal variables.

use nalgebra::{DMatrix, DVector, Vector3};

use super::IvpProblem;
use crate::error::{Error, Result};

/// Earth gravitational parameter, km^3/s^2.
pub const MU_EARTH: f64 = 3.986e5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerProblem {
    pub mu: f64,
    /// Position, km.
    pub r0: [f64; 3],
    /// Velocity, km/s.
    pub v0: [f64; 3],
    /// Final time, s.
    pub t_final: f64,
}

impl Default for KeplerProblem {
    /// Low Earth orbit test case over 50 s.
    fn default() -> Self {
        Self {
            mu: MU_EARTH,
            r0: [464.856, 6667.880, 574.231],
            v0: [-2.8381188, -0.7871898, 7.0830275],
            t_final: 50.0,
        }
    }
}

/// Position and velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerState {
    pub r: Vector3<f64>,
    pub v: Vector3<f64>,
}

impl KeplerState {
    pub fn to_vector(self) -> DVector<f64> {
        DVector::from_iterator(6, self.r.iter().chain(self.v.iter()).copied())
    }

    pub fn specific_energy(&self, mu: f64) -> f64 {
        0.5 * self.v.norm_squared() - mu / self.r.norm()
    }

    pub fn angular_momentum(&self) -> Vector3<f64> {
        self.r.cross(&self.v)
    }
}

impl KeplerProblem {
    pub fn initial_state(&self) -> KeplerState {
        KeplerState {
            r: Vector3::from(self.r0),
            v: Vector3::from(self.v0),
        }
    }

    /// `[r, v]' = [v, -mu r / |r|^3]` with its analytic Jacobian and the
    /// F&G reference attached.
    pub fn to_ivp(&self) -> IvpProblem {
        let mu = self.mu;
        let me = *self;
        IvpProblem::new("kepler", self.initial_state().to_vector(), self.t_final, move |_t, u| {
            let r = Vector3::new(u[0], u[1], u[2]);
            let acc = r * (-mu / r.norm().powi(3));
            DVector::from_vec(vec![u[3], u[4], u[5], acc[0], acc[1], acc[2]])
        })
        .with_jacobian(move |_t, u| {
            let r = Vector3::new(u[0], u[1], u[2]);
            let rn = r.norm();
            let block = (DMatrix::identity(3, 3) * rn.powi(2) - (r * r.transpose()) * 3.0)
                * (-mu / rn.powi(5));
            let mut j = DMatrix::zeros(6, 6);
            j.view_mut((0, 3), (3, 3)).fill_with_identity();
            j.view_mut((3, 0), (3, 3)).copy_from(&block);
            j
        })
        .with_reference(move |t| match kepler_reference(&me, t) {
            Ok(s) => s.to_vector(),
            Err(_) => DVector::from_element(6, f64::NAN),
        })
    }
}

/// Stumpff functions `C(z)` and `S(z)`.
fn stumpff(z: f64) -> (f64, f64) {
    if z.abs() < 0.1 {
        // alternating series; the neglected terms are below 1e-16 here
        let mut c = 0.0;
        let mut s = 0.0;
        let mut term_c = 0.5;
        let mut term_s = 1.0 / 6.0;
        for k in 0..8 {
            c += term_c;
            s += term_s;
            let k = k as f64;
            term_c *= -z / ((2.0 * k + 3.0) * (2.0 * k + 4.0));
            term_s *= -z / ((2.0 * k + 4.0) * (2.0 * k + 5.0));
        }
        (c, s)
    } else if z > 0.0 {
        let sz = z.sqrt();
        ((1.0 - sz.cos()) / z, (sz - sz.sin()) / sz.powi(3))
    } else {
        let sz = (-z).sqrt();
        ((sz.cosh() - 1.0) / (-z), (sz.sinh() - sz) / sz.powi(3))
    }
}

/// State at time `t` propagated analytically from the initial condition.
pub fn kepler_reference(problem: &KeplerProblem, t: f64) -> Result<KeplerState> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Kepler(format!("time must be >= 0, got {t}")));
    }
    let init = problem.initial_state();
    if t == 0.0 {
        return Ok(init);
    }
    let mu = problem.mu;
    let smu = mu.sqrt();
    let (r0, v0) = (init.r, init.v);
    let r0n = r0.norm();
    if !(r0n > 0.0) {
        return Err(Error::Kepler("zero initial radius".into()));
    }
    let vr0 = r0.dot(&v0) / r0n;
    let alpha = 2.0 / r0n - v0.norm_squared() / mu;

    // Universal Kepler equation; monotone in chi since its derivative is r > 0.
    let kepler = |chi: f64| {
        let z = alpha * chi * chi;
        let (c, s) = stumpff(z);
        let f = r0n * vr0 / smu * chi * chi * c + (1.0 - alpha * r0n) * chi.powi(3) * s
            + r0n * chi
            - smu * t;
        let df = r0n * vr0 / smu * chi * (1.0 - z * s) + (1.0 - alpha * r0n) * chi * chi * c + r0n;
        (f, df)
    };

    let mut lo = 0.0;
    let mut hi = (smu * t / r0n).max(1e-8);
    let mut expansions = 0;
    while kepler(hi).0 < 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 200 {
            return Err(Error::Kepler("failed to bracket universal anomaly".into()));
        }
    }
    let mut chi = if alpha > 0.0 {
        (smu * alpha * t).clamp(lo, hi)
    } else {
        0.5 * (lo + hi)
    };
    let mut converged = false;
    for _ in 0..60 {
        let (f, df) = kepler(chi);
        if f < 0.0 {
            lo = chi;
        } else {
            hi = chi;
        }
        let mut next = chi - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - chi).abs();
        chi = next;
        if step <= 1e-13 * chi.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Kepler("universal Kepler equation did not converge".into()));
    }

    let z = alpha * chi * chi;
    let (c, s) = stumpff(z);
    let f = 1.0 - chi * chi / r0n * c;
    let g = t - chi.powi(3) / smu * s;
    let r = r0 * f + v0 * g;
    let rn = r.norm();
    let fdot = smu / (rn * r0n) * (z * s - 1.0) * chi;
    let gdot = 1.0 - chi * chi / rn * c;
    let v = r0 * fdot + v0 * gdot;

    let identity = f * gdot - fdot * g;
    if (identity - 1.0).abs() > 1e-9 {
        return Err(Error::Kepler(format!("F Gdot - Fdot G = {identity}")));
    }
    Ok(KeplerState { r, v })
}
