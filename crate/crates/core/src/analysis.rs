//! Contraction factors of parareal with a backward Euler coarse propagator.
//!
//! For the scalar test equation `u' = -lambda u` and `z = lambda dT`, one
//! parareal iteration shrinks the error by at most
//!
//! ```text
//! K(z) = |R_F(z) - 1/(1+z)| / (1 - 1/(1+z))
//! ```
//!
//! and over a spectrum in `[0, z_max]` by `rho = max K`. Collocation with
//! `M + 1` points gives `rho <= 1/3` once `M >= m_min(z_max)`.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::propagators::{Propagator, PropagatorSpec};

/// The contraction bound `m_min` aims for.
pub const TARGET_RHO: f64 = 1.0 / 3.0;

/// Largest `M` tried by [`m_min`].
pub const M_MIN_CAP: usize = 512;

/// `K` on a propagator with any collocation operator already built.
/// Returns infinity where the stability function is unbounded.
pub fn contraction_with(prop: &Propagator, z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    if z.is_nan() {
        return f64::NAN;
    }
    let coarse = 1.0 / (1.0 + z);
    match prop.stability(z) {
        Ok(r) if r.is_finite() => (r - coarse).abs() / (1.0 - coarse),
        _ => f64::INFINITY,
    }
}

/// Contraction factor `K(z)` of `spec` as fine propagator.
pub fn contraction(spec: &PropagatorSpec, z: f64) -> Result<f64> {
    Ok(contraction_with(&Propagator::new(spec.clone())?, z))
}

/// Sampling of `[0, z_max]` for [`rho_over_interval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPolicy {
    /// Log-spaced samples, `z = 0` excluded.
    pub points: usize,
    /// Lowest sample as a fraction of `z_max`.
    pub lower_ratio: f64,
    /// Absolute floor on the lowest sample.
    pub lower_floor: f64,
    /// Golden-section tolerance in `z`.
    pub refine_tol: f64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            points: 2048,
            lower_ratio: 1e-6,
            lower_floor: 1e-8,
            refine_tol: 1e-8,
        }
    }
}

impl GridPolicy {
    /// `0` followed by log-spaced points ending exactly at `z_max`.
    pub fn grid(&self, z_max: f64) -> Vec<f64> {
        let lo = (z_max * self.lower_ratio).max(self.lower_floor).min(z_max);
        let n = self.points.max(2);
        let (la, lb) = (lo.ln(), z_max.ln());
        let mut z = Vec::with_capacity(n + 1);
        z.push(0.0);
        for i in 0..n {
            z.push((la + (lb - la) * i as f64 / (n - 1) as f64).exp());
        }
        z[n] = z_max;
        z
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub spec: PropagatorSpec,
    pub z_max: f64,
    pub z_grid: Vec<f64>,
    pub k_values: Vec<f64>,
    /// Refined maximum of `K` over `[0, z_max]`.
    pub rho: f64,
    /// Where the maximum is attained.
    pub z_at_rho: f64,
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > tol * (1.0 + a.abs()) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `rho = max K(z)` over `[0, z_max]`: grid sampling, then golden-section
/// refinement around every interior local maximum.
pub fn rho_over_interval(spec: &PropagatorSpec, z_max: f64, grid: &GridPolicy) -> Result<ContractionReport> {
    if !(z_max > 0.0) || !z_max.is_finite() {
        return Err(Error::Domain(format!("z_max must be positive and finite, got {z_max}")));
    }
    let prop = Propagator::new(spec.clone())?;
    let k = |z: f64| contraction_with(&prop, z);
    let z_grid = grid.grid(z_max);
    let k_values: Vec<f64> = z_grid.iter().map(|&z| k(z)).collect();

    let (mut z_at_rho, mut rho) = (0.0, 0.0);
    let mut consider = |z: f64, v: f64| {
        if v > rho || v.is_nan() {
            rho = v;
            z_at_rho = z;
        }
    };
    let last = z_grid.len() - 1;
    for i in 0..=last {
        let v = k_values[i];
        consider(z_grid[i], v);
        if i == 0 || i == last || !v.is_finite() {
            continue;
        }
        if v >= k_values[i - 1] && v >= k_values[i + 1] {
            let (zr, vr) = golden_max(k, z_grid[i - 1], z_grid[i + 1], grid.refine_tol);
            consider(zr, vr);
        }
    }
    Ok(ContractionReport {
        spec: spec.clone(),
        z_max,
        z_grid,
        k_values,
        rho,
        z_at_rho,
    })
}

/// Which case of the `m_min` rule applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MminBranch {
    /// `z_max <= 1`.
    ZeroBranch,
    /// `1 < z_max <= 8 + 6 sqrt(2)`.
    OneBranch,
    /// Found by scanning `M = 2, 3, ...`.
    SearchBranch,
}

impl MminBranch {
    pub fn name(self) -> &'static str {
        match self {
            Self::ZeroBranch => "zero",
            Self::OneBranch => "one",
            Self::SearchBranch => "search",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MminResult {
    pub z_max: f64,
    pub m_min: usize,
    pub branch: MminBranch,
    /// `|R_CG(z_max, m_min)|`.
    pub condition_value: f64,
    /// `(3 + z_max) / (3 (1 + z_max))`.
    pub threshold: f64,
}

/// Root of `K(z, 0) = 1/3`.
pub const Z0_STAR: f64 = 1.0;
/// Largest root of `K(z, 1) = 1/3`.
pub const Z1_STAR: f64 = 8.0 + 6.0 * SQRT_2;

/// Right-hand side of the endpoint condition `|R_CG(z, M)| <= threshold`.
pub fn endpoint_threshold(z: f64) -> f64 {
    (3.0 + z) / (3.0 * (1.0 + z))
}

/// `|R_CG(z, m)|`.
pub fn cg_abs_stability(m: usize, z: f64) -> Result<f64> {
    Ok(Propagator::new(PropagatorSpec::chebyshev_gauss(m))?.stability(z)?.abs())
}

/// Smallest number of collocation intervals that keeps the contraction
/// factor on `[0, z_max]` at or below 1/3.
pub fn m_min(z_max: f64) -> Result<MminResult> {
    if !(z_max > 0.0) || !z_max.is_finite() {
        return Err(Error::Domain(format!("z_max must be positive and finite, got {z_max}")));
    }
    let threshold = endpoint_threshold(z_max);
    let result = |m, branch| -> Result<MminResult> {
        Ok(MminResult {
            z_max,
            m_min: m,
            branch,
            condition_value: cg_abs_stability(m, z_max)?,
            threshold,
        })
    };
    if z_max <= Z0_STAR {
        return result(0, MminBranch::ZeroBranch);
    }
    if z_max <= Z1_STAR {
        return result(1, MminBranch::OneBranch);
    }
    let mut last_value = f64::NAN;
    for m in 2..=M_MIN_CAP {
        last_value = cg_abs_stability(m, z_max)?;
        if last_value <= threshold {
            return Ok(MminResult {
                z_max,
                m_min: m,
                branch: MminBranch::SearchBranch,
                condition_value: last_value,
                threshold,
            });
        }
    }
    Err(Error::MminCapExceeded {
        cap: M_MIN_CAP,
        last_value,
        threshold,
    })
}

/// Numerically located thresholds of the `m_min` rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRoots {
    /// Unique positive root of `K(z, 0) = 1/3`.
    pub z0_star: f64,
    /// Largest positive root of `K(z, 1) = 1/3`.
    pub z1_star: f64,
    /// Points where `K(z, 1)` touches 1/3 without crossing.
    pub m1_tangencies: Vec<f64>,
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> Result<f64> {
    let (mut fa, fb) = (f(a), f(b));
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!("no sign change on [{a}, {b}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Sign changes of `g` on a log grid over `[1e-3, 1e6]`, each refined by
/// bisection, plus tangencies where a local maximum of `g` reaches zero.
fn roots_and_tangencies(g: impl Fn(f64) -> f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let policy = GridPolicy {
        points: 4096,
        lower_ratio: 1e-9,
        lower_floor: 1e-3,
        refine_tol: 1e-12,
    };
    let z: Vec<f64> = policy.grid(1e6).into_iter().skip(1).collect();
    let v: Vec<f64> = z.iter().map(|&x| g(x)).collect();
    let mut roots = Vec::new();
    let mut tangencies = Vec::new();
    for i in 0..z.len() - 1 {
        if v[i] == 0.0 {
            roots.push(z[i]);
        } else if v[i].signum() != v[i + 1].signum() && v[i + 1] != 0.0 {
            roots.push(bisect(&g, z[i], z[i + 1])?);
        }
        if i > 0 && v[i] >= v[i - 1] && v[i] >= v[i + 1] && v[i] < 0.0 {
            let (zm, vm) = golden_max(&g, z[i - 1], z[i + 1], policy.refine_tol);
            if vm.abs() < 1e-10 {
                tangencies.push(zm);
            }
        }
    }
    Ok((roots, tangencies))
}

/// Locates `z0*` and `z1*` by bisection on `K(z, M) - 1/3`, `M = 0, 1`.
pub fn find_threshold_roots() -> Result<ThresholdRoots> {
    let p0 = Propagator::new(PropagatorSpec::chebyshev_gauss(0))?;
    let p1 = Propagator::new(PropagatorSpec::chebyshev_gauss(1))?;
    let (r0, _) = roots_and_tangencies(|z| contraction_with(&p0, z) - TARGET_RHO)?;
    let (r1, m1_tangencies) = roots_and_tangencies(|z| contraction_with(&p1, z) - TARGET_RHO)?;
    let z0_star = match r0.as_slice() {
        [only] => *only,
        other => {
            return Err(Error::Bracket(format!(
                "expected one root of K(z, 0) = 1/3, found {}",
                other.len()
            )))
        }
    };
    let z1_star = *r1
        .last()
        .ok_or_else(|| Error::Bracket("no root of K(z, 1) = 1/3".into()))?;
    Ok(ThresholdRoots {
        z0_star,
        z1_star,
        m1_tangencies,
    })
}
