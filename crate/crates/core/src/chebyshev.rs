//! Chebyshev polynomials, Chebyshev-Gauss nodes and the coefficient matrices
//! of the matrix-vector collocation scheme.
//!
//! For a fixed number of nodes `M + 1` the scheme is driven by five matrices:
//!
//! ```text
//! T1[m][l] = T_l(tau_m)                     (M+1) x (M+2)   evaluation
//! T2[l][m] = T_l(tau_m)                     (M+1) x (M+1)   transform basis
//! V        = diag(1, 2, ..., 2) / (M+1)     (M+1) x (M+1)   transform weights
//! R        = diag(1, 1, 1/2, ..., 1/(M+1))  (M+2) x (M+2)
//! S                                         (M+2) x (M+1)   integration couplings
//! C_alpha  = R S V T2 / 4                   (M+2) x (M+1)
//! ```
//!
//! `V T2 f` is the forward discrete Chebyshev transform of node values `f`,
//! and `U0 + dT * C_alpha * f` gives the Chebyshev coefficients of the
//! degree `M + 1` polynomial whose derivative interpolates `f` and whose value
//! at the left endpoint is the first entry of `U0`. The matrices do not depend
//! on the interval; its length enters only through the scalar `dT`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Chebyshev-Gauss nodes on the reference interval and their image on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CgPointSet {
    /// Highest node index; there are `m + 1` nodes.
    pub m: usize,
    /// Nodes in `(-1, 1)`, increasing.
    pub tau: Vec<f64>,
    /// Nodes mapped to `(a, b)`.
    pub t: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl CgPointSet {
    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Interval length `b - a`.
    pub fn width(&self) -> f64 {
        self.b - self.a
    }
}

/// Reference Chebyshev-Gauss nodes `tau_m = -cos((2m+1)pi / (2M+2))`.
pub fn reference_nodes(m: usize) -> Vec<f64> {
    let denom = 2.0 * m as f64 + 2.0;
    (0..=m)
        .map(|k| -((2.0 * k as f64 + 1.0) * std::f64::consts::PI / denom).cos())
        .collect()
}

/// Chebyshev-Gauss nodes on `[a, b]`, the zeros of the shifted Chebyshev
/// polynomial of degree `m + 1`.
pub fn cg_points(m: usize, a: f64, b: f64) -> Result<CgPointSet> {
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return Err(Error::Domain(format!(
            "interval must satisfy b > a, got [{a}, {b}]"
        )));
    }
    let tau = reference_nodes(m);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let t = tau.iter().map(|&x| half * x + mid).collect();
    Ok(CgPointSet { m, tau, t, a, b })
}

/// `T_l(tau)` by the three-term recurrence.
pub fn chebyshev_eval(l: usize, tau: f64) -> Result<f64> {
    if !tau.is_finite() || tau.abs() > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("|tau| must be <= 1, got {tau}")));
    }
    Ok(chebyshev_unchecked(l, tau))
}

/// Recurrence without the domain check; valid for any real argument.
pub(crate) fn chebyshev_unchecked(l: usize, tau: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => tau,
        _ => {
            let (mut prev, mut cur) = (1.0, tau);
            for _ in 1..l {
                let next = 2.0 * tau * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// All values `T_0(tau), ..., T_degree(tau)`.
pub(crate) fn chebyshev_row(degree: usize, tau: f64) -> Vec<f64> {
    let mut row = Vec::with_capacity(degree + 1);
    row.push(1.0);
    if degree >= 1 {
        row.push(tau);
    }
    for l in 2..=degree {
        row.push(2.0 * tau * row[l - 1] - row[l - 2]);
    }
    row
}

/// Evaluates `sum_l coeffs[l] T_l(tau)` by Clenshaw's recurrence.
pub fn clenshaw(coeffs: &[f64], tau: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * tau * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + tau * b1 - b2
}

/// Interval-independent matrices of the collocation scheme for `m + 1` nodes.
#[derive(Debug, Clone)]
pub struct CollocationOperator {
    m: usize,
    tau: Vec<f64>,
    t1: DMatrix<f64>,
    t2: DMatrix<f64>,
    v: DMatrix<f64>,
    r: DMatrix<f64>,
    s: DMatrix<f64>,
    c_alpha: DMatrix<f64>,
    t1_c_alpha: DMatrix<f64>,
}

impl CollocationOperator {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of collocation nodes, `m + 1`.
    pub fn nodes(&self) -> usize {
        self.m + 1
    }

    /// Number of solution coefficients, `m + 2`.
    pub fn coefficients(&self) -> usize {
        self.m + 2
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn t1(&self) -> &DMatrix<f64> {
        &self.t1
    }

    pub fn t2(&self) -> &DMatrix<f64> {
        &self.t2
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn c_alpha(&self) -> &DMatrix<f64> {
        &self.c_alpha
    }

    /// `T1 * C_alpha`, the map from node values of `f` to node values of the
    /// integral, per unit interval length.
    pub fn t1_c_alpha(&self) -> &DMatrix<f64> {
        &self.t1_c_alpha
    }

    /// Forward discrete Chebyshev transform `V T2 f` of node values.
    pub fn transform(&self, values: &DVector<f64>) -> DVector<f64> {
        &self.v * (&self.t2 * values)
    }
}

/// Assembles the dense coefficient matrices for `m + 1` Chebyshev-Gauss nodes.
pub fn build_operator(m: usize) -> CollocationOperator {
    let n = m + 1;
    let tau = reference_nodes(m);

    let mut t1 = DMatrix::zeros(n, m + 2);
    for (row, &x) in tau.iter().enumerate() {
        for (l, value) in chebyshev_row(m + 1, x).into_iter().enumerate() {
            t1[(row, l)] = value;
        }
    }
    let t2 = t1.columns(0, n).transpose();

    let v = DMatrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => 1.0 / n as f64,
        (i, j) if i == j => 2.0 / n as f64,
        _ => 0.0,
    });

    let r = DMatrix::from_fn(m + 2, m + 2, |i, j| match (i, j) {
        (i, j) if i != j => 0.0,
        (0, _) => 1.0,
        (i, _) => 1.0 / i as f64,
    });

    // Rows 1..=M+1 encode u_k = (c_{k-1} f_{k-1} - f_{k+1}) / (4k), c_0 = 2.
    // Row 0 imposes the initial value: u_0 = u_a + sum_{k>=1} (-1)^(k-1) u_k,
    // whose first row reduces to [2, -1/2, s_2, ..., s_M].
    let mut s = DMatrix::zeros(m + 2, n);
    for k in 1..=m + 1 {
        s[(k, k - 1)] = if k == 1 { 2.0 } else { 1.0 };
        if k < m {
            s[(k, k + 1)] = -1.0;
        }
    }
    s[(0, 0)] = 2.0;
    if m >= 1 {
        s[(0, 1)] = -0.5;
    }
    for j in 2..=m {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        s[(0, j)] = sign * (1.0 / (j as f64 + 1.0) - 1.0 / (j as f64 - 1.0));
    }

    let c_alpha = (&r * &s * &v * &t2) * 0.25;
    let t1_c_alpha = &t1 * &c_alpha;

    CollocationOperator {
        m,
        tau,
        t1,
        t2,
        v,
        r,
        s,
        c_alpha,
        t1_c_alpha,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn trig_oracle(l: usize, tau: f64) -> f64 {
        (l as f64 * tau.acos()).cos()
    }

    #[test]
    fn single_midpoint() {
        let p = cg_points(0, -1.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.tau[0], 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(p.t[0], 0.0, epsilon = 1e-16);
    }

    #[test]
    fn two_points_on_zero_two() {
        let p = cg_points(1, 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(p.tau[0], -FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(p.tau[1], FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(p.t[0], 1.0 - FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(p.t[1], 1.0 + FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn shifted_nodes_are_roots() {
        let p = cg_points(4, 0.0, 1.0).unwrap();
        for &t in &p.t {
            // shifted T_5 evaluated through the affine map, trig form
            let x = 2.0 * (t - p.a) / (p.b - p.a) - 1.0;
            assert!(trig_oracle(5, x).abs() < 1e-12);
            assert!(chebyshev_eval(5, x).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(matches!(cg_points(3, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(cg_points(3, 2.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn eval_small_degrees() {
        assert_eq!(chebyshev_eval(0, -0.4).unwrap(), 1.0);
        assert_eq!(chebyshev_eval(1, 0.3).unwrap(), 0.3);
        let want = (5.0 * 0.7f64.acos()).cos();
        assert_abs_diff_eq!(chebyshev_eval(5, 0.7).unwrap(), want, epsilon = 1e-14);
    }

    #[test]
    fn eval_domain_error() {
        assert!(chebyshev_eval(3, 1.0 + 1e-13).is_ok());
        assert!(matches!(chebyshev_eval(3, 1.01), Err(Error::Domain(_))));
        assert!(chebyshev_eval(3, f64::NAN).is_err());
    }

    #[test]
    fn unit_endpoint() {
        for l in 0..=50 {
            assert_abs_diff_eq!(chebyshev_eval(l, 1.0).unwrap(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn nodes_symmetric() {
        for m in 0..40 {
            let tau = reference_nodes(m);
            for k in 0..=m {
                assert_abs_diff_eq!(tau[k], -tau[m - k], epsilon = 1e-15);
            }
            assert!(tau.windows(2).all(|w| w[0] < w[1]));
            assert!(tau.iter().all(|x| x.abs() < 1.0));
        }
    }

    #[test]
    fn smallest_operator() {
        let op = build_operator(0);
        assert_eq!(op.t1().shape(), (1, 2));
        assert_eq!(op.t1()[(0, 0)], 1.0);
        assert_abs_diff_eq!(op.t1()[(0, 1)], 0.0, epsilon = 1e-16);
        assert_eq!(op.v()[(0, 0)], 1.0);
        assert_eq!(op.c_alpha().shape(), (2, 1));
    }

    #[test]
    fn s_first_row() {
        let op = build_operator(2);
        let s = op.s();
        assert_eq!(s[(0, 0)], 2.0);
        assert_eq!(s[(0, 1)], -0.5);
        assert_abs_diff_eq!(s[(0, 2)], -2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn s_band_structure() {
        let op = build_operator(5);
        let s = op.s();
        assert_eq!(s.row(1).iter().copied().collect::<Vec<_>>(), vec![2.0, 0.0, -1.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.row(2).iter().copied().collect::<Vec<_>>(), vec![0.0, 1.0, 0.0, -1.0, 0.0, 0.0]);
        assert_eq!(s.row(5).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(s.row(6).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn diagonal_weights() {
        let op = build_operator(4);
        let v: Vec<f64> = op.v().diagonal().iter().copied().collect();
        assert_eq!(v, vec![0.2, 0.4, 0.4, 0.4, 0.4]);
        let r: Vec<f64> = op.r().diagonal().iter().copied().collect();
        assert_eq!(r, vec![1.0, 1.0, 0.5, 1.0 / 3.0, 0.25, 0.2]);
    }

    #[test]
    fn c_alpha_assembled_exactly() {
        let op = build_operator(7);
        let want = (op.r() * op.s() * op.v() * op.t2()) * 0.25;
        assert_eq!(op.c_alpha(), &want);
    }

    #[test]
    fn t1_matches_trig() {
        let op = build_operator(9);
        for (m, &x) in op.tau().iter().enumerate() {
            for l in 0..op.coefficients() {
                assert_abs_diff_eq!(op.t1()[(m, l)], trig_oracle(l, x), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn transform_roundtrip_m6() {
        let op = build_operator(6);
        let f = DVector::from_fn(7, |i, _| (i as f64 * 1.3).sin() + 0.2 * i as f64);
        let coeffs = op.transform(&f);
        let back = op.t1().columns(0, 7) * coeffs;
        assert!((back - f).amax() < 1e-12);
    }

    #[test]
    fn entries_finite_up_to_64() {
        for m in [0, 1, 2, 16, 33, 64] {
            let op = build_operator(m);
            assert!(op.c_alpha().iter().all(|x| x.is_finite()));
            assert!(op.t1_c_alpha().iter().all(|x| x.is_finite()));
        }
    }

    #[test]
    fn clenshaw_agrees_with_trig() {
        let c = [0.3, -1.2, 0.5, 2.0, -0.7];
        let x = 0.37;
        let want: f64 = c.iter().enumerate().map(|(l, ci)| ci * trig_oracle(l, x)).sum();
        assert_abs_diff_eq!(clenshaw(&c, x), want, epsilon = 1e-14);
        assert_abs_diff_eq!(clenshaw(&c, 1.0), c.iter().sum::<f64>(), epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn roundtrip_any_data(m in 0usize..24, seed in proptest::collection::vec(-5.0f64..5.0, 25)) {
            let op = build_operator(m);
            let f = DVector::from_fn(m + 1, |i, _| seed[i]);
            let back = op.t1().columns(0, m + 1) * op.transform(&f);
            prop_assert!((back - &f).amax() < 1e-12);
        }

        #[test]
        fn recurrence_matches_trig(l in 0usize..60, x in -1.0f64..=1.0) {
            prop_assert!((chebyshev_eval(l, x).unwrap() - trig_oracle(l, x)).abs() < 1e-12);
        }
    }
}
