//! Library results checked against oracles built here from scratch.

use nalgebra::{DMatrix, DVector, Vector3};
use parareal_cg::analysis::{self, contraction, endpoint_threshold, MminBranch};
use parareal_cg::problems::{build_burgers, burgers_exact, kepler_reference, KeplerProblem};
use parareal_cg::propagators;
use parareal_cg::PropagatorSpec;
use proptest::prelude::*;

/// Collocation stability function from a monomial basis on the reference
/// interval `[-1, 1]` with Chebyshev-Gauss nodes.
fn oracle_stability(m: usize, z: f64) -> f64 {
    let n = m + 1;
    let x: Vec<f64> = (0..n)
        .map(|j| (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * n) as f64).cos())
        .collect();
    let v = DMatrix::from_fn(n, n, |i, k| x[i].powi(k as i32));
    let c = v.try_inverse().unwrap();
    // integral of s^k from -1 to y
    let prim = |y: f64, k: usize| (y.powi(k as i32 + 1) - (-1f64).powi(k as i32 + 1)) / (k + 1) as f64;
    let a = DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| c[(k, j)] * prim(x[i], k)).sum::<f64>());
    let b = DVector::from_fn(n, |j, _| (0..n).map(|k| c[(k, j)] * prim(1.0, k)).sum::<f64>());
    let h = z / 2.0;
    let lhs = DMatrix::identity(n, n) + a * h;
    let slopes = lhs.lu().solve(&DVector::from_element(n, 1.0)).unwrap();
    1.0 - h * b.dot(&slopes)
}

#[test]
fn stability_matches_monomial_oracle() {
    for m in 0..=12 {
        for &z in &[0.05, 0.7, 3.0, 20.0, 150.0] {
            let lib = propagators::stability(&PropagatorSpec::chebyshev_gauss(m), z).unwrap();
            let want = oracle_stability(m, z);
            assert!((lib - want).abs() <= 1e-9, "M = {m}, z = {z}: {lib} vs {want}");
        }
    }
}

#[test]
fn m_min_matches_scan_oracle() {
    for &z in &[0.3, 1.0, 1.5, 16.0, 16.49, 30.0, 50.0, 100.0, 400.0, 1000.0] {
        let lib = analysis::m_min(z).unwrap();
        let want = if z <= 1.0 {
            0
        } else if z <= 8.0 + 6.0 * 2f64.sqrt() {
            1
        } else {
            (2..).find(|&m| oracle_stability(m, z).abs() <= endpoint_threshold(z)).unwrap()
        };
        assert_eq!(lib.m_min, want, "z = {z}");
        if lib.branch == MminBranch::SearchBranch {
            assert!(lib.condition_value <= lib.threshold);
        }
    }
}

#[test]
fn contraction_tends_to_one_for_large_z() {
    for m in 0..=8 {
        let k = contraction(&PropagatorSpec::chebyshev_gauss(m), 1e8).unwrap();
        assert!((k - 1.0).abs() < 5e-3, "M = {m}: K = {k}");
    }
    for m in [0, 1, 2, 4, 20] {
        let r = propagators::stability(&PropagatorSpec::chebyshev_gauss(m), 1e8).unwrap();
        assert!((r.abs() - 1.0).abs() < 1e-3, "M = {m}: R = {r}");
    }
}

proptest! {
    #[test]
    fn trapezoidal_contraction_closed_form(z in 1e-3f64..1e3) {
        let r = (1.0 - z / 2.0) / (1.0 + z / 2.0);
        let g = 1.0 / (1.0 + z);
        let want = (r - g).abs() / (1.0 - g);
        let k = contraction(&PropagatorSpec::trapezoidal(1), z).unwrap();
        prop_assert!((k - want).abs() <= 1e-12 * want.max(1.0));
    }

    #[test]
    fn backward_euler_fine_has_zero_contraction(z in 1e-3f64..1e3) {
        let k = contraction(&PropagatorSpec::backward_euler(1), z).unwrap();
        prop_assert!(k.abs() <= 1e-15);
    }
}

fn two_body(mu: f64, u: &[f64; 6]) -> [f64; 6] {
    let r = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    let s = -mu / (r * r * r);
    [u[3], u[4], u[5], s * u[0], s * u[1], s * u[2]]
}

fn rk4_kepler(p: &KeplerProblem, t: f64, steps: usize) -> [f64; 6] {
    let h = t / steps as f64;
    let mut u = [p.r0[0], p.r0[1], p.r0[2], p.v0[0], p.v0[1], p.v0[2]];
    let axpy = |u: &[f64; 6], k: &[f64; 6], a: f64| std::array::from_fn::<f64, 6, _>(|i| u[i] + a * k[i]);
    for _ in 0..steps {
        let k1 = two_body(p.mu, &u);
        let k2 = two_body(p.mu, &axpy(&u, &k1, h / 2.0));
        let k3 = two_body(p.mu, &axpy(&u, &k2, h / 2.0));
        let k4 = two_body(p.mu, &axpy(&u, &k3, h));
        u = std::array::from_fn(|i| u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    u
}

#[test]
fn kepler_reference_matches_rk4() {
    let p = KeplerProblem::default();
    for &t in &[10.0, 50.0] {
        let want = rk4_kepler(&p, t, (t * 1e3) as usize);
        let got = kepler_reference(&p, t).unwrap().to_vector();
        for i in 0..6 {
            let scale = if i < 3 { 7000.0 } else { 8.0 };
            assert!((got[i] - want[i]).abs() <= 1e-12 * scale, "t = {t}, component {i}: {} vs {}", got[i], want[i]);
        }
    }
}

#[test]
fn kepler_reference_conserves_invariants() {
    let p = KeplerProblem::default();
    let s0 = p.initial_state();
    for &t in &[1.0, 600.0, 5400.0] {
        let s = kepler_reference(&p, t).unwrap();
        let de = (s.specific_energy(p.mu) - s0.specific_energy(p.mu)).abs();
        let dh: Vector3<f64> = s.angular_momentum() - s0.angular_momentum();
        assert!(de <= 1e-10 * s0.specific_energy(p.mu).abs(), "t = {t}: energy drift {de}");
        assert!(dh.norm() <= 1e-10 * s0.angular_momentum().norm(), "t = {t}");
    }
}

#[test]
fn burgers_exact_solves_the_pde() {
    let p = build_burgers(0.05, 8).unwrap();
    let u = |x: f64, t: f64| burgers_exact(&p, x, t);
    let h = 1e-3;
    for &(x, t) in &[(0.3, 0.5), (1.1, 1.0), (1.7, 2.5)] {
        let ut = (u(x, t + h) - u(x, t - h)) / (2.0 * h);
        let ux = (u(x + h, t) - u(x - h, t)) / (2.0 * h);
        let uxx = (u(x + h, t) - 2.0 * u(x, t) + u(x - h, t)) / (h * h);
        let residual = ut + u(x, t) * ux - p.nu * uxx;
        assert!(residual.abs() < 1e-6, "({x}, {t}): {residual}");
    }
}

#[test]
fn burgers_semi_discretization_converges() {
    let nu = 0.05;
    let errors: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&nx| {
            let p = build_burgers(nu, nx).unwrap();
            let ivp = p.to_ivp();
            let u1 = propagators::advance(&PropagatorSpec::gauss4(200), &ivp, 0.0, &ivp.u0, 1.0).unwrap();
            (u1 - p.exact_on_grid(1.0)).amax()
        })
        .collect();
    assert!(errors[0] < 1e-2, "{errors:?}");
    for w in errors.windows(2) {
        assert!(w[1] < w[0] / 8.0, "{errors:?}");
    }
}
