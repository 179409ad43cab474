//! Parareal with a Chebyshev-Gauss spectral collocation fine propagator.
//!
//! The crate is organized bottom-up:
//!
//! - [`chebyshev`]: Chebyshev-Gauss nodes, polynomials and the collocation
//!   operator `C_alpha`.
//! - [`collocation`]: one collocation step by Picard iteration, a direct
//!   linear solve, or Newton's method.
//! - [`propagators`]: single-step integrators behind one `advance` contract,
//!   with their stability functions.
//! - [`parareal`]: the predictor-corrector iteration itself.
//! - [`analysis`]: contraction factors and the collocation degree needed for
//!   a given stiffness.
//! - [`problems`]: SPD linear systems, two-body motion, viscous Burgers.
//!
//! ```
//! use parareal_cg::{parareal, problems, PropagatorSpec};
//!
//! let problem = problems::IvpProblem::dahlquist(4.0, 1.0, 2.0);
//! let cfg = parareal::ParealConfig::new(
//!     2.0,
//!     8,
//!     PropagatorSpec::backward_euler(1),
//!     PropagatorSpec::chebyshev_gauss(8),
//! );
//! let out = parareal::run(&cfg, &problem).unwrap();
//! let end = out.states.last().unwrap()[0];
//! assert!((end - (-8.0f64).exp()).abs() < 1e-9);
//! ```

pub mod analysis;
pub mod chebyshev;
pub mod collocation;
pub mod error;
pub mod newton;
pub mod parareal;
pub mod problems;
pub mod propagators;

pub use error::{Error, Result};
pub use propagators::{Propagator, PropagatorKind, PropagatorSpec};

// Runs the guide's listings as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/collocation.md")]
    mod collocation {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/parareal.md")]
    mod parareal {}
    #[doc = include_str!("../../../book/src/problems.md")]
    mod problems {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
