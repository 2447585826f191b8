//! Generalized modified error (GME) functions and similarity solutions of the
//! one-phase Stefan problem with a convective (Robin) condition at the fixed
//! face and a thermal conductivity that grows linearly with temperature.
//!
//! The GME function `φ` on `[0, λ]` solves
//!
//! ```text
//! [(1 + β φ) φ']' + 2 η φ' = 0,     0 < η < λ
//! (1 + β φ(0)) φ'(0) = γ φ(0)
//! φ(λ) = 1
//! ```
//!
//! and is built here as the fixed point of an integral operator (see
//! [`gme::apply_tau`]). On top of it the crate provides closed-form
//! approximations ([`approx`]), the free-boundary layer that picks the
//! interface coefficient `λ*` and rebuilds `T(x, t)` and `s(t)` ([`stefan`]),
//! and the numerical primitives everything is built from ([`numerics`]).
//!
//! ```
//! use gme_core::{solve_gme, GmeParams, SolverConfig};
//!
//! let params = GmeParams::new(0.1, 1.0, 2.0).unwrap();
//! let sol = solve_gme(&params, &SolverConfig::default()).unwrap();
//! assert_eq!(sol.phi.values().last().copied(), Some(1.0));
//! assert!(sol.phi.values().iter().all(|v| (0.0..=1.0).contains(v)));
//! ```

pub mod approx;
pub mod error;
pub mod gme;
pub mod numerics;
pub mod stefan;

pub use approx::{approx_coeffs, approx_error, phi0, phi1, ApproxCoefficients};
pub use error::{GmeError, Result};
pub use gme::{
    apply_tau, beta1, compute_d, g_contraction, lipschitz_bound, psi, solve_gme, GmeParams,
    GmeSolution, SolverConfig,
};
pub use numerics::{
    cumulative_integral, erf, erfc, find_root, shoot_bvp, GridFunction, RootBracket,
};
pub use stefan::{
    derivative_bounds, dirichlet_gap, h_function, solve_dirichlet_gme, solve_lambda, solve_stefan,
    DerivativeBounds, DirichletSolution, LambdaRoot, PhysicalParams, StefanSolution,
};
