//! Closed-form zero- and first-order approximations `φ⁽⁰⁾ = φ₀` and
//! `φ⁽¹⁾ = φ₀ + βφ₁` of the GME function, from the expansion
//! `φ = Σ βⁿ φₙ`.
//!
//! `φ₀` solves the `β = 0` problem:
//!
//! ```text
//! φ₀(η) = (2 + γ√π erf η) / ν,        ν = 2 + γ√π erf λ.
//! ```
//!
//! `φ₁` solves `φ₁'' + 2ηφ₁' = -(φ₀'² + φ₀φ₀'')` with
//! `φ₀'(0)φ₀(0) + φ₁'(0) - γφ₁(0) = 0` and `φ₁(λ) = 0`:
//!
//! ```text
//! φ₁(η) = B₁ (2 + γ√π erf η) + B₂ + P(η)
//! P(η)  = γ/ν² [ √π erf η - 2η e^{-η²} - γ e^{-2η²}
//!                - γ√π η erf η e^{-η²} - (γπ/2) erf² η ]
//! B₂    = (4 + γ²) / ν²
//! B₁    = -(B₂ + P(λ)) / ν
//! ```

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{GmeError, Result};
use crate::gme::GmeSolution;
use crate::numerics::{erf, GridFunction};

fn check_eta(eta: f64, lambda: f64) -> Result<()> {
    if !(0.0..=lambda).contains(&eta) {
        return Err(GmeError::OutOfDomain {
            quantity: "eta",
            value: eta,
            lo: 0.0,
            hi: lambda,
        });
    }
    Ok(())
}

fn check_gamma_lambda(gamma: f64, lambda: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0 && lambda.is_finite() && lambda > 0.0) {
        return Err(GmeError::InvalidParameter(format!(
            "need γ > 0 and λ > 0, got γ = {gamma}, λ = {lambda}"
        )));
    }
    Ok(())
}

/// Zero-order approximation (exact solution for `β = 0`).
pub fn phi0(eta: f64, gamma: f64, lambda: f64) -> Result<f64> {
    check_gamma_lambda(gamma, lambda)?;
    check_eta(eta, lambda)?;
    Ok(phi0_unchecked(eta, gamma, lambda))
}

#[inline]
fn phi0_unchecked(eta: f64, gamma: f64, lambda: f64) -> f64 {
    if eta == lambda {
        return 1.0;
    }
    let gs = gamma * PI.sqrt();
    (2.0 + gs * erf(eta)) / (2.0 + gs * erf(lambda))
}

/// `φ₀` sampled on `n` uniform nodes of `[0, λ]`.
pub(crate) fn phi0_grid(gamma: f64, lambda: f64, n: usize) -> GridFunction {
    let values = (0..n)
        .map(|i| {
            let eta = if i + 1 == n {
                lambda
            } else {
                i as f64 * lambda / (n - 1) as f64
            };
            phi0_unchecked(eta, gamma, lambda)
        })
        .collect();
    GridFunction::from_parts_unchecked(lambda, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxCoefficients {
    pub nu: f64,
    pub b1: f64,
    pub b2: f64,
    pub gamma: f64,
    pub lambda: f64,
}

fn particular(eta: f64, gamma: f64, nu: f64) -> f64 {
    let sp = PI.sqrt();
    let e = erf(eta);
    let g1 = (-eta * eta).exp();
    gamma / (nu * nu)
        * (sp * e
            - 2.0 * eta * g1
            - gamma * g1 * g1
            - gamma * sp * eta * e * g1
            - 0.5 * gamma * PI * e * e)
}

pub fn approx_coeffs(gamma: f64, lambda: f64) -> Result<ApproxCoefficients> {
    check_gamma_lambda(gamma, lambda)?;
    let nu = 2.0 + gamma * PI.sqrt() * erf(lambda);
    let b2 = (4.0 + gamma * gamma) / (nu * nu);
    let b1 = -(b2 + particular(lambda, gamma, nu)) / nu;
    Ok(ApproxCoefficients {
        nu,
        b1,
        b2,
        gamma,
        lambda,
    })
}

/// First-order correction `φ₁(η)`.
pub fn phi1(eta: f64, coeffs: &ApproxCoefficients) -> Result<f64> {
    check_eta(eta, coeffs.lambda)?;
    let ApproxCoefficients {
        nu,
        b1,
        b2,
        gamma,
        lambda,
    } = *coeffs;
    if eta == lambda {
        return Ok(0.0);
    }
    Ok(b1 * (2.0 + gamma * PI.sqrt() * erf(eta)) + b2 + particular(eta, gamma, nu))
}

/// `φ⁽ᴺ⁾(η)` for `N ∈ {0, 1}`.
pub fn approximation(order: u32, beta: f64, eta: f64, coeffs: &ApproxCoefficients) -> Result<f64> {
    let base = phi0(eta, coeffs.gamma, coeffs.lambda)?;
    match order {
        0 => Ok(base),
        1 => Ok(base + beta * phi1(eta, coeffs)?),
        other => Err(GmeError::UnsupportedOrder(other)),
    }
}

/// `𝓔⁽ᴺ⁾ = max_i |φ(η_i) - φ⁽ᴺ⁾(η_i)|` on the solution grid.
pub fn approx_error(order: u32, sol: &GmeSolution) -> Result<f64> {
    if order > 1 {
        return Err(GmeError::UnsupportedOrder(order));
    }
    let coeffs = approx_coeffs(sol.params.gamma, sol.params.lambda)?;
    let mut worst = 0.0f64;
    for (eta, phi) in sol.phi.nodes().zip(sol.phi.values()) {
        let approx = approximation(order, sol.params.beta, eta, &coeffs)?;
        worst = worst.max((phi - approx).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi0_boundary_values() {
        assert_eq!(phi0(10.0, 1.0, 10.0).unwrap(), 1.0);
        let expected = 2.0 / (2.0 + PI.sqrt());
        assert!((phi0(0.0, 1.0, 10.0).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.530_163).abs() < 1e-5);
        assert!(phi0(0.0, 1e12, 1.0).unwrap() < 1e-11);
        assert!(phi0(1.5, 1.0, 1.0).is_err());
        assert!(phi0(-0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn phi0_solves_its_ode() {
        let (gamma, lambda) = (3.0, 2.0);
        let f = |x: f64| phi0(x, gamma, lambda).unwrap();
        let h = 1e-3;
        let mut eta = 0.05;
        while eta < lambda - 0.05 {
            let d1 = (f(eta + h) - f(eta - h)) / (2.0 * h);
            let d2 = (f(eta + h) - 2.0 * f(eta) + f(eta - h)) / (h * h);
            assert!((2.0 * eta * d1 + d2).abs() < 1e-6);
            eta += 0.05;
        }
    }

    #[test]
    fn coefficients() {
        let c = approx_coeffs(1.0, 10.0).unwrap();
        assert!((c.nu - (2.0 + PI.sqrt())).abs() < 1e-15);
        assert!((c.nu - 3.772_454).abs() < 1e-6);
        assert!((c.b2 - 5.0 / (2.0 + PI.sqrt()).powi(2)).abs() < 1e-15);
        for &(g, l) in &[(0.1, 0.01), (100.0, 3.0), (1.0, 1e-9)] {
            assert!(approx_coeffs(g, l).unwrap().nu > 2.0);
        }
        assert!(approx_coeffs(0.0, 1.0).is_err());
    }

    // Reference values from a symbolic solution of the first-order problem.
    #[test]
    fn phi1_reference_values() {
        let cases = [
            (
                1.0,
                10.0,
                [
                    0.087_292_483_051_763_54,
                    -0.019_489_131_881_832_638,
                    -0.060_404_894_221_221_79,
                ],
            ),
            (
                0.1,
                10.0,
                [
                    0.035_452_610_703_962_32,
                    0.000_371_715_733_560_345_67,
                    -0.010_617_942_084_066_01,
                ],
            ),
            (
                1.0,
                1.0,
                [0.142_100_168_640_360_6, 0.036_193_901_138_681_56, 0.0],
            ),
        ];
        for (gamma, lambda, expected) in cases {
            let c = approx_coeffs(gamma, lambda).unwrap();
            for (eta, want) in [0.0, 0.5, 1.0].into_iter().zip(expected) {
                let got = phi1(eta, &c).unwrap();
                assert!(
                    (got - want).abs() < 1e-13,
                    "γ={gamma} λ={lambda} η={eta}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn phi1_vanishes_at_lambda() {
        for &(g, l) in &[(1.0, 10.0), (0.1, 2.0), (10.0, 0.5)] {
            let c = approx_coeffs(g, l).unwrap();
            let near = phi1(l * (1.0 - 1e-12), &c).unwrap();
            assert!(near.abs() < 1e-10);
            assert_eq!(phi1(l, &c).unwrap(), 0.0);
        }
    }

    #[test]
    fn phi1_satisfies_first_order_problem() {
        for &(gamma, lambda) in &[(1.0, 10.0), (0.1, 3.0), (10.0, 2.0)] {
            let c = approx_coeffs(gamma, lambda).unwrap();
            let f0 = |x: f64| phi0(x, gamma, lambda).unwrap();
            let f1 = |x: f64| phi1(x, &c).unwrap();
            let h = 1e-3;
            let d = |f: &dyn Fn(f64) -> f64, x: f64| (f(x + h) - f(x - h)) / (2.0 * h);
            let dd = |f: &dyn Fn(f64) -> f64, x: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            let mut eta = 0.01;
            while eta < lambda.min(4.0) - 0.01 {
                let lhs = 2.0 * eta * d(&f1, eta) + dd(&f1, eta);
                let rhs = -(d(&f0, eta).powi(2) + f0(eta) * dd(&f0, eta));
                assert!(
                    (lhs - rhs).abs() < 1e-4,
                    "γ={gamma} η={eta}: {lhs} vs {rhs}"
                );
                eta += 0.01;
            }
            // Robin condition at the origin, one-sided fourth-order differences
            let one_sided = |f: &dyn Fn(f64) -> f64| {
                (-25.0 * f(0.0) + 48.0 * f(h) - 36.0 * f(2.0 * h) + 16.0 * f(3.0 * h)
                    - 3.0 * f(4.0 * h))
                    / (12.0 * h)
            };
            let robin = one_sided(&f0) * f0(0.0) + one_sided(&f1) - gamma * f1(0.0);
            assert!(robin.abs() < 1e-8, "robin residual {robin}");
        }
    }

    #[test]
    fn unsupported_order() {
        let c = approx_coeffs(1.0, 1.0).unwrap();
        assert!(matches!(
            approximation(2, 0.1, 0.5, &c),
            Err(GmeError::UnsupportedOrder(2))
        ));
    }
}
