//! Shooting oracle for the nonlinear two-point problems
//!
//! ```text
//! (1 + β y) y'' + β (y')² + 2 η y' = 0   on (0, λ),   y(λ) = 1,
//! ```
//!
//! with either the Robin condition `(1 + β y(0)) y'(0) = γ y(0)` or the
//! Dirichlet condition `y(0) = 0` at the left end. It integrates the IVP
//! with classical RK4 at the grid step and never touches the integral
//! operator, so it serves as an independent check on the fixed-point solver.

use super::grid::GridFunction;
use super::roots::{find_root_with, RootBracket};
use crate::error::{GmeError, Result};
use crate::gme::{GmeParams, SolverConfig};

/// Solves the Robin problem by shooting on `a = y(0) ∈ [0, 1]`, with
/// `y'(0) = γa/(1 + βa)`.
pub fn shoot_bvp(params: &GmeParams, config: &SolverConfig) -> Result<GridFunction> {
    config.validate()?;
    let GmeParams {
        beta,
        gamma,
        lambda,
    } = *params;
    let n = config.grid_n;
    let slope = |a: f64| gamma * a / (1.0 + beta * a);
    let miss = |a: f64| match integrate(beta, lambda, n, a, slope(a)) {
        Ok(y) => y[n - 1] - 1.0,
        Err(_) => f64::NAN,
    };

    let bracket = RootBracket::evaluate(miss, 0.0, 1.0).map_err(|_| {
        GmeError::Shooting(format!(
            "no y(0) in [0, 1] brackets y(λ) = 1 for β = {beta}, γ = {gamma}, λ = {lambda}"
        ))
    })?;
    let a = find_root_with(miss, bracket, config.root_tol, config.root_max_iter)?;
    let y = integrate(beta, lambda, n, a, slope(a))?;
    GridFunction::new(lambda, y)
}

/// Solves the Dirichlet problem `y(0) = 0` by shooting on the initial slope.
pub fn shoot_dirichlet(beta: f64, lambda: f64, config: &SolverConfig) -> Result<GridFunction> {
    config.validate()?;
    if !(beta >= 0.0 && lambda > 0.0 && beta.is_finite() && lambda.is_finite()) {
        return Err(GmeError::InvalidParameter(format!(
            "need β ≥ 0 and λ > 0, got β = {beta}, λ = {lambda}"
        )));
    }
    let n = config.grid_n;
    let miss = |s: f64| match integrate(beta, lambda, n, 0.0, s) {
        Ok(y) => y[n - 1] - 1.0,
        Err(_) => f64::NAN,
    };

    let mut hi = 1.0;
    let mut f_hi = miss(hi);
    while f_hi < 0.0 {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(GmeError::Shooting(format!(
                "could not bracket the initial slope for β = {beta}, λ = {lambda}"
            )));
        }
        f_hi = miss(hi);
    }
    let bracket = RootBracket::new(0.0, hi, miss(0.0), f_hi)?;
    let s = find_root_with(miss, bracket, config.root_tol, config.root_max_iter)?;
    GridFunction::new(lambda, integrate(beta, lambda, n, 0.0, s)?)
}

fn integrate(beta: f64, lambda: f64, n: usize, y0: f64, p0: f64) -> Result<Vec<f64>> {
    let h = lambda / (n - 1) as f64;
    let rhs = |eta: f64, y: f64, p: f64| -> (f64, f64) {
        (p, -(beta * p * p + 2.0 * eta * p) / (1.0 + beta * y))
    };

    let mut out = Vec::with_capacity(n);
    let (mut y, mut p) = (y0, p0);
    out.push(y);
    for i in 0..n - 1 {
        let eta = i as f64 * h;
        let (k1y, k1p) = rhs(eta, y, p);
        let (k2y, k2p) = rhs(eta + 0.5 * h, y + 0.5 * h * k1y, p + 0.5 * h * k1p);
        let (k3y, k3p) = rhs(eta + 0.5 * h, y + 0.5 * h * k2y, p + 0.5 * h * k2p);
        let (k4y, k4p) = rhs(eta + h, y + h * k3y, p + h * k3p);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if !(y.is_finite() && p.is_finite()) || 1.0 + beta * y <= 0.0 {
            return Err(GmeError::Shooting(format!(
                "IVP blew up near η = {}",
                eta + h
            )));
        }
        out.push(y);
    }
    Ok(out)
}
