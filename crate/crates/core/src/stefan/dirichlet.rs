//! The Dirichlet-face variant `y(0) = 0`, recovered from the Robin problem
//! as `γ → ∞`. Its solution `φ†` is the fixed point of
//! `(τ†h)(η) = G_h(η) / G_h(λ)`.
//!
//! Lipschitz constant used for certification: `β (1+β)^{3/2} (3+β) / erf(λ)`,
//! from the same integrand estimate as the Robin operator together with
//! `G_h(λ) ≥ (√π/2) erf(λ) / (1+β)`.

use serde::Serialize;

use crate::error::{GmeError, Result};
use crate::gme::{kernel, solve_gme, GmeParams, SolverConfig};
use crate::numerics::{erf, find_root, GridFunction, RootBracket};

#[derive(Debug, Clone, Serialize)]
pub struct DirichletSolution {
    pub beta: f64,
    pub lambda: f64,
    pub phi: GridFunction,
    pub phi_prime: GridFunction,
    /// Normalising constant `C = 1 / G_φ(λ)`.
    pub c_coeff: f64,
    pub phi_prime_lambda: f64,
    pub iterations: usize,
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub certified: bool,
}

impl DirichletSolution {
    pub fn eval(&self, eta: f64) -> Result<f64> {
        crate::gme::hermite(&self.phi, &self.phi_prime, eta).map(|(v, _)| v.clamp(0.0, 1.0))
    }
}

/// Contraction factor of `τ†` for a given `β` on `[0, λ]`.
pub fn dirichlet_contraction(beta: f64, lambda: f64) -> f64 {
    beta * (1.0 + beta).powf(1.5) * (3.0 + beta) / erf(lambda)
}

/// Largest `β` for which `τ†` is certified to contract on `[0, λ]`.
pub fn dirichlet_threshold(lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(GmeError::InvalidParameter(format!(
            "λ must be > 0, got {lambda}"
        )));
    }
    let f = |b: f64| dirichlet_contraction(b, lambda) - 1.0;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    find_root(f, RootBracket::evaluate(f, 0.0, hi)?, 1e-14)
}

fn tau_dagger(h: &GridFunction, beta: f64) -> Result<(GridFunction, GridFunction, f64)> {
    let k = kernel(h, beta)?;
    let total = k.total();
    let c = 1.0 / total;
    let mut values: Vec<f64> = k
        .cumulative
        .values()
        .iter()
        .map(|g| (g * c).min(1.0))
        .collect();
    *values.last_mut().unwrap() = 1.0;
    let derivative = k.weight.map(|_, f| c * f);
    Ok((GridFunction::new(h.lambda(), values)?, derivative, c))
}

/// Picard iteration for `φ†`, starting from `erf(η)/erf(λ)`.
pub fn solve_dirichlet_gme(
    beta: f64,
    lambda: f64,
    config: &SolverConfig,
) -> Result<DirichletSolution> {
    config.validate()?;
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(GmeError::InvalidParameter(format!(
            "β must be ≥ 0, got {beta}"
        )));
    }
    let threshold = dirichlet_threshold(lambda)?;
    let certified = beta < threshold;
    if !certified && !config.allow_uncertified {
        return Err(GmeError::ContractionNotGuaranteed { beta, threshold });
    }

    let e_lambda = erf(lambda);
    let mut h = GridFunction::from_fn(lambda, config.grid_n, |x| (erf(x) / e_lambda).min(1.0))?;
    let mut history = Vec::new();
    for k in 1..=config.fp_max_iter {
        let (next, derivative, c) = tau_dagger(&h, beta)?;
        let residual = next.sup_distance(&h)?;
        history.push(residual);
        h = next;
        if residual <= config.fp_tol {
            let phi_prime_lambda = *derivative.values().last().unwrap();
            return Ok(DirichletSolution {
                beta,
                lambda,
                phi: h,
                phi_prime: derivative,
                c_coeff: c,
                phi_prime_lambda,
                iterations: k,
                residual,
                residual_history: history,
                certified,
            });
        }
    }
    Err(GmeError::NotConverged {
        iterations: config.fp_max_iter,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// `‖φ_γ - φ†‖_∞` for each `γ`, at fixed `β` and `λ`.
pub fn dirichlet_gap(
    beta: f64,
    lambda: f64,
    gammas: &[f64],
    config: &SolverConfig,
) -> Result<Vec<f64>> {
    let dagger = solve_dirichlet_gme(beta, lambda, config)?;
    gammas
        .iter()
        .map(|&gamma| {
            let sol = solve_gme(&GmeParams::new(beta, gamma, lambda)?, config)?;
            sol.phi.sup_distance(&dagger.phi)
        })
        .collect()
}
