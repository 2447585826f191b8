//! Fixed-point construction of the GME function.
//!
//! For `h ∈ K` (grid functions with `0 ≤ h ≤ 1`) let `Ψ_h = 1 + βh` and
//!
//! ```text
//! F_h(x) = exp(-2 ∫₀ˣ ξ/Ψ_h(ξ) dξ) / Ψ_h(x),      G_h(η) = ∫₀^η F_h,
//! D_h    = γ / (1 + γ G_h(λ)),
//! (τh)(η) = D_h (1/γ + G_h(η)).
//! ```
//!
//! `τ` maps `K` into itself and is a contraction with constant
//! `g(β) = (√π/2) γ β (1+β)^{1/2} (3+β)` whenever `β < β₁(γ)`, the root of
//! `g = 1`. Its fixed point solves the nonlinear Robin problem; Picard
//! iteration from the constant-conductivity profile finds it.

use std::f64::consts::PI;

use serde::Serialize;

use crate::approx::phi0_grid;
use crate::error::{GmeError, Result};
use crate::numerics::{cumulative_integral, find_root, GridFunction, RootBracket};

/// Absolute tolerance used when `β₁` is computed internally.
pub const BETA1_TOL: f64 = 1e-14;

/// Dimensionless parameters `(β, γ, λ)` of the GME problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GmeParams {
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
}

impl GmeParams {
    pub fn new(beta: f64, gamma: f64, lambda: f64) -> Result<Self> {
        let p = Self {
            beta,
            gamma,
            lambda,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(GmeError::InvalidParameter(format!(
                "β must be ≥ 0, got {}",
                self.beta
            )));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(GmeError::InvalidParameter(format!(
                "γ must be > 0, got {}",
                self.gamma
            )));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(GmeError::InvalidParameter(format!(
                "λ must be > 0, got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    /// Whether `β < β₁(γ)`, i.e. the fixed point is certified unique.
    pub fn contraction_valid(&self) -> bool {
        beta1(self.gamma, BETA1_TOL)
            .map(|b1| self.beta < b1)
            .unwrap_or(false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Grid nodes on `[0, λ]`.
    pub grid_n: usize,
    /// Sup-norm change between Picard iterates that counts as converged.
    pub fp_tol: f64,
    pub fp_max_iter: usize,
    pub root_tol: f64,
    pub root_max_iter: usize,
    /// Iterate even when `β ≥ β₁`; such results carry `certified = false`.
    pub allow_uncertified: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid_n: 1001,
            fp_tol: 1e-10,
            fp_max_iter: 500,
            root_tol: 1e-12,
            root_max_iter: 200,
            allow_uncertified: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 2 {
            return Err(GmeError::InvalidParameter(format!(
                "grid_n must be ≥ 2, got {}",
                self.grid_n
            )));
        }
        if !(self.fp_tol > 0.0 && self.root_tol > 0.0) {
            return Err(GmeError::InvalidParameter("tolerances must be > 0".into()));
        }
        if self.fp_max_iter == 0 || self.root_max_iter == 0 {
            return Err(GmeError::InvalidParameter(
                "iteration caps must be ≥ 1".into(),
            ));
        }
        Ok(())
    }
}

/// Converged fixed point of `τ`.
#[derive(Debug, Clone, Serialize)]
pub struct GmeSolution {
    pub params: GmeParams,
    /// `φ` on the grid; the last node is exactly 1.
    pub phi: GridFunction,
    /// `φ'` on the grid, from the fixed-point identity `φ' = D·F_φ`.
    pub phi_prime: GridFunction,
    pub d_coeff: f64,
    pub phi_prime_lambda: f64,
    pub iterations: usize,
    /// Sup-norm change at the last iteration.
    pub residual: f64,
    pub residual_history: Vec<f64>,
    /// `false` when `β ≥ β₁(γ)` and the caller opted in anyway.
    pub certified: bool,
}

impl GmeSolution {
    /// `φ(η)` between nodes by cubic Hermite interpolation on values and
    /// derivatives.
    pub fn eval(&self, eta: f64) -> Result<f64> {
        hermite(&self.phi, &self.phi_prime, eta).map(|(v, _)| v.clamp(0.0, 1.0))
    }

    /// `φ'(η)` from the same Hermite interpolant.
    pub fn eval_derivative(&self, eta: f64) -> Result<f64> {
        hermite(&self.phi, &self.phi_prime, eta).map(|(_, d)| d)
    }
}

pub(crate) fn hermite(
    values: &GridFunction,
    slopes: &GridFunction,
    eta: f64,
) -> Result<(f64, f64)> {
    let (i, t) = values.locate(eta)?;
    let y = values.values();
    let m = slopes.values();
    if t == 0.0 {
        return Ok((y[i], m[i]));
    }
    let h = values.step();
    let (t2, t3) = (t * t, t * t * t);
    let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y[i]
        + (t3 - 2.0 * t2 + t) * h * m[i]
        + (-2.0 * t3 + 3.0 * t2) * y[i + 1]
        + (t3 - t2) * h * m[i + 1];
    let d = ((6.0 * t2 - 6.0 * t) * (y[i] - y[i + 1])) / h
        + (3.0 * t2 - 4.0 * t + 1.0) * m[i]
        + (3.0 * t2 - 2.0 * t) * m[i + 1];
    Ok((v, d))
}

pub(crate) fn check_in_k(h: &GridFunction) -> Result<()> {
    match h.values().iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(index) => Err(GmeError::NotInK {
            index,
            value: h.values()[index],
        }),
        None => Ok(()),
    }
}

/// `Ψ_h = 1 + βh`.
pub fn psi(h: &GridFunction, beta: f64) -> Result<GridFunction> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(GmeError::InvalidParameter(format!(
            "β must be ≥ 0, got {beta}"
        )));
    }
    check_in_k(h)?;
    Ok(h.map(|_, v| 1.0 + beta * v))
}

/// `F_h` and its running integral `G_h`, shared by both operators.
pub(crate) struct Kernel {
    pub weight: GridFunction,
    pub cumulative: GridFunction,
}

impl Kernel {
    pub fn total(&self) -> f64 {
        *self.cumulative.values().last().unwrap()
    }
}

pub(crate) fn kernel(h: &GridFunction, beta: f64) -> Result<Kernel> {
    let psi_h = psi(h, beta)?;
    let ratio = psi_h.map(|eta, p| eta / p);
    let inner = cumulative_integral(&ratio);
    let weight = GridFunction::from_parts_unchecked(
        h.lambda(),
        inner
            .values()
            .iter()
            .zip(psi_h.values())
            .map(|(i, p)| (-2.0 * i).exp() / p)
            .collect(),
    );
    let cumulative = cumulative_integral(&weight);
    Ok(Kernel { weight, cumulative })
}

fn check_lambda(h: &GridFunction, lambda: f64) -> Result<()> {
    if h.lambda() != lambda {
        return Err(GmeError::InvalidGrid(format!(
            "grid ends at {} but λ = {lambda}",
            h.lambda()
        )));
    }
    Ok(())
}

/// `D_h = γ (1 + γ ∫₀^λ F_h)⁻¹`.
pub fn compute_d(h: &GridFunction, params: &GmeParams) -> Result<f64> {
    params.validate()?;
    check_lambda(h, params.lambda)?;
    let k = kernel(h, params.beta)?;
    Ok(params.gamma / (1.0 + params.gamma * k.total()))
}

pub(crate) struct TauImage {
    pub values: GridFunction,
    pub derivative: GridFunction,
    pub d: f64,
}

/// `τh` written as `1 - D_h (G_h(λ) - G_h(η))`, which equals
/// `D_h (1/γ + G_h(η))` and keeps `τh ≤ 1` and `τh(λ) = 1` exact in floating
/// point.
pub(crate) fn tau_image(h: &GridFunction, params: &GmeParams) -> Result<TauImage> {
    check_lambda(h, params.lambda)?;
    let k = kernel(h, params.beta)?;
    let total = k.total();
    let d = params.gamma / (1.0 + params.gamma * total);
    let mut values: Vec<f64> = k
        .cumulative
        .values()
        .iter()
        .map(|g| 1.0 - d * (total - g))
        .collect();
    *values.last_mut().unwrap() = 1.0;
    let derivative = k.weight.map(|_, f| d * f);
    Ok(TauImage {
        values: GridFunction::from_parts_unchecked(h.lambda(), values),
        derivative,
        d,
    })
}

/// One application of the operator `τ`.
pub fn apply_tau(h: &GridFunction, params: &GmeParams) -> Result<GridFunction> {
    params.validate()?;
    Ok(tau_image(h, params)?.values)
}

/// `g(x) = (√π/2) γ x (1+x)^{1/2} (3+x)`.
pub fn g_contraction(x: f64, gamma: f64) -> f64 {
    0.5 * PI.sqrt() * gamma * x * (1.0 + x).sqrt() * (3.0 + x)
}

/// `β₁(γ)`, the unique positive root of `g(x) = 1`.
pub fn beta1(gamma: f64, tol: f64) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(GmeError::InvalidParameter(format!(
            "γ must be > 0, got {gamma}"
        )));
    }
    let f = |x: f64| g_contraction(x, gamma) - 1.0;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    find_root(f, RootBracket::evaluate(f, 0.0, hi)?, tol)
}

/// Lipschitz constant of `β ↦ φ_β` on `[0, b]`: `L = 1 / (β₁ (1 - g(b)))`.
pub fn lipschitz_bound(b: f64, gamma: f64) -> Result<f64> {
    let b1 = beta1(gamma, BETA1_TOL)?;
    if !(b >= 0.0 && b < b1) {
        return Err(GmeError::OutOfDomain {
            quantity: "b",
            value: b,
            lo: 0.0,
            hi: b1,
        });
    }
    Ok(1.0 / (b1 * (1.0 - g_contraction(b, gamma))))
}

/// Picard iteration `h_{k+1} = τh_k` from the `β = 0` profile until the
/// sup-norm change drops to `config.fp_tol`.
pub fn solve_gme(params: &GmeParams, config: &SolverConfig) -> Result<GmeSolution> {
    params.validate()?;
    config.validate()?;
    let threshold = beta1(params.gamma, BETA1_TOL)?;
    let certified = params.beta < threshold;
    if !certified && !config.allow_uncertified {
        return Err(GmeError::ContractionNotGuaranteed {
            beta: params.beta,
            threshold,
        });
    }

    let mut h = phi0_grid(params.gamma, params.lambda, config.grid_n);
    let mut history = Vec::new();
    for k in 1..=config.fp_max_iter {
        let img = tau_image(&h, params)?;
        let residual = img.values.sup_distance(&h)?;
        history.push(residual);
        h = img.values;
        if residual <= config.fp_tol {
            let phi_prime_lambda = *img.derivative.values().last().unwrap();
            return Ok(GmeSolution {
                params: *params,
                phi: h,
                phi_prime: img.derivative,
                d_coeff: img.d,
                phi_prime_lambda,
                iterations: k,
                residual,
                residual_history: history,
                certified,
            });
        }
        if !residual.is_finite() {
            break;
        }
    }
    Err(GmeError::NotConverged {
        iterations: config.fp_max_iter,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::phi0;
    use crate::numerics::erf;

    fn profile(lambda: f64, n: usize, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(lambda, n, f).unwrap()
    }

    #[test]
    fn psi_bounds() {
        let h = profile(2.0, 21, |x| erf(x) / erf(2.0));
        assert!(psi(&h, 0.0).unwrap().values().iter().all(|&v| v == 1.0));
        let ones = profile(2.0, 21, |_| 1.0);
        assert!(psi(&ones, 0.5).unwrap().values().iter().all(|&v| v == 1.5));
        let p = psi(&h, 0.3).unwrap();
        assert!(p.values().iter().all(|&v| (1.0..=1.3).contains(&v)));
        let bad = profile(2.0, 21, |x| x);
        assert!(matches!(psi(&bad, 0.3), Err(GmeError::NotInK { .. })));
    }

    #[test]
    fn d_at_zero_beta_is_closed_form() {
        let (gamma, lambda) = (3.0, 1.7);
        let params = GmeParams::new(0.0, gamma, lambda).unwrap();
        let exact = gamma / (1.0 + gamma * 0.5 * PI.sqrt() * erf(lambda));
        for h in [
            profile(lambda, 1001, |_| 0.0),
            profile(lambda, 1001, |x| x / lambda),
        ] {
            assert!((compute_d(&h, &params).unwrap() - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn d_tends_to_gamma_for_small_lambda() {
        let params = GmeParams::new(0.2, 2.0, 1e-6).unwrap();
        let h = profile(1e-6, 11, |_| 0.5);
        assert!((compute_d(&h, &params).unwrap() - 2.0).abs() < 1e-5);
    }

    #[test]
    fn tau_endpoint_and_origin() {
        let params = GmeParams::new(0.2, 1.5, 2.0).unwrap();
        let h = profile(2.0, 101, |x| (x / 2.0).powi(2));
        let d = compute_d(&h, &params).unwrap();
        let t = apply_tau(&h, &params).unwrap();
        assert_eq!(t.values()[100], 1.0);
        assert!((t.values()[0] - d / params.gamma).abs() < 1e-14);
        assert!(t.values().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn tau_at_zero_beta_gives_phi0() {
        let params = GmeParams::new(0.0, 1.0, 3.0).unwrap();
        let h = profile(3.0, 1001, |x| 0.5 + 0.1 * x.sin());
        let t = apply_tau(&h, &params).unwrap();
        for (i, v) in t.values().iter().enumerate() {
            assert!((v - phi0(t.node(i), 1.0, 3.0).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn tau_rejects_functions_outside_k() {
        let params = GmeParams::new(0.1, 1.0, 1.0).unwrap();
        let h = profile(1.0, 11, |x| 2.0 * x);
        assert!(matches!(
            apply_tau(&h, &params),
            Err(GmeError::NotInK { .. })
        ));
        let wrong_grid = profile(2.0, 11, |_| 0.5);
        assert!(matches!(
            apply_tau(&wrong_grid, &params),
            Err(GmeError::InvalidGrid(_))
        ));
    }

    #[test]
    fn g_values() {
        assert_eq!(g_contraction(0.0, 3.0), 0.0);
        assert!((g_contraction(1.0, 1.0) - 2.0 * (2.0 * PI).sqrt()).abs() < 1e-14);
        assert!((g_contraction(1.0, 1.0) - 5.013_257).abs() < 1e-6);
        for gamma in [0.1, 1.0, 10.0, 100.0] {
            let b1 = beta1(gamma, 1e-14).unwrap();
            assert!((g_contraction(b1, gamma) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn beta1_rejects_bad_gamma() {
        assert!(beta1(0.0, 1e-12).is_err());
        assert!(beta1(-1.0, 1e-12).is_err());
        // small γ needs the bracket to grow
        let b1 = beta1(1e-3, 1e-12).unwrap();
        assert!(b1 > 1.0 && (g_contraction(b1, 1e-3) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lipschitz_constant() {
        let b1 = beta1(1.0, BETA1_TOL).unwrap();
        assert!((lipschitz_bound(0.0, 1.0).unwrap() - 1.0 / b1).abs() < 1e-12);
        let l = lipschitz_bound(0.15, 1.0).unwrap();
        assert!((l - 1.0 / (b1 * (1.0 - g_contraction(0.15, 1.0)))).abs() < 1e-12);
        let samples: Vec<f64> = [0.5, 0.9, 0.99, 0.999]
            .iter()
            .map(|f| lipschitz_bound(f * b1, 1.0).unwrap())
            .collect();
        assert!(samples.windows(2).all(|w| w[1] > w[0]));
        assert!(samples[3] > 100.0 * samples[0]);
        assert!(lipschitz_bound(b1, 1.0).is_err());
        assert!(lipschitz_bound(-0.1, 1.0).is_err());
    }

    #[test]
    fn refuses_beyond_threshold_unless_asked() {
        let params = GmeParams::new(0.3, 1.0, 10.0).unwrap();
        let err = solve_gme(&params, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, GmeError::ContractionNotGuaranteed { .. }));
        let cfg = SolverConfig {
            allow_uncertified: true,
            ..SolverConfig::default()
        };
        let sol = solve_gme(&params, &cfg).unwrap();
        assert!(!sol.certified);
        assert!(sol.residual <= cfg.fp_tol);
    }

    #[test]
    fn reports_non_convergence() {
        let params = GmeParams::new(0.25, 1.0, 5.0).unwrap();
        let cfg = SolverConfig {
            fp_max_iter: 2,
            fp_tol: 1e-15,
            ..SolverConfig::default()
        };
        assert!(matches!(
            solve_gme(&params, &cfg),
            Err(GmeError::NotConverged { iterations: 2, .. })
        ));
    }

    #[test]
    fn solution_structure() {
        let params = GmeParams::new(0.2, 1.0, 2.0).unwrap();
        let sol = solve_gme(&params, &SolverConfig::default()).unwrap();
        let v = sol.phi.values();
        assert_eq!(v[v.len() - 1], 1.0);
        assert!((v[0] - sol.d_coeff / params.gamma).abs() < 1e-10);
        assert!(sol.d_coeff > 0.0 && sol.d_coeff <= params.gamma);
        assert!(sol.certified);
        // Hermite evaluation reproduces nodes and stays between them
        assert_eq!(sol.eval(2.0).unwrap(), 1.0);
        assert!((sol.eval(sol.phi.node(37)).unwrap() - v[37]).abs() < 1e-15);
        let mid = sol
            .eval(0.5 * (sol.phi.node(10) + sol.phi.node(11)))
            .unwrap();
        assert!(mid > v[10] && mid < v[11]);
    }
}
