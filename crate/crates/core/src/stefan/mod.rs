//! Free-boundary layer.
//!
//! A similarity solution `T(x, t) = (T_f - T_∞) φ(x / (2√(α₀t))) + T_∞`,
//! `s(t) = 2λ√(α₀t)` exists exactly when `φ` is the GME function on
//! `[0, λ]` with `γ = 2 Bi` and
//!
//! ```text
//! H(λ) := φ'(λ) / λ = 2 / ((1 + β) Ste∞).
//! ```
//!
//! `H` decreases from `+∞` at `λ → 0⁺` to `0` at `λ → ∞`, so the interface
//! coefficient `λ*` is found by expanding a bracket and running Brent on
//! `H(λ) - rhs`.

mod dirichlet;

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

pub use dirichlet::{
    dirichlet_contraction, dirichlet_gap, dirichlet_threshold, solve_dirichlet_gme,
    DirichletSolution,
};

use crate::error::{GmeError, Result};
use crate::gme::{beta1, solve_gme, GmeParams, GmeSolution, SolverConfig, BETA1_TOL};
use crate::numerics::{erf, find_root_with, RootBracket};

/// Dimensional inputs. Units are the caller's, as long as they are
/// consistent (SI throughout is the usual choice; `h0` is such that
/// `h0/√t` is a heat transfer coefficient).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Density.
    pub rho: f64,
    /// Specific heat.
    pub c: f64,
    /// Latent heat per unit mass.
    pub l: f64,
    /// Conductivity at `T_∞`.
    pub k0: f64,
    pub h0: f64,
    /// Freezing temperature.
    pub tf: f64,
    /// Ambient temperature at the fixed face, below `tf`.
    pub tinf: f64,
    /// Dimensionless slope of `k(T)`.
    pub beta: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho", self.rho),
            ("c", self.c),
            ("l", self.l),
            ("k0", self.k0),
            ("h0", self.h0),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(GmeError::InvalidParameter(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        if !(self.tf.is_finite() && self.tinf.is_finite()) {
            return Err(GmeError::InvalidParameter(
                "temperatures must be finite".into(),
            ));
        }
        if self.tinf >= self.tf {
            return Err(GmeError::InvalidParameter(format!(
                "ambient temperature {} must be below the freezing temperature {}",
                self.tinf, self.tf
            )));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(GmeError::InvalidParameter(format!(
                "β must be ≥ 0, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    /// Thermal diffusivity `k0 / (ρc)`.
    pub fn alpha0(&self) -> f64 {
        self.k0 / (self.rho * self.c)
    }

    /// `Ste∞ = c (T_f - T_∞) / l`.
    pub fn stefan_number(&self) -> f64 {
        self.c * (self.tf - self.tinf) / self.l
    }

    /// `Bi = h0 √α₀ / k0`.
    pub fn biot(&self) -> f64 {
        self.h0 * self.alpha0().sqrt() / self.k0
    }

    pub fn gamma(&self) -> f64 {
        2.0 * self.biot()
    }

    /// `k(T) = k0 (1 + β (T - T_∞)/(T_f - T_∞))`.
    pub fn conductivity(&self, temp: f64) -> f64 {
        self.k0 * (1.0 + self.beta * (temp - self.tinf) / (self.tf - self.tinf))
    }

    /// A parameter set with the given dimensionless groups: `ρ = c = l = k0 = 1`,
    /// `T_∞ = 0`, `T_f = Ste`, `h0 = Bi`.
    pub fn from_dimensionless(beta: f64, biot: f64, ste: f64) -> Self {
        Self {
            rho: 1.0,
            c: 1.0,
            l: 1.0,
            k0: 1.0,
            h0: biot,
            tf: ste,
            tinf: 0.0,
            beta,
        }
    }
}

/// `g₁(λ) < φ'(λ) < g₂(λ)` and the `λ → 0⁺` limit of `φ'(λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeBounds {
    /// `γ/(1+β) · e^{-λ²} · (1 + γ ∫₀^λ e^{-η²/(1+β)} dη)⁻¹`.
    pub lower: f64,
    /// `γ/(1+β) · e^{-λ/(1+β)}`. Only an upper bound for `λ ≥ 1`.
    pub upper: f64,
    /// `γ/(1+β) · e^{-λ²/(1+β)}`, valid for every `λ > 0`.
    pub upper_sharp: f64,
    /// `γ/(1+β)`.
    pub limit: f64,
}

pub fn derivative_bounds(beta: f64, gamma: f64, lambda: f64) -> DerivativeBounds {
    let scale = 1.0 + beta;
    let limit = gamma / scale;
    let gaussian = scale.sqrt() * 0.5 * PI.sqrt() * erf(lambda / scale.sqrt());
    DerivativeBounds {
        lower: limit * (-lambda * lambda).exp() / (1.0 + gamma * gaussian),
        upper: limit * (-lambda / scale).exp(),
        upper_sharp: limit * (-lambda * lambda / scale).exp(),
        limit,
    }
}

type CacheKey = (u64, u64, u64, usize, u64);

/// Process-wide memo of `H` values keyed on `(β, γ, λ, grid_n, fp_tol)`.
/// Readers share the lock; inserts take it exclusively.
#[derive(Debug, Default)]
pub struct HCache {
    map: RwLock<HashMap<CacheKey, f64>>,
}

impl HCache {
    pub fn global() -> &'static HCache {
        static CACHE: OnceLock<HCache> = OnceLock::new();
        CACHE.get_or_init(HCache::default)
    }

    fn key(beta: f64, gamma: f64, lambda: f64, config: &SolverConfig) -> CacheKey {
        (
            beta.to_bits(),
            gamma.to_bits(),
            lambda.to_bits(),
            config.grid_n,
            config.fp_tol.to_bits(),
        )
    }

    pub fn get_or_compute(
        &self,
        beta: f64,
        gamma: f64,
        lambda: f64,
        config: &SolverConfig,
    ) -> Result<f64> {
        let key = Self::key(beta, gamma, lambda, config);
        if let Some(v) = self.map.read().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(*v);
        }
        let value = h_uncached(lambda, beta, gamma, config)?;
        self.map
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key, value);
        Ok(value)
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn h_uncached(lambda: f64, beta: f64, gamma: f64, config: &SolverConfig) -> Result<f64> {
    let sol = solve_gme(&GmeParams::new(beta, gamma, lambda)?, config)?;
    Ok(sol.phi_prime_lambda / lambda)
}

/// `H(λ) = φ'(λ)/λ`, memoised in [`HCache::global`].
pub fn h_function(lambda: f64, beta: f64, gamma: f64, config: &SolverConfig) -> Result<f64> {
    HCache::global().get_or_compute(beta, gamma, lambda, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaRoot {
    pub lambda: f64,
    /// `2 / ((1+β) Ste)`.
    pub rhs: f64,
    /// Sign changes of `H - rhs` seen by a coarse scan around the bracket.
    pub sign_changes: usize,
    pub multiple_roots_suspected: bool,
}

const LAMBDA_CAP: f64 = 50.0;
const LAMBDA_FLOOR: f64 = 1e-12;
const SCAN_POINTS: usize = 48;

/// Solves `H(λ) = 2 / ((1+β) Ste)` for the smallest bracketed `λ*`.
pub fn solve_lambda(beta: f64, gamma: f64, ste: f64, config: &SolverConfig) -> Result<LambdaRoot> {
    if !(ste.is_finite() && ste > 0.0) {
        return Err(GmeError::InvalidParameter(format!(
            "Stefan number must be > 0, got {ste}"
        )));
    }
    GmeParams::new(beta, gamma, 1.0)?;
    config.validate()?;
    let rhs = 2.0 / ((1.0 + beta) * ste);

    let failure: RefCell<Option<GmeError>> = RefCell::new(None);
    let f = |lambda: f64| match h_function(lambda, beta, gamma, config) {
        Ok(h) => h - rhs,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let take_failure = || failure.borrow_mut().take();

    let mut lo = 1e-3;
    let mut f_lo = f(lo);
    while f_lo <= 0.0 {
        lo /= 10.0;
        if lo < LAMBDA_FLOOR {
            return Err(GmeError::BracketingFailed(format!(
                "H(λ) stays below {rhs} down to λ = {LAMBDA_FLOOR}"
            )));
        }
        f_lo = f(lo);
    }
    let mut hi = 1.0;
    let mut f_hi = f(hi);
    while f_hi > 0.0 {
        hi *= 2.0;
        if hi > LAMBDA_CAP {
            return Err(GmeError::BracketingFailed(format!(
                "H(λ) stays above {rhs} up to λ = {LAMBDA_CAP}"
            )));
        }
        f_hi = f(hi);
    }
    if let Some(e) = take_failure() {
        return Err(e);
    }

    let bracket = RootBracket::new(lo, hi, f_lo, f_hi)?;
    let lambda = find_root_with(f, bracket, config.root_tol, config.root_max_iter)
        .map_err(|e| take_failure().unwrap_or(e))?;

    // coarse log-spaced scan for further crossings
    let (a, b) = (lo.ln(), (2.0 * hi).ln());
    let mut sign_changes = 0;
    let mut prev = f_lo;
    for i in 1..=SCAN_POINTS {
        let x = (a + (b - a) * i as f64 / SCAN_POINTS as f64).exp();
        let v = f(x);
        if v.is_finite() && prev.is_finite() && (v > 0.0) != (prev > 0.0) {
            sign_changes += 1;
        }
        prev = v;
    }
    take_failure();

    Ok(LambdaRoot {
        lambda,
        rhs,
        sign_changes,
        multiple_roots_suspected: sign_changes > 1,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StefanSolution {
    pub physical: PhysicalParams,
    pub lambda_star: f64,
    /// GME function on `[0, λ*]`.
    pub gme: GmeSolution,
    /// `2 / ((1+β) Ste∞)`.
    pub rhs: f64,
    pub ste: f64,
    pub bi: f64,
    pub gamma: f64,
    pub alpha0: f64,
    pub multiple_roots_suspected: bool,
}

/// Similarity solution for the given physical parameters.
pub fn solve_stefan(physical: &PhysicalParams, config: &SolverConfig) -> Result<StefanSolution> {
    physical.validate()?;
    let ste = physical.stefan_number();
    let bi = physical.biot();
    let gamma = 2.0 * bi;
    let beta = physical.beta;
    let threshold = beta1(gamma, BETA1_TOL)?;
    if beta >= threshold && !config.allow_uncertified {
        return Err(GmeError::ContractionNotGuaranteed { beta, threshold });
    }

    let root = solve_lambda(beta, gamma, ste, config)?;
    let gme = solve_gme(&GmeParams::new(beta, gamma, root.lambda)?, config)?;
    Ok(StefanSolution {
        physical: *physical,
        lambda_star: root.lambda,
        gme,
        rhs: root.rhs,
        ste,
        bi,
        gamma,
        alpha0: physical.alpha0(),
        multiple_roots_suspected: root.multiple_roots_suspected,
    })
}

impl StefanSolution {
    /// `s(t) = 2 λ* √(α₀ t)`.
    pub fn front_position(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(GmeError::OutOfDomain {
                quantity: "t",
                value: t,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(2.0 * self.lambda_star * (self.alpha0 * t).sqrt())
    }

    fn similarity_variable(&self, x: f64, t: f64) -> Result<f64> {
        if !(t.is_finite() && t > 0.0) {
            return Err(GmeError::OutOfDomain {
                quantity: "t",
                value: t,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        let front = self.front_position(t)?;
        if !(0.0..=front).contains(&x) {
            return Err(GmeError::OutOfDomain {
                quantity: "x",
                value: x,
                lo: 0.0,
                hi: front,
            });
        }
        Ok((x / (2.0 * (self.alpha0 * t).sqrt())).min(self.lambda_star))
    }

    /// Temperature in the solid, `0 ≤ x ≤ s(t)`, `t > 0`.
    pub fn temperature(&self, x: f64, t: f64) -> Result<f64> {
        let eta = self.similarity_variable(x, t)?;
        let p = &self.physical;
        Ok((p.tf - p.tinf) * self.gme.eval(eta)? + p.tinf)
    }

    /// `∂T/∂x` in the solid.
    pub fn temperature_gradient(&self, x: f64, t: f64) -> Result<f64> {
        let eta = self.similarity_variable(x, t)?;
        let p = &self.physical;
        Ok((p.tf - p.tinf) * self.gme.eval_derivative(eta)? / (2.0 * (self.alpha0 * t).sqrt()))
    }

    /// `(1+β) Ste∞ φ'(λ*) - 2λ*`, zero for an exact interface coefficient.
    pub fn stefan_residual(&self) -> f64 {
        (1.0 + self.physical.beta) * self.ste * self.gme.phi_prime_lambda - 2.0 * self.lambda_star
    }
}
