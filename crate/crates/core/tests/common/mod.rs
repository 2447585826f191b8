//! Checks shared by the integration and acceptance suites.
#![allow(dead_code)]

use gme_core::{GmeSolution, GridFunction, StefanSolution};
use rand::Rng;

pub const EPS: f64 = f64::EPSILON;

/// Second difference of the solution at interior node `i`, divided by `h²`.
pub fn second_difference(phi: &GridFunction, i: usize) -> f64 {
    let v = phi.values();
    let h = phi.step();
    (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h)
}

/// `φ''` from the ODE: `-(β φ'² + 2η φ') / (1 + β φ)`.
pub fn phi_second_from_ode(beta: f64, eta: f64, phi: f64, dphi: f64) -> f64 {
    -(beta * dphi * dphi + 2.0 * eta * dphi) / (1.0 + beta * phi)
}

/// Tolerance for the `φ''` identity on grid step `h`: truncation of the
/// second difference plus the roundoff it amplifies.
pub fn identity_tolerance(h: f64, max_slope: f64) -> f64 {
    20.0 * h * h * max_slope.max(1.0) + 64.0 * EPS / (h * h)
}

/// The three shape properties of the GME function plus the `φ''` identity.
/// Differences below what f64 can resolve on values near 1 are only required
/// to have the right sign up to roundoff.
pub fn check_shape(sol: &GmeSolution) -> Result<(), String> {
    let v = sol.phi.values();
    let dv = sol.phi_prime.values();
    let h = sol.phi.step();
    let beta = sol.params.beta;
    let n = v.len();

    if let Some(i) = v.iter().position(|x| !(0.0..=1.0).contains(x)) {
        return Err(format!("φ({}) = {} outside [0, 1]", sol.phi.node(i), v[i]));
    }
    if let Some(i) = dv.iter().position(|&d| d.is_nan() || d <= 0.0) {
        return Err(format!("φ'({}) = {} not positive", sol.phi.node(i), dv[i]));
    }
    for i in 0..n - 1 {
        let diff = v[i + 1] - v[i];
        let resolvable = h * dv[i + 1] > 64.0 * EPS;
        if diff < 0.0 || (resolvable && diff <= 0.0) {
            return Err(format!("forward difference {diff:e} at node {i}"));
        }
    }
    let max_slope = dv.iter().cloned().fold(0.0, f64::max);
    let tol = identity_tolerance(h, max_slope);
    for i in 1..n - 1 {
        let eta = sol.phi.node(i);
        let expected = phi_second_from_ode(beta, eta, v[i], dv[i]);
        let sd = second_difference(&sol.phi, i);
        let resolvable = h * h * expected.abs() > 1e4 * EPS;
        if sd * h * h > 8.0 * EPS || (resolvable && sd >= 0.0) {
            return Err(format!("second difference {sd:e} at η = {eta}"));
        }
        if (sd - expected).abs() > tol {
            return Err(format!(
                "φ'' identity off by {:e} (tol {tol:e}) at η = {eta}",
                (sd - expected).abs()
            ));
        }
    }
    Ok(())
}

/// A random smooth non-decreasing profile in `K`.
pub fn random_monotone_profile(rng: &mut impl Rng, lambda: f64, n: usize) -> GridFunction {
    let lo: f64 = rng.gen_range(0.0..0.9);
    let hi: f64 = rng.gen_range(lo..=1.0);
    let weights: Vec<(f64, f64)> = (0..4)
        .map(|_| (rng.gen_range(0.0..1.0), rng.gen_range(0.3..4.0)))
        .collect();
    let total: f64 = weights.iter().map(|w| w.0).sum::<f64>().max(1e-12);
    GridFunction::from_fn(lambda, n, |x| {
        let s = x / lambda;
        let shape: f64 = weights.iter().map(|(w, p)| w * s.powf(*p)).sum::<f64>() / total;
        (lo + (hi - lo) * shape).clamp(0.0, 1.0)
    })
    .unwrap()
}

/// A random smooth profile in `K` that need not be monotone.
pub fn random_wavy_profile(rng: &mut impl Rng, lambda: f64, n: usize) -> GridFunction {
    let mid: f64 = rng.gen_range(0.2..0.8);
    let amp: f64 = rng.gen_range(0.0..mid.min(1.0 - mid));
    let freq: f64 = rng.gen_range(0.1..6.0);
    let phase: f64 = rng.gen_range(0.0..6.3);
    GridFunction::from_fn(lambda, n, |x| {
        (mid + amp * (freq * x / lambda * std::f64::consts::PI + phase).sin()).clamp(0.0, 1.0)
    })
    .unwrap()
}

/// Relative residual of `ρc T_t = (k(T) T_x)_x` at `(x, t)` by central
/// differences with space step `dx` and time step `dt`, together with the
/// relative size of the roundoff those differences carry.
pub fn heat_equation_residual(
    sol: &StefanSolution,
    x: f64,
    t: f64,
    dx: f64,
    dt: f64,
) -> (f64, f64) {
    let p = &sol.physical;
    let temp = |x: f64, t: f64| sol.temperature(x, t).unwrap();
    let k = |temp: f64| p.conductivity(temp);
    let tt = (temp(x, t + dt) - temp(x, t - dt)) / (2.0 * dt);
    let (tm, t0, tp) = (temp(x - dx, t), temp(x, t), temp(x + dx, t));
    let flux_r = k(0.5 * (t0 + tp)) * (tp - t0) / dx;
    let flux_l = k(0.5 * (tm + t0)) * (t0 - tm) / dx;
    let div = (flux_r - flux_l) / dx;
    let lhs = p.rho * p.c * tt;
    let scale = lhs.abs().max(div.abs()).max(f64::MIN_POSITIVE);
    let temp_ulp = EPS * (p.tf.abs() + p.tinf.abs() + (p.tf - p.tinf));
    let roundoff = 8.0 * temp_ulp * (p.k0 * (1.0 + p.beta) / (dx * dx) + p.rho * p.c / dt);
    ((lhs - div).abs() / scale, roundoff / scale)
}

/// Relative residual of `k(T_f) T_x(s(t), t) = ρ l ṡ(t)`, with a one-sided
/// second-order difference for `T_x`.
pub fn stefan_condition_residual(sol: &StefanSolution, t: f64, dx: f64) -> f64 {
    let p = &sol.physical;
    let s = sol.front_position(t).unwrap();
    let temp = |x: f64| sol.temperature(x, t).unwrap();
    let tx = (3.0 * temp(s) - 4.0 * temp(s - dx) + temp(s - 2.0 * dx)) / (2.0 * dx);
    let sdot = sol.lambda_star * (sol.alpha0 / t).sqrt();
    let rhs = p.rho * p.l * sdot;
    (p.conductivity(p.tf) * tx - rhs).abs() / rhs.abs()
}
