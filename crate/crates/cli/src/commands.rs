use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::Args;
use gme_core::approx::approximation;
use gme_core::gme::BETA1_TOL;
use gme_core::{
    approx_coeffs, approx_error, beta1, h_function, solve_dirichlet_gme, solve_gme, solve_stefan,
    GmeParams, GmeSolution, PhysicalParams, SolverConfig,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::output::{emit, Table};
use crate::{BetaArgs, OutputArgs, PartialFailure};

pub const DEFAULT_GAMMAS: [f64; 4] = [0.1, 1.0, 10.0, 100.0];
const DEFAULT_TIMES: [f64; 2] = [1.0, 4.0];
const DEFAULT_PROFILE_POINTS: usize = 11;

fn round_to_three_digits(x: f64) -> f64 {
    let scale = 10f64.powf(x.abs().log10().floor() - 2.0);
    (x / scale).round() * scale
}

impl BetaArgs {
    fn resolve(&self, gamma: f64) -> Result<f64> {
        if let Some(beta) = self.beta {
            return Ok(beta);
        }
        let b1 = beta1(gamma, BETA1_TOL)?;
        match self.beta_frac {
            Some(frac) => {
                ensure!(frac >= 0.0, "--beta-frac must be ≥ 0, got {frac}");
                Ok(frac * b1)
            }
            None => Ok(round_to_three_digits(b1)),
        }
    }
}

fn write_table(table: &Table, output: &OutputArgs) -> Result<()> {
    emit(&table.render(output.format), output.out.as_deref())
}

pub fn beta1_table(gammas: &[f64], output: &OutputArgs) -> Result<()> {
    let mut table = Table::new(vec!["gamma", "beta1"]);
    let mut failures = Vec::new();
    for &gamma in gammas {
        match beta1(gamma, BETA1_TOL) {
            Ok(b) => table.push(vec![gamma, b]),
            Err(err) => {
                table.push(vec![gamma, f64::NAN]);
                failures.push(format!("γ = {gamma}: {err}"));
            }
        }
    }
    write_table(&table, output)?;
    if !failures.is_empty() {
        bail!(failures.join("; "));
    }
    Ok(())
}

pub fn gme(
    beta: BetaArgs,
    gamma: f64,
    lambda: f64,
    config: &SolverConfig,
    output: &OutputArgs,
) -> Result<()> {
    let params = GmeParams::new(beta.resolve(gamma)?, gamma, lambda)?;
    let sol = solve_gme(&params, config)?;
    if !sol.certified {
        eprintln!(
            "warning: β = {} is at or above β₁(γ); result is uncertified",
            params.beta
        );
    }
    let coeffs = approx_coeffs(gamma, lambda)?;
    let mut table = Table::new(vec![
        "eta",
        "phi",
        "phi0",
        "phi1_approx",
        "err0_pointwise",
        "err1_pointwise",
    ]);
    for (i, &phi) in sol.phi.values().iter().enumerate() {
        let eta = sol.phi.node(i);
        let a0 = approximation(0, params.beta, eta, &coeffs)?;
        let a1 = approximation(1, params.beta, eta, &coeffs)?;
        table.push(vec![eta, phi, a0, a1, (phi - a0).abs(), (phi - a1).abs()]);
    }
    write_table(&table, output)
}

pub fn approx(
    gamma: f64,
    lambda: f64,
    beta_max: Option<f64>,
    steps: usize,
    config: &SolverConfig,
    output: &OutputArgs,
) -> Result<()> {
    ensure!(steps >= 1, "--steps must be at least 1");
    GmeParams::new(0.0, gamma, lambda)?;
    let beta_max = match beta_max {
        Some(b) => b,
        None => 0.99 * beta1(gamma, BETA1_TOL)?,
    };
    ensure!(beta_max >= 0.0, "--beta-max must be ≥ 0, got {beta_max}");
    let betas: Vec<f64> = if steps == 1 {
        vec![beta_max]
    } else {
        (0..steps)
            .map(|i| beta_max * i as f64 / (steps - 1) as f64)
            .collect()
    };
    let rows: Vec<Vec<f64>> = betas
        .par_iter()
        .map(|&beta| -> Result<Vec<f64>> {
            let sol = solve_gme(&GmeParams::new(beta, gamma, lambda)?, config)?;
            Ok(vec![beta, approx_error(0, &sol)?, approx_error(1, &sol)?])
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(vec!["beta", "err0", "err1"]);
    rows.into_iter().for_each(|r| table.push(r));
    write_table(&table, output)
}

#[allow(clippy::too_many_arguments)]
pub fn hscan(
    beta: BetaArgs,
    gamma: f64,
    lmin: f64,
    lmax: f64,
    steps: usize,
    config: &SolverConfig,
    output: &OutputArgs,
) -> Result<()> {
    ensure!(
        lmin > 0.0 && lmin.is_finite(),
        "--lmin must be > 0 (H is undefined at λ = 0), got {lmin}"
    );
    ensure!(
        lmax >= lmin && lmax.is_finite(),
        "--lmax must be finite and ≥ --lmin, got {lmax}"
    );
    ensure!(steps >= 1, "--steps must be at least 1");
    let beta = beta.resolve(gamma)?;
    GmeParams::new(beta, gamma, lmin)?;
    let lambdas: Vec<f64> = if steps == 1 {
        vec![lmin]
    } else {
        (0..steps)
            .map(|i| lmin + (lmax - lmin) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    let values: Vec<f64> = lambdas
        .par_iter()
        .map(|&l| h_function(l, beta, gamma, config))
        .collect::<gme_core::Result<_>>()?;
    let mut table = Table::new(vec!["lambda", "H"]);
    for (l, h) in lambdas.into_iter().zip(values) {
        table.push(vec![l, h]);
    }
    write_table(&table, output)
}

/// Physical inputs, from flags or a flat JSON file whose keys mirror the
/// flag names. Flags win over the file.
#[derive(Args, Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalArgs {
    /// Flat JSON file with any of the keys below
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Density
    #[arg(long)]
    pub rho: Option<f64>,
    /// Specific heat
    #[arg(long)]
    pub c: Option<f64>,
    /// Latent heat per unit mass
    #[arg(long)]
    pub l: Option<f64>,
    /// Conductivity at the ambient temperature
    #[arg(long)]
    pub k0: Option<f64>,
    /// Heat transfer coefficient scale (h0/√t)
    #[arg(long)]
    pub h0: Option<f64>,
    /// Freezing temperature
    #[arg(long, allow_negative_numbers = true)]
    pub tf: Option<f64>,
    /// Ambient temperature, below tf
    #[arg(long, allow_negative_numbers = true)]
    pub tinf: Option<f64>,
    /// Dimensionless conductivity slope
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Report times [default: 1 4]
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub times: Option<Vec<f64>>,
    /// Profile positions [default: 11 points evenly spread over [0, s(t)]]
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub positions: Option<Vec<f64>>,
}

impl PhysicalArgs {
    fn merged(&self) -> Result<PhysicalArgs> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str::<PhysicalArgs>(&text)
                    .with_context(|| format!("parsing {}", path.display()))?
            }
            None => PhysicalArgs::default(),
        };
        Ok(PhysicalArgs {
            config: None,
            rho: self.rho.or(file.rho),
            c: self.c.or(file.c),
            l: self.l.or(file.l),
            k0: self.k0.or(file.k0),
            h0: self.h0.or(file.h0),
            tf: self.tf.or(file.tf),
            tinf: self.tinf.or(file.tinf),
            beta: self.beta.or(file.beta),
            times: self.times.clone().or(file.times),
            positions: self.positions.clone().or(file.positions),
        })
    }

    fn physical(&self) -> Result<PhysicalParams> {
        let need = |name: &str, v: Option<f64>| {
            v.with_context(|| format!("missing --{name} (flag or config key)"))
        };
        let p = PhysicalParams {
            rho: need("rho", self.rho)?,
            c: need("c", self.c)?,
            l: need("l", self.l)?,
            k0: need("k0", self.k0)?,
            h0: need("h0", self.h0)?,
            tf: need("tf", self.tf)?,
            tinf: need("tinf", self.tinf)?,
            beta: need("beta", self.beta)?,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Serialize)]
struct Report {
    lambda_star: f64,
    ste: f64,
    bi: f64,
    gamma: f64,
    alpha0: f64,
    front: Vec<(f64, f64)>,
    profiles: Vec<(f64, Vec<(f64, f64)>)>,
}

pub fn physical(args: &PhysicalArgs, config: &SolverConfig, out: Option<&Path>) -> Result<()> {
    let args = args.merged()?;
    let physical = args.physical()?;
    let times = args.times.clone().unwrap_or_else(|| DEFAULT_TIMES.to_vec());
    ensure!(!times.is_empty(), "at least one time is required");
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        bail!("times must be > 0, got {t}");
    }
    if let Some(x) = args
        .positions
        .iter()
        .flatten()
        .find(|x| !(x.is_finite() && **x >= 0.0))
    {
        bail!("positions must be ≥ 0, got {x}");
    }

    let sol = solve_stefan(&physical, config)?;
    if sol.multiple_roots_suspected {
        eprintln!("warning: H(λ) crossed the target more than once; reporting the smallest root");
    }
    let mut front = Vec::with_capacity(times.len());
    let mut profiles = Vec::with_capacity(times.len());
    for &t in &times {
        let s = sol.front_position(t)?;
        front.push((t, s));
        let xs: Vec<f64> = match &args.positions {
            Some(xs) => xs.clone(),
            None => (0..DEFAULT_PROFILE_POINTS)
                .map(|i| s * i as f64 / (DEFAULT_PROFILE_POINTS - 1) as f64)
                .collect(),
        };
        let profile = xs
            .into_iter()
            .map(|x| {
                // Beyond the front the liquid sits at the freezing temperature.
                let temp = if x >= s {
                    physical.tf
                } else {
                    sol.temperature(x, t)?
                };
                Ok((x, temp))
            })
            .collect::<gme_core::Result<Vec<_>>>()?;
        profiles.push((t, profile));
    }
    let report = Report {
        lambda_star: sol.lambda_star,
        ste: sol.ste,
        bi: sol.bi,
        gamma: sol.gamma,
        alpha0: sol.alpha0,
        front,
        profiles,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit(&text, out)
}

fn solve_pair(
    beta: f64,
    gamma: f64,
    lambda: f64,
    config: &SolverConfig,
) -> Result<(GmeSolution, gme_core::DirichletSolution)> {
    let gme = solve_gme(&GmeParams::new(beta, gamma, lambda)?, config)
        .with_context(|| format!("GME function at γ = {gamma}, β = {beta}"))?;
    let dirichlet = solve_dirichlet_gme(beta, lambda, config)
        .with_context(|| format!("Dirichlet function at β = {beta}"))?;
    Ok((gme, dirichlet))
}

pub fn dirichlet(
    beta: BetaArgs,
    lambda: f64,
    gammas: &[f64],
    curves_dir: Option<&Path>,
    config: &SolverConfig,
    output: &OutputArgs,
) -> Result<()> {
    ensure!(!gammas.is_empty(), "at least one γ is required");
    let betas: Vec<f64> = gammas
        .iter()
        .map(|&g| beta.resolve(g))
        .collect::<Result<_>>()?;
    let pairs: Vec<_> = gammas
        .par_iter()
        .zip(&betas)
        .map(|(&gamma, &beta)| solve_pair(beta, gamma, lambda, config))
        .collect::<Result<_>>()?;

    if let Some(dir) = curves_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut summary = Table::new(vec!["gamma", "beta", "sup_gap"]);
    for ((&gamma, &beta), (gme, dir)) in gammas.iter().zip(&betas).zip(&pairs) {
        summary.push(vec![gamma, beta, gme.phi.sup_distance(&dir.phi)?]);
        if let Some(root) = curves_dir {
            let mut curve = Table::new(vec!["eta", "phi_gamma", "phi_dagger"]);
            for (i, (&p, &q)) in gme.phi.values().iter().zip(dir.phi.values()).enumerate() {
                curve.push(vec![gme.phi.node(i), p, q]);
            }
            let path = root.join(format!("dirichlet_gamma_{gamma}.{}", extension(output)));
            emit(&curve.render(output.format), Some(&path))?;
        }
    }
    write_table(&summary, output)
}

fn extension(output: &OutputArgs) -> &'static str {
    match output.format {
        crate::output::Format::Csv => "csv",
        crate::output::Format::Json => "json",
    }
}

/// Cartesian sweep description. Exactly one of `beta` and `beta_frac` must
/// be given; `beta_frac` entries are fractions of β₁(γ).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSpec {
    gamma: Vec<f64>,
    lambda: Vec<f64>,
    #[serde(default)]
    beta: Option<Vec<f64>>,
    #[serde(default)]
    beta_frac: Option<Vec<f64>>,
}

const SWEEP_HEADER: [&str; 9] = [
    "gamma",
    "lambda",
    "beta",
    "phi_prime_lambda",
    "d",
    "iterations",
    "err0",
    "err1",
    "H",
];

fn sweep_point(gamma: f64, lambda: f64, beta: f64, config: &SolverConfig) -> Result<Vec<f64>> {
    let sol = solve_gme(&GmeParams::new(beta, gamma, lambda)?, config)?;
    Ok(vec![
        gamma,
        lambda,
        beta,
        sol.phi_prime_lambda,
        sol.d_coeff,
        sol.iterations as f64,
        approx_error(0, &sol)?,
        approx_error(1, &sol)?,
        sol.phi_prime_lambda / lambda,
    ])
}

pub fn sweep(spec: &Path, config: &SolverConfig, output: &OutputArgs) -> Result<()> {
    let text = fs::read_to_string(spec).with_context(|| format!("reading {}", spec.display()))?;
    let spec: SweepSpec =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", spec.display()))?;
    ensure!(
        !spec.gamma.is_empty() && !spec.lambda.is_empty(),
        "gamma and lambda lists must be non-empty"
    );

    let mut points = Vec::new();
    for &gamma in &spec.gamma {
        let betas: Vec<f64> = match (&spec.beta, &spec.beta_frac) {
            (Some(b), None) => b.clone(),
            (None, Some(f)) => {
                let b1 = beta1(gamma, BETA1_TOL)?;
                f.iter().map(|x| x * b1).collect()
            }
            _ => bail!("the sweep spec needs exactly one of `beta` and `beta_frac`"),
        };
        ensure!(!betas.is_empty(), "beta list must be non-empty");
        for &lambda in &spec.lambda {
            for &beta in &betas {
                GmeParams::new(beta, gamma, lambda)?;
                points.push((gamma, lambda, beta));
            }
        }
    }

    let results: Vec<Result<Vec<f64>>> = points
        .par_iter()
        .map(|&(gamma, lambda, beta)| sweep_point(gamma, lambda, beta, config))
        .collect();

    let mut table = Table::new(SWEEP_HEADER.to_vec());
    let mut failed = 0;
    let mut code = 0;
    for (&(gamma, lambda, beta), result) in points.iter().zip(results) {
        match result {
            Ok(row) => table.push(row),
            Err(err) => {
                failed += 1;
                code = code.max(crate::exit_code(&err));
                eprintln!("error: γ = {gamma}, λ = {lambda}, β = {beta}: {err:#}");
                let mut row = vec![gamma, lambda, beta];
                row.resize(SWEEP_HEADER.len(), f64::NAN);
                table.push(row);
            }
        }
    }
    write_table(&table, output)?;
    if failed > 0 {
        return Err(PartialFailure { failed, code }.into());
    }
    Ok(())
}
