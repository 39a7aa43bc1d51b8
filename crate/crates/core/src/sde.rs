//! Monte-Carlo integration of the Sine_β counting SDE and of the limiting
//! phase diffusion.
//!
//! The Sine_β system, for t ∈ [0, 1):
//!
//! ```text
//! dα_λ = λ/(2√(1-t)) dt + √2/√(β(1-t)) · Re[(e^{-iα_λ} - 1) dZ],  α_λ(0) = 0
//! ```
//!
//! with a single complex Brownian motion Z driving every λ on the grid
//! (the joint law needs the shared noise). N(λ) = lim α_λ/(2π) is integer
//! valued; a finite cutoff 1-t < δ plus rounding stands in for the limit,
//! and the rounding residual is reported instead of silently dropped.
//!
//! Time runs on the geometric grid t_{j+1} = t_j + h(1-t_j), uniform in
//! -log(1-t), so both the drift and the noise scale stay bounded per step
//! as the singularity at t = 1 approaches.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::spectral::{CountingSample, CountingSource};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;
const MAX_STEP_HALVINGS: usize = 3;

/// Configuration for the Sine_β counting simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineBetaConfig {
    pub beta: f64,
    pub lambda_grid: Vec<f64>,
    /// Base log-time step of the geometric grid.
    pub h: f64,
    /// Terminal cutoff: integrate until 1 - t < delta.
    pub delta: f64,
    pub replicas: usize,
    pub seed: u64,
}

impl SineBetaConfig {
    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParameter("beta must be positive".into()));
        }
        if !(self.h > 0.0 && self.h < 1.0) {
            return Err(Error::InvalidParameter("h must lie in (0, 1)".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter("delta must lie in (0, 1)".into()));
        }
        if self.lambda_grid.is_empty() {
            return Err(Error::InvalidParameter("lambda grid must be nonempty".into()));
        }
        Ok(())
    }
}

/// One replica's terminal data.
#[derive(Debug, Clone, PartialEq)]
pub struct SineBetaReplica {
    pub replica_id: u64,
    /// α_λ at the terminal time, per grid λ.
    pub alpha_end: Vec<f64>,
    /// N(λ) = round(α_λ / 2π).
    pub counts: Vec<i64>,
    /// |α_λ/(2π) - N(λ)|.
    pub residuals: Vec<f64>,
}

/// RNG domain tag for Sine_β replicas (see `RngStream::substream`).
pub const DOMAIN_SINE_BETA: u16 = 1;
/// RNG domain tag for phase-diffusion replicas.
pub const DOMAIN_PHASE_DIFFUSION: u16 = 3;

fn integrate_sine_beta(
    beta: f64,
    lambda_grid: &[f64],
    h: f64,
    delta: f64,
    stream: RngStream,
) -> std::result::Result<Vec<f64>, f64> {
    let mut rng = stream.rng();
    let normal = StandardNormal;
    let mut alpha = vec![0.0f64; lambda_grid.len()];
    let mut t = 0.0f64;
    while 1.0 - t >= delta {
        let one_minus_t = 1.0 - t;
        let dt = h * one_minus_t;
        let z1: f64 = normal.sample(&mut rng);
        let z2: f64 = normal.sample(&mut rng);
        let drift_scale = dt / (2.0 * one_minus_t.sqrt());
        let noise_scale = (2.0 / (beta * one_minus_t)).sqrt() * dt.sqrt();
        for (a, &lambda) in alpha.iter_mut().zip(lambda_grid) {
            let d_alpha = lambda * drift_scale
                + noise_scale * ((a.cos() - 1.0) * z1 + a.sin() * z2);
            if d_alpha.abs() > PI {
                return Err(d_alpha);
            }
            *a += d_alpha;
        }
        t += dt;
    }
    Ok(alpha)
}

fn sine_beta_replica(config: &SineBetaConfig, replica: u64) -> Result<SineBetaReplica> {
    let stream = RngStream::new(config.seed).substream(DOMAIN_SINE_BETA, replica);
    let mut h = config.h;
    for _ in 0..=MAX_STEP_HALVINGS {
        match integrate_sine_beta(config.beta, &config.lambda_grid, h, config.delta, stream) {
            Ok(alpha_end) => {
                let counts: Vec<i64> =
                    alpha_end.iter().map(|&a| (a / TWO_PI).round() as i64).collect();
                let residuals: Vec<f64> = alpha_end
                    .iter()
                    .zip(&counts)
                    .map(|(&a, &n)| (a / TWO_PI - n as f64).abs())
                    .collect();
                return Ok(SineBetaReplica { replica_id: replica, alpha_end, counts, residuals });
            }
            Err(_) => h /= 2.0,
        }
    }
    Err(Error::SdeStepFailure(format!(
        "replica {replica}: |d alpha| > pi persisted after {MAX_STEP_HALVINGS} step halvings"
    )))
}

/// Simulate all replicas (parallel, deterministic per-replica streams).
pub fn simulate_sine_beta(config: &SineBetaConfig) -> Result<Vec<SineBetaReplica>> {
    config.validate()?;
    (0..config.replicas as u64)
        .into_par_iter()
        .map(|r| sine_beta_replica(config, r))
        .collect()
}

/// Counting samples from the Sine_β simulation plus quality diagnostics.
#[derive(Debug, Clone)]
pub struct SineBetaCounting {
    pub samples: Vec<CountingSample>,
    /// Mean terminal rounding residual across replicas and λ.
    pub mean_residual: f64,
    /// Replicas whose N(λ) failed to be nondecreasing in λ (integration
    /// quality flags; the samples are still returned).
    pub monotonicity_violations: Vec<u64>,
}

/// Wrap [`simulate_sine_beta`] into [`CountingSample`] records.
pub fn sine_beta_counting(config: &SineBetaConfig) -> Result<SineBetaCounting> {
    let replicas = simulate_sine_beta(config)?;
    let mut residual_acc = 0.0;
    let mut residual_n = 0usize;
    let mut violations = Vec::new();
    let samples = replicas
        .into_iter()
        .map(|rep| {
            residual_acc += rep.residuals.iter().sum::<f64>();
            residual_n += rep.residuals.len();
            if rep.counts.windows(2).any(|w| w[0] > w[1]) {
                violations.push(rep.replica_id);
            }
            CountingSample {
                lambda_grid: config.lambda_grid.clone(),
                counts: rep.counts,
                replica_id: rep.replica_id,
                source: CountingSource::Sde,
            }
        })
        .collect();
    Ok(SineBetaCounting {
        samples,
        mean_residual: if residual_n > 0 { residual_acc / residual_n as f64 } else { 0.0 },
        monotonicity_violations: violations,
    })
}

/// A possibly-infinite limit ratio (κ = lim m/n₀, ν = lim n/n₀).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LimitRatio {
    Finite(f64),
    Infinite,
}

impl LimitRatio {
    fn validate(&self, name: &str) -> Result<()> {
        match self {
            LimitRatio::Finite(v) if !(*v >= 1.0) => Err(Error::InvalidParameter(format!(
                "{name} must be >= 1, got {v}"
            ))),
            _ => Ok(()),
        }
    }
}

/// Parameters of the limiting phase diffusion.
///
/// The drift and diffusion coefficients come from the limit functions
/// p(t)⁻¹ = (κ-t)^{-1/2}, ρ(t) = ±√((ν-1)/(ν-t)) + i√((1-t)/(ν-t)) and
/// ρ̂(t) defined with κ, all unit modulus where defined; ρ'(t) is used in
/// closed form (finite differences degrade near the √ singularity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiffusionParams {
    pub kappa: LimitRatio,
    pub nu: LimitRatio,
    /// Sign of Re ρ: +1 or -1.
    pub edge_side: f64,
    /// β may be `f64::INFINITY` to switch off the noise (pure ODE).
    pub beta: f64,
}

impl PhaseDiffusionParams {
    fn validate(&self) -> Result<()> {
        self.kappa.validate("kappa")?;
        self.nu.validate("nu")?;
        if self.edge_side != 1.0 && self.edge_side != -1.0 {
            return Err(Error::InvalidParameter("edge_side must be +1 or -1".into()));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParameter("beta must be positive".into()));
        }
        Ok(())
    }

    pub fn rho(&self, t: f64) -> Complex64 {
        match self.nu {
            LimitRatio::Infinite => Complex64::new(self.edge_side, 0.0),
            LimitRatio::Finite(nu) => Complex64::new(
                self.edge_side * ((nu - 1.0) / (nu - t)).sqrt(),
                ((1.0 - t) / (nu - t)).sqrt(),
            ),
        }
    }

    pub fn rho_hat(&self, t: f64) -> Complex64 {
        match self.kappa {
            LimitRatio::Infinite => Complex64::new(1.0, 0.0),
            LimitRatio::Finite(kappa) => Complex64::new(
                ((kappa - 1.0) / (kappa - t)).sqrt(),
                ((1.0 - t) / (kappa - t)).sqrt(),
            ),
        }
    }

    pub fn p_inv(&self, t: f64) -> f64 {
        match self.kappa {
            LimitRatio::Infinite => 0.0,
            LimitRatio::Finite(kappa) => (kappa - t).powf(-0.5),
        }
    }

    /// Re ρ'(t) / Im ρ(t), in closed form.
    fn re_rho_prime_over_im_rho(&self, t: f64) -> f64 {
        match self.nu {
            LimitRatio::Infinite => 0.0,
            LimitRatio::Finite(nu) => {
                self.edge_side * (nu - 1.0).sqrt() / (2.0 * (nu - t) * (1.0 - t).sqrt())
            }
        }
    }
}

/// A simulated path of the phase diffusion over a λ-grid: `phi[i][j]` is
/// φ at `times[j]` for `lambda_grid[i]`; `alpha` is φ_λ - φ_0 with the
/// λ = 0 path simulated jointly under the same noise.
#[derive(Debug, Clone)]
pub struct PhaseDiffusionPath {
    pub lambda_grid: Vec<f64>,
    pub times: Vec<f64>,
    pub phi: Vec<Vec<f64>>,
    pub alpha: Vec<Vec<f64>>,
}

impl PhaseDiffusionPath {
    /// Terminal φ per λ.
    pub fn phi_end(&self) -> Vec<f64> {
        self.phi.iter().map(|p| *p.last().unwrap()).collect()
    }

    /// Terminal α per λ.
    pub fn alpha_end(&self) -> Vec<f64> {
        self.alpha.iter().map(|p| *p.last().unwrap()).collect()
    }
}

fn integrate_phase_diffusion(
    params: &PhaseDiffusionParams,
    lambda_grid: &[f64],
    t_end: f64,
    h: f64,
    stream: RngStream,
) -> std::result::Result<PhaseDiffusionPath, f64> {
    let mut rng = stream.rng();
    let normal = StandardNormal;
    let k = lambda_grid.len();
    // φ for every grid λ plus the λ = 0 driver path at the end
    let mut phi = vec![PI; k + 1];
    let mut times = vec![0.0];
    let mut paths: Vec<Vec<f64>> = vec![vec![PI]; k + 1];
    let inv_sqrt_beta = if params.beta.is_infinite() { 0.0 } else { 1.0 / params.beta.sqrt() };
    let beta_term = if params.beta.is_infinite() { 0.0 } else { 1.0 / params.beta };

    let mut t = 0.0f64;
    while t < t_end {
        let dt = (h * (1.0 - t)).min(t_end - t).max(1e-15);
        let shat2 = 1.0 - t;
        let shat = shat2.sqrt();
        let rho = params.rho(t);
        let rho_hat = params.rho_hat(t);
        let rho2 = rho * rho;
        let rho_hat2 = rho_hat * rho_hat;
        let drift_base = -params.re_rho_prime_over_im_rho(t)
            + (rho2.im + rho_hat2.im) / (2.0 * shat2) * beta_term
            + rho_hat.re * params.p_inv(t) / (2.0 * shat);
        let mixed = (2.0 + rho2.re + rho_hat2.re).max(0.0);
        let coeff_w = std::f64::consts::SQRT_2 * inv_sqrt_beta / shat;
        let coeff_b = mixed.sqrt() * inv_sqrt_beta / shat;

        let sq_dt = dt.sqrt();
        let w1: f64 = normal.sample(&mut rng);
        let w2: f64 = normal.sample(&mut rng);
        let b: f64 = normal.sample(&mut rng);

        for (i, p) in phi.iter_mut().enumerate() {
            let lambda = if i < k { lambda_grid[i] } else { 0.0 };
            let d_phi = (lambda / (2.0 * shat) + drift_base) * dt
                + coeff_w * (p.cos() * w1 + p.sin() * w2) * sq_dt
                + coeff_b * b * sq_dt;
            if d_phi.abs() > PI {
                return Err(d_phi);
            }
            *p += d_phi;
        }
        t += dt;
        times.push(t);
        for (i, p) in phi.iter().enumerate() {
            paths[i].push(*p);
        }
    }

    let zero_path = paths.pop().expect("lambda = 0 driver path");
    let alpha = paths
        .iter()
        .map(|p| p.iter().zip(&zero_path).map(|(a, z)| a - z).collect())
        .collect();
    Ok(PhaseDiffusionPath { lambda_grid: lambda_grid.to_vec(), times, phi: paths, alpha })
}

/// Euler–Maruyama path of the limiting phase diffusion for every λ in the
/// grid, with W, B shared across λ. Retries with a halved step if any
/// increment reaches π.
pub fn simulate_phase_diffusion(
    params: &PhaseDiffusionParams,
    lambda_grid: &[f64],
    t_end: f64,
    h: f64,
    stream: RngStream,
) -> Result<PhaseDiffusionPath> {
    params.validate()?;
    if !(t_end > 0.0 && t_end < 1.0) {
        return Err(Error::InvalidParameter("t_end must lie in (0, 1)".into()));
    }
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidParameter("h must lie in (0, 1)".into()));
    }
    if lambda_grid.is_empty() {
        return Err(Error::InvalidParameter("lambda grid must be nonempty".into()));
    }
    let mut h_cur = h;
    for _ in 0..=MAX_STEP_HALVINGS {
        match integrate_phase_diffusion(params, lambda_grid, t_end, h_cur, stream) {
            Ok(path) => return Ok(path),
            Err(_) => h_cur /= 2.0,
        }
    }
    Err(Error::SdeStepFailure(format!(
        "|d phi| > pi persisted after {MAX_STEP_HALVINGS} step halvings"
    )))
}
