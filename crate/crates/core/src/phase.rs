//! Phase-function machinery for the conjugated doubled matrix.
//!
//! The eigenvector ratio recursion of the conjugated tridiagonal matrix is
//! driven by the operator word J_ℓ M_ℓ Ĵ_ℓ M̂_ℓ per index, where
//!
//! * J_ℓ = Q(π) A(s_ℓ/p_ℓ, μ/s_ℓ) and Ĵ_ℓ = Q(π) A(p_ℓ/s_ℓ, μ/p_ℓ) carry
//!   the deterministic part of the recursion,
//! * M_ℓ = A((1+X_ℓ/p_ℓ)⁻¹, λ/(4√n₀ p_ℓ)) A(p_ℓ/p_{ℓ+1}, 0) and
//!   M̂_ℓ = A((1+Y_ℓ/s_ℓ)⁻¹, λ/(4√n₀ s_ℓ)) carry the noise and the
//!   spectral parameter.
//!
//! Folding the lifted word from φ₀ = π gives the forward phase function;
//! folding the inverse word backward from φ⊙ = 0 gives the target phase
//! function. Eigenvalue counts are 2π-lattice crossings of φ - φ⊙, exactly
//! matching the Sturm count of the doubled matrix.
//!
//! For ℓ < n₀ the rotation part J_ℓ Ĵ_ℓ has the unit-modulus fixed-point
//! data ρ_ℓ, ρ̂_ℓ; conjugating by T_ℓ Q_{ℓ-1} (T_ℓ = A(Im(ρ_ℓ)⁻¹, -Re ρ_ℓ),
//! Q_ℓ the accumulated rotation by 2 arg(ρ_j ρ̂_j)) turns the evolution
//! into near-identity steps. The regularized sweep evolves with the
//! conjugated step word Q_{ℓ-1}⁻¹ T_ℓ⁻¹ (J M Ĵ M̂) T_{ℓ+1} Q_ℓ; applying
//! the same conjugation to both φ and φ⊙ leaves every count unchanged.

use crate::ensembles::BidiagonalLaguerre;
use crate::error::{Error, Result};
use crate::hyperbolic::{affine_lifted, rotate_lifted};
use crate::spectral::ScalingParams;
use num_complex::Complex64;
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// Entries of the conjugated tridiagonal matrix together with the p, s
/// grids: p_j = √(m-j-1/2), s_j = √(n-j-1/2),
/// X_ℓ = χ̃²_{β(m-ℓ-1)}/(β p_{ℓ+1}) - p_ℓ,
/// Y_ℓ = χ²_{β(n-ℓ-1)}/(β s_{ℓ+1}) - s_ℓ, with Y_{n-1} = 0 appended.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugatedEntries {
    pub n: usize,
    pub m: usize,
    pub beta: f64,
    /// p_0, …, p_n (length n+1).
    pub p: Vec<f64>,
    /// s_0, …, s_{n-1} (length n).
    pub s: Vec<f64>,
    /// X_0, …, X_{n-1}.
    pub x: Vec<f64>,
    /// Y_0, …, Y_{n-2}, 0.
    pub y: Vec<f64>,
}

/// Deterministic transform of the sampled bidiagonal matrix into the
/// conjugated entries. B's entries are χ/√β, so χ²/β = entry².
pub fn conjugated_entries(b: &BidiagonalLaguerre) -> ConjugatedEntries {
    let (n, m) = (b.n, b.m);
    let p: Vec<f64> = (0..=n).map(|j| (m as f64 - j as f64 - 0.5).sqrt()).collect();
    let s: Vec<f64> = (0..n).map(|j| (n as f64 - j as f64 - 0.5).sqrt()).collect();
    let x: Vec<f64> = (0..n).map(|l| b.diag[l] * b.diag[l] / p[l + 1] - p[l]).collect();
    let mut y: Vec<f64> = (0..n.saturating_sub(1))
        .map(|l| b.subdiag[l] * b.subdiag[l] / s[l + 1] - s[l])
        .collect();
    y.push(0.0);
    ConjugatedEntries { n, m, beta: b.beta, p, s, x, y }
}

/// Unit-modulus regularizer data per step index ℓ < n₀, with k = n₀ - ℓ:
/// ρ_ℓ = ±√(n₁/(n₁+k)) + i√(k/(n₁+k)),
/// ρ̂_ℓ = √(m₁/(m₁+k)) + i√(k/(m₁+k)),
/// η_ℓ = Π_{j≤ℓ} ρ_j² ρ̂_j² (renormalized to unit modulus each step).
#[derive(Debug, Clone, PartialEq)]
pub struct Regularizers {
    pub rho: Vec<Complex64>,
    pub rho_hat: Vec<Complex64>,
    pub eta: Vec<Complex64>,
    /// theta_prefix[ℓ] = Σ_{j<ℓ} 2 arg(ρ_j ρ̂_j): the rotation angle of
    /// Q_{ℓ-1}. Has one more entry than `rho`.
    pub theta_prefix: Vec<f64>,
}

/// Largest valid step index plus one: indices ℓ = 0, …, ell_count-1
/// satisfy ℓ < n₀.
pub fn ell_count(params: &ScalingParams) -> usize {
    params.n0.ceil() as usize
}

/// The pair (ρ_ℓ, ρ̂_ℓ) for one index.
pub fn rho_pair(params: &ScalingParams, ell: usize) -> Result<(Complex64, Complex64)> {
    let k = params.n0 - ell as f64;
    if !(k > 0.0) {
        return Err(Error::OutsideBulk(format!(
            "step index {ell} is not below n0 = {:.6}",
            params.n0
        )));
    }
    let rho = Complex64::new(
        params.edge_side * (params.n1 / (params.n1 + k)).sqrt(),
        (k / (params.n1 + k)).sqrt(),
    );
    let rho_hat = Complex64::new(
        (params.m1 / (params.m1 + k)).sqrt(),
        (k / (params.m1 + k)).sqrt(),
    );
    Ok((rho, rho_hat))
}

/// Regularizers for the whole valid range ℓ < n₀.
pub fn regularizers(params: &ScalingParams) -> Result<Regularizers> {
    let count = ell_count(params);
    let mut rho = Vec::with_capacity(count);
    let mut rho_hat = Vec::with_capacity(count);
    let mut eta = Vec::with_capacity(count);
    let mut theta_prefix = Vec::with_capacity(count + 1);
    theta_prefix.push(0.0);
    let mut eta_acc = Complex64::new(1.0, 0.0);
    for ell in 0..count {
        let (r, rh) = rho_pair(params, ell)?;
        let prod = r * rh;
        theta_prefix.push(theta_prefix[ell] + 2.0 * prod.arg());
        eta_acc *= prod * prod;
        eta_acc /= eta_acc.norm(); // keep |η| = 1 against drift
        rho.push(r);
        rho_hat.push(rh);
        eta.push(eta_acc);
    }
    Ok(Regularizers { rho, rho_hat, eta, theta_prefix })
}

/// Forward and target lifted phases over a λ-grid at a common step index.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub ell: usize,
    pub lambda_grid: Vec<f64>,
    /// Forward lifted angles φ_{ℓ,λ}.
    pub phi: Vec<f64>,
    /// Target lifted angles φ⊙_{ℓ,λ} (zero at ℓ = n).
    pub phi_target: Vec<f64>,
    /// Relative phase α_{ℓ,λ} = φ_{ℓ,λ} - φ_{ℓ,0}.
    pub alpha: Vec<f64>,
}

fn validate_entries(e: &ConjugatedEntries) -> Result<()> {
    for l in 0..e.n {
        if !(1.0 + e.x[l] / e.p[l] > 0.0) {
            return Err(Error::Domain(format!("1 + X_{l}/p_{l} must be positive")));
        }
        if !(1.0 + e.y[l] / e.s[l] > 0.0) {
            return Err(Error::Domain(format!("1 + Y_{l}/s_{l} must be positive")));
        }
    }
    Ok(())
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("lambda grid must be nonempty".into()));
    }
    for w in grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidParameter("lambda grid must be strictly increasing".into()));
        }
    }
    Ok(())
}

fn guard_step(enabled: bool, ell: usize, delta: f64) -> Result<()> {
    if enabled && delta.abs() >= PI {
        return Err(Error::StepTooLarge { ell, delta });
    }
    Ok(())
}

/// One forward raw step ℓ: fold the lifted word J_ℓ M_ℓ Ĵ_ℓ M̂_ℓ.
/// The λ- and noise-carrying operators M, M̂ are the infinitesimal part of
/// the evolution; the guard rejects any of them moving the angle by ≥ π.
fn raw_step_forward(
    mut phi: f64,
    ell: usize,
    e: &ConjugatedEntries,
    params: &ScalingParams,
    shift: f64,
    guard: bool,
) -> Result<f64> {
    let (pl, pl1, sl) = (e.p[ell], e.p[ell + 1], e.s[ell]);
    // J_ℓ
    phi = rotate_lifted(phi, PI);
    phi = affine_lifted(phi, sl / pl, params.mu / sl);
    // M_ℓ
    let before = phi;
    phi = affine_lifted(phi, 1.0 / (1.0 + e.x[ell] / pl), shift / pl);
    phi = affine_lifted(phi, pl / pl1, 0.0);
    guard_step(guard, ell, phi - before)?;
    // Ĵ_ℓ
    phi = rotate_lifted(phi, PI);
    phi = affine_lifted(phi, pl / sl, params.mu / pl);
    // M̂_ℓ
    let before = phi;
    phi = affine_lifted(phi, 1.0 / (1.0 + e.y[ell] / sl), shift / sl);
    guard_step(guard, ell, phi - before)?;
    Ok(phi)
}

/// One backward raw step ℓ: fold the inverse word M̂⁻¹ Ĵ⁻¹ M⁻¹ J⁻¹
/// (reversed order, each generator inverted: A(a,b)⁻¹ = A(1/a, -ab),
/// Q(α)⁻¹ = Q(-α)).
fn raw_step_backward(
    mut phi: f64,
    ell: usize,
    e: &ConjugatedEntries,
    params: &ScalingParams,
    shift: f64,
    guard: bool,
) -> Result<f64> {
    let (pl, pl1, sl) = (e.p[ell], e.p[ell + 1], e.s[ell]);
    let ax = 1.0 / (1.0 + e.x[ell] / pl);
    let ay = 1.0 / (1.0 + e.y[ell] / sl);
    // M̂_ℓ⁻¹
    let before = phi;
    phi = affine_lifted(phi, 1.0 / ay, -ay * shift / sl);
    guard_step(guard, ell, phi - before)?;
    // Ĵ_ℓ⁻¹
    phi = affine_lifted(phi, sl / pl, -params.mu / sl);
    phi = rotate_lifted(phi, -PI);
    // M_ℓ⁻¹
    let before = phi;
    phi = affine_lifted(phi, pl1 / pl, 0.0);
    phi = affine_lifted(phi, 1.0 / ax, -ax * shift / pl);
    guard_step(guard, ell, phi - before)?;
    // J_ℓ⁻¹
    phi = affine_lifted(phi, pl / sl, -params.mu / pl);
    phi = rotate_lifted(phi, -PI);
    Ok(phi)
}

fn raw_forward_phi(
    e: &ConjugatedEntries,
    params: &ScalingParams,
    lambda: f64,
    ell_stop: usize,
    guard: bool,
) -> Result<f64> {
    let shift = lambda / (4.0 * params.n0.sqrt());
    let mut phi = PI;
    for ell in 0..ell_stop {
        phi = raw_step_forward(phi, ell, e, params, shift, guard)?;
    }
    Ok(phi)
}

fn raw_backward_phi(
    e: &ConjugatedEntries,
    params: &ScalingParams,
    lambda: f64,
    ell_stop: usize,
    guard: bool,
) -> Result<f64> {
    let shift = lambda / (4.0 * params.n0.sqrt());
    let mut phi = 0.0;
    for ell in (ell_stop..e.n).rev() {
        phi = raw_step_backward(phi, ell, e, params, shift, guard)?;
    }
    Ok(phi)
}

/// Apply the regularizing conjugation T_ℓ Q_{ℓ-1} at index ℓ.
pub fn conjugate_at(phi: f64, ell: usize, regs: &Regularizers) -> f64 {
    let rho = regs.rho[ell];
    let out = affine_lifted(phi, 1.0 / rho.im, -rho.re);
    rotate_lifted(out, regs.theta_prefix[ell])
}

// At ℓ = 0 the forward phase is still the constant π, so the runtime
// guard only demands nondecreasing; strictness develops with the first
// λ-dependent operator and is asserted in tests.
fn check_nondecreasing(values: &[f64], what: &str) -> Result<()> {
    for w in values.windows(2) {
        if !(w[0] <= w[1]) {
            return Err(Error::NumericalGuard(format!(
                "{what} must be nondecreasing along the lambda grid ({} > {})",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Un-regularized sweep to ℓ = n. The target phases are identically zero
/// there, so counting uses the forward angles alone.
pub fn raw_phase_sweep(
    e: &ConjugatedEntries,
    params: &ScalingParams,
    lambda_grid: &[f64],
) -> Result<PhaseState> {
    validate_entries(e)?;
    validate_grid(lambda_grid)?;
    let phi0 = raw_forward_phi(e, params, 0.0, e.n, false)?;
    let phi: Vec<f64> = lambda_grid
        .iter()
        .map(|&l| if l == 0.0 { Ok(phi0) } else { raw_forward_phi(e, params, l, e.n, false) })
        .collect::<Result<_>>()?;
    check_nondecreasing(&phi, "forward phase")?;
    let alpha = phi.iter().map(|&p| p - phi0).collect();
    Ok(PhaseState {
        ell: e.n,
        lambda_grid: lambda_grid.to_vec(),
        phi,
        phi_target: vec![0.0; lambda_grid.len()],
        alpha,
    })
}

/// Regularized forward angle at `ell_stop` for one λ, evolved step by step
/// with the conjugated word Q_{ℓ-1}⁻¹ T_ℓ⁻¹ (J M Ĵ M̂) T_{ℓ+1} Q_ℓ.
fn regularized_forward_phi(
    e: &ConjugatedEntries,
    params: &ScalingParams,
    regs: &Regularizers,
    lambda: f64,
    ell_stop: usize,
) -> Result<f64> {
    let shift = lambda / (4.0 * params.n0.sqrt());
    // φ_{0,λ} = π ∗ T₀ Q₋₁ = π: affine lifts fix π
    let mut phi = PI;
    for ell in 0..ell_stop {
        // undo the frame at ℓ
        phi = rotate_lifted(phi, -regs.theta_prefix[ell]);
        let rho = regs.rho[ell];
        phi = affine_lifted(phi, rho.im, rho.re / rho.im); // T_ℓ⁻¹
        phi = raw_step_forward(phi, ell, e, params, shift, true)?;
        // set the frame at ℓ+1
        let rho1 = regs.rho[ell + 1];
        phi = affine_lifted(phi, 1.0 / rho1.im, -rho1.re); // T_{ℓ+1}
        phi = rotate_lifted(phi, regs.theta_prefix[ell + 1]);
    }
    Ok(phi)
}

fn validate_ell_stop(params: &ScalingParams, ell_stop: usize, n: usize) -> Result<()> {
    if !((ell_stop as f64) < params.n0) {
        return Err(Error::OutsideBulk(format!(
            "ell_stop = {ell_stop} must be below n0 = {:.6}",
            params.n0
        )));
    }
    if ell_stop > n {
        return Err(Error::InvalidParameter(format!("ell_stop = {ell_stop} exceeds n = {n}")));
    }
    Ok(())
}

/// Regularized sweep: forward phases evolved with the conjugated step
/// words up to `ell_stop` < n₀, target phases pulled back from ℓ = n and
/// conjugated by the same T_ℓ Q_{ℓ-1}, relative phase α against the λ = 0
/// column.
pub fn regularized_phase_sweep(
    e: &ConjugatedEntries,
    params: &ScalingParams,
    lambda_grid: &[f64],
    ell_stop: usize,
) -> Result<PhaseState> {
    validate_entries(e)?;
    validate_grid(lambda_grid)?;
    validate_ell_stop(params, ell_stop, e.n)?;
    let regs = regularizers(params)?;
    // the step to ell_stop conjugates by T_{ell_stop}, which needs ρ there
    debug_assert!(ell_stop < regs.rho.len() || ell_stop == 0);

    let phi0 = regularized_forward_phi(e, params, &regs, 0.0, ell_stop)?;
    let phi: Vec<f64> = lambda_grid
        .iter()
        .map(|&l| {
            if l == 0.0 {
                Ok(phi0)
            } else {
                regularized_forward_phi(e, params, &regs, l, ell_stop)
            }
        })
        .collect::<Result<_>>()?;
    check_nondecreasing(&phi, "forward phase")?;
    let phi_target = target_phase_sweep(e, params, lambda_grid, ell_stop)?;
    let alpha = phi.iter().map(|&p| p - phi0).collect();
    Ok(PhaseState { ell: ell_stop, lambda_grid: lambda_grid.to_vec(), phi, phi_target, alpha })
}

/// Target phases φ⊙ at `ell_stop`: fold the inverse step words backward
/// from the end condition φ⊙_n = 0, then apply the same T_ℓ Q_{ℓ-1}
/// conjugation as the forward sweep.
pub fn target_phase_sweep(
    e: &ConjugatedEntries,
    params: &ScalingParams,
    lambda_grid: &[f64],
    ell_stop: usize,
) -> Result<Vec<f64>> {
    validate_entries(e)?;
    validate_grid(lambda_grid)?;
    validate_ell_stop(params, ell_stop, e.n)?;
    let regs = regularizers(params)?;
    let out: Vec<f64> = lambda_grid
        .iter()
        .map(|&l| {
            let phi = raw_backward_phi(e, params, l, ell_stop, true)?;
            Ok(conjugate_at(phi, ell_stop, &regs))
        })
        .collect::<Result<_>>()?;
    Ok(out)
}

/// Number of 2π-lattice points in (d(λ₀), d(λ₁)] where d = φ - φ⊙; equals
/// the number of eigenvalues of the doubled matrix in the corresponding
/// (Λ₀, Λ₁] window.
pub fn count_by_phase(state: &PhaseState, lambda0: f64, lambda1: f64) -> Result<i64> {
    if !(lambda0 <= lambda1) {
        return Err(Error::InvalidParameter("need lambda0 <= lambda1".into()));
    }
    let idx = |target: f64| -> Result<usize> {
        state
            .lambda_grid
            .iter()
            .position(|&l| l == target || (l - target).abs() <= 1e-12 * (1.0 + target.abs()))
            .ok_or_else(|| Error::InvalidParameter(format!("lambda {target} is not on the grid")))
    };
    let (i0, i1) = (idx(lambda0)?, idx(lambda1)?);
    let d0 = state.phi[i0] - state.phi_target[i0];
    let d1 = state.phi[i1] - state.phi_target[i1];
    Ok((d1 / TWO_PI).floor() as i64 - (d0 / TWO_PI).floor() as i64)
}
