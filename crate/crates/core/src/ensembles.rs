//! Tridiagonal models for the β-Laguerre and β-Hermite ensembles.
//!
//! The Laguerre sampler produces the n×n bidiagonal matrix with independent
//! chi entries
//!
//! ```text
//!        ┌ χ̃_{β(m-1)}                             ┐
//!        │ χ_{β(n-1)}  χ̃_{β(m-2)}                 │
//! A = β^{-1/2} │             ⋱          ⋱          │
//!        │                  χ_{β·2}  χ̃_{β(m-n+1)} │
//!        └                           χ_β  χ̃_{β(m-n)} ┘
//! ```
//!
//! whose squared singular values follow the β-Laguerre joint density. The
//! doubling construction embeds the singular values as ± eigenvalue pairs
//! of a (2n)×(2n) symmetric tridiagonal matrix with zero diagonal, which is
//! where all counting happens downstream.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Symmetric tridiagonal matrix: `diag` of length k, `offdiag` of length k-1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidParameter("matrix must be nonempty".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(format!(
                "offdiag length {} must be diag length {} minus one",
                offdiag.len(),
                diag.len()
            )));
        }
        Ok(SymTridiagonal { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }
}

/// The bidiagonal β-Laguerre model A_{n,m}.
///
/// `diag[i]` holds χ̃_{β(m-1-i)}/√β and `subdiag[i]` holds χ_{β(n-1-i)}/√β,
/// laid out exactly as in the matrix display above.
#[derive(Debug, Clone, PartialEq)]
pub struct BidiagonalLaguerre {
    pub n: usize,
    pub m: usize,
    pub beta: f64,
    pub diag: Vec<f64>,
    pub subdiag: Vec<f64>,
}

/// One draw from the chi distribution with `dof` degrees of freedom.
///
/// Sampled as the square root of a Gamma(dof/2, scale 2) draw; the
/// rejection sampler is valid for all dof > 0 including dof < 1. The
/// result is clamped to the smallest positive normal so downstream
/// positivity invariants hold even when the true draw underflows f64.
pub fn sample_chi(dof: f64, stream: RngStream) -> Result<f64> {
    if !(dof > 0.0) || !dof.is_finite() {
        return Err(Error::InvalidParameter(format!("chi dof must be positive, got {dof}")));
    }
    Ok(chi_draw(&mut stream.rng(), dof))
}

pub(crate) fn chi_draw<R: Rng + ?Sized>(rng: &mut R, dof: f64) -> f64 {
    let chi2 = ChiSquared::new(dof).expect("dof validated by caller");
    chi2.sample(rng).sqrt().max(f64::MIN_POSITIVE)
}

/// Sample the bidiagonal β-Laguerre matrix A_{n,m}.
///
/// Draw order is fixed (diagonal first, then subdiagonal) so a stream
/// pins the matrix bit-for-bit.
pub fn sample_laguerre(n: usize, m: usize, beta: f64, stream: RngStream) -> Result<BidiagonalLaguerre> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if m <= n {
        return Err(Error::InvalidParameter(format!("m must exceed n (got n={n}, m={m})")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let mut rng = stream.rng();
    let sqrt_beta = beta.sqrt();
    let diag = (0..n)
        .map(|i| chi_draw(&mut rng, beta * (m - 1 - i) as f64) / sqrt_beta)
        .collect();
    let subdiag = (0..n - 1)
        .map(|i| chi_draw(&mut rng, beta * (n - 1 - i) as f64) / sqrt_beta)
        .collect();
    Ok(BidiagonalLaguerre { n, m, beta, diag, subdiag })
}

/// Embed the singular values of B as ± eigenvalue pairs: the (2n)×(2n)
/// symmetric tridiagonal matrix with zero diagonal and off-diagonal
/// a₁, b₁, a₂, b₂, …, aₙ interleaving B's diagonal and subdiagonal.
pub fn double(b: &BidiagonalLaguerre) -> SymTridiagonal {
    let n = b.n;
    let mut offdiag = Vec::with_capacity(2 * n - 1);
    for i in 0..n {
        offdiag.push(b.diag[i]);
        if i + 1 < n {
            offdiag.push(b.subdiag[i]);
        }
    }
    SymTridiagonal { diag: vec![0.0; 2 * n], offdiag }
}

/// Sample the β-Hermite tridiagonal model: diagonal i.i.d. Normal(0, 2/β),
/// off-diagonal χ_{β(n-1)}/√β, …, χ_β/√β.
pub fn sample_hermite(n: usize, beta: f64, stream: RngStream) -> Result<SymTridiagonal> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let mut rng = stream.rng();
    let normal = Normal::new(0.0, (2.0 / beta).sqrt()).expect("valid std");
    let diag = (0..n).map(|_| normal.sample(&mut rng)).collect();
    let sqrt_beta = beta.sqrt();
    let offdiag = (0..n.saturating_sub(1))
        .map(|i| chi_draw(&mut rng, beta * (n - 1 - i) as f64) / sqrt_beta)
        .collect();
    Ok(SymTridiagonal { diag, offdiag })
}

/// Unnormalized log-density of the β-Laguerre ensemble:
/// β Σ_{j<k} log|λ_j - λ_k| + (β(m-n)/2 - 1) Σ log λ_k - β/2 Σ λ_k.
pub fn log_density_laguerre(lambda: &[f64], n: usize, m: usize, beta: f64) -> Result<f64> {
    if lambda.len() != n {
        return Err(Error::InvalidParameter(format!(
            "expected {n} eigenvalues, got {}",
            lambda.len()
        )));
    }
    if m <= n {
        return Err(Error::InvalidParameter("m must exceed n".into()));
    }
    if lambda.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Domain("laguerre eigenvalues must be positive".into()));
    }
    let mut log_vandermonde = 0.0;
    for j in 0..n {
        for k in (j + 1)..n {
            log_vandermonde += (lambda[j] - lambda[k]).abs().ln();
        }
    }
    let power = beta / 2.0 * (m - n) as f64 - 1.0;
    let log_pow: f64 = lambda.iter().map(|&x| x.ln()).sum();
    let sum: f64 = lambda.iter().sum();
    Ok(beta * log_vandermonde + power * log_pow - beta / 2.0 * sum)
}

/// Unnormalized log-density of the β-Hermite ensemble:
/// β Σ_{j<k} log|λ_j - λ_k| - β/4 Σ λ_k².
pub fn log_density_hermite(lambda: &[f64], n: usize, beta: f64) -> Result<f64> {
    if lambda.len() != n {
        return Err(Error::InvalidParameter(format!(
            "expected {n} eigenvalues, got {}",
            lambda.len()
        )));
    }
    let mut log_vandermonde = 0.0;
    for j in 0..n {
        for k in (j + 1)..n {
            log_vandermonde += (lambda[j] - lambda[k]).abs().ln();
        }
    }
    let sq: f64 = lambda.iter().map(|&x| x * x).sum();
    Ok(beta * log_vandermonde - beta / 4.0 * sq)
}
