//! Sturm-sequence eigenvalue counting and bisection for symmetric
//! tridiagonal matrices, plus the bulk scaling parameters and limiting
//! densities.

use crate::ensembles::SymTridiagonal;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Scaling data for the bulk limit around a center μ.
///
/// With k = n₀ - ℓ the regularizers downstream satisfy s_ℓ·Im ρ_ℓ =
/// p_ℓ·Im ρ̂_ℓ = √k, so everything here hangs off n₀ and n₁:
///
/// * n₀ + 1/2 = (2(m+n)μ² - (m-n)² - μ⁴) / (4μ²)
/// * n₁ = (m - n - μ²)² / (4μ²)
/// * n₀ + n₁ = n - 1/2 exactly
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub beta: f64,
    pub n: usize,
    pub m: usize,
    pub mu: f64,
    pub n0: f64,
    pub n1: f64,
    /// m₁ = m - n + n₁.
    pub m1: f64,
    /// n₂ = ⌊n₀ - 𝒦·(n₁^{1/3} ∨ 1)⌋; may be negative for tiny matrices,
    /// callers clamp at 0 when using it as a step index.
    pub n2: i64,
    /// The cutoff 𝒦 used to form n₂.
    pub kappa_cutoff: f64,
    /// +1 if μ ≥ √(m-n), -1 otherwise; selects the sign of Re ρ_ℓ.
    pub edge_side: f64,
}

/// Compute the scaling parameters, validating that μ sits inside the bulk.
///
/// n₀ and n₁ come from the closed forms (numerically stable); the
/// σ-density display is kept as a cross-checkable alternative in
/// [`n0_from_density`].
pub fn scaling_params(beta: f64, n: usize, m: usize, mu: f64, kappa_cutoff: f64) -> Result<ScalingParams> {
    if m <= n || n < 1 {
        return Err(Error::InvalidParameter(format!("need m > n >= 1, got n={n}, m={m}")));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    if !(kappa_cutoff > 0.0) {
        return Err(Error::InvalidParameter("kappa cutoff must be positive".into()));
    }
    let (nf, mf) = (n as f64, m as f64);
    let mu2 = mu * mu;
    let n0 = (2.0 * (mf + nf) * mu2 - (mf - nf).powi(2) - mu2 * mu2) / (4.0 * mu2) - 0.5;
    let n1 = (mf - nf - mu2).powi(2) / (4.0 * mu2);
    if !(n0 > 0.0) {
        return Err(Error::OutsideBulk(format!(
            "n0 = {n0:.6} <= 0 for (n={n}, m={m}, mu={mu}); move the center into the bulk"
        )));
    }
    let m1 = mf - nf + n1;
    let n2 = (n0 - kappa_cutoff * n1.cbrt().max(1.0)).floor() as i64;
    let edge_side = if mu2 >= mf - nf { 1.0 } else { -1.0 };
    Ok(ScalingParams { beta, n, m, mu, n0, n1, m1, n2, kappa_cutoff, edge_side })
}

/// n₀ recomputed through the singular-value density display:
/// n₀ = (π²/4)·n·σ^{m/n}(μ/√n)² - 1/2. Used as a cross-check of the
/// closed form, never as the definition.
pub fn n0_from_density(n: usize, m: usize, mu: f64) -> f64 {
    let nf = n as f64;
    let gamma = m as f64 / nf;
    let sigma = sv_density(gamma, mu / nf.sqrt());
    PI * PI / 4.0 * nf * sigma * sigma - 0.5
}

/// Number of eigenvalues of T strictly below x, by the shifted LDLᵀ pivot
/// recursion (the ratio recursion in pivot form): d₁ = a₁ - x,
/// d_ℓ = (a_ℓ - x) - e_{ℓ-1}²/d_{ℓ-1}, counting negative pivots.
///
/// Requires strictly positive off-diagonal entries.
pub fn sturm_count(t: &SymTridiagonal, x: f64) -> Result<usize> {
    if t.offdiag.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Domain("sturm count requires positive off-diagonal entries".into()));
    }
    Ok(count_below(t, x))
}

/// Pivot recursion without the off-diagonal validity check; callers
/// validate once before looping.
pub(crate) fn count_below(t: &SymTridiagonal, x: f64) -> usize {
    let mut count = 0usize;
    let mut d = t.diag[0] - x;
    if d == 0.0 {
        d = -f64::EPSILON * (t.diag[0].abs() + x.abs() + 1.0);
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..t.diag.len() {
        let e = t.offdiag[i - 1];
        let mut next = (t.diag[i] - x) - e * e / d;
        if next == 0.0 {
            // bisection-safe convention: nudge exact zeros negative
            next = -f64::EPSILON * (t.diag[i].abs() + x.abs() + 1.0);
        }
        if next < 0.0 {
            count += 1;
        }
        d = next;
    }
    count
}

/// Interval containing all eigenvalues (Gershgorin discs).
pub fn gershgorin_bounds(t: &SymTridiagonal) -> (f64, f64) {
    let k = t.dim();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let mut r = 0.0;
        if i > 0 {
            r += t.offdiag[i - 1].abs();
        }
        if i < k - 1 {
            r += t.offdiag[i].abs();
        }
        lo = lo.min(t.diag[i] - r);
        hi = hi.max(t.diag[i] + r);
    }
    (lo, hi)
}

/// The eigenvalue of index `idx` (0-based, ascending), bracketed to width
/// `tol` by bisection on the Sturm count. `lo`/`hi` must bracket it.
fn eigenvalue_at_index(t: &SymTridiagonal, idx: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval at floating-point resolution
        }
        if count_below(t, mid) > idx {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All eigenvalues of T in (lo, hi], each bracketed to width <= tol,
/// returned sorted ascending. Multiplicities appear as repeats.
pub fn eigenvalues(t: &SymTridiagonal, lo: f64, hi: f64, tol: f64) -> Result<Vec<f64>> {
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("need lo < hi, got {lo} >= {hi}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    if t.offdiag.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Domain("eigenvalue bisection requires positive off-diagonal entries".into()));
    }
    let (glo, ghi) = gershgorin_bounds(t);
    let lo = lo.max(glo - tol);
    let hi = hi.min(ghi + tol);
    if !(lo < hi) {
        return Ok(Vec::new());
    }
    let first = count_below(t, lo);
    let last = count_below(t, hi);
    let evs = (first..last)
        .map(|idx| eigenvalue_at_index(t, idx, lo, hi, tol))
        .collect();
    Ok(evs)
}

/// The k-th smallest eigenvalue (0-based), to width `tol`.
pub fn eigenvalue_by_index(t: &SymTridiagonal, idx: usize, tol: f64) -> Result<f64> {
    if idx >= t.dim() {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue index {idx} out of range for dimension {}",
            t.dim()
        )));
    }
    if t.offdiag.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Domain("eigenvalue bisection requires positive off-diagonal entries".into()));
    }
    let (lo, hi) = gershgorin_bounds(t);
    Ok(eigenvalue_at_index(t, idx, lo - tol, hi + tol, tol))
}

/// Marchenko–Pastur density σ̃^γ(x) = √((x-a²)(b²-x)) / (2πx) on [a², b²],
/// with a = √γ - 1, b = √γ + 1.
pub fn mp_density(gamma: f64, x: f64) -> f64 {
    let a2 = (gamma.sqrt() - 1.0).powi(2);
    let b2 = (gamma.sqrt() + 1.0).powi(2);
    if x <= a2 || x >= b2 {
        return 0.0;
    }
    ((x - a2) * (b2 - x)).sqrt() / (2.0 * PI * x)
}

/// Marchenko–Pastur distribution function, by quadrature under the
/// substitution x = a² + (b²-a²)sin²θ which removes both edge
/// singularities. Accurate to ~1e-10.
pub fn mp_cdf(gamma: f64, x: f64) -> f64 {
    let a2 = (gamma.sqrt() - 1.0).powi(2);
    let b2 = (gamma.sqrt() + 1.0).powi(2);
    if x <= a2 {
        return 0.0;
    }
    if x >= b2 {
        return 1.0;
    }
    let span = b2 - a2;
    let theta_x = (((x - a2) / span).sqrt()).asin();
    // integrand in θ: span² sin²θ cos²θ / (π x(θ)); finite at θ=0 even for γ=1
    let f = |theta: f64| {
        let s = theta.sin();
        let c = theta.cos();
        let xt = a2 + span * s * s;
        if xt == 0.0 {
            // γ=1 limit: span² s² c² / (π span s²) = span c² / π
            return span * c * c / PI;
        }
        span * span * s * s * c * c / (PI * xt)
    };
    simpson(f, 0.0, theta_x, 2000)
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2) & !1usize; // even
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        acc += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Singular-value density σ^γ(x) = 2|x|·σ̃^γ(x²), supported on a <= |x| <= b.
pub fn sv_density(gamma: f64, x: f64) -> f64 {
    2.0 * x.abs() * mp_density(gamma, x * x)
}

/// Which side produced a counting sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountingSource {
    Matrix,
    Sde,
}

impl std::fmt::Display for CountingSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CountingSource::Matrix => write!(f, "matrix"),
            CountingSource::Sde => write!(f, "sde"),
        }
    }
}

/// One replica's counting-function values N(λ_i) over a λ-grid.
///
/// N(λ) counts points in (0, λ] for λ > 0 and minus the points in (λ, 0]
/// for λ < 0, so N is nondecreasing and N(0) = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingSample {
    pub lambda_grid: Vec<f64>,
    pub counts: Vec<i64>,
    pub replica_id: u64,
    pub source: CountingSource,
}

fn count_scaled(scaled: &[f64], lambda: f64) -> i64 {
    if lambda > 0.0 {
        scaled.iter().filter(|&&s| s > 0.0 && s <= lambda).count() as i64
    } else if lambda < 0.0 {
        -(scaled.iter().filter(|&&s| s > lambda && s <= 0.0).count() as i64)
    } else {
        0
    }
}

/// Counting function of the points scaled by 4√n₀ around μ.
pub fn counting_function(
    points: &[f64],
    params: &ScalingParams,
    lambda_grid: &[f64],
    replica_id: u64,
) -> CountingSample {
    let scale = 4.0 * params.n0.sqrt();
    let scaled: Vec<f64> = points.iter().map(|&p| scale * (p - params.mu)).collect();
    CountingSample {
        lambda_grid: lambda_grid.to_vec(),
        counts: lambda_grid.iter().map(|&l| count_scaled(&scaled, l)).collect(),
        replica_id,
        source: CountingSource::Matrix,
    }
}

/// Counting function of Hermite points scaled by √(4n - μ²) around μ.
/// Requires |μ| < 2√n.
pub fn hermite_scaling(
    points: &[f64],
    n: usize,
    mu: f64,
    lambda_grid: &[f64],
    replica_id: u64,
) -> Result<CountingSample> {
    let nf = n as f64;
    if mu * mu >= 4.0 * nf {
        return Err(Error::OutsideBulk(format!(
            "|mu| = {} is not below 2*sqrt(n) = {}",
            mu.abs(),
            2.0 * nf.sqrt()
        )));
    }
    let scale = (4.0 * nf - mu * mu).sqrt();
    let scaled: Vec<f64> = points.iter().map(|&p| scale * (p - mu)).collect();
    Ok(CountingSample {
        lambda_grid: lambda_grid.to_vec(),
        counts: lambda_grid.iter().map(|&l| count_scaled(&scaled, l)).collect(),
        replica_id,
        source: CountingSource::Matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t22() -> SymTridiagonal {
        // eigenvalues 1 and 3
        SymTridiagonal { diag: vec![2.0, 2.0], offdiag: vec![1.0] }
    }

    #[test]
    fn sturm_count_two_by_two() {
        let t = t22();
        assert_eq!(sturm_count(&t, 2.0).unwrap(), 1);
        assert_eq!(sturm_count(&t, 0.5).unwrap(), 0);
        assert_eq!(sturm_count(&t, 3.5).unwrap(), 2);
        // below the Gershgorin interval the count is zero
        let lo = -(2.0 + 2.0 * 1.0);
        assert_eq!(sturm_count(&t, lo).unwrap(), 0);
        let bad = SymTridiagonal { diag: vec![1.0, 1.0], offdiag: vec![0.0] };
        assert!(sturm_count(&bad, 0.0).is_err());
    }

    #[test]
    fn sturm_count_monotone_and_totals() {
        let t = SymTridiagonal {
            diag: vec![0.3, -1.2, 2.0, 0.7, -0.4],
            offdiag: vec![0.8, 1.1, 0.5, 0.9],
        };
        let (lo, hi) = gershgorin_bounds(&t);
        let mut prev = 0;
        let steps = 200;
        for i in 0..=steps {
            let x = lo + (hi - lo) * i as f64 / steps as f64 + 1e-9;
            let c = count_below(&t, x);
            assert!(c >= prev, "count must be nondecreasing");
            prev = c;
        }
        assert_eq!(prev, 5);
    }

    /// On a doubled matrix the spectrum is ± symmetric, so the count
    /// outside (-x, x) is sturm(-x) + (2n - sturm(x)) and equals twice the
    /// number of singular values >= x for x > 0 off the spectrum.
    #[test]
    fn sturm_count_respects_doubling_symmetry() {
        use crate::ensembles::{double, sample_laguerre};
        use crate::rng::RngStream;
        let mut rng = RngStream::new(414).rng();
        use rand::Rng;
        for rep in 0..20 {
            let n = rng.random_range(2..=12);
            let m = n + rng.random_range(1..=6);
            let b = sample_laguerre(n, m, 2.0, RngStream::with_stream(515, rep)).unwrap();
            let doubled = double(&b);
            let (_, hi) = gershgorin_bounds(&doubled);
            let svs = eigenvalues(&doubled, 0.0, hi + 1.0, 1e-11).unwrap();
            for _ in 0..8 {
                let x = rng.random_range(0.01..hi);
                let outside = sturm_count(&doubled, -x).unwrap()
                    + (2 * n - sturm_count(&doubled, x).unwrap());
                let above = svs.iter().filter(|&&s| s >= x).count();
                assert_eq!(outside, 2 * above, "rep {rep}, x = {x}");
            }
        }
    }

    #[test]
    fn eigenvalues_two_by_two() {
        let evs = eigenvalues(&t22(), -10.0, 10.0, 1e-12).unwrap();
        assert_eq!(evs.len(), 2);
        assert!((evs[0] - 1.0).abs() < 1e-10);
        assert!((evs[1] - 3.0).abs() < 1e-10);
        // window selection
        let evs = eigenvalues(&t22(), 2.0, 10.0, 1e-12).unwrap();
        assert_eq!(evs.len(), 1);
        assert!((evs[0] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn eigenvalue_by_index_matches_full_solve() {
        let t = SymTridiagonal {
            diag: vec![0.3, -1.2, 2.0, 0.7, -0.4],
            offdiag: vec![0.8, 1.1, 0.5, 0.9],
        };
        let all = eigenvalues(&t, -10.0, 10.0, 1e-12).unwrap();
        for (i, &ev) in all.iter().enumerate() {
            let x = eigenvalue_by_index(&t, i, 1e-12).unwrap();
            assert!((x - ev).abs() < 1e-10);
        }
    }

    #[test]
    fn scaling_params_hand_values() {
        // n=100, m=200, mu=10 -> n0 = 99.5, n1 = 0, m1 = 100
        let p = scaling_params(2.0, 100, 200, 10.0, 1.0).unwrap();
        assert!((p.n0 - 99.5).abs() < 1e-12);
        assert!(p.n1.abs() < 1e-12);
        assert!((p.m1 - 100.0).abs() < 1e-12);
        assert_eq!(p.edge_side, 1.0);
        // n=100, m=200, mu=12 -> n0 ≈ 96.1389, n1 ≈ 3.3611
        let p = scaling_params(2.0, 100, 200, 12.0, 1.0).unwrap();
        assert!((p.n1 - 1936.0 / 576.0).abs() < 1e-12);
        assert!((p.n0 + p.n1 - 99.5).abs() < 1e-12);
        assert_eq!(p.edge_side, 1.0);
        // center far outside the bulk
        assert!(scaling_params(2.0, 100, 200, 100.0, 1.0).is_err());
        assert!(scaling_params(2.0, 100, 200, 0.5, 1.0).is_err());
    }

    #[test]
    fn scaling_params_cross_check_density_display() {
        let p = scaling_params(2.0, 100, 200, 10.0, 1.0).unwrap();
        let alt = n0_from_density(100, 200, 10.0);
        assert!((p.n0 - alt).abs() <= 1e-9 * p.n0.abs().max(1.0));
    }

    #[test]
    fn mp_density_values() {
        assert_eq!(mp_density(2.0, 0.1), 0.0);
        assert_eq!(mp_density(2.0, 6.0), 0.0);
        let v = mp_density(1.0, 2.0);
        assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-12);
        // gamma=1 support is [0,4]
        assert!(mp_density(1.0, 3.999) > 0.0);
        assert_eq!(mp_density(1.0, 4.001), 0.0);
    }

    #[test]
    fn mp_cdf_total_mass() {
        for &gamma in &[1.0f64, 2.0, 4.0] {
            let b2 = (gamma.sqrt() + 1.0).powi(2);
            let total = mp_cdf(gamma, b2);
            assert!((total - 1.0).abs() < 1e-6, "gamma={gamma} total={total}");
            // monotone
            let a2 = (gamma.sqrt() - 1.0).powi(2);
            let mut prev = 0.0;
            for i in 0..=100 {
                let x = a2 + (b2 - a2) * i as f64 / 100.0;
                let c = mp_cdf(gamma, x);
                assert!(c + 1e-12 >= prev);
                prev = c;
            }
        }
    }

    #[test]
    fn sv_density_values() {
        let v = sv_density(2.0, 1.0);
        assert!((v - 2.0 / PI).abs() < 1e-12);
        assert_eq!(sv_density(2.0, -1.0), sv_density(2.0, 1.0));
        // definitional relation
        for &x in &[0.7, 1.0, 1.9] {
            assert!((sv_density(2.0, x) - 2.0 * x * mp_density(2.0, x * x)).abs() < 1e-14);
        }
    }

    #[test]
    fn counting_function_conventions() {
        let params = scaling_params(2.0, 100, 200, 10.0, 1.0).unwrap();
        let grid = [-1.0, 0.0, 1.0];
        // no points at all
        let c = counting_function(&[], &params, &grid, 0);
        assert_eq!(c.counts, vec![0, 0, 0]);
        // one scaled point at +0.5: place the raw point at mu + 0.5/(4*sqrt(n0))
        let scale = 4.0 * params.n0.sqrt();
        let c = counting_function(&[params.mu + 0.5 / scale], &params, &grid, 0);
        assert_eq!(c.counts, vec![0, 0, 1]);
        // one scaled point at -0.5 and lambda = -1 -> -1
        let c = counting_function(&[params.mu - 0.5 / scale], &params, &grid, 0);
        assert_eq!(c.counts, vec![-1, 0, 0]);
    }

    #[test]
    fn hermite_scaling_guard() {
        assert!(hermite_scaling(&[], 100, 25.0, &[1.0], 0).is_err());
        let c = hermite_scaling(&[], 100, 0.0, &[1.0], 0).unwrap();
        assert_eq!(c.counts, vec![0]);
    }

    #[test]
    fn bulk_scaling_factors_agree() {
        // with mu = sqrt(c n) and m = gamma n, the two scalings
        // 4*sqrt(n0) and 2mu * 2pi * mp(c) agree as n grows
        for &n in &[1000usize, 10_000] {
            let gamma = 2.0;
            let c = 3.0;
            let m = (gamma * n as f64) as usize;
            let mu = (c * n as f64).sqrt();
            let p = scaling_params(2.0, n, m, mu, 1.0).unwrap();
            let lhs = 4.0 * p.n0.sqrt();
            let rhs = 2.0 * mu * 2.0 * PI * mp_density(gamma, c);
            let ratio = lhs / rhs;
            assert!((ratio - 1.0).abs() < 0.02, "n={n} ratio={ratio}");
        }
    }
}
