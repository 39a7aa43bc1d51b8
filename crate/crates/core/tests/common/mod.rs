//! Independent oracles shared by the integration tests. Everything here
//! deliberately avoids the code paths it is used to check: dense Jacobi
//! rotations for eigenvalues of B Bᵀ, the classical QL sweep for
//! tridiagonal spectra, characteristic-polynomial root bracketing for
//! tiny matrices, and adaptive Simpson quadrature for density work.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use betabulk::ensembles::{BidiagonalLaguerre, SymTridiagonal};

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let scale: f64 = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
        .max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off.sqrt() < 1e-13 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 * scale {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut evs: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    evs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    evs
}

/// Dense B Bᵀ for a bidiagonal matrix.
pub fn bbt_dense(b: &BidiagonalLaguerre) -> Vec<Vec<f64>> {
    let n = b.n;
    let mut a = vec![vec![0.0; n]; n];
    // B has diag[i] on the diagonal and subdiag[i] below it
    for i in 0..n {
        a[i][i] = b.diag[i] * b.diag[i] + if i > 0 { b.subdiag[i - 1] * b.subdiag[i - 1] } else { 0.0 };
        if i + 1 < n {
            let v = b.subdiag[i] * b.diag[i];
            a[i][i + 1] = v;
            a[i + 1][i] = v;
        }
    }
    a
}

/// Singular values of a bidiagonal matrix from the Jacobi oracle on B Bᵀ,
/// sorted ascending.
pub fn singular_values_oracle(b: &BidiagonalLaguerre) -> Vec<f64> {
    jacobi_eigenvalues(&bbt_dense(b))
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect()
}

/// All eigenvalues of a symmetric tridiagonal matrix by the classical QL
/// algorithm with implicit shifts, sorted ascending.
pub fn ql_eigenvalues(t: &SymTridiagonal) -> Vec<f64> {
    let n = t.dim();
    let mut d = t.diag.clone();
    let mut e = t.offdiag.clone();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 64, "QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if i == l {
                    d[l] -= p;
                    e[l] = g;
                    e[m] = 0.0;
                }
            }
        }
    }
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    d
}

/// Characteristic polynomial of a symmetric tridiagonal matrix at x, by
/// the three-term leading-minor recurrence.
fn charpoly(t: &SymTridiagonal, x: f64) -> f64 {
    let mut p_prev = 1.0;
    let mut p = t.diag[0] - x;
    for i in 1..t.dim() {
        let e = t.offdiag[i - 1];
        let next = (t.diag[i] - x) * p - e * e * p_prev;
        p_prev = p;
        p = next;
    }
    p
}

/// Roots of the characteristic polynomial by dense sign-change bracketing
/// over the Gershgorin interval plus bisection; reliable for small n with
/// simple eigenvalues.
pub fn charpoly_roots(t: &SymTridiagonal, tol: f64) -> Vec<f64> {
    let n = t.dim();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += t.offdiag[i - 1].abs();
        }
        if i < n - 1 {
            r += t.offdiag[i].abs();
        }
        lo = lo.min(t.diag[i] - r);
        hi = hi.max(t.diag[i] + r);
    }
    lo -= 1.0;
    hi += 1.0;
    let grid = 20_000;
    let mut roots = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = charpoly(t, lo);
    for k in 1..=grid {
        let x = lo + (hi - lo) * k as f64 / grid as f64;
        let f = charpoly(t, x);
        if f_prev == 0.0 {
            roots.push(x_prev);
        } else if f_prev.signum() != f.signum() {
            let (mut a, mut b) = (x_prev, x);
            let mut fa = f_prev;
            while b - a > tol {
                let mid = 0.5 * (a + b);
                let fm = charpoly(t, mid);
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fa.signum() != fm.signum() {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x_prev = x;
        f_prev = f;
    }
    roots
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b))
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let c = 0.5 * (a + b);
        let left = simpson(f, a, c);
        let right = simpson(f, c, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        recurse(f, a, c, left, tol / 2.0, depth - 1)
            + recurse(f, c, b, right, tol / 2.0, depth - 1)
    }
    let whole = simpson(f, a, b);
    recurse(f, a, b, whole, tol, 40)
}

/// Piecewise-linear CDF built from density values on a uniform grid
/// (cumulative trapezoid, normalized). Returns a closure for KS use.
pub fn grid_cdf(xs: Vec<f64>, density: Vec<f64>) -> impl Fn(f64) -> f64 {
    assert_eq!(xs.len(), density.len());
    let mut cum = vec![0.0; xs.len()];
    for i in 1..xs.len() {
        cum[i] = cum[i - 1] + 0.5 * (density[i] + density[i - 1]) * (xs[i] - xs[i - 1]);
    }
    let total = *cum.last().unwrap();
    for c in cum.iter_mut() {
        *c /= total;
    }
    move |x: f64| {
        if x <= xs[0] {
            return 0.0;
        }
        if x >= *xs.last().unwrap() {
            return 1.0;
        }
        let mut lo = 0usize;
        let mut hi = xs.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if xs[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let w = (x - xs[lo]) / (xs[hi] - xs[lo]);
        cum[lo] + w * (cum[hi] - cum[lo])
    }
}
