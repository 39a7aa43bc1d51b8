//! Summary statistics and Kolmogorov–Smirnov distances.

/// Mean, unbiased variance and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub var: f64,
    pub se: f64,
    pub n: usize,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len();
    if n == 0 {
        return Summary::default();
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Summary { mean, var: 0.0, se: 0.0, n };
    }
    let var = xs.iter().map(|&x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Summary { mean, var, se: (var / n as f64).sqrt(), n }
}

/// Standard error of the sample variance via the fourth central moment:
/// SE(s²) ≈ √((m₄ - s⁴)/n).
pub fn variance_se(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let s = summarize(xs);
    let m4 = xs.iter().map(|&x| (x - s.mean).powi(4)).sum::<f64>() / n as f64;
    ((m4 - s.var * s.var).max(0.0) / n as f64).sqrt()
}

/// Two-sample Kolmogorov–Smirnov statistic D = sup |F₁ - F₂| by a sorted
/// merge walk; ties are stepped through jointly.
pub fn ks_two_sample(xs: &[f64], ys: &[f64]) -> f64 {
    assert!(!xs.is_empty() && !ys.is_empty(), "ks needs nonempty samples");
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(|p, q| p.partial_cmp(q).unwrap());
    b.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic two-sided p-value for the two-sample statistic, via the
/// Kolmogorov distribution of √(n₁n₂/(n₁+n₂))·D. Conservative for
/// discrete data; reported for orientation, thresholds act on D itself.
pub fn ks_two_sample_p_value(d: f64, n1: usize, n2: usize) -> f64 {
    let en = (n1 as f64 * n2 as f64) / (n1 + n2) as f64;
    let z = en.sqrt() * d;
    kolmogorov_survival(z)
}

fn kolmogorov_survival(z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64 * z).powi(2)).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov distance of a sample to a distribution
/// function.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> f64 {
    assert!(!xs.is_empty(), "ks needs a nonempty sample");
    let mut a = xs.to_vec();
    a.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let n = a.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in a.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}
