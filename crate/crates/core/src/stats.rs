//! Small statistical helpers.

use crate::error::{Error, Result};

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (zero for fewer than two points).
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Standard error of the mean.
pub fn std_err(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// `sup_t |F_N(t) - Φ(t)|` after standardizing by the sample mean and SD,
/// evaluated on both sides of every jump.
pub fn ks_normal(xs: &[f64]) -> Result<(f64, f64, f64)> {
    let m = mean(xs);
    let sd = std_dev(xs);
    if !(sd > 0.0) {
        return Err(Error::Degenerate("sample standard deviation is zero".into()));
    }
    let mut z: Vec<f64> = xs.iter().map(|x| (x - m) / sd).collect();
    z.sort_by(f64::total_cmp);
    let n = z.len() as f64;
    let d = z
        .iter()
        .enumerate()
        .map(|(i, &zi)| {
            let p = normal_cdf(zi);
            f64::max((i + 1) as f64 / n - p, p - i as f64 / n)
        })
        .fold(0.0, f64::max);
    Ok((d, m, sd))
}

/// Ordinary least squares slope of `y` on `x` and its standard error from
/// the residuals.
pub fn ls_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let se = if n > 2.0 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    (slope, se)
}

/// Least squares slope of `y` on `x` where each `y_i` carries an independent
/// standard error; returns the slope and its propagated standard error.
pub fn ls_slope_with_errors(x: &[f64], y: &[f64], se_y: &[f64]) -> (f64, f64) {
    let mx = mean(x);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let (slope, _) = ls_slope(x, y);
    let var: f64 = x.iter().zip(se_y).map(|(a, s)| ((a - mx) / sxx).powi(2) * s * s).sum();
    (slope, var.sqrt())
}

/// Normal-approximation standard error of a binomial frequency.
pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Total variation distance between two probability mass functions given as
/// slices over a common support (missing tail entries count as zero).
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    0.5 * (0..len)
        .map(|i| (p.get(i).copied().unwrap_or(0.0) - q.get(i).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Empirical mass function of nonnegative integers.
pub fn empirical_pmf(xs: &[usize]) -> Vec<f64> {
    let max = xs.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0.0; max + 1];
    for &x in xs {
        counts[x] += 1.0;
    }
    let n = xs.len() as f64;
    counts.iter_mut().for_each(|c| *c /= n);
    counts
}
