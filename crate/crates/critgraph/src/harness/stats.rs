//! Summaries, two-sample law comparisons and log-log scaling regressions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::error::{invalid, Result};

/// Linear-interpolation quantile of a sorted sample.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn median(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    quantile_sorted(&s, 0.5)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Standard error of the mean.
    pub se: f64,
    pub median: f64,
    pub q05: f64,
    pub q25: f64,
    pub q75: f64,
    pub q95: f64,
}

pub fn summarize(x: &[f64]) -> Summary {
    let n = x.len();
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let mean = if n == 0 { f64::NAN } else { x.iter().sum::<f64>() / n as f64 };
    let se = if n < 2 { f64::NAN } else { (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64 / n as f64).sqrt() };
    Summary {
        count: n,
        mean,
        se,
        median: quantile_sorted(&s, 0.5),
        q05: quantile_sorted(&s, 0.05),
        q25: quantile_sorted(&s, 0.25),
        q75: quantile_sorted(&s, 0.75),
        q95: quantile_sorted(&s, 0.95),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum LawMethod {
    /// Two-sample Kolmogorov-Smirnov at significance `level`.
    Ks { level: f64 },
    /// Total variation over `bins` equal-width bins spanning both samples; rejects above `threshold`.
    TvBinned { bins: usize, threshold: f64 },
    /// Two-sample chi-square over the distinct values (integer-valued data), cells pooled until both
    /// expected counts reach 5. Degrees of freedom: pooled cells minus one.
    Chi2 { level: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawComparison {
    pub method: LawMethod,
    pub statistic: f64,
    pub critical_value: f64,
    pub df: Option<usize>,
    pub reject: bool,
}

pub const MIN_SAMPLE: usize = 100;

fn check_sample(x: &[f64]) -> Result<()> {
    if x.len() < MIN_SAMPLE {
        return Err(invalid(format!("samples need at least {MIN_SAMPLE} values, got {}", x.len())));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(invalid("samples contain non-finite values"));
    }
    Ok(())
}

/// `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// `c(alpha) sqrt((n+m)/(nm))` with `c(alpha) = sqrt(-ln(alpha/2)/2)`.
pub fn ks_critical(level: f64, n: usize, m: usize) -> f64 {
    let c = (-(level / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

pub fn tv_binned(a: &[f64], b: &[f64], bins: usize) -> f64 {
    let lo = a.iter().chain(b).copied().fold(f64::INFINITY, f64::min);
    let hi = a.iter().chain(b).copied().fold(f64::NEG_INFINITY, f64::max);
    let bins = bins.max(1);
    let width = (hi - lo) / bins as f64;
    let bin = |x: f64| if width > 0.0 { (((x - lo) / width) as usize).min(bins - 1) } else { 0 };
    let mut ha = vec![0.0; bins];
    let mut hb = vec![0.0; bins];
    for &x in a {
        ha[bin(x)] += 1.0 / a.len() as f64;
    }
    for &x in b {
        hb[bin(x)] += 1.0 / b.len() as f64;
    }
    0.5 * ha.iter().zip(&hb).map(|(p, q)| (p - q).abs()).sum::<f64>()
}

/// Two-sample chi-square statistic and degrees of freedom on integer-valued data.
pub fn chi2_two_sample(a: &[f64], b: &[f64]) -> (f64, usize) {
    let mut cells: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for &x in a {
        cells.entry(x.round() as i64).or_default().0 += 1.0;
    }
    for &x in b {
        cells.entry(x.round() as i64).or_default().1 += 1.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    // Pool adjacent cells until both expected counts are at least 5.
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (_, (ca, cb)) in cells {
        acc.0 += ca;
        acc.1 += cb;
        let s = acc.0 + acc.1;
        if s * na / total >= 5.0 && s * nb / total >= 5.0 {
            pooled.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => pooled.push(acc),
        }
    }
    let k1 = (nb / na).sqrt();
    let k2 = (na / nb).sqrt();
    let stat = pooled.iter().map(|&(ca, cb)| (k1 * ca - k2 * cb).powi(2) / (ca + cb)).sum();
    (stat, pooled.len().saturating_sub(1))
}

pub fn compare_laws(a: &[f64], b: &[f64], method: LawMethod) -> Result<LawComparison> {
    check_sample(a)?;
    check_sample(b)?;
    Ok(match method {
        LawMethod::Ks { level } => {
            let d = ks_distance(a, b);
            let c = ks_critical(level, a.len(), b.len());
            LawComparison { method, statistic: d, critical_value: c, df: None, reject: d > c }
        }
        LawMethod::TvBinned { bins, threshold } => {
            let tv = tv_binned(a, b, bins);
            LawComparison { method, statistic: tv, critical_value: threshold, df: None, reject: tv > threshold }
        }
        LawMethod::Chi2 { level } => {
            let (stat, df) = chi2_two_sample(a, b);
            if df == 0 {
                return Ok(LawComparison { method, statistic: 0.0, critical_value: 0.0, df: Some(0), reject: false });
            }
            let crit = ChiSquared::new(df as f64).map_err(|e| invalid(e.to_string()))?.inverse_cdf(1.0 - level);
            LawComparison { method, statistic: stat, critical_value: crit, df: Some(df), reject: stat > crit }
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    /// 95% confidence interval for the slope (Student t with k-2 degrees of freedom).
    pub ci: (f64, f64),
    /// `(log n, log median)` points.
    pub points: Vec<(f64, f64)>,
}

/// Least-squares slope of log median size against log n.
pub fn scaling_regression(sizes: &BTreeMap<usize, Vec<f64>>) -> Result<Regression> {
    if sizes.len() < 3 {
        return Err(invalid("scaling regression needs at least three n values"));
    }
    let mut points = Vec::new();
    for (&n, s) in sizes {
        let m = median(s);
        if !(m > 0.0) || n == 0 {
            return Err(invalid(format!("median size at n={n} is not positive")));
        }
        points.push(((n as f64).ln(), m.ln()));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let slope_se = (rss / (k - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, k - 2.0).map_err(|e| invalid(e.to_string()))?.inverse_cdf(0.975);
    Ok(Regression { slope, intercept, slope_se, ci: (slope - t * slope_se, slope + t * slope_se), points })
}
