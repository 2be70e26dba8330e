//! The hub multigraph arising for heavy-tailed weights with single-edge percolation: hubs `i`
//! and `j` are joined by a Poisson number of two-step paths with mean
//! `lambda^2 * int_0^inf theta_i(x) theta_j(x) dx`.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::components::UnionFind;
use crate::error::{invalid, Result};
use crate::quadrature::integrate;
use crate::seeds::{par_map, replicate_rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HubKernelKind {
    Grg,
    Ecm,
}

/// Connection profile of hub `i` to an intermediate vertex at scaled position `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HubKernel {
    pub kind: HubKernelKind,
    pub alpha: f64,
    pub mu: f64,
    pub cf: f64,
}

/// `theta_i(x)` below this level is treated by its leading-order power law.
const TAIL_LEVEL: f64 = 1e-12;

impl HubKernel {
    pub fn new(kind: HubKernelKind, alpha: f64, mu: f64, cf: f64) -> Result<Self> {
        if !(alpha > 0.5 && alpha < 1.0) {
            return Err(invalid("alpha must lie in (1/2, 1)"));
        }
        if !(mu > 0.0 && cf > 0.0 && mu.is_finite() && cf.is_finite()) {
            return Err(invalid("mu and cF must be positive"));
        }
        Ok(Self { kind, alpha, mu, cf })
    }

    fn strength(&self, i: usize, x: f64) -> f64 {
        self.cf * self.cf * (i as f64 * x).powf(-self.alpha)
    }

    pub fn theta(&self, i: usize, x: f64) -> f64 {
        let a = self.strength(i, x);
        match self.kind {
            HubKernelKind::Grg => a / (self.mu + a),
            HubKernelKind::Ecm => -(-a / self.mu).exp_m1(),
        }
    }

    /// `theta_i` per unit `x^-alpha` once the profile is small: `cF^2 i^-alpha / mu`.
    fn tail_coefficient(&self, i: usize) -> f64 {
        self.cf * self.cf * (i as f64).powf(-self.alpha) / self.mu
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// `lambda^2 int_0^inf theta_i theta_j dx` (hubs are 1-based). The integral is split at 1, the
/// middle range is integrated in log scale, and the range where both profiles fall below
/// 1e-12 is added in closed form from the power-law asymptotics.
pub fn lambda_ij(i: usize, j: usize, lambda: f64, kernel: &HubKernel, tol: f64) -> Result<f64> {
    if i == 0 || j == 0 {
        return Err(invalid("hub indices are 1-based"));
    }
    Ok(lambda * lambda * base_integral(i, j, kernel, tol)?)
}

fn base_integral(i: usize, j: usize, k: &HubKernel, tol: f64) -> Result<f64> {
    let f = |x: f64| if x <= 0.0 { 1.0 } else { k.theta(i, x) * k.theta(j, x) };
    let head = integrate(f, 0.0, 1.0, 0.0, tol, 2000)?;
    // theta_i(x) <= tail_coefficient(i) x^-alpha; cut where the larger profile reaches TAIL_LEVEL.
    let c = k.tail_coefficient(i.min(j));
    let x_cut = (c / TAIL_LEVEL).powf(1.0 / k.alpha).max(1.0);
    let mid = integrate(|s: f64| f(s.exp()) * s.exp(), 0.0, x_cut.ln(), 0.0, tol, 4000)?;
    let g = 2.0 * k.alpha - 1.0;
    let tail = k.tail_coefficient(i) * k.tail_coefficient(j) * x_cut.powf(-g) / g;
    Ok(head.value + mid.value + tail)
}

/// Integrals for `lambda = 1`, cached for hubs `1..=k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaMatrix {
    pub k: usize,
    pub kernel: HubKernel,
    base: Vec<f64>,
}

impl LambdaMatrix {
    pub fn new(k: usize, kernel: HubKernel, tol: f64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("need at least one hub"));
        }
        let rows: Vec<Result<Vec<f64>>> = par_map(k, |i| (i..k).map(|j| base_integral(i + 1, j + 1, &kernel, tol)).collect());
        let mut base = vec![0.0; k * k];
        for (i, row) in rows.into_iter().enumerate() {
            for (off, v) in row?.into_iter().enumerate() {
                let j = i + off;
                base[i * k + j] = v;
                base[j * k + i] = v;
            }
        }
        Ok(Self { k, kernel, base })
    }

    /// `lambda_ij` for 1-based hubs.
    pub fn get(&self, i: usize, j: usize, lambda: f64) -> f64 {
        lambda * lambda * self.base[(i - 1) * self.k + (j - 1)]
    }

    /// Leading `k x k` block.
    pub fn truncate(&self, k: usize) -> Self {
        let k = k.min(self.k);
        let base = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).map(|(i, j)| self.base[i * self.k + j]).collect();
        Self { k, kernel: self.kernel, base }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedLimitGraph {
    pub k: usize,
    pub lambda: f64,
    /// Row-major `k x k` symmetric multiplicities with zero diagonal.
    pub multiplicities: Vec<u32>,
}

impl TruncatedLimitGraph {
    pub fn multiplicity(&self, i: usize, j: usize) -> u32 {
        self.multiplicities[(i - 1) * self.k + (j - 1)]
    }

    pub fn edge_count(&self) -> u64 {
        self.multiplicities.iter().map(|&m| m as u64).sum::<u64>() / 2
    }
}

pub fn sample_g_infty_with<R: Rng + ?Sized>(m: &LambdaMatrix, lambda: f64, rng: &mut R) -> TruncatedLimitGraph {
    let k = m.k;
    let mut mult = vec![0u32; k * k];
    for i in 1..=k {
        for j in i + 1..=k {
            let mean = m.get(i, j, lambda);
            if mean > 0.0 {
                let c = Poisson::new(mean).map(|p| p.sample(rng) as u32).unwrap_or(0);
                mult[(i - 1) * k + (j - 1)] = c;
                mult[(j - 1) * k + (i - 1)] = c;
            }
        }
    }
    TruncatedLimitGraph { k, lambda, multiplicities: mult }
}

pub fn sample_g_infty<R: Rng + ?Sized>(k: usize, lambda: f64, kernel: &HubKernel, rng: &mut R) -> Result<TruncatedLimitGraph> {
    let m = LambdaMatrix::new(k, *kernel, DEFAULT_TOLERANCE)?;
    Ok(sample_g_infty_with(&m, lambda, rng))
}

/// Hub weights `cF i^-alpha` for `i = 1..=k`.
pub fn hub_theta(cf: f64, alpha: f64, k: usize) -> Vec<f64> {
    (1..=k).map(|i| cf * (i as f64).powf(-alpha)).collect()
}

/// Per-component sums of `theta`, non-increasing.
pub fn limit_weights(g: &TruncatedLimitGraph, theta: &[f64]) -> Result<Vec<f64>> {
    if theta.len() < g.k {
        return Err(invalid("theta shorter than the hub count"));
    }
    let mut uf = UnionFind::new(g.k);
    for i in 0..g.k {
        for j in i + 1..g.k {
            if g.multiplicities[i * g.k + j] > 0 {
                uf.union(i, j);
            }
        }
    }
    let mut acc = vec![0.0; g.k];
    for (i, &t) in theta.iter().enumerate().take(g.k) {
        acc[uf.find(i)] += t;
    }
    let mut w: Vec<f64> = acc.into_iter().filter(|&x| x > 0.0).collect();
    w.sort_by(|a, b| b.total_cmp(a));
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KStability {
    pub k: usize,
    /// Medians of the three largest limit weights at `k` and at `2k`.
    pub medians_k: Vec<f64>,
    pub medians_2k: Vec<f64>,
    pub max_relative_change: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Medians of the top-`top` limit weights over `draws` samples (keyed streams).
pub fn limit_weight_medians(m: &LambdaMatrix, lambda: f64, theta: &[f64], draws: usize, top: usize, master: u64) -> Result<Vec<f64>> {
    let samples: Vec<Result<Vec<f64>>> = par_map(draws, |r| {
        let mut rng = replicate_rng(master, r as u64);
        limit_weights(&sample_g_infty_with(m, lambda, &mut rng), theta)
    });
    let samples: Vec<Vec<f64>> = samples.into_iter().collect::<Result<_>>()?;
    Ok((0..top).map(|q| median(samples.iter().map(|s| s.get(q).copied().unwrap_or(0.0)).collect())).collect())
}

/// Re-runs the weight law at `2k` hubs and compares the medians of the three largest entries.
pub fn k_stability(m2k: &LambdaMatrix, lambda: f64, cf: f64, draws: usize, master: u64) -> Result<KStability> {
    let k = m2k.k / 2;
    if k == 0 {
        return Err(invalid("matrix must cover at least two hubs"));
    }
    let alpha = m2k.kernel.alpha;
    let mk = m2k.truncate(k);
    let a = limit_weight_medians(&mk, lambda, &hub_theta(cf, alpha, k), draws, 3, master)?;
    let b = limit_weight_medians(m2k, lambda, &hub_theta(cf, alpha, 2 * k), draws, 3, master)?;
    let change = a.iter().zip(&b).map(|(x, y)| ((y - x) / y).abs()).fold(0.0, f64::max);
    Ok(KStability { k, medians_k: a, medians_2k: b, max_relative_change: change })
}
