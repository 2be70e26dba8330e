//! Degree and weight sequences, scaling exponents and criticality diagnostics.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Per-vertex degrees with an even total.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
    total: u64,
    sorted: bool,
}

impl DegreeSequence {
    /// Wraps `degrees` as given; an odd total is an error.
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        let total: u64 = degrees.iter().map(|&d| d as u64).sum();
        if total % 2 == 1 {
            return Err(Error::OddTotalDegree(total));
        }
        let sorted = degrees.windows(2).all(|w| w[0] >= w[1]);
        Ok(Self { degrees, total, sorted })
    }

    /// Wraps `degrees`, adding a dummy half-edge to the first vertex if the total is odd.
    pub fn with_parity_fix(mut degrees: Vec<u32>) -> Self {
        let total: u64 = degrees.iter().map(|&d| d as u64).sum();
        if total % 2 == 1 {
            degrees[0] += 1;
        }
        Self::new(degrees).expect("parity fixed")
    }

    /// Builds a non-increasing sequence from `(degree, count)` blocks.
    pub fn from_counts(blocks: &[(u32, usize)]) -> Result<Self> {
        let mut blocks = blocks.to_vec();
        blocks.sort_by(|a, b| b.0.cmp(&a.0));
        let mut degrees = Vec::with_capacity(blocks.iter().map(|b| b.1).sum());
        for (d, c) in blocks {
            degrees.extend(std::iter::repeat_n(d, c));
        }
        Self::new(degrees)
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Total number of half-edges.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.degrees
    }

    /// Exact ν_n as a (numerator, denominator) pair.
    pub fn nu_fraction(&self) -> (u128, u128) {
        let num: u128 = self
            .degrees
            .iter()
            .map(|&d| d as u128 * (d as u128).saturating_sub(1))
            .sum();
        (num, self.total as u128)
    }

    pub fn nu(&self) -> f64 {
        let (num, den) = self.nu_fraction();
        ratio_u128(num, den)
    }

    /// Half-edge id ranges: the half-edges of vertex `v` are `offsets[v]..offsets[v + 1]`.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.n() + 1);
        let mut acc = 0usize;
        off.push(0);
        for &d in &self.degrees {
            acc += d as usize;
            off.push(acc);
        }
        off
    }
}

fn ratio_u128(num: u128, den: u128) -> f64 {
    // Split off the integer part so large totals keep full precision.
    let q = num / den;
    let r = num % den;
    q as f64 + r as f64 / den as f64
}

/// Non-negative per-vertex weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    weights: Vec<f64>,
    total: f64,
}

impl WeightSequence {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("weights must be finite and non-negative"));
        }
        let total = weights.iter().sum();
        Ok(Self { weights, total })
    }

    /// Unit weights, so component weights are component sizes.
    pub fn ones(n: usize) -> Self {
        Self { weights: vec![1.0; n], total: n as f64 }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn mean(&self) -> f64 {
        self.total / self.weights.len() as f64
    }
}

/// Hub weights `w_i = cf * (n / i)^alpha`, so that `n^-alpha * w_i = cf * i^-alpha` exactly.
pub fn hub_weights(tau: f64, n: usize, cf: f64) -> Result<WeightSequence> {
    if !(tau > 2.0 && tau < 3.0) {
        return Err(invalid("hub weights need tau in (2,3)"));
    }
    if n == 0 || !(cf > 0.0) {
        return Err(invalid("need n >= 1 and cf > 0"));
    }
    let alpha = 1.0 / (tau - 1.0);
    let w = (1..=n).map(|i| cf * (n as f64 / i as f64).powf(alpha)).collect();
    WeightSequence::new(w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailRegime {
    /// Finite third moment (tau > 4).
    FiniteThird,
    /// tau in (3, 4): finite variance, infinite third moment.
    Tau34,
    /// tau in (2, 3): infinite variance.
    Tau23,
}

/// Exponents and scale sequences for a given `tau` and `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingConstants {
    pub regime: TailRegime,
    pub tau: Option<f64>,
    pub n: usize,
    pub alpha: f64,
    pub rho: f64,
    pub eta: f64,
    pub a_n: f64,
    pub b_n: f64,
    pub c_n: f64,
    /// Value of the slowly varying function at `n`.
    pub slowly_varying: f64,
}

impl ScalingConstants {
    /// The finite-third-moment triple alpha = eta = 1/3, rho = 2/3 with L = 1.
    pub fn finite_third_moment(n: usize) -> Self {
        let nf = n as f64;
        Self {
            regime: TailRegime::FiniteThird,
            tau: None,
            n,
            alpha: 1.0 / 3.0,
            rho: 2.0 / 3.0,
            eta: 1.0 / 3.0,
            a_n: nf.cbrt(),
            b_n: nf.powf(2.0 / 3.0),
            c_n: nf.cbrt(),
            slowly_varying: 1.0,
        }
    }
}

/// Regime-correct exponents. `l` is the slowly varying function (constant 1 if `None`).
pub fn scaling_constants(
    tau: f64,
    n: usize,
    l: Option<&dyn Fn(f64) -> f64>,
) -> Result<ScalingConstants> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let regime = if tau > 2.0 && tau < 3.0 {
        TailRegime::Tau23
    } else if tau > 3.0 && tau < 4.0 {
        TailRegime::Tau34
    } else {
        return Err(invalid(format!("tau = {tau} is outside (2,3) and (3,4)")));
    };
    let alpha = 1.0 / (tau - 1.0);
    let rho = (tau - 2.0) / (tau - 1.0);
    let eta = match regime {
        TailRegime::Tau34 => (tau - 3.0) / (tau - 1.0),
        _ => (3.0 - tau) / (tau - 1.0),
    };
    let nf = n as f64;
    let lv = l.map_or(1.0, |f| f(nf));
    Ok(ScalingConstants {
        regime,
        tau: Some(tau),
        n,
        alpha,
        rho,
        eta,
        a_n: nf.powf(alpha) * lv,
        b_n: nf.powf(rho) / lv,
        c_n: nf.powf(eta) / (lv * lv),
        slowly_varying: lv,
    })
}

// Guards the floor against powf landing a hair below an exact integer, e.g. 8^(2/3).
const FLOOR_GUARD: f64 = 1e-12;

fn power_law_degree(alpha: f64, cf: f64, n: usize, i: usize, factor: f64) -> u32 {
    let x = (cf * n as f64 / i as f64).powf(alpha) * factor;
    ((x * (1.0 + FLOOR_GUARD)).floor() as u32).max(1)
}

/// `d_i = max(1, floor((cf*n/i)^(1/(tau-1)) * (1 + lambda/c_n)))`, parity fixed on vertex 1.
pub fn build_power_law_degrees(tau: f64, n: usize, cf: f64, lambda: f64) -> Result<DegreeSequence> {
    let scal = scaling_constants(tau, n, None)?;
    if !(cf > 0.0) {
        return Err(invalid("cf must be positive"));
    }
    let factor = 1.0 + lambda / scal.c_n;
    if !(factor > 0.0) {
        return Err(invalid("lambda / c_n must exceed -1"));
    }
    let d = (1..=n).map(|i| power_law_degree(scal.alpha, cf, n, i, factor)).collect();
    Ok(DegreeSequence::with_parity_fix(d))
}

/// ν_n of the power-law sequence without materializing it.
pub fn power_law_nu(tau: f64, n: usize, cf: f64, lambda: f64) -> Result<f64> {
    Ok(build_power_law_degrees(tau, n, cf, lambda)?.nu())
}

/// Finds `cf` so that the power-law sequence (with window parameter `lambda`) has ν_n
/// as close to `nu_target` as bisection over `cf` allows.
pub fn tune_cf_for_nu(tau: f64, n: usize, lambda: f64, nu_target: f64) -> Result<f64> {
    let nu_at = |cf: f64| power_law_nu(tau, n, cf, lambda);
    let (mut lo, mut hi) = (1e-3_f64, 1e3_f64);
    let (nlo, nhi) = (nu_at(lo)?, nu_at(hi)?);
    if !(nlo <= nu_target && nu_target <= nhi) {
        return Err(invalid(format!(
            "target nu {nu_target} outside the reachable range [{nlo}, {nhi}]"
        )));
    }
    for _ in 0..80 {
        let mid = (lo * hi).sqrt();
        if nu_at(mid)? < nu_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (elo, ehi) = ((nu_at(lo)? - nu_target).abs(), (nu_at(hi)? - nu_target).abs());
    Ok(if elo <= ehi { lo } else { hi })
}

/// `cf` placing the power-law sequence at window location `lambda`, i.e. ν_n ≈ 1 + lambda/c_n.
pub fn tune_cf_to_window(tau: f64, n: usize, lambda: f64) -> Result<f64> {
    let scal = scaling_constants(tau, n, None)?;
    if scal.regime != TailRegime::Tau34 {
        return Err(invalid("window tuning needs tau in (3,4)"));
    }
    tune_cf_for_nu(tau, n, 0.0, 1.0 + lambda / scal.c_n)
}

/// Order statistics of `n` i.i.d. draws with `P(D >= k) = min(1, cf * k^-(tau-1))` for k >= 2,
/// generated through the exponential-spacings representation of uniform order statistics.
pub fn sample_iid_degrees<R: Rng + ?Sized>(
    tau: f64,
    cf: f64,
    n: usize,
    rng: &mut R,
) -> Result<DegreeSequence> {
    if !(tau > 2.0 && tau < 4.0) || tau == 3.0 {
        return Err(invalid("tau must lie in (2,4) minus {3}"));
    }
    if n == 0 || !(cf > 0.0) {
        return Err(invalid("need n >= 1 and cf > 0"));
    }
    let alpha = 1.0 / (tau - 1.0);
    let mut gamma = Vec::with_capacity(n);
    let mut acc = 0.0;
    for _ in 0..n {
        let e: f64 = Exp1.sample(rng);
        acc += e;
        gamma.push(acc);
    }
    let e: f64 = Exp1.sample(rng);
    let total = acc + e;
    let d = gamma
        .iter()
        .map(|g| {
            let u = g / total;
            let x = (cf / u).powf(alpha);
            (x.min(u32::MAX as f64 / 2.0).floor() as u32).max(1)
        })
        .collect();
    Ok(DegreeSequence::with_parity_fix(d))
}

/// Moments and criticality parameter of a degree sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalityReport {
    pub nu_n: f64,
    pub mu_hat: f64,
    pub sigma2_hat: f64,
    pub sigma3_hat: f64,
    /// `sigma3 * mu - sigma2^2`, the variance parameter of the parabolic-drift limit.
    pub eta_param: f64,
    pub lambda_hat: f64,
    pub theta_hat: Vec<f64>,
    /// Entry `k-1` is `a_n^-3 * sum_{i>k} d_(i)^3` for k = 1..=K.
    pub third_moment_tail: Vec<f64>,
}

fn descending(d: &DegreeSequence) -> Vec<u32> {
    let mut v = d.degrees().to_vec();
    if !d.is_sorted() {
        v.sort_unstable_by(|a, b| b.cmp(a));
    }
    v
}

pub fn criticality(d: &DegreeSequence, scal: &ScalingConstants, k: usize) -> Result<CriticalityReport> {
    if d.n() == 0 || d.total() == 0 {
        return Err(invalid("criticality needs a non-empty sequence with positive total"));
    }
    let n = d.n() as f64;
    let (mut s2, mut s3) = (0u128, 0u128);
    for &x in d.degrees() {
        let x = x as u128;
        s2 += x * x;
        s3 += x * x * x;
    }
    let nu_n = d.nu();
    let mu_hat = d.total() as f64 / n;
    let sigma2_hat = s2 as f64 / n;
    let sigma3_hat = s3 as f64 / n;
    let sorted = descending(d);
    let theta_hat = sorted.iter().take(k).map(|&x| x as f64 / scal.a_n).collect();
    let a3 = scal.a_n.powi(3);
    let mut tail: f64 = sorted.iter().map(|&x| (x as f64).powi(3)).sum();
    let mut third_moment_tail = Vec::with_capacity(k);
    for &x in sorted.iter().take(k) {
        tail -= (x as f64).powi(3);
        third_moment_tail.push(tail.max(0.0) / a3);
    }
    Ok(CriticalityReport {
        nu_n,
        mu_hat,
        sigma2_hat,
        sigma3_hat,
        eta_param: sigma3_hat * mu_hat - sigma2_hat * sigma2_hat,
        lambda_hat: scal.c_n * (nu_n - 1.0),
        theta_hat,
        third_moment_tail,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentDiagnostics {
    pub mean: f64,
    pub second_moment: f64,
    /// `(K, tail)` with tail `a_n^-3 sum_{i>K} d^3` (tau in (3,4)) or `n^(-2 alpha) sum_{i>K} d^2`.
    pub tails: Vec<(usize, f64)>,
    pub monotone_decay: bool,
}

pub fn moment_diagnostics(d: &DegreeSequence, scal: &ScalingConstants, ks: &[usize]) -> MomentDiagnostics {
    let n = d.n() as f64;
    let sorted = descending(d);
    let mean = d.total() as f64 / n;
    let second_moment = sorted.iter().map(|&x| (x as f64).powi(2)).sum::<f64>() / n;
    let (power, norm) = match scal.regime {
        TailRegime::Tau23 => (2, n.powf(2.0 * scal.alpha)),
        _ => (3, scal.a_n.powi(3)),
    };
    // Suffix sums so each K costs O(1).
    let mut suffix = vec![0.0; sorted.len() + 1];
    for i in (0..sorted.len()).rev() {
        suffix[i] = suffix[i + 1] + (sorted[i] as f64).powi(power);
    }
    let tails: Vec<(usize, f64)> = ks
        .iter()
        .map(|&k| (k, suffix[k.min(sorted.len())] / norm))
        .collect();
    let mut by_k = tails.clone();
    by_k.sort_by_key(|t| t.0);
    let monotone_decay = by_k.windows(2).all(|w| w[1].1 <= w[0].1);
    MomentDiagnostics { mean, second_moment, tails, monotone_decay }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::rng_from_seed;
    use proptest::prelude::*;

    #[test]
    fn scaling_examples() {
        let s = scaling_constants(3.5, 100_000, None).unwrap();
        assert!((s.alpha - 0.4).abs() < 1e-15 && (s.rho - 0.6).abs() < 1e-15 && (s.eta - 0.2).abs() < 1e-15);
        let s = scaling_constants(2.5, 100_000, None).unwrap();
        assert!((s.alpha - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.rho - 1.0 / 3.0).abs() < 1e-15 && (s.eta - 1.0 / 3.0).abs() < 1e-15);
        let s = scaling_constants(3.5, 1_000_000, None).unwrap();
        assert!((s.a_n / 10f64.powf(2.4) - 1.0).abs() < 1e-12);
        assert!((s.b_n / 10f64.powf(3.6) - 1.0).abs() < 1e-12);
        assert!((s.c_n / 10f64.powf(1.2) - 1.0).abs() < 1e-12);
        assert!(scaling_constants(3.0, 10, None).is_err());
        assert!(scaling_constants(4.5, 10, None).is_err());
        assert!(scaling_constants(1.5, 10, None).is_err());
        let g = ScalingConstants::finite_third_moment(1000);
        assert!((g.b_n - 100.0).abs() < 1e-9);
    }

    #[test]
    fn exponent_identities_on_grid() {
        for k in 1..100 {
            let tau = 2.0 + 2.0 * k as f64 / 100.0;
            if (tau - 3.0).abs() < 1e-12 {
                continue;
            }
            let s = scaling_constants(tau, 1000, None).unwrap();
            assert!((s.alpha - 1.0 / (tau - 1.0)).abs() < 1e-14);
            assert!((s.rho - s.alpha * (tau - 2.0)).abs() < 1e-14);
            assert!((s.eta - s.alpha * (tau - 3.0).abs()).abs() < 1e-14);
        }
    }

    #[test]
    fn slowly_varying_hook() {
        let l = |x: f64| x.ln();
        let s = scaling_constants(3.5, 1000, Some(&l)).unwrap();
        let lv = 1000f64.ln();
        assert!((s.a_n - 1000f64.powf(0.4) * lv).abs() < 1e-9);
        assert!((s.c_n - 1000f64.powf(0.2) / (lv * lv)).abs() < 1e-12);
    }

    #[test]
    fn power_law_small_case() {
        // u^(-2/3) at u = i/8: 4, 2.52, 1.92, 1.59, ... -> floors 4,2,1,1,1,1,1,1 (even total).
        let d = build_power_law_degrees(2.5, 8, 1.0, 0.0).unwrap();
        assert_eq!(d.degrees(), &[4, 2, 1, 1, 1, 1, 1, 1]);
        let d = build_power_law_degrees(3.5, 10_000, 1.0, 0.0).unwrap();
        assert!(d.degrees()[0] == 39 || d.degrees()[0] == 40);
        assert_eq!(d.degrees()[1], 30);
        assert!(d.is_sorted());
        assert_eq!(d.total() % 2, 0);
    }

    #[test]
    fn power_law_lambda_shift_touches_few_entries() {
        let n = 100_000;
        let a = build_power_law_degrees(3.5, n, 1.0, 0.0).unwrap();
        let b = build_power_law_degrees(3.5, n, 1.0, 1.0).unwrap();
        let changed = a.degrees().iter().zip(b.degrees()).filter(|(x, y)| x != y).count();
        let scal = scaling_constants(3.5, n, None).unwrap();
        // Entries change only where (n/i)^alpha is within a factor 1/c_n of an integer boundary.
        assert!((changed as f64) < 5.0 * n as f64 / scal.c_n, "changed {changed}");
    }

    #[test]
    fn criticality_examples() {
        let scal = ScalingConstants::finite_third_moment(4);
        let r = criticality(&DegreeSequence::new(vec![3, 1, 1, 1]).unwrap(), &scal, 2).unwrap();
        assert_eq!(r.nu_n, 1.0);
        let r = criticality(&DegreeSequence::new(vec![2, 2, 2]).unwrap(), &scal, 2).unwrap();
        assert_eq!(r.nu_n, 1.0);
        let d = DegreeSequence::from_counts(&[(1, 7500), (3, 2500)]).unwrap();
        let scal = ScalingConstants::finite_third_moment(10_000);
        let r = criticality(&d, &scal, 3).unwrap();
        assert_eq!(r.nu_n, 1.0);
        assert!((r.mu_hat - 1.5).abs() < 1e-12);
        assert!((r.sigma2_hat - 3.0).abs() < 1e-12);
        assert!((r.sigma3_hat - 7.5).abs() < 1e-12);
        assert!((r.eta_param - 2.25).abs() < 1e-12);
        assert_eq!(r.lambda_hat, 0.0);
        assert!(criticality(&DegreeSequence::new(vec![]).unwrap(), &scal, 1).is_err());
    }

    #[test]
    fn odd_totals() {
        assert!(matches!(DegreeSequence::new(vec![2, 1]), Err(Error::OddTotalDegree(3))));
        assert_eq!(DegreeSequence::with_parity_fix(vec![2, 1]).degrees(), &[3, 1]);
    }

    #[test]
    fn lambda_zero_window_offset_is_bounded() {
        let mut offs = vec![];
        for n in [1_000, 10_000, 100_000] {
            let scal = scaling_constants(3.5, n, None).unwrap();
            let d = build_power_law_degrees(3.5, n, 1.0, 0.0).unwrap();
            // nu at n = infinity for the cf = 1 family: sum_{k>=2} (2k-2) k^-2.5 / (1 + sum_{k>=2} k^-2.5).
            let (mut num, mut den) = (0.0, 1.0);
            for k in 2..2_000_000u64 {
                let t = (k as f64).powf(-2.5);
                num += (2 * k - 2) as f64 * t;
                den += t;
            }
            let nu_inf = num / den;
            offs.push((scal.c_n * (d.nu() - nu_inf)).abs());
        }
        assert!(offs.iter().all(|&o| o < 5.0), "offsets {offs:?}");
    }

    #[test]
    fn window_tuning_hits_target() {
        let n = 100_000;
        let cf = tune_cf_to_window(3.5, n, 0.0).unwrap();
        let d = build_power_law_degrees(3.5, n, cf, 0.0).unwrap();
        let scal = scaling_constants(3.5, n, None).unwrap();
        let r = criticality(&d, &scal, 5).unwrap();
        assert!(r.lambda_hat.abs() < 0.05, "lambda_hat {}", r.lambda_hat);
    }

    #[test]
    fn iid_degrees() {
        let mut rng = rng_from_seed(11);
        let d = sample_iid_degrees(3.5, 1.0, 1, &mut rng).unwrap();
        assert!(d.degrees()[0] >= 1);

        // E[D] = 1 + sum_{k>=2} k^-2.5 for cf = 1.
        let mean_oracle = 1.0 + (2..10_000_000u64).map(|k| (k as f64).powf(-2.5)).sum::<f64>();
        let n = 10_000;
        let d = sample_iid_degrees(3.5, 1.0, n, &mut rng).unwrap();
        assert!(d.is_sorted());
        let xs: Vec<f64> = d.degrees().iter().map(|&x| x as f64).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        // The parity dummy shifts the mean by at most 1/n.
        assert!((m - mean_oracle).abs() < 3.0 * se + 1.0 / n as f64, "mean {m} vs {mean_oracle}");

        let scal = scaling_constants(3.5, n, None).unwrap();
        let tops: Vec<f64> = (0..200)
            .map(|_| sample_iid_degrees(3.5, 1.0, n, &mut rng).unwrap().degrees()[0] as f64 / scal.a_n)
            .collect();
        let tm = tops.iter().sum::<f64>() / tops.len() as f64;
        let tsd = (tops.iter().map(|x| (x - tm).powi(2)).sum::<f64>() / (tops.len() as f64 - 1.0)).sqrt();
        assert!(tsd / tm > 0.1);
    }

    #[test]
    fn moment_tails() {
        let d = DegreeSequence::new(vec![2; 10]).unwrap();
        let scal = scaling_constants(3.5, 10, None).unwrap();
        let m = moment_diagnostics(&d, &scal, &[0, 3, 9]);
        for (k, t) in m.tails {
            assert!((t - (10 - k) as f64 * 8.0 / scal.a_n.powi(3)).abs() < 1e-12);
        }
        let n = 100_000;
        let scal = scaling_constants(3.5, n, None).unwrap();
        let d = build_power_law_degrees(3.5, n, 1.0, 0.0).unwrap();
        let m = moment_diagnostics(&d, &scal, &[1, 10, 100]);
        assert!(m.monotone_decay);
        // Flooring only lowers degrees, so the unfloored sum of i^-gamma (gamma = 3 alpha) bounds the tail.
        let tail_bound = |k: f64, g: f64| k.powf(1.0 - g) / (g - 1.0);
        assert!(m.tails[2].1 < tail_bound(100.0, 1.2), "{:?}", m.tails);
        assert!(m.tails[2].1 > 0.3 * tail_bound(100.0, 1.2), "{:?}", m.tails);
        let scal = scaling_constants(2.5, n, None).unwrap();
        let d = build_power_law_degrees(2.5, n, 1.0, 0.0).unwrap();
        let m = moment_diagnostics(&d, &scal, &[100]);
        assert!(m.tails[0].1 < tail_bound(100.0, 4.0 / 3.0), "{:?}", m.tails);
        assert!(m.tails[0].1 > 0.3 * tail_bound(100.0, 4.0 / 3.0), "{:?}", m.tails);
    }

    proptest! {
        #[test]
        fn nu_matches_exact_rational(ds in proptest::collection::vec(0u32..5000, 1..200)) {
            let d = DegreeSequence::with_parity_fix(ds);
            let (num, den) = d.nu_fraction();
            let num_direct: u128 = d.degrees().iter().map(|&x| x as u128 * (x as u128).saturating_sub(1)).sum();
            prop_assert_eq!(num, num_direct);
            prop_assert_eq!(den, d.total() as u128);
            if den > 0 {
                let exact = num as f64 / den as f64;
                prop_assert!((d.nu() - exact).abs() <= 1e-12 * exact.max(1.0));
            }
            prop_assert_eq!(d.total() % 2, 0);
        }

        #[test]
        fn power_law_is_non_increasing(tau in 2.05f64..3.95, n in 1usize..3000, cf in 0.1f64..5.0) {
            prop_assume!((tau - 3.0).abs() > 1e-3);
            let d = build_power_law_degrees(tau, n, cf, 0.0).unwrap();
            prop_assert!(d.is_sorted());
            prop_assert_eq!(d.total() % 2, 0);
            prop_assert!(d.degrees().iter().all(|&x| x >= 1));
        }
    }
}
