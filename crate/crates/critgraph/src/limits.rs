//! Limit processes of rescaled exploration walks: Brownian motion with parabolic drift,
//! thinned Lévy processes and the hub-jump process, with reflection, excursion
//! extraction and Poisson surplus marks.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::components::{order_u0, UVector};
use crate::error::{invalid, Result};
use crate::seeds::{par_map, replicate_rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaClass {
    /// Cube-summable but not square-summable; the thinned Lévy regime.
    L3NotL2,
    /// Square-summable but not summable; the hub-jump regime.
    L2NotL1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaSequence {
    theta: Vec<f64>,
    mu: f64,
    class: ThetaClass,
}

impl ThetaSequence {
    pub fn new(theta: Vec<f64>, mu: f64, class: ThetaClass) -> Result<Self> {
        if theta.is_empty() {
            return Err(invalid("theta must be non-empty"));
        }
        if theta.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(invalid("theta entries must be positive and finite"));
        }
        if theta.windows(2).any(|w| w[1] > w[0]) {
            return Err(invalid("theta must be non-increasing"));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(invalid("mu must be positive"));
        }
        Ok(Self { theta, mu, class })
    }

    /// `theta_i = c * i^(-alpha)` for `i = 1..=k`.
    pub fn power_law(c: f64, alpha: f64, k: usize, mu: f64, class: ThetaClass) -> Result<Self> {
        Self::new((1..=k).map(|i| c * (i as f64).powf(-alpha)).collect(), mu, class)
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn class(&self) -> ThetaClass {
        self.class
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn sum_sq(&self) -> f64 {
        self.theta.iter().map(|t| t * t).sum()
    }
}

/// Variance rate of the neglected small jumps `sum_{i>k} (c i^-alpha)^3 / mu`,
/// with the sum approximated by the midpoint integral.
pub fn power_law_tail_rate(c: f64, alpha: f64, k: usize, mu: f64) -> Result<f64> {
    let g = 3.0 * alpha;
    if g <= 1.0 {
        return Err(invalid("cubic tail sum diverges for alpha <= 1/3"));
    }
    Ok(c.powi(3) * (k as f64 + 0.5).powf(1.0 - g) / (g - 1.0) / mu)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    Truncate,
    /// Adds an independent Brownian motion with this variance per unit time.
    Brownian { rate: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitPath {
    pub dt: f64,
    /// Value at `k * dt` for `k = 0..=steps`.
    pub values: Vec<f64>,
    /// Exponential clocks, one per theta entry (empty for Brownian paths).
    pub clocks: Vec<f64>,
    pub tail_mode: TailMode,
}

impl LimitPath {
    pub fn steps(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn horizon(&self) -> f64 {
        self.steps() as f64 * self.dt
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }
}

fn grid_steps(t_max: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid("dt must be positive"));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(invalid("T must be positive"));
    }
    let steps = (t_max / dt).round();
    if steps < 1.0 || steps > 1e9 {
        return Err(invalid("grid must have between 1 and 1e9 steps"));
    }
    Ok(steps as usize)
}

/// `(sqrt(eta)/mu) W(t) + lambda t - eta t^2 / (2 mu^3)` on a uniform grid.
pub fn simulate_bm_parabolic<R: Rng + ?Sized>(mu: f64, eta: f64, lambda: f64, t_max: f64, dt: f64, rng: &mut R) -> Result<LimitPath> {
    if !(mu > 0.0 && eta > 0.0) {
        return Err(invalid("mu and eta must be positive"));
    }
    let steps = grid_steps(t_max, dt)?;
    let sd = (eta * dt).sqrt() / mu;
    let curv = eta / (2.0 * mu.powi(3));
    let mut values = Vec::with_capacity(steps + 1);
    values.push(0.0);
    let mut w = 0.0;
    for k in 1..=steps {
        let z: f64 = StandardNormal.sample(rng);
        w += sd * z;
        let t = k as f64 * dt;
        values.push(w + lambda * t - curv * t * t);
    }
    Ok(LimitPath { dt, values, clocks: Vec::new(), tail_mode: TailMode::Truncate })
}

/// Exact exponential clocks with rates `theta_i / mu`.
fn clocks<R: Rng + ?Sized>(theta: &ThetaSequence, rng: &mut R) -> Vec<f64> {
    theta
        .theta
        .iter()
        .map(|&t| {
            let e: f64 = Exp1.sample(rng);
            e * theta.mu / t
        })
        .collect()
}

/// Cumulative jump mass `sum_i size_i 1{clock_i <= k dt}` on the grid.
fn jump_profile(clocks: &[f64], sizes: impl Iterator<Item = f64>, steps: usize, dt: f64) -> Vec<f64> {
    let mut inc = vec![0.0; steps + 1];
    for (&c, s) in clocks.iter().zip(sizes) {
        let k = (c / dt).ceil();
        if k <= steps as f64 {
            inc[k.max(0.0) as usize] += s;
        }
    }
    let mut acc = 0.0;
    for v in &mut inc {
        acc += *v;
        *v = acc;
    }
    inc
}

/// `sum_i theta_i (1{xi_i <= t} - theta_i t / mu) + lambda t`, optionally plus a Brownian tail.
pub fn simulate_thinned_levy<R: Rng + ?Sized>(
    theta: &ThetaSequence,
    lambda: f64,
    t_max: f64,
    dt: f64,
    tail: TailMode,
    rng: &mut R,
) -> Result<LimitPath> {
    if theta.class != ThetaClass::L3NotL2 {
        return Err(invalid("thinned Levy paths need an l3-not-l2 theta sequence"));
    }
    if let TailMode::Brownian { rate } = tail {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(invalid("tail variance rate must be non-negative"));
        }
    }
    let steps = grid_steps(t_max, dt)?;
    let xi = clocks(theta, rng);
    let mut values = jump_profile(&xi, theta.theta.iter().copied(), steps, dt);
    let slope = lambda - theta.sum_sq() / theta.mu;
    let mut b = 0.0;
    let sd = match tail {
        TailMode::Brownian { rate } => (rate * dt).sqrt(),
        TailMode::Truncate => 0.0,
    };
    for (k, v) in values.iter_mut().enumerate() {
        if k > 0 && sd > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            b += sd * z;
        }
        *v += slope * k as f64 * dt + b;
    }
    Ok(LimitPath { dt, values, clocks: xi, tail_mode: tail })
}

/// `lambda sum_i theta_i 1{xi_i <= t} - 2 t`.
pub fn simulate_isj<R: Rng + ?Sized>(theta: &ThetaSequence, lambda: f64, t_max: f64, dt: f64, rng: &mut R) -> Result<LimitPath> {
    if theta.class != ThetaClass::L2NotL1 {
        return Err(invalid("hub-jump paths need an l2-not-l1 theta sequence"));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(invalid("lambda must be positive"));
    }
    let steps = grid_steps(t_max, dt)?;
    let xi = clocks(theta, rng);
    let mut values = jump_profile(&xi, theta.theta.iter().map(|t| lambda * t), steps, dt);
    for (k, v) in values.iter_mut().enumerate() {
        *v -= 2.0 * k as f64 * dt;
    }
    Ok(LimitPath { dt, values, clocks: xi, tail_mode: TailMode::Truncate })
}

/// `S(t) - min_{u <= t} S(u)`, where the minimum includes the starting value 0.
pub fn reflect(path: &LimitPath) -> LimitPath {
    let mut m = 0.0f64;
    let values = path
        .values
        .iter()
        .map(|&v| {
            m = m.min(v);
            v - m
        })
        .collect();
    LimitPath { dt: path.dt, values, clocks: path.clocks.clone(), tail_mode: path.tail_mode }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Excursion {
    pub start: f64,
    pub end: f64,
    pub length: f64,
    /// Left Riemann sum of the reflected path over `[start, end)`.
    pub area: f64,
    /// True when the path ends before the excursion returns to zero.
    pub censored: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedExcursions {
    pub excursions: Vec<Excursion>,
    /// One count per excursion; empty until marks are drawn.
    pub marks: Vec<u64>,
    pub ordered: bool,
}

impl MarkedExcursions {
    /// Sorts by length (descending), keeping time order among ties.
    pub fn into_ordered(mut self) -> Self {
        let mut idx: Vec<usize> = (0..self.excursions.len()).collect();
        idx.sort_by(|&a, &b| self.excursions[b].length.total_cmp(&self.excursions[a].length).then(a.cmp(&b)));
        let ex = idx.iter().map(|&i| self.excursions[i]).collect();
        if !self.marks.is_empty() {
            self.marks = idx.iter().map(|&i| self.marks[i]).collect();
        }
        self.excursions = ex;
        self.ordered = true;
        self
    }

    pub fn longest(&self) -> Option<&Excursion> {
        self.excursions.iter().max_by(|a, b| a.length.total_cmp(&b.length).then(b.start.total_cmp(&a.start)))
    }

    /// `(length, marks)` pairs in ordered form, truncated to the `k` longest.
    pub fn to_uvector(&self, k: usize) -> UVector {
        let o = self.clone().into_ordered();
        let pairs: Vec<(f64, u64)> =
            o.excursions.iter().enumerate().take(k).map(|(i, e)| (e.length, o.marks.get(i).copied().unwrap_or(0))).collect();
        order_u0(&pairs).expect("excursion lengths are positive")
    }
}

/// Scans a non-negative reflected path: an excursion starts at the last zero before the path
/// turns positive and ends at the first grid time where it returns to zero.
fn scan_reflected(values: &[f64], dt: f64) -> Vec<Excursion> {
    let mut out = Vec::new();
    let mut open: Option<(usize, f64)> = None;
    for k in 1..values.len() {
        let prev = values[k - 1];
        match open.as_mut() {
            None if values[k] > 0.0 => open = Some((k - 1, 0.0)),
            Some((_, area)) => *area += prev * dt,
            None => {}
        }
        if values[k] <= 0.0 {
            if let Some((l, area)) = open.take() {
                out.push(Excursion { start: l as f64 * dt, end: k as f64 * dt, length: (k - l) as f64 * dt, area, censored: false });
            }
        }
    }
    if let Some((l, area)) = open {
        let last = values.len() - 1;
        out.push(Excursion { start: l as f64 * dt, end: last as f64 * dt, length: (last - l) as f64 * dt, area, censored: true });
    }
    out
}

/// Excursions above the running minimum, in time order.
pub fn excursions(path: &LimitPath) -> MarkedExcursions {
    let r = reflect(path);
    MarkedExcursions { excursions: scan_reflected(&r.values, r.dt), marks: Vec::new(), ordered: false }
}

/// The same excursions computed in one pass over the raw values, tracking the running minimum.
pub fn excursions_from_running_min(values: &[f64], dt: f64) -> Vec<Excursion> {
    let mut out = Vec::new();
    let mut m = 0.0f64;
    let mut open: Option<(usize, f64)> = None;
    let mut prev_refl = 0.0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        m = m.min(v);
        let refl = v - m;
        if let Some((_, area)) = open.as_mut() {
            *area += prev_refl * dt;
        } else if refl > 0.0 {
            open = Some((k - 1, 0.0));
        }
        if refl <= 0.0 {
            if let Some((l, area)) = open.take() {
                out.push(Excursion { start: l as f64 * dt, end: k as f64 * dt, length: (k - l) as f64 * dt, area, censored: false });
            }
        }
        prev_refl = refl;
    }
    if let Some((l, area)) = open {
        let last = values.len() - 1;
        out.push(Excursion { start: l as f64 * dt, end: last as f64 * dt, length: (last - l) as f64 * dt, area, censored: true });
    }
    out
}

/// Intensity of surplus marks per unit of reflected area.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkRate {
    /// `beta = 1 / mu` for the parabolic-drift regime.
    BetaOverMu { mu: f64 },
    /// `sum theta_i^2 / mu^2`.
    ThetaRatio { value: f64 },
    Fixed { rate: f64 },
}

impl MarkRate {
    pub fn theta_ratio(theta: &ThetaSequence) -> Self {
        MarkRate::ThetaRatio { value: theta.sum_sq() / (theta.mu * theta.mu) }
    }

    pub fn rate(&self) -> f64 {
        match *self {
            MarkRate::BetaOverMu { mu } => 1.0 / mu,
            MarkRate::ThetaRatio { value } => value,
            MarkRate::Fixed { rate } => rate,
        }
    }
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

/// Draws a Poisson(rate * area) mark count for every excursion. Summing per-step
/// Poisson(rate * refl * dt) counts over an excursion gives the same law.
pub fn marks<R: Rng + ?Sized>(ex: &MarkedExcursions, rate: MarkRate, rng: &mut R) -> MarkedExcursions {
    let r = rate.rate();
    let m = ex.excursions.iter().map(|e| poisson(r * e.area, rng)).collect();
    MarkedExcursions { excursions: ex.excursions.clone(), marks: m, ordered: ex.ordered }
}

/// A limit process and its grid, used to sample excursion laws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "snake_case")]
pub enum LimitProcess {
    Parabolic { mu: f64, eta: f64, lambda: f64 },
    ThinnedLevy { theta: ThetaSequence, lambda: f64, tail: TailMode },
    Isj { theta: ThetaSequence, lambda: f64 },
}

impl LimitProcess {
    pub fn simulate<R: Rng + ?Sized>(&self, t_max: f64, dt: f64, rng: &mut R) -> Result<LimitPath> {
        match self {
            LimitProcess::Parabolic { mu, eta, lambda } => simulate_bm_parabolic(*mu, *eta, *lambda, t_max, dt, rng),
            LimitProcess::ThinnedLevy { theta, lambda, tail } => simulate_thinned_levy(theta, *lambda, t_max, dt, *tail, rng),
            LimitProcess::Isj { theta, lambda } => simulate_isj(theta, *lambda, t_max, dt, rng),
        }
    }

    /// The regime's natural mark intensity.
    pub fn default_mark_rate(&self) -> MarkRate {
        match self {
            LimitProcess::Parabolic { mu, .. } => MarkRate::BetaOverMu { mu: *mu },
            LimitProcess::ThinnedLevy { theta, .. } | LimitProcess::Isj { theta, .. } => MarkRate::theta_ratio(theta),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcursionLaw {
    pub draws: Vec<UVector>,
    /// Fraction of paths whose longest excursion was still open at the horizon.
    pub censored_fraction: f64,
    pub warning: Option<String>,
}

impl ExcursionLaw {
    pub fn longest_lengths(&self) -> Vec<f64> {
        self.draws.iter().map(|u| u.pairs().first().map_or(0.0, |p| p.0)).collect()
    }

    pub fn longest_marks(&self) -> Vec<u64> {
        self.draws.iter().map(|u| u.pairs().first().map_or(0, |p| p.1)).collect()
    }
}

/// Censoring level above which the horizon is reported as too short.
pub const CENSOR_TOLERANCE: f64 = 0.01;

/// Independent draws of the ordered (length, marks) vector, truncated to the `k` longest
/// excursions. Path `i` uses the keyed stream `(master, i)` so results do not depend on
/// thread count.
pub fn excursion_law_sample(
    process: &LimitProcess,
    rate: MarkRate,
    k: usize,
    t_max: f64,
    dt: f64,
    n_paths: usize,
    master: u64,
) -> Result<ExcursionLaw> {
    if k == 0 || n_paths == 0 {
        return Err(invalid("k and n_paths must be positive"));
    }
    grid_steps(t_max, dt)?;
    let results: Vec<Result<(UVector, bool)>> = par_map(n_paths, |i| {
        let mut rng = replicate_rng(master, i as u64);
        let path = process.simulate(t_max, dt, &mut rng)?;
        let ex = MarkedExcursions { excursions: excursions_from_running_min(&path.values, dt), marks: Vec::new(), ordered: false };
        let censored = ex.longest().is_some_and(|e| e.censored);
        let marked = marks(&ex, rate, &mut rng);
        Ok((marked.to_uvector(k), censored))
    });
    let mut draws = Vec::with_capacity(n_paths);
    let mut censored = 0usize;
    for r in results {
        let (u, c) = r?;
        censored += c as usize;
        draws.push(u);
    }
    let censored_fraction = censored as f64 / n_paths as f64;
    let warning = (censored_fraction > CENSOR_TOLERANCE).then(|| {
        format!("T={t_max} too small: longest excursion censored in {:.1}% of paths", 100.0 * censored_fraction)
    });
    Ok(ExcursionLaw { draws, censored_fraction, warning })
}
