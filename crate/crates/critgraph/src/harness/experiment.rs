//! Reproducible replicate runner: spec in, per-replicate records plus summaries out.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::components::{decompose_with, susceptibilities, DecomposeOptions, DiameterPolicy, SusceptibilityReport};
use crate::degrees::{
    build_power_law_degrees, hub_weights, sample_iid_degrees, scaling_constants, tune_cf_to_window, DegreeSequence,
    ScalingConstants, WeightSequence,
};
use crate::error::{invalid, Error, Result};
use crate::exploration::explore_dfs;
use crate::graph::{config_model, erased_config_model, inhomogeneous_graph_thinned, uniform_simple, Kernel};
use crate::harness::stats::{summarize, Summary};
use crate::limits::{excursion_law_sample, ExcursionLaw, LimitProcess, MarkRate};
use crate::percolation::{
    bond_percolate, critical_p, erase_then_percolate, fountoulakis_percolate, janson_percolate, percolate_then_erase,
    AnyGraph, JansonCleanup, PercolationSpec, Regime,
};
use crate::seeds::{par_map, replicate_rng, replicate_seed};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegreeSpec {
    /// `d_i = floor((cf n / i)^(1/(tau-1)) (1 + lambda/c_n))`. Without `cf`, `cf` is tuned so that
    /// ν_n sits at window location `lambda` (tau in (3,4) only) and no inflation is applied.
    PowerLaw {
        tau: f64,
        #[serde(default)]
        cf: Option<f64>,
        #[serde(default)]
        lambda: f64,
    },
    /// `(degree, fraction)` blocks; counts are rounded and the last block absorbs the remainder.
    Mixture { blocks: Vec<(u32, f64)> },
    /// Order statistics of i.i.d. power-law degrees, resampled per replicate.
    Iid { tau: f64, cf: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    Cm { degrees: DegreeSpec },
    Ecm { degrees: DegreeSpec },
    UniformSimple {
        degrees: DegreeSpec,
        #[serde(default = "default_max_tries")]
        max_tries: usize,
    },
    /// Rank-one graph on hub weights `w_i = cf (n/i)^(1/(tau-1))`.
    Rank1 { tau: f64, cf: f64, kernel: Kernel },
}

fn default_max_tries() -> usize {
    10_000
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PercolationMethod {
    Direct,
    Janson,
    Fountoulakis,
    EraseThenPercolate,
    ExperimentalPercolateThenErase,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PRule {
    /// Regime window formula.
    Window { regime: Regime, lambda: f64 },
    Fixed { p: f64 },
    /// `p = (1 - lambda0 n^-delta) / ν_n`.
    BarelySubcritical { lambda0: f64, delta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercolationConfig {
    #[serde(flatten)]
    pub rule: PRule,
    pub method: PercolationMethod,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcursionLawSpec {
    pub process: LimitProcess,
    /// Defaults to the process's natural intensity.
    #[serde(default)]
    pub mark_rate: Option<MarkRate>,
    pub k: usize,
    pub t_max: f64,
    pub dt: f64,
    pub paths: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    /// Number of largest components whose size and surplus are recorded.
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    #[serde(default)]
    pub diameter: bool,
    #[serde(default)]
    pub susceptibilities: bool,
    /// Keep the exploration walk of replicate 0 at each n (unpercolated CM only).
    #[serde(default)]
    pub walks: bool,
    #[serde(default)]
    pub excursion_law: Option<ExcursionLawSpec>,
}

fn default_top_k() -> usize {
    5
}

impl Default for Outputs {
    fn default() -> Self {
        Self { top_k: default_top_k(), diameter: false, susceptibilities: false, walks: false, excursion_law: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: String,
    #[serde(flatten)]
    pub model: ModelSpec,
    #[serde(default)]
    pub percolation: Option<PercolationConfig>,
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ExperimentSpec {
    /// Reads JSON or TOML, chosen by file extension (`.json` is JSON, anything else TOML).
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// SHA-256 of the canonical JSON encoding, hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serializes");
        hex(&Sha256::digest(json))
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(invalid("replicates must be at least 1"));
        }
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return Err(invalid("n grid must be non-empty with positive entries"));
        }
        if self.outputs.top_k == 0 {
            return Err(invalid("top_k must be positive"));
        }
        if self.n_grid.len() > u32::MAX as usize || self.replicates > u32::MAX as usize {
            return Err(invalid("grid or replicate count too large for replicate indexing"));
        }
        if let Some(pc) = &self.percolation {
            use PercolationMethod::*;
            let ok = match (&self.model, pc.method) {
                (ModelSpec::Cm { .. }, Direct | Janson | Fountoulakis | EraseThenPercolate | ExperimentalPercolateThenErase) => true,
                (ModelSpec::Ecm { .. }, Direct | EraseThenPercolate) => true,
                (ModelSpec::UniformSimple { .. } | ModelSpec::Rank1 { .. }, Direct) => true,
                _ => false,
            };
            if !ok {
                return Err(invalid(format!("percolation method {:?} does not apply to this model", pc.method)));
            }
        }
        if self.outputs.walks && !(matches!(self.model, ModelSpec::Cm { .. }) && self.percolation.is_none()) {
            return Err(invalid("walks are recorded for the unpercolated configuration model only"));
        }
        Ok(())
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Replicate index used for seeding: grid position in the high 32 bits, replicate in the low 32.
pub fn replicate_index(n_idx: usize, r: usize) -> u64 {
    ((n_idx as u64) << 32) | r as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub n: usize,
    pub replicate: usize,
    /// Hex of the 128-bit stream identifier.
    pub seed: String,
    pub p: Option<f64>,
    pub p_clamped: bool,
    pub vertices: usize,
    pub edges: usize,
    pub components: usize,
    /// Sizes and surpluses of the `top_k` largest components (shorter if fewer exist).
    pub sizes: Vec<usize>,
    pub surplus: Vec<usize>,
    pub c1_edges: usize,
    pub c1_diameter: Option<usize>,
    pub c1_diameter_exact: Option<bool>,
    pub susceptibility: Option<SusceptibilityReport>,
    pub error: Option<String>,
}

impl ReplicateRecord {
    pub fn c1_size(&self) -> Option<usize> {
        if self.error.is_some() {
            return None;
        }
        Some(self.sizes.first().copied().unwrap_or(0))
    }
}

/// The realized model at one `n` before randomness: degrees or weights plus scaling data.
#[derive(Clone, Debug)]
pub enum Prepared {
    Degrees { d: Option<DegreeSequence>, scal: ScalingConstants, nu: Option<f64> },
    Weights { w: WeightSequence, scal: ScalingConstants, nu: f64 },
}

fn degree_scaling(spec: &DegreeSpec, n: usize) -> Result<ScalingConstants> {
    match spec {
        DegreeSpec::PowerLaw { tau, .. } | DegreeSpec::Iid { tau, .. } if *tau < 4.0 => scaling_constants(*tau, n, None),
        _ => Ok(ScalingConstants::finite_third_moment(n)),
    }
}

fn build_degrees(spec: &DegreeSpec, n: usize) -> Result<Option<DegreeSequence>> {
    Ok(match spec {
        DegreeSpec::PowerLaw { tau, cf, lambda } => Some(match cf {
            Some(cf) => build_power_law_degrees(*tau, n, *cf, *lambda)?,
            None => build_power_law_degrees(*tau, n, tune_cf_to_window(*tau, n, *lambda)?, 0.0)?,
        }),
        DegreeSpec::Mixture { blocks } => {
            if blocks.is_empty() || blocks.iter().any(|b| !(b.1 >= 0.0)) {
                return Err(invalid("mixture needs non-negative fractions"));
            }
            let mut d = Vec::with_capacity(n);
            for (k, &(deg, frac)) in blocks.iter().enumerate() {
                let count = if k + 1 == blocks.len() { n - d.len() } else { ((frac * n as f64).round() as usize).min(n - d.len()) };
                d.extend(std::iter::repeat_n(deg, count));
            }
            d.sort_unstable_by(|a, b| b.cmp(a));
            Some(DegreeSequence::with_parity_fix(d))
        }
        DegreeSpec::Iid { .. } => None,
    })
}

pub fn prepare(model: &ModelSpec, n: usize) -> Result<Prepared> {
    match model {
        ModelSpec::Cm { degrees } | ModelSpec::Ecm { degrees } | ModelSpec::UniformSimple { degrees, .. } => {
            let d = build_degrees(degrees, n)?;
            let nu = d.as_ref().map(|d| d.nu());
            Ok(Prepared::Degrees { d, scal: degree_scaling(degrees, n)?, nu })
        }
        ModelSpec::Rank1 { tau, cf, .. } => {
            let w = hub_weights(*tau, n, *cf)?;
            let nu = w.weights().iter().map(|x| x * x).sum::<f64>() / w.total();
            Ok(Prepared::Weights { w, scal: scaling_constants(*tau, n, None)?, nu })
        }
    }
}

fn resolve_p(rule: &PRule, nu: f64, scal: &ScalingConstants) -> Result<(f64, bool)> {
    let raw = match *rule {
        PRule::Window { regime, lambda } => {
            let c = critical_p(&PercolationSpec { regime, lambda, p: None }, nu, scal)?;
            return Ok((c.p, c.clamped));
        }
        PRule::Fixed { p } => p,
        PRule::BarelySubcritical { lambda0, delta } => (1.0 - lambda0 * (scal.n as f64).powf(-delta)) / nu,
    };
    if !raw.is_finite() {
        return Err(invalid("retention probability is not finite"));
    }
    Ok((raw.clamp(0.0, 1.0), !(0.0..=1.0).contains(&raw)))
}

/// Output of one replicate pipeline.
#[derive(Clone, Debug)]
pub struct ReplicateOutput {
    pub record: ReplicateRecord,
    pub walk: Option<Vec<i64>>,
}

/// One replicate: sample the model, percolate, decompose. Pure in `(spec, prepared, rng)`.
pub fn run_replicate<R: Rng + ?Sized>(
    spec: &ExperimentSpec,
    prepared: &Prepared,
    n: usize,
    replicate: usize,
    keep_walk: bool,
    rng: &mut R,
) -> Result<ReplicateOutput> {
    let mut walk = None;
    let (graph, p, clamped): (AnyGraph, Option<f64>, bool) = match prepared {
        Prepared::Weights { w, scal, nu } => {
            let kernel = match spec.model {
                ModelSpec::Rank1 { kernel, .. } => kernel,
                _ => unreachable!("weights come from rank-one models"),
            };
            let (p, c) = match &spec.percolation {
                Some(pc) => resolve_p(&pc.rule, *nu, scal).map(|(p, c)| (Some(p), c))?,
                None => (None, false),
            };
            (AnyGraph::Simple(inhomogeneous_graph_thinned(w, kernel, p.unwrap_or(1.0), rng)?), p, c)
        }
        Prepared::Degrees { d, scal, .. } => {
            let d = match (d, &spec.model) {
                (Some(d), _) => d.clone(),
                (None, ModelSpec::Cm { degrees: DegreeSpec::Iid { tau, cf } })
                | (None, ModelSpec::Ecm { degrees: DegreeSpec::Iid { tau, cf } })
                | (None, ModelSpec::UniformSimple { degrees: DegreeSpec::Iid { tau, cf }, .. }) => sample_iid_degrees(*tau, *cf, n, rng)?,
                _ => unreachable!("only i.i.d. degrees are sampled per replicate"),
            };
            match &spec.percolation {
                None => {
                    let g = match &spec.model {
                        ModelSpec::Cm { .. } if keep_walk || spec.outputs.walks => {
                            let (w, g) = explore_dfs(&d, rng)?;
                            if keep_walk {
                                walk = Some(w.values);
                            }
                            AnyGraph::Multi(g)
                        }
                        ModelSpec::Cm { .. } => AnyGraph::Multi(config_model(&d, rng)?),
                        ModelSpec::Ecm { .. } => AnyGraph::Simple(erased_config_model(&d, rng)?.graph),
                        ModelSpec::UniformSimple { max_tries, .. } => AnyGraph::Simple(uniform_simple(&d, rng, *max_tries)?),
                        ModelSpec::Rank1 { .. } => unreachable!(),
                    };
                    (g, None, false)
                }
                Some(pc) => {
                    let (p, clamped) = resolve_p(&pc.rule, d.nu(), scal)?;
                    let g = match (&spec.model, pc.method) {
                        (ModelSpec::Cm { .. }, PercolationMethod::Direct) => {
                            bond_percolate(&AnyGraph::Multi(config_model(&d, rng)?), p, rng)?.graph
                        }
                        (ModelSpec::Cm { .. }, PercolationMethod::Janson) => {
                            janson_percolate(&d, p, rng, JansonCleanup::DeleteUniformDeg1)?.graph
                        }
                        (ModelSpec::Cm { .. }, PercolationMethod::Fountoulakis) => fountoulakis_percolate(&d, p, rng)?.graph,
                        (ModelSpec::Cm { .. } | ModelSpec::Ecm { .. }, PercolationMethod::EraseThenPercolate)
                        | (ModelSpec::Ecm { .. }, PercolationMethod::Direct) => erase_then_percolate(&d, p, rng)?.graph,
                        (ModelSpec::Cm { .. }, PercolationMethod::ExperimentalPercolateThenErase) => {
                            AnyGraph::Simple(percolate_then_erase(&d, p, rng)?)
                        }
                        (ModelSpec::UniformSimple { max_tries, .. }, PercolationMethod::Direct) => {
                            bond_percolate(&AnyGraph::Simple(uniform_simple(&d, rng, *max_tries)?), p, rng)?.graph
                        }
                        _ => return Err(invalid("percolation method does not apply to this model")),
                    };
                    (g, Some(p), clamped)
                }
            }
        }
    };
    let opts = DecomposeOptions {
        diameter: if spec.outputs.diameter { DiameterPolicy::Auto { max_exact: 100_000 } } else { DiameterPolicy::Skip },
        ..Default::default()
    };
    use crate::graph::Graph;
    let comps = decompose_with(&graph, &opts);
    let k = spec.outputs.top_k;
    let susceptibility = if spec.outputs.susceptibilities {
        Some(susceptibilities(&graph, &WeightSequence::ones(graph.vertex_count()))?)
    } else {
        None
    };
    let c1 = comps.first();
    let record = ReplicateRecord {
        n,
        replicate,
        seed: String::new(),
        p,
        p_clamped: clamped,
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        components: comps.len(),
        sizes: comps.iter().take(k).map(|c| c.size).collect(),
        surplus: comps.iter().take(k).map(|c| c.surplus).collect(),
        c1_edges: c1.map_or(0, |c| c.edges),
        c1_diameter: if spec.outputs.diameter { c1.map(|c| c.diameter) } else { None },
        c1_diameter_exact: if spec.outputs.diameter { c1.map(|c| c.diameter_exact) } else { None },
        susceptibility,
        error: None,
    };
    Ok(ReplicateOutput { record, walk })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NSummary {
    pub n: usize,
    pub succeeded: usize,
    pub failed: usize,
    pub c1_size: Option<Summary>,
    pub c1_surplus: Option<Summary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub per_n_seconds: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub spec: ExperimentSpec,
    pub spec_hash: String,
    pub code_version: String,
    pub records: Vec<ReplicateRecord>,
    pub summaries: Vec<NSummary>,
    pub walks: Vec<(usize, Vec<i64>)>,
    pub excursion_law: Option<ExcursionLaw>,
    /// Wall-clock only; never written to the deterministic result files.
    pub timing: Timing,
}

impl RunResult {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn records_at(&self, n: usize) -> impl Iterator<Item = &ReplicateRecord> {
        self.records.iter().filter(move |r| r.n == n && r.error.is_none())
    }

    pub fn c1_sizes(&self, n: usize) -> Vec<f64> {
        self.records_at(n).filter_map(|r| r.c1_size()).map(|s| s as f64).collect()
    }

    pub fn c1_surplus(&self, n: usize) -> Vec<f64> {
        self.records_at(n).map(|r| r.surplus.first().copied().unwrap_or(0) as f64).collect()
    }

    /// Map n -> largest-component sizes, the input of a scaling regression.
    pub fn sizes_by_n(&self) -> BTreeMap<usize, Vec<f64>> {
        self.spec.n_grid.iter().map(|&n| (n, self.c1_sizes(n))).collect()
    }
}

fn run_inner(spec: &ExperimentSpec) -> Result<RunResult> {
    spec.validate()?;
    let start = Instant::now();
    let mut records = Vec::with_capacity(spec.n_grid.len() * spec.replicates);
    let mut walks = Vec::new();
    let mut per_n = Vec::new();
    for (n_idx, &n) in spec.n_grid.iter().enumerate() {
        let t0 = Instant::now();
        let prepared = prepare(&spec.model, n);
        let outs: Vec<(ReplicateRecord, Option<Vec<i64>>)> = par_map(spec.replicates, |r| {
            let idx = replicate_index(n_idx, r);
            let seed = format!("{:032x}", replicate_seed(spec.seed, idx));
            let result = prepared.as_ref().map_err(|e| invalid(e.to_string())).and_then(|prep| {
                let mut rng = replicate_rng(spec.seed, idx);
                run_replicate(spec, prep, n, r, spec.outputs.walks && r == 0, &mut rng)
            });
            match result {
                Ok(mut out) => {
                    out.record.seed = seed;
                    (out.record, out.walk)
                }
                Err(e) => (failed_record(n, r, seed, e), None),
            }
        });
        for (rec, walk) in outs {
            if let Some(w) = walk {
                walks.push((n, w));
            }
            records.push(rec);
        }
        per_n.push((n, t0.elapsed().as_secs_f64()));
    }
    let summaries = spec
        .n_grid
        .iter()
        .map(|&n| {
            let ok: Vec<&ReplicateRecord> = records.iter().filter(|r| r.n == n && r.error.is_none()).collect();
            let sizes: Vec<f64> = ok.iter().filter_map(|r| r.c1_size()).map(|s| s as f64).collect();
            let surplus: Vec<f64> = ok.iter().map(|r| r.surplus.first().copied().unwrap_or(0) as f64).collect();
            NSummary {
                n,
                succeeded: ok.len(),
                failed: spec.replicates - ok.len(),
                c1_size: (!sizes.is_empty()).then(|| summarize(&sizes)),
                c1_surplus: (!surplus.is_empty()).then(|| summarize(&surplus)),
            }
        })
        .collect();
    let excursion_law = match &spec.outputs.excursion_law {
        Some(e) => {
            let rate = e.mark_rate.unwrap_or_else(|| e.process.default_mark_rate());
            // Limit paths draw from their own master seed, derived from the index no replicate uses.
            let master = replicate_seed(spec.seed, u64::MAX) as u64;
            Some(excursion_law_sample(&e.process, rate, e.k, e.t_max, e.dt, e.paths, master)?)
        }
        None => None,
    };
    Ok(RunResult {
        spec: spec.clone(),
        spec_hash: spec.hash(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        records,
        summaries,
        walks,
        excursion_law,
        timing: Timing { total_seconds: start.elapsed().as_secs_f64(), per_n_seconds: per_n },
    })
}

fn failed_record(n: usize, replicate: usize, seed: String, e: Error) -> ReplicateRecord {
    ReplicateRecord {
        n,
        replicate,
        seed,
        p: None,
        p_clamped: false,
        vertices: 0,
        edges: 0,
        components: 0,
        sizes: Vec::new(),
        surplus: Vec::new(),
        c1_edges: 0,
        c1_diameter: None,
        c1_diameter_exact: None,
        susceptibility: None,
        error: Some(e.to_string()),
    }
}

/// Runs every replicate of `spec`. `threads` caps the worker pool; results do not depend on it.
/// Replicate failures are recorded in their records, not returned as errors.
pub fn run_experiment(spec: &ExperimentSpec, threads: Option<usize>) -> Result<RunResult> {
    #[cfg(feature = "parallel")]
    if let Some(t) = threads {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build().map_err(|e| invalid(e.to_string()))?;
        return pool.install(|| run_inner(spec));
    }
    let _ = threads;
    run_inner(spec)
}
