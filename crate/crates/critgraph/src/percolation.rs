//! Bond percolation and the equivalent half-edge constructions.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::degrees::{DegreeSequence, ScalingConstants, TailRegime};
use crate::error::{invalid, Result};
use crate::graph::{config_model, uniform_matching, Graph, MultiGraph, SimpleGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    TauGt4,
    #[serde(rename = "tau_34")]
    Tau34,
    #[serde(rename = "tau_23_cm")]
    Tau23Cm,
    #[serde(rename = "tau_23_single")]
    Tau23Single,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercolationSpec {
    pub regime: Regime,
    pub lambda: f64,
    /// Explicit retention probability overriding the regime formula.
    pub p: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalP {
    pub p: f64,
    /// True if the formula left `[0, 1]` and the value was clamped.
    pub clamped: bool,
}

/// Window retention probability. `nu_n` is the criticality parameter of the degree sequence; it is
/// ignored in the single-edge regime.
pub fn critical_p(spec: &PercolationSpec, nu_n: f64, scal: &ScalingConstants) -> Result<CriticalP> {
    let raw = if let Some(p) = spec.p {
        p
    } else {
        let n = scal.n as f64;
        match spec.regime {
            Regime::TauGt4 => (1.0 + spec.lambda * n.powf(-1.0 / 3.0)) / nu_n,
            Regime::Tau34 => {
                if scal.regime != TailRegime::Tau34 {
                    return Err(invalid("tau_34 regime needs tau in (3,4) scaling constants"));
                }
                (1.0 + spec.lambda / scal.c_n) / nu_n
            }
            Regime::Tau23Cm | Regime::Tau23Single => {
                if !(spec.lambda > 0.0) {
                    return Err(invalid("lambda must be positive for tau in (2,3)"));
                }
                if spec.regime == Regime::Tau23Cm {
                    spec.lambda / nu_n
                } else {
                    let tau = match (scal.regime, scal.tau) {
                        (TailRegime::Tau23, Some(t)) => t,
                        _ => return Err(invalid("tau_23_single regime needs tau in (2,3) scaling constants")),
                    };
                    spec.lambda * n.powf(-(3.0 - tau) / 2.0)
                }
            }
        }
    };
    if raw.is_nan() {
        return Err(invalid("retention probability is NaN"));
    }
    let p = raw.clamp(0.0, 1.0);
    Ok(CriticalP { p, clamped: p != raw })
}

/// A multigraph or a simple graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyGraph {
    Multi(MultiGraph),
    Simple(SimpleGraph),
}

impl From<MultiGraph> for AnyGraph {
    fn from(g: MultiGraph) -> Self {
        AnyGraph::Multi(g)
    }
}

impl From<SimpleGraph> for AnyGraph {
    fn from(g: SimpleGraph) -> Self {
        AnyGraph::Simple(g)
    }
}

impl AnyGraph {
    pub fn to_multigraph(&self) -> MultiGraph {
        match self {
            AnyGraph::Multi(g) => g.clone(),
            AnyGraph::Simple(g) => g.to_multigraph(),
        }
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::with_capacity(self.edge_count());
        self.for_each_edge(|u, v| e.push((u, v)));
        e
    }
}

impl Graph for AnyGraph {
    fn vertex_count(&self) -> usize {
        match self {
            AnyGraph::Multi(g) => g.vertex_count(),
            AnyGraph::Simple(g) => g.vertex_count(),
        }
    }

    fn edge_count(&self) -> usize {
        match self {
            AnyGraph::Multi(g) => g.edge_count(),
            AnyGraph::Simple(g) => g.edge_count(),
        }
    }

    fn for_each_edge<F: FnMut(usize, usize)>(&self, f: F) {
        match self {
            AnyGraph::Multi(g) => g.for_each_edge(f),
            AnyGraph::Simple(g) => g.for_each_edge(f),
        }
    }
}

/// Bookkeeping of the half-edge explosion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explosion {
    /// Number of red (detached) degree-one vertices.
    pub n_plus: usize,
    /// Degrees of the `n + n_plus` vertices of the exploded model; red vertices come last.
    pub exploded: DegreeSequence,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PercolatedGraph {
    pub graph: AnyGraph,
    /// Per original edge (in the input graph's edge order), whether it was kept. Direct mode only.
    pub retained: Option<Vec<bool>>,
    pub explosion: Option<Explosion>,
    /// Retained half-edge ids of the original degree sequence (half-edge constructions only).
    pub retained_half_edges: Option<Vec<u32>>,
}

impl PercolatedGraph {
    fn plain(graph: AnyGraph) -> Self {
        Self { graph, retained: None, explosion: None, retained_half_edges: None }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p = {p} outside [0,1]")));
    }
    Ok(())
}

/// Keeps each edge independently with probability `p`.
pub fn bond_percolate<R: Rng + ?Sized>(g: &AnyGraph, p: f64, rng: &mut R) -> Result<PercolatedGraph> {
    check_p(p)?;
    let edges = g.edge_list();
    let retained: Vec<bool> = edges.iter().map(|_| rng.random::<f64>() < p).collect();
    let kept: Vec<(usize, usize)> = edges.iter().zip(&retained).filter(|(_, &k)| k).map(|(&e, _)| e).collect();
    let graph = match g {
        AnyGraph::Multi(m) => AnyGraph::Multi(MultiGraph::from_edges(m.n(), &kept)?),
        AnyGraph::Simple(s) => AnyGraph::Simple(SimpleGraph::new(s.n(), &kept)?),
    };
    Ok(PercolatedGraph { graph, retained: Some(retained), explosion: None, retained_half_edges: None })
}

/// Cleanup step of the explosion construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum JansonCleanup {
    /// Remove the red vertices.
    DeleteRed,
    /// Remove `n_plus` uniformly chosen degree-one vertices; the default.
    DeleteUniformDeg1,
}

/// Percolation on the configuration model by half-edge explosion: each half-edge is detached with
/// probability `1 - sqrt(p)` onto a new degree-one vertex, the exploded sequence is paired uniformly,
/// and `n_plus` degree-one vertices are removed.
///
/// In `DeleteUniformDeg1` mode surviving red vertices take over the ids of removed original vertices
/// (in increasing order on both sides), so the output always has `n` vertices.
pub fn janson_percolate<R: Rng + ?Sized>(
    d: &DegreeSequence,
    p: f64,
    rng: &mut R,
    cleanup: JansonCleanup,
) -> Result<PercolatedGraph> {
    check_p(p)?;
    if p == 0.0 {
        return Err(invalid("explosion needs p > 0"));
    }
    let n = d.n();
    let keep = p.sqrt();
    let mut tilde: Vec<u32> = Vec::with_capacity(n);
    for &di in d.degrees() {
        tilde.push(if di == 0 { 0 } else { Binomial::new(di as u64, keep).expect("valid").sample(rng) as u32 });
    }
    let n_plus = (d.total() - tilde.iter().map(|&x| x as u64).sum::<u64>()) as usize;
    tilde.extend(std::iter::repeat_n(1, n_plus));
    let exploded = DegreeSequence::new(tilde)?;
    let g = config_model(&exploded, rng)?;
    let tn = n + n_plus;
    let mut deleted = vec![false; tn];
    match cleanup {
        JansonCleanup::DeleteRed => deleted[n..].fill(true),
        JansonCleanup::DeleteUniformDeg1 => {
            let mut ones: Vec<usize> = (0..tn).filter(|&v| exploded.degrees()[v] == 1).collect();
            let (chosen, _) = ones.partial_shuffle(rng, n_plus);
            for &v in chosen.iter() {
                deleted[v] = true;
            }
        }
    }
    // Relabel survivors onto 0..n.
    let mut label = vec![usize::MAX; tn];
    let mut freed: Vec<usize> = (0..n).filter(|&v| deleted[v]).collect();
    freed.reverse();
    for v in 0..tn {
        if deleted[v] {
            continue;
        }
        label[v] = if v < n { v } else { freed.pop().expect("one freed id per surviving red vertex") };
    }
    let edges: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(u, v)| !deleted[u] && !deleted[v])
        .map(|(u, v)| (label[u], label[v]))
        .collect();
    Ok(PercolatedGraph {
        graph: AnyGraph::Multi(MultiGraph::from_edges(n, &edges)?),
        retained: None,
        explosion: Some(Explosion { n_plus, exploded }),
        retained_half_edges: None,
    })
}

/// Exact sampler of percolated configuration models that reuses one half-edge permutation across draws:
/// draw `X ~ Bin(l_n/2, p)` and pair `2X` uniformly chosen half-edges. Each draw costs `O(X)` after setup.
#[derive(Clone, Debug)]
pub struct HalfEdgeSampler {
    n: usize,
    owner: Vec<u32>,
    perm: Vec<u32>,
}

impl HalfEdgeSampler {
    pub fn new(d: &DegreeSequence) -> Self {
        let offsets = d.offsets();
        let mut owner = vec![0u32; d.total() as usize];
        for v in 0..d.n() {
            owner[offsets[v]..offsets[v + 1]].fill(v as u32);
        }
        let perm = (0..owner.len() as u32).collect();
        Self { n: d.n(), owner, perm }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> usize {
        self.owner.len()
    }

    pub fn owner(&self, h: u32) -> usize {
        self.owner[h as usize] as usize
    }

    /// Moves a uniform random ordered `k`-subset of half-edges to the front and returns it.
    pub fn uniform_prefix<R: Rng + ?Sized>(&mut self, k: usize, rng: &mut R) -> &[u32] {
        let (head, _) = self.perm.partial_shuffle(rng, k);
        head
    }

    /// Edges of one percolated configuration model draw, as owner pairs.
    pub fn sample_edges<R: Rng + ?Sized>(&mut self, p: f64, rng: &mut R) -> Vec<(u32, u32)> {
        let pairs = self.owner.len() as u64 / 2;
        let x = if pairs == 0 { 0 } else { Binomial::new(pairs, p).expect("valid p").sample(rng) as usize };
        let owner = &self.owner;
        let (head, _) = self.perm.partial_shuffle(rng, 2 * x);
        head.chunks_exact(2).map(|c| (owner[c[0] as usize], owner[c[1] as usize])).collect()
    }
}

/// Exact law of bond-percolated `CM_n(d)` via a binomial number of uniformly paired half-edges.
pub fn fountoulakis_percolate<R: Rng + ?Sized>(d: &DegreeSequence, p: f64, rng: &mut R) -> Result<PercolatedGraph> {
    check_p(p)?;
    let mut s = HalfEdgeSampler::new(d);
    let pairs = d.total() / 2;
    let x = if pairs == 0 { 0 } else { Binomial::new(pairs, p).expect("valid p").sample(rng) as usize };
    let head = s.uniform_prefix(2 * x, rng).to_vec();
    let edges: Vec<(usize, usize)> = head.chunks_exact(2).map(|c| (s.owner(c[0]), s.owner(c[1]))).collect();
    let mut pg = PercolatedGraph::plain(AnyGraph::Multi(MultiGraph::from_edges(d.n(), &edges)?));
    pg.retained_half_edges = Some(head);
    Ok(pg)
}

/// Pairs consecutive entries of `prefix`; an odd leftover is paired with a dummy half-edge on vertex 0.
fn pair_prefix(s: &HalfEdgeSampler, prefix: &[u32]) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = prefix.chunks_exact(2).map(|c| (s.owner(c[0]), s.owner(c[1]))).collect();
    if prefix.len() % 2 == 1 {
        edges.push((s.owner(*prefix.last().unwrap()), 0));
    }
    edges
}

/// Each half-edge kept independently with probability `p`, then a uniform matching of the kept ones
/// (plus a dummy half-edge on vertex 0 if their number is odd).
pub fn sandwich_graph<R: Rng + ?Sized>(d: &DegreeSequence, p: f64, rng: &mut R) -> Result<PercolatedGraph> {
    check_p(p)?;
    let mut s = HalfEdgeSampler::new(d);
    let h = if s.total() == 0 { 0 } else { Binomial::new(s.total() as u64, p).expect("valid").sample(rng) as usize };
    let head = s.uniform_prefix(h, rng).to_vec();
    let edges = pair_prefix(&s, &head);
    let mut pg = PercolatedGraph::plain(AnyGraph::Multi(MultiGraph::from_edges(d.n(), &edges)?));
    pg.retained_half_edges = Some(head);
    Ok(pg)
}

/// `4 * sqrt(ln n / (l_n p))`.
pub fn sandwich_epsilon(n: usize, total: u64, p: f64) -> f64 {
    4.0 * ((n as f64).ln() / (total as f64 * p)).sqrt()
}

/// Edge counts of the sandwich graphs at `p(1 - eps)` and `p(1 + eps)` and of percolated `CM_n(d)` at `p`,
/// all built as prefixes of one half-edge permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SandwichBracket {
    pub lower_edges: usize,
    pub direct_edges: usize,
    pub upper_edges: usize,
}

impl SandwichBracket {
    /// Whether the lower sandwich's edge set is inside the percolated graph's, which is inside the upper's.
    pub fn brackets(&self) -> bool {
        self.lower_edges <= self.direct_edges && self.direct_edges <= self.upper_edges
    }
}

pub fn sandwich_bracket<R: Rng + ?Sized>(s: &mut HalfEdgeSampler, p: f64, eps: f64, rng: &mut R) -> SandwichBracket {
    let total = s.total() as u64;
    let bin = |q: f64, trials: u64, rng: &mut R| {
        if trials == 0 {
            0
        } else {
            Binomial::new(trials, q.clamp(0.0, 1.0)).expect("valid").sample(rng) as usize
        }
    };
    let h_lo = bin(p * (1.0 - eps), total, rng);
    let h_hi = bin(p * (1.0 + eps), total, rng);
    let x = bin(p, total / 2, rng);
    let k = h_hi.max(2 * x).max(h_lo);
    // Only the prefix is needed; edges of a shorter prefix are a subset of those of a longer one.
    s.uniform_prefix(k, rng);
    SandwichBracket { lower_edges: h_lo.div_ceil(2), direct_edges: x, upper_edges: h_hi.div_ceil(2) }
}

/// Percolation family on one configuration model realization, monotone in the retention probability.
#[derive(Clone, Debug)]
pub struct CoupledFamily {
    /// Edges of the underlying configuration model in a uniformly random order.
    pub edges: Vec<(u32, u32)>,
    /// Uniform mark of each edge, sorted increasingly to match `edges`.
    pub marks: Vec<f64>,
    pub n: usize,
    pub lambdas: Vec<f64>,
    pub ps: Vec<f64>,
}

impl CoupledFamily {
    /// Number of edges present at retention probability `p`.
    pub fn edge_count_at(&self, p: f64) -> usize {
        self.marks.partition_point(|&u| u <= p)
    }

    pub fn graph_at(&self, p: f64) -> MultiGraph {
        let k = self.edge_count_at(p);
        let e: Vec<(usize, usize)> = self.edges[..k].iter().map(|&(u, v)| (u as usize, v as usize)).collect();
        MultiGraph::from_edges(self.n, &e).expect("edges in range")
    }

    /// Graphs on the stored grid.
    pub fn graphs(&self) -> Vec<MultiGraph> {
        self.ps.iter().map(|&p| self.graph_at(p)).collect()
    }
}

/// Harris coupling over a sorted grid of window locations; `p_of` maps a location to a retention probability.
pub fn harris_family<R: Rng + ?Sized>(
    d: &DegreeSequence,
    lambdas: &[f64],
    p_of: impl Fn(f64) -> Result<f64>,
    rng: &mut R,
) -> Result<CoupledFamily> {
    if lambdas.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("lambda grid must be sorted"));
    }
    let ps: Vec<f64> = lambdas.iter().map(|&l| p_of(l)).collect::<Result<_>>()?;
    let offsets = d.offsets();
    let mut owner = vec![0u32; d.total() as usize];
    for v in 0..d.n() {
        owner[offsets[v]..offsets[v + 1]].fill(v as u32);
    }
    // Consecutive pairs of a uniform permutation are a uniform matching listed in uniform random order,
    // so assigning sorted uniform marks in that order gives i.i.d. marks.
    let matching = uniform_matching(owner.len(), rng);
    let mut edges: Vec<(u32, u32)> = (0..owner.len())
        .filter(|&h| h < matching[h] as usize)
        .map(|h| (owner[h], owner[matching[h] as usize]))
        .collect();
    edges.shuffle(rng);
    let mut marks: Vec<f64> = (0..edges.len()).map(|_| rng.random()).collect();
    marks.sort_by(f64::total_cmp);
    Ok(CoupledFamily { edges, marks, n: d.n(), lambdas: lambdas.to_vec(), ps })
}

/// Percolates the configuration multigraph and then erases loops and multi-edges. Experimental: the
/// window theorems concern the erase-then-percolate order.
pub fn percolate_then_erase<R: Rng + ?Sized>(d: &DegreeSequence, p: f64, rng: &mut R) -> Result<SimpleGraph> {
    let pg = fountoulakis_percolate(d, p, rng)?;
    Ok(pg.graph.to_multigraph().erase().0)
}

/// Erases the configuration multigraph and then bond-percolates the simple graph.
pub fn erase_then_percolate<R: Rng + ?Sized>(d: &DegreeSequence, p: f64, rng: &mut R) -> Result<PercolatedGraph> {
    let g = config_model(d, rng)?.erase().0;
    bond_percolate(&AnyGraph::Simple(g), p, rng)
}
