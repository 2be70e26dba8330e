//! Graph types and random graph constructions.

mod inhomogeneous;
mod pcon;
mod ptree;

pub use inhomogeneous::{inhomogeneous_graph, inhomogeneous_graph_thinned, Kernel};
pub use pcon::{pcon_graph, pcon_graph_from_state, PconSample};
pub use ptree::{
    enumerate_ordered_trees, ordered_tree_probability, ptree_direct, ptree_tilted, rooted_tree_probability,
    tilted_enumerate_many, BirthdayMode, OrderedShape, PTree, TiltSampler, TiltState, TiltedSample, MAX_ENUMERATE,
};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::degrees::DegreeSequence;
use crate::error::{invalid, Error, Result};

/// Common read-only view of an undirected (multi)graph on vertices `0..n`.
pub trait Graph {
    fn vertex_count(&self) -> usize;
    fn edge_count(&self) -> usize;
    /// Calls `f(u, v)` once per edge; self-loops appear as `f(v, v)`.
    fn for_each_edge<F: FnMut(usize, usize)>(&self, f: F);

    fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.vertex_count()];
        self.for_each_edge(|u, v| {
            d[u] += 1;
            d[v] += 1;
        });
        d
    }
}

/// Half-edge level multigraph. Half-edges of vertex `v` are `offsets[v]..offsets[v + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    offsets: Vec<usize>,
    owner: Vec<u32>,
    matching: Vec<u32>,
}

impl MultiGraph {
    /// Builds a multigraph from a degree sequence and a perfect matching of its half-edges.
    pub fn from_matching(d: &DegreeSequence, matching: Vec<u32>) -> Result<Self> {
        let offsets = d.offsets();
        let total = *offsets.last().unwrap();
        if matching.len() != total {
            return Err(invalid("matching length differs from total degree"));
        }
        for (h, &m) in matching.iter().enumerate() {
            let m = m as usize;
            if m >= total || m == h || matching[m] as usize != h {
                return Err(invalid("matching is not a fixed-point-free involution"));
            }
        }
        let owner = owners(&offsets);
        Ok(Self { offsets, owner, matching })
    }

    /// Builds a multigraph on `n` vertices from an edge list; half-edges are numbered per vertex
    /// in edge-list order.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut deg = vec![0usize; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({u},{v}) out of range for n = {n}")));
            }
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for &x in &deg {
            offsets.push(offsets.last().unwrap() + x);
        }
        let mut next = offsets[..n].to_vec();
        let mut matching = vec![0u32; offsets[n]];
        for &(u, v) in edges {
            let a = next[u];
            next[u] += 1;
            let b = next[v];
            next[v] += 1;
            matching[a] = b as u32;
            matching[b] = a as u32;
        }
        let owner = owners(&offsets);
        Ok(Self { offsets, owner, matching })
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn half_edge_count(&self) -> usize {
        self.matching.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn half_edges(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    pub fn owner(&self, h: usize) -> usize {
        self.owner[h] as usize
    }

    pub fn partner(&self, h: usize) -> usize {
        self.matching[h] as usize
    }

    pub fn matching(&self) -> &[u32] {
        &self.matching
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        DegreeSequence::new((0..self.n()).map(|v| self.degree(v) as u32).collect())
            .expect("matched half-edges have even total")
    }

    /// Edges as vertex pairs, one per matched half-edge pair, in half-edge order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.matching
            .iter()
            .enumerate()
            .filter(|(h, &m)| *h < m as usize)
            .map(|(h, &m)| (self.owner[h] as usize, self.owner[m as usize] as usize))
    }

    pub fn self_loop_count(&self) -> usize {
        self.edges().filter(|(u, v)| u == v).count()
    }

    /// Neighbors of `v` with multiplicities, sorted by neighbor id. A self-loop counts once.
    pub fn adjacency(&self, v: usize) -> Vec<(usize, usize)> {
        let mut nb: Vec<usize> = self
            .half_edges(v)
            .filter_map(|h| {
                let m = self.partner(h);
                let w = self.owner(m);
                // Each self-loop is seen from both of its half-edges; keep one.
                (w != v || h < m).then_some(w)
            })
            .collect();
        nb.sort_unstable();
        let mut out: Vec<(usize, usize)> = Vec::new();
        for w in nb {
            match out.last_mut() {
                Some((x, c)) if *x == w => *c += 1,
                _ => out.push((w, 1)),
            }
        }
        out
    }

    pub fn is_simple(&self) -> bool {
        let (_, erased) = self.erase();
        erased == 0
    }

    /// Deletes self-loops and collapses multi-edges; returns the simple graph and the number of
    /// multigraph edges removed.
    pub fn erase(&self) -> (SimpleGraph, usize) {
        let mut edges: Vec<(u32, u32)> = self
            .edges()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| (u.min(v) as u32, u.max(v) as u32))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let erased = self.edge_count() - edges.len();
        (SimpleGraph { n: self.n(), edges }, erased)
    }
}

fn owners(offsets: &[usize]) -> Vec<u32> {
    let mut owner = vec![0u32; *offsets.last().unwrap()];
    for v in 0..offsets.len() - 1 {
        owner[offsets[v]..offsets[v + 1]].fill(v as u32);
    }
    owner
}

impl Graph for MultiGraph {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn edge_count(&self) -> usize {
        self.matching.len() / 2
    }

    fn for_each_edge<F: FnMut(usize, usize)>(&self, mut f: F) {
        for (u, v) in self.edges() {
            f(u, v);
        }
    }
}

/// Simple graph stored as a sorted list of pairs `(u, v)` with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl SimpleGraph {
    /// Validates and normalizes `edges`; rejects loops, repeats and out-of-range endpoints.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut e = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({u},{v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(invalid(format!("self-loop at {u}")));
            }
            e.push((u.min(v) as u32, u.max(v) as u32));
        }
        e.sort_unstable();
        let len = e.len();
        e.dedup();
        if e.len() != len {
            return Err(invalid("repeated edge"));
        }
        Ok(Self { n, edges: e })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    /// Caller guarantees `u < v`, no repeats, sorted.
    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<(u32, u32)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(u, v)| u < v && (v as usize) < n));
        Self { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(u, v)| (u as usize, v as usize))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let key = (u.min(v) as u32, u.max(v) as u32);
        self.edges.binary_search(&key).is_ok()
    }

    pub fn to_multigraph(&self) -> MultiGraph {
        let e: Vec<(usize, usize)> = self.edges().collect();
        MultiGraph::from_edges(self.n, &e).expect("edges in range")
    }
}

impl Graph for SimpleGraph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn for_each_edge<F: FnMut(usize, usize)>(&self, mut f: F) {
        for &(u, v) in &self.edges {
            f(u as usize, v as usize);
        }
    }
}

/// Uniform perfect matching of `0..total` by a Fisher-Yates shuffle paired consecutively.
pub(crate) fn uniform_matching<R: Rng + ?Sized>(total: usize, rng: &mut R) -> Vec<u32> {
    let mut perm: Vec<u32> = (0..total as u32).collect();
    perm.shuffle(rng);
    let mut matching = vec![0u32; total];
    for pair in perm.chunks_exact(2) {
        matching[pair[0] as usize] = pair[1];
        matching[pair[1] as usize] = pair[0];
    }
    matching
}

/// Configuration multigraph: a uniform perfect matching of the half-edges of `d`.
pub fn config_model<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> Result<MultiGraph> {
    if d.total() % 2 == 1 {
        return Err(Error::OddTotalDegree(d.total()));
    }
    let matching = uniform_matching(d.total() as usize, rng);
    MultiGraph::from_matching(d, matching)
}

/// Uniform simple graph with degrees `d`, by rejection from the configuration model.
pub fn uniform_simple<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R, max_tries: usize) -> Result<SimpleGraph> {
    if max_tries == 0 {
        return Err(invalid("max_tries must be at least 1"));
    }
    for _ in 0..max_tries {
        let g = config_model(d, rng)?;
        let (s, erased) = g.erase();
        if erased == 0 {
            return Ok(s);
        }
    }
    Err(Error::RejectionExhausted { attempts: max_tries })
}

/// Simple graph obtained by erasing a fresh configuration multigraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasedGraph {
    pub graph: SimpleGraph,
    /// Multigraph edges removed: self-loops plus surplus copies of multi-edges.
    pub erased_edges: usize,
}

pub fn erased_config_model<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> Result<ErasedGraph> {
    let g = config_model(d, rng)?;
    let (graph, erased_edges) = g.erase();
    Ok(ErasedGraph { graph, erased_edges })
}
