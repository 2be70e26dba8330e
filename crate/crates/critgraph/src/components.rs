//! Component decomposition, component statistics and ordered-vector metrics.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::degrees::{ScalingConstants, WeightSequence};
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

/// Compressed adjacency lists. Self-loops are dropped; multi-edges are kept.
#[derive(Clone, Debug)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    pub fn new<G: Graph>(g: &G) -> Self {
        let n = g.vertex_count();
        let mut deg = vec![0usize; n + 1];
        g.for_each_edge(|u, v| {
            if u != v {
                deg[u + 1] += 1;
                deg[v + 1] += 1;
            }
        });
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let offsets = deg;
        let mut next = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        g.for_each_edge(|u, v| {
            if u != v {
                targets[next[u]] = v as u32;
                next[u] += 1;
                targets[next[v]] = u as u32;
                next[v] += 1;
            }
        });
        Self { offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    /// Returns true if `a` and `b` were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u32;
        self.size[a] += self.size[b];
        true
    }
}

/// Component index of every vertex, numbered by increasing minimum vertex id.
pub fn component_labels<G: Graph>(g: &G) -> (Vec<u32>, usize) {
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    g.for_each_edge(|u, v| {
        uf.union(u, v);
    });
    let mut label = vec![u32::MAX; n];
    let mut root_label = vec![u32::MAX; n];
    let mut count = 0usize;
    for v in 0..n {
        let r = uf.find(v);
        if root_label[r] == u32::MAX {
            root_label[r] = count as u32;
            count += 1;
        }
        label[v] = root_label[r];
    }
    (label, count)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentStats {
    pub size: usize,
    pub edges: usize,
    pub surplus: usize,
    pub diameter: usize,
    /// False when the diameter is a double-sweep lower bound.
    pub diameter_exact: bool,
    pub weight: f64,
    pub open_half_edges: Option<u64>,
    pub min_vertex: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiameterPolicy {
    Skip,
    /// Exact for trees (double sweep) and for other components up to `max_exact` vertices
    /// (all-sources search); a double-sweep lower bound beyond.
    Auto { max_exact: usize },
}

#[derive(Clone, Debug)]
pub struct DecomposeOptions<'a> {
    pub weights: Option<&'a WeightSequence>,
    /// Report isolated vertices with size 0.
    pub isolated_zero: bool,
    pub diameter: DiameterPolicy,
    /// Open (unpaired) half-edges per vertex, summed per component when given.
    pub open_half_edges: Option<&'a [u32]>,
}

impl Default for DecomposeOptions<'_> {
    fn default() -> Self {
        Self { weights: None, isolated_zero: false, diameter: DiameterPolicy::Auto { max_exact: 100_000 }, open_half_edges: None }
    }
}

/// Components sorted by size (descending), ties by smallest vertex id.
pub fn decompose<G: Graph>(g: &G, w: Option<&WeightSequence>, isolated_zero: bool) -> Vec<ComponentStats> {
    decompose_with(g, &DecomposeOptions { weights: w, isolated_zero, ..Default::default() })
}

pub fn decompose_with<G: Graph>(g: &G, opts: &DecomposeOptions) -> Vec<ComponentStats> {
    let n = g.vertex_count();
    let (label, count) = component_labels(g);
    let mut stats: Vec<ComponentStats> = (0..count)
        .map(|_| ComponentStats {
            size: 0,
            edges: 0,
            surplus: 0,
            diameter: 0,
            diameter_exact: true,
            weight: 0.0,
            open_half_edges: opts.open_half_edges.map(|_| 0),
            min_vertex: usize::MAX,
        })
        .collect();
    for v in 0..n {
        let s = &mut stats[label[v] as usize];
        s.size += 1;
        s.min_vertex = s.min_vertex.min(v);
        s.weight += opts.weights.map_or(1.0, |w| w.weights()[v]);
        if let (Some(o), Some(acc)) = (opts.open_half_edges, s.open_half_edges.as_mut()) {
            *acc += o[v] as u64;
        }
    }
    g.for_each_edge(|u, _| stats[label[u] as usize].edges += 1);
    for s in &mut stats {
        s.surplus = s.edges + 1 - s.size;
    }
    if let DiameterPolicy::Auto { max_exact } = opts.diameter {
        let csr = Csr::new(g);
        let members = members_by_label(&label, count);
        let mut bfs = Bfs::new(n);
        for (k, s) in stats.iter_mut().enumerate() {
            let (d, exact) = component_diameter(&csr, &members[k], s.surplus == 0, max_exact, &mut bfs);
            s.diameter = d;
            s.diameter_exact = exact;
        }
    }
    if opts.isolated_zero {
        for s in &mut stats {
            if s.size == 1 && s.edges == 0 {
                s.size = 0;
            }
        }
    }
    stats.sort_by(|a, b| b.size.cmp(&a.size).then(a.min_vertex.cmp(&b.min_vertex)));
    stats
}

fn members_by_label(label: &[u32], count: usize) -> Vec<Vec<u32>> {
    let mut m = vec![Vec::new(); count];
    for (v, &l) in label.iter().enumerate() {
        m[l as usize].push(v as u32);
    }
    m
}

/// Reusable breadth-first search buffers.
struct Bfs {
    dist: Vec<u32>,
    queue: VecDeque<u32>,
    touched: Vec<u32>,
}

const UNSEEN: u32 = u32::MAX;

impl Bfs {
    fn new(n: usize) -> Self {
        Self { dist: vec![UNSEEN; n], queue: VecDeque::new(), touched: Vec::new() }
    }

    /// Runs from `src` up to depth `limit`, calling `visit(v, dist)` on each reached vertex.
    fn run(&mut self, csr: &Csr, src: usize, limit: u32, mut visit: impl FnMut(usize, u32)) {
        for &v in &self.touched {
            self.dist[v as usize] = UNSEEN;
        }
        self.touched.clear();
        self.queue.clear();
        self.dist[src] = 0;
        self.touched.push(src as u32);
        self.queue.push_back(src as u32);
        while let Some(u) = self.queue.pop_front() {
            let du = self.dist[u as usize];
            visit(u as usize, du);
            if du == limit {
                continue;
            }
            for &x in csr.neighbors(u as usize) {
                if self.dist[x as usize] == UNSEEN {
                    self.dist[x as usize] = du + 1;
                    self.touched.push(x);
                    self.queue.push_back(x);
                }
            }
        }
    }

    /// Farthest vertex from `src` and its distance.
    fn farthest(&mut self, csr: &Csr, src: usize) -> (usize, u32) {
        let mut best = (src, 0);
        self.run(csr, src, UNSEEN - 1, |v, d| {
            if d > best.1 {
                best = (v, d);
            }
        });
        best
    }
}

fn component_diameter(csr: &Csr, members: &[u32], is_tree: bool, max_exact: usize, bfs: &mut Bfs) -> (usize, bool) {
    if members.len() <= 1 {
        return (0, true);
    }
    if is_tree || members.len() > max_exact {
        // Double sweep is exact on trees and a lower bound otherwise.
        let (a, _) = bfs.farthest(csr, members[0] as usize);
        let (_, d) = bfs.farthest(csr, a);
        return (d as usize, is_tree);
    }
    let mut best = 0;
    for &v in members {
        let (_, d) = bfs.farthest(csr, v as usize);
        best = best.max(d);
    }
    (best as usize, true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diameter {
    pub value: usize,
    pub exact: bool,
}

/// Diameter of a connected graph; exact up to `max_exact` vertices (all trees are exact).
pub fn diameter<G: Graph>(g: &G, max_exact: usize) -> Result<Diameter> {
    let n = g.vertex_count();
    let (label, count) = component_labels(g);
    if count > 1 {
        return Err(Error::Disconnected);
    }
    if n == 0 {
        return Ok(Diameter { value: 0, exact: true });
    }
    let csr = Csr::new(g);
    let is_tree = g.edge_count() + 1 == n;
    let members = members_by_label(&label, count);
    let (value, exact) = component_diameter(&csr, &members[0], is_tree, max_exact, &mut Bfs::new(n));
    Ok(Diameter { value, exact })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SusceptibilityReport {
    pub s2_star: f64,
    pub s3_star: f64,
    pub spr_star: f64,
    pub dn_star: f64,
    pub delta_max: usize,
}

/// Weighted susceptibilities and the weighted distance susceptibility
/// `n^-1 sum_{i,j same component} w_i w_j d(i,j)` over ordered pairs.
pub fn susceptibilities<G: Graph>(g: &G, w: &WeightSequence) -> Result<SusceptibilityReport> {
    let n = g.vertex_count();
    if w.n() != n {
        return Err(invalid("weight sequence length differs from vertex count"));
    }
    let ws = w.weights();
    let (label, count) = component_labels(g);
    let members = members_by_label(&label, count);
    let mut edges = vec![0usize; count];
    g.for_each_edge(|u, _| edges[label[u] as usize] += 1);
    let csr = Csr::new(g);
    let mut bfs = Bfs::new(n);
    let (mut s2, mut s3, mut spr, mut dn) = (0.0, 0.0, 0.0, 0.0);
    let mut delta_max = 0usize;
    let mut sub = vec![0.0f64; n];
    let mut parent = vec![UNSEEN; n];
    for (k, mem) in members.iter().enumerate() {
        let wc: f64 = mem.iter().map(|&v| ws[v as usize]).sum();
        s2 += wc * wc;
        s3 += wc * wc * wc;
        spr += wc * mem.len() as f64;
        if mem.len() < 2 {
            continue;
        }
        let is_tree = edges[k] + 1 == mem.len();
        let (diam, _) = component_diameter(&csr, mem, is_tree, usize::MAX, &mut bfs);
        delta_max = delta_max.max(diam);
        if is_tree {
            // Each tree edge separates a subtree of weight W from the rest, and lies on the path of
            // every ordered pair split by it: contribution 2 W (W_C - W).
            let root = mem[0] as usize;
            let mut order = Vec::with_capacity(mem.len());
            parent[root] = root as u32;
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                order.push(u);
                for &x in csr.neighbors(u) {
                    if parent[x as usize] == UNSEEN {
                        parent[x as usize] = u as u32;
                        stack.push(x as usize);
                    }
                }
            }
            for &u in &order {
                sub[u] = ws[u];
            }
            for &u in order.iter().rev() {
                if u != root {
                    let p = parent[u] as usize;
                    sub[p] += sub[u];
                    dn += 2.0 * sub[u] * (wc - sub[u]);
                }
            }
        } else {
            for &v in mem {
                let wv = ws[v as usize];
                let mut acc = 0.0;
                bfs.run(&csr, v as usize, UNSEEN - 1, |x, d| acc += ws[x] * d as f64);
                dn += wv * acc;
            }
        }
    }
    let nf = n as f64;
    Ok(SusceptibilityReport { s2_star: s2 / nf, s3_star: s3 / nf, spr_star: spr / nf, dn_star: dn / nf, delta_max })
}

/// `inf_v n^-rho * w(ball(v, ceil(delta n^eta)))` over the vertices of the `i`-th largest component (1-based).
pub fn lower_mass<G: Graph>(g: &G, w: &WeightSequence, i: usize, delta: f64, scal: &ScalingConstants) -> Result<f64> {
    let n = g.vertex_count();
    if w.n() != n {
        return Err(invalid("weight sequence length differs from vertex count"));
    }
    let stats = decompose_with(g, &DecomposeOptions { diameter: DiameterPolicy::Skip, ..Default::default() });
    let target = stats.get(i.wrapping_sub(1)).ok_or_else(|| invalid(format!("component rank {i} does not exist")))?;
    let (label, _) = component_labels(g);
    let lab = label[target.min_vertex];
    let radius = (delta * (n as f64).powf(scal.eta)).ceil().max(0.0) as u32;
    let csr = Csr::new(g);
    let mut bfs = Bfs::new(n);
    let ws = w.weights();
    let mut best = f64::INFINITY;
    for v in (0..n).filter(|&v| label[v] == lab) {
        let mut mass = 0.0;
        bfs.run(&csr, v, radius, |x, _| mass += ws[x]);
        best = best.min(mass);
    }
    Ok(best * (n as f64).powf(-scal.rho))
}

/// Pairs `(x, y)` ordered by `x` descending, ties by `y` descending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UVector {
    pairs: Vec<(f64, u64)>,
}

impl UVector {
    pub fn pairs(&self) -> &[(f64, u64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0).collect()
    }
}

pub fn order_u0(pairs: &[(f64, u64)]) -> Result<UVector> {
    for &(x, y) in pairs {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(invalid("entries must be finite and non-negative"));
        }
        if x == 0.0 && y > 0 {
            return Err(invalid("a zero entry cannot carry surplus"));
        }
    }
    let mut p = pairs.to_vec();
    p.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.cmp(&a.1)));
    Ok(UVector { pairs: p })
}

/// Component vector `(scale * size, surplus)` in the ordered form.
pub fn uvector_from_components(stats: &[ComponentStats], scale: f64) -> UVector {
    let pairs: Vec<(f64, u64)> = stats
        .iter()
        .map(|s| (s.size as f64 * scale, if s.size == 0 { 0 } else { s.surplus as u64 }))
        .collect();
    order_u0(&pairs).expect("component vectors are valid")
}

/// `(sum (x1 - x2)^2)^(1/2) + sum |x1 y1 - x2 y2|`, padding the shorter vector with zeros.
pub fn dist_u(z1: &UVector, z2: &UVector) -> f64 {
    let k = z1.len().max(z2.len());
    let get = |z: &UVector, i: usize| z.pairs.get(i).copied().unwrap_or((0.0, 0));
    let (mut sq, mut abs) = (0.0, 0.0);
    for i in 0..k {
        let (a, b) = (get(z1, i), get(z2, i));
        sq += (a.0 - b.0).powi(2);
        abs += (a.0 * a.1 as f64 - b.0 * b.1 as f64).abs();
    }
    sq.sqrt() + abs
}

/// Euclidean distance between non-increasingly sorted copies of `x1` and `x2`.
pub fn dist_l2(x1: &[f64], x2: &[f64]) -> f64 {
    let sorted = |x: &[f64]| {
        let mut v = x.to_vec();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    let (a, b) = (sorted(x1), sorted(x2));
    let k = a.len().max(b.len());
    (0..k)
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{config_model, MultiGraph, SimpleGraph};
    use crate::seeds::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn sg(n: usize, e: &[(usize, usize)]) -> SimpleGraph {
        SimpleGraph::new(n, e).unwrap()
    }

    #[test]
    fn decompose_examples() {
        let g = sg(4, &[(0, 1), (1, 2), (0, 2)]);
        let s = decompose(&g, None, false);
        assert_eq!((s[0].size, s[0].edges, s[0].surplus, s[0].diameter), (3, 3, 1, 1));
        assert_eq!((s[1].size, s[1].edges, s[1].surplus, s[1].diameter), (1, 0, 0, 0));
        let s = decompose(&g, None, true);
        assert_eq!(s[1].size, 0);
        let p = decompose(&sg(3, &[(0, 1), (1, 2)]), None, false);
        assert_eq!((p[0].size, p[0].edges, p[0].surplus, p[0].diameter), (3, 2, 0, 2));
        // Tie order by smallest vertex.
        let t = decompose(&sg(4, &[(2, 3), (0, 1)]), None, false);
        assert_eq!(t[0].min_vertex, 0);
        assert_eq!(t[1].min_vertex, 2);
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&sg(1, &[]), 10).unwrap().value, 0);
        let c5 = sg(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(diameter(&c5, 10).unwrap(), Diameter { value: 2, exact: true });
        let star = sg(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        assert_eq!(diameter(&star, 10).unwrap().value, 2);
        assert!(matches!(diameter(&sg(2, &[]), 10), Err(Error::Disconnected)));
        assert!(!diameter(&c5, 3).unwrap().exact);
    }

    #[test]
    fn susceptibility_examples() {
        let w = WeightSequence::ones(3);
        let r = susceptibilities(&sg(3, &[(0, 1), (1, 2)]), &w).unwrap();
        assert!((r.s2_star - 3.0).abs() < 1e-12);
        assert!((r.dn_star - 8.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.delta_max, 2);
        let r = susceptibilities(&sg(3, &[]), &w).unwrap();
        assert!((r.s2_star - 1.0).abs() < 1e-12 && r.dn_star == 0.0);
    }

    /// Brute-force distance susceptibility via Floyd-Warshall.
    fn dn_brute(n: usize, e: &[(usize, usize)], w: &[f64]) -> f64 {
        let inf = usize::MAX / 4;
        let mut d = vec![vec![inf; n]; n];
        for i in 0..n {
            d[i][i] = 0;
        }
        for &(u, v) in e {
            if u != v {
                d[u][v] = 1;
                d[v][u] = 1;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if d[i][j] < inf {
                    s += w[i] * w[j] * d[i][j] as f64;
                }
            }
        }
        s / n as f64
    }

    #[test]
    fn distance_susceptibility_matches_brute_force() {
        let mut rng = rng_from_seed(1);
        for _ in 0..200 {
            let n = rng.random_range(1..40);
            let d = crate::degrees::DegreeSequence::with_parity_fix((0..n).map(|_| rng.random_range(0..4)).collect());
            let g = config_model(&d, &mut rng).unwrap();
            let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 3.0).collect();
            let ws = WeightSequence::new(w.clone()).unwrap();
            let e: Vec<_> = g.edges().collect();
            let r = susceptibilities(&g, &ws).unwrap();
            let b = dn_brute(n, &e, &w);
            assert!((r.dn_star - b).abs() < 1e-9 * b.max(1.0), "{} vs {}", r.dn_star, b);
            // Diameter check against the same all-pairs table.
            let stats = decompose(&g, None, false);
            let maxd = stats.iter().map(|s| s.diameter).max().unwrap_or(0);
            assert_eq!(r.delta_max, maxd);
            assert!(stats.iter().all(|s| s.diameter_exact));
        }
    }

    #[test]
    fn lower_mass_examples() {
        let g = sg(3, &[(0, 1), (1, 2)]);
        let w = WeightSequence::ones(3);
        let mut scal = ScalingConstants::finite_third_moment(3);
        scal.eta = 0.0;
        scal.rho = 0.0;
        assert_eq!(lower_mass(&g, &w, 1, 1.0, &scal).unwrap(), 2.0);
        assert_eq!(lower_mass(&g, &w, 1, 10.0, &scal).unwrap(), 3.0);
        assert!(lower_mass(&g, &w, 2, 1.0, &scal).is_err());
        let mut prev = 0.0;
        for k in 0..5 {
            let m = lower_mass(&g, &w, 1, k as f64 * 0.5, &scal).unwrap();
            assert!(m >= prev && m <= 3.0);
            prev = m;
        }
    }

    #[test]
    fn u_ordering() {
        let u = order_u0(&[(1.0, 0), (2.0, 3)]).unwrap();
        assert_eq!(u.pairs(), &[(2.0, 3), (1.0, 0)]);
        let u = order_u0(&[(1.0, 1), (1.0, 2)]).unwrap();
        assert_eq!(u.pairs(), &[(1.0, 2), (1.0, 1)]);
        assert!(order_u0(&[]).unwrap().is_empty());
        assert!(order_u0(&[(0.0, 1)]).is_err());
        let a = order_u0(&[(2.0, 1)]).unwrap();
        let b = order_u0(&[(2.0, 2)]).unwrap();
        assert_eq!(dist_u(&a, &a), 0.0);
        assert_eq!(dist_u(&a, &b), 2.0);
        assert!((dist_l2(&[3.0, 4.0], &[4.0]) - 3.0f64.hypot(0.0)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn du_is_a_metric(
            a in proptest::collection::vec((0.0f64..5.0, 0u64..4), 0..6),
            b in proptest::collection::vec((0.0f64..5.0, 0u64..4), 0..6),
            c in proptest::collection::vec((0.0f64..5.0, 0u64..4), 0..6),
        ) {
            let fix = |v: Vec<(f64, u64)>| order_u0(&v.into_iter().map(|(x, y)| if x == 0.0 { (x, 0) } else { (x, y) }).collect::<Vec<_>>()).unwrap();
            let (a, b, c) = (fix(a), fix(b), fix(c));
            prop_assert!(dist_u(&a, &b) >= 0.0);
            prop_assert!((dist_u(&a, &b) - dist_u(&b, &a)).abs() < 1e-12);
            prop_assert!(dist_u(&a, &c) <= dist_u(&a, &b) + dist_u(&b, &c) + 1e-9);
            prop_assert_eq!(dist_u(&a, &a), 0.0);
        }

        #[test]
        fn euler_and_size_sum(raw in proptest::collection::vec(0u32..5, 1..120), seed in any::<u64>()) {
            let d = crate::degrees::DegreeSequence::with_parity_fix(raw);
            let mut rng = rng_from_seed(seed);
            let g: MultiGraph = config_model(&d, &mut rng).unwrap();
            let stats = decompose(&g, None, false);
            prop_assert_eq!(stats.iter().map(|s| s.size).sum::<usize>(), d.n());
            for s in &stats {
                prop_assert_eq!(s.surplus + s.size, s.edges + 1);
            }
            let isolated = stats.iter().filter(|s| s.size == 1 && s.edges == 0).count();
            let z = decompose(&g, None, true);
            prop_assert_eq!(z.iter().map(|s| s.size).sum::<usize>(), d.n() - isolated);
            prop_assert!(stats.windows(2).all(|w| w[0].size >= w[1].size));
        }
    }
}
