//! p-trees: direct samplers, ordered-tree enumeration and the tilted law.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const NO_PARENT: u32 = u32::MAX;
/// Largest vertex count accepted by the exact enumerating sampler.
pub const MAX_ENUMERATE: usize = 8;

/// Rooted tree on `0..m` with ordered children (leftmost first).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PTree {
    parent: Vec<u32>,
    children: Vec<Vec<u32>>,
    root: usize,
}

impl PTree {
    /// Builds a tree from per-vertex child lists, leftmost child first.
    pub fn from_children(root: usize, children: Vec<Vec<u32>>) -> Result<Self> {
        let m = children.len();
        let mut parent = vec![NO_PARENT; m];
        for (u, cs) in children.iter().enumerate() {
            for &c in cs {
                let c = c as usize;
                if c >= m || c == root || parent[c] != NO_PARENT {
                    return Err(invalid("children lists do not describe a tree"));
                }
                parent[c] = u as u32;
            }
        }
        if root >= m || parent.iter().enumerate().any(|(v, &p)| v != root && p == NO_PARENT) {
            return Err(invalid("children lists do not span the vertex set"));
        }
        let t = Self { parent, children, root };
        if t.preorder().len() != m {
            return Err(invalid("children lists contain a cycle"));
        }
        Ok(t)
    }

    pub fn m(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (self.parent[v] != NO_PARENT).then(|| self.parent[v] as usize)
    }

    pub fn children(&self, v: usize) -> &[u32] {
        &self.children[v]
    }

    /// Edges `(parent, child)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.m()).filter_map(|v| self.parent(v).map(|p| (p, v))).collect()
    }

    /// Depth-first order, left to right.
    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.m());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            order.push(v);
            if order.len() > self.m() {
                break;
            }
            stack.extend(self.children[v].iter().rev().map(|&c| c as usize));
        }
        order
    }

    /// Same rooted tree with every child list sorted by id; identifies the unordered tree.
    pub fn canonical(&self) -> PTree {
        let mut t = self.clone();
        for cs in &mut t.children {
            cs.sort_unstable();
        }
        t
    }

    pub fn shuffle_children<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for cs in &mut self.children {
            cs.shuffle(rng);
        }
    }
}

/// `prod_v p_v^(children of v)`.
pub fn rooted_tree_probability(t: &PTree, p: &[f64]) -> f64 {
    (0..t.m()).map(|v| p[v].powi(t.children(v).len() as i32)).product()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// Ordered p-tree probability `prod_v p_v^(d_v) / d_v!`.
pub fn ordered_tree_probability(t: &PTree, p: &[f64]) -> f64 {
    (0..t.m())
        .map(|v| {
            let d = t.children(v).len();
            p[v].powi(d as i32) / factorial(d)
        })
        .product()
}

fn validate_pmf(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(invalid("probability vector is empty"));
    }
    if p.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(invalid("probability vector entries must be strictly positive"));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("probability vector sums to {s}, not 1")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BirthdayMode {
    /// Repeat-time construction from an i.i.d. p-sequence.
    Birthday,
    /// Decodes an i.i.d. p-sequence of length m-1 as a rooted Pruefer code.
    Sequential,
}

/// Draws an unordered p-tree; children appear in discovery order (birthday) or by id (sequential).
pub fn ptree_direct<R: Rng + ?Sized>(p: &[f64], rng: &mut R, mode: BirthdayMode) -> Result<PTree> {
    validate_pmf(p)?;
    let m = p.len();
    let dist = WeightedIndex::new(p).map_err(|e| invalid(e.to_string()))?;
    match mode {
        BirthdayMode::Birthday => {
            let mut seen = vec![false; m];
            let mut children = vec![Vec::new(); m];
            let root = dist.sample(rng);
            seen[root] = true;
            let (mut prev, mut found) = (root, 1);
            while found < m {
                let y = dist.sample(rng);
                if !seen[y] {
                    seen[y] = true;
                    found += 1;
                    children[prev].push(y as u32);
                }
                prev = y;
            }
            PTree::from_children(root, children)
        }
        BirthdayMode::Sequential => {
            let code: Vec<usize> = (0..m.saturating_sub(1)).map(|_| dist.sample(rng)).collect();
            Ok(decode_rooted_pruefer(m, &code))
        }
    }
}

/// Rooted trees on `0..m` correspond to codes in `[m]^(m-1)` where vertex `v` appears once per child:
/// attach a virtual parent `m` above the root and run ordinary Pruefer decoding.
fn decode_rooted_pruefer(m: usize, code: &[usize]) -> PTree {
    let mut count = vec![0usize; m];
    for &c in code {
        count[c] += 1;
    }
    let mut heap: BinaryHeap<Reverse<usize>> = (0..m).filter(|&v| count[v] == 0).map(Reverse).collect();
    let mut children = vec![Vec::new(); m];
    for &s in code {
        let Reverse(leaf) = heap.pop().expect("a leaf exists");
        children[s].push(leaf as u32);
        count[s] -= 1;
        if count[s] == 0 {
            heap.push(Reverse(s));
        }
    }
    let Reverse(root) = heap.pop().expect("root remains");
    for cs in &mut children {
        cs.sort_unstable();
    }
    PTree::from_children(root, children).expect("decoding yields a tree")
}

/// Tree-dependent quantities of the tilted law and the surplus construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TiltState {
    pub tree: PTree,
    pub depth_first_order: Vec<usize>,
    /// Mass of the permitted endpoints of each vertex.
    pub permitted_mass: Vec<f64>,
    /// `a * sum_v p_v A(v)`.
    pub lambda: f64,
    pub log_tilt: f64,
    pub tilt_value: f64,
    /// Surplus edges attached by the surplus construction, if it has run.
    pub surplus_endpoints: Vec<(usize, usize)>,
}

impl TiltState {
    pub fn new(tree: PTree, p: &[f64], a: f64) -> Self {
        let m = tree.m();
        let order = tree.preorder();
        let mut mass = vec![0.0; m];
        for &u in &order {
            let cs = tree.children(u);
            // Suffix sums of the children's masses give the mass to the right of each child.
            let mut right = 0.0;
            for &c in cs.iter().rev() {
                mass[c as usize] = mass[u] + right;
                right += p[c as usize];
            }
        }
        let lambda = a * (0..m).map(|v| p[v] * mass[v]).sum::<f64>();
        let log_edges: f64 = tree.edges().iter().map(|&(k, l)| log_expm1_ratio(a * p[k] * p[l])).sum();
        let log_tilt = log_edges + lambda;
        Self {
            tree,
            depth_first_order: order,
            permitted_mass: mass,
            lambda,
            log_tilt,
            tilt_value: log_tilt.exp(),
            surplus_endpoints: Vec::new(),
        }
    }

    /// Endpoints of permitted edges from `v`: children of strict ancestors lying right of the path to `v`,
    /// in ascending id order.
    pub fn permitted_set(&self, v: usize) -> Vec<usize> {
        let t = &self.tree;
        let mut out = Vec::new();
        let mut child = v;
        while let Some(u) = t.parent(child) {
            let cs = t.children(u);
            let k = cs.iter().position(|&c| c as usize == child).expect("child of parent");
            out.extend(cs[k + 1..].iter().map(|&c| c as usize));
            child = u;
        }
        out.sort_unstable();
        out
    }
}

/// `ln((e^x - 1) / x)`, continuous at 0.
fn log_expm1_ratio(x: f64) -> f64 {
    if x < 1e-8 {
        x / 2.0
    } else if x > 30.0 {
        x + (-(-x).exp()).ln_1p() - x.ln()
    } else {
        (x.exp_m1() / x).ln()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TiltSampler {
    /// Exact draw by enumerating all ordered trees (m <= 8).
    Enumerate,
    /// Sampling-importance-resampling from `M` ordered p-tree proposals.
    Importance(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TiltedSample {
    pub state: TiltState,
    /// Tilt `L(t)` of the returned tree, i.e. its importance weight against the ordered p-tree law.
    pub weight: f64,
    /// Effective sample size of the proposal batch (importance mode only).
    pub ess: Option<f64>,
}

/// Draws an ordered tree from the ordered p-tree law tilted by `L`.
pub fn ptree_tilted<R: Rng + ?Sized>(p: &[f64], a: f64, rng: &mut R, sampler: TiltSampler) -> Result<TiltedSample> {
    validate_pmf(p)?;
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid("a must be positive"));
    }
    match sampler {
        TiltSampler::Enumerate => {
            let state = tilted_enumerate_many(p, a, 1, rng)?.pop().expect("one draw");
            let weight = state.tilt_value;
            Ok(TiltedSample { state, weight, ess: None })
        }
        TiltSampler::Importance(proposals) => {
            if proposals == 0 {
                return Err(invalid("importance sampling needs at least one proposal"));
            }
            let mut states = Vec::with_capacity(proposals);
            for _ in 0..proposals {
                let mut t = ptree_direct(p, rng, BirthdayMode::Birthday)?;
                t.shuffle_children(rng);
                states.push(TiltState::new(t, p, a));
            }
            let max_log = states.iter().map(|s| s.log_tilt).fold(f64::NEG_INFINITY, f64::max);
            let rel: Vec<f64> = states.iter().map(|s| (s.log_tilt - max_log).exp()).collect();
            let s1: f64 = rel.iter().sum();
            let s2: f64 = rel.iter().map(|x| x * x).sum();
            let k = WeightedIndex::new(&rel).map_err(|e| invalid(e.to_string()))?.sample(rng);
            let state = states.swap_remove(k);
            let weight = state.tilt_value;
            Ok(TiltedSample { state, weight, ess: Some(s1 * s1 / s2) })
        }
    }
}

/// Calls `f` on every ordered (plane) tree with vertex labels `0..m`, together with its shape data:
/// `children_count[k]` and `parent_pos[k]` indexed by preorder position, and `labels[k]` the vertex at
/// position `k`. There are `m! * Catalan(m-1)` such trees.
pub fn enumerate_ordered_trees(m: usize, mut f: impl FnMut(&OrderedShape, &[usize])) {
    if m == 0 {
        return;
    }
    for shape in plane_shapes(m) {
        let mut labels: Vec<usize> = (0..m).collect();
        loop {
            f(&shape, &labels);
            if !next_permutation(&mut labels) {
                break;
            }
        }
    }
}

/// A plane tree shape in preorder.
#[derive(Clone, Debug)]
pub struct OrderedShape {
    pub children_count: Vec<usize>,
    pub parent_pos: Vec<Option<usize>>,
    /// For each position, the positions of its permitted endpoints.
    pub permitted: Vec<Vec<usize>>,
    /// Children positions of each position, left to right.
    pub child_pos: Vec<Vec<usize>>,
}

impl OrderedShape {
    fn from_counts(counts: Vec<usize>) -> Self {
        let m = counts.len();
        let mut parent_pos = vec![None; m];
        let mut child_pos = vec![Vec::new(); m];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for k in 0..m {
            if let Some(top) = stack.last_mut() {
                parent_pos[k] = Some(top.0);
                child_pos[top.0].push(k);
                top.1 -= 1;
                if top.1 == 0 {
                    stack.pop();
                }
            }
            if counts[k] > 0 {
                stack.push((k, counts[k]));
            }
        }
        let mut permitted = vec![Vec::new(); m];
        for k in 0..m {
            let mut child = k;
            while let Some(u) = parent_pos[child] {
                let cs = &child_pos[u];
                let i = cs.iter().position(|&c| c == child).unwrap();
                permitted[k].extend_from_slice(&cs[i + 1..]);
                child = u;
            }
        }
        Self { children_count: counts, parent_pos, permitted, child_pos }
    }

    pub fn to_tree(&self, labels: &[usize]) -> PTree {
        let m = labels.len();
        let mut children = vec![Vec::new(); m];
        for k in 0..m {
            children[labels[k]] = self.child_pos[k].iter().map(|&c| labels[c] as u32).collect();
        }
        PTree::from_children(labels[0], children).expect("shape yields a tree")
    }

    /// `(P_ord(t), L(t))` for the labelled tree, computed from shape data alone.
    pub fn weights(&self, labels: &[usize], p: &[f64], a: f64) -> (f64, f64) {
        let mut pord = 1.0;
        let mut log_l = 0.0;
        for k in 0..labels.len() {
            let pk = p[labels[k]];
            let d = self.children_count[k];
            pord *= pk.powi(d as i32) / factorial(d);
            if let Some(u) = self.parent_pos[k] {
                log_l += log_expm1_ratio(a * pk * p[labels[u]]);
            }
            for &q in &self.permitted[k] {
                log_l += a * pk * p[labels[q]];
            }
        }
        (pord, log_l.exp())
    }
}

fn plane_shapes(m: usize) -> Vec<OrderedShape> {
    // Lukasiewicz words: child counts in preorder with every proper prefix keeping the walk positive.
    fn rec(m: usize, prefix: &mut Vec<usize>, open: usize, out: &mut Vec<Vec<usize>>) {
        let placed = prefix.len();
        if placed == m {
            if open == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let remaining = m - placed;
        for c in 0..remaining {
            // After this vertex, open slots = open - 1 + c, and they must be fillable by the rest.
            let next_open = open - 1 + c;
            if next_open > remaining - 1 || (next_open == 0 && remaining > 1) {
                continue;
            }
            prefix.push(c);
            rec(m, prefix, next_open, out);
            prefix.pop();
        }
    }
    let mut words = Vec::new();
    rec(m, &mut Vec::with_capacity(m), 1, &mut words);
    words.into_iter().map(OrderedShape::from_counts).collect()
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `k` independent exact draws from the tilted ordered law, using two streaming passes.
pub fn tilted_enumerate_many<R: Rng + ?Sized>(p: &[f64], a: f64, k: usize, rng: &mut R) -> Result<Vec<TiltState>> {
    validate_pmf(p)?;
    let m = p.len();
    if m > MAX_ENUMERATE {
        return Err(invalid(format!("exact enumeration supports m <= {MAX_ENUMERATE}, got {m}")));
    }
    let mut z = 0.0;
    enumerate_ordered_trees(m, |s, l| {
        let (po, lt) = s.weights(l, p, a);
        z += po * lt;
    });
    let mut targets: Vec<(f64, usize)> = (0..k).map(|i| (rng.random::<f64>() * z, i)).collect();
    targets.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<Option<PTree>> = vec![None; k];
    // The second pass repeats the first pass's additions in the same order, so the cumulative sum
    // reaches exactly z and every target in [0, z) is assigned.
    let mut acc = 0.0;
    let mut next = 0;
    enumerate_ordered_trees(m, |s, l| {
        if next >= targets.len() {
            return;
        }
        let (po, lt) = s.weights(l, p, a);
        acc += po * lt;
        while next < targets.len() && targets[next].0 < acc {
            out[targets[next].1] = Some(s.to_tree(l));
            next += 1;
        }
    });
    Ok(out
        .into_iter()
        .map(|t| TiltState::new(t.expect("assigned"), p, a))
        .collect())
}
