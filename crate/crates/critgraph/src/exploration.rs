//! Exploration walks that generate the configuration model while exploring it.
//!
//! Both explorations pair half-edges lazily: whenever a half-edge's partner is needed, it is drawn
//! uniformly from the half-edges that are still unpaired. Any such sequential rule yields a uniform
//! perfect matching, so the byproduct multigraph has the configuration model law.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::degrees::{DegreeSequence, ScalingConstants, TailRegime};
use crate::error::{Error, Result};
use crate::graph::MultiGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkMode {
    DfsVertex,
    UnitEdge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageEvent {
    /// A new component is started.
    Root,
    /// A new vertex is discovered.
    New,
    /// A pairing closes a cycle with an already discovered vertex (edge mode).
    Surplus,
    /// A pairing creates a self-loop (edge mode).
    Loop,
}

impl StageEvent {
    pub fn as_str(&self) -> &'static str {
        match self {
            StageEvent::Root => "root",
            StageEvent::New => "new",
            StageEvent::Surplus => "surplus",
            StageEvent::Loop => "loop",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplorationWalk {
    pub mode: WalkMode,
    /// `S(0), ..., S(T)`.
    pub values: Vec<i64>,
    /// `tau[k - 1]` is the first stage with `S = -2k`.
    pub tau: Vec<usize>,
    /// Stages at which a surplus edge was found, one entry per surplus edge (a stage may repeat).
    pub surplus_times: Vec<usize>,
    /// Stages at which a self-loop was found (also listed in `surplus_times` under multigraph accounting).
    pub loop_times: Vec<usize>,
    /// Event of each stage `1..=T` (index 0 is stage 1).
    pub events: Vec<StageEvent>,
    /// Vertices in discovery order.
    pub discovered_order: Vec<u32>,
    /// In edge mode, whether self-loops count as edges and surplus.
    pub multigraph_accounting: bool,
}

impl ExplorationWalk {
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn component_count(&self) -> usize {
        self.tau.len()
    }
}

/// Unpaired half-edges with O(1) removal and uniform selection.
struct Pool {
    items: Vec<u32>,
    pos: Vec<u32>,
}

const GONE: u32 = u32::MAX;

impl Pool {
    fn full(total: usize) -> Self {
        Self { items: (0..total as u32).collect(), pos: (0..total as u32).collect() }
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn contains(&self, h: usize) -> bool {
        self.pos[h] != GONE
    }

    fn remove(&mut self, h: usize) {
        let i = self.pos[h] as usize;
        let last = *self.items.last().expect("non-empty pool");
        self.items[i] = last;
        self.pos[last as usize] = i as u32;
        self.items.pop();
        self.pos[h] = GONE;
    }

    fn take_uniform<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let h = self.items[rng.random_range(0..self.items.len())] as usize;
        self.remove(h);
        h
    }
}

/// Shared state of both explorations.
struct Lazy {
    offsets: Vec<usize>,
    owner: Vec<u32>,
    matching: Vec<u32>,
    pool: Pool,
}

impl Lazy {
    fn new(d: &DegreeSequence) -> Self {
        let offsets = d.offsets();
        let total = d.total() as usize;
        let mut owner = vec![0u32; total];
        for v in 0..d.n() {
            owner[offsets[v]..offsets[v + 1]].fill(v as u32);
        }
        Self { offsets, owner, matching: vec![GONE; total], pool: Pool::full(total) }
    }

    /// Pairs `h` (still in the pool) with a uniform other unpaired half-edge.
    fn pair<R: Rng + ?Sized>(&mut self, h: usize, rng: &mut R) -> usize {
        self.pool.remove(h);
        let f = self.pool.take_uniform(rng);
        self.matching[h] = f as u32;
        self.matching[f] = h as u32;
        f
    }

    fn into_graph(self, d: &DegreeSequence) -> Result<MultiGraph> {
        MultiGraph::from_matching(d, self.matching)
    }
}

/// Vertex-by-vertex depth-first exploration. Each stage discovers one vertex `w` and adds
/// `d_w - 2 - 2c` where `c` counts the cycle half-edge pairs (loops at `w` and pairings of `w`'s
/// half-edges with active half-edges) found at `w`.
///
/// Degree-zero vertices are never reached by half-edge sampling; they are discovered at the end,
/// one stage each, in increasing id order.
pub fn explore_dfs<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> Result<(ExplorationWalk, MultiGraph)> {
    if d.total() % 2 == 1 {
        return Err(Error::OddTotalDegree(d.total()));
    }
    let n = d.n();
    let mut lz = Lazy::new(d);
    let total = lz.owner.len();
    // Half-edge state: active means it sits on the stack and is still to be followed.
    let mut active = vec![false; total];
    let mut discovered = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut values = vec![0i64];
    let mut tau = Vec::new();
    let mut surplus_times = Vec::new();
    let mut loop_times = Vec::new();
    let mut events = Vec::new();
    let mut order = Vec::with_capacity(n);
    let mut s = 0i64;

    // Sleeping half-edges of undiscovered vertices are exactly the undiscovered vertices' half-edges;
    // sampling one uniformly is a uniform draw over those half-edges.
    let mut sleeping = Pool::full(total);

    loop {
        while let Some(&top) = stack.last() {
            if active[top as usize] {
                break;
            }
            stack.pop();
        }
        let (w, entry, event) = match stack.pop() {
            Some(a) => {
                let a = a as usize;
                active[a] = false;
                let b = lz.matching[a] as usize;
                (lz.owner[b] as usize, Some(b), StageEvent::New)
            }
            None => {
                if sleeping.len() == 0 {
                    break;
                }
                let a = sleeping.items[rng.random_range(0..sleeping.len())] as usize;
                (lz.owner[a] as usize, Some(a), StageEvent::Root)
            }
        };
        let stage = values.len();
        discovered[w] = true;
        order.push(w as u32);
        let range = lz.offsets[w]..lz.offsets[w + 1];
        for h in range.clone() {
            sleeping.remove(h);
        }
        // Pair every still-unpaired half-edge of w.
        for h in range.clone() {
            if lz.pool.contains(h) {
                lz.pair(h, rng);
            }
        }
        let mut c2 = 0usize;
        let mut loops = 0usize;
        let mut survivors: Vec<usize> = Vec::new();
        for h in range.clone() {
            let f = lz.matching[h] as usize;
            if event == StageEvent::New && Some(h) == entry {
                continue;
            }
            if lz.owner[f] as usize == w {
                // Each loop is seen from both half-edges; the root half-edge can be part of a loop too.
                c2 += 1;
                if h < f {
                    loops += 1;
                }
            } else if active[f] {
                active[f] = false;
                c2 += 2;
            } else {
                survivors.push(h);
            }
        }
        let c = c2 / 2;
        s += d.degrees()[w] as i64 - 2 - 2 * c as i64;
        values.push(s);
        events.push(event);
        for _ in 0..c {
            surplus_times.push(stage);
        }
        for _ in 0..loops {
            loop_times.push(stage);
        }
        // Root half-edge goes on top; other survivors below it with the lowest id nearest the top.
        let root_half = if event == StageEvent::Root { entry.filter(|e| survivors.contains(e)) } else { None };
        for &h in survivors.iter().rev() {
            if Some(h) != root_half {
                active[h] = true;
                stack.push(h as u32);
            }
        }
        if let Some(h) = root_half {
            active[h] = true;
            stack.push(h as u32);
        }
        if s == -2 * (tau.len() as i64 + 1) {
            tau.push(stage);
        }
    }
    for v in 0..n {
        if !discovered[v] {
            debug_assert_eq!(d.degrees()[v], 0);
            s -= 2;
            values.push(s);
            events.push(StageEvent::Root);
            order.push(v as u32);
            tau.push(values.len() - 1);
        }
    }
    let walk = ExplorationWalk {
        mode: WalkMode::DfsVertex,
        values,
        tau,
        surplus_times,
        loop_times,
        events,
        discovered_order: order,
        multigraph_accounting: true,
    };
    Ok((walk, lz.into_graph(d)?))
}

/// Edge-by-edge breadth-first exploration. A root stage starts a component at a vertex chosen
/// proportionally to degree and adds `d - 2`; every other stage pairs one half-edge of the exploring
/// vertex and adds `d' J - 2` where `J` marks discovery of a new vertex of degree `d'`.
///
/// With `multigraph_accounting` off, self-loop stages are still walked but are excluded from the
/// surplus tally. Degree-zero vertices are explored at the end, one root stage each.
pub fn explore_unit<R: Rng + ?Sized>(
    d: &DegreeSequence,
    rng: &mut R,
    multigraph_accounting: bool,
) -> Result<(ExplorationWalk, MultiGraph)> {
    if d.total() % 2 == 1 {
        return Err(Error::OddTotalDegree(d.total()));
    }
    let n = d.n();
    let mut lz = Lazy::new(d);
    let mut discovered = vec![false; n];
    let mut next_active = lz.offsets[..n].to_vec();
    let mut queue: std::collections::VecDeque<u32> = std::collections::VecDeque::new();
    let mut values = vec![0i64];
    let mut tau = Vec::new();
    let mut surplus_times = Vec::new();
    let mut loop_times = Vec::new();
    let mut events = Vec::new();
    let mut order = Vec::with_capacity(n);
    let mut s = 0i64;

    let mut discover = |v: usize, discovered: &mut Vec<bool>, queue: &mut std::collections::VecDeque<u32>| {
        discovered[v] = true;
        order.push(v as u32);
        queue.push_back(v as u32);
    };

    loop {
        // Skip exploring vertices with no unpaired half-edges left.
        let exploring = loop {
            match queue.front() {
                Some(&v) => {
                    let v = v as usize;
                    let end = lz.offsets[v + 1];
                    while next_active[v] < end && !lz.pool.contains(next_active[v]) {
                        next_active[v] += 1;
                    }
                    if next_active[v] < end {
                        break Some(v);
                    }
                    queue.pop_front();
                }
                None => break None,
            }
        };
        let stage = values.len();
        match exploring {
            None => {
                if lz.pool.len() == 0 {
                    break;
                }
                // A uniform unpaired half-edge picks an undiscovered vertex proportionally to degree,
                // since all half-edges of undiscovered vertices are unpaired and none of the others are.
                let h = lz.pool.items[rng.random_range(0..lz.pool.len())] as usize;
                let v = lz.owner[h] as usize;
                discover(v, &mut discovered, &mut queue);
                s += d.degrees()[v] as i64 - 2;
                events.push(StageEvent::Root);
            }
            Some(v) => {
                let e = next_active[v];
                let f = lz.pair(e, rng);
                let w = lz.owner[f] as usize;
                if !discovered[w] {
                    discover(w, &mut discovered, &mut queue);
                    s += d.degrees()[w] as i64 - 2;
                    events.push(StageEvent::New);
                } else {
                    s -= 2;
                    if w == v {
                        events.push(StageEvent::Loop);
                        loop_times.push(stage);
                        if multigraph_accounting {
                            surplus_times.push(stage);
                        }
                    } else {
                        events.push(StageEvent::Surplus);
                        surplus_times.push(stage);
                    }
                }
            }
        }
        values.push(s);
        if s == -2 * (tau.len() as i64 + 1) {
            tau.push(stage);
        }
    }
    for v in 0..n {
        if !discovered[v] {
            order.push(v as u32);
            s -= 2;
            values.push(s);
            events.push(StageEvent::Root);
            tau.push(values.len() - 1);
        }
    }
    let walk = ExplorationWalk {
        mode: WalkMode::UnitEdge,
        values,
        tau,
        surplus_times,
        loop_times,
        events,
        discovered_order: order,
        multigraph_accounting,
    };
    Ok((walk, lz.into_graph(d)?))
}

/// Per-component summary read off a walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkComponent {
    pub vertices: usize,
    pub edges: usize,
    pub surplus: usize,
}

/// Component sizes (vertex mode) or edge counts (edge mode) with surplus tallies, in exploration order.
pub fn components_from_walk(w: &ExplorationWalk) -> Result<Vec<WalkComponent>> {
    let k = w.tau.len() as i64;
    if w.values.last().copied() != Some(-2 * k) || w.tau.last().copied() != Some(w.len()) && !w.is_empty() {
        return Err(Error::IncompleteWalk(format!(
            "walk ends at {:?} after {} components",
            w.values.last(),
            k
        )));
    }
    let mut out = Vec::with_capacity(w.tau.len());
    let mut prev = 0usize;
    let (mut si, mut li) = (0usize, 0usize);
    for &t in &w.tau {
        let mut surplus = 0;
        while si < w.surplus_times.len() && w.surplus_times[si] <= t {
            surplus += 1;
            si += 1;
        }
        let mut loops = 0;
        while li < w.loop_times.len() && w.loop_times[li] <= t {
            loops += 1;
            li += 1;
        }
        let len = t - prev;
        let comp = match w.mode {
            WalkMode::DfsVertex => WalkComponent { vertices: len, edges: len - 1 + surplus, surplus },
            WalkMode::UnitEdge => {
                let edges = if w.multigraph_accounting { len - 1 } else { len - 1 - loops };
                WalkComponent { vertices: edges + 1 - surplus, edges, surplus }
            }
        };
        out.push(comp);
        prev = t;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaledPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

/// Space and time scales of the walk in each regime: `(n^(1/3), n^(2/3))` for finite third moment,
/// `(a_n, b_n)` for tau in (3,4), and `(b_n, b_n)` for tau in (2,3).
pub fn walk_scales(scal: &ScalingConstants) -> (f64, f64) {
    match scal.regime {
        TailRegime::Tau23 => (scal.b_n, scal.b_n),
        _ => (scal.a_n, scal.b_n),
    }
}

/// `t -> S(floor(b t)) / a` sampled at every integer stage, i.e. on the grid `t_i = i / b`.
pub fn rescale_walk(w: &ExplorationWalk, a: f64, b: f64) -> RescaledPath {
    let times = (0..w.values.len()).map(|i| i as f64 / b).collect();
    let values = w.values.iter().map(|&v| v as f64 / a).collect();
    RescaledPath { times, values, a, b }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeBiasedReport {
    pub runs: usize,
    /// Empirical frequency of each vertex being discovered first.
    pub first_frequencies: Vec<f64>,
    /// `d_j / l_n`.
    pub expected: Vec<f64>,
    pub chi_square: f64,
    pub p_value: f64,
    /// Mean degree of the i-th discovered vertex, for i < steps.
    pub mean_degree_by_step: Vec<f64>,
}

/// Checks that depth-first exploration discovers vertices in size-biased order.
pub fn size_biased_check<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R, steps: usize, runs: usize) -> Result<SizeBiasedReport> {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let n = d.n();
    if steps > n || runs == 0 || d.total() == 0 {
        return Err(crate::error::invalid("need steps <= n, runs >= 1 and positive total degree"));
    }
    let mut first = vec![0usize; n];
    let mut deg_sum = vec![0.0; steps];
    for _ in 0..runs {
        let (w, _) = explore_dfs(d, rng)?;
        first[w.discovered_order[0] as usize] += 1;
        for (i, &v) in w.discovered_order.iter().take(steps).enumerate() {
            deg_sum[i] += d.degrees()[v as usize] as f64;
        }
    }
    let l = d.total() as f64;
    let expected: Vec<f64> = d.degrees().iter().map(|&x| x as f64 / l).collect();
    let (mut chi, mut cells) = (0.0, 0usize);
    for v in 0..n {
        let e = expected[v] * runs as f64;
        if e > 0.0 {
            chi += (first[v] as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    let p_value = if cells > 1 { 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(chi) } else { 1.0 };
    Ok(SizeBiasedReport {
        runs,
        first_frequencies: first.iter().map(|&c| c as f64 / runs as f64).collect(),
        expected,
        chi_square: chi,
        p_value,
        mean_degree_by_step: deg_sum.iter().map(|s| s / runs as f64).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::rng_from_seed;
    use proptest::prelude::*;

    fn ds(v: &[u32]) -> DegreeSequence {
        DegreeSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn dfs_traces() {
        let mut rng = rng_from_seed(1);
        // Rooting at the centre happens with probability 1/2; both roots give valid traces.
        let mut centre = false;
        // The multigraph may instead be a loop at the centre plus an edge; traces below assume the path.
        for _ in 0..100 {
            let (w, g) = explore_dfs(&ds(&[1, 2, 1]), &mut rng).unwrap();
            if !g.is_simple() {
                assert_eq!(w.tau.len(), 2);
                continue;
            }
            if w.discovered_order[0] == 1 {
                assert_eq!(w.values, vec![0, 0, -1, -2]);
                centre = true;
            } else {
                assert_eq!(w.values, vec![0, -1, -1, -2]);
            }
            assert_eq!(w.tau, vec![3]);
        }
        assert!(centre);
        let (w, _) = explore_dfs(&ds(&[1, 1]), &mut rng).unwrap();
        assert_eq!(w.values, vec![0, -1, -2]);
        assert_eq!(w.tau, vec![2]);
        let (w, _) = explore_dfs(&ds(&[1, 1, 1, 1]), &mut rng).unwrap();
        let c = components_from_walk(&w).unwrap();
        assert_eq!(c.iter().map(|x| x.vertices).collect::<Vec<_>>(), vec![2, 2]);
        let (w, _) = explore_dfs(&ds(&[0, 0, 0]), &mut rng).unwrap();
        assert_eq!(w.values, vec![0, -2, -4, -6]);
        assert_eq!(components_from_walk(&w).unwrap().iter().map(|x| x.vertices).collect::<Vec<_>>(), vec![1, 1, 1]);
    }

    #[test]
    fn unit_traces() {
        let mut rng = rng_from_seed(2);
        let mut centre = false;
        for _ in 0..100 {
            let (w, g) = explore_unit(&ds(&[1, 2, 1]), &mut rng, true).unwrap();
            if !g.is_simple() {
                continue;
            }
            if w.discovered_order[0] == 1 {
                assert_eq!(w.values, vec![0, 0, -1, -2]);
                centre = true;
            }
            assert_eq!(w.tau, vec![3]);
            assert_eq!(components_from_walk(&w).unwrap()[0].edges, 2);
        }
        assert!(centre);
        // Triangle: the only simple realization, so condition on no loops or double edges.
        let mut seen = false;
        for _ in 0..200 {
            let (w, g) = explore_unit(&ds(&[2, 2, 2]), &mut rng, true).unwrap();
            if g.is_simple() {
                assert_eq!(w.values, vec![0, 0, 0, 0, -2]);
                assert_eq!(w.tau, vec![4]);
                assert_eq!(w.surplus_times.len(), 1);
                let c = components_from_walk(&w).unwrap();
                assert_eq!(c, vec![WalkComponent { vertices: 3, edges: 3, surplus: 1 }]);
                seen = true;
            }
        }
        assert!(seen);
    }

    #[test]
    fn incomplete_walk_rejected() {
        let mut rng = rng_from_seed(3);
        let (mut w, _) = explore_dfs(&ds(&[1, 1, 2]), &mut rng).unwrap();
        w.values.pop();
        w.tau.clear();
        assert!(matches!(components_from_walk(&w), Err(Error::IncompleteWalk(_))));
    }

    #[test]
    fn dfs_byproduct_matching_uniform() {
        let d = ds(&[2, 1, 1]);
        let mut rng = rng_from_seed(4);
        let runs = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..runs {
            let (_, g) = explore_dfs(&d, &mut rng).unwrap();
            counts[g.partner(0)] += 1;
        }
        let se = (runs as f64 * 2.0 / 9.0).sqrt();
        for &c in &counts[1..] {
            assert!((c as f64 - runs as f64 / 3.0).abs() < 4.0 * se, "{counts:?}");
        }
        let mut counts = [0usize; 4];
        for _ in 0..runs {
            let (_, g) = explore_unit(&d, &mut rng, true).unwrap();
            counts[g.partner(0)] += 1;
        }
        for &c in &counts[1..] {
            assert!((c as f64 - runs as f64 / 3.0).abs() < 4.0 * se, "{counts:?}");
        }
    }

    /// Components by union-find on the byproduct graph, keyed by their minimum vertex.
    fn uf_components(g: &MultiGraph) -> Vec<(usize, usize, usize)> {
        let n = g.n();
        let mut p: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (u, v) in g.edges() {
            let (a, b) = (find(&mut p, u), find(&mut p, v));
            p[a] = b;
        }
        let mut size = vec![0usize; n];
        let mut edges = vec![0usize; n];
        for v in 0..n {
            let r = find(&mut p, v);
            size[r] += 1;
        }
        for (u, _) in g.edges() {
            let r = find(&mut p, u);
            edges[r] += 1;
        }
        let mut out: Vec<(usize, usize, usize)> = (0..n)
            .filter(|&v| size[v] > 0)
            .map(|v| (size[v], edges[v], edges[v] + 1 - size[v]))
            .collect();
        out.sort_unstable();
        out
    }

    fn walk_components(w: &ExplorationWalk) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<_> = components_from_walk(w).unwrap().iter().map(|c| (c.vertices, c.edges, c.surplus)).collect();
        out.sort_unstable();
        out
    }

    #[test]
    fn walks_agree_with_union_find() {
        let mut rng = rng_from_seed(5);
        for _ in 0..1000 {
            let n = rng.random_range(1..=100);
            let raw: Vec<u32> = (0..n).map(|_| rng.random_range(0..5)).collect();
            let d = DegreeSequence::with_parity_fix(raw);
            let (w, g) = explore_dfs(&d, &mut rng).unwrap();
            assert_eq!(walk_components(&w), uf_components(&g));
            assert_eq!(w.len(), n);
            let (w, g) = explore_unit(&d, &mut rng, true).unwrap();
            assert_eq!(walk_components(&w), uf_components(&g));
            let total_edges: usize = components_from_walk(&w).unwrap().iter().map(|c| c.edges).sum();
            assert_eq!(total_edges as u64, d.total() / 2);
        }
    }

    #[test]
    fn simple_accounting_excludes_loops() {
        let mut rng = rng_from_seed(6);
        for _ in 0..200 {
            let d = ds(&[4, 2, 2]);
            let (w, g) = explore_unit(&d, &mut rng, false).unwrap();
            let c = components_from_walk(&w).unwrap();
            let loops = g.self_loop_count();
            let edges: usize = c.iter().map(|x| x.edges).sum();
            assert_eq!(edges + loops, 4);
            let verts: usize = c.iter().map(|x| x.vertices).sum();
            assert_eq!(verts, 3);
        }
    }

    #[test]
    fn rescaling() {
        let mut rng = rng_from_seed(7);
        let (w, _) = explore_dfs(&ds(&[3, 1, 1, 1]), &mut rng).unwrap();
        let r = rescale_walk(&w, 1.0, 1.0);
        assert_eq!(r.values, w.values.iter().map(|&v| v as f64).collect::<Vec<_>>());
        let g = ScalingConstants::finite_third_moment(1000);
        let (a, b) = walk_scales(&g);
        assert!((a - 10.0).abs() < 1e-9 && (b - 100.0).abs() < 1e-9);
        let t = crate::degrees::scaling_constants(2.5, 1_000_000, None).unwrap();
        let (a, b) = walk_scales(&t);
        assert!((a - 100.0).abs() < 1e-9 && (b - 100.0).abs() < 1e-9);
    }

    #[test]
    fn size_biased_first_vertex() {
        let mut rng = rng_from_seed(8);
        let r = size_biased_check(&ds(&[3, 1]), &mut rng, 1, 40_000).unwrap();
        assert!((r.first_frequencies[0] - 0.75).abs() < 4.0 * (0.1875f64 / 40_000.0).sqrt());
        let r = size_biased_check(&ds(&[4, 2, 1, 1]), &mut rng, 2, 100_000).unwrap();
        assert!(r.p_value > 1e-3, "{r:?}");
        let r = size_biased_check(&ds(&[2, 2, 2, 2]), &mut rng, 1, 40_000).unwrap();
        for f in r.first_frequencies {
            assert!((f - 0.25).abs() < 0.01);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn walk_invariants(raw in proptest::collection::vec(0u32..6, 1..60), seed in any::<u64>()) {
            let d = DegreeSequence::with_parity_fix(raw);
            let mut rng = rng_from_seed(seed);
            let (w, g) = explore_dfs(&d, &mut rng).unwrap();
            prop_assert_eq!(w.values[0], 0);
            prop_assert!(w.tau.windows(2).all(|p| p[0] < p[1]));
            let sizes: usize = components_from_walk(&w).unwrap().iter().map(|c| c.vertices).sum();
            prop_assert_eq!(sizes, d.n());
            prop_assert_eq!(g.degree_sequence(), d.clone());
            for (k, &t) in w.tau.iter().enumerate() {
                prop_assert_eq!(w.values[t], -2 * (k as i64 + 1));
                prop_assert!(w.values[..t].iter().all(|&v| v > -2 * (k as i64 + 1)));
            }
            let (u, _) = explore_unit(&d, &mut rng, true).unwrap();
            for p in u.values.windows(2) {
                prop_assert!(p[1] - p[0] >= -2);
            }
        }
    }
}
