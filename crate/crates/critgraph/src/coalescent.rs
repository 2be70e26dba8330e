//! Multiplicative coalescents, the dynamic half-edge construction of the configuration
//! model, its kept-alive modification and the window-to-time map.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::components::{component_labels, order_u0, UnionFind, UVector};
use crate::degrees::{DegreeSequence, WeightSequence};
use crate::error::{invalid, Result};
use crate::graph::{inhomogeneous_graph, Kernel, MultiGraph};

/// Prefix sums over non-negative weights with point updates.
#[derive(Clone, Debug)]
struct Fenwick {
    tree: Vec<f64>,
    leaf: Vec<f64>,
}

impl Fenwick {
    fn new(w: &[f64]) -> Self {
        let mut f = Self { tree: vec![0.0; w.len() + 1], leaf: vec![0.0; w.len()] };
        for (i, &x) in w.iter().enumerate() {
            f.set(i, x);
        }
        f
    }

    fn set(&mut self, i: usize, x: f64) {
        let delta = x - self.leaf[i];
        self.leaf[i] = x;
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    fn total(&self) -> f64 {
        let mut s = 0.0;
        let mut k = self.tree.len() - 1;
        while k > 0 {
            s += self.tree[k];
            k &= k - 1;
        }
        s
    }

    /// Index `i` with prefix(i) <= u < prefix(i+1), restricted to positive leaves.
    fn find(&self, mut u: f64) -> usize {
        let n = self.leaf.len();
        let mut pos = 0usize;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= u {
                u -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        // Rounding can land on a zero leaf or past the end; walk back to a positive one.
        let mut i = pos.min(n - 1);
        while self.leaf[i] <= 0.0 && i > 0 {
            i -= 1;
        }
        while self.leaf[i] <= 0.0 && i + 1 < n {
            i += 1;
        }
        i
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.find(rng.random::<f64>() * self.total())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Merge,
    Surplus,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Merge => "merge",
            EventKind::Surplus => "surplus",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoalEvent {
    pub time: f64,
    pub kind: EventKind,
    /// Surviving particle index (for merges, `j` is absorbed into `i`).
    pub i: usize,
    pub j: usize,
}

/// Event log of a (possibly augmented) multiplicative coalescent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McTrajectory {
    pub x0: Vec<f64>,
    pub y0: Vec<u64>,
    pub horizon: f64,
    pub events: Vec<CoalEvent>,
}

impl McTrajectory {
    /// Particle masses and attributes after all events up to time `t`, in particle order
    /// (absorbed particles removed).
    pub fn state_at(&self, t: f64) -> (Vec<f64>, Vec<u64>) {
        let mut x = self.x0.clone();
        let mut y = self.y0.clone();
        let mut alive = vec![true; x.len()];
        for e in self.events.iter().take_while(|e| e.time <= t) {
            match e.kind {
                EventKind::Merge => {
                    x[e.i] += x[e.j];
                    y[e.i] += y[e.j];
                    alive[e.j] = false;
                }
                EventKind::Surplus => y[e.i] += 1,
            }
        }
        (keep_alive(x, &alive), keep_alive(y, &alive))
    }

    /// Masses at time `t`, non-increasing.
    pub fn masses_at(&self, t: f64) -> Vec<f64> {
        let mut m = self.state_at(t).0;
        m.sort_by(|a, b| b.total_cmp(a));
        m
    }

    pub fn final_masses(&self) -> Vec<f64> {
        self.masses_at(f64::INFINITY)
    }

    pub fn uvector_at(&self, t: f64) -> UVector {
        let (x, y) = self.state_at(t);
        order_u0(&x.into_iter().zip(y).collect::<Vec<_>>()).expect("positive masses")
    }
}

fn keep_alive<T>(v: Vec<T>, alive: &[bool]) -> Vec<T> {
    v.into_iter().zip(alive).filter(|(_, &a)| a).map(|(m, _)| m).collect()
}

/// Exact event-driven simulation: particles `i, j` merge at rate `k1 x_i x_j` and each particle
/// gains one surplus unit at rate `k2 x_i^2`.
pub fn simulate_amc<R: Rng + ?Sized>(x0: &[f64], y0: &[u64], k1: f64, k2: f64, t_max: f64, rng: &mut R) -> Result<McTrajectory> {
    if x0.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(invalid("masses must be positive and finite"));
    }
    if y0.len() != x0.len() {
        return Err(invalid("attribute vector length differs from mass vector"));
    }
    if !(k1 >= 0.0 && k2 >= 0.0 && k1.is_finite() && k2.is_finite()) {
        return Err(invalid("rates must be non-negative"));
    }
    if !(t_max >= 0.0) {
        return Err(invalid("horizon must be non-negative"));
    }
    let mut x = x0.to_vec();
    let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    let mut lin = if x.is_empty() { None } else { Some(Fenwick::new(&x)) };
    let mut quad = if x.is_empty() { None } else { Some(Fenwick::new(&sq)) };
    let total_mass: f64 = x.iter().sum();
    let mut sum_sq: f64 = sq.iter().sum();
    let mut alive = x.len();
    let mut t = 0.0;
    let mut events = Vec::new();
    while alive > 0 {
        let merge_rate = if alive > 1 { k1 * ((total_mass * total_mass - sum_sq) / 2.0).max(0.0) } else { 0.0 };
        let self_rate = k2 * sum_sq;
        let rate = merge_rate + self_rate;
        if rate <= 0.0 {
            break;
        }
        let e: f64 = Exp1.sample(rng);
        t += e / rate;
        if t > t_max {
            break;
        }
        let (lin, quad) = (lin.as_mut().unwrap(), quad.as_mut().unwrap());
        if rng.random::<f64>() * rate < self_rate {
            let i = quad.sample(rng);
            events.push(CoalEvent { time: t, kind: EventKind::Surplus, i, j: i });
            continue;
        }
        let (i, j) = loop {
            let i = lin.sample(rng);
            let j = lin.sample(rng);
            if i != j {
                break (i.min(j), i.max(j));
            }
        };
        sum_sq += 2.0 * x[i] * x[j];
        x[i] += x[j];
        x[j] = 0.0;
        lin.set(i, x[i]);
        lin.set(j, 0.0);
        quad.set(i, x[i] * x[i]);
        quad.set(j, 0.0);
        alive -= 1;
        events.push(CoalEvent { time: t, kind: EventKind::Merge, i, j });
    }
    Ok(McTrajectory { x0: x0.to_vec(), y0: y0.to_vec(), horizon: t_max, events })
}

pub fn simulate_mc<R: Rng + ?Sized>(x0: &[f64], k1: f64, t_max: f64, rng: &mut R) -> Result<McTrajectory> {
    simulate_amc(x0, &vec![0; x0.len()], k1, 0.0, t_max, rng)
}

const UNPAIRED: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynEvent {
    pub time: f64,
    pub kind: EventKind,
    pub u: usize,
    pub v: usize,
    /// Open half-edges remaining after the event.
    pub s1: u64,
}

/// The graph under construction: every unpaired half-edge rings at rate one and pairs with a
/// uniformly chosen other unpaired half-edge.
#[derive(Clone, Debug)]
pub struct DynState {
    pub time: f64,
    owner: Vec<u32>,
    matching: Vec<u32>,
    pool: Vec<u32>,
    pool_pos: Vec<u32>,
    comps: UnionFind,
    open: Vec<u64>,
}

impl DynState {
    pub fn new(d: &DegreeSequence) -> Self {
        let offsets = d.offsets();
        let total = *offsets.last().unwrap();
        let mut owner = vec![0u32; total];
        for v in 0..d.n() {
            for h in offsets[v]..offsets[v + 1] {
                owner[h] = v as u32;
            }
        }
        Self {
            time: 0.0,
            owner,
            matching: vec![UNPAIRED; total],
            pool: (0..total as u32).collect(),
            pool_pos: (0..total as u32).collect(),
            comps: UnionFind::new(d.n()),
            open: d.degrees().iter().map(|&x| x as u64).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.open.len()
    }

    pub fn s1(&self) -> u64 {
        self.pool.len() as u64
    }

    pub fn open_half_edges(&self) -> &[u32] {
        &self.pool
    }

    pub fn owner(&self, h: usize) -> usize {
        self.owner[h] as usize
    }

    pub fn component_of(&mut self, v: usize) -> usize {
        self.comps.find(v)
    }

    /// Open half-edge count of every component, keyed by its representative vertex.
    pub fn open_masses(&mut self) -> BTreeMap<usize, u64> {
        let mut m = BTreeMap::new();
        for v in 0..self.n() {
            let r = self.comps.find(v);
            m.entry(r).or_insert(self.open[r]);
        }
        m
    }

    fn take(&mut self, idx: usize) -> u32 {
        let h = self.pool.swap_remove(idx);
        if idx < self.pool.len() {
            self.pool_pos[self.pool[idx] as usize] = idx as u32;
        }
        h
    }

    /// Advances to the next pairing if it happens by `t_max`.
    pub fn step<R: Rng + ?Sized>(&mut self, t_max: f64, rng: &mut R) -> Option<DynEvent> {
        let s1 = self.pool.len();
        if s1 < 2 {
            return None;
        }
        let e: f64 = Exp1.sample(rng);
        let t = self.time + e / s1 as f64;
        if t > t_max {
            self.time = t_max;
            return None;
        }
        self.time = t;
        let h = self.take(rng.random_range(0..s1));
        let g = self.take(rng.random_range(0..s1 - 1));
        self.matching[h as usize] = g;
        self.matching[g as usize] = h;
        let (u, v) = (self.owner[h as usize] as usize, self.owner[g as usize] as usize);
        let (ru, rv) = (self.comps.find(u), self.comps.find(v));
        let kind = if ru == rv {
            self.open[ru] -= 2;
            EventKind::Surplus
        } else {
            let o = self.open[ru] + self.open[rv] - 2;
            self.comps.union(ru, rv);
            let r = self.comps.find(ru);
            self.open[r] = o;
            EventKind::Merge
        };
        Some(DynEvent { time: t, kind, u, v, s1: self.pool.len() as u64 })
    }

    /// Edges paired so far, as a multigraph on all vertices.
    pub fn graph(&self) -> MultiGraph {
        let edges: Vec<(usize, usize)> = (0..self.matching.len())
            .filter(|&h| self.matching[h] != UNPAIRED && (h as u32) < self.matching[h])
            .map(|h| (self.owner[h] as usize, self.owner[self.matching[h] as usize] as usize))
            .collect();
        MultiGraph::from_edges(self.n(), &edges).expect("edge endpoints are in range")
    }

    /// The full matching once every half-edge is paired.
    pub fn matching(&self) -> Option<&[u32]> {
        self.pool.is_empty().then_some(&self.matching[..])
    }
}

#[derive(Clone, Debug)]
pub struct DynRun {
    pub ell: u64,
    pub events: Vec<DynEvent>,
    pub state: DynState,
}

impl DynRun {
    /// Open half-edge count just after time `t`.
    pub fn s1_at(&self, t: f64) -> u64 {
        self.events.iter().take_while(|e| e.time <= t).last().map_or(self.ell, |e| e.s1)
    }
}

/// Runs the construction up to `t_max` (use infinity to exhaust all half-edges).
pub fn dynamic_construction<R: Rng + ?Sized>(d: &DegreeSequence, t_max: f64, rng: &mut R) -> DynRun {
    let mut state = DynState::new(d);
    let mut events = Vec::new();
    while let Some(e) = state.step(t_max, rng) {
        events.push(e);
    }
    DynRun { ell: d.total(), events, state }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModEvent {
    pub time: f64,
    pub kind: EventKind,
    pub h: usize,
    pub g: usize,
    /// True when a half-edge was already used by an earlier pairing after the start time.
    pub bad: bool,
}

/// The kept-alive process from a frozen start state, together with the coupled lower graph
/// formed by its good edges.
#[derive(Clone, Debug)]
pub struct ModifiedRun {
    pub t_start: f64,
    pub s1_start: u64,
    pub events: Vec<ModEvent>,
    start_graph: MultiGraph,
    owner: Vec<u32>,
    start_masses: BTreeMap<usize, u64>,
}

impl ModifiedRun {
    pub fn bad_count_at(&self, t: f64) -> usize {
        self.events.iter().take_while(|e| e.time <= t).filter(|e| e.bad).count()
    }

    pub fn first_merge_time(&self) -> Option<f64> {
        self.events.iter().find(|e| e.kind == EventKind::Merge).map(|e| e.time)
    }

    fn edges_at(&self, t: f64, good_only: bool) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self.start_graph.edges().collect();
        e.extend(
            self.events
                .iter()
                .take_while(|ev| ev.time <= t)
                .filter(|ev| !(good_only && ev.bad))
                .map(|ev| (self.owner[ev.h] as usize, self.owner[ev.g] as usize)),
        );
        e
    }

    /// Kept-alive graph at time `t`.
    pub fn upper_graph(&self, t: f64) -> MultiGraph {
        MultiGraph::from_edges(self.start_graph.n(), &self.edges_at(t, false)).expect("valid edges")
    }

    /// Coupled lower graph at time `t` (start graph plus good edges).
    pub fn lower_graph(&self, t: f64) -> MultiGraph {
        MultiGraph::from_edges(self.start_graph.n(), &self.edges_at(t, true)).expect("valid edges")
    }

    /// Frozen open masses of the kept-alive components at time `t`, non-increasing.
    pub fn open_masses_at(&self, t: f64) -> Vec<u64> {
        let n = self.start_graph.n();
        let mut uf = UnionFind::new(n);
        for (u, v) in self.edges_at(t, false) {
            uf.union(u, v);
        }
        let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
        for (&r, &m) in &self.start_masses {
            *acc.entry(uf.find(r)).or_default() += m;
        }
        let mut out: Vec<u64> = acc.into_values().filter(|&m| m > 0).collect();
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }
}

/// Kept-alive dynamics started from `state`: every half-edge open at the start rings at rate one
/// forever and pairs with a uniform other member of that frozen set. Components with open masses
/// `O_i, O_j` merge at rate `2 O_i O_j / (s1 - 1)`. An edge is good when both half-edges are still
/// unused; good edges alone form the coupled lower graph, so inclusion holds by construction.
pub fn modified_from_state<R: Rng + ?Sized>(state: &DynState, t_max: f64, rng: &mut R) -> Result<ModifiedRun> {
    let mut state = state.clone();
    let frozen: Vec<u32> = state.pool.clone();
    let s = frozen.len();
    if s < 2 {
        return Err(invalid("kept-alive dynamics need at least two open half-edges"));
    }
    let start_masses = state.open_masses();
    let mut uf = state.comps.clone();
    let mut used = vec![false; state.matching.len()];
    let mut t = state.time;
    let t_start = t;
    let mut events = Vec::new();
    loop {
        let e: f64 = Exp1.sample(rng);
        t += e / s as f64;
        if t > t_max {
            break;
        }
        let a = rng.random_range(0..s);
        let mut b = rng.random_range(0..s - 1);
        if b >= a {
            b += 1;
        }
        let (h, g) = (frozen[a] as usize, frozen[b] as usize);
        let bad = used[h] || used[g];
        if !bad {
            used[h] = true;
            used[g] = true;
        }
        let kind = if uf.union(state.owner[h] as usize, state.owner[g] as usize) { EventKind::Merge } else { EventKind::Surplus };
        events.push(ModEvent { time: t, kind, h, g, bad });
    }
    Ok(ModifiedRun { t_start, s1_start: s as u64, events, start_graph: state.graph(), owner: state.owner.clone(), start_masses })
}

/// Runs the dynamic construction to `t_start`, then the kept-alive dynamics to `t_max`.
pub fn modified_process<R: Rng + ?Sized>(d: &DegreeSequence, t_start: f64, t_max: f64, rng: &mut R) -> Result<ModifiedRun> {
    if t_max < t_start {
        return Err(invalid("t_max must be at least t_start"));
    }
    let run = dynamic_construction(d, t_start, rng);
    modified_from_state(&run.state, t_max, rng)
}

/// `t_n(lambda) = log(nu/(nu-1))/2 + lambda/(2 (nu-1) c_n)`.
pub fn time_map(nu_n: f64, c_n: f64, lambda: f64) -> Result<f64> {
    if !(nu_n > 1.0) {
        return Err(invalid("time map needs nu_n > 1"));
    }
    if !(c_n > 0.0) {
        return Err(invalid("c_n must be positive"));
    }
    Ok(0.5 * (nu_n / (nu_n - 1.0)).ln() + lambda / (2.0 * (nu_n - 1.0) * c_n))
}

/// Canonical key for an ordered mass vector (rounded so that summation order does not matter).
fn mass_key(m: &[f64]) -> Vec<i64> {
    let mut k: Vec<i64> = m.iter().map(|x| (x * 1e9).round() as i64).collect();
    k.sort_unstable_by(|a, b| b.cmp(a));
    k
}

fn empirical(keys: impl Iterator<Item = Vec<i64>>) -> (BTreeMap<Vec<i64>, usize>, usize) {
    let mut m = BTreeMap::new();
    let mut n = 0;
    for k in keys {
        *m.entry(k).or_insert(0) += 1;
        n += 1;
    }
    (m, n)
}

/// Total variation between two empirical laws on a countable space.
pub fn empirical_tv<K: Ord + Clone>(a: &BTreeMap<K, usize>, na: usize, b: &BTreeMap<K, usize>, nb: usize) -> f64 {
    let mut keys: Vec<&K> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| {
            let pa = *a.get(k).unwrap_or(&0) as f64 / na as f64;
            let pb = *b.get(k).unwrap_or(&0) as f64 / nb as f64;
            (pa - pb).abs()
        })
        .sum::<f64>()
}

/// Empirical TV between the masses of the coalescent at time `t` from `x` and the component
/// masses of the graph joining `i, j` independently with probability `1 - exp(-t x_i x_j)`.
pub fn nr_mc_coupling_check<R: Rng + ?Sized>(x: &[f64], t: f64, rng: &mut R, n_samples: usize) -> Result<f64> {
    if n_samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let w = WeightSequence::new(x.to_vec())?;
    let mut mc = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        mc.push(mass_key(&simulate_mc(x, 1.0, t, rng)?.final_masses()));
    }
    let mut nr = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let g = inhomogeneous_graph(&w, Kernel::NrQ(t), rng)?;
        let (label, count) = component_labels(&g);
        let mut masses = vec![0.0; count];
        for (v, &l) in label.iter().enumerate() {
            masses[l as usize] += x[v];
        }
        nr.push(mass_key(&masses));
    }
    let (a, na) = empirical(mc.into_iter());
    let (b, nb) = empirical(nr.into_iter());
    Ok(empirical_tv(&a, na, &b, nb))
}
