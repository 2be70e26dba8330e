use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SimpleGraph;
use crate::degrees::WeightSequence;
use crate::error::{invalid, Result};

/// Rank-one connection kernels. With `x = w_i w_j / l_n`:
/// GRG `x/(1+x)`, Chung-Lu `min(x, 1)`, Norros-Reittu `1 - e^-x`, and `NrQ(q)` `1 - e^(-q w_i w_j)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    Grg,
    ChungLu,
    NorrosReittu,
    NrQ(f64),
}

impl Kernel {
    /// Edge probability for weights `wi`, `wj` with total weight `total`.
    pub fn prob(&self, wi: f64, wj: f64, total: f64) -> f64 {
        match *self {
            Kernel::Grg => {
                let x = wi * wj;
                if x == 0.0 {
                    0.0
                } else {
                    x / (total + x)
                }
            }
            Kernel::ChungLu => (wi * wj / total).min(1.0),
            Kernel::NorrosReittu => -(-wi * wj / total).exp_m1(),
            Kernel::NrQ(q) => -(-q * wi * wj).exp_m1(),
        }
    }
}

/// Independent-edge graph with the given kernel.
pub fn inhomogeneous_graph<R: Rng + ?Sized>(w: &WeightSequence, kernel: Kernel, rng: &mut R) -> Result<SimpleGraph> {
    inhomogeneous_graph_thinned(w, kernel, 1.0, rng)
}

/// Independent-edge graph where each kernel edge is additionally retained with probability `retain`.
/// Runs in expected `O(n + edges)` time by geometric skipping over weight-sorted vertices.
pub fn inhomogeneous_graph_thinned<R: Rng + ?Sized>(
    w: &WeightSequence,
    kernel: Kernel,
    retain: f64,
    rng: &mut R,
) -> Result<SimpleGraph> {
    if !(0.0..=1.0).contains(&retain) {
        return Err(invalid("retention probability must lie in [0,1]"));
    }
    if let Kernel::NrQ(q) = kernel {
        if !(q >= 0.0) {
            return Err(invalid("q must be non-negative"));
        }
    }
    let n = w.n();
    let total = w.total();
    if n < 2 || retain == 0.0 || total == 0.0 {
        return Ok(SimpleGraph::empty(n));
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    let ws = w.weights();
    order.sort_by(|&a, &b| ws[b as usize].total_cmp(&ws[a as usize]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&v| ws[v as usize]).collect();
    let p = |i: usize, j: usize| retain * kernel.prob(sorted[i], sorted[j], total);

    let mut edges = Vec::new();
    for i in 0..n - 1 {
        let mut j = i + 1;
        let mut q = p(i, j);
        while j < n && q > 0.0 {
            if q < 1.0 {
                let u: f64 = rng.random();
                // Number of failures before the next success of a Bernoulli(q) sequence.
                let skip = ((1.0 - u).ln() / (-q).ln_1p()).floor();
                if skip >= (n - j) as f64 {
                    break;
                }
                j += skip as usize;
            }
            let pj = p(i, j);
            if rng.random::<f64>() * q < pj {
                let (a, b) = (order[i], order[j]);
                edges.push((a.min(b), a.max(b)));
            }
            q = pj;
            j += 1;
        }
    }
    edges.sort_unstable();
    Ok(SimpleGraph::from_sorted_unchecked(n, edges))
}
