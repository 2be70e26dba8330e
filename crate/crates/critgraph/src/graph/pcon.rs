//! Connected graphs with the law proportional to `prod_E q_ij prod_nonE (1 - q_ij)`,
//! `q_ij = 1 - exp(-a p_i p_j)`, built from a tilted p-tree plus Poisson surplus edges.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Poisson;

use super::ptree::{ptree_tilted, TiltSampler, TiltState};
use super::SimpleGraph;
use crate::error::{invalid, Result};

#[derive(Clone, Debug)]
pub struct PconSample {
    pub graph: SimpleGraph,
    pub state: TiltState,
    /// Number of Poisson surplus proposals before duplicates were removed.
    pub proposals: usize,
}

pub fn pcon_graph<R: Rng + ?Sized>(p: &[f64], a: f64, rng: &mut R, sampler: TiltSampler) -> Result<PconSample> {
    let tilted = ptree_tilted(p, a, rng, sampler)?;
    pcon_graph_from_state(tilted.state, p, rng)
}

/// Adds surplus edges to an already drawn tilted tree.
pub fn pcon_graph_from_state<R: Rng + ?Sized>(
    mut state: TiltState,
    p: &[f64],
    rng: &mut R,
) -> Result<PconSample> {
    let m = state.tree.m();
    if p.len() != m {
        return Err(invalid("probability vector length differs from tree size"));
    }
    let proposals = if state.lambda > 0.0 {
        Poisson::new(state.lambda).map_err(|e| invalid(e.to_string()))?.sample(rng) as usize
    } else {
        0
    };
    let mut surplus: Vec<(usize, usize)> = Vec::with_capacity(proposals);
    if proposals > 0 {
        let first_w: Vec<f64> = (0..m).map(|v| p[v] * state.permitted_mass[v]).collect();
        let first = WeightedIndex::new(&first_w).map_err(|e| invalid(e.to_string()))?;
        for _ in 0..proposals {
            let v = first.sample(rng);
            // The height a*A(v) is split into pieces of length a*p_u over the permitted set in ascending id order.
            let set = state.permitted_set(v);
            let mut t = rng.random::<f64>() * state.permitted_mass[v];
            let mut u = *set.last().expect("positive permitted mass");
            for &c in &set {
                if t < p[c] {
                    u = c;
                    break;
                }
                t -= p[c];
            }
            surplus.push((v.min(u), v.max(u)));
        }
        surplus.sort_unstable();
        surplus.dedup();
    }
    let mut edges: Vec<(usize, usize)> = state.tree.edges();
    edges.extend_from_slice(&surplus);
    let graph = SimpleGraph::new(m, &edges)?;
    state.surplus_endpoints = surplus;
    Ok(PconSample { graph, state, proposals })
}
