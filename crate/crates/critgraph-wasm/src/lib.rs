//! Browser bindings. Each export returns a JSON string so the page needs no extra glue.

use critgraph::components::{decompose_with, DecomposeOptions, DiameterPolicy};
use critgraph::degrees::{build_power_law_degrees, scaling_constants, DegreeSequence, ScalingConstants};
use critgraph::exploration::{components_from_walk, explore_dfs, explore_unit};
use critgraph::limits::{excursions, marks, simulate_bm_parabolic, MarkRate};
use critgraph::percolation::{critical_p, fountoulakis_percolate, PercolationSpec, Regime};
use critgraph::seeds::rng_from_seed;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest graph the page may request; keeps a single call well under a second.
const MAX_N: usize = 200_000;
const MAX_POINTS: usize = 4_000;

fn degrees(tau: f64, n: usize, cf: f64) -> Result<DegreeSequence, String> {
    if n == 0 || n > MAX_N {
        return Err(format!("n must be between 1 and {MAX_N}"));
    }
    build_power_law_degrees(tau, n, cf, 0.0).map_err(|e| e.to_string())
}

/// Every `k`-th point so plots stay light.
fn thin<T: Copy>(v: &[T]) -> (usize, Vec<T>) {
    let k = v.len().div_ceil(MAX_POINTS).max(1);
    (k, v.iter().step_by(k).copied().collect())
}

pub fn explore_walk_json(tau: f64, n: usize, cf: f64, unit_edge: bool, seed: u32) -> Result<String, String> {
    let d = degrees(tau, n, cf)?;
    let mut rng = rng_from_seed(seed as u64);
    let (walk, _) = if unit_edge { explore_unit(&d, &mut rng, true) } else { explore_dfs(&d, &mut rng) }.map_err(|e| e.to_string())?;
    let mut comps = components_from_walk(&walk).map_err(|e| e.to_string())?;
    comps.sort_by(|a, b| b.vertices.cmp(&a.vertices));
    let (stride, values) = thin(&walk.values);
    Ok(json!({
        "stride": stride,
        "values": values,
        "steps": walk.len(),
        "components": walk.component_count(),
        "surplus": walk.surplus_times.len(),
        "largest": comps.iter().take(10).map(|c| [c.vertices, c.edges, c.surplus]).collect::<Vec<_>>(),
    })
    .to_string())
}

pub fn parabolic_path_json(mu: f64, eta: f64, lambda: f64, t_max: f64, dt: f64, seed: u32) -> Result<String, String> {
    if t_max / dt > 1e6 {
        return Err("at most 10^6 grid steps".into());
    }
    let mut rng = rng_from_seed(seed as u64);
    let path = simulate_bm_parabolic(mu, eta, lambda, t_max, dt, &mut rng).map_err(|e| e.to_string())?;
    let ex = marks(&excursions(&path), MarkRate::BetaOverMu { mu }, &mut rng).into_ordered();
    let (stride, values) = thin(&path.values);
    Ok(json!({
        "dt": path.dt * stride as f64,
        "values": values,
        "excursions": ex.excursions.iter().zip(&ex.marks).take(10).map(|(e, m)| json!({
            "start": e.start, "end": e.end, "length": e.length, "marks": m, "censored": e.censored,
        })).collect::<Vec<_>>(),
    })
    .to_string())
}

pub fn component_sizes_json(tau: f64, n: usize, cf: f64, lambda: f64, seed: u32) -> Result<String, String> {
    let d = degrees(tau, n, cf)?;
    let (regime, scal) = if tau > 4.0 {
        (Regime::TauGt4, ScalingConstants::finite_third_moment(n))
    } else if tau > 3.0 {
        (Regime::Tau34, scaling_constants(tau, n, None).map_err(|e| e.to_string())?)
    } else {
        (Regime::Tau23Cm, scaling_constants(tau, n, None).map_err(|e| e.to_string())?)
    };
    let c = critical_p(&PercolationSpec { regime, lambda, p: None }, d.nu(), &scal).map_err(|e| e.to_string())?;
    let mut rng = rng_from_seed(seed as u64);
    let g = fountoulakis_percolate(&d, c.p, &mut rng).map_err(|e| e.to_string())?.graph;
    let comps = decompose_with(&g, &DecomposeOptions { diameter: DiameterPolicy::Skip, ..Default::default() });
    Ok(json!({
        "p": c.p,
        "clamped": c.clamped,
        "nu": d.nu(),
        "rho": scal.rho,
        "components": comps.len(),
        "largest": comps.iter().take(20).map(|c| [c.size, c.surplus]).collect::<Vec<_>>(),
    })
    .to_string())
}

/// Exploration walk of a power-law configuration model (DFS or unit-edge).
#[wasm_bindgen]
pub fn explore_walk(tau: f64, n: usize, cf: f64, unit_edge: bool, seed: u32) -> Result<String, JsValue> {
    explore_walk_json(tau, n, cf, unit_edge, seed).map_err(|e| JsValue::from_str(&e))
}

/// Brownian motion with parabolic drift and its longest marked excursions.
#[wasm_bindgen]
pub fn parabolic_path(mu: f64, eta: f64, lambda: f64, t_max: f64, dt: f64, seed: u32) -> Result<String, JsValue> {
    parabolic_path_json(mu, eta, lambda, t_max, dt, seed).map_err(|e| JsValue::from_str(&e))
}

/// Largest components of a power-law configuration model percolated inside its critical window.
#[wasm_bindgen]
pub fn component_sizes(tau: f64, n: usize, cf: f64, lambda: f64, seed: u32) -> Result<String, JsValue> {
    component_sizes_json(tau, n, cf, lambda, seed).map_err(|e| JsValue::from_str(&e))
}
