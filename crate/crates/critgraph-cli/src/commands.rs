use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use critgraph::coalescent::{dynamic_construction, modified_process, simulate_mc};
use critgraph::components::{decompose_with, susceptibilities, ComponentStats, DecomposeOptions, DiameterPolicy};
use critgraph::degrees::{build_power_law_degrees, hub_weights, scaling_constants, DegreeSequence, ScalingConstants, WeightSequence};
use critgraph::exploration::{components_from_walk, explore_dfs, explore_unit};
use critgraph::graph::{config_model, erased_config_model, inhomogeneous_graph, uniform_simple, Graph, Kernel, MultiGraph};
use critgraph::harness::experiment::{run_experiment, ExperimentSpec};
use critgraph::io;
use critgraph::limit_graph::{hub_theta, limit_weight_medians, sample_g_infty_with, HubKernel, HubKernelKind, LambdaMatrix, DEFAULT_TOLERANCE};
use critgraph::limits::{excursions, marks, power_law_tail_rate, LimitProcess, TailMode, ThetaClass, ThetaSequence};
use critgraph::percolation::{
    bond_percolate, critical_p, erase_then_percolate, fountoulakis_percolate, janson_percolate, percolate_then_erase, AnyGraph, JansonCleanup,
    PercolationSpec, Regime,
};
use critgraph::seeds::rng_from_seed;
use critgraph::SimRng;
use serde_json::json;

use crate::{
    CoalescentArgs, Command, CoalescentMode, ExperimentArgs, ExploreArgs, ExploreMode, Failure, GenArgs, KernelArg, LimitGraphArgs, LimitMode,
    LimitsArgs, ModelArgs, ModelKind, PercolateArgs, PercolateMode, RegimeArg, SeedArgs, StatsArgs,
};

type CmdResult = Result<(), Failure>;

const MAX_UNIFORM_TRIES: usize = 10_000;
const TOP: usize = 5;

pub(crate) fn dispatch(cmd: Command) -> CmdResult {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Percolate(a) => percolate(a),
        Command::Explore(a) => explore(a),
        Command::Stats(a) => stats(a),
        Command::Limits(a) => limits(a),
        Command::Coalescent(a) => coalescent(a),
        Command::Limitgraph(a) => limitgraph(a),
        Command::Experiment(a) => experiment(a),
    }
}

fn value_name<V: ValueEnum>(v: V) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn resolve_seed(s: &SeedArgs) -> u64 {
    let seed = s.seed.unwrap_or_else(rand::random);
    eprintln!("seed={seed}");
    seed
}

fn print_json(v: &serde_json::Value) -> CmdResult {
    println!("{}", serde_json::to_string(v).context("serializing output")?);
    Ok(())
}

fn write_bytes(path: &Path, bytes: &[u8]) -> CmdResult {
    io::atomic_write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn degree_counts(d: &[u32]) -> BTreeMap<u32, usize> {
    let mut c = BTreeMap::new();
    for &x in d {
        *c.entry(x).or_insert(0) += 1;
    }
    c
}

fn require_size(m: &ModelArgs) -> Result<(f64, usize), Failure> {
    match (m.tau, m.n) {
        (Some(t), Some(n)) => Ok((t, n)),
        _ => Err(usage("--tau and --n are required unless a degree file is given")),
    }
}

fn degree_sequence(m: &ModelArgs) -> Result<DegreeSequence, Failure> {
    if let Some(path) = &m.degrees {
        let d = io::read_degrees(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(DegreeSequence::new(d)?);
    }
    let (tau, n) = require_size(m)?;
    Ok(build_power_law_degrees(tau, n, m.cf, m.lambda)?)
}

fn weight_sequence(m: &ModelArgs) -> Result<WeightSequence, Failure> {
    if m.degrees.is_some() {
        return Err(usage("rank-one models take --tau and --n, not a degree file"));
    }
    let (tau, n) = require_size(m)?;
    Ok(hub_weights(tau, n, m.cf)?)
}

fn rank_one_kernel(kind: ModelKind) -> Option<Kernel> {
    match kind {
        ModelKind::Grg => Some(Kernel::Grg),
        ModelKind::ChungLu => Some(Kernel::ChungLu),
        ModelKind::NorrosReittu => Some(Kernel::NorrosReittu),
        _ => None,
    }
}

fn sample_graph(m: &ModelArgs, rng: &mut SimRng) -> Result<AnyGraph, Failure> {
    if let Some(kernel) = rank_one_kernel(m.model) {
        return Ok(inhomogeneous_graph(&weight_sequence(m)?, kernel, rng)?.into());
    }
    let d = degree_sequence(m)?;
    Ok(match m.model {
        ModelKind::Cm => config_model(&d, rng)?.into(),
        ModelKind::Ecm => erased_config_model(&d, rng)?.graph.into(),
        _ => uniform_simple(&d, rng, MAX_UNIFORM_TRIES)?.into(),
    })
}

fn edge_list<G: Graph>(g: &G) -> Vec<(usize, usize)> {
    let mut e = Vec::with_capacity(g.edge_count());
    g.for_each_edge(|u, v| e.push((u, v)));
    e
}

fn component_summary<G: Graph>(g: &G) -> Vec<ComponentStats> {
    decompose_with(g, &DecomposeOptions { diameter: DiameterPolicy::Skip, ..Default::default() })
}

fn top_sizes(c: &[ComponentStats]) -> Vec<usize> {
    c.iter().take(TOP).map(|c| c.size).collect()
}

fn gen(a: GenArgs) -> CmdResult {
    let seed = resolve_seed(&a.seed);
    let mut rng = rng_from_seed(seed);
    let g = sample_graph(&a.model, &mut rng)?;
    let edges = edge_list(&g);
    io::write_edge_list(&a.out, g.vertex_count(), &edges).with_context(|| format!("writing {}", a.out.display()))?;
    let side = sidecar_path(&a.out, ".json");
    let meta = json!({
        "model": value_name(a.model.model),
        "seed": seed,
        "tau": a.model.tau,
        "n": g.vertex_count(),
        "cf": a.model.cf,
        "lambda": a.model.lambda,
        "degree_file": a.model.degrees,
        "edges": edges.len(),
        "degree_counts": degree_counts(&g.degrees()),
    });
    io::write_json(&side, &meta).with_context(|| format!("writing {}", side.display()))?;
    print_json(&json!({ "vertices": g.vertex_count(), "edges": edges.len(), "out": a.out, "sidecar": side }))
}

fn scaling_for(tau: Option<f64>, n: usize) -> Result<ScalingConstants, Failure> {
    match tau {
        Some(t) if t < 4.0 => Ok(scaling_constants(t, n, None)?),
        _ => Ok(ScalingConstants::finite_third_moment(n)),
    }
}

fn regime(r: RegimeArg) -> Regime {
    match r {
        RegimeArg::TauGt4 => Regime::TauGt4,
        RegimeArg::Tau34 => Regime::Tau34,
        RegimeArg::Tau23Cm => Regime::Tau23Cm,
        RegimeArg::Tau23Single => Regime::Tau23Single,
    }
}

fn retention(a: &PercolateArgs, nu: f64, n: usize) -> Result<(f64, bool), Failure> {
    if let Some(p) = a.p {
        if !(0.0..=1.0).contains(&p) {
            return Err(usage(format!("--p {p} is outside [0, 1]")));
        }
        return Ok((p, false));
    }
    let Some(r) = a.regime else {
        return Err(usage("either --p or --regime is required"));
    };
    let c = critical_p(&PercolationSpec { regime: regime(r), lambda: a.model.lambda, p: None }, nu, &scaling_for(a.model.tau, n)?)?;
    Ok((c.p, c.clamped))
}

fn percolate(a: PercolateArgs) -> CmdResult {
    if a.mode != PercolateMode::Direct && a.input.is_some() {
        return Err(usage(format!(
            "--mode {} needs a degree sequence (--degrees or --tau/--n), not a realized graph",
            value_name(a.mode)
        )));
    }
    if a.mode != PercolateMode::Direct && a.model.model != ModelKind::Cm {
        return Err(usage("half-edge percolation modes work on the configuration model only"));
    }
    let seed = resolve_seed(&a.seed);
    let mut rng = rng_from_seed(seed);
    // Here --lambda places p in the window; the underlying sequence is generated uninflated.
    let base = ModelArgs { lambda: 0.0, ..a.model.clone() };
    let (graph, p, clamped): (AnyGraph, f64, bool) = if a.mode == PercolateMode::Direct {
        let g: AnyGraph = match &a.input {
            Some(path) => {
                let (n, edges) = io::read_edge_list(path).with_context(|| format!("reading {}", path.display()))?;
                MultiGraph::from_edges(n, &edges)?.into()
            }
            None => sample_graph(&base, &mut rng)?,
        };
        let nu = match rank_one_kernel(a.model.model) {
            Some(_) if a.input.is_none() => {
                let w = weight_sequence(&base)?;
                w.weights().iter().map(|x| x * x).sum::<f64>() / w.total()
            }
            _ => DegreeSequence::new(g.degrees())?.nu(),
        };
        let (p, clamped) = retention(&a, nu, g.vertex_count())?;
        (bond_percolate(&g, p, &mut rng)?.graph, p, clamped)
    } else {
        let d = degree_sequence(&base)?;
        let (p, clamped) = retention(&a, d.nu(), d.n())?;
        let g = match a.mode {
            PercolateMode::Janson => janson_percolate(&d, p, &mut rng, JansonCleanup::DeleteUniformDeg1)?.graph,
            PercolateMode::Fountoulakis => fountoulakis_percolate(&d, p, &mut rng)?.graph,
            PercolateMode::EraseThenPercolate => erase_then_percolate(&d, p, &mut rng)?.graph,
            _ => percolate_then_erase(&d, p, &mut rng)?.into(),
        };
        (g, p, clamped)
    };
    let edges = edge_list(&graph);
    if let Some(out) = &a.out {
        io::write_edge_list(out, graph.vertex_count(), &edges).with_context(|| format!("writing {}", out.display()))?;
    }
    let comps = component_summary(&graph);
    print_json(&json!({
        "mode": value_name(a.mode),
        "p": p,
        "p_clamped": clamped,
        "vertices": graph.vertex_count(),
        "edges": edges.len(),
        "components": comps.len(),
        "largest": top_sizes(&comps),
    }))
}

fn explore(a: ExploreArgs) -> CmdResult {
    let seed = resolve_seed(&a.seed);
    let mut rng = rng_from_seed(seed);
    let d = degree_sequence(&a.model)?;
    let (walk, _) = match a.mode {
        ExploreMode::Dfs => explore_dfs(&d, &mut rng)?,
        ExploreMode::Unit => explore_unit(&d, &mut rng, true)?,
    };
    if let Some(out) = &a.out {
        let mut text = String::from("step,value,event\n");
        for (k, v) in walk.values.iter().enumerate() {
            let ev = if k == 0 { "" } else { walk.events[k - 1].as_str() };
            text.push_str(&format!("{k},{v},{ev}\n"));
        }
        write_bytes(out, text.as_bytes())?;
    }
    let mut comps = components_from_walk(&walk)?;
    comps.sort_by(|x, y| y.vertices.cmp(&x.vertices));
    print_json(&json!({
        "mode": value_name(a.mode),
        "steps": walk.len(),
        "components": walk.component_count(),
        "surplus": walk.surplus_times.len(),
        "largest": comps.iter().take(TOP).map(|c| c.vertices).collect::<Vec<_>>(),
    }))
}

fn stats(a: StatsArgs) -> CmdResult {
    resolve_seed(&a.seed);
    let (n, edges) = io::read_edge_list(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let g = MultiGraph::from_edges(n, &edges)?;
    let comps = decompose_with(&g, &DecomposeOptions { diameter: DiameterPolicy::Auto { max_exact: 2_000 }, ..Default::default() });
    if let Some(out) = &a.out {
        write_bytes(out, &io::components_csv(&comps)?)?;
    }
    let mut v = json!({
        "vertices": n,
        "edges": edges.len(),
        "components": comps.len(),
        "degree_counts": degree_counts(&g.degrees()),
        "largest": comps.iter().take(TOP).map(|c| json!({ "size": c.size, "edges": c.edges, "surplus": c.surplus })).collect::<Vec<_>>(),
        "c1_diameter": comps.first().map(|c| c.diameter),
        "c1_diameter_exact": comps.first().map(|c| c.diameter_exact),
    });
    if a.susceptibility {
        v["susceptibility"] = serde_json::to_value(susceptibilities(&g, &WeightSequence::ones(n))?).context("serializing")?;
    }
    print_json(&v)
}

fn limits(a: LimitsArgs) -> CmdResult {
    let seed = resolve_seed(&a.seed);
    let mut rng = rng_from_seed(seed);
    let alpha = 1.0 / (a.tau - 1.0);
    let process = match a.mode {
        LimitMode::Parabolic => LimitProcess::Parabolic { mu: a.mu, eta: a.eta, lambda: a.lambda },
        LimitMode::Levy => {
            if !(a.tau > 3.0 && a.tau < 4.0) {
                return Err(usage("levy mode needs --tau in (3, 4)"));
            }
            let theta = ThetaSequence::power_law(a.cf, alpha, a.k, a.mu, ThetaClass::L3NotL2)?;
            let tail =
                if a.brownian_tail { TailMode::Brownian { rate: power_law_tail_rate(a.cf, alpha, a.k, a.mu)? } } else { TailMode::Truncate };
            LimitProcess::ThinnedLevy { theta, lambda: a.lambda, tail }
        }
        LimitMode::Isj => {
            if !(a.tau > 2.0 && a.tau < 3.0) {
                return Err(usage("isj mode needs --tau in (2, 3)"));
            }
            let theta = ThetaSequence::power_law(a.cf, alpha, a.k, a.mu, ThetaClass::L2NotL1)?;
            LimitProcess::Isj { theta, lambda: a.lambda }
        }
    };
    let path = process.simulate(a.t, a.dt, &mut rng)?;
    let ex = marks(&excursions(&path), process.default_mark_rate(), &mut rng).into_ordered();
    if let Some(out) = &a.out {
        write_bytes(out, &io::path_csv(&path)?)?;
        write_bytes(&out.with_extension("excursions.csv"), &io::excursions_csv(&ex)?)?;
    }
    print_json(&json!({
        "mode": value_name(a.mode),
        "steps": path.steps(),
        "final_value": path.values.last(),
        "excursions": ex.excursions.len(),
        "longest": ex.excursions.iter().zip(&ex.marks).take(TOP).map(|(e, m)| json!({ "length": e.length, "marks": m, "censored": e.censored })).collect::<Vec<_>>(),
    }))
}

fn coalescent(a: CoalescentArgs) -> CmdResult {
    let seed = resolve_seed(&a.seed);
    let mut rng = rng_from_seed(seed);
    let (events_csv, summary) = match a.mode {
        CoalescentMode::Mc => {
            let tau = a.model.tau.unwrap_or(3.5);
            let x0 = hub_theta(a.model.cf, 1.0 / (tau - 1.0), a.k);
            let traj = simulate_mc(&x0, 1.0, a.t, &mut rng)?;
            let masses = traj.masses_at(a.t);
            (
                io::coalescent_events_csv(&traj.events)?,
                json!({ "events": traj.events.len(), "clusters": masses.len(), "largest": masses.iter().take(TOP).collect::<Vec<_>>() }),
            )
        }
        CoalescentMode::Dynamic => {
            let d = degree_sequence(&a.model)?;
            let run = dynamic_construction(&d, a.t, &mut rng);
            (io::dynamic_events_csv(&run.events)?, json!({ "events": run.events.len(), "half_edges": run.ell, "open_half_edges": run.s1_at(a.t) }))
        }
        CoalescentMode::Modified => {
            let d = degree_sequence(&a.model)?;
            let run = modified_process(&d, 0.0, a.t, &mut rng)?;
            (
                io::modified_events_csv(&run.events)?,
                json!({ "events": run.events.len(), "first_merge_time": run.first_merge_time(), "bad_events": run.bad_count_at(a.t) }),
            )
        }
    };
    if let Some(out) = &a.out {
        write_bytes(out, &events_csv)?;
    }
    print_json(&summary)
}

fn limitgraph(a: LimitGraphArgs) -> CmdResult {
    let seed = resolve_seed(&a.seed);
    let mut rng = rng_from_seed(seed);
    let alpha = 1.0 / (a.tau - 1.0);
    let kind = match a.kernel {
        KernelArg::Grg => HubKernelKind::Grg,
        KernelArg::Ecm => HubKernelKind::Ecm,
    };
    let kernel = HubKernel::new(kind, alpha, a.mu.unwrap_or(a.cf / (1.0 - alpha)), a.cf)?;
    let m = LambdaMatrix::new(a.k, kernel, DEFAULT_TOLERANCE)?;
    if let Some(out) = &a.out {
        write_bytes(out, &io::lambda_matrix_csv(&m, a.lambda)?)?;
    }
    let sample = sample_g_infty_with(&m, a.lambda, &mut rng);
    let medians = limit_weight_medians(&m, a.lambda, &hub_theta(a.cf, alpha, a.k), a.replicates, 3, seed)?;
    print_json(&json!({
        "k": a.k,
        "lambda": a.lambda,
        "lambda_11": m.get(1, 1, a.lambda),
        "sample_edges": sample.edge_count(),
        "weight_medians": medians,
    }))
}

fn git_describe() -> Option<String> {
    let out = std::process::Command::new("git").args(["describe", "--always", "--dirty", "--tags"]).output().ok()?;
    out.status.success().then(|| String::from_utf8_lossy(&out.stdout).trim().to_string()).filter(|s| !s.is_empty())
}

fn experiment(a: ExperimentArgs) -> CmdResult {
    let mut spec = ExperimentSpec::from_path(&a.spec)?;
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    if let Some(r) = a.replicates {
        spec.replicates = r;
    }
    if a.threads == Some(0) {
        return Err(usage("--threads must be at least 1"));
    }
    spec.validate()?;
    eprintln!("seed={}", spec.seed);
    let res = run_experiment(&spec, a.threads)?;
    let files = io::write_run(&res, &a.out, git_describe().as_deref()).with_context(|| format!("writing {}", a.out.display()))?;
    print_json(&json!({
        "name": spec.name,
        "spec_hash": res.spec_hash,
        "replicates": res.records.len(),
        "failures": res.failures(),
        "files": files,
    }))
}
