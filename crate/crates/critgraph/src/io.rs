//! File formats: edge lists, degree lists, plot-ready CSV tables and run manifests.
//!
//! Edge lists are plain text: a header line `n m`, then one `u v` pair per line (0-based).
//! Every writer goes through a temporary file and a rename, so readers never see partial output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::coalescent::{CoalEvent, DynEvent, ModEvent};
use crate::components::ComponentStats;
use crate::error::{Error, Result};
use crate::harness::experiment::RunResult;
use crate::limit_graph::LambdaMatrix;
use crate::limits::{LimitPath, MarkedExcursions};

pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn edge_list_string(n: usize, edges: &[(usize, usize)]) -> String {
    let mut s = format!("{} {}\n", n, edges.len());
    for (u, v) in edges {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

pub fn parse_edge_list(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?;
    let nums = parse_pair(header)?;
    let (n, m) = nums;
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let (u, v) = parse_pair(line)?;
        if u >= n || v >= n {
            return Err(Error::Parse(format!("edge ({u}, {v}) out of range for n = {n}")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse(format!("header announces {m} edges, found {}", edges.len())));
    }
    Ok((n, edges))
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("{line:?}: {e}"))));
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a?, b?)),
        _ => Err(Error::Parse(format!("expected two integers, got {line:?}"))),
    }
}

pub fn write_edge_list(path: &Path, n: usize, edges: &[(usize, usize)]) -> Result<()> {
    atomic_write(path, edge_list_string(n, edges).as_bytes())
}

pub fn read_edge_list(path: &Path) -> Result<(usize, Vec<(usize, usize)>)> {
    parse_edge_list(&fs::read_to_string(path)?)
}

/// One degree per line.
pub fn parse_degrees(text: &str) -> Result<Vec<u32>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<u32>().map_err(|e| Error::Parse(format!("{l:?}: {e}"))))
        .collect()
}

pub fn read_degrees(path: &Path) -> Result<Vec<u32>> {
    parse_degrees(&fs::read_to_string(path)?)
}

pub fn write_degrees(path: &Path, d: &[u32]) -> Result<()> {
    let s: String = d.iter().map(|x| format!("{x}\n")).collect();
    atomic_write(path, s.as_bytes())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    atomic_write(path, s.as_bytes())
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn path_csv(path: &LimitPath) -> Result<Vec<u8>> {
    csv_bytes(&["t", "value"], path.values.iter().enumerate().map(|(k, v)| vec![path.time(k).to_string(), v.to_string()]))
}

pub fn excursions_csv(ex: &MarkedExcursions) -> Result<Vec<u8>> {
    csv_bytes(
        &["start", "end", "length", "area", "censored", "marks"],
        ex.excursions.iter().enumerate().map(|(k, e)| {
            vec![
                e.start.to_string(),
                e.end.to_string(),
                e.length.to_string(),
                e.area.to_string(),
                e.censored.to_string(),
                opt(ex.marks.get(k)),
            ]
        }),
    )
}

pub fn components_csv(stats: &[ComponentStats]) -> Result<Vec<u8>> {
    csv_bytes(
        &["rank", "size", "edges", "surplus", "diameter", "diameter_exact", "weight", "min_vertex"],
        stats.iter().enumerate().map(|(k, c)| {
            vec![
                (k + 1).to_string(),
                c.size.to_string(),
                c.edges.to_string(),
                c.surplus.to_string(),
                c.diameter.to_string(),
                c.diameter_exact.to_string(),
                c.weight.to_string(),
                c.min_vertex.to_string(),
            ]
        }),
    )
}

/// `lambda_ij` for `1 <= i, j <= k`, long format.
pub fn lambda_matrix_csv(m: &LambdaMatrix, lambda: f64) -> Result<Vec<u8>> {
    let k = m.k;
    csv_bytes(
        &["i", "j", "lambda_ij"],
        (1..=k).flat_map(|i| (1..=k).map(move |j| (i, j))).map(|(i, j)| vec![i.to_string(), j.to_string(), m.get(i, j, lambda).to_string()]),
    )
}

pub fn coalescent_events_csv(events: &[CoalEvent]) -> Result<Vec<u8>> {
    csv_bytes(
        &["time", "kind", "i", "j"],
        events.iter().map(|e| vec![e.time.to_string(), e.kind.as_str().into(), e.i.to_string(), e.j.to_string()]),
    )
}

pub fn dynamic_events_csv(events: &[DynEvent]) -> Result<Vec<u8>> {
    csv_bytes(
        &["time", "kind", "u", "v", "open_half_edges"],
        events.iter().map(|e| vec![e.time.to_string(), e.kind.as_str().into(), e.u.to_string(), e.v.to_string(), e.s1.to_string()]),
    )
}

pub fn modified_events_csv(events: &[ModEvent]) -> Result<Vec<u8>> {
    csv_bytes(
        &["time", "kind", "h", "g", "bad"],
        events.iter().map(|e| vec![e.time.to_string(), e.kind.as_str().into(), e.h.to_string(), e.g.to_string(), e.bad.to_string()]),
    )
}

/// One row per replicate with the `top_k` largest sizes and surpluses in fixed columns.
pub fn replicates_csv(res: &RunResult) -> Result<Vec<u8>> {
    let k = res.spec.outputs.top_k;
    let mut header: Vec<String> = ["n", "replicate", "seed", "p", "p_clamped", "vertices", "edges", "components", "c1_edges", "c1_diameter", "c1_diameter_exact"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=k).map(|i| format!("size_{i}")));
    header.extend((1..=k).map(|i| format!("surplus_{i}")));
    header.extend(["s2_star", "s3_star", "spr_star", "dn_star", "delta_max", "error"].iter().map(|s| s.to_string()));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_bytes(
        &header,
        res.records.iter().map(|r| {
            let mut row = vec![
                r.n.to_string(),
                r.replicate.to_string(),
                r.seed.clone(),
                opt(r.p),
                r.p_clamped.to_string(),
                r.vertices.to_string(),
                r.edges.to_string(),
                r.components.to_string(),
                r.c1_edges.to_string(),
                opt(r.c1_diameter),
                opt(r.c1_diameter_exact),
            ];
            row.extend((0..k).map(|i| opt(r.sizes.get(i))));
            row.extend((0..k).map(|i| opt(r.surplus.get(i))));
            let s = r.susceptibility.as_ref();
            row.extend([
                opt(s.map(|s| s.s2_star)),
                opt(s.map(|s| s.s3_star)),
                opt(s.map(|s| s.spr_star)),
                opt(s.map(|s| s.dn_star)),
                opt(s.map(|s| s.delta_max)),
                r.error.clone().unwrap_or_default(),
            ]);
            row
        }),
    )
}

pub fn summary_csv(res: &RunResult) -> Result<Vec<u8>> {
    csv_bytes(
        &["n", "succeeded", "failed", "c1_mean", "c1_se", "c1_median", "c1_q05", "c1_q95", "surplus_mean", "surplus_se"],
        res.summaries.iter().map(|s| {
            let c = s.c1_size.as_ref();
            let u = s.c1_surplus.as_ref();
            vec![
                s.n.to_string(),
                s.succeeded.to_string(),
                s.failed.to_string(),
                opt(c.map(|c| c.mean)),
                opt(c.map(|c| c.se)),
                opt(c.map(|c| c.median)),
                opt(c.map(|c| c.q05)),
                opt(c.map(|c| c.q95)),
                opt(u.map(|u| u.mean)),
                opt(u.map(|u| u.se)),
            ]
        }),
    )
}

#[derive(Serialize)]
struct Manifest<'a> {
    spec: &'a crate::harness::experiment::ExperimentSpec,
    spec_hash: &'a str,
    seed: u64,
    code_version: &'a str,
    git_describe: Option<&'a str>,
    replicates: usize,
    failures: usize,
    censored_fraction: Option<f64>,
    warning: Option<&'a str>,
    files: Vec<&'a str>,
    timing: &'a str,
}

/// Writes `replicates.csv`, `summary.csv`, optional `walks.csv` and `excursion_law.csv`, and
/// `manifest.json` into `dir`, plus wall-clock durations in `timing.json`. Every file except
/// `timing.json` depends only on the spec, so runs with different thread counts match byte for byte.
pub fn write_run(res: &RunResult, dir: &Path, git_describe: Option<&str>) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files: Vec<(&str, Vec<u8>)> = vec![("replicates.csv", replicates_csv(res)?), ("summary.csv", summary_csv(res)?)];
    if !res.walks.is_empty() {
        let rows = res.walks.iter().flat_map(|(n, w)| w.iter().enumerate().map(move |(k, v)| vec![n.to_string(), k.to_string(), v.to_string()]));
        files.push(("walks.csv", csv_bytes(&["n", "step", "value"], rows)?));
    }
    if let Some(law) = &res.excursion_law {
        let rows = law.draws.iter().enumerate().flat_map(|(p, u)| {
            u.pairs().iter().enumerate().map(move |(r, &(x, y))| vec![p.to_string(), (r + 1).to_string(), x.to_string(), y.to_string()])
        });
        files.push(("excursion_law.csv", csv_bytes(&["path", "rank", "length", "marks"], rows)?));
    }
    let names: Vec<&str> = files.iter().map(|f| f.0).collect();
    let manifest = Manifest {
        spec: &res.spec,
        spec_hash: &res.spec_hash,
        seed: res.spec.seed,
        code_version: &res.code_version,
        git_describe,
        replicates: res.records.len(),
        failures: res.failures(),
        censored_fraction: res.excursion_law.as_ref().map(|l| l.censored_fraction),
        warning: res.excursion_law.as_ref().and_then(|l| l.warning.as_deref()),
        files: names.clone(),
        timing: "timing.json",
    };
    let mut written = Vec::new();
    for (name, bytes) in &files {
        let p = dir.join(name);
        atomic_write(&p, bytes)?;
        written.push(p);
    }
    let mp = dir.join("manifest.json");
    write_json(&mp, &manifest)?;
    written.push(mp);
    let tp = dir.join("timing.json");
    write_json(&tp, &res.timing)?;
    written.push(tp);
    Ok(written)
}
