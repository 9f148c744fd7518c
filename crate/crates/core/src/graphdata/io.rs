//! Text formats for attributed graphs.
//!
//! Node file: `node_id<TAB>label<TAB>f1,f2,...,fd`, label `-1` when unknown.
//! Edge file: `u<TAB>v`, one undirected edge per line.
//! Sidecar (`meta.json`): class count, masks and an optional noise record.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numcore::DenseMatrix;

use super::graph::{AttributedGraph, CanonStats, Masks, NoiseRecord};

pub const NODE_FILE: &str = "nodes.tsv";
pub const EDGE_FILE: &str = "edges.tsv";
pub const META_FILE: &str = "meta.json";

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn format_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Reads a node file and an edge file. Duplicate edges and self-loops are
/// dropped and counted.
pub fn load_graph(node_file: &Path, edge_file: &Path) -> Result<(AttributedGraph, CanonStats)> {
    let text = read(node_file)?;
    let mut rows: Vec<Option<(Option<usize>, Vec<f64>)>> = Vec::new();
    let mut dim: Option<usize> = None;
    for (lineno, line) in text.lines().enumerate().map(|(k, l)| (k + 1, l)) {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(id), Some(label), feats) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format_err(node_file, lineno, "expected id<TAB>label<TAB>features"));
        };
        if parts.next().is_some() {
            return Err(format_err(node_file, lineno, "too many columns"));
        }
        let id: usize = id
            .trim()
            .parse()
            .map_err(|_| format_err(node_file, lineno, format!("bad node id {id:?}")))?;
        let label: i64 = label
            .trim()
            .parse()
            .map_err(|_| format_err(node_file, lineno, format!("bad label {label:?}")))?;
        let label = match label {
            -1 => None,
            l if l >= 0 => Some(l as usize),
            l => return Err(format_err(node_file, lineno, format!("bad label {l}"))),
        };
        let feats = feats.unwrap_or("").trim();
        let values = if feats.is_empty() {
            Vec::new()
        } else {
            feats
                .split(',')
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| format_err(node_file, lineno, format!("bad feature {f:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(format_err(
                    node_file,
                    lineno,
                    format!("expected {d} features, found {}", values.len()),
                ))
            }
            _ => {}
        }
        if id >= rows.len() {
            rows.resize(id + 1, None);
        }
        if rows[id].is_some() {
            return Err(format_err(node_file, lineno, format!("duplicate node id {id}")));
        }
        rows[id] = Some((label, values));
    }
    if let Some(missing) = rows.iter().position(Option::is_none) {
        return Err(format_err(node_file, 0, format!("node id {missing} missing; ids must be 0..N-1")));
    }
    let n = rows.len();
    let d = dim.unwrap_or(0);
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (label, values) in rows.into_iter().flatten() {
        labels.push(label);
        data.extend(values);
    }
    let num_classes = labels.iter().flatten().max().map_or(0, |m| m + 1);
    let features = DenseMatrix::new(n, d, data)?;

    let edges = read_edges(edge_file, n)?;
    let (g, stats) = AttributedGraph::new(features, edges, labels, num_classes)?;
    if stats.duplicate_edges + stats.self_loops > 0 {
        warn!(
            "{}: dropped {} duplicate edges and {} self-loops",
            edge_file.display(),
            stats.duplicate_edges,
            stats.self_loops
        );
    }
    Ok((g, stats))
}

/// Reads an edge file, checking every index against `n` nodes.
pub fn read_edges(edge_file: &Path, n: usize) -> Result<Vec<(usize, usize)>> {
    let text = read(edge_file)?;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate().map(|(k, l)| (k + 1, l)) {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(u), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format_err(edge_file, lineno, "expected u<TAB>v"));
        };
        let parse = |s: &str| -> Result<usize> {
            let idx: usize = s
                .trim()
                .parse()
                .map_err(|_| format_err(edge_file, lineno, format!("bad node index {s:?}")))?;
            if idx >= n {
                return Err(Error::Index {
                    path: edge_file.to_path_buf(),
                    line: lineno,
                    index: idx,
                    num_nodes: n,
                });
            }
            Ok(idx)
        };
        edges.push((parse(u)?, parse(v)?));
    }
    Ok(edges)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Meta {
    num_classes: usize,
    masks: Masks,
    noise: Option<NoiseRecord>,
}

pub fn write_node_file(g: &AttributedGraph) -> String {
    let mut out = String::new();
    for i in 0..g.num_nodes() {
        let label = g.labels()[i].map_or(-1, |c| c as i64);
        let _ = write!(out, "{i}\t{label}\t");
        for (k, v) in g.features().row(i).iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_edge_file(edges: &[(usize, usize)]) -> String {
    let mut out = String::new();
    for &(u, v) in edges {
        let _ = writeln!(out, "{u}\t{v}");
    }
    out
}

fn write(path: PathBuf, contents: &str) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `nodes.tsv`, `edges.tsv` and `meta.json` into `dir`.
pub fn save_dataset(dir: &Path, g: &AttributedGraph, noise: Option<&NoiseRecord>) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(dir.join(NODE_FILE), &write_node_file(g))?;
    write(dir.join(EDGE_FILE), &write_edge_file(g.edges()))?;
    let meta = Meta {
        num_classes: g.num_classes(),
        masks: g.masks().clone(),
        noise: noise.cloned(),
    };
    let path = dir.join(META_FILE);
    let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Json {
        path: path.clone(),
        source: e,
    })?;
    write(path, &(json + "\n"))
}

/// Inverse of [`save_dataset`]. A missing sidecar yields empty masks.
pub fn load_dataset(dir: &Path) -> Result<(AttributedGraph, Option<NoiseRecord>)> {
    let (g, _) = load_graph(&dir.join(NODE_FILE), &dir.join(EDGE_FILE))?;
    let meta_path = dir.join(META_FILE);
    if !meta_path.exists() {
        return Ok((g, None));
    }
    let meta: Meta = serde_json::from_str(&read(&meta_path)?).map_err(|e| Error::Json {
        path: meta_path.clone(),
        source: e,
    })?;
    let g = if meta.num_classes != g.num_classes() {
        let (fixed, _) = AttributedGraph::new(
            g.features().clone(),
            g.edges().iter().copied(),
            g.labels().to_vec(),
            meta.num_classes,
        )?;
        fixed
    } else {
        g
    };
    Ok((g.with_masks(meta.masks)?, meta.noise))
}

/// What the citation-format adapter skipped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CoraStats {
    pub canon: CanonStats,
    pub dangling_citations: usize,
}

/// Reads the `.content` / `.cites` citation layout: content lines are
/// `paper_id<TAB>f1<TAB>...<TAB>fd<TAB>class_name`, cites lines are
/// `cited<TAB>citing`. Paper ids are remapped to dense indices in file order;
/// class names to indices in sorted order. Citations to unknown papers are
/// skipped.
pub fn load_cora(content: &Path, cites: &Path) -> Result<(AttributedGraph, CoraStats)> {
    let text = read(content)?;
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut rows: Vec<(Vec<f64>, String)> = Vec::new();
    let mut dim = None;
    for (lineno, line) in text.lines().enumerate().map(|(k, l)| (k + 1, l)) {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() < 2 {
            return Err(format_err(content, lineno, "expected id, features, class"));
        }
        let feats = parts[1..parts.len() - 1]
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| format_err(content, lineno, format!("bad feature {f:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match dim {
            None => dim = Some(feats.len()),
            Some(d) if d != feats.len() => {
                return Err(format_err(content, lineno, format!("expected {d} features")))
            }
            _ => {}
        }
        if ids.insert(parts[0].to_string(), rows.len()).is_some() {
            return Err(format_err(content, lineno, format!("duplicate paper id {}", parts[0])));
        }
        rows.push((feats, parts[parts.len() - 1].to_string()));
    }
    let classes: BTreeMap<&str, usize> = {
        let mut names: Vec<&str> = rows.iter().map(|(_, c)| c.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        names.into_iter().enumerate().map(|(k, c)| (c, k)).collect()
    };
    let n = rows.len();
    let d = dim.unwrap_or(0);
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (f, c) in &rows {
        data.extend_from_slice(f);
        labels.push(Some(classes[c.as_str()]));
    }
    let features = DenseMatrix::new(n, d, data)?;

    let text = read(cites)?;
    let mut edges = Vec::new();
    let mut dangling = 0;
    for (lineno, line) in text.lines().enumerate().map(|(k, l)| (k + 1, l)) {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(format_err(cites, lineno, "expected cited<TAB>citing"));
        }
        match (ids.get(parts[0]), ids.get(parts[1])) {
            (Some(&u), Some(&v)) => edges.push((u, v)),
            _ => dangling += 1,
        }
    }
    if dangling > 0 {
        warn!("{}: skipped {dangling} citations to unknown papers", cites.display());
    }
    let (g, canon) = AttributedGraph::new(features, edges, labels, classes.len())?;
    Ok((
        g,
        CoraStats {
            canon,
            dangling_citations: dangling,
        },
    ))
}
