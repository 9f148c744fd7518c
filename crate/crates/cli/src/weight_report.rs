use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use log::warn;
use rsgnn::graphdata::{read_edges, NoiseRecord};
use rsgnn::linkpred::LearnedGraph;
use rsgnn::trainer::{histogram_csv, weight_histograms, GroupStats, RunReport, HISTOGRAM_BINS};
use serde::Serialize;

use crate::error::{read_file, write_file, CliError, Result};

pub const HISTOGRAM_FILE: &str = "weight_histogram.csv";
pub const SUMMARY_FILE: &str = "weight_summary.json";

#[derive(Debug, Args)]
pub struct WeightReportArgs {
    /// Run directory written by `run`.
    #[arg(long)]
    pub run_dir: PathBuf,
    /// Where to write the histogram and summary; defaults to the run directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Group {
    size: usize,
    mean: Option<f64>,
}

impl From<&GroupStats> for Group {
    fn from(g: &GroupStats) -> Self {
        Self { size: g.size, mean: g.mean }
    }
}

#[derive(Debug, Serialize)]
struct Summary {
    noise_known: bool,
    groups: BTreeMap<&'static str, Group>,
    /// Separation of clean over noisy weights; null when either group is empty.
    auc: Option<f64>,
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_file(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn run(a: &WeightReportArgs) -> Result<()> {
    let dir = &a.run_dir;
    let report: RunReport = parse_json(&dir.join("report.json"))?;
    let n = report.num_nodes;
    let tsv_path = dir.join("learned_graph.tsv");
    let learned = LearnedGraph::parse_tsv(&read_file(&tsv_path)?, n, report.config.t_l, &tsv_path)?;
    let edges = read_edges(&dir.join("input_edges.tsv"), n)?;
    let noise_path = dir.join("noise_record.json");
    let noise: Option<NoiseRecord> = if noise_path.exists() {
        Some(parse_json(&noise_path)?)
    } else {
        warn!("{} not found; writing the pooled histogram only", noise_path.display());
        None
    };

    let h = weight_histograms(&learned, &edges, noise.as_ref());
    let mut groups = BTreeMap::new();
    let csv = if noise.is_some() {
        groups.insert("clean", Group::from(&h.clean));
        groups.insert("noisy", Group::from(&h.noisy));
        histogram_csv(&h)
    } else {
        // without ground truth every original edge lands in the clean group
        groups.insert("original", Group::from(&h.clean));
        let mut out = String::from("bin_start,bin_end,original,densified\n");
        for b in 0..HISTOGRAM_BINS {
            let lo = b as f64 / HISTOGRAM_BINS as f64;
            let hi = (b + 1) as f64 / HISTOGRAM_BINS as f64;
            let _ = writeln!(out, "{lo},{hi},{},{}", h.clean.counts[b], h.densified.counts[b]);
        }
        out
    };
    groups.insert("densified", Group::from(&h.densified));
    let summary = Summary {
        noise_known: noise.is_some(),
        groups,
        auc: if noise.is_some() { h.auc } else { None },
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";

    let out = a.out.as_deref().unwrap_or(dir);
    write_file(&out.join(HISTOGRAM_FILE), &csv)?;
    write_file(&out.join(SUMMARY_FILE), &json)?;
    print!("{json}");
    Ok(())
}
