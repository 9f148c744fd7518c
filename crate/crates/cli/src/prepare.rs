use std::path::PathBuf;

use clap::Args;
use log::warn;
use rsgnn::graphdata::{
    generate_planted_partition, inject_random_noise, load_cora, save_dataset, split_labels, PlantedPartition,
};

use crate::error::{CliError, Result};

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Output dataset directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Directory holding `cora.content` and `cora.cites`; synthetic data otherwise.
    #[arg(long, conflicts_with_all = ["content", "cites"])]
    pub cora_dir: Option<PathBuf>,
    /// Citation-format content file.
    #[arg(long, requires = "cites")]
    pub content: Option<PathBuf>,
    /// Citation-format cites file.
    #[arg(long, requires = "content")]
    pub cites: Option<PathBuf>,

    #[arg(long, default_value_t = 400)]
    pub nodes: usize,
    #[arg(long, default_value_t = 4)]
    pub classes: usize,
    #[arg(long, default_value_t = 0.1)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.01)]
    pub p_out: f64,
    #[arg(long, default_value_t = 16)]
    pub feature_dim: usize,
    #[arg(long, default_value_t = 0.3)]
    pub feature_noise: f64,

    /// Injected random edges (or removals) as a fraction of |E|.
    #[arg(long, default_value_t = 0.0)]
    pub ptb_rate: f64,
    /// Share of the perturbation budget spent on additions.
    #[arg(long, default_value_t = 1.0)]
    pub add_fraction: f64,

    #[arg(long, default_value_t = 0.01)]
    pub label_rate: f64,
    /// Validation nodes; defaults to min(500, N/10).
    #[arg(long)]
    pub val_size: Option<usize>,
    /// Test nodes; defaults to min(1000, N/2).
    #[arg(long)]
    pub test_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(a: &PrepareArgs) -> Result<()> {
    let files = match (&a.cora_dir, &a.content, &a.cites) {
        (Some(dir), _, _) => Some((dir.join("cora.content"), dir.join("cora.cites"))),
        (None, Some(c), Some(e)) => Some((c.clone(), e.clone())),
        _ => None,
    };
    let graph = match files {
        Some((content, cites)) => {
            let (g, stats) = load_cora(&content, &cites)?;
            if stats.dangling_citations > 0 {
                warn!("skipped {} citations to unknown papers", stats.dangling_citations);
            }
            g
        }
        None => generate_planted_partition(&PlantedPartition {
            num_nodes: a.nodes,
            num_classes: a.classes,
            p_in: a.p_in,
            p_out: a.p_out,
            feature_dim: a.feature_dim,
            feature_noise: a.feature_noise,
            seed: a.seed,
        })?,
    };
    let (graph, noise) = if a.ptb_rate > 0.0 {
        let (g, record) = inject_random_noise(&graph, a.ptb_rate, a.add_fraction, a.seed)?;
        (g, Some(record))
    } else {
        (graph, None)
    };
    let n = graph.num_nodes();
    let val = a.val_size.unwrap_or(500.min(n / 10));
    let test = a.test_size.unwrap_or(1000.min(n / 2));
    let graph = split_labels(&graph, a.label_rate, val, test, a.seed)?;
    save_dataset(&a.out, &graph, noise.as_ref())?;

    println!(
        "N={n} |E|={} d={} C={} label_rate={} train={} val={} test={}",
        graph.num_edges(),
        graph.num_features(),
        graph.num_classes(),
        a.label_rate,
        graph.train().len(),
        val,
        test
    );
    if let Some(r) = &noise {
        println!("noise: +{} -{} edges", r.added_edges.len(), r.removed_edges.len());
    }
    if graph.train().is_empty() {
        return Err(CliError::Usage(format!("label rate {} selects no training nodes", a.label_rate)));
    }
    Ok(())
}
