use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::Args;
use log::{info, warn};
use rayon::prelude::*;
use rsgnn::graphdata::{load_dataset, mean_std, write_edge_file, AttributedGraph, NoiseRecord};
use rsgnn::trainer::{train_with_noise, TrainConfig, Variant};

use crate::error::{read_file, write_file, CliError, Result};

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const THREADS_ENV: &str = "RSGNN_THREADS";

/// Every list flag takes comma-separated values; the run grid is their
/// cross product.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Prepared dataset directory.
    #[arg(long)]
    pub data: PathBuf,
    /// Output directory for per-run folders and the aggregate table.
    #[arg(long)]
    pub out: PathBuf,
    /// Base configuration (JSON); list flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "full")]
    pub variant: Vec<Variant>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub seed: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub sigma: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub t_l: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub t_h: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub learning_rate: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub max_epochs: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub patience: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub predictor_hidden: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub gcn_hidden: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub dropout: Vec<f64>,
    /// Worker threads; falls back to RSGNN_THREADS, then the processor count.
    #[arg(long)]
    pub threads: Option<usize>,
}

/// One grid point: a configuration (seed unset) plus the labels of the axes
/// that vary.
#[derive(Debug, Clone)]
struct Setting {
    config: TrainConfig,
    label: Vec<String>,
}

fn expand<T: Copy + Display>(
    settings: Vec<Setting>,
    name: &str,
    values: &[T],
    set: impl Fn(&mut TrainConfig, T),
) -> Vec<Setting> {
    if values.is_empty() {
        return settings;
    }
    let mut out = Vec::with_capacity(settings.len() * values.len());
    for s in settings {
        for &v in values {
            let mut next = s.clone();
            set(&mut next.config, v);
            if values.len() > 1 {
                next.label.push(format!("{name}{v}"));
            }
            out.push(next);
        }
    }
    out
}

fn grid(a: &RunArgs, base: TrainConfig) -> Vec<Setting> {
    let mut s = vec![Setting {
        config: base,
        label: Vec::new(),
    }];
    s = expand(s, "alpha", &a.alpha, |c, v| c.alpha = v);
    s = expand(s, "beta", &a.beta, |c, v| c.beta = v);
    s = expand(s, "sigma", &a.sigma, |c, v| c.sigma = v);
    s = expand(s, "q", &a.q, |c, v| c.q = v);
    s = expand(s, "k", &a.k, |c, v| c.k = v);
    s = expand(s, "t-l", &a.t_l, |c, v| c.t_l = v);
    s = expand(s, "t-h", &a.t_h, |c, v| c.t_h = v);
    s = expand(s, "lr", &a.learning_rate, |c, v| c.learning_rate = v);
    s = expand(s, "epochs", &a.max_epochs, |c, v| c.max_epochs = v);
    s = expand(s, "patience", &a.patience, |c, v| c.patience = v);
    s = expand(s, "ph", &a.predictor_hidden, |c, v| c.predictor_hidden = v);
    s = expand(s, "gh", &a.gcn_hidden, |c, v| c.gcn_hidden = v);
    s = expand(s, "dropout", &a.dropout, |c, v| c.dropout = v);
    let mut out = Vec::with_capacity(s.len() * a.variant.len());
    for &variant in &a.variant {
        for point in &s {
            let mut next = point.clone();
            next.config.variant = variant;
            out.push(next);
        }
    }
    out
}

fn thread_count(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return Ok(n.max(1));
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        return v
            .trim()
            .parse::<usize>()
            .map(|n| n.max(1))
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV}={v:?} is not a thread count")));
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

struct Job {
    setting: usize,
    run_id: String,
    config: TrainConfig,
}

/// Best-validation and test accuracy, or the failure message.
type Outcome = std::result::Result<(f64, f64), String>;

fn execute(job: &Job, g: &AttributedGraph, noise: Option<&NoiseRecord>, out: &Path) -> Result<Outcome> {
    let dir = out.join(&job.run_id);
    write_file(&dir.join("config.json"), job.config.to_json())?;
    write_file(&dir.join("input_edges.tsv"), write_edge_file(g.edges()))?;
    if let Some(n) = noise {
        let json = serde_json::to_string_pretty(n).expect("noise record serializes") + "\n";
        write_file(&dir.join("noise_record.json"), json)?;
    }
    let error_path = dir.join("error.txt");
    match train_with_noise(g, &job.config, noise) {
        Ok(t) => {
            write_file(&dir.join("report.json"), t.report.to_json() + "\n")?;
            write_file(&dir.join("epochs.csv"), t.report.epochs_csv())?;
            write_file(&dir.join("learned_graph.tsv"), t.learned.to_tsv())?;
            if error_path.exists() {
                std::fs::remove_file(&error_path).map_err(|e| CliError::write(&error_path, e))?;
            }
            info!("{}: val {:.4} test {:.4}", job.run_id, t.report.best_val_acc, t.report.test_acc);
            Ok(Ok((t.report.best_val_acc, t.report.test_acc)))
        }
        Err(e) => {
            warn!("{} failed: {e}", job.run_id);
            write_file(&error_path, format!("{e}\n"))?;
            Ok(Err(e.to_string()))
        }
    }
}

/// Hyperparameter columns of the aggregate table, in order.
const HYPER_COLUMNS: [&str; 13] = [
    "alpha",
    "beta",
    "sigma",
    "q",
    "k",
    "t_l",
    "t_h",
    "learning_rate",
    "max_epochs",
    "patience",
    "predictor_hidden",
    "gcn_hidden",
    "dropout",
];

fn hyper_values(c: &TrainConfig) -> Vec<String> {
    vec![
        c.alpha.to_string(),
        c.beta.to_string(),
        c.sigma.to_string(),
        c.q.to_string(),
        c.k.to_string(),
        c.t_l.to_string(),
        c.t_h.to_string(),
        c.learning_rate.to_string(),
        c.max_epochs.to_string(),
        c.patience.to_string(),
        c.predictor_hidden.to_string(),
        c.gcn_hidden.to_string(),
        c.dropout.to_string(),
    ]
}

struct Row {
    variant: Variant,
    hyper: Vec<String>,
    seeds: Vec<u64>,
    test: Vec<f64>,
    val: Vec<f64>,
    failures: Vec<String>,
}

fn opt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

fn aggregate_csv(rows: &[Row]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = vec!["variant"];
    header.extend(HYPER_COLUMNS);
    header.extend([
        "seeds",
        "runs",
        "failures",
        "test_mean",
        "test_std",
        "val_mean",
        "val_std",
        "gap_vs_plain_gcn",
        "failure_reasons",
    ]);
    w.write_record(&header).expect("in-memory write");
    for r in rows {
        let (tm, ts) = mean_std(&r.test);
        let (vm, vs) = mean_std(&r.val);
        let gap = if r.variant == Variant::PlainGcn {
            f64::NAN
        } else {
            rows.iter()
                .find(|p| p.variant == Variant::PlainGcn && p.hyper == r.hyper)
                .map_or(f64::NAN, |p| tm - mean_std(&p.test).0)
        };
        let seeds: Vec<String> = r.seeds.iter().map(u64::to_string).collect();
        let mut rec = vec![r.variant.name().to_string()];
        rec.extend(r.hyper.iter().cloned());
        rec.extend([
            seeds.join(";"),
            (r.test.len() + r.failures.len()).to_string(),
            r.failures.len().to_string(),
            opt(tm),
            opt(ts),
            opt(vm),
            opt(vs),
            opt(gap),
            r.failures.join(" | "),
        ]);
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn run(a: &RunArgs) -> Result<()> {
    if a.seed.is_empty() {
        return Err(CliError::Usage("at least one seed is required".into()));
    }
    if a.variant.is_empty() {
        return Err(CliError::Usage("at least one variant is required".into()));
    }
    let base = match &a.config {
        Some(p) => TrainConfig::from_json(&read_file(p)?)?,
        None => TrainConfig::default(),
    };
    let settings = grid(a, base);
    for s in &settings {
        s.config.validate()?;
    }
    let (g, noise) = load_dataset(&a.data)?;
    if g.train().is_empty() {
        return Err(CliError::Usage(format!("{} has no training nodes", a.data.display())));
    }

    let jobs: Vec<Job> = settings
        .iter()
        .enumerate()
        .flat_map(|(k, s)| {
            a.seed.iter().map(move |&seed| {
                let mut config = s.config.clone();
                config.seed = seed;
                let mut parts = vec![config.variant.name().to_string()];
                parts.extend(s.label.iter().cloned());
                parts.push(format!("seed{seed}"));
                Job {
                    setting: k,
                    run_id: parts.join("-"),
                    config,
                }
            })
        })
        .collect();
    let threads = thread_count(a.threads)?;
    println!(
        "grid: {} settings x {} seeds = {} runs on {threads} threads",
        settings.len(),
        a.seed.len(),
        jobs.len()
    );

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Outcome> = pool.install(|| {
        jobs.par_iter()
            .map(|job| execute(job, &g, noise.as_ref(), &a.out))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut rows: Vec<Row> = settings
        .iter()
        .map(|s| Row {
            variant: s.config.variant,
            hyper: hyper_values(&s.config),
            seeds: a.seed.clone(),
            test: Vec::new(),
            val: Vec::new(),
            failures: Vec::new(),
        })
        .collect();
    for (job, outcome) in jobs.iter().zip(&outcomes) {
        let row = &mut rows[job.setting];
        match outcome {
            Ok((val, test)) => {
                row.val.push(*val);
                row.test.push(*test);
            }
            Err(msg) => row.failures.push(format!("seed {}: {msg}", job.config.seed)),
        }
    }
    let table = aggregate_csv(&rows);
    write_file(&a.out.join(AGGREGATE_FILE), &table)?;
    print!("{table}");

    let failed = outcomes.iter().filter(|o| o.is_err()).count();
    if failed == outcomes.len() {
        return Err(CliError::Runtime(format!("all {failed} runs failed")));
    }
    if failed > 0 {
        eprintln!("warning: {failed} of {} runs failed", outcomes.len());
    }
    Ok(())
}
