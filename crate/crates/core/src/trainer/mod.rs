//! Joint end-to-end training of the link predictor and the GCN classifier,
//! with validation-based early stopping and ablation variants.

pub mod config;
pub mod objective;
pub mod report;

use log::{debug, info};

use crate::error::{Error, Result};
use crate::gnnclf::{gcn_forward, normalize_adjacency, Dropout};
use crate::graphdata::{uninvolved_rate, AttributedGraph, NoiseRecord};
use crate::linkpred::{LearnedGraph, Provenance};
use crate::numcore::{adam_step, DenseMatrix, ParamStore, SparseWeighted};
use crate::rng;

pub use config::{apply_variant, Flags, TrainConfig, Variant};
pub use objective::{Forward, Losses, ModelParams, Objective};
pub use report::{
    auc, bin_of, group_weights, histogram_csv, weight_histograms, Accuracy, EdgeWeights, EpochRecord,
    GroupStats, LearnedCounts, RunReport, StopReason, WeightHistograms, HISTOGRAM_BINS,
};

/// A total loss above this is treated as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e8;

/// Result of [`train`]: best-validation parameters, the learned graph they
/// induce, and the run report.
#[derive(Debug, Clone)]
pub struct Trained {
    pub store: ParamStore,
    pub model: ModelParams,
    pub learned: LearnedGraph,
    pub report: RunReport,
}

/// Argmax accuracy per mask; ties go to the lowest class index. An empty
/// mask scores 0.
pub fn accuracy_from_logits(logits: &DenseMatrix, g: &AttributedGraph) -> Accuracy {
    let pred = logits.argmax_rows();
    let acc = |rows: &[usize]| {
        if rows.is_empty() {
            return 0.0;
        }
        let hits = rows.iter().filter(|&&i| g.labels()[i] == Some(pred[i])).count();
        hits as f64 / rows.len() as f64
    };
    let m = g.masks();
    Accuracy {
        train: acc(&m.train),
        val: acc(&m.val),
        test: acc(&m.test),
    }
}

/// Accuracy of the classifier on the weighted graph `s`.
pub fn evaluate(store: &ParamStore, model: &ModelParams, g: &AttributedGraph, s: &SparseWeighted) -> Result<Accuracy> {
    let a_hat = normalize_adjacency(s);
    let (_, logits) = gcn_forward(store, &model.classifier, &a_hat, g.features())?;
    Ok(accuracy_from_logits(&logits, g))
}

fn check_losses(l: &objective::Losses, epoch: usize) -> Result<()> {
    for (name, v) in [("L_GNN", l.l_gnn), ("L_E", l.l_e), ("L_u", l.l_u), ("total loss", l.total)] {
        if v.is_nan() {
            return Err(Error::Numeric(format!("{name} is NaN at epoch {epoch}")));
        }
    }
    if !(l.total <= DIVERGENCE_LIMIT) {
        return Err(Error::Numeric(format!(
            "diverged at epoch {epoch}: total loss {} exceeds {DIVERGENCE_LIMIT:e} (L_GNN {}, L_E {}, L_u {})",
            l.total, l.l_gnn, l.l_e, l.l_u
        )));
    }
    Ok(())
}

pub fn train(g: &AttributedGraph, cfg: &TrainConfig) -> Result<Trained> {
    train_with_noise(g, cfg, None)
}

/// Trains and, when the injected-noise ground truth is known, splits the
/// learned-weight histograms into clean and noisy original edges.
pub fn train_with_noise(g: &AttributedGraph, cfg: &TrainConfig, noise: Option<&NoiseRecord>) -> Result<Trained> {
    cfg.validate()?;
    if g.train().is_empty() {
        return Err(Error::Config("training mask is empty".into()));
    }
    let mut objective = Objective::new(g, cfg)?;
    let flags = objective.flags();
    let (mut store, model) = ModelParams::init(g, cfg)?;
    let adam = cfg.adam();
    let mut neg_rng = rng::seeded(cfg.seed, rng::stream::NEGATIVES);
    let mut drop_rng = rng::seeded(cfg.seed, rng::stream::DROPOUT);

    let mut epochs = Vec::new();
    let mut best: Option<(usize, f64, ParamStore)> = None;
    let mut stop_reason = StopReason::MaxEpochs;
    let mut negatives_exhausted = 0;
    for epoch in 0..cfg.max_epochs {
        let negatives = objective.draw_negatives(&mut neg_rng);
        if let Some(n) = &negatives {
            negatives_exhausted = n.exhausted;
        }
        let dropout = (cfg.dropout > 0.0).then_some(Dropout {
            rate: cfg.dropout,
            rng: &mut drop_rng,
        });
        let fwd = objective.forward(&store, &model, negatives.as_ref(), dropout, false)?;
        check_losses(&fwd.losses, epoch)?;
        let acc = if cfg.dropout > 0.0 {
            let clean = objective.forward(&store, &model, None, None, false)?;
            accuracy_from_logits(&clean.logits, g)
        } else {
            accuracy_from_logits(&fwd.logits, g)
        };
        let l = fwd.losses;
        epochs.push(EpochRecord {
            epoch,
            l_gnn: l.l_gnn,
            l_e: l.l_e,
            l_u: l.l_u,
            total: l.total,
            train_acc: acc.train,
            val_acc: acc.val,
            test_acc: acc.test,
        });
        debug!(
            "epoch {epoch}: total {:.6} L_GNN {:.6} L_E {:.6} L_u {:.6} val {:.4}",
            l.total, l.l_gnn, l.l_e, l.l_u, acc.val
        );
        match &best {
            Some((_, v, _)) if acc.val <= *v => {}
            _ => best = Some((epoch, acc.val, store.clone())),
        }
        let best_epoch = best.as_ref().map_or(0, |b| b.0);
        if epoch - best_epoch >= cfg.patience {
            stop_reason = StopReason::Patience;
            break;
        }
        objective.backward(&mut store, &model, &fwd)?;
        adam_step(&mut store, &adam)?;
    }
    let (best_epoch, best_val_acc, best_store) = best.expect("at least one epoch runs");
    let store = best_store;
    let learned = objective.learned_graph(&store, &model)?;

    let mut counts = LearnedCounts::default();
    for e in learned.edges() {
        match e.provenance {
            Provenance::KeptOriginal => counts.kept_original += 1,
            Provenance::Densified => counts.densified += 1,
        }
    }
    counts.dropped_original = g.num_edges() - counts.kept_original;
    let after = g.with_edges(learned.edges().iter().map(|e| (e.u, e.v)))?;
    let report = RunReport {
        config: cfg.clone(),
        flags,
        num_nodes: g.num_nodes(),
        test_acc: epochs[best_epoch].test_acc,
        epochs,
        best_epoch,
        best_val_acc,
        stop_reason,
        learned: counts,
        histograms: weight_histograms(&learned, g.edges(), noise),
        uninvolved_before: uninvolved_rate(g, 2)?,
        uninvolved_after: uninvolved_rate(&after, 2)?,
        negatives_exhausted,
    };
    info!(
        "{} seed {}: best epoch {best_epoch}, val {:.4}, test {:.4}",
        cfg.variant, cfg.seed, best_val_acc, report.test_acc
    );
    Ok(Trained {
        store,
        model,
        learned,
        report,
    })
}
