use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::graphdata::{Edge, NoiseRecord};
use crate::linkpred::{LearnedGraph, Provenance};

use super::config::{Flags, TrainConfig};

pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub l_gnn: f64,
    pub l_e: f64,
    pub l_u: f64,
    pub total: f64,
    pub train_acc: f64,
    pub val_acc: f64,
    pub test_acc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Accuracy {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Patience,
    MaxEpochs,
}

/// Weight distribution of one edge group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub counts: Vec<usize>,
    pub mean: Option<f64>,
    pub size: usize,
}

impl GroupStats {
    pub fn from_weights(weights: &[f64]) -> Self {
        let mut counts = vec![0; HISTOGRAM_BINS];
        for &w in weights {
            counts[bin_of(w)] += 1;
        }
        let mean = (!weights.is_empty()).then(|| weights.iter().sum::<f64>() / weights.len() as f64);
        Self {
            counts,
            mean,
            size: weights.len(),
        }
    }
}

/// Bin index over `[0, 1]` in `HISTOGRAM_BINS` equal bins; 1.0 lands in the last.
pub fn bin_of(w: f64) -> usize {
    ((w.clamp(0.0, 1.0) * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1)
}

/// Learned weights of original edges split into clean and injected ones
/// (a dropped original edge counts as weight 0), plus densified edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightHistograms {
    pub clean: GroupStats,
    pub noisy: GroupStats,
    pub densified: GroupStats,
    /// Probability a clean edge outweighs a noisy one (ties count half).
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights {
    pub clean: Vec<f64>,
    pub noisy: Vec<f64>,
    pub densified: Vec<f64>,
}

pub fn group_weights(learned: &LearnedGraph, original: &[Edge], noise: Option<&NoiseRecord>) -> EdgeWeights {
    let noisy_set: HashSet<Edge> = noise.map(|n| n.added_edges.iter().copied().collect()).unwrap_or_default();
    let mut out = EdgeWeights {
        clean: Vec::new(),
        noisy: Vec::new(),
        densified: Vec::new(),
    };
    for &(u, v) in original {
        let w = learned.weight(u, v).unwrap_or(0.0);
        if noisy_set.contains(&(u, v)) {
            out.noisy.push(w);
        } else {
            out.clean.push(w);
        }
    }
    out.densified = learned
        .edges()
        .iter()
        .filter(|e| e.provenance == Provenance::Densified)
        .map(|e| e.weight)
        .collect();
    out
}

pub fn weight_histograms(learned: &LearnedGraph, original: &[Edge], noise: Option<&NoiseRecord>) -> WeightHistograms {
    let w = group_weights(learned, original, noise);
    WeightHistograms {
        clean: GroupStats::from_weights(&w.clean),
        noisy: GroupStats::from_weights(&w.noisy),
        densified: GroupStats::from_weights(&w.densified),
        auc: auc(&w.clean, &w.noisy),
    }
}

/// Mann-Whitney estimate of `P(pos > neg) + ½ P(pos = neg)`; `None` if
/// either side is empty.
pub fn auc(pos: &[f64], neg: &[f64]) -> Option<f64> {
    if pos.is_empty() || neg.is_empty() {
        return None;
    }
    let mut all: Vec<(f64, bool)> = pos.iter().map(|&w| (w, true)).chain(neg.iter().map(|&w| (w, false))).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    // midranks over tie groups
    let mut rank_sum = 0.0;
    let mut k = 0;
    while k < all.len() {
        let mut end = k;
        while end + 1 < all.len() && all[end + 1].0 == all[k].0 {
            end += 1;
        }
        let mid = (k + end) as f64 / 2.0 + 1.0;
        rank_sum += all[k..=end].iter().filter(|e| e.1).count() as f64 * mid;
        k = end + 1;
    }
    let (np, nn) = (pos.len() as f64, neg.len() as f64);
    Some((rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LearnedCounts {
    pub kept_original: usize,
    pub densified: usize,
    pub dropped_original: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: TrainConfig,
    pub flags: Flags,
    pub num_nodes: usize,
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_acc: f64,
    /// Test accuracy of the best-validation parameters.
    pub test_acc: f64,
    pub stop_reason: StopReason,
    pub learned: LearnedCounts,
    pub histograms: WeightHistograms,
    pub uninvolved_before: f64,
    pub uninvolved_after: f64,
    /// Positives whose source ran out of non-neighbors in the last epoch.
    pub negatives_exhausted: usize,
}

impl RunReport {
    pub fn epochs_csv(&self) -> String {
        let mut out = String::from("epoch,l_gnn,l_e,l_u,total,train_acc,val_acc,test_acc\n");
        for e in &self.epochs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                e.epoch, e.l_gnn, e.l_e, e.l_u, e.total, e.train_acc, e.val_acc, e.test_acc
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One row per bin: `bin_start,bin_end,clean,noisy,densified`.
pub fn histogram_csv(h: &WeightHistograms) -> String {
    let mut out = String::from("bin_start,bin_end,clean,noisy,densified\n");
    for b in 0..HISTOGRAM_BINS {
        let lo = b as f64 / HISTOGRAM_BINS as f64;
        let hi = (b + 1) as f64 / HISTOGRAM_BINS as f64;
        let _ = writeln!(
            out,
            "{lo},{hi},{},{},{}",
            h.clean.counts[b], h.noisy.counts[b], h.densified.counts[b]
        );
    }
    out
}
