use crate::error::Result;
use crate::gnnclf::{
    build_smoothness_mask, classification_loss_and_grad, gcn_backward, gcn_forward_cached, gcn_regime,
    smoothness_loss_and_grad, Dropout, GcnCache, GcnParams, NormalizedAdjacency, SmoothnessMask,
};
use crate::graphdata::AttributedGraph;
use crate::linkpred::{
    build_candidates, clamped_weight, embed_backward, embed_cached, CandidateSets, EmbedCache,
    LearnedGraph, LinkPredictorParams, NegativeSet, PairUniverse, ReconstructionProblem,
};
use crate::numcore::{dot, softmax_backward, softmax_rows, DenseMatrix, ParamStore, RegimeHasher};
use crate::rng::{self, Rng};

use super::config::{apply_variant, Flags, TrainConfig};

/// Parameter handles of one model; the values live in a [`ParamStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelParams {
    pub predictor: Option<LinkPredictorParams>,
    pub classifier: GcnParams,
}

impl ModelParams {
    /// Fresh store with Glorot-uniform weights and zero biases. Each
    /// parameter set draws from its own seeded stream.
    pub fn init(g: &AttributedGraph, cfg: &TrainConfig) -> Result<(ParamStore, Self)> {
        let flags = apply_variant(cfg);
        let mut store = ParamStore::new();
        let predictor = if flags.learn_structure {
            let mut r = rng::seeded(cfg.seed, rng::stream::INIT_PREDICTOR);
            let h = cfg.predictor_hidden;
            Some(LinkPredictorParams::init(&mut store, g.num_features(), h, h, &mut r)?)
        } else {
            None
        };
        let mut r = rng::seeded(cfg.seed, rng::stream::INIT_CLASSIFIER);
        let classifier = GcnParams::init(&mut store, g.num_features(), cfg.gcn_hidden, g.num_classes(), &mut r)?;
        Ok((store, Self { predictor, classifier }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Losses {
    pub l_gnn: f64,
    pub l_e: f64,
    pub l_u: f64,
    pub total: f64,
}

/// Structure learning state for one forward pass.
#[derive(Debug)]
struct StructurePass {
    encoder: EmbedCache,
    scores: Vec<f64>,
    /// Universe index of every learned edge.
    kept: Vec<usize>,
    s: crate::numcore::SparseWeighted,
    norm: NormalizedAdjacency,
    mask: SmoothnessMask,
    grad_z_recon: Option<DenseMatrix>,
    grad_t: Vec<f64>,
}

/// Everything the backward pass needs.
#[derive(Debug)]
pub struct Forward {
    pub losses: Losses,
    pub learned: LearnedGraph,
    pub logits: DenseMatrix,
    /// Fingerprint of every branch the objective takes; `None` unless asked.
    pub regime: Option<u64>,
    structure: Option<StructurePass>,
    gcn: GcnCache,
    probs: DenseMatrix,
    grad_logits: DenseMatrix,
    grad_probs_u: DenseMatrix,
}

/// The joint objective `L_GNN + α·L_E + β·L_u` for one graph and config.
#[derive(Debug, Clone)]
pub struct Objective<'g> {
    g: &'g AttributedGraph,
    flags: Flags,
    alpha: f64,
    beta: f64,
    t_l: f64,
    t_h: f64,
    candidates: CandidateSets,
    universe: PairUniverse,
    raw: NormalizedAdjacency,
    recon: Option<ReconstructionProblem>,
}

impl<'g> Objective<'g> {
    pub fn new(g: &'g AttributedGraph, cfg: &TrainConfig) -> Result<Self> {
        cfg.validate()?;
        let flags = apply_variant(cfg);
        let candidates = if flags.densify {
            build_candidates(g.features(), cfg.k)?
        } else {
            CandidateSets::empty(g.num_nodes())
        };
        let universe = PairUniverse::new(g, &candidates);
        let recon = if flags.learn_structure {
            Some(ReconstructionProblem::new(g, cfg.sigma, cfg.q)?)
        } else {
            None
        };
        Ok(Self {
            g,
            flags,
            alpha: if flags.learn_structure { cfg.alpha } else { 0.0 },
            beta: cfg.effective_beta(),
            t_l: cfg.t_l,
            t_h: cfg.t_h,
            candidates,
            universe,
            raw: NormalizedAdjacency::new(&g.to_sparse()),
            recon,
        })
    }

    pub fn graph(&self) -> &AttributedGraph {
        self.g
    }

    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn candidates(&self) -> &CandidateSets {
        &self.candidates
    }

    pub fn universe(&self) -> &PairUniverse {
        &self.universe
    }

    /// Fresh negatives, or `None` when there is no link predictor.
    pub fn draw_negatives(&mut self, rng: &mut Rng) -> Option<NegativeSet> {
        self.recon.as_mut().map(|r| r.draw(rng))
    }

    fn propagate(&self) -> Option<&crate::numcore::SparseWeighted> {
        self.flags.gcn_encoder.then(|| self.raw.a_hat())
    }

    /// The raw graph as a learned graph (every edge kept at weight 1).
    fn raw_learned(&self) -> LearnedGraph {
        LearnedGraph::from_scores(&self.universe, &vec![1.0; self.universe.len()], 0.0)
    }

    /// Learned graph for the current predictor parameters.
    pub fn learned_graph(&self, store: &ParamStore, model: &ModelParams) -> Result<LearnedGraph> {
        match &model.predictor {
            None => Ok(self.raw_learned()),
            Some(p) => {
                let z = embed_cached(store, p, self.g.features(), self.propagate())?.z;
                Ok(LearnedGraph::from_scores(&self.universe, &self.universe.scores(&z), self.t_l))
            }
        }
    }

    pub fn forward(
        &self,
        store: &ParamStore,
        model: &ModelParams,
        negatives: Option<&NegativeSet>,
        dropout: Option<Dropout<'_>>,
        track_regime: bool,
    ) -> Result<Forward> {
        let x = self.g.features();
        let mut regime = track_regime.then(RegimeHasher::default);
        let mut structure = None;
        let learned = match &model.predictor {
            None => self.raw_learned(),
            Some(p) => {
                let encoder = embed_cached(store, p, x, self.propagate())?;
                let scores = self.universe.scores(&encoder.z);
                let learned = LearnedGraph::from_scores(&self.universe, &scores, self.t_l);
                let kept: Vec<usize> = (0..scores.len())
                    .filter(|&k| clamped_weight(scores[k]) > self.t_l)
                    .collect();
                if let Some(h) = regime.as_mut() {
                    crate::linkpred::mlp::hidden_regime(&encoder, h);
                    for &s in &scores {
                        let w = clamped_weight(s);
                        h.push(w > self.t_l);
                        h.push(s < 1.0);
                        h.push(w > self.t_h);
                    }
                }
                let s = learned.to_sparse();
                let norm = NormalizedAdjacency::new(&s);
                let mask = if self.flags.smooth {
                    build_smoothness_mask(&learned, self.t_h)
                } else {
                    SmoothnessMask::default()
                };
                structure = Some(StructurePass {
                    encoder,
                    scores,
                    kept,
                    s,
                    norm,
                    mask,
                    grad_z_recon: None,
                    grad_t: Vec::new(),
                });
                learned
            }
        };
        let a_hat = structure.as_ref().map_or(self.raw.a_hat(), |sp| sp.norm.a_hat());
        let gcn = gcn_forward_cached(store, &model.classifier, a_hat, x, dropout)?;
        if let Some(h) = regime.as_mut() {
            gcn_regime(&gcn, h);
        }
        let (l_gnn, grad_logits) = classification_loss_and_grad(&gcn.logits, self.g)?;
        let probs = softmax_rows(&gcn.logits);
        let mut losses = Losses {
            l_gnn,
            ..Default::default()
        };
        let mut grad_probs_u = DenseMatrix::zeros(0, 0);
        if let Some(sp) = structure.as_mut() {
            let (l_u, gp, gt) = smoothness_loss_and_grad(&probs, &sp.mask, self.g);
            losses.l_u = l_u;
            grad_probs_u = gp;
            sp.grad_t = gt;
            let recon = self.recon.as_ref().expect("predictor implies reconstruction");
            if let Some(negs) = negatives {
                let z = &sp.encoder.z;
                if self.alpha > 0.0 {
                    let (l_e, gz) = recon.loss_and_grad(z, negs);
                    losses.l_e = l_e;
                    sp.grad_z_recon = Some(gz);
                } else {
                    losses.l_e = recon.loss(z, negs);
                }
                if let Some(h) = regime.as_mut() {
                    for (k, &(i, j)) in recon.positives().iter().enumerate() {
                        h.push(dot(z.row(i), z.row(j)) > 0.0);
                        for &n in negs.for_positive(k).0 {
                            h.push(dot(z.row(i), z.row(n)) > 0.0);
                        }
                    }
                }
            }
        }
        losses.total = losses.l_gnn + self.alpha * losses.l_e + self.beta * losses.l_u;
        Ok(Forward {
            losses,
            learned,
            logits: gcn.logits.clone(),
            regime: regime.map(RegimeHasher::finish),
            structure,
            gcn,
            probs,
            grad_logits,
            grad_probs_u,
        })
    }

    /// Accumulates `d total / dθ` for both parameter sets into `store`.
    pub fn backward(&self, store: &mut ParamStore, model: &ModelParams, fwd: &Forward) -> Result<()> {
        let x = self.g.features();
        let mut grad_logits = fwd.grad_logits.clone();
        if let Some(sp) = &fwd.structure {
            if self.beta > 0.0 && !sp.mask.is_empty() {
                grad_logits.add_scaled(self.beta, &softmax_backward(&fwd.probs, &fwd.grad_probs_u)?)?;
            }
        }
        let a_hat = fwd.structure.as_ref().map_or(self.raw.a_hat(), |sp| sp.norm.a_hat());
        let grad_a = gcn_backward(store, &model.classifier, a_hat, x, &fwd.gcn, &grad_logits)?;
        let (Some(p), Some(sp)) = (&model.predictor, &fwd.structure) else {
            return Ok(());
        };
        let z = &sp.encoder.z;
        let mut grad_z = match &sp.grad_z_recon {
            Some(gz) => {
                let mut g = gz.clone();
                g.scale(self.alpha);
                g
            }
            None => DenseMatrix::zeros(z.rows(), z.cols()),
        };
        // dL/dS per learned edge, both directions summed
        let mut grad_c = vec![0.0; fwd.learned.edges().len()];
        let grad_s = sp.norm.backward(&sp.s, &grad_a);
        for (&(i, j, _), g) in sp.s.entries().iter().zip(grad_s) {
            let e = fwd.learned.position(i, j).expect("S entries come from the learned graph");
            grad_c[e] += g;
        }
        for (entry, gt) in sp.mask.entries.iter().zip(&sp.grad_t) {
            grad_c[entry.edge] += self.beta * gt;
        }
        // c = min(1, relu(s)); kept pairs have s > T_l ≥ 0
        for (e, &k) in sp.kept.iter().enumerate() {
            if sp.scores[k] >= 1.0 || grad_c[e] == 0.0 {
                continue;
            }
            let (i, j) = self.universe.pairs()[k];
            let gs = grad_c[e];
            for c in 0..z.cols() {
                let (zi, zj) = (z.get(i, c), z.get(j, c));
                grad_z.row_mut(i)[c] += gs * zj;
                grad_z.row_mut(j)[c] += gs * zi;
            }
        }
        embed_backward(store, p, x, &sp.encoder, &grad_z, self.propagate())
    }
}
