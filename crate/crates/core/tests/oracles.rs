mod common;

use common::oracles::{self as o, to_mat};
use rsgnn::gnnclf::{
    build_smoothness_mask, gcn_forward, loss_classification, loss_smoothness, normalize_adjacency, GcnParams,
};
use rsgnn::graphdata::{AttributedGraph, Masks};
use rsgnn::linkpred::{
    build_candidates, build_learned_graph, embed, loss_reconstruction, CandidateSets, LearnedGraph,
    LinkPredictorParams, PairUniverse, Provenance, ReconstructionProblem,
};
use rsgnn::numcore::{glorot_uniform, softmax_rows, DenseMatrix, ParamStore};
use rsgnn::rng;

const TOL: f64 = 1e-10;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * b.abs().max(1.0)
}

fn graph(x: DenseMatrix, edges: Vec<(usize, usize)>, labels: Vec<usize>, classes: usize, train: Vec<usize>) -> AttributedGraph {
    let (g, _) = AttributedGraph::new(x, edges, labels.into_iter().map(Some).collect(), classes).unwrap();
    g.with_masks(Masks {
        train,
        val: vec![],
        test: vec![],
    })
    .unwrap()
}

fn eight_node_graph() -> AttributedGraph {
    let x = glorot_uniform(8, 4, &mut rng::seeded(17, 0));
    let edges = vec![(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 6), (0, 7)];
    graph(x, edges, vec![0, 0, 0, 1, 1, 1, 0, 1], 2, vec![0, 4])
}

/// Predictor with weights scaled up so scores spread across [0, 1] and beyond.
fn predictor(g: &AttributedGraph, seed: u64, scale: f64) -> (ParamStore, LinkPredictorParams) {
    let mut store = ParamStore::new();
    let p = LinkPredictorParams::init(&mut store, g.num_features(), 6, 5, &mut rng::seeded(seed, 4)).unwrap();
    for id in [p.w1, p.w2] {
        store.value_mut(id).scale(scale);
    }
    let mut r = rng::seeded(seed, 9);
    for id in [p.b1, p.b2] {
        let cols = store.value(id).cols();
        *store.value_mut(id) = glorot_uniform(1, cols, &mut r);
    }
    (store, p)
}

fn oracle_embedding(store: &ParamStore, p: &LinkPredictorParams, g: &AttributedGraph) -> o::Mat {
    let row = |id| to_mat(store.value(id)).remove(0);
    o::mlp(
        &to_mat(g.features()),
        &to_mat(store.value(p.w1)),
        &row(p.b1),
        &to_mat(store.value(p.w2)),
        &row(p.b2),
    )
}

#[test]
fn embedding_matches_mlp_oracle() {
    let g = eight_node_graph();
    let (store, p) = predictor(&g, 1, 2.0);
    let z = to_mat(&embed(&store, &p, g.features()).unwrap());
    let want = oracle_embedding(&store, &p, &g);
    for (a, b) in z.iter().flatten().zip(want.iter().flatten()) {
        assert!(close(*a, *b), "{a} vs {b}");
    }
}

/// Regroups a library negative set into the oracle's `[node][neighbor]` layout.
fn oracle_negatives(problem: &ReconstructionProblem, negs: &rsgnn::linkpred::NegativeSet, n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new(); n];
    for (k, &(i, _)) in problem.positives().iter().enumerate() {
        out[i].push(negs.for_positive(k).0.to_vec());
    }
    out
}

#[test]
fn reconstruction_with_frozen_negatives() {
    let g = eight_node_graph();
    for (seed, sigma, q) in [(0, 1.0, 2), (1, 0.5, 3), (2, 2.0, 1), (3, 0.05, 2)] {
        let (store, p) = predictor(&g, seed, 1.5);
        let mut problem = ReconstructionProblem::new(&g, sigma, q).unwrap();
        let negs = problem.draw(&mut rng::seeded(seed, 6));
        let z = embed(&store, &p, g.features()).unwrap();
        let got = problem.loss(&z, &negs);
        let want = o::reconstruction_loss(
            &to_mat(g.features()),
            &oracle_embedding(&store, &p, &g),
            g.edges(),
            &oracle_negatives(&problem, &negs, 8),
            sigma,
        );
        assert!(close(got, want), "sigma {sigma}: {got} vs {want}");
        assert!(got > 0.0);
    }
}

#[test]
fn reconstruction_entry_point_uses_the_same_negative_draw() {
    let g = eight_node_graph();
    let (store, p) = predictor(&g, 5, 1.5);
    let got = loss_reconstruction(&store, &p, &g, 1.0, 2, &mut rng::seeded(5, 6)).unwrap();
    let mut problem = ReconstructionProblem::new(&g, 1.0, 2).unwrap();
    let negs = problem.draw(&mut rng::seeded(5, 6));
    let want = o::reconstruction_loss(
        &to_mat(g.features()),
        &oracle_embedding(&store, &p, &g),
        g.edges(),
        &oracle_negatives(&problem, &negs, 8),
        1.0,
    );
    assert!(close(got, want), "{got} vs {want}");
}

#[test]
fn negatives_exclude_self_and_neighbors() {
    let g = eight_node_graph();
    let adj = g.adjacency();
    let mut problem = ReconstructionProblem::new(&g, 1.0, 3).unwrap();
    let negs = problem.draw(&mut rng::seeded(8, 6));
    for (k, &(i, _)) in problem.positives().iter().enumerate() {
        let (nodes, _) = negs.for_positive(k);
        assert_eq!(nodes.len(), 3);
        let mut sorted = nodes.to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 3, "duplicates for positive {k}");
        assert!(nodes.iter().all(|&n| n != i && !adj[i].contains(&n)));
    }
}

#[test]
fn learned_graph_matches_oracle() {
    let g = eight_node_graph();
    let cands = build_candidates(g.features(), 2).unwrap();
    let cand_lists: Vec<Vec<usize>> = (0..8).map(|i| cands.of(i).to_vec()).collect();
    assert_eq!(cand_lists, o::candidates(&to_mat(g.features()), 2));
    for (seed, scale, t_l) in [(0, 1.0, 0.1), (1, 2.0, 0.1), (2, 3.0, 0.5), (3, 0.7, 0.0)] {
        let (store, p) = predictor(&g, seed, scale);
        let learned = build_learned_graph(&store, &p, &g, &cands, t_l).unwrap();
        let want = o::learned_graph(&oracle_embedding(&store, &p, &g), g.edges(), &cand_lists, t_l);
        assert_eq!(learned.edges().len(), want.len(), "seed {seed}");
        for (e, (&(u, v), &(w, orig))) in learned.edges().iter().zip(&want) {
            assert_eq!((e.u, e.v), (u, v));
            assert!(close(e.weight, w), "({u},{v}): {} vs {w}", e.weight);
            assert_eq!(e.provenance == Provenance::KeptOriginal, orig);
        }
    }
}

#[test]
fn candidates_match_exhaustive_ranking_on_fifty_nodes() {
    let mut x = glorot_uniform(50, 6, &mut rng::seeded(21, 0));
    // duplicated rows and a zero row exercise tie-breaking and the zero-norm case
    let dup = x.row(3).to_vec();
    x.row_mut(10).copy_from_slice(&dup);
    x.row_mut(11).copy_from_slice(&dup);
    x.row_mut(20).fill(0.0);
    for k in [1, 5, 10, 49] {
        let c = build_candidates(&x, k).unwrap();
        let want = o::candidates(&to_mat(&x), k);
        for (i, w) in want.iter().enumerate() {
            assert_eq!(c.of(i), &w[..], "k {k} node {i}");
        }
    }
}

fn five_node_three_class() -> AttributedGraph {
    let x = glorot_uniform(5, 3, &mut rng::seeded(4, 0));
    graph(x, vec![(0, 1), (1, 2), (3, 4)], vec![2, 0, 1, 2, 0], 3, vec![0, 2, 4])
}

#[test]
fn classification_matches_oracle() {
    let g = five_node_three_class();
    let labels: Vec<usize> = g.labels().iter().map(|l| l.unwrap()).collect();
    let rows = [
        vec![0.3, -1.2, 2.0],
        vec![5.0, 5.0, 5.0],
        vec![-40.0, 30.0, 1.0],
        vec![0.0, 0.0, 0.0],
        vec![700.0, 699.0, -3.0],
    ];
    let logits = DenseMatrix::new(5, 3, rows.concat()).unwrap();
    let got = loss_classification(&logits, &g).unwrap();
    // the last row would overflow a naive exp, so the oracle sees it shifted
    let mut shifted = to_mat(&logits);
    shifted[4].iter_mut().for_each(|v| *v -= 700.0);
    let want = o::cross_entropy(&shifted, &labels, g.train());
    assert!(close(got, want), "{got} vs {want}");

    let random = glorot_uniform(5, 3, &mut rng::seeded(5, 0));
    let got = loss_classification(&random, &g).unwrap();
    assert!(close(got, o::cross_entropy(&to_mat(&random), &labels, g.train())));
}

#[test]
fn smoothness_matches_dense_oracle() {
    let x = glorot_uniform(4, 2, &mut rng::seeded(6, 0));
    let g = graph(x, vec![(0, 1), (1, 2), (2, 3), (0, 3)], vec![0, 1, 0, 1], 2, vec![1]);
    let universe = PairUniverse::new(&g, &CandidateSets::empty(4));
    // pairs in order (0,1), (0,3), (1,2), (2,3)
    let learned = LearnedGraph::from_scores(&universe, &[0.95, 0.5, 0.81, 1.3], 0.1);
    let t_h = 0.8;
    let mask = build_smoothness_mask(&learned, t_h);
    let mut t = vec![vec![0.0; 4]; 4];
    for e in learned.edges() {
        if e.weight > t_h {
            t[e.u][e.v] = e.weight;
            t[e.v][e.u] = e.weight;
        }
    }
    for seed in 0..4 {
        let probs = softmax_rows(&glorot_uniform(4, 2, &mut rng::seeded(seed, 1)));
        let got = loss_smoothness(&probs, &mask, &g);
        let want = o::smoothness(&to_mat(&probs), &t, g.train());
        assert!(close(got, want), "{got} vs {want}");
        assert!(got > 0.0);
    }
    let p = to_mat(&softmax_rows(&glorot_uniform(4, 2, &mut rng::seeded(0, 1))));
    assert!(o::smoothness(&p, &t, &[0, 1, 2, 3]) == 0.0);
}

#[test]
fn normalization_and_gcn_match_dense_oracles() {
    let g = eight_node_graph();
    let universe = PairUniverse::new(&g, &build_candidates(g.features(), 2).unwrap());
    let scores: Vec<f64> = (0..universe.len()).map(|k| 0.05 + 0.1 * (k % 11) as f64).collect();
    let learned = LearnedGraph::from_scores(&universe, &scores, 0.1);
    let s = learned.to_sparse();
    let a = normalize_adjacency(&s);
    let want = o::normalized(&to_mat(&s.to_dense()));
    let dense = to_mat(&a.to_dense());
    for (x, y) in dense.iter().flatten().zip(want.iter().flatten()) {
        assert!(close(*x, *y), "{x} vs {y}");
    }

    let mut store = ParamStore::new();
    let p = GcnParams::init(&mut store, 4, 3, 2, &mut rng::seeded(0, 5)).unwrap();
    let (_, logits) = gcn_forward(&store, &p, &a, g.features()).unwrap();
    let want = o::gcn(&want, &to_mat(g.features()), &to_mat(store.value(p.w1)), &to_mat(store.value(p.w2)));
    for (x, y) in to_mat(&logits).iter().flatten().zip(want.iter().flatten()) {
        assert!(close(*x, *y), "{x} vs {y}");
    }
}
