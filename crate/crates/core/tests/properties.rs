use proptest::prelude::*;
use rsgnn::gnnclf::{build_smoothness_mask, loss_smoothness, normalize_adjacency};
use rsgnn::graphdata::{AttributedGraph, Masks};
use rsgnn::linkpred::reconstruction::{edge_weight, NegativeSampler};
use rsgnn::linkpred::{build_candidates, CandidateSets, LearnedGraph, PairUniverse, Provenance, ReconstructionProblem};
use rsgnn::numcore::{softmax_rows, DenseMatrix};
use rsgnn::rng;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(-2.0f64..2.0, rows * cols).prop_map(move |d| DenseMatrix::new(rows, cols, d).unwrap())
}

/// Random graph on 4..12 nodes with features, labels and a train mask.
fn arb_graph() -> impl Strategy<Value = AttributedGraph> {
    (4usize..12).prop_flat_map(|n| {
        (
            matrix(n, 3),
            prop::collection::vec((0..n, 0..n), 0..3 * n),
            prop::collection::vec(0usize..2, n),
            prop::collection::btree_set(0..n, 1..n),
        )
            .prop_map(move |(x, edges, labels, train)| {
                let (g, _) = AttributedGraph::new(x, edges, labels.into_iter().map(Some).collect(), 2).unwrap();
                g.with_masks(Masks {
                    train: train.into_iter().collect(),
                    val: vec![],
                    test: vec![],
                })
                .unwrap()
            })
    })
}

fn arb_learned() -> impl Strategy<Value = (AttributedGraph, LearnedGraph, f64)> {
    (arb_graph(), 0usize..4, 0.0f64..0.9).prop_flat_map(|(g, k, t_l)| {
        let cands = match k {
            0 => CandidateSets::empty(g.num_nodes()),
            k => build_candidates(g.features(), k).unwrap(),
        };
        let universe = PairUniverse::new(&g, &cands);
        prop::collection::vec(-0.5f64..1.5, universe.len()).prop_map(move |scores| {
            let learned = LearnedGraph::from_scores(&universe, &scores, t_l);
            (g.clone(), learned, t_l)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reconstruction_loss_is_nonnegative(g in arb_graph(), sigma in 0.01f64..10.0, q in 1usize..4, seed in 0u64..100) {
        let mut problem = ReconstructionProblem::new(&g, sigma, q).unwrap();
        let negs = problem.draw(&mut rng::seeded(seed, 6));
        let z = rsgnn::numcore::glorot_uniform(g.num_nodes(), 4, &mut rng::seeded(seed, 1));
        let l = problem.loss(&z, &negs);
        prop_assert!(l >= 0.0 && l.is_finite());
    }

    #[test]
    fn edge_weight_is_symmetric_and_nonnegative(z in matrix(6, 3), i in 0usize..6, j in 0usize..6) {
        prop_assume!(i != j);
        let a = edge_weight(&z, i, j).unwrap();
        prop_assert_eq!(a, edge_weight(&z, j, i).unwrap());
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn learned_graph_invariants((g, learned, t_l) in arb_learned()) {
        let original = g.edge_set();
        let mut prev = None;
        for e in learned.edges() {
            prop_assert!(e.u < e.v);
            prop_assert!(prev < Some((e.u, e.v)), "edges sorted and unique");
            prev = Some((e.u, e.v));
            prop_assert!(e.weight > t_l && e.weight <= 1.0);
            prop_assert_eq!(e.provenance == Provenance::KeptOriginal, original.contains(&(e.u, e.v)));
            prop_assert_eq!(learned.weight(e.v, e.u), Some(e.weight));
        }
        let tsv = learned.to_tsv();
        let back = LearnedGraph::parse_tsv(&tsv, g.num_nodes(), t_l, std::path::Path::new("x")).unwrap();
        prop_assert_eq!(back, learned);
    }

    #[test]
    fn normalized_adjacency_is_symmetric((_g, learned, _t) in arb_learned()) {
        let a = normalize_adjacency(&learned.to_sparse()).to_dense();
        let n = a.rows();
        for i in 0..n {
            prop_assert!(a.get(i, i) > 0.0);
            for j in 0..n {
                prop_assert!((a.get(i, j) - a.get(j, i)).abs() < 1e-15);
                prop_assert!(a.get(i, j) >= 0.0 && a.get(i, j) <= 1.0);
            }
        }
    }

    #[test]
    fn smoothness_is_nonnegative((g, learned, _t) in arb_learned(), t_h in 0.0f64..1.0, seed in 0u64..50) {
        let mask = build_smoothness_mask(&learned, t_h);
        prop_assert!(mask.entries.iter().all(|e| e.weight > t_h));
        let probs = softmax_rows(&rsgnn::numcore::glorot_uniform(g.num_nodes(), 2, &mut rng::seeded(seed, 0)));
        prop_assert!(loss_smoothness(&probs, &mask, &g) >= 0.0);
    }

    #[test]
    fn candidates_follow_node_relabeling(x in matrix(9, 3), k in 1usize..8, perm in Just((0..9).collect::<Vec<usize>>()).prop_shuffle()) {
        // node i of the permuted matrix is node perm[i] of the original
        let mut y = DenseMatrix::zeros(9, 3);
        for i in 0..9 {
            y.row_mut(i).copy_from_slice(x.row(perm[i]));
        }
        let cx = build_candidates(&x, k).unwrap();
        let cy = build_candidates(&y, k).unwrap();
        // random continuous features have no ties, so the sets map exactly
        for i in 0..9 {
            let mut mapped: Vec<usize> = cy.of(i).iter().map(|&j| perm[j]).collect();
            let mut want = cx.of(perm[i]).to_vec();
            mapped.sort();
            want.sort();
            prop_assert_eq!(mapped, want);
        }
    }
}

#[test]
fn empty_candidate_sets_leave_only_original_pairs() {
    let (g, _) = AttributedGraph::new(DenseMatrix::zeros(4, 2), vec![(0, 1), (2, 3)], vec![None; 4], 2).unwrap();
    let u = PairUniverse::new(&g, &CandidateSets::empty(4));
    assert_eq!(u.pairs(), &[(0, 1), (2, 3)]);
}

/// Chi-square statistic of `counts` against a uniform expectation.
fn chi_square(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}

#[test]
fn negative_draws_are_uniform_over_non_neighbors() {
    // node 0 has neighbors 1..=4 among 20 nodes, leaving 15 candidates
    let mut adj = vec![Vec::new(); 20];
    adj[0] = vec![1, 2, 3, 4];
    for v in 1..=4 {
        adj[v] = vec![0];
    }
    let mut sampler = NegativeSampler::new(adj);
    let mut r = rng::seeded(0, 6);
    // q = 3 takes the rejection path, q = 10 the pool path
    for q in [3, 10] {
        let mut counts = vec![0usize; 20];
        let draws = 100_000 / q;
        for _ in 0..draws {
            let d = sampler.sample(0, q, &mut r);
            assert!(!d.exhausted);
            assert_eq!(d.nodes.len(), q);
            for v in d.nodes {
                counts[v] += 1;
            }
        }
        assert!(counts[..5].iter().all(|&c| c == 0));
        let stat = chi_square(&counts[5..]);
        // 14 degrees of freedom, critical value at p = 0.001
        assert!(stat < 36.12, "q {q}: chi-square {stat}");
    }
}

#[test]
fn sampler_reports_exhaustion() {
    let adj = vec![vec![1, 2], vec![0], vec![0], vec![]];
    let d = NegativeSampler::new(adj).sample(0, 3, &mut rng::seeded(0, 0));
    assert_eq!(d.nodes, vec![3]);
    assert!(d.exhausted);
}
