use epigraph_core::graph::{DetectionType, Gender, ObservedLabel, Orientation, Snapshot};
use epigraph_core::matching::{
    brute_force_match, solve_match, temporal_objective, temporal_weights, weighted_objective,
    LabelledGraph, MatchParams, MatchProblem, Matrix,
};
use epigraph_core::rng;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> (Vec<(usize, usize)>, Matrix) {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    let labels = Matrix::from_rows(
        &(0..n)
            .map(|_| vec![rng.random_range(0..2) as f64, rng.random_range(0.0..100.0)])
            .collect::<Vec<_>>(),
    );
    (edges, labels)
}

fn permuted(n: usize, edges: &[(usize, usize)], labels: &Matrix, perm: &[usize]) -> LabelledGraph {
    let e: Vec<_> = edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
    let mut l = Matrix::zeros(n, labels.cols());
    for i in 0..n {
        l.row_mut(perm[i]).copy_from_slice(labels.row(i));
    }
    LabelledGraph::from_edges(n, &e, l).unwrap()
}

#[test]
fn isomorphic_pairs_are_matched_exactly() {
    let mut rng = rng::stream(21, 0);
    let params = MatchParams {
        nu: 0.0,
        ..MatchParams::default()
    };
    for _ in 0..200 {
        let n = rng.random_range(2..=7);
        let p = rng.random_range(0.2..0.7);
        let (edges, labels) = random_graph(n, p, &mut rng);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let g = LabelledGraph::from_edges(n, &edges, labels.clone()).unwrap();
        let h = permuted(n, &edges, &labels, &perm);
        assert_eq!(brute_force_match(&g, &h, &params).unwrap().phi, 0.0);
        let r = solve_match(&g, &h, &params).unwrap();
        assert!(r.phi <= 1e-6, "n={n} edges={edges:?}: {}", r.phi);
    }
}

#[test]
fn relaxed_trace_is_nonincreasing() {
    let mut rng = rng::stream(22, 0);
    for _ in 0..50 {
        let (e1, l1) = random_graph(12, 0.3, &mut rng);
        let (e2, l2) = random_graph(10, 0.3, &mut rng);
        let g = LabelledGraph::from_edges(12, &e1, l1).unwrap();
        let h = LabelledGraph::from_edges(10, &e2, l2).unwrap();
        let r = solve_match(&g, &h, &MatchParams::default()).unwrap();
        for w in r.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        let mut seen = r.permutation.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..12).collect::<Vec<_>>());
    }
}

fn pair_strategy(
) -> impl Strategy<Value = (usize, Vec<bool>, Vec<f64>, usize, Vec<bool>, Vec<f64>, f64)> {
    (2usize..=6, 2usize..=6).prop_flat_map(|(n, m)| {
        (
            Just(n),
            prop::collection::vec(any::<bool>(), n * (n - 1) / 2),
            prop::collection::vec(0.0..10.0f64, n),
            Just(m),
            prop::collection::vec(any::<bool>(), m * (m - 1) / 2),
            prop::collection::vec(0.0..10.0f64, m),
            0.0..1.0f64,
        )
    })
}

fn build(n: usize, bits: &[bool], labels: &[f64]) -> LabelledGraph {
    let mut edges = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if bits[k] {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    let l = Matrix::from_rows(&labels.iter().map(|&x| vec![x]).collect::<Vec<_>>());
    LabelledGraph::from_edges(n, &edges, l).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn brute_force_is_a_lower_bound((n, e1, l1, m, e2, l2, nu) in pair_strategy()) {
        let g = build(n, &e1, &l1);
        let h = build(m, &e2, &l2);
        let params = MatchParams { nu, ..MatchParams::default() };
        let r = solve_match(&g, &h, &params).unwrap();
        let b = brute_force_match(&g, &h, &params).unwrap();
        prop_assert!(r.phi >= b.phi - 1e-9);
        prop_assert!(r.phi.is_finite());
        let problem = MatchProblem::new(&g, &h, &params).unwrap();
        prop_assert!((problem.objective_at(&r.permutation) - r.phi).abs() < 1e-12);
    }

    #[test]
    fn weights_are_normalised(len in 1usize..40, omega in 0.001..1.0f64) {
        let w = temporal_weights(len, omega).unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(w.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn equal_objectives_average_to_themselves(len in 1usize..20, omega in 0.01..1.0f64, phi in -1.0..1.0f64) {
        let v = weighted_objective(&vec![phi; len], omega).unwrap();
        prop_assert!((v - phi).abs() < 1e-12);
    }
}

#[test]
fn two_snapshot_weights() {
    let w = temporal_weights(2, 0.5).unwrap();
    assert!((w[0] - 1.0 / 3.0).abs() < 1e-12);
    assert!((w[1] - 2.0 / 3.0).abs() < 1e-12);
}

fn snapshot(day: f64, n: usize, edges: &[(usize, usize)]) -> Snapshot {
    Snapshot {
        day,
        vertices: (0..n)
            .map(|i| {
                (
                    i * 3,
                    ObservedLabel {
                        gender: if i % 2 == 0 {
                            Gender::Male
                        } else {
                            Gender::Female
                        },
                        orientation: Orientation::Hetero,
                        detection_time: i as f64,
                        detection_type: DetectionType::Random,
                    },
                )
            })
            .collect(),
        edges: edges.iter().map(|&(a, b)| (a * 3, b * 3)).collect(),
    }
}

#[test]
fn sequence_against_itself_is_zero_without_labels() {
    let seq = vec![
        snapshot(0.0, 0, &[]),
        snapshot(10.0, 3, &[(0, 1)]),
        snapshot(20.0, 6, &[(0, 1), (1, 2), (3, 5)]),
    ];
    let params = MatchParams {
        nu: 0.0,
        ..MatchParams::default()
    };
    let t = temporal_objective(&seq, &seq, 0.5, &params).unwrap();
    assert_eq!(t.per_snapshot.len(), 3);
    assert!(t.value.abs() < 1e-12);
}

#[test]
fn single_snapshot_reduces_to_phi() {
    let a = vec![snapshot(5.0, 4, &[(0, 1), (2, 3)])];
    let b = vec![snapshot(5.0, 3, &[(0, 2)])];
    let params = MatchParams::default();
    let t = temporal_objective(&a, &b, 0.3, &params).unwrap();
    let direct = solve_match(
        &LabelledGraph::from_snapshot(&a[0]),
        &LabelledGraph::from_snapshot(&b[0]),
        &params,
    )
    .unwrap();
    assert!((t.value - direct.phi).abs() < 1e-12);
}
