mod common;

use lirgomax::gmatrix::{pagerank, Direction, GoogleOperator, IterOptions};
use lirgomax::reduced::{compute_reduced, ComplementSolver, ReducedOptions, SubsetSpec};
use lirgomax::response::{self, PumpSpec, ResponseOptions, ResponseVector, SensitivitySpec};
use lirgomax::{oracle, vecops, DirectedGraph, LoadOptions};
use proptest::prelude::*;

fn graph_strategy() -> impl Strategy<Value = DirectedGraph> {
    (3usize..40)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((0..n as u32, 0..n as u32), 0..6 * n),
            )
        })
        .prop_map(|(n, edges)| DirectedGraph::from_edges(n, edges, LoadOptions::default()).unwrap())
}

fn alpha_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(0.85), Just(0.95)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_matches_dense_matrix(g in graph_strategy(), alpha in alpha_strategy(), seed in any::<u64>()) {
        let op = GoogleOperator::forward(&g, alpha).unwrap();
        let dense = oracle::dense_google(&g, alpha, 100).unwrap();
        let mut rng = common::rng(seed);
        let x: Vec<f64> = (0..g.n_nodes()).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        prop_assert!(vecops::linf_dist(&op.apply(&x).unwrap(), &dense.matvec(&x)) < 1e-14);
        let mut dense_t = lirgomax::DenseMatrix::zeros(g.n_nodes(), g.n_nodes());
        for i in 0..g.n_nodes() {
            for j in 0..g.n_nodes() {
                dense_t[(i, j)] = dense[(j, i)];
            }
        }
        prop_assert!(vecops::linf_dist(&op.apply_transpose(&x).unwrap(), &dense_t.matvec(&x)) < 1e-14);
    }

    #[test]
    fn cheirank_is_pagerank_of_transpose(g in graph_strategy(), alpha in alpha_strategy()) {
        let op = GoogleOperator::new(&g, alpha, Direction::Transposed).unwrap();
        let chei = pagerank(&op, &IterOptions::default()).unwrap().value;
        let dense = oracle::dense_google(&g.transpose(), alpha, 100).unwrap();
        prop_assert!(vecops::linf_dist(chei.values(), &oracle::dense_pagerank(&dense).unwrap()) < 1e-10);
    }

    #[test]
    fn projection_commutes_with_operator(g in graph_strategy(), alpha in alpha_strategy(), seed in any::<u64>()) {
        let op = GoogleOperator::forward(&g, alpha).unwrap();
        let p0 = pagerank(&op, &IterOptions::default()).unwrap().value;
        let mut rng = common::rng(seed);
        let x: Vec<f64> = (0..g.n_nodes()).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
        let qx = response::project_biorthogonal(&x, &p0).unwrap();
        let lhs = response::project_biorthogonal(&op.apply(qx.values()).unwrap(), &p0).unwrap();
        let rhs = response::project_biorthogonal(&op.apply(&x).unwrap(), &p0).unwrap();
        // Exact up to sum(x) Q(G P0 - P0), which is bounded by the stationarity residual.
        let residual: Vec<f64> = op.apply(p0.values()).unwrap().iter().zip(p0.values()).map(|(a, b)| a - b).collect();
        let bound = vecops::sum(&x).abs() * (vecops::linf_norm(&residual) + vecops::l1_norm(&residual))
            + 1e-14 * vecops::l1_norm(&x).max(1.0);
        prop_assert!(vecops::linf_dist(lhs.values(), rhs.values()) <= bound);
    }

    #[test]
    fn response_is_linear_in_the_pump(g in graph_strategy(), scale in 0.1f64..10.0) {
        let n = g.n_nodes();
        let op = GoogleOperator::forward(&g, 0.85).unwrap();
        let p0 = pagerank(&op, &IterOptions::default()).unwrap().value;
        let pump = PumpSpec::balanced_pair(&p0, 0, n - 1).unwrap();
        let solve = |spec: &PumpSpec| {
            let v0 = response::pump_general_v0(&op, &p0, spec).unwrap();
            response::solve_linear_response(&op, &p0, &v0, &ResponseOptions::default()).unwrap().value
        };
        let base = solve(&pump);
        let scaled = solve(&pump.scaled(scale).unwrap());
        let expected: Vec<f64> = base.values().iter().map(|v| v * scale).collect();
        prop_assert!(vecops::linf_dist(scaled.values(), &expected) < 1e-9 * scale.max(1.0));
    }

    #[test]
    fn sensitivity_matches_dense(g in graph_strategy(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let n = g.n_nodes();
        let (target, source) = (a.index(n), b.index(n));
        let op = GoogleOperator::forward(&g, 0.85).unwrap();
        let p0 = pagerank(&op, &IterOptions::default()).unwrap().value;
        let v0 = response::sensitivity_v0(&op, &p0, SensitivitySpec { target, source }).unwrap();
        let p1 = response::solve_linear_response(&op, &p0, &v0, &ResponseOptions::default()).unwrap().value;
        let dense = oracle::dense_google(&g, 0.85, 100).unwrap();
        let p0d = oracle::dense_pagerank(&dense).unwrap();
        let g1 = oracle::dense_sensitivity_g1(&dense, target, source);
        let v0d = g1.matvec(&p0d);
        prop_assert!(vecops::linf_dist(v0.values(), &v0d) < 1e-12);
        let exact = oracle::dense_linear_response(&dense, &v0d).unwrap();
        prop_assert!(vecops::linf_dist(p1.values(), &exact) < 1e-10);
    }

    #[test]
    fn reduced_matches_dense(g in graph_strategy(), pick in prop::collection::vec(any::<prop::sample::Index>(), 1..6)) {
        let n = g.n_nodes();
        let mut nodes: Vec<usize> = pick.iter().map(|i| i.index(n)).collect();
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.len() == n {
            nodes.pop();
        }
        let op = GoogleOperator::forward(&g, 0.85).unwrap();
        let r = compute_reduced(&op, &SubsetSpec::new(nodes.clone(), n).unwrap(), &ReducedOptions::default()).unwrap();
        let dense = oracle::dense_google(&g, 0.85, 100).unwrap();
        prop_assert!(r.gr.max_abs_diff(&oracle::dense_reduced(&dense, &nodes).unwrap()) < 1e-10);
        prop_assert!(r.grr.max_abs_diff(&dense.select(&nodes, &nodes)) < 1e-15);
        let lambda = r.lambda_c.unwrap();
        prop_assert!(lambda > 0.0 && lambda < 1.0);
    }
}

#[test]
fn complement_resolvent_matches_dense() {
    let mut rng = common::rng(31);
    for _ in 0..10 {
        let g = common::random_instance(&mut rng, 20..=80);
        let n = g.n_nodes();
        let nodes = common::random_subset(&mut rng, n, 4);
        let op = GoogleOperator::forward(&g, 0.85).unwrap();
        let subset = SubsetSpec::new(nodes.clone(), n).unwrap();
        let solver = ComplementSolver::new(&op, &subset, IterOptions::default()).unwrap();
        let dense = oracle::dense_google(&g, 0.85, 100).unwrap();
        let inverse = oracle::dense_complement_resolvent(&dense, &nodes).unwrap();
        let complement: Vec<usize> = (0..n).filter(|k| !nodes.contains(k)).collect();
        // Column of Gsr for the first subset node.
        let b: Vec<f64> = (0..n)
            .map(|k| {
                if nodes.contains(&k) {
                    0.0
                } else {
                    dense[(k, nodes[0])]
                }
            })
            .collect();
        let col = solver.resolvent(&b).unwrap();
        let x: Vec<f64> = col
            .leading
            .iter()
            .zip(&col.remainder)
            .map(|(a, b)| a + b)
            .collect();
        let expected = inverse.column(0);
        let got: Vec<f64> = complement.iter().map(|&k| x[k]).collect();
        assert!(vecops::linf_dist(&got, &expected) < 1e-10);
    }
}

#[test]
fn residuals_decrease_after_warmup() {
    let mut rng = common::rng(32);
    for _ in 0..10 {
        let g = common::random_instance(&mut rng, 50..=200);
        let op = GoogleOperator::forward(&g, 0.85).unwrap();
        let pr = pagerank(&op, &IterOptions::default()).unwrap();
        let (i, j) = common::distinct_pair(&mut rng, g.n_nodes());
        let v0 = response::pump_pair_v0(&op, &pr.value, i, j).unwrap();
        let p1 = response::solve_linear_response(&op, &pr.value, &v0, &ResponseOptions::default())
            .unwrap();
        for history in [&pr.history, &p1.history] {
            for w in history[5..].windows(2) {
                // Allow rounding-level wobble once the residual is tiny.
                assert!(w[1] <= w[0] || w[1] < 1e-13, "{history:?}");
            }
        }
    }
}

#[test]
fn disconnected_components_are_handled() {
    // Two 3-cycles and a dangling node.
    let g = lirgomax::graph::load_edge_list(
        "0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n".as_bytes(),
        LoadOptions::default(),
    )
    .unwrap();
    let g = DirectedGraph::from_edges(
        7,
        g.edges().map(|(a, b)| (a as u32, b as u32)).collect(),
        LoadOptions::default(),
    )
    .unwrap();
    let op = GoogleOperator::forward(&g, 0.85).unwrap();
    let p0 = pagerank(&op, &IterOptions::default()).unwrap().value;
    let dense = oracle::dense_google(&g, 0.85, 100).unwrap();
    assert!(vecops::linf_dist(p0.values(), &oracle::dense_pagerank(&dense).unwrap()) < 1e-12);
    let v0 = response::pump_pair_v0(&op, &p0, 0, 3).unwrap();
    let p1: ResponseVector =
        response::solve_linear_response(&op, &p0, &v0, &ResponseOptions::default())
            .unwrap()
            .value;
    assert!(p1.values()[..3].iter().sum::<f64>() > 0.0);
    assert!(p1.values()[3..6].iter().sum::<f64>() < 0.0);
}
