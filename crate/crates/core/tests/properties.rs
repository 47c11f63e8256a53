use bgl::graph::{
    check_consistency, greedy_balance, laplacian_balance_check, positive_counterpart,
    two_coloring_balance_check, GeneralizedLaplacian, SignedGraph,
};
use bgl::learn::{learn_balanced_laplacian, LearnConfig, SampleCovariance};
use bgl::lp::{max_violation, solve_l1_lp, HalfSpace};
use bgl::pocs::{pocs_feasible, project_halfspace, PocsConfig, PocsOutcome};
use bgl::synth::{f_measure, gen_balanced_er_graph, relative_error, SynthSpec, FM_EPS};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-5.0..5.0f64, n)
}

fn halfspace(n: usize) -> impl Strategy<Value = HalfSpace> {
    (vector(n), -3.0..3.0f64)
        .prop_filter("nonzero normal", |(c, _)| c.iter().any(|v| v.abs() > 1e-3))
        .prop_map(|(c, b)| HalfSpace::new(DVector::from_vec(c), b).unwrap())
}

/// Symmetric weights with a random sign per edge and sparse support.
fn signed_graph() -> impl Strategy<Value = SignedGraph> {
    (2usize..12).prop_flat_map(|n| {
        proptest::collection::vec((any::<bool>(), -1.0..1.0f64), n * n).prop_map(move |cells| {
            let mut w = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    let (keep, v) = cells[i * n + j];
                    if keep {
                        w[(i, j)] = v;
                        w[(j, i)] = v;
                    }
                }
                w[(i, i)] = cells[i * n + i].1.abs();
            }
            SignedGraph::new(w).unwrap()
        })
    })
}

fn synth_spec() -> impl Strategy<Value = SynthSpec> {
    (2usize..30, 0.05..0.9f64, any::<u64>()).prop_map(|(n, p, seed)| SynthSpec {
        n,
        p,
        seed,
        ..Default::default()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_idempotent((h, x) in (1usize..6).prop_flat_map(|n| (halfspace(n), vector(n)))) {
        let x = DVector::from_vec(x);
        let p = project_halfspace(&x, &h);
        prop_assert!(h.violation(&p) <= 1e-10);
        prop_assert!((project_halfspace(&p, &h) - &p).amax() <= 1e-12);
    }

    #[test]
    fn pocs_feasible_points_satisfy_the_system(
        (hs, x0) in (1usize..6).prop_flat_map(|n| (proptest::collection::vec(halfspace(n), 1..10), vector(n)))
    ) {
        let cfg = PocsConfig::default();
        if let PocsOutcome::Feasible(x) = pocs_feasible(&hs, &DVector::from_vec(x0), &cfg) {
            prop_assert!(max_violation(&hs, &x) <= cfg.violation_tol);
        }
    }

    #[test]
    fn lp_solutions_are_feasible_and_no_worse_than_a_known_point(
        (normals, x0, slack) in (1usize..6).prop_flat_map(|n| (
            proptest::collection::vec(vector(n), 1..12),
            vector(n),
            proptest::collection::vec(0.0..1.0f64, 12),
        ))
    ) {
        let x0 = DVector::from_vec(x0);
        let hs: Vec<HalfSpace> = normals
            .into_iter()
            .filter(|c| c.iter().any(|v| v.abs() > 1e-3))
            .zip(slack)
            .map(|(c, s)| {
                let c = DVector::from_vec(c);
                let b = c.dot(&x0) + s;
                HalfSpace::new(c, b).unwrap()
            })
            .collect();
        let x = solve_l1_lp(&hs, x0.len()).unwrap();
        prop_assert!(max_violation(&hs, &x) <= 1e-8);
        prop_assert!(x.lp_norm(1) <= x0.lp_norm(1) + 1e-8);
    }

    #[test]
    fn generated_graphs_are_balanced(spec in synth_spec()) {
        let g = gen_balanced_er_graph(&spec).unwrap();
        prop_assert!(check_consistency(g.laplacian(), g.polarity()).unwrap());
        let beta = laplacian_balance_check(g.laplacian());
        prop_assert!(beta.is_some());
        prop_assert!(check_consistency(g.laplacian(), &beta.unwrap()).unwrap());
    }

    #[test]
    fn greedy_balance_output_is_balanced(g in signed_graph(), seed in any::<u64>()) {
        let b = greedy_balance(&g, seed);
        prop_assert!(check_consistency(b.laplacian(), b.polarity()).unwrap());
        prop_assert!(laplacian_balance_check(b.laplacian()).is_some());
        // only edges are removed, never added or rescaled
        let w = g.weights();
        for (i, j, v) in b.laplacian().edges() {
            prop_assert_eq!(w[(i, j)], v);
        }
    }

    #[test]
    fn two_coloring_certifies_itself(g in signed_graph()) {
        if let Some(beta) = two_coloring_balance_check(&g) {
            prop_assert!(check_consistency(&g.laplacian(), &beta).unwrap());
        }
    }

    #[test]
    fn counterpart_keeps_diagonal_and_spectrum(spec in synth_spec()) {
        let b = gen_balanced_er_graph(&spec).unwrap();
        let (lp, t) = positive_counterpart(&b);
        prop_assert_eq!(lp.matrix().diagonal(), b.laplacian().matrix().diagonal());
        prop_assert_eq!(&t.conjugate(lp.matrix()), b.laplacian().matrix());
        let mut a: Vec<f64> = b.laplacian().matrix().clone().symmetric_eigenvalues().iter().copied().collect();
        let mut c: Vec<f64> = lp.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
        a.sort_by(f64::total_cmp);
        c.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&c) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn adjacency_round_trip(g in signed_graph()) {
        let l = g.laplacian();
        let back = GeneralizedLaplacian::from_adjacency(&l.to_adjacency()).unwrap();
        prop_assert!((back.matrix() - l.matrix()).amax() < 1e-12);
    }

    #[test]
    fn metrics_properties(spec in synth_spec(), alpha in -3.0..3.0f64) {
        let l = gen_balanced_er_graph(&spec).unwrap().laplacian().matrix().clone();
        prop_assume!(l.norm() > 0.0);
        prop_assert_eq!(f_measure(&l, &l, FM_EPS).unwrap(), 1.0);
        let re = relative_error(&(&l * alpha), &l).unwrap();
        prop_assert!((re - (alpha - 1.0).abs()).abs() < 1e-12);
    }

    #[test]
    fn diagonal_covariance_learns_no_edges(d in proptest::collection::vec(0.1..10.0f64, 1..6)) {
        let n = d.len();
        let c = SampleCovariance::new(DMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { 0.0 })).unwrap();
        let out = learn_balanced_laplacian(&c, &LearnConfig::default()).unwrap();
        let m = out.balanced.laplacian().matrix();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    prop_assert!(m[(i, j)].abs() <= 1e-9);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn learned_graphs_are_balanced_and_symmetric(seed in any::<u64>(), n in 3usize..9) {
        use bgl::learn::sample_covariance;
        use bgl::synth::{gen_pd_balanced_er_graph, sample_gmrf};
        let (g, _) = gen_pd_balanced_er_graph(&SynthSpec { n, p: 0.4, seed, ..Default::default() }, 1000).unwrap();
        let c = sample_covariance(&sample_gmrf(g.laplacian(), 20 * n, seed ^ 1).unwrap()).unwrap();
        let out = learn_balanced_laplacian(&c, &LearnConfig::default()).unwrap();
        let m = out.balanced.laplacian().matrix();
        prop_assert_eq!(m, &m.transpose());
        prop_assert!(check_consistency(out.balanced.laplacian(), out.balanced.polarity()).unwrap());
        prop_assert!(laplacian_balance_check(out.balanced.laplacian()).is_some());
        for i in 0..n {
            prop_assert!(m[(i, i)] >= 0.0);
        }
        for (i, col) in out.columns.iter().enumerate() {
            let mut r = c.matrix() * col;
            r[i] -= 1.0;
            prop_assert!(r.amax() <= out.rhos[i] + 1e-7);
        }
    }
}
