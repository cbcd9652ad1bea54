mod common;

use common::*;
use graphpum::community::expand_overlap;
use graphpum::metrics::jaccard_vertices;
use graphpum::pum::{local_interpolant, reference_signal};
use graphpum::{
    detect_communities, gbf_kernel, katz_centrality, run_pipeline, spd_solve, sym_eigen, DenseSymMatrix,
    DetectionParams, Graph, KatzParams, KernelParams, Signal, VertexSet,
};
use proptest::prelude::*;

/// Connected graph from a random spanning tree plus extra edges.
fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let parents = (1..n).map(|v| 0..v).collect::<Vec<_>>();
        let extra = proptest::collection::vec((0..n, 0..n), 0..2 * n);
        (parents, extra).prop_map(move |(parents, extra)| {
            let mut edges: Vec<(usize, usize)> = parents.into_iter().enumerate().map(|(i, p)| (p, i + 1)).collect();
            edges.extend(extra.into_iter().filter(|(u, v)| u != v));
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn graph_and_samples(max_n: usize) -> impl Strategy<Value = (Graph, VertexSet)> {
    connected_graph(max_n).prop_flat_map(|g| {
        let n = g.vertex_count();
        let ids = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n);
        (Just(g), ids.prop_map(VertexSet::from_unsorted))
    })
}

fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    let edges: Vec<_> = g.edges().map(|(u, v)| (perm[u], perm[v])).collect();
    Graph::from_edges(g.vertex_count(), &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_annihilates_constants(g in connected_graph(40)) {
        let l = g.laplacian();
        let ones = vec![1.0; g.vertex_count()];
        for x in l.mul_vec(&ones) {
            prop_assert!(x.abs() < 1e-12);
        }
    }

    #[test]
    fn degree_sum_is_twice_edges(g in connected_graph(60)) {
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }

    #[test]
    fn two_hop_contains_one_hop(g in connected_graph(40), v in 0usize..40) {
        let v = v % g.vertex_count();
        let n1 = g.neighborhood(v, 1).unwrap();
        let n2 = g.neighborhood(v, 2).unwrap();
        prop_assert_eq!(n1.difference(&n2).len(), 0);
        prop_assert!(!n2.contains(v));
    }

    #[test]
    fn jaccard_is_symmetric(g in connected_graph(30), u in 0usize..30, v in 0usize..30) {
        let n = g.vertex_count();
        let (u, v) = (u % n, v % n);
        let a = jaccard_vertices(&g, u, v).unwrap();
        prop_assert_eq!(a, jaccard_vertices(&g, v, u).unwrap());
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn eigen_reconstructs(g in connected_graph(50)) {
        let l = g.laplacian();
        let e = sym_eigen(&l).unwrap();
        prop_assert!(e.orthogonality_error() < 1e-10);
        let back = e.map_spectrum(|x| x);
        prop_assert!(back.max_abs_diff(&l) < 1e-9 * l.max_abs().max(1.0));
        prop_assert!(e.values().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn kernel_is_decreasing_in_lambda(eps in 0.01f64..2.0, s in 0.5f64..3.0, a in 0.0f64..10.0, b in 0.0f64..10.0) {
        let p = KernelParams::new(eps, s).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(p.profile(lo) >= p.profile(hi));
        prop_assert!(p.profile(hi) > 0.0);
    }

    #[test]
    fn kernel_spectrum_matches_profile(g in connected_graph(30), eps in 0.05f64..1.0, s in 0.5f64..3.0) {
        let l = g.laplacian();
        let p = KernelParams::new(eps, s).unwrap();
        let k = gbf_kernel(&l, &p).unwrap();
        let mut want: Vec<f64> = sym_eigen(&l).unwrap().values().iter().map(|&x| p.profile(x)).collect();
        want.sort_by(f64::total_cmp);
        let got = sym_eigen(&k).unwrap();
        let scale = want.last().copied().unwrap();
        prop_assert!(max_abs_diff(got.values(), &want) <= 1e-10 * scale);
    }

    #[test]
    fn katz_series_increases_to_closed_form(g in connected_graph(30), t in 0.1f64..0.9) {
        let alpha = t / g.max_degree() as f64;
        let closed = katz_centrality(&g, &KatzParams::closed_form(alpha)).unwrap();
        let mut prev = vec![0.0; g.vertex_count()];
        for terms in 1..8 {
            let partial = katz_centrality(&g, &KatzParams::truncated(alpha, terms)).unwrap();
            for ((p, q), c) in prev.iter().zip(&partial).zip(&closed) {
                prop_assert!(q >= p);
                prop_assert!(*q <= c + 1e-12);
            }
            prev = partial;
        }
    }

    #[test]
    fn locality((g, w) in graph_and_samples(30), bump in -5.0f64..5.0) {
        // a local fit only reads sample values inside its subdomain
        let cover = detect_communities(&g, &w, &DetectionParams::default()).unwrap();
        let y = reference_signal(&g).unwrap();
        let c = &cover.communities[0];
        let outside: Vec<usize> = (0..g.vertex_count()).filter(|&v| !c.subdomain().contains(v)).collect();
        let mut changed = y.values().to_vec();
        for &v in &outside {
            changed[v] += bump;
        }
        let y2 = Signal::new(changed).unwrap();
        let p = KernelParams::default();
        let a = local_interpolant(&g, c, &y, &p).unwrap();
        let b = local_interpolant(&g, c, &y2, &p).unwrap();
        prop_assert_eq!(a.values, b.values);
    }

    #[test]
    fn detection_is_deterministic((g, w) in graph_and_samples(40)) {
        let dp = DetectionParams::default();
        let a = detect_communities(&g, &w, &dp).unwrap();
        let b = detect_communities(&g, &w, &dp).unwrap();
        prop_assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let again = expand_overlap(&g, a.clone(), &dp).unwrap();
        prop_assert_eq!(again.communities, a.communities);
    }

    #[test]
    fn pipeline_is_exact_on_samples((g, w) in graph_and_samples(40)) {
        let y = reference_signal(&g).unwrap();
        let (_, r) = run_pipeline(&g, &y, &w, &DetectionParams::default(), &KernelParams::default()).unwrap();
        let scale = y.values().iter().map(|x| x.abs()).fold(1e-300, f64::max);
        for v in w.iter() {
            prop_assert!((r.approximant().get(v) - y.get(v)).abs() <= 1e-6 * scale);
        }
    }

    #[test]
    fn kernel_is_permutation_equivariant(g in connected_graph(25), seed in any::<u64>()) {
        let n = g.vertex_count();
        let mut rng = common::Rng::new(seed);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.below(i + 1));
        }
        let h = relabel(&g, &perm);
        let p = KernelParams::default();
        let kg = gbf_kernel(&g.laplacian(), &p).unwrap();
        let kh = gbf_kernel(&h.laplacian(), &p).unwrap();
        let scale = kg.max_abs();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((kg.get(i, j) - kh.get(perm[i], perm[j])).abs() <= 1e-9 * scale);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spd_solve_recovers_solution(n in 1usize..=200, seed in any::<u64>()) {
        let mut rng = common::Rng::new(seed);
        let r: Vec<f64> = (0..n * n).map(|_| rng.unit() * 2.0 - 1.0).collect();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| r[k * n + i] * r[k * n + j]).sum();
                m[i * n + j] = dot + if i == j { 1.0 } else { 0.0 };
            }
        }
        let m = DenseSymMatrix::from_row_major(n, m).unwrap();
        let x: Vec<f64> = (0..n).map(|_| rng.unit() * 2.0 - 1.0).collect();
        let b = m.mul_vec(&x);
        let got = spd_solve(&m, &b).unwrap();
        let err = max_abs_diff(&got, &x) / x.iter().map(|v| v.abs()).fold(1e-300, f64::max);
        prop_assert!(err <= 1e-8, "relative error {err:e}");
    }
}
