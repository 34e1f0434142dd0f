use approx::assert_relative_eq;
use proptest::prelude::*;

use qstack::avqe;
use qstack::clifford;
use qstack::qec::{self, DecodingGraph, ErrorLog};
use qstack::rng;
use qstack::sampling::{self, TwoLevelModel};
use qstack::sim::{self, NoiseModel, StateVector};
use qstack::zne::{self, LevelEstimate, Method};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn noisy_evolution_preserves_norm(n in 1usize..5, layers in 1usize..5, q in 0.0f64..1.0, seed in any::<u64>()) {
        let circuit = zne::layered_ansatz(n, layers, seed).unwrap();
        let noise = NoiseModel::new(q, 0.0).unwrap();
        let mut state = StateVector::zero(n).unwrap();
        sim::evolve_noisy(&mut state, &circuit, &noise, &mut rng::stream(seed, &[1])).unwrap();
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn clifford_group_laws(n in 1usize..4, seed in any::<u64>()) {
        let mut r = rng::stream(seed, &[]);
        let a = clifford::sample_with(n, &mut r).unwrap();
        let b = clifford::sample_with(n, &mut r).unwrap();
        let c = clifford::sample_with(n, &mut r).unwrap();
        prop_assert!(a.is_symplectic());
        let ab_c = clifford::compose(&clifford::compose(&a, &b).unwrap(), &c).unwrap();
        let a_bc = clifford::compose(&a, &clifford::compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        prop_assert!(clifford::compose(&a, &clifford::invert(&a)).unwrap().is_identity());
        prop_assert!(clifford::compose(&clifford::invert(&a), &a).unwrap().is_identity());
    }

    #[test]
    fn clifford_circuit_round_trips(n in 1usize..4, seed in any::<u64>()) {
        let t = clifford::sample_uniform(n, seed).unwrap();
        let back = clifford::Tableau::from_circuit(&clifford::to_circuit(&t)).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn richardson_is_exact_on_polynomials(coeffs in prop::collection::vec(-2.0f64..2.0, 2..5)) {
        let degree = coeffs.len() - 1;
        let table: Vec<LevelEstimate> = (0..=degree)
            .map(|i| {
                let lambda = 1.0 + i as f64;
                let mean = coeffs.iter().rev().fold(0.0, |acc, c| acc * lambda + c);
                LevelEstimate { lambda, shots: 1, mean, stderr: 0.0 }
            })
            .collect();
        let fit = zne::extrapolate(&table, Method::Richardson).unwrap();
        prop_assert!((fit.e_zero - coeffs[0]).abs() < 1e-9);
    }

    #[test]
    fn fresh_circuits_never_lose(mu in 0.0f64..1.0, frac in 0.0f64..1.0, k in 1u64..1000, l in 1u64..1000) {
        let sigma2 = frac * (mu - mu * mu);
        let m = TwoLevelModel::new(mu, sigma2, k, l).unwrap();
        prop_assert!(sampling::var_scheme1(&m) >= sampling::var_scheme2(&m) - 1e-15);
    }

    #[test]
    fn samples_required_is_minimal(mu in 0.01f64..0.99, frac in 0.0f64..1.0, l in 1u64..50, target in 1e-3f64..0.1) {
        let sigma2 = frac * (mu - mu * mu);
        let n = sampling::samples_required(mu, sigma2, l, target).unwrap();
        prop_assert_eq!(n % l, 0);
        let sd = |n: u64| sampling::var_scheme1(&TwoLevelModel::new(mu, sigma2, n / l, l).unwrap()).sqrt();
        prop_assert!(sd(n) <= target * (1.0 + 1e-9));
        if n > l {
            prop_assert!(sd(n - l) > target);
        }
    }

    #[test]
    fn wrap_lands_in_range(phi in -1e4f64..1e4) {
        let w = avqe::wrap(phi);
        prop_assert!((-std::f64::consts::PI..std::f64::consts::PI).contains(&w));
        let turns = (phi - w) / std::f64::consts::TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn measurement_count_falls_with_alpha(p in 1e-6f64..0.5, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let n_lo = avqe::n_measurements(p, lo).unwrap();
        let n_hi = avqe::n_measurements(p, hi).unwrap();
        prop_assert!(n_hi <= n_lo * (1.0 + 1e-12));
    }
}

fn random_error(graph: &DecodingGraph, p: f64, seed: u64) -> Vec<usize> {
    qec::sample_errors(graph, p, p, seed).unwrap().error
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decoder_reproduces_syndrome(d in prop::sample::select(vec![3usize, 5, 7]), p in 0.0f64..0.2, seed in any::<u64>()) {
        let g = DecodingGraph::new(d, d).unwrap();
        let hot = g.syndrome(&random_error(&g, p, seed));
        let forest = qec::grow_clusters(&g, &hot);
        prop_assert!(forest.sweeps <= 2 * g.n_edges());
        let tree = qec::spanning_forest(&g, &forest);
        let (correction, _) = qec::peel(&g, &tree, &hot);
        prop_assert_eq!(g.syndrome(&correction), hot);
        let tree_edges: Vec<usize> = tree.iter().map(|t| t.edge).collect();
        prop_assert!(correction.iter().all(|e| tree_edges.contains(e)));
    }

    #[test]
    fn spanning_forest_is_a_forest(d in prop::sample::select(vec![3usize, 5]), p in 0.0f64..0.3, seed in any::<u64>()) {
        let g = DecodingGraph::new(d, d).unwrap();
        let hot = g.syndrome(&random_error(&g, p, seed));
        let forest = qec::grow_clusters(&g, &hot);
        let tree = qec::spanning_forest(&g, &forest);
        // Count components of the grown subgraph touching at least one edge.
        let mut parent: Vec<usize> = (0..g.n_vertices()).collect();
        fn find(p: &mut [usize], mut v: usize) -> usize {
            while p[v] != v { v = p[v]; }
            v
        }
        let mut touched = vec![false; g.n_vertices()];
        for e in (0..g.n_edges()).filter(|&e| forest.is_grown(e)) {
            let (a, b) = g.endpoints(e);
            touched[a] = true;
            touched[b] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let vertices = touched.iter().filter(|&&t| t).count();
        let components = (0..g.n_vertices()).filter(|&v| touched[v] && find(&mut parent, v) == v).count();
        prop_assert_eq!(tree.len(), vertices - components);
    }

    #[test]
    fn error_log_is_an_involution(edges in prop::collection::vec(0usize..100, 0..40)) {
        let mut log = ErrorLog::new();
        log.apply(&edges);
        log.apply(&edges);
        prop_assert!(log.is_empty());
    }
}

#[test]
fn measurement_count_limit_is_continuous() {
    let p = 1e-3;
    let at_one = avqe::n_measurements(p, 1.0).unwrap();
    assert_relative_eq!(avqe::n_measurements(p, 1.0 - 1e-9).unwrap(), at_one, max_relative = 1e-6);
}
