//! Monte Carlo and closed-form checks against independent reference computations.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng as _;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use qstack::avqe::{self, AqpeConfig, CandidateCache, GaussianPrior, Sampler};
use qstack::clifford::{self, PauliOp, Tableau};
use qstack::rb;
use qstack::rng;
use qstack::sampling::CircuitLaw;
use qstack::sim::{self, Circuit, Gate, NoiseModel, PauliString, StateVector};
use qstack::stack::{self, HardwareProfile};
use qstack::zne::{self, Ensemble, Scaling};

type M2 = Matrix2<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn paulis() -> [M2; 3] {
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        M2::new(o, one, one, o),
        M2::new(o, -i, i, o),
        M2::new(one, o, o, -one),
    ]
}

/// Single-qubit depolarizing channel: `ρ → (1-q)ρ + q/3 Σ PρP`.
fn depolarize(rho: &M2, q: f64) -> M2 {
    let mut out = rho * c(1.0 - q, 0.0);
    for p in paulis() {
        out += p * rho * p * c(q / 3.0, 0.0);
    }
    out
}

fn chi_square_p_value(counts: &[u64], expected: &[f64]) -> f64 {
    let stat: f64 = counts
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dof = (counts.len() - 1) as f64;
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

#[test]
fn noisy_x_chain_matches_density_matrix() {
    let q = 0.01;
    let x = paulis()[0];
    let mut rho = M2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
    for _ in 0..100 {
        rho = depolarize(&(x * rho * x), q);
    }
    let p0 = rho[(0, 0)].re;

    let circuit = Circuit::from_gates(1, (0..100).map(|_| Gate::PauliX(0))).unwrap();
    let noise = NoiseModel::new(q, 0.0).unwrap();
    let shots = 100_000u64;
    let zeros = (0..shots)
        .filter(|&s| sim::run_noisy(&circuit, &noise, s).unwrap().is_all_zero())
        .count() as f64;
    let est = zeros / shots as f64;
    let se = (p0 * (1.0 - p0) / shots as f64).sqrt();
    assert!((est - p0).abs() < 3.0 * se, "est {est}, oracle {p0}, se {se}");
}

#[test]
fn born_rule_frequencies() {
    let circuit = Circuit::from_gates(
        2,
        [
            Gate::RotationX { qubit: 0, angle: 1.1 },
            Gate::RotationX { qubit: 1, angle: 0.4 },
            Gate::Cnot { control: 0, target: 1 },
            Gate::RotationZ { qubit: 1, angle: 0.7 },
            Gate::Hadamard(1),
        ],
    )
    .unwrap();
    let state = sim::final_state(&circuit).unwrap();
    let probs = state.probabilities();
    let shots = 10_000u64;
    let mut counts = [0u64; 4];
    let mut r = rng::stream(3, &[]);
    for _ in 0..shots {
        let o = sim::measure_all(&state, 0.0, &mut r);
        let idx = o.0.iter().enumerate().map(|(q, &b)| (b as usize) << q).sum::<usize>();
        counts[idx] += 1;
    }
    let expected: Vec<f64> = probs.iter().map(|p| p * shots as f64).collect();
    assert!(chi_square_p_value(&counts, &expected) > 1e-3);
}

#[test]
fn single_gate_channel_trace_distance() {
    // Noisy Hadamard on |0⟩; reconstruct the Bloch vector from Pauli samples.
    let q = 0.2;
    let h = M2::new(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)) * c(0.5f64.sqrt(), 0.0);
    let rho0 = M2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
    let oracle = depolarize(&(h * rho0 * h.adjoint()), q);

    let circuit = Circuit::from_gates(1, [Gate::Hadamard(0)]).unwrap();
    let noise = NoiseModel::new(q, 0.0).unwrap();
    let shots = 100_000u64;
    let mut bloch = [0.0; 3];
    for (axis, label) in ["X", "Y", "Z"].iter().enumerate() {
        let pauli: PauliString = label.parse().unwrap();
        let total: i64 = (0..shots)
            .map(|s| sim::run_noisy_pauli(&circuit, &noise, &pauli, rng::derive(axis as u64, &[s])).unwrap() as i64)
            .sum();
        bloch[axis] = total as f64 / shots as f64;
    }
    let [px, py, pz] = paulis();
    let id = M2::identity();
    let est = (id + px * c(bloch[0], 0.0) + py * c(bloch[1], 0.0) + pz * c(bloch[2], 0.0)) * c(0.5, 0.0);
    // Trace distance of 2x2 Hermitian difference = |eigenvalue|.
    let d = est - oracle;
    let a = d[(0, 0)].re;
    let b = d[(0, 1)];
    let trace_distance = (a * a + b.norm_sqr()).sqrt();
    assert!(trace_distance < 0.015, "trace distance {trace_distance}");
}

fn tableau_key(t: &Tableau) -> Vec<(u8, u8, u8)> {
    t.rows().iter().map(|p| (p.x, p.z, p.phase)).collect()
}

#[test]
fn one_qubit_cliffords_are_uniform() {
    let mut counts: HashMap<Vec<(u8, u8, u8)>, u64> = HashMap::new();
    let mut r = rng::stream(11, &[]);
    let draws = 240_000u64;
    for _ in 0..draws {
        *counts.entry(tableau_key(&clifford::sample_with(1, &mut r).unwrap())).or_default() += 1;
    }
    assert_eq!(counts.len(), 24);
    let counts: Vec<u64> = counts.into_values().collect();
    let expected = vec![draws as f64 / 24.0; 24];
    assert!(chi_square_p_value(&counts, &expected) > 1e-3);
}

#[test]
fn two_qubit_cliffords_are_uniform() {
    let mut counts: HashMap<Vec<(u8, u8, u8)>, u64> = HashMap::new();
    let mut r = rng::stream(12, &[]);
    let draws = 1_000_000u64;
    for _ in 0..draws {
        *counts.entry(tableau_key(&clifford::sample_with(2, &mut r).unwrap())).or_default() += 1;
    }
    assert_eq!(counts.len(), 11_520);
    let counts: Vec<u64> = counts.into_values().collect();
    let expected = vec![draws as f64 / 11_520.0; 11_520];
    assert!(chi_square_p_value(&counts, &expected) > 1e-3);
}

fn pauli_string(x: u8, z: u8) -> PauliString {
    let labels: String = (0..2)
        .map(|q| match (x >> q & 1, z >> q & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        })
        .collect();
    labels.parse().unwrap()
}

#[test]
fn conjugation_matches_statevector_action() {
    // For every non-identity P: U P |ψ⟩ = (U P U†) U |ψ⟩ on random states.
    let mut r = rng::stream(13, &[]);
    for _ in 0..50 {
        let t = clifford::sample_with(2, &mut r).unwrap();
        let u = clifford::to_circuit(&t);
        let prep = zne::layered_ansatz(2, 2, r.random()).unwrap();
        let psi = sim::final_state(&prep).unwrap();
        for code in 1..16u8 {
            let (x, z) = (code & 3, code >> 2);
            let mut lhs = psi.clone();
            lhs.apply_pauli_string(&pauli_string(x, z)).unwrap();
            lhs.apply_circuit(&u).unwrap();

            let image: PauliOp = t.conjugate(PauliOp::hermitian(x, z, false));
            let mut rhs = psi.clone();
            rhs.apply_circuit(&u).unwrap();
            image.apply_to(&mut rhs).unwrap();
            let overlap = lhs.inner(&rhs);
            assert!((overlap - c(1.0, 0.0)).norm() < 1e-10, "P = {}", pauli_string(x, z));
        }
    }
}

#[test]
fn rb_sequence_survival_matches_channel() {
    // Depolarizing channels commute with Cliffords, so a 1-qubit sequence of
    // G gates survives with probability (1 + f^G)/2, f = 1 - 4q/3.
    let q = 0.02;
    let f = 1.0 - 4.0 * q / 3.0;
    let noise = NoiseModel::new(q, 0.0).unwrap();
    for (m, seed) in [(1, 1u64), (10, 2), (40, 3)] {
        let circuit = rb::generate_sequence(1, m, seed).unwrap();
        assert!(sim::final_state(&circuit).unwrap().probabilities()[0] > 1.0 - 1e-12);
        let shots = 20_000;
        let est = rb::circuit_survival(&circuit, &noise, shots, seed).unwrap();
        let oracle = 0.5 * (1.0 + f.powi(circuit.len() as i32));
        let se = (oracle * (1.0 - oracle) / shots as f64).sqrt();
        assert!((est - oracle).abs() < 3.0 * se + 1e-12, "m={m}: {est} vs {oracle}");
    }
}

#[test]
fn folding_gate_count_oracle() {
    let base = zne::layered_ansatz(2, 3, 4).unwrap();
    let layers = base.layers().len();
    let folded = zne::fold_circuit(&base, 2, 9).unwrap();
    // Each block is U U† for a 2-qubit Clifford U, so it has even length.
    let extra = folded.len() - base.len();
    assert_eq!(extra % 2, 0);
    assert!(extra >= 2 * layers);
    let a = sim::final_state(&base).unwrap();
    let b = sim::final_state(&folded).unwrap();
    assert!(a.approx_eq_up_to_phase(&b, 1e-10));
}

#[test]
fn gaussian_angle_noise_damps_cosine() {
    // RX(θ + ε)|0⟩ gives ⟨Z⟩ = cos(θ + ε); E over ε ~ N(0, s²) is cos θ e^{-s²/2}.
    let theta = 0.9;
    let base = Circuit::from_gates(1, [Gate::RotationX { qubit: 0, angle: theta }]).unwrap();
    let s0 = 0.3;
    let lambdas = vec![1.0, 2.0, 3.0];
    let ensemble = Ensemble {
        base,
        scaling: Scaling::ParameterScaling {
            lambdas: lambdas.clone(),
            reference_variance: s0,
        },
        shots: 40_000,
        noise: NoiseModel::ideal(),
        seed: 21,
    };
    let table = zne::collect(&ensemble, &"Z".parse().unwrap()).unwrap();
    for row in &table {
        let oracle = theta.cos() * (-(row.lambda - 1.0) * s0 / 2.0).exp();
        assert!((row.mean - oracle).abs() < 3.0 * row.stderr, "λ={}: {} vs {oracle}", row.lambda, row.mean);
    }
}

#[test]
fn matched_beta_has_requested_moments() {
    let (mu, s2) = (0.3, 0.04);
    let law = CircuitLaw::matched(mu, s2).unwrap();
    let mut r = rng::stream(5, &[]);
    let n = 1_000_000;
    let xs: Vec<f64> = (0..n).map(|_| law.sample(&mut r)).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((mean - mu).abs() < 4.0 * (s2 / n as f64).sqrt());
    assert!((var - s2).abs() < 0.01 * s2, "var {var}");
}

/// Posterior mean and standard deviation by Simpson quadrature.
fn quadrature_posterior(prior: GaussianPrior, e: u8, m: u32, theta: f64) -> (f64, f64) {
    let n = 20_000;
    let (lo, hi) = (prior.mu - 10.0 * prior.sigma, prior.mu + 10.0 * prior.sigma);
    let h = (hi - lo) / n as f64;
    let (mut z, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for i in 0..=n {
        let phi = lo + i as f64 * h;
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let density = (-(phi - prior.mu).powi(2) / (2.0 * prior.sigma.powi(2))).exp()
            * avqe::outcome_probability(e, phi, m, theta, 1);
        z += w * density;
        s1 += w * density * phi;
        s2 += w * density * phi * phi;
    }
    let mean = s1 / z;
    (mean, (s2 / z - mean * mean).sqrt())
}

#[test]
fn rejection_update_matches_quadrature() {
    let cases = [
        (GaussianPrior::new(0.0, PI / 2.0).unwrap(), 1u8, 1u32),
        (GaussianPrior::new(0.4, 0.3).unwrap(), 0, 3),
        (GaussianPrior::new(-1.0, 0.05).unwrap(), 1, 20),
    ];
    for sampler in [Sampler::Independent, Sampler::Stratified] {
        for (i, &(prior, e, m)) in cases.iter().enumerate() {
            let theta = prior.mu - prior.sigma;
            let (mean, sd) = quadrature_posterior(prior, e, m, theta);
            let mut config = AqpeConfig::new(0.5, 0.01, 0);
            config.batch = 1_000_000;
            config.sampler = sampler;
            let mut cache = CandidateCache::default();
            let mut r = rng::stream(30, &[i as u64]);
            let (post, _) = avqe::update(&prior, e, m, theta, &config, &mut cache, &mut r);
            assert!((post.mu - mean).abs() < 0.01 * prior.sigma, "{sampler:?} case {i}: mu {} vs {mean}", post.mu);
            assert!((post.sigma - sd).abs() < 0.01 * prior.sigma, "{sampler:?} case {i}: sd {} vs {sd}", post.sigma);
        }
    }
}

#[test]
fn while_loop_simulation_matches_closed_form() {
    let sc = HardwareProfile::superconducting();
    let exact = stack::simulate_while_loop(&sc, 2e-6, 10, 1.0, false, 0).unwrap();
    assert_eq!(exact.iterations, 10);
    for (i, t) in [1e-6, 50e-6, 800e-6].into_iter().enumerate() {
        let closed = stack::while_loop_idle_fraction(&sc, t).unwrap();
        let sim = stack::simulate_while_loop(&sc, t, 500, 0.3, false, i as u64).unwrap();
        assert!((sim.idle_fraction() - closed).abs() <= 0.01 * closed);
    }
    let local = stack::simulate_while_loop(&sc, 2e-6, 100, 0.5, true, 1).unwrap();
    assert!(local.utilisation >= 0.99);
}

#[test]
fn stochastic_pauli_norm_and_state() {
    let noise = NoiseModel::new(0.3, 0.0).unwrap();
    let circuit = zne::layered_ansatz(3, 4, 2).unwrap();
    let mut r = rng::stream(1, &[]);
    let mut state = StateVector::zero(3).unwrap();
    sim::evolve_noisy(&mut state, &circuit, &noise, &mut r).unwrap();
    assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
}
