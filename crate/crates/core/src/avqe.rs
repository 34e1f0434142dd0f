//! Adaptive Bayesian phase estimation for AVQE, plus its resource formulas.
//!
//! The phase `φ` of `U = RΠR†PRΠR†P†` is tracked with a Gaussian prior
//! `N(μ, σ)`. Each iteration runs the phase-estimation circuit at depth
//! `M = max(1, ⌊σ^{-α} + ½⌋)` and angle `θ = μ - σ`, then updates the prior by
//! rejection filtering: candidates from the prior are kept with probability
//! equal to the likelihood of the observed bit.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::fit;
use crate::rng::{self, Rng};
use crate::sim::{self, Circuit, Gate, NoiseModel, PauliString, StateVector};

/// `P(E | φ) = ½(1 + (1 - 2E) cos(M(θ - sign·φ)))`.
pub fn outcome_probability(e: u8, phi: f64, m: u32, theta: f64, sign: i8) -> f64 {
    let s = if e == 0 { 1.0 } else { -1.0 };
    0.5 * (1.0 + s * (m as f64 * (theta - sign as f64 * phi)).cos())
}

/// `M = max(1, ⌊σ^{-α} + ½⌋)`.
pub fn schedule_m(sigma: f64, alpha: f64) -> u32 {
    let m = (sigma.powf(-alpha) + 0.5).floor();
    if m.is_finite() && m >= 1.0 {
        m.min(u32::MAX as f64) as u32
    } else {
        1
    }
}

/// Wraps an angle to `[-π, π)`.
pub fn wrap(phi: f64) -> f64 {
    (phi + PI).rem_euclid(TAU) - PI
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPrior {
    pub mu: f64,
    pub sigma: f64,
}

impl GaussianPrior {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::param("mu", "must be finite"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma", "must be positive"));
        }
        Ok(GaussianPrior { mu: wrap(mu), sigma })
    }
}

impl Default for GaussianPrior {
    fn default() -> Self {
        GaussianPrior { mu: 0.0, sigma: PI / 2.0 }
    }
}

/// How rejection-filter candidates and acceptance thresholds are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    /// Independent normal candidates and independent uniform thresholds.
    Independent,
    /// Candidates at the normal quantiles of `k` equal-probability strata,
    /// thresholds from a randomly shifted Kronecker sequence.
    Stratified,
}

impl std::str::FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" | "iid" => Ok(Sampler::Independent),
            "stratified" => Ok(Sampler::Stratified),
            _ => Err(Error::Parse(format!("unknown sampler `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AqpeConfig {
    pub alpha: f64,
    pub precision: f64,
    /// Rejection batch size `k`.
    pub batch: usize,
    pub max_iterations: u64,
    pub min_accept: usize,
    /// Batch doublings before falling back to inflating `σ`.
    pub max_retries: u32,
    pub inflation: f64,
    pub sampler: Sampler,
    /// Divide acceptance probabilities by the batch maximum likelihood.
    pub scaled_acceptance: bool,
    pub prior: GaussianPrior,
    pub record_history: bool,
    pub seed: u64,
}

impl AqpeConfig {
    pub fn new(alpha: f64, precision: f64, seed: u64) -> Self {
        AqpeConfig {
            alpha,
            precision,
            batch: 1000,
            max_iterations: 5_000_000,
            min_accept: 10,
            max_retries: 3,
            inflation: 1.5,
            sampler: Sampler::Stratified,
            scaled_acceptance: true,
            prior: GaussianPrior::default(),
            record_history: false,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::param("alpha", "must lie in [0, 1]"));
        }
        if !(self.precision > 0.0 && self.precision < 1.0) {
            return Err(Error::param("precision", "must lie in (0, 1)"));
        }
        if self.batch == 0 {
            return Err(Error::param("batch", "must be at least 1"));
        }
        if self.min_accept < 2 {
            return Err(Error::param("min_accept", "must be at least 2"));
        }
        if !(self.inflation > 1.0 && self.inflation.is_finite()) {
            return Err(Error::param("inflation", "must exceed 1"));
        }
        GaussianPrior::new(self.prior.mu, self.prior.sigma)?;
        Ok(())
    }
}

/// Source of measurement bits for the phase-estimation circuit.
#[derive(Debug, Clone)]
pub enum Oracle {
    /// Bits drawn from the exact outcome law for phase `phi`, collapsed with `sign`.
    Analytic { phi: f64, sign: i8 },
    CircuitBacked(Box<CircuitOracle>),
}

impl Oracle {
    pub fn analytic(phi: f64, sign: i8) -> Result<Self> {
        if !(-PI..=PI).contains(&phi) {
            return Err(Error::param("phi", "must lie in [-pi, pi]"));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::param("sign", "must be +1 or -1"));
        }
        Ok(Oracle::Analytic { phi, sign })
    }

    /// Effective phase the filter converges to (`sign · φ`).
    pub fn target(&self) -> f64 {
        match self {
            Oracle::Analytic { phi, sign } => *sign as f64 * phi,
            Oracle::CircuitBacked(c) => c.eigenphase,
        }
    }

    pub fn measure(&self, m: u32, theta: f64, rng: &mut Rng) -> Result<u8> {
        match self {
            Oracle::Analytic { phi, sign } => {
                let p0 = outcome_probability(0, *phi, m, theta, *sign);
                Ok(if rng.random::<f64>() < p0 { 0 } else { 1 })
            }
            Oracle::CircuitBacked(c) => c.measure(m, theta, rng),
        }
    }
}

/// Phase-estimation circuit on `n + 1` qubits for the operator
/// `U = RΠR†PRΠR†P†` with `Π = 1 - 2|0⟩⟨0|`.
///
/// `U` is applied gate by gate to build its restriction to `span{ψ, Pψ}`
/// (`ψ = R|0⟩`), where it is a rotation with eigenphases `±φ`. The register is
/// prepared in the eigenvector selected by `sign`, the controlled power `U^M`
/// is applied exactly, and the ancilla rotation, Hadamard and readout run on
/// the noisy simulator.
#[derive(Debug, Clone)]
pub struct CircuitOracle {
    eigenvector: StateVector,
    eigenvalue: Complex64,
    eigenphase: f64,
    noise: NoiseModel,
}

fn reflect_zero(state: &StateVector) -> Result<StateVector> {
    let mut amps = state.amplitudes().to_vec();
    amps[0] = -amps[0];
    StateVector::from_amplitudes(amps)
}

fn apply_u(x: &StateVector, prep: &Circuit, pauli: &PauliString) -> Result<StateVector> {
    let mut s = x.clone();
    s.apply_pauli_string(pauli)?;
    for half in 0..2 {
        s.apply_circuit(&prep.inverse())?;
        s = reflect_zero(&s)?;
        s.apply_circuit(prep)?;
        if half == 0 {
            s.apply_pauli_string(pauli)?;
        }
    }
    Ok(s)
}

fn combine(a: Complex64, x: &StateVector, b: Complex64, y: &StateVector) -> Vec<Complex64> {
    x.amplitudes()
        .iter()
        .zip(y.amplitudes())
        .map(|(u, v)| a * u + b * v)
        .collect()
}

impl CircuitOracle {
    pub fn new(prep: &Circuit, pauli: &PauliString, noise: NoiseModel, sign: i8) -> Result<Self> {
        let n = prep.n_qubits();
        if n + 1 > sim::MAX_QUBITS {
            return Err(Error::TooManyQubits(n + 1, sim::MAX_QUBITS));
        }
        if pauli.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: pauli.len(),
            });
        }
        let psi = sim::final_state(prep)?;
        let mut p_psi = psi.clone();
        p_psi.apply_pauli_string(pauli)?;
        let overlap = psi.inner(&p_psi);
        let rest = combine(Complex64::new(1.0, 0.0), &p_psi, -overlap, &psi);
        let rest_norm = rest.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();

        let (eigenvector, eigenvalue) = if rest_norm < 1e-9 {
            let u_psi = apply_u(&psi, prep, pauli)?;
            (psi.clone(), psi.inner(&u_psi))
        } else {
            let perp = StateVector::from_amplitudes(rest.iter().map(|a| a / rest_norm).collect())?;
            let basis = [&psi, &perp];
            let images = [apply_u(&psi, prep, pauli)?, apply_u(&perp, prep, pauli)?];
            let u = |i: usize, j: usize| basis[i].inner(&images[j]);
            let (a, b, c, d) = (u(0, 0), u(0, 1), u(1, 0), u(1, 1));
            let half_tr = (a + d) / 2.0;
            let disc = (half_tr * half_tr - (a * d - b * c)).sqrt();
            let candidates = [half_tr + disc, half_tr - disc];
            let lambda = if sign >= 0 {
                candidates.into_iter().max_by(|x, y| x.arg().total_cmp(&y.arg()))
            } else {
                candidates.into_iter().min_by(|x, y| x.arg().total_cmp(&y.arg()))
            }
            .expect("two eigenvalues");
            // (b, λ - a) and (λ - d, c) both span the eigenspace; take the better conditioned.
            let (v0, v1) = if b.norm() + (lambda - a).norm() >= (lambda - d).norm() + c.norm() {
                (b, lambda - a)
            } else {
                (lambda - d, c)
            };
            let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
            let v = StateVector::from_amplitudes(combine(v0 / norm, &psi, v1 / norm, &perp))?;
            (v, lambda)
        };
        Ok(CircuitOracle {
            eigenphase: eigenvalue.arg(),
            eigenvector,
            eigenvalue,
            noise,
        })
    }

    pub fn eigenphase(&self) -> f64 {
        self.eigenphase
    }

    pub fn measure(&self, m: u32, theta: f64, rng: &mut Rng) -> Result<u8> {
        let n = self.eigenvector.n_qubits();
        let phase = self.eigenvalue.powu(m) / self.eigenvalue.powu(m).norm();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = Vec::with_capacity(2 << n);
        amps.extend(self.eigenvector.amplitudes().iter().map(|a| a * r));
        amps.extend(self.eigenvector.amplitudes().iter().map(|a| a * r * phase));
        let mut state = StateVector::from_amplitudes(amps)?;
        let tail = Circuit::from_gates(
            n + 1,
            [
                Gate::AncillaPhase {
                    qubit: n,
                    power: m,
                    theta,
                },
                Gate::Hadamard(n),
            ],
        )?;
        sim::evolve_noisy(&mut state, &tail, &self.noise, rng)?;
        let bits = sim::measure_all(&state, self.noise.readout_flip(), rng);
        Ok(bits.0[n] as u8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub m: u32,
    pub theta: f64,
    pub e: u8,
    pub accepted: usize,
    pub mu: f64,
    pub sigma: f64,
    /// Acceptance starved and `σ` was inflated.
    pub fallback: bool,
}

/// Candidate tables and scratch buffers reused across iterations of one run.
#[derive(Debug, Default)]
pub struct CandidateCache {
    quantiles: BTreeMap<usize, Vec<f64>>,
    phi: Vec<f64>,
    weight: Vec<f64>,
    threshold: Vec<f64>,
}

/// Normal quantiles at stratum midpoints, rescaled to unit variance.
fn stratum_quantiles(k: usize) -> Vec<f64> {
    let normal = Normal::standard();
    let mut q: Vec<f64> = (0..k)
        .map(|j| normal.inverse_cdf((j as f64 + 0.5) / k as f64))
        .collect();
    let var = q.iter().map(|z| z * z).sum::<f64>() / k as f64;
    if var > 0.0 {
        let s = var.sqrt();
        q.iter_mut().for_each(|z| *z /= s);
    }
    q
}

const KRONECKER: f64 = 0.618_033_988_749_894_9;

/// Count and centred sums of the accepted candidates.
struct Accepted {
    count: usize,
    /// `Σ (φ - μ₀)` and `Σ (φ - μ₀)²` about the prior mean.
    s1: f64,
    s2: f64,
}

/// Filters one batch of size `k`.
///
/// With `scaled_acceptance`, thresholds are stretched to the batch's largest
/// likelihood (the rejection-sampling envelope), which leaves the accepted
/// distribution unchanged but keeps unlikely outcomes from starving the batch.
fn filter_batch(
    prior: &GaussianPrior,
    likelihood: impl Fn(f64) -> f64,
    k: usize,
    config: &AqpeConfig,
    cache: &mut CandidateCache,
    rng: &mut Rng,
) -> Accepted {
    let CandidateCache {
        quantiles,
        phi,
        weight,
        threshold,
    } = cache;
    phi.clear();
    threshold.clear();
    match config.sampler {
        Sampler::Independent => {
            for _ in 0..k {
                let z: f64 = StandardNormal.sample(rng);
                phi.push(prior.mu + prior.sigma * z);
                threshold.push(rng.random::<f64>());
            }
        }
        Sampler::Stratified => {
            let shift: f64 = rng.random();
            let q = quantiles.entry(k).or_insert_with(|| stratum_quantiles(k));
            for (j, z) in q.iter().enumerate() {
                phi.push(prior.mu + prior.sigma * z);
                threshold.push((shift + j as f64 * KRONECKER).fract());
            }
        }
    }
    weight.clear();
    weight.extend(phi.iter().map(|&p| likelihood(p)));
    let envelope = if config.scaled_acceptance {
        weight.iter().copied().fold(0.0, f64::max)
    } else {
        1.0
    };
    let mut out = Accepted {
        count: 0,
        s1: 0.0,
        s2: 0.0,
    };
    for ((p, w), u) in phi.iter().zip(weight.iter()).zip(threshold.iter()) {
        if u * envelope < *w {
            let d = p - prior.mu;
            out.count += 1;
            out.s1 += d;
            out.s2 += d * d;
        }
    }
    out
}

/// One rejection-filtering update from `prior` after observing `e` at `(m, θ)`.
pub fn update(
    prior: &GaussianPrior,
    e: u8,
    m: u32,
    theta: f64,
    config: &AqpeConfig,
    cache: &mut CandidateCache,
    rng: &mut Rng,
) -> (GaussianPrior, IterationRecord) {
    let likelihood = |phi: f64| outcome_probability(e, phi, m, theta, 1);
    let mut k = config.batch;
    let mut last = 0;
    for _ in 0..=config.max_retries {
        let acc = filter_batch(prior, likelihood, k, config, cache, rng);
        last = acc.count;
        if acc.count >= config.min_accept {
            // Moments of the unwrapped samples, which sit around the prior mean.
            let n = acc.count as f64;
            let offset = acc.s1 / n;
            let ss = (acc.s2 - acc.s1 * offset).max(0.0);
            let sd = match config.sampler {
                Sampler::Independent => (ss / (n - 1.0)).sqrt(),
                // The stratified set is a quadrature of the prior, so its
                // moments are population moments.
                Sampler::Stratified => (ss / n).sqrt(),
            };
            if sd > 0.0 && sd.is_finite() {
                let post = GaussianPrior {
                    mu: wrap(prior.mu + offset),
                    sigma: sd,
                };
                return (
                    post,
                    IterationRecord {
                        m,
                        theta,
                        e,
                        accepted: acc.count,
                        mu: post.mu,
                        sigma: post.sigma,
                        fallback: false,
                    },
                );
            }
        }
        k *= 2;
    }
    let post = GaussianPrior {
        mu: prior.mu,
        sigma: prior.sigma * config.inflation,
    };
    (
        post,
        IterationRecord {
            m,
            theta,
            e,
            accepted: last,
            mu: post.mu,
            sigma: post.sigma,
            fallback: true,
        },
    )
}

/// One full AQPE step: schedule, measure, update.
pub fn aqpe_iteration(
    prior: &GaussianPrior,
    config: &AqpeConfig,
    oracle: &Oracle,
    cache: &mut CandidateCache,
    rng: &mut Rng,
) -> Result<(GaussianPrior, IterationRecord)> {
    let m = schedule_m(prior.sigma, config.alpha);
    let theta = prior.mu - prior.sigma;
    let e = oracle.measure(m, theta, rng)?;
    Ok(update(prior, e, m, theta, config, cache, rng))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AqpeRun {
    pub estimate: f64,
    pub sigma: f64,
    pub iterations: u64,
    /// Circuit evaluations per depth `M`.
    pub a_m: BTreeMap<u32, u64>,
    pub fallbacks: u64,
    pub converged: bool,
    pub history: Vec<IterationRecord>,
}

impl AqpeRun {
    /// `|wrap(μ - target)|`.
    pub fn error(&self, target: f64) -> f64 {
        wrap(self.estimate - target).abs()
    }
}

/// Iterates until `σ < p` or the iteration budget runs out.
pub fn estimate_phase(config: &AqpeConfig, oracle: &Oracle) -> Result<AqpeRun> {
    config.validate()?;
    let mut rng = rng::stream(config.seed, &[]);
    let mut cache = CandidateCache::default();
    let mut prior = config.prior;
    let mut run = AqpeRun {
        estimate: prior.mu,
        sigma: prior.sigma,
        iterations: 0,
        a_m: BTreeMap::new(),
        fallbacks: 0,
        converged: false,
        history: Vec::new(),
    };
    while prior.sigma >= config.precision && run.iterations < config.max_iterations {
        let (post, record) = aqpe_iteration(&prior, config, oracle, &mut cache, &mut rng)?;
        *run.a_m.entry(record.m).or_default() += 1;
        run.iterations += 1;
        run.fallbacks += record.fallback as u64;
        if config.record_history {
            run.history.push(record);
        }
        prior = post;
    }
    run.estimate = prior.mu;
    run.sigma = prior.sigma;
    run.converged = prior.sigma < config.precision;
    Ok(run)
}

/// Measurement count `2/(1-α)·(p^{-2(1-α)} - 1)`, or `4 ln(1/p)` at `α = 1`.
pub fn n_measurements(p: f64, alpha: f64) -> Result<f64> {
    check_precision(p)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param("alpha", "must lie in [0, 1]"));
    }
    if alpha == 1.0 {
        return Ok(4.0 * (1.0 / p).ln());
    }
    let e = 1.0 - alpha;
    let x = -2.0 * e * p.ln();
    // powf keeps integer cases such as p = 0.1, α = 0 exact; exp_m1 avoids
    // cancellation as α → 1.
    let growth = if x > 0.5 { (1.0 / p).powf(2.0 * e) - 1.0 } else { x.exp_m1() };
    Ok(2.0 / e * growth)
}

/// `min(-log d / log p, 1)`.
pub fn alpha_max(p: f64, d: f64) -> Result<f64> {
    check_precision(p)?;
    if !(d >= 1.0 && d.is_finite()) {
        return Err(Error::param("d", "depth budget must be >= 1"));
    }
    Ok((-(d.ln()) / p.ln()).min(1.0))
}

/// Minimum measurement count for precision `p` with maximum depth `d`.
pub fn n_min(p: f64, d: f64) -> Result<f64> {
    check_precision(p)?;
    if !(d >= 1.0 && d.is_finite()) {
        return Err(Error::param("d", "depth budget must be >= 1"));
    }
    let pd = p * d;
    if pd >= 1.0 {
        Ok(4.0 * (1.0 / p).ln())
    } else {
        let q = 1.0 / pd;
        Ok(2.0 * p.ln() / pd.ln() * (q * q - 1.0))
    }
}

fn check_precision(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::param("p", "precision must lie in (0, 1)"))
    }
}

/// Gates for plain VQE sampling: `(n_P + 1) p^{-2}`.
pub fn vqe_gates(p: f64, n_p: u64) -> f64 {
    (n_p as f64 + 1.0) / (p * p)
}

/// Gates in one phase-estimation circuit: `4M(n_P + 1) + n_P + 3`.
pub fn circuit_gates(m: u32, n_p: u64) -> u64 {
    4 * m as u64 * (n_p + 1) + n_p + 3
}

/// `Σ_M a_M · circuit_gates(M)`.
pub fn avqe_gates(a_m: &BTreeMap<u32, u64>, n_p: u64) -> f64 {
    a_m.iter()
        .map(|(&m, &count)| count as f64 * circuit_gates(m, n_p) as f64)
        .sum()
}

/// Gate totals for one `(α, n_P)` point, each the median over seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct GateCosts {
    pub alpha: f64,
    pub n_p: u64,
    pub vqe: f64,
    pub avqe: f64,
}

/// Runs `seeds` AQPE estimations at each `α`, each on a phase drawn uniformly
/// from `[-π, π)` with a random collapse sign.
pub fn simulate_runs(base: &AqpeConfig, alpha: f64, seeds: u64) -> Result<Vec<AqpeRun>> {
    (0..seeds)
        .into_par_iter()
        .map(|s| {
            let mut config = base.clone();
            config.alpha = alpha;
            config.seed = rng::derive(base.seed, &[alpha.to_bits(), s]);
            let oracle = random_oracle(config.seed)?;
            estimate_phase(&config, &oracle)
        })
        .collect()
}

/// Analytic oracle with phase and sign drawn from their own stream.
pub fn random_oracle(seed: u64) -> Result<Oracle> {
    let mut rng = rng::stream(seed, &[u64::MAX]);
    let phi = rng.random_range(-PI..PI);
    let sign = if rng.random::<bool>() { 1 } else { -1 };
    Oracle::analytic(phi, sign)
}

/// Median gate totals per `n_P` over a batch of runs.
pub fn gate_costs(runs: &[AqpeRun], alpha: f64, p: f64, n_p: u64) -> GateCosts {
    let totals: Vec<f64> = runs.iter().map(|r| avqe_gates(&r.a_m, n_p)).collect();
    GateCosts {
        alpha,
        n_p,
        vqe: vqe_gates(p, n_p),
        avqe: fit::median(&totals),
    }
}

/// Per-depth median of `a_M` over runs (depths absent from a run count as 0).
pub fn median_a_m(runs: &[AqpeRun]) -> BTreeMap<u32, u64> {
    let depths: std::collections::BTreeSet<u32> =
        runs.iter().flat_map(|r| r.a_m.keys().copied()).collect();
    depths
        .into_iter()
        .filter_map(|m| {
            let counts: Vec<f64> = runs
                .iter()
                .map(|r| r.a_m.get(&m).copied().unwrap_or(0) as f64)
                .collect();
            let med = fit::median(&counts).round() as u64;
            (med > 0).then_some((m, med))
        })
        .collect()
}

/// Smallest `α` on `grid` (ascending) where the median AVQE gate total is
/// below the VQE total, for each `n_P`. Runs at each `α` are shared across `n_P`.
pub fn crossover(
    base: &AqpeConfig,
    grid: &[f64],
    n_ps: &[u64],
    seeds: u64,
) -> Result<(Vec<GateCosts>, Vec<Option<f64>>)> {
    let mut table = Vec::new();
    let mut found: Vec<Option<f64>> = vec![None; n_ps.len()];
    for &alpha in grid {
        let runs = simulate_runs(base, alpha, seeds)?;
        for (i, &n_p) in n_ps.iter().enumerate() {
            let c = gate_costs(&runs, alpha, base.precision, n_p);
            if found[i].is_none() && c.avqe < c.vqe {
                found[i] = Some(alpha);
            }
            table.push(c);
        }
    }
    Ok((table, found))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyEstimate {
    pub energy: f64,
    pub exact: f64,
    pub converged: bool,
    pub terms: Vec<TermEstimate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermEstimate {
    pub coefficient: f64,
    pub exact_expectation: f64,
    pub estimated_expectation: f64,
    pub run: AqpeRun,
}

/// `Σ a_i ⟨ψ|P_i|ψ⟩` with each magnitude from phase estimation on
/// `φ_i = 2 arccos|⟨P_i⟩|` and each sign from the exact statevector.
pub fn estimate_energy(
    terms: &[(f64, PauliString)],
    prep: &Circuit,
    config: &AqpeConfig,
) -> Result<EnergyEstimate> {
    let psi = sim::final_state(prep)?;
    let mut out = Vec::with_capacity(terms.len());
    for (i, (coefficient, pauli)) in terms.iter().enumerate() {
        let exact = psi.expectation(pauli)?;
        let phi = 2.0 * exact.abs().min(1.0).acos();
        let mut cfg = config.clone();
        cfg.seed = rng::derive(config.seed, &[i as u64]);
        let sign = if rng::stream(cfg.seed, &[u64::MAX]).random::<bool>() { 1 } else { -1 };
        let run = estimate_phase(&cfg, &Oracle::analytic(phi, sign)?)?;
        let magnitude = (run.estimate / 2.0).cos();
        out.push(TermEstimate {
            coefficient: *coefficient,
            exact_expectation: exact,
            estimated_expectation: exact.signum() * magnitude,
            run,
        });
    }
    Ok(EnergyEstimate {
        energy: out.iter().map(|t| t.coefficient * t.estimated_expectation).sum(),
        exact: out.iter().map(|t| t.coefficient * t.exact_expectation).sum(),
        converged: out.iter().all(|t| t.run.converged),
        terms: out,
    })
}
