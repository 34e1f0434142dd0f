//! Randomised benchmarking.
//!
//! A sequence of depth `m` is `m` uniformly random Cliffords followed by the
//! Clifford that inverts their product. Survival is the probability of reading
//! back the all-zero string, and its decay with `m` is fitted to `A + B p^m`.

use rayon::prelude::*;

use crate::clifford::{self, Tableau};
use crate::error::{Error, Result};
use crate::fit;
use crate::rng::{self, Rng};
use crate::sim::{self, Circuit, NoiseModel, StateVector};

#[derive(Debug, Clone)]
pub struct RbConfig {
    pub n_qubits: usize,
    pub depths: Vec<usize>,
    pub sequences_per_depth: usize,
    /// Shots per generated circuit (`l`).
    pub reuse_factor: usize,
    pub noise: NoiseModel,
    pub seed: u64,
}

pub const DEFAULT_DEPTHS: [usize; 7] = [1, 2, 5, 10, 20, 50, 100];

impl RbConfig {
    pub fn new(n_qubits: usize, noise: NoiseModel, seed: u64) -> Self {
        RbConfig {
            n_qubits,
            depths: DEFAULT_DEPTHS.to_vec(),
            sequences_per_depth: 50,
            reuse_factor: 1,
            noise,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > clifford::MAX_CLIFFORD_QUBITS {
            return Err(Error::param("n_qubits", "must be 1..=3"));
        }
        if self.depths.is_empty() || self.depths[0] == 0 {
            return Err(Error::param("depths", "must be nonempty and positive"));
        }
        if self.depths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("depths", "must be strictly increasing"));
        }
        if self.sequences_per_depth == 0 {
            return Err(Error::param("sequences_per_depth", "must be at least 1"));
        }
        if self.reuse_factor == 0 {
            return Err(Error::param("reuse_factor", "must be at least 1"));
        }
        Ok(())
    }
}

/// Random depth-`m` sequence with its cumulative inverse, drawn from `rng`.
pub fn sequence_with(n: usize, m: usize, rng: &mut Rng) -> Result<Circuit> {
    if m == 0 {
        return Err(Error::param("m", "depth must be at least 1"));
    }
    let mut circuit = Circuit::new(n)?;
    let mut total = Tableau::identity(n)?;
    for _ in 0..m {
        let c = clifford::sample_with(n, rng)?;
        circuit.append(&clifford::to_circuit(&c))?;
        total = clifford::compose(&total, &c)?;
    }
    circuit.append(&clifford::to_circuit(&clifford::invert(&total)))?;
    Ok(circuit)
}

/// [`sequence_with`] on a fresh stream for `seed`.
pub fn generate_sequence(n: usize, m: usize, seed: u64) -> Result<Circuit> {
    sequence_with(n, m, &mut rng::stream(seed, &[]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalPoint {
    pub m: usize,
    pub n_circuits: usize,
    pub shots_per_circuit: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Fraction of all-zero outcomes over `shots` noisy runs of one circuit.
pub fn circuit_survival(circuit: &Circuit, noise: &NoiseModel, shots: usize, seed: u64) -> Result<f64> {
    let mut hits = 0usize;
    for shot in 0..shots {
        let mut rng = rng::stream(seed, &[shot as u64]);
        let mut state = StateVector::zero(circuit.n_qubits())?;
        sim::evolve_noisy(&mut state, circuit, noise, &mut rng)?;
        if sim::measure_all(&state, noise.readout_flip(), &mut rng).is_all_zero() {
            hits += 1;
        }
    }
    Ok(hits as f64 / shots as f64)
}

/// Mean survival per depth with the between-circuit standard error.
pub fn estimate_survival(config: &RbConfig) -> Result<Vec<SurvivalPoint>> {
    config.validate()?;
    let k = config.sequences_per_depth;
    let jobs: Vec<(usize, usize)> = (0..config.depths.len())
        .flat_map(|d| (0..k).map(move |s| (d, s)))
        .collect();
    let survivals: Vec<f64> = jobs
        .par_iter()
        .map(|&(d, s)| {
            let mut rng = rng::stream(config.seed, &[0, d as u64, s as u64]);
            let circuit = sequence_with(config.n_qubits, config.depths[d], &mut rng)?;
            let shot_seed = rng::derive(config.seed, &[1, d as u64, s as u64]);
            circuit_survival(&circuit, &config.noise, config.reuse_factor, shot_seed)
        })
        .collect::<Result<_>>()?;

    Ok(config
        .depths
        .iter()
        .zip(survivals.chunks(k))
        .map(|(&m, chunk)| {
            let mean = fit::mean(chunk);
            let stderr = if k > 1 {
                (fit::sample_variance(chunk) / k as f64).sqrt()
            } else {
                (mean * (1.0 - mean) / config.reuse_factor as f64).sqrt()
            };
            SurvivalPoint {
                m,
                n_circuits: k,
                shots_per_circuit: config.reuse_factor,
                mean,
                stderr,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    SeparableLeastSquares,
    LogLinear,
}

impl FitMethod {
    pub fn name(&self) -> &'static str {
        match self {
            FitMethod::SeparableLeastSquares => "separable_lsq",
            FitMethod::LogLinear => "log_linear",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RbFit {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub p_stderr: f64,
    /// Sum of squared residuals.
    pub residual: f64,
    pub method: FitMethod,
    /// False when the data carry no information about `p` (sentinel `p = 1`).
    pub identifiable: bool,
}

impl RbFit {
    pub fn predict(&self, m: f64) -> f64 {
        self.a + self.b * self.p.powf(m)
    }

    /// Average error per Clifford, `(1 - p)(d - 1)/d` with `d = 2^n`.
    pub fn error_per_clifford(&self, n_qubits: usize) -> f64 {
        let d = (1u64 << n_qubits) as f64;
        (1.0 - self.p) * (d - 1.0) / d
    }
}

/// Closed-form `(A, B, rss)` for fixed `p`.
fn linear_part(m: &[f64], y: &[f64], p: f64) -> (f64, f64, f64) {
    let n = m.len() as f64;
    let x: Vec<f64> = m.iter().map(|&mi| p.powf(mi)).collect();
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    let (a, b) = if det.abs() < 1e-300 {
        (sy / n, 0.0)
    } else {
        ((sxx * sy - sx * sxy) / det, (n * sxy - sx * sy) / det)
    };
    let rss = x.iter().zip(y).map(|(xi, yi)| (yi - a - b * xi).powi(2)).sum();
    (a, b, rss)
}

fn check_table(table: &[SurvivalPoint]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m: Vec<f64> = table.iter().map(|r| r.m as f64).collect();
    let mut distinct = m.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Underdetermined(format!(
            "{} distinct depths, need at least 3",
            distinct.len()
        )));
    }
    Ok((m, table.iter().map(|r| r.mean).collect()))
}

fn sentinel(y: &[f64], method: FitMethod) -> RbFit {
    RbFit {
        a: fit::mean(y),
        b: 0.0,
        p: 1.0,
        p_stderr: f64::INFINITY,
        residual: 0.0,
        method,
        identifiable: false,
    }
}

/// Separable least-squares fit of `A + B p^m`.
///
/// `p` is scanned over 999 grid points in `[0.001, 0.999]`, refined by
/// golden-section search around the best grid point, and `(A, B)` solved in
/// closed form at every trial `p`.
pub fn fit_decay(table: &[SurvivalPoint]) -> Result<RbFit> {
    let (m, y) = check_table(table)?;
    fit_points(&m, &y)
}

/// [`fit_decay`] on raw `(m, survival)` arrays.
pub fn fit_points(m: &[f64], y: &[f64]) -> Result<RbFit> {
    if m.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: m.len(),
            got: y.len(),
        });
    }
    if fit::sample_variance(y) < 1e-24 {
        return Ok(sentinel(y, FitMethod::SeparableLeastSquares));
    }
    let grid = fit::linspace(0.001, 0.999, 999);
    let rss = |p: f64| linear_part(m, y, p).2;
    let best = grid
        .iter()
        .copied()
        .min_by(|a, b| rss(*a).total_cmp(&rss(*b)))
        .expect("nonempty grid");
    let step = 0.001;
    let lo = (best - step).max(1e-6);
    let hi = (best + step).min(1.0 - 1e-12);
    let p = fit::golden_section(rss, lo, hi, 1e-8);
    let p = if rss(p) <= rss(best) { p } else { best };
    let (a, b, residual) = linear_part(m, y, p);

    // Gauss-Newton covariance at the optimum.
    let dof = m.len() as f64 - 3.0;
    let p_stderr = if dof > 0.0 {
        let jac: Vec<Vec<f64>> = m
            .iter()
            .map(|&mi| vec![1.0, p.powf(mi), b * mi * p.powf(mi - 1.0)])
            .collect();
        fit::least_squares(&jac, &vec![0.0; m.len()])
            .map(|ls| (residual / dof * ls.xtx_inv[(2, 2)]).max(0.0).sqrt())
            .unwrap_or(f64::INFINITY)
    } else {
        f64::NAN
    };
    Ok(RbFit {
        a,
        b,
        p,
        p_stderr,
        residual,
        method: FitMethod::SeparableLeastSquares,
        identifiable: true,
    })
}

/// Straight-line fit to `ln p̄_m`, which assumes `A = 0`.
pub fn fit_log_linear(table: &[SurvivalPoint]) -> Result<RbFit> {
    let (m, y) = check_table(table)?;
    if fit::sample_variance(&y) < 1e-24 {
        return Ok(sentinel(&y, FitMethod::LogLinear));
    }
    let (design, logs): (Vec<Vec<f64>>, Vec<f64>) = m
        .iter()
        .zip(&y)
        .filter(|(_, &v)| v > 0.0)
        .map(|(&mi, &v)| (vec![1.0, mi], v.ln()))
        .unzip();
    let ls = fit::least_squares(&design, &logs)?;
    let (ln_b, ln_p) = (ls.coefficients[0], ls.coefficients[1]);
    let dof = design.len() as f64 - 2.0;
    let slope_se = if dof > 0.0 {
        (ls.residual_ss / dof * ls.xtx_inv[(1, 1)]).sqrt()
    } else {
        f64::NAN
    };
    let p = ln_p.exp();
    let b = ln_b.exp();
    let residual = m
        .iter()
        .zip(&y)
        .map(|(&mi, &v)| (v - b * p.powf(mi)).powi(2))
        .sum();
    Ok(RbFit {
        a: 0.0,
        b,
        p,
        p_stderr: p * slope_se,
        residual,
        method: FitMethod::LogLinear,
        identifiable: true,
    })
}
