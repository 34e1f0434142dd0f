//! Zero-noise extrapolation.
//!
//! Noise is amplified either by unitary folding (identity blocks `U U†` after
//! every layer) or by perturbing rotation angles with Gaussian noise. The
//! per-level expectation estimates are then extrapolated back to `λ = 0`.

use std::f64::consts::PI;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::clifford;
use crate::error::{Error, Result};
use crate::fit;
use crate::rng::{self, Rng};
use crate::sim::{self, Circuit, Gate, NoiseModel, PauliString, StateVector};

/// Default noise levels when none are given.
pub const DEFAULT_LAMBDAS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 5.0];

#[derive(Debug, Clone, PartialEq)]
pub enum Scaling {
    /// Identity blocks per layer for each level; `0` is the base circuit.
    UnitaryFolding { blocks_per_layer: Vec<usize> },
    /// Angle noise with variance `(λ - 1) σ₀²` at each level `λ`.
    ParameterScaling {
        lambdas: Vec<f64>,
        reference_variance: f64,
    },
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    pub base: Circuit,
    pub scaling: Scaling,
    pub shots: usize,
    pub noise: NoiseModel,
    pub seed: u64,
}

impl Ensemble {
    pub fn validate(&self) -> Result<()> {
        if self.base.is_empty() {
            return Err(Error::param("circuit", "base circuit is empty"));
        }
        if self.shots == 0 {
            return Err(Error::param("shots", "must be at least 1"));
        }
        match &self.scaling {
            Scaling::UnitaryFolding { blocks_per_layer } => {
                if blocks_per_layer.is_empty() {
                    return Err(Error::param("blocks_per_layer", "no levels given"));
                }
                for (i, b) in blocks_per_layer.iter().enumerate() {
                    if blocks_per_layer[..i].contains(b) {
                        return Err(Error::param("blocks_per_layer", "levels must be distinct"));
                    }
                }
            }
            Scaling::ParameterScaling {
                lambdas,
                reference_variance,
            } => {
                if lambdas.is_empty() {
                    return Err(Error::param("lambdas", "no levels given"));
                }
                for (i, l) in lambdas.iter().enumerate() {
                    if !l.is_finite() || *l < 1.0 {
                        return Err(Error::param("lambdas", format!("{l} is not >= 1")));
                    }
                    if lambdas[..i].contains(l) {
                        return Err(Error::param("lambdas", "levels must be distinct"));
                    }
                }
                if !reference_variance.is_finite() || *reference_variance < 0.0 {
                    return Err(Error::param("reference_variance", "must be >= 0"));
                }
            }
        }
        Ok(())
    }
}

/// Random identity block `U U†` on the whole register, with `U` drawn as
/// uniform Cliffords on consecutive groups of at most three qubits.
pub fn identity_block(n_qubits: usize, rng: &mut Rng) -> Result<Circuit> {
    let mut u = Circuit::new(n_qubits)?;
    let mut start = 0;
    while start < n_qubits {
        let width = (n_qubits - start).min(clifford::MAX_CLIFFORD_QUBITS);
        let local = clifford::to_circuit(&clifford::sample_with(width, rng)?);
        for g in local.gates() {
            u.push(g.relabel(|q| q + start))?;
        }
        start += width;
    }
    let mut block = u.clone();
    block.append(&u.inverse())?;
    Ok(block)
}

/// Inserts `blocks_per_layer` identity blocks after every layer of `circuit`.
pub fn fold_with(circuit: &Circuit, blocks_per_layer: usize, rng: &mut Rng) -> Result<Circuit> {
    if circuit.is_empty() {
        return Err(Error::param("circuit", "cannot fold an empty circuit"));
    }
    let n = circuit.n_qubits();
    let mut out = Circuit::new(n)?;
    for layer in circuit.layers() {
        for g in layer {
            out.push(g)?;
        }
        for _ in 0..blocks_per_layer {
            out.append(&identity_block(n, rng)?)?;
        }
    }
    Ok(out)
}

pub fn fold_circuit(circuit: &Circuit, blocks_per_layer: usize, seed: u64) -> Result<Circuit> {
    fold_with(circuit, blocks_per_layer, &mut rng::stream(seed, &[]))
}

/// Every rotation angle shifted by an independent `N(0, variance)` draw.
pub fn perturb_with(circuit: &Circuit, variance: f64, rng: &mut Rng) -> Result<Circuit> {
    if !variance.is_finite() || variance < 0.0 {
        return Err(Error::param("variance", "must be finite and >= 0"));
    }
    if variance == 0.0 {
        return Ok(circuit.clone());
    }
    let normal = Normal::new(0.0, variance.sqrt()).expect("positive std dev");
    circuit.map_gates(|g| match g.angle() {
        Some(a) => g.with_angle(a + normal.sample(rng)),
        None => *g,
    })
}

pub fn perturb_parameters(circuit: &Circuit, variance: f64, seed: u64) -> Result<Circuit> {
    perturb_with(circuit, variance, &mut rng::stream(seed, &[]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelEstimate {
    /// Noise level; for folding the measured mean gate-count ratio.
    pub lambda: f64,
    pub shots: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Alternating layers of random `RX`/`RZ` rotations and a CNOT ladder.
pub fn layered_ansatz(n_qubits: usize, layers: usize, seed: u64) -> Result<Circuit> {
    let mut rng = rng::stream(seed, &[]);
    let mut c = Circuit::new(n_qubits)?;
    for _ in 0..layers {
        for q in 0..n_qubits {
            c.push(Gate::RotationX {
                qubit: q,
                angle: rng.random_range(-PI..PI),
            })?;
            c.push(Gate::RotationZ {
                qubit: q,
                angle: rng.random_range(-PI..PI),
            })?;
        }
        for q in 1..n_qubits {
            c.push(Gate::Cnot {
                control: q - 1,
                target: q,
            })?;
        }
    }
    Ok(c)
}

/// Per-level estimates of `⟨observable⟩`, drawing a fresh circuit realisation
/// for every shot.
pub fn collect(ensemble: &Ensemble, observable: &PauliString) -> Result<Vec<LevelEstimate>> {
    ensemble.validate()?;
    let n = ensemble.base.n_qubits();
    if observable.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: observable.len(),
        });
    }
    let base_len = ensemble.base.len() as f64;
    let levels = match &ensemble.scaling {
        Scaling::UnitaryFolding { blocks_per_layer } => blocks_per_layer.len(),
        Scaling::ParameterScaling { lambdas, .. } => lambdas.len(),
    };
    (0..levels)
        .map(|level| {
            let shots: Vec<(f64, f64)> = (0..ensemble.shots)
                .into_par_iter()
                .map(|shot| {
                    let mut rng = rng::stream(ensemble.seed, &[level as u64, shot as u64]);
                    let (circuit, ratio) = match &ensemble.scaling {
                        Scaling::UnitaryFolding { blocks_per_layer } => {
                            let c = fold_with(&ensemble.base, blocks_per_layer[level], &mut rng)?;
                            let r = c.len() as f64 / base_len;
                            (c, r)
                        }
                        Scaling::ParameterScaling {
                            lambdas,
                            reference_variance,
                        } => {
                            let var = (lambdas[level] - 1.0) * reference_variance;
                            (perturb_with(&ensemble.base, var, &mut rng)?, lambdas[level])
                        }
                    };
                    let mut state = StateVector::zero(n)?;
                    sim::evolve_noisy(&mut state, &circuit, &ensemble.noise, &mut rng)?;
                    let e = sim::measure_pauli(&state, observable, ensemble.noise.readout_flip(), &mut rng)?;
                    Ok((ratio, e as f64))
                })
                .collect::<Result<_>>()?;
            let (ratios, values): (Vec<f64>, Vec<f64>) = shots.into_iter().unzip();
            Ok(LevelEstimate {
                lambda: fit::mean(&ratios),
                shots: values.len(),
                mean: fit::mean(&values),
                stderr: (fit::sample_variance(&values) / values.len() as f64).sqrt(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Richardson,
    Linear,
    Polynomial(usize),
    Exponential,
}

impl Method {
    pub fn name(&self) -> String {
        match self {
            Method::Richardson => "richardson".into(),
            Method::Linear => "linear".into(),
            Method::Polynomial(k) => format!("poly{k}"),
            Method::Exponential => "exponential".into(),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "richardson" => Ok(Method::Richardson),
            "linear" => Ok(Method::Linear),
            "exponential" | "exp" => Ok(Method::Exponential),
            _ => s
                .strip_prefix("poly")
                .and_then(|k| k.parse().ok())
                .map(Method::Polynomial)
                .ok_or_else(|| Error::Parse(format!("unknown extrapolation method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolation {
    pub method: Method,
    pub e_zero: f64,
    pub e_zero_stderr: f64,
    /// Sum of squared residuals of the fitted curve at the data points.
    pub residual: f64,
    /// Decay base `c` of the exponential model.
    pub rate: Option<f64>,
    /// Exponential fit had no interior optimum and was replaced by a linear fit.
    pub fell_back: bool,
}

fn weighted(method: Method, weights: &[f64], table: &[LevelEstimate], residual: f64) -> Extrapolation {
    let e_zero = weights.iter().zip(table).map(|(w, r)| w * r.mean).sum();
    let var: f64 = weights.iter().zip(table).map(|(w, r)| (w * r.stderr).powi(2)).sum();
    Extrapolation {
        method,
        e_zero,
        e_zero_stderr: var.sqrt(),
        residual,
        rate: None,
        fell_back: false,
    }
}

fn polynomial(method: Method, degree: usize, table: &[LevelEstimate]) -> Result<Extrapolation> {
    let x: Vec<f64> = table.iter().map(|r| r.lambda).collect();
    let y: Vec<f64> = table.iter().map(|r| r.mean).collect();
    let w = fit::polynomial_weights(&x, degree, 0.0)?;
    let design: Vec<Vec<f64>> = x
        .iter()
        .map(|&xi| (0..=degree).map(|j| xi.powi(j as i32)).collect())
        .collect();
    let residual = fit::least_squares(&design, &y)?.residual_ss;
    Ok(weighted(method, &w, table, residual))
}

/// `(E∞, b, rss)` of `E∞ + b e^{-rλ}` at fixed rate `r`.
fn exp_linear_part(x: &[f64], y: &[f64], r: f64) -> Option<(f64, f64, f64)> {
    let design: Vec<Vec<f64>> = x.iter().map(|&xi| vec![1.0, (-r * xi).exp()]).collect();
    let ls = fit::least_squares(&design, y).ok()?;
    Some((ls.coefficients[0], ls.coefficients[1], ls.residual_ss))
}

fn exponential(table: &[LevelEstimate]) -> Result<Extrapolation> {
    if table.len() < 3 {
        return Err(Error::Underdetermined(format!(
            "{} levels, exponential fit needs 3",
            table.len()
        )));
    }
    let x: Vec<f64> = table.iter().map(|r| r.lambda).collect();
    let y: Vec<f64> = table.iter().map(|r| r.mean).collect();
    let rss = |ln_r: f64| exp_linear_part(&x, &y, ln_r.exp()).map_or(f64::INFINITY, |v| v.2);

    let grid: Vec<f64> = fit::logspace(1e-3, 10.0, 200).iter().map(|r| r.ln()).collect();
    let scores: Vec<f64> = grid.iter().map(|&g| rss(g)).collect();
    let best = (0..grid.len())
        .min_by(|&a, &b| scores[a].total_cmp(&scores[b]))
        .expect("nonempty grid");
    if best == 0 || best == grid.len() - 1 || !scores[best].is_finite() {
        let mut lin = polynomial(Method::Linear, 1, table)?;
        lin.method = Method::Exponential;
        lin.fell_back = true;
        return Ok(lin);
    }
    let ln_r = fit::golden_section(rss, grid[best - 1], grid[best + 1], 1e-12);
    let r = ln_r.exp();
    let (_, _, residual) = exp_linear_part(&x, &y, r).expect("finite at optimum");
    let design: Vec<Vec<f64>> = x.iter().map(|&xi| vec![1.0, (-r * xi).exp()]).collect();
    let w = fit::linear_weights(&design, &[1.0, 1.0])?;
    let mut out = weighted(Method::Exponential, &w, table, residual);
    out.rate = Some((-r).exp());
    Ok(out)
}

/// Extrapolates the level estimates to `λ = 0`.
pub fn extrapolate(table: &[LevelEstimate], method: Method) -> Result<Extrapolation> {
    if table.len() < 2 {
        return Err(Error::Underdetermined(format!(
            "{} levels, need at least 2",
            table.len()
        )));
    }
    match method {
        Method::Richardson => {
            let x: Vec<f64> = table.iter().map(|r| r.lambda).collect();
            let w = fit::lagrange_weights(&x, 0.0)?;
            Ok(weighted(method, &w, table, 0.0))
        }
        Method::Linear => polynomial(method, 1, table),
        Method::Polynomial(k) => polynomial(method, k, table),
        Method::Exponential => exponential(table),
    }
}
