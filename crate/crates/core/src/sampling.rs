//! Variance of fresh-circuit versus reused-circuit sampling.
//!
//! Each shot is `X ~ Bernoulli(P)` where the success probability `P` of a
//! randomly generated circuit is itself random with mean `μ` and variance `σ²`.
//! Scheme 1 draws `k` circuits and runs each `l` times; scheme 2 draws a fresh
//! circuit for each of the `n = l·k` shots.

use rand::Rng as _;
use rand_distr::{Beta, Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit;
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelModel {
    pub mu: f64,
    pub sigma2: f64,
    /// Number of distinct circuits.
    pub k: u64,
    /// Shots per circuit.
    pub l: u64,
}

const MOMENT_SLACK: f64 = 1e-12;

fn check_moments(mu: f64, sigma2: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::param("mu", format!("{mu} not in [0, 1]")));
    }
    if !sigma2.is_finite() || sigma2 < 0.0 {
        return Err(Error::param("sigma2", format!("{sigma2} must be >= 0")));
    }
    if mu * mu + sigma2 > mu + MOMENT_SLACK {
        return Err(Error::param(
            "sigma2",
            format!("mu^2 + sigma2 = {} exceeds mu = {mu}", mu * mu + sigma2),
        ));
    }
    Ok(())
}

impl TwoLevelModel {
    pub fn new(mu: f64, sigma2: f64, k: u64, l: u64) -> Result<Self> {
        check_moments(mu, sigma2)?;
        if k == 0 || l == 0 {
            return Err(Error::param("k, l", "must both be at least 1"));
        }
        Ok(TwoLevelModel { mu, sigma2, k, l })
    }

    pub fn n(&self) -> u64 {
        self.k * self.l
    }
}

/// `[μ - (μ² + σ²)]/(l k) + σ²/k`, evaluated as `(μ - μ² + (l - 1)σ²)/n`
/// so that it equals [`var_scheme2`] exactly when `l = 1` or `σ² = 0`.
pub fn var_scheme1(m: &TwoLevelModel) -> f64 {
    (m.mu - m.mu * m.mu + (m.l as f64 - 1.0) * m.sigma2) / m.n() as f64
}

/// `(μ - μ²)/n`.
pub fn var_scheme2(m: &TwoLevelModel) -> f64 {
    (m.mu - m.mu * m.mu) / m.n() as f64
}

/// Smallest `n = l·k` whose scheme-1 standard deviation is at most `target`.
///
/// The scheme-1 variance is `(μ - μ² + (l - 1)σ²)/n`, which vanishes as
/// `k → ∞` for every fixed `l`, so a finite answer always exists.
pub fn samples_required(mu: f64, sigma2: f64, l: u64, target: f64) -> Result<u64> {
    check_moments(mu, sigma2)?;
    if l == 0 {
        return Err(Error::param("l", "must be at least 1"));
    }
    if !target.is_finite() || target <= 0.0 {
        return Err(Error::param("target", "accuracy must be positive"));
    }
    let numerator = mu - mu * mu + (l as f64 - 1.0) * sigma2;
    let k = numerator / (l as f64 * target * target);
    // Guard against k landing a few ulps above an integer.
    let k = (k * (1.0 - 1e-12)).ceil().max(1.0);
    Ok(k as u64 * l)
}

/// Law of `P` used in the Monte Carlo: a Beta distribution with the model's
/// first two moments, degenerating to a point mass or a Bernoulli at the edges.
#[derive(Debug, Clone, Copy)]
pub enum CircuitLaw {
    Constant(f64),
    Bernoulli(f64),
    Beta(Beta<f64>),
}

impl CircuitLaw {
    pub fn matched(mu: f64, sigma2: f64) -> Result<Self> {
        check_moments(mu, sigma2)?;
        let spread = mu * (1.0 - mu);
        if sigma2 == 0.0 || spread == 0.0 {
            return Ok(CircuitLaw::Constant(mu));
        }
        if sigma2 >= spread * (1.0 - 1e-12) {
            return Ok(CircuitLaw::Bernoulli(mu));
        }
        let nu = spread / sigma2 - 1.0;
        Beta::new(mu * nu, (1.0 - mu) * nu)
            .map(CircuitLaw::Beta)
            .map_err(|e| Error::param("sigma2", e.to_string()))
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        match self {
            CircuitLaw::Constant(p) => *p,
            CircuitLaw::Bernoulli(p) => {
                if rng.random::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            CircuitLaw::Beta(b) => b.sample(rng),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// `k` circuits, each run `l` times.
    Reuse,
    /// `n` fresh circuits, one shot each.
    Fresh,
}

/// One realisation of the sample-mean estimator.
pub fn simulate_estimate(model: &TwoLevelModel, scheme: Scheme, law: &CircuitLaw, rng: &mut Rng) -> f64 {
    let hits: u64 = match scheme {
        Scheme::Reuse => (0..model.k)
            .map(|_| {
                let p = law.sample(rng);
                Binomial::new(model.l, p).expect("p in [0,1]").sample(rng)
            })
            .sum(),
        // Fresh circuits make the shots i.i.d. Bernoulli(μ).
        Scheme::Fresh => Binomial::new(model.n(), model.mu).expect("mu in [0,1]").sample(rng),
    };
    hits as f64 / model.n() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McVariance {
    pub variance: f64,
    /// Bootstrap standard error of `variance`.
    pub stderr: f64,
    pub replications: usize,
}

/// Monte Carlo estimate of the estimator variance under `scheme`.
pub fn monte_carlo_variance(
    model: &TwoLevelModel,
    scheme: Scheme,
    replications: usize,
    bootstrap: usize,
    seed: u64,
) -> Result<McVariance> {
    if replications < 2 {
        return Err(Error::param("replications", "need at least 2"));
    }
    let law = CircuitLaw::matched(model.mu, model.sigma2)?;
    const CHUNK: usize = 4096;
    let chunks = replications.div_ceil(CHUNK);
    let estimates: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = rng::stream(seed, &[0, c as u64]);
            let len = CHUNK.min(replications - c * CHUNK);
            (0..len)
                .map(|_| simulate_estimate(model, scheme, &law, &mut rng))
                .collect::<Vec<_>>()
        })
        .collect();
    let variance = fit::sample_variance(&estimates);

    let boot: Vec<f64> = (0..bootstrap)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng::stream(seed, &[1, b as u64]);
            let n = estimates.len();
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let x = estimates[rng.random_range(0..n)];
                s += x;
                s2 += x * x;
            }
            let m = s / n as f64;
            (s2 - n as f64 * m * m) / (n - 1) as f64
        })
        .collect();
    let stderr = if bootstrap >= 2 {
        fit::sample_variance(&boot).sqrt()
    } else {
        f64::NAN
    };
    Ok(McVariance {
        variance,
        stderr,
        replications,
    })
}
