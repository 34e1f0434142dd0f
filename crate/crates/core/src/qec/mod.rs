//! Distance-`d` surface code under phenomenological noise.
//!
//! The layout is a `(2d-1)×(2d-1)` grid: data qubits sit where `r + c` is
//! even, X-ancillas at (even row, odd column) and Z-ancillas at (odd row, even
//! column). Decoding uses the X-ancilla graph; the Z graph is the same graph on
//! the transposed layout. The left and right lattice edges are rough, so a
//! residual error chain joining them is a logical failure.

mod graph;
mod uf;

pub use graph::{DecodingGraph, EdgeKind};
pub use uf::{decode, grow_clusters, peel, spanning_forest, ClusterForest, Decoded, TreeEdge};

use std::collections::BTreeSet;

use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{check_probability, Error, Result};
use crate::fit;
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    Data,
    XAncilla,
    ZAncilla,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceCodeLayout {
    d: usize,
    transposed: bool,
}

impl SurfaceCodeLayout {
    pub fn new(d: usize) -> Result<Self> {
        if d < 3 || d.is_multiple_of(2) {
            return Err(Error::param("d", format!("distance {d} must be odd and >= 3")));
        }
        Ok(SurfaceCodeLayout { d, transposed: false })
    }

    pub fn distance(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> usize {
        2 * self.d - 1
    }

    /// Same code with rows and columns exchanged; X and Z ancillas swap roles.
    pub fn transpose(&self) -> Self {
        SurfaceCodeLayout {
            d: self.d,
            transposed: !self.transposed,
        }
    }

    pub fn site(&self, r: usize, c: usize) -> Site {
        let (r, c) = if self.transposed { (c, r) } else { (r, c) };
        match (r % 2, c % 2) {
            (0, 0) | (1, 1) => Site::Data,
            (0, 1) => Site::XAncilla,
            _ => Site::ZAncilla,
        }
    }

    pub fn count(&self, kind: Site) -> usize {
        let n = self.side();
        (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .filter(|&(r, c)| self.site(r, c) == kind)
            .count()
    }
}

/// A sampled error and the defects it produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyndromeHistory {
    /// Indices of flipped graph edges.
    pub error: Vec<usize>,
    /// Hot syndrome vertices, sorted.
    pub hot: Vec<usize>,
}

/// Flips each data edge with `p_data` and each measurement edge with `p_meas`.
/// The last round is measured perfectly, so it carries no measurement edges.
pub fn sample_with(graph: &DecodingGraph, p_data: f64, p_meas: f64, rng: &mut Rng) -> Result<SyndromeHistory> {
    check_probability("p_data", p_data)?;
    check_probability("p_meas", p_meas)?;
    let error: Vec<usize> = (0..graph.n_edges())
        .filter(|&e| {
            let p = match graph.edge_kind(e) {
                EdgeKind::Data { .. } => p_data,
                EdgeKind::Measurement { .. } => p_meas,
            };
            p > 0.0 && rng.random::<f64>() < p
        })
        .collect();
    let hot = graph.syndrome(&error);
    Ok(SyndromeHistory { error, hot })
}

pub fn sample_errors(graph: &DecodingGraph, p_data: f64, p_meas: f64, seed: u64) -> Result<SyndromeHistory> {
    sample_with(graph, p_data, p_meas, &mut rng::stream(seed, &[]))
}

/// Correction record with exclusive-or semantics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ErrorLog {
    edges: BTreeSet<usize>,
}

impl ErrorLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn apply(&mut self, edges: &[usize]) {
        for &e in edges {
            if !self.edges.insert(e) {
                self.edges.remove(&e);
            }
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Net flips per data qubit, with time folded away.
    pub fn data_qubits(&self, graph: &DecodingGraph) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for &e in &self.edges {
            if let EdgeKind::Data { row, col, .. } = graph.edge_kind(e) {
                if !out.insert((row, col)) {
                    out.remove(&(row, col));
                }
            }
        }
        out
    }
}

/// True when `error ⊕ correction` flips the logical operator.
pub fn is_logical_failure(graph: &DecodingGraph, error: &[usize], correction: &[usize]) -> bool {
    let mut log = ErrorLog::new();
    log.apply(error);
    log.apply(correction);
    log.edges().filter(|&e| graph.crosses_cut(e)).count() % 2 == 1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotResult {
    pub failure: bool,
    pub work_units: u64,
    pub hot: usize,
}

/// Samples and decodes one cycle of `d` noisy rounds (plus the perfect final round).
pub fn run_shot(graph: &DecodingGraph, p: f64, seed: u64, shot: u64) -> Result<ShotResult> {
    let mut rng = rng::stream(seed, &[shot]);
    let hist = sample_with(graph, p, p, &mut rng)?;
    let dec = decode(graph, &hist.hot);
    debug_assert_eq!(graph.syndrome(&dec.correction), hist.hot);
    Ok(ShotResult {
        failure: is_logical_failure(graph, &hist.error, &dec.correction),
        work_units: dec.work_units,
        hot: hist.hot.len(),
    })
}

pub fn run_shots(d: usize, p: f64, shots: u64, seed: u64) -> Result<Vec<ShotResult>> {
    check_probability("p", p)?;
    let graph = DecodingGraph::new(d, d)?;
    (0..shots)
        .into_par_iter()
        .map(|s| run_shot(&graph, p, seed, s))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub shots: u64,
}

fn proportion(hits: u64, shots: u64) -> Estimate {
    let value = hits as f64 / shots as f64;
    Estimate {
        value,
        stderr: (value * (1.0 - value) / shots as f64).sqrt(),
        shots,
    }
}

/// Monte Carlo logical failure rate with `p_data = p_meas = p` over `d` rounds.
pub fn logical_failure_rate(d: usize, p: f64, shots: u64, seed: u64) -> Result<Estimate> {
    if shots == 0 {
        return Err(Error::param("shots", "must be at least 1"));
    }
    let results = run_shots(d, p, shots, seed)?;
    Ok(proportion(results.iter().filter(|r| r.failure).count() as u64, shots))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeoutStats {
    pub p_toe: Estimate,
    pub p_log: Estimate,
    /// `p_ToE / 2 <= p_Log`.
    pub inequality_holds: bool,
    pub work_units: Vec<u64>,
}

/// Timeout failures: shots whose decode needs more than `w_max` work units
/// (`None` for an unlimited budget).
pub fn timeout_stats(d: usize, p: f64, w_max: Option<u64>, shots: u64, seed: u64) -> Result<TimeoutStats> {
    if shots == 0 {
        return Err(Error::param("shots", "must be at least 1"));
    }
    Ok(timeout_summary(&run_shots(d, p, shots, seed)?, w_max))
}

/// Timeout accounting for shots that were already decoded.
pub fn timeout_summary(results: &[ShotResult], w_max: Option<u64>) -> TimeoutStats {
    let shots = results.len() as u64;
    let timeouts = results
        .iter()
        .filter(|r| w_max.is_some_and(|w| r.work_units > w))
        .count() as u64;
    let p_toe = proportion(timeouts, shots);
    let p_log = proportion(results.iter().filter(|r| r.failure).count() as u64, shots);
    TimeoutStats {
        inequality_holds: p_toe.value / 2.0 <= p_log.value,
        p_toe,
        p_log,
        work_units: results.iter().map(|r| r.work_units).collect(),
    }
}

/// Fraction of shots with a larger work count than `w`, for each budget.
pub fn work_tail(work_units: &[u64], budgets: &[u64]) -> Vec<f64> {
    budgets
        .iter()
        .map(|&w| work_units.iter().filter(|&&u| u > w).count() as f64 / work_units.len() as f64)
        .collect()
}

/// Simple quantum volume: `n_logical · ⌊1/p_L⌋`.
pub fn sqv(n_logical: u64, p_l: f64) -> Result<f64> {
    if !(p_l > 0.0 && p_l <= 1.0) {
        return Err(Error::param("p_l", "must lie in (0, 1]"));
    }
    Ok(n_logical as f64 * (1.0 / p_l).floor())
}

/// Mean work units, for reporting.
pub fn mean_work(results: &[ShotResult]) -> f64 {
    fit::mean(&results.iter().map(|r| r.work_units as f64).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_counts() {
        let l = SurfaceCodeLayout::new(3).unwrap();
        assert_eq!(l.count(Site::Data), 13);
        assert_eq!(l.count(Site::XAncilla), 6);
        assert_eq!(l.count(Site::ZAncilla), 6);
        let t = l.transpose();
        assert_eq!(t.site(0, 1), Site::ZAncilla);
        assert!(SurfaceCodeLayout::new(4).is_err());
    }

    #[test]
    fn error_log_cancels() {
        let mut log = ErrorLog::new();
        log.apply(&[1, 2]);
        log.apply(&[2]);
        assert_eq!(log.edges().collect::<Vec<_>>(), vec![1]);
        log.apply(&[1]);
        assert!(log.is_empty());
    }

    #[test]
    fn sqv_formula() {
        assert_eq!(sqv(78, 1.0).unwrap(), 78.0);
        assert!(sqv(78, 1e-3).unwrap() < sqv(78, 1e-4).unwrap());
        assert!(sqv(1, 0.0).is_err());
    }

    #[test]
    fn zero_noise_never_fails() {
        let e = logical_failure_rate(3, 0.0, 50, 0).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn timeout_extremes() {
        let inf = timeout_stats(3, 0.05, None, 200, 1).unwrap();
        assert_eq!(inf.p_toe.value, 0.0);
        assert!(inf.inequality_holds);
        let zero = timeout_stats(3, 0.05, Some(0), 200, 1).unwrap();
        let nonempty = zero.work_units.iter().filter(|&&w| w > 0).count() as f64 / 200.0;
        assert_eq!(zero.p_toe.value, nonempty);
    }
}
