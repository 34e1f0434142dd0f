//! Cost models for the link between a host CPU and a quantum processor.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use rand::Rng as _;

use crate::avqe;
use crate::error::{check_probability, Error, Result};
use crate::rng;

/// Timing record of a hardware platform, all in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareProfile {
    pub name: String,
    pub t_gate: f64,
    pub t_meas: f64,
    pub t_reset: f64,
    /// One-way CPU↔QPU latency.
    pub t_lat: f64,
    /// Classical Bayesian update.
    pub t_b: f64,
}

pub const DEFAULT_LATENCY: f64 = 100e-6;
pub const DEFAULT_UPDATE_TIME: f64 = 5e-6;

impl HardwareProfile {
    pub fn new(name: &str, t_gate: f64, t_meas: f64, t_reset: f64, t_lat: f64, t_b: f64) -> Result<Self> {
        for (field, v) in [
            ("t_gate", t_gate),
            ("t_meas", t_meas),
            ("t_reset", t_reset),
            ("t_lat", t_lat),
            ("t_b", t_b),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param("profile", format!("{field} = {v} must be finite and >= 0")));
            }
        }
        Ok(HardwareProfile {
            name: name.to_string(),
            t_gate,
            t_meas,
            t_reset,
            t_lat,
            t_b,
        })
    }

    pub fn superconducting() -> Self {
        HardwareProfile {
            name: "superconducting".into(),
            t_gate: 120e-9,
            t_meas: 120e-9,
            t_reset: 120e-9,
            t_lat: DEFAULT_LATENCY,
            t_b: DEFAULT_UPDATE_TIME,
        }
    }

    pub fn trapped_ion() -> Self {
        HardwareProfile {
            name: "trapped_ion".into(),
            t_gate: 10e-6,
            t_meas: 750e-6,
            t_reset: 750e-6,
            t_lat: DEFAULT_LATENCY,
            t_b: DEFAULT_UPDATE_TIME,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "superconducting" | "sc" => Ok(Self::superconducting()),
            "trapped_ion" | "ion" => Ok(Self::trapped_ion()),
            _ => Err(Error::param("profile", format!("unknown profile `{name}`"))),
        }
    }

    pub fn with_latency(&self, t_lat: f64) -> Self {
        HardwareProfile {
            t_lat,
            ..self.clone()
        }
    }
}

pub fn builtin_profiles() -> [HardwareProfile; 2] {
    [HardwareProfile::superconducting(), HardwareProfile::trapped_ion()]
}

fn check_time(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} must be finite and >= 0")))
    }
}

/// Idle fraction of a QPU that waits a full round trip after each circuit:
/// `2 t_lat / (2 t_lat + t_circuit)`.
pub fn while_loop_idle_fraction(profile: &HardwareProfile, circuit_time: f64) -> Result<f64> {
    check_time("circuit_time", circuit_time)?;
    let round_trip = 2.0 * profile.t_lat;
    if round_trip + circuit_time == 0.0 {
        return Ok(0.0);
    }
    Ok(round_trip / (round_trip + circuit_time))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthSpec {
    pub n_qubits: u64,
    pub utilisation: f64,
    pub bytes_per_gate: f64,
    pub t_gate: f64,
}

/// Instruction bytes per gate.
pub const SINGLE_QUBIT_GATE_BYTES: f64 = 2.0;
pub const TWO_QUBIT_GATE_BYTES: f64 = 4.0;

/// `n · u · bytes / t_gate` in bytes per second.
pub fn gate_stream_bandwidth(spec: &BandwidthSpec) -> Result<f64> {
    if !(0.0..=1.0).contains(&spec.utilisation) {
        return Err(Error::param("utilisation", "must lie in [0, 1]"));
    }
    if !(spec.t_gate > 0.0 && spec.t_gate.is_finite()) {
        return Err(Error::param("t_gate", "must be positive"));
    }
    check_time("bytes_per_gate", spec.bytes_per_gate)?;
    Ok(spec.n_qubits as f64 * spec.utilisation * spec.bytes_per_gate / spec.t_gate)
}

/// Duration of the quantum part of one AQPE circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitModel {
    /// `M` layers of gates.
    DepthOnly,
    /// `4M(n_P + 1) + n_P + 3` sequential gates.
    GateCount { n_p: u64 },
}

impl CircuitModel {
    pub fn circuit_time(&self, profile: &HardwareProfile, m: u32) -> f64 {
        match *self {
            CircuitModel::DepthOnly => m as f64 * profile.t_gate,
            CircuitModel::GateCount { n_p } => avqe::circuit_gates(m, n_p) as f64 * profile.t_gate,
        }
    }
}

/// `T(M) = 2 t_lat + t_c(M) + max(t_reset, t_meas) + t_B`.
pub fn aqpe_iteration_time(profile: &HardwareProfile, m: u32, model: CircuitModel) -> f64 {
    2.0 * profile.t_lat + model.circuit_time(profile, m) + profile.t_reset.max(profile.t_meas) + profile.t_b
}

/// `τ = Σ_M a_M T(M)`.
pub fn aqpe_total_time(profile: &HardwareProfile, a_m: &BTreeMap<u32, u64>, model: CircuitModel) -> f64 {
    a_m.iter()
        .map(|(&m, &count)| count as f64 * aqpe_iteration_time(profile, m, model))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacklogSpec {
    /// Syndrome generation rate (per second).
    pub r_gen: f64,
    /// Syndrome processing rate (per second).
    pub r_proc: f64,
    /// Number of non-Clifford gates.
    pub k: u64,
    pub t_cycle: f64,
}

impl BacklogSpec {
    pub fn f(&self) -> f64 {
        self.r_gen / self.r_proc
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Backlog {
    /// `t_cycle · f^k`; infinite if it overflows.
    pub seconds: f64,
    pub log10_seconds: f64,
}

pub fn backlog_execution_time(spec: &BacklogSpec) -> Result<Backlog> {
    if !(spec.r_gen > 0.0 && spec.r_proc > 0.0) {
        return Err(Error::param("rates", "must be positive"));
    }
    backlog_from_factor(spec.f(), spec.k, spec.t_cycle)
}

/// Backlog latency for ratio `f` directly.
pub fn backlog_from_factor(f: f64, k: u64, t_cycle: f64) -> Result<Backlog> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::param("f", "must be positive"));
    }
    if !(t_cycle > 0.0 && t_cycle.is_finite()) {
        return Err(Error::param("t_cycle", "must be positive"));
    }
    let log10_seconds = t_cycle.log10() + k as f64 * f.log10();
    let seconds = if k <= i32::MAX as u64 {
        t_cycle * f.powi(k as i32)
    } else {
        10f64.powf(log10_seconds)
    };
    Ok(Backlog {
        seconds,
        log10_seconds,
    })
}

/// `n_qubits · op_rate · bytes_per_instruction` in bytes per second.
pub fn qec_instruction_bandwidth(n_qubits: u64, op_rate: f64, bytes_per_instruction: f64) -> Result<f64> {
    check_time("op_rate", op_rate)?;
    check_time("bytes_per_instruction", bytes_per_instruction)?;
    Ok(n_qubits as f64 * op_rate * bytes_per_instruction)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhileLoopStats {
    pub iterations: u64,
    pub wall_time: f64,
    pub busy_time: f64,
    pub utilisation: f64,
}

impl WhileLoopStats {
    pub fn idle_fraction(&self) -> f64 {
        1.0 - self.utilisation
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Event {
    /// QPU receives the instruction to run the next circuit.
    Start,
    /// QPU finishes the circuit and sends the result.
    Done,
    /// CPU receives the result.
    Arrive,
}

/// Discrete-event run of the loop "repeat the circuit until `n_zeros` zeros
/// have been measured", with the CPU deciding after every shot.
///
/// In `local` mode the decision is made next to the QPU and costs no latency.
pub fn simulate_while_loop(
    profile: &HardwareProfile,
    circuit_time: f64,
    n_zeros: u64,
    bias: f64,
    local: bool,
    seed: u64,
) -> Result<WhileLoopStats> {
    check_time("circuit_time", circuit_time)?;
    check_probability("bias", bias)?;
    if n_zeros > 0 && bias == 0.0 {
        return Err(Error::param("bias", "zero bias never terminates"));
    }
    let latency = if local { 0.0 } else { profile.t_lat };
    let mut rng = rng::stream(seed, &[]);
    // Nonnegative floats order the same as their bit patterns.
    let mut queue: BinaryHeap<Reverse<(u64, Event)>> = BinaryHeap::new();
    let (mut zeros, mut iterations, mut busy, mut now) = (0u64, 0u64, 0.0f64, 0.0f64);
    if n_zeros > 0 {
        queue.push(Reverse((0f64.to_bits(), Event::Start)));
    }
    while let Some(Reverse((t, event))) = queue.pop() {
        now = f64::from_bits(t);
        match event {
            Event::Start => {
                iterations += 1;
                busy += circuit_time;
                queue.push(Reverse(((now + circuit_time).to_bits(), Event::Done)));
            }
            Event::Done => {
                if rng.random::<f64>() < bias {
                    zeros += 1;
                }
                queue.push(Reverse(((now + latency).to_bits(), Event::Arrive)));
            }
            Event::Arrive => {
                if zeros < n_zeros {
                    queue.push(Reverse(((now + latency).to_bits(), Event::Start)));
                }
            }
        }
    }
    Ok(WhileLoopStats {
        iterations,
        wall_time: now,
        busy_time: busy,
        utilisation: if now > 0.0 { busy / now } else { 1.0 },
    })
}
