//! Desk-scale models of the classical bottlenecks in hybrid quantum computers.
//!
//! The crate bundles the protocols whose data flow stresses the link between a
//! host CPU and a quantum processor, together with closed-form cost models for
//! that link:
//!
//! - [`sim`]: seeded statevector simulator with stochastic Pauli noise.
//! - [`clifford`]: symplectic tableaux, uniform sampling and synthesis for
//!   up to three qubits.
//! - [`rb`]: randomised benchmarking sequences, survival estimation and decay
//!   fitting.
//! - [`zne`]: unitary folding, parameter noise scaling and zero-noise
//!   extrapolation.
//! - [`sampling`]: variance of fresh-circuit versus reused-circuit sampling.
//! - [`avqe`]: rejection-filtering phase estimation and the AVQE resource
//!   formulas.
//! - [`stack`]: hardware timing profiles, bandwidth, latency and decoder
//!   backlog models.
//! - [`qec`]: surface-code decoding graph, union-find decoder and logical
//!   failure Monte Carlo.
//! - [`cli`]: the `qstack` command-line harness writing reproducible CSV.
//!
//! Every stochastic routine takes an explicit `u64` seed. Per-shot random
//! streams are derived from `(seed, index path)` via [`rng::stream`], so
//! results do not depend on the number of worker threads.

pub mod avqe;
pub mod cli;
pub mod clifford;
pub mod error;
pub mod fit;
pub mod qec;
pub mod rb;
pub mod rng;
pub mod sampling;
pub mod sim;
pub mod stack;
pub mod zne;

pub use error::{Error, Result};
