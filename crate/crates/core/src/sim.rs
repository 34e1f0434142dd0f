//! Seeded statevector simulator with stochastic Pauli noise.
//!
//! Qubit `q` is bit `q` of the basis-state index, and bitstrings are printed
//! with qubit 0 first, so `|10⟩` means qubit 0 is set.
//!
//! Depolarizing noise is unravelled: after every gate, each qubit the gate
//! touched independently suffers a uniformly random X, Y or Z with the
//! configured probability. Averaged over shots this reproduces the channel
//! `ρ ↦ (1-q)ρ + q/3 (XρX + YρY + ZρZ)` on every involved qubit.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use arrayvec::ArrayVec;
use num_complex::Complex64;
use rand::Rng as _;

use crate::error::{check_probability, Error, Result};
use crate::rng::{self, Rng};

/// Hard cap on register size.
pub const MAX_QUBITS: usize = 12;

const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    PauliX(usize),
    PauliY(usize),
    PauliZ(usize),
    Hadamard(usize),
    /// `S = diag(1, i)`.
    Phase(usize),
    /// `S† = diag(1, -i)`.
    PhaseDagger(usize),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
    /// `exp(-i θ Z / 2)`.
    RotationZ { qubit: usize, angle: f64 },
    /// `exp(-i θ X / 2)`.
    RotationX { qubit: usize, angle: f64 },
    /// `diag(1, e^{-i M θ})` on the ancilla of a phase-estimation circuit.
    AncillaPhase { qubit: usize, power: u32, theta: f64 },
}

impl Gate {
    pub fn qubits(&self) -> ArrayVec<usize, 2> {
        let mut out = ArrayVec::new();
        match *self {
            Gate::PauliX(q)
            | Gate::PauliY(q)
            | Gate::PauliZ(q)
            | Gate::Hadamard(q)
            | Gate::Phase(q)
            | Gate::PhaseDagger(q)
            | Gate::RotationZ { qubit: q, .. }
            | Gate::RotationX { qubit: q, .. }
            | Gate::AncillaPhase { qubit: q, .. } => out.push(q),
            Gate::Cnot { control, target } => {
                out.push(control);
                out.push(target);
            }
            Gate::Cz(a, b) => {
                out.push(a);
                out.push(b);
            }
        }
        out
    }

    /// Rotation angle of a parameterised gate.
    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::RotationZ { angle, .. } | Gate::RotationX { angle, .. } => Some(angle),
            Gate::AncillaPhase { theta, .. } => Some(theta),
            _ => None,
        }
    }

    /// Same gate with its rotation angle replaced; non-parameterised gates are returned unchanged.
    pub fn with_angle(&self, new_angle: f64) -> Gate {
        match *self {
            Gate::RotationZ { qubit, .. } => Gate::RotationZ { qubit, angle: new_angle },
            Gate::RotationX { qubit, .. } => Gate::RotationX { qubit, angle: new_angle },
            Gate::AncillaPhase { qubit, power, .. } => Gate::AncillaPhase {
                qubit,
                power,
                theta: new_angle,
            },
            g => g,
        }
    }

    /// Same gate with every qubit index passed through `f`.
    pub fn relabel(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::PauliX(q) => Gate::PauliX(f(q)),
            Gate::PauliY(q) => Gate::PauliY(f(q)),
            Gate::PauliZ(q) => Gate::PauliZ(f(q)),
            Gate::Hadamard(q) => Gate::Hadamard(f(q)),
            Gate::Phase(q) => Gate::Phase(f(q)),
            Gate::PhaseDagger(q) => Gate::PhaseDagger(f(q)),
            Gate::Cnot { control, target } => Gate::Cnot {
                control: f(control),
                target: f(target),
            },
            Gate::Cz(a, b) => Gate::Cz(f(a), f(b)),
            Gate::RotationZ { qubit, angle } => Gate::RotationZ { qubit: f(qubit), angle },
            Gate::RotationX { qubit, angle } => Gate::RotationX { qubit: f(qubit), angle },
            Gate::AncillaPhase { qubit, power, theta } => Gate::AncillaPhase {
                qubit: f(qubit),
                power,
                theta,
            },
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Phase(q) => Gate::PhaseDagger(q),
            Gate::PhaseDagger(q) => Gate::Phase(q),
            g @ Gate::RotationZ { .. } | g @ Gate::RotationX { .. } | g @ Gate::AncillaPhase { .. } => {
                g.with_angle(-g.angle().unwrap_or(0.0))
            }
            g => g,
        }
    }

    /// Checks the gate against an `n_qubits` register.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::RepeatedQubit(qs[0]));
        }
        match self.angle() {
            Some(a) if !a.is_finite() => Err(Error::NonFiniteAngle(a)),
            _ => Ok(()),
        }
    }

    fn single_qubit_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let c = Complex64::new;
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        Some(match *self {
            Gate::PauliX(_) => [[zero, one], [one, zero]],
            Gate::PauliY(_) => [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]],
            Gate::PauliZ(_) => [[one, zero], [zero, -one]],
            Gate::Hadamard(_) => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate::Phase(_) => [[one, zero], [zero, c(0.0, 1.0)]],
            Gate::PhaseDagger(_) => [[one, zero], [zero, c(0.0, -1.0)]],
            Gate::RotationZ { angle, .. } => [
                [Complex64::from_polar(1.0, -angle / 2.0), zero],
                [zero, Complex64::from_polar(1.0, angle / 2.0)],
            ],
            Gate::RotationX { angle, .. } => {
                let (s, co) = (angle / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            Gate::AncillaPhase { power, theta, .. } => [
                [one, zero],
                [zero, Complex64::from_polar(1.0, -(power as f64) * theta)],
            ],
            Gate::Cnot { .. } | Gate::Cz(..) => return None,
        })
    }
}

/// Ordered gate list over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::param("n_qubits", "must be positive"));
        }
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(n_qubits, MAX_QUBITS));
        }
        Ok(Circuit {
            n_qubits,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(n_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Circuit::new(n_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends every gate of `other`, which must act on the same register size.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// The adjoint circuit: reversed order, every gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Same circuit with each gate rewritten by `f`. Qubits are re-validated.
    pub fn map_gates(&self, mut f: impl FnMut(&Gate) -> Gate) -> Result<Circuit> {
        Circuit::from_gates(self.n_qubits, self.gates.iter().map(&mut f))
    }

    /// ASAP layering: each gate lands in the first layer after the last gate
    /// sharing one of its qubits. Concatenating the layers is equivalent to
    /// the original circuit.
    pub fn layers(&self) -> Vec<Vec<Gate>> {
        let mut depth = vec![0usize; self.n_qubits];
        let mut layers: Vec<Vec<Gate>> = Vec::new();
        for g in &self.gates {
            let qs = g.qubits();
            let level = qs.iter().map(|&q| depth[q]).max().unwrap_or(0);
            if level == layers.len() {
                layers.push(Vec::new());
            }
            layers[level].push(*g);
            for &q in &qs {
                depth[q] = level + 1;
            }
        }
        layers
    }
}

/// Per-gate stochastic noise parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseModel {
    depolarizing: f64,
    readout_flip: f64,
}

impl NoiseModel {
    pub fn new(depolarizing: f64, readout_flip: f64) -> Result<Self> {
        check_probability("depolarizing_prob", depolarizing)?;
        check_probability("measurement_flip_prob", readout_flip)?;
        Ok(NoiseModel {
            depolarizing,
            readout_flip,
        })
    }

    pub fn ideal() -> Self {
        NoiseModel::default()
    }

    pub fn depolarizing(&self) -> f64 {
        self.depolarizing
    }

    pub fn readout_flip(&self) -> f64 {
        self.readout_flip
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    fn gate(self, q: usize) -> Option<Gate> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(Gate::PauliX(q)),
            Pauli::Y => Some(Gate::PauliY(q)),
            Pauli::Z => Some(Gate::PauliZ(q)),
        }
    }
}

/// Tensor product of single-qubit Paulis; entry `i` acts on qubit `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Self {
        let mut v = vec![Pauli::I; n_qubits];
        v[qubit] = p;
        PauliString(v)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Parse(format!("`{other}` is not a Pauli label"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            let c = match p {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Computational-basis measurement record, qubit 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Outcome(pub Vec<bool>);

impl Outcome {
    pub fn is_all_zero(&self) -> bool {
        self.0.iter().all(|b| !b)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        StateVector::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::param("n_qubits", "must be positive"));
        }
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(n_qubits, MAX_QUBITS));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::param("index", format!("{index} >= dimension {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Wraps raw amplitudes; the vector must be normalised.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::param("amplitudes", "length must be a power of two >= 2"));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(n_qubits, MAX_QUBITS));
        }
        let s = StateVector { n_qubits, amps };
        if (s.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::param("amplitudes", format!("norm² = {}", s.norm_sqr())));
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Equality up to a global phase.
    pub fn approx_eq_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        self.n_qubits == other.n_qubits && (self.inner(other).norm() - 1.0).abs() <= tol
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::Cnot { control, target } => {
                let (cm, tm) = (1usize << control, 1usize << target);
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
            Gate::Cz(a, b) => {
                let mask = (1usize << a) | (1usize << b);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            g => {
                let m = g.single_qubit_matrix().expect("single-qubit gate");
                let bit = 1usize << g.qubits()[0];
                for i in 0..self.amps.len() {
                    if i & bit == 0 {
                        let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                        self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                        self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                got: circuit.n_qubits(),
            });
        }
        for g in circuit.gates() {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Applies the Pauli string as an operator.
    pub fn apply_pauli_string(&mut self, pauli: &PauliString) -> Result<()> {
        self.check_len(pauli)?;
        for (q, p) in pauli.0.iter().enumerate() {
            if let Some(g) = p.gate(q) {
                self.apply(&g)?;
            }
        }
        Ok(())
    }

    /// Exact `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, pauli: &PauliString) -> Result<f64> {
        let mut image = self.clone();
        image.apply_pauli_string(pauli)?;
        Ok(self.inner(&image).re.clamp(-1.0, 1.0))
    }

    /// Samples a basis index from the Born distribution.
    pub fn sample_index(&self, rng: &mut Rng) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            acc += a.norm_sqr();
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding slack above the cumulative sum
        self.amps
            .iter()
            .rposition(|a| a.norm_sqr() > 0.0)
            .unwrap_or(0)
    }

    fn check_len(&self, pauli: &PauliString) -> Result<()> {
        if pauli.len() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                got: pauli.len(),
            });
        }
        Ok(())
    }
}

/// Functional form of [`StateVector::apply`].
pub fn apply_gate(mut state: StateVector, gate: &Gate) -> Result<StateVector> {
    state.apply(gate)?;
    Ok(state)
}

/// Exact `⟨ψ|P|ψ⟩` for a state.
pub fn expectation(state: &StateVector, pauli: &PauliString) -> Result<f64> {
    state.expectation(pauli)
}

/// Noiseless output state of `circuit` on `|0…0⟩`.
pub fn final_state(circuit: &Circuit) -> Result<StateVector> {
    let mut s = StateVector::zero(circuit.n_qubits())?;
    s.apply_circuit(circuit)?;
    Ok(s)
}

/// Runs the gates of `circuit` on `state`, inserting stochastic Pauli errors
/// after each gate on each qubit it touched.
pub fn evolve_noisy(
    state: &mut StateVector,
    circuit: &Circuit,
    noise: &NoiseModel,
    rng: &mut Rng,
) -> Result<()> {
    if circuit.n_qubits() != state.n_qubits() {
        return Err(Error::LengthMismatch {
            expected: state.n_qubits(),
            got: circuit.n_qubits(),
        });
    }
    let q = noise.depolarizing();
    for g in circuit.gates() {
        state.apply(g)?;
        if q > 0.0 {
            for &qubit in &g.qubits() {
                if rng.random::<f64>() < q {
                    let p = Pauli::NON_IDENTITY[rng.random_range(0..3)];
                    state.apply(&p.gate(qubit).expect("non-identity"))?;
                }
            }
        }
    }
    Ok(())
}

/// Projective measurement of every qubit followed by independent readout flips.
pub fn measure_all(state: &StateVector, readout_flip: f64, rng: &mut Rng) -> Outcome {
    let index = state.sample_index(rng);
    Outcome(
        (0..state.n_qubits())
            .map(|q| {
                let bit = index >> q & 1 == 1;
                let flip = readout_flip > 0.0 && rng.random::<f64>() < readout_flip;
                bit ^ flip
            })
            .collect(),
    )
}

/// Ideal measurement of a Pauli observable (basis change is noiseless),
/// with readout flips on the measured qubits. Returns the eigenvalue `±1`.
pub fn measure_pauli(
    state: &StateVector,
    pauli: &PauliString,
    readout_flip: f64,
    rng: &mut Rng,
) -> Result<i8> {
    state.check_len(pauli)?;
    let mut rotated = state.clone();
    for (q, p) in pauli.0.iter().enumerate() {
        match p {
            Pauli::X => rotated.apply(&Gate::Hadamard(q))?,
            Pauli::Y => {
                rotated.apply(&Gate::PhaseDagger(q))?;
                rotated.apply(&Gate::Hadamard(q))?;
            }
            Pauli::I | Pauli::Z => {}
        }
    }
    let bits = measure_all(&rotated, readout_flip, rng);
    let parity = pauli
        .0
        .iter()
        .zip(&bits.0)
        .filter(|(p, &b)| **p != Pauli::I && b)
        .count();
    Ok(if parity % 2 == 0 { 1 } else { -1 })
}

/// One noisy shot of `circuit` from `|0…0⟩`; deterministic in `(circuit, noise, seed)`.
pub fn run_noisy(circuit: &Circuit, noise: &NoiseModel, seed: u64) -> Result<Outcome> {
    let mut rng = rng::stream(seed, &[]);
    let mut state = StateVector::zero(circuit.n_qubits())?;
    evolve_noisy(&mut state, circuit, noise, &mut rng)?;
    Ok(measure_all(&state, noise.readout_flip(), &mut rng))
}

/// One noisy shot measuring a Pauli observable; returns `±1`.
pub fn run_noisy_pauli(
    circuit: &Circuit,
    noise: &NoiseModel,
    pauli: &PauliString,
    seed: u64,
) -> Result<i8> {
    let mut rng = rng::stream(seed, &[]);
    let mut state = StateVector::zero(circuit.n_qubits())?;
    evolve_noisy(&mut state, circuit, noise, &mut rng)?;
    measure_pauli(&state, pauli, noise.readout_flip(), &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn plus() -> StateVector {
        apply_gate(StateVector::zero(1).unwrap(), &Gate::Hadamard(0)).unwrap()
    }

    #[test]
    fn hadamard_on_zero() {
        let s = plus();
        for a in s.amplitudes() {
            assert!((a.re - FRAC_1_SQRT_2).abs() < 1e-15 && a.im.abs() < 1e-15);
        }
    }

    #[test]
    fn cnot_maps_10_to_11() {
        let s = StateVector::basis(2, 0b01).unwrap();
        let s = apply_gate(s, &Gate::Cnot { control: 0, target: 1 }).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b11).unwrap());
    }

    #[test]
    fn rz_pi_on_plus_gives_minus() {
        let s = apply_gate(plus(), &Gate::RotationZ { qubit: 0, angle: PI }).unwrap();
        let minus = apply_gate(StateVector::basis(1, 1).unwrap(), &Gate::Hadamard(0)).unwrap();
        assert!(s.approx_eq_up_to_phase(&minus, 1e-12));
    }

    #[test]
    fn out_of_range_target_is_rejected() {
        let err = apply_gate(StateVector::zero(2).unwrap(), &Gate::PauliX(2)).unwrap_err();
        assert_eq!(err, Error::QubitOutOfRange { index: 2, n_qubits: 2 });
        assert!(Circuit::new(2).unwrap().push(Gate::Cz(1, 1)).is_err());
        assert!(Circuit::new(13).is_err());
        assert!(Gate::RotationX { qubit: 0, angle: f64::NAN }.validate(1).is_err());
    }

    #[test]
    fn expectation_examples() {
        let z: PauliString = "Z".parse().unwrap();
        let x: PauliString = "X".parse().unwrap();
        assert_eq!(StateVector::zero(1).unwrap().expectation(&z).unwrap(), 1.0);
        assert_eq!(StateVector::basis(1, 1).unwrap().expectation(&z).unwrap(), -1.0);
        assert!((plus().expectation(&x).unwrap() - 1.0).abs() < 1e-12);
        let zz: PauliString = "ZZ".parse().unwrap();
        assert!(plus().expectation(&zz).is_err());
    }

    #[test]
    fn ancilla_phase_is_diag() {
        let g = Gate::AncillaPhase { qubit: 0, power: 3, theta: 0.2 };
        let s = apply_gate(StateVector::basis(1, 1).unwrap(), &g).unwrap();
        let expected = Complex64::from_polar(1.0, -0.6);
        assert!((s.amplitudes()[1] - expected).norm() < 1e-14);
    }

    #[test]
    fn empty_circuit_and_single_x() {
        let c = Circuit::new(3).unwrap();
        for seed in 0..20 {
            assert!(run_noisy(&c, &NoiseModel::ideal(), seed).unwrap().is_all_zero());
        }
        let x = Circuit::from_gates(1, [Gate::PauliX(0)]).unwrap();
        assert_eq!(run_noisy(&x, &NoiseModel::ideal(), 5).unwrap().to_string(), "1");
    }

    #[test]
    fn noisy_runs_are_deterministic_per_seed() {
        let c = Circuit::from_gates(
            2,
            [Gate::Hadamard(0), Gate::Cnot { control: 0, target: 1 }, Gate::RotationX { qubit: 1, angle: 0.3 }],
        )
        .unwrap();
        let noise = NoiseModel::new(0.2, 0.1).unwrap();
        let a: Vec<_> = (0..50).map(|s| run_noisy(&c, &noise, s).unwrap()).collect();
        let b: Vec<_> = (0..50).map(|s| run_noisy(&c, &noise, s).unwrap()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn inverse_circuit_undoes() {
        let c = Circuit::from_gates(
            2,
            [
                Gate::Hadamard(0),
                Gate::Phase(1),
                Gate::Cnot { control: 0, target: 1 },
                Gate::RotationZ { qubit: 1, angle: 0.4 },
                Gate::AncillaPhase { qubit: 0, power: 2, theta: 0.3 },
            ],
        )
        .unwrap();
        let mut all = c.clone();
        all.append(&c.inverse()).unwrap();
        let s = final_state(&all).unwrap();
        assert!(s.approx_eq_up_to_phase(&StateVector::zero(2).unwrap(), 1e-12));
    }

    #[test]
    fn layers_respect_qubit_order() {
        let c = Circuit::from_gates(
            3,
            [Gate::Hadamard(0), Gate::Hadamard(1), Gate::Cnot { control: 0, target: 1 }, Gate::PauliX(2)],
        )
        .unwrap();
        let layers = c.layers();
        assert_eq!(layers.len(), 2);
        assert_eq!(layers[0], vec![Gate::Hadamard(0), Gate::Hadamard(1), Gate::PauliX(2)]);
        assert_eq!(layers[1], vec![Gate::Cnot { control: 0, target: 1 }]);
    }

    #[test]
    fn measure_pauli_on_eigenstates() {
        let mut rng = rng::stream(1, &[]);
        let x: PauliString = "X".parse().unwrap();
        for _ in 0..20 {
            assert_eq!(measure_pauli(&plus(), &x, 0.0, &mut rng).unwrap(), 1);
        }
        let yy: PauliString = "YY".parse().unwrap();
        // (|00⟩ - |11⟩)/√2 is a -1 eigenstate of YY... check via exact expectation instead
        let mut s = StateVector::zero(2).unwrap();
        s.apply(&Gate::Hadamard(0)).unwrap();
        s.apply(&Gate::Cnot { control: 0, target: 1 }).unwrap();
        let exact = s.expectation(&yy).unwrap();
        for _ in 0..20 {
            assert_eq!(measure_pauli(&s, &yy, 0.0, &mut rng).unwrap() as f64, exact);
        }
    }
}
