//! Clifford group elements on up to three qubits as symplectic tableaux.
//!
//! A tableau stores the images `C X_j C†` and `C Z_j C†` of the generators.
//! Each image is a Pauli operator `i^e X^x Z^z` with bitmasks `x`, `z` and a
//! phase exponent `e` kept mod 4; for Hermitian images the phase reduces to a
//! sign bit, which is what [`Tableau::signs`] reports. Global phase is not
//! represented.

use std::collections::HashSet;

use num_complex::Complex64;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::{self, Rng};
use crate::sim::{Circuit, Gate, StateVector};

/// Largest register for which sampling and synthesis are supported.
pub const MAX_CLIFFORD_QUBITS: usize = 3;

/// `i^phase · X^x · Z^z` over at most eight qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliOp {
    pub x: u8,
    pub z: u8,
    pub phase: u8,
}

impl PauliOp {
    pub const IDENTITY: PauliOp = PauliOp { x: 0, z: 0, phase: 0 };

    /// Hermitian Pauli `(-1)^sign X^x Z^z` with Y factors written as `iXZ`.
    pub fn hermitian(x: u8, z: u8, negative: bool) -> Self {
        let ys = (x & z).count_ones() as u8;
        PauliOp {
            x,
            z,
            phase: (ys + if negative { 2 } else { 0 }) % 4,
        }
    }

    pub fn x_on(q: usize) -> Self {
        PauliOp::hermitian(1 << q, 0, false)
    }

    pub fn z_on(q: usize) -> Self {
        PauliOp::hermitian(0, 1 << q, false)
    }

    /// Operator product `self · rhs`.
    pub fn mul(self, rhs: PauliOp) -> PauliOp {
        let swap = 2 * (self.z & rhs.x).count_ones() as u8;
        PauliOp {
            x: self.x ^ rhs.x,
            z: self.z ^ rhs.z,
            phase: (self.phase + rhs.phase + swap) % 4,
        }
    }

    /// True when the operator is `-P` for a Hermitian `P`.
    pub fn is_negative(&self) -> bool {
        let ys = (self.x & self.z).count_ones() as u8;
        (self.phase + 4 - ys % 4) % 4 == 2
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as u32 + (self.x & self.z).count_ones()).is_multiple_of(2)
    }

    /// Symplectic form: 1 when the operators anticommute.
    pub fn anticommutes(&self, other: &PauliOp) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 1
    }

    /// Applies the operator to a statevector (Z factors first, then X, then the phase).
    pub fn apply_to(&self, state: &mut StateVector) -> Result<()> {
        for q in 0..8 {
            if self.z >> q & 1 == 1 {
                state.apply(&Gate::PauliZ(q))?;
            }
        }
        for q in 0..8 {
            if self.x >> q & 1 == 1 {
                state.apply(&Gate::PauliX(q))?;
            }
        }
        let factor = Complex64::i().powu(self.phase as u32);
        let amps: Vec<Complex64> = state.amplitudes().iter().map(|a| a * factor).collect();
        *state = StateVector::from_amplitudes(amps)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tableau {
    n: usize,
    /// `rows[j]` is the image of `X_j`, `rows[n + j]` the image of `Z_j`.
    rows: Vec<PauliOp>,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_CLIFFORD_QUBITS {
        return Err(Error::param(
            "n",
            format!("Clifford register size {n} outside 1..={MAX_CLIFFORD_QUBITS}"),
        ));
    }
    Ok(())
}

fn symplectic_product(a: (u8, u8), b: (u8, u8)) -> bool {
    ((a.0 & b.1).count_ones() + (a.1 & b.0).count_ones()) % 2 == 1
}

impl Tableau {
    pub fn identity(n: usize) -> Result<Self> {
        check_n(n)?;
        let mut rows: Vec<PauliOp> = (0..n).map(PauliOp::x_on).collect();
        rows.extend((0..n).map(PauliOp::z_on));
        Ok(Tableau { n, rows })
    }

    /// Builds a tableau from generator images; the result must be a valid Clifford.
    pub fn from_rows(n: usize, rows: Vec<PauliOp>) -> Result<Self> {
        check_n(n)?;
        if rows.len() != 2 * n {
            return Err(Error::LengthMismatch {
                expected: 2 * n,
                got: rows.len(),
            });
        }
        let t = Tableau { n, rows };
        if !t.rows.iter().all(PauliOp::is_hermitian) || !t.is_symplectic() {
            return Err(Error::param("rows", "generator images are not a symplectic Hermitian set"));
        }
        Ok(t)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[PauliOp] {
        &self.rows
    }

    /// Row sign bits (phases reported mod 2).
    pub fn signs(&self) -> Vec<bool> {
        self.rows.iter().map(PauliOp::is_negative).collect()
    }

    /// The `2n × 2n` binary matrix whose row `i` is `(x | z)` of generator image `i`.
    pub fn symplectic_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.n;
        self.rows
            .iter()
            .map(|r| {
                (0..n)
                    .map(|q| r.x >> q & 1 == 1)
                    .chain((0..n).map(|q| r.z >> q & 1 == 1))
                    .collect()
            })
            .collect()
    }

    /// Rows obey the canonical commutation relations of `X_j`, `Z_j`.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        (0..2 * n).all(|i| {
            (0..2 * n).all(|j| {
                let expected = i % n == j % n && i != j;
                self.rows[i].anticommutes(&self.rows[j]) == expected
            })
        })
    }

    pub fn is_identity(&self) -> bool {
        Tableau::identity(self.n).is_ok_and(|id| id == *self)
    }

    /// `C P C†` for a Pauli operator `P`.
    pub fn conjugate(&self, p: PauliOp) -> PauliOp {
        let mut out = PauliOp {
            x: 0,
            z: 0,
            phase: p.phase,
        };
        for q in 0..self.n {
            if p.x >> q & 1 == 1 {
                out = out.mul(self.rows[q]);
            }
        }
        for q in 0..self.n {
            if p.z >> q & 1 == 1 {
                out = out.mul(self.rows[self.n + q]);
            }
        }
        out
    }

    /// Tableau of a single Clifford gate.
    pub fn from_gate(n: usize, gate: &Gate) -> Result<Self> {
        let mut t = Tableau::identity(n)?;
        gate.validate(n)?;
        let set = |t: &mut Tableau, idx: usize, p: PauliOp| t.rows[idx] = p;
        match *gate {
            Gate::PauliX(q) => set(&mut t, n + q, PauliOp::hermitian(0, 1 << q, true)),
            Gate::PauliZ(q) => set(&mut t, q, PauliOp::hermitian(1 << q, 0, true)),
            Gate::PauliY(q) => {
                set(&mut t, q, PauliOp::hermitian(1 << q, 0, true));
                set(&mut t, n + q, PauliOp::hermitian(0, 1 << q, true));
            }
            Gate::Hadamard(q) => {
                set(&mut t, q, PauliOp::z_on(q));
                set(&mut t, n + q, PauliOp::x_on(q));
            }
            Gate::Phase(q) => set(&mut t, q, PauliOp::hermitian(1 << q, 1 << q, false)),
            Gate::PhaseDagger(q) => set(&mut t, q, PauliOp::hermitian(1 << q, 1 << q, true)),
            Gate::Cnot { control, target } => {
                set(&mut t, control, PauliOp::hermitian(1 << control | 1 << target, 0, false));
                set(&mut t, n + target, PauliOp::hermitian(0, 1 << control | 1 << target, false));
            }
            Gate::Cz(a, b) => {
                set(&mut t, a, PauliOp::hermitian(1 << a, 1 << b, false));
                set(&mut t, b, PauliOp::hermitian(1 << b, 1 << a, false));
            }
            g @ (Gate::RotationZ { .. } | Gate::RotationX { .. } | Gate::AncillaPhase { .. }) => {
                return Err(Error::param("gate", format!("{g:?} is not a Clifford gate")))
            }
        }
        Ok(t)
    }

    /// Tableau of a circuit built only from Clifford gates.
    pub fn from_circuit(circuit: &Circuit) -> Result<Self> {
        let n = circuit.n_qubits();
        circuit
            .gates()
            .iter()
            .try_fold(Tableau::identity(n)?, |acc, g| compose(&acc, &Tableau::from_gate(n, g)?))
    }

    fn then_gate(&mut self, gate: &Gate) {
        let g = Tableau::from_gate(self.n, gate).expect("clifford gate on valid qubits");
        for r in &mut self.rows {
            *r = g.conjugate(*r);
        }
    }
}

/// Tableau of `b ∘ a`: `a` acts first.
pub fn compose(a: &Tableau, b: &Tableau) -> Result<Tableau> {
    if a.n != b.n {
        return Err(Error::LengthMismatch {
            expected: a.n,
            got: b.n,
        });
    }
    Ok(Tableau {
        n: a.n,
        rows: a.rows.iter().map(|&r| b.conjugate(r)).collect(),
    })
}

/// Exact group inverse.
///
/// The binary part is `Ω Mᵀ Ω`; signs are then fixed so that the original
/// tableau maps each preimage back onto its generator with a `+` sign.
pub fn invert(a: &Tableau) -> Tableau {
    let n = a.n;
    let m = a.symplectic_matrix();
    let partner = |i: usize| if i < n { i + n } else { i - n };
    let rows = (0..2 * n)
        .map(|i| {
            let (mut x, mut z) = (0u8, 0u8);
            for j in 0..2 * n {
                if m[partner(j)][partner(i)] {
                    if j < n {
                        x |= 1 << j;
                    } else {
                        z |= 1 << (j - n);
                    }
                }
            }
            let candidate = PauliOp::hermitian(x, z, false);
            if a.conjugate(candidate).is_negative() {
                PauliOp::hermitian(x, z, true)
            } else {
                candidate
            }
        })
        .collect();
    Tableau { n, rows }
}

/// Draws a uniformly random vector satisfying `ok`.
fn draw_vector(rng: &mut Rng, n: usize, ok: impl Fn((u8, u8)) -> bool) -> (u8, u8) {
    let mask = ((1u16 << n) - 1) as u8;
    loop {
        let v = (rng.random::<u8>() & mask, rng.random::<u8>() & mask);
        if ok(v) {
            return v;
        }
    }
}

/// Uniform draw from the `n`-qubit Clifford group modulo global phase.
///
/// Generator images are chosen pair by pair: the image of `X_j` uniformly among
/// nonzero vectors symplectically orthogonal to every earlier pair, then the image
/// of `Z_j` uniformly among vectors pairing to 1 with it and orthogonal to the
/// earlier pairs. Every step has a number of options independent of the history,
/// so the symplectic part is uniform over `Sp(2n, 2)`; row signs are uniform bits.
pub fn sample_uniform(n: usize, seed: u64) -> Result<Tableau> {
    let mut rng = rng::stream(seed, &[]);
    sample_with(n, &mut rng)
}

/// [`sample_uniform`] drawing from an existing stream.
pub fn sample_with(n: usize, rng: &mut Rng) -> Result<Tableau> {
    check_n(n)?;
    let mut pairs: Vec<((u8, u8), (u8, u8))> = Vec::with_capacity(n);
    for _ in 0..n {
        let orthogonal = |v: (u8, u8), pairs: &[((u8, u8), (u8, u8))]| {
            pairs
                .iter()
                .all(|&(a, b)| !symplectic_product(v, a) && !symplectic_product(v, b))
        };
        let xv = draw_vector(rng, n, |v| v != (0, 0) && orthogonal(v, &pairs));
        let zv = draw_vector(rng, n, |v| symplectic_product(v, xv) && orthogonal(v, &pairs));
        pairs.push((xv, zv));
    }
    let mut rows: Vec<PauliOp> = pairs
        .iter()
        .map(|&((x, z), _)| PauliOp::hermitian(x, z, false))
        .collect();
    rows.extend(pairs.iter().map(|&(_, (x, z))| PauliOp::hermitian(x, z, false)));
    for r in &mut rows {
        if rng.random::<bool>() {
            r.phase = (r.phase + 2) % 4;
        }
    }
    Ok(Tableau { n, rows })
}

/// Synthesises a circuit over `{H, S, CNOT}` implementing the tableau.
///
/// The tableau is reduced to the identity qubit by qubit (lowest qubit first,
/// lowest partner qubit first) with `H`, `S†` and `CNOT`; the output is the
/// inverse of that reduction, so `S†` becomes `S` and Pauli sign fixes become
/// `S S` or `H S S H`.
pub fn to_circuit(a: &Tableau) -> Circuit {
    let n = a.n;
    let mut work = a.clone();
    let mut reduction: Vec<Gate> = Vec::new();
    let mut apply = |w: &mut Tableau, g: Gate| {
        w.then_gate(&g);
        reduction.push(g);
    };
    let bit = |v: u8, q: usize| v >> q & 1 == 1;

    for i in 0..n {
        // image of X_i -> ±X_i
        let p = work.rows[i];
        if (i..n).all(|k| !bit(p.x, k)) {
            let k = (i..n).find(|&k| bit(p.z, k)).expect("nonzero image");
            apply(&mut work, Gate::Hadamard(k));
        }
        let p = work.rows[i];
        if !bit(p.x, i) {
            let k = (i + 1..n).find(|&k| bit(p.x, k)).expect("x support");
            apply(&mut work, Gate::Cnot { control: k, target: i });
        }
        for k in i + 1..n {
            if bit(work.rows[i].x, k) {
                apply(&mut work, Gate::Cnot { control: i, target: k });
            }
        }
        for k in i + 1..n {
            if bit(work.rows[i].z, k) {
                apply(&mut work, Gate::Hadamard(k));
                apply(&mut work, Gate::Cnot { control: i, target: k });
                apply(&mut work, Gate::Hadamard(k));
            }
        }
        if bit(work.rows[i].z, i) {
            apply(&mut work, Gate::PhaseDagger(i));
        }

        // image of Z_i -> ±Z_i, keeping X_i fixed
        for k in i + 1..n {
            let q = work.rows[n + i];
            if !bit(q.x, k) && !bit(q.z, k) {
                continue;
            }
            if bit(q.x, k) && bit(q.z, k) {
                apply(&mut work, Gate::PhaseDagger(k));
            }
            if bit(work.rows[n + i].x, k) {
                apply(&mut work, Gate::Hadamard(k));
            }
            apply(&mut work, Gate::Cnot { control: k, target: i });
        }
        if bit(work.rows[n + i].x, i) {
            apply(&mut work, Gate::Hadamard(i));
            apply(&mut work, Gate::PhaseDagger(i));
            apply(&mut work, Gate::Hadamard(i));
        }
    }
    for i in 0..n {
        if work.rows[i].is_negative() {
            apply(&mut work, Gate::PhaseDagger(i));
            apply(&mut work, Gate::PhaseDagger(i));
        }
        if work.rows[n + i].is_negative() {
            apply(&mut work, Gate::Hadamard(i));
            apply(&mut work, Gate::PhaseDagger(i));
            apply(&mut work, Gate::PhaseDagger(i));
            apply(&mut work, Gate::Hadamard(i));
        }
    }
    debug_assert!(work.is_identity(), "reduction left {work:?}");

    Circuit::from_gates(n, reduction.iter().rev().map(Gate::inverse)).expect("valid qubits")
}

/// Every element of the `n`-qubit Clifford group mod phase, by closure under
/// `H`, `S` and `CNOT`. Only practical for `n <= 2`.
pub fn enumerate_group(n: usize) -> Result<Vec<Tableau>> {
    if n > 2 {
        return Err(Error::param("n", "enumeration is limited to two qubits"));
    }
    let mut generators = Vec::new();
    for q in 0..n {
        generators.push(Tableau::from_gate(n, &Gate::Hadamard(q))?);
        generators.push(Tableau::from_gate(n, &Gate::Phase(q))?);
        for t in 0..n {
            if t != q {
                generators.push(Tableau::from_gate(n, &Gate::Cnot { control: q, target: t })?);
            }
        }
    }
    let id = Tableau::identity(n)?;
    let mut seen: HashSet<Tableau> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    let mut all = frontier.clone();
    while let Some(t) = frontier.pop() {
        for g in &generators {
            let next = compose(&t, g)?;
            if seen.insert(next.clone()) {
                all.push(next.clone());
                frontier.push(next);
            }
        }
    }
    Ok(all)
}
