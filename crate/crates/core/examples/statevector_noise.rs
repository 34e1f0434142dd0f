//! Bell-state preparation on the statevector simulator, with and without
//! depolarizing noise.

use qstack::sim::{self, Circuit, Gate, NoiseModel, PauliString};

fn main() -> qstack::Result<()> {
    let bell = Circuit::from_gates(2, [Gate::Hadamard(0), Gate::Cnot { control: 0, target: 1 }])?;
    let state = sim::final_state(&bell)?;
    println!("ideal probabilities: {:?}", state.probabilities());
    let zz: PauliString = "ZZ".parse()?;
    println!("ideal <ZZ> = {}", state.expectation(&zz)?);

    for q in [0.0, 0.01, 0.05, 0.2] {
        let noise = NoiseModel::new(q, 0.0)?;
        let shots = 20_000u64;
        let total: i64 = (0..shots)
            .map(|s| sim::run_noisy_pauli(&bell, &noise, &zz, s).map(|v| v as i64))
            .sum::<qstack::Result<i64>>()?;
        println!("q = {q:<5} <ZZ> ≈ {:.4}", total as f64 / shots as f64);
    }
    Ok(())
}
