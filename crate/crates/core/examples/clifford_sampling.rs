//! Uniform Clifford sampling, composition and synthesis into gates.

use qstack::clifford;
use qstack::rng;

fn main() -> qstack::Result<()> {
    println!("|C1| = {}, |C2| = {}", clifford::enumerate_group(1)?.len(), clifford::enumerate_group(2)?.len());

    let mut r = rng::stream(42, &[]);
    let a = clifford::sample_with(2, &mut r)?;
    let b = clifford::sample_with(2, &mut r)?;
    let ab = clifford::compose(&a, &b)?;
    println!("symplectic: {}", ab.is_symplectic());
    println!("a · a⁻¹ = I: {}", clifford::compose(&a, &clifford::invert(&a))?.is_identity());

    let circuit = clifford::to_circuit(&ab);
    println!("synthesised {} gates:", circuit.len());
    for g in circuit.gates() {
        println!("  {g:?}");
    }
    Ok(())
}
