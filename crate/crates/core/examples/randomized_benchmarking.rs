//! Single-qubit randomised benchmarking under depolarizing noise.

use qstack::rb::{self, RbConfig};
use qstack::sim::NoiseModel;

fn main() -> qstack::Result<()> {
    let q = 0.01;
    let mut config = RbConfig::new(1, NoiseModel::new(q, 0.0)?, 7);
    config.depths = vec![1, 2, 5, 10, 20, 50, 100, 200];
    config.sequences_per_depth = 60;
    config.reuse_factor = 20;

    let table = rb::estimate_survival(&config)?;
    println!("{:>5} {:>10} {:>10}", "m", "survival", "stderr");
    for row in &table {
        println!("{:>5} {:>10.5} {:>10.5}", row.m, row.mean, row.stderr);
    }

    let fit = rb::fit_decay(&table)?;
    println!("fit: A = {:.4}, B = {:.4}, p = {:.5} ({})", fit.a, fit.b, fit.p, fit.method.name());
    println!("error per Clifford: {:.5}", fit.error_per_clifford(1));
    Ok(())
}
