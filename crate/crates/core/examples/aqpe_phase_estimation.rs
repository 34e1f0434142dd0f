//! Rejection-filtering phase estimation of a fixed eigenphase.

use qstack::avqe::{self, AqpeConfig, Oracle};

fn main() -> qstack::Result<()> {
    let oracle = Oracle::analytic(1.234, 1)?;
    for alpha in [0.0, 0.5, 1.0] {
        let config = AqpeConfig::new(alpha, 1e-2, 11);
        let run = avqe::estimate_phase(&config, &oracle)?;
        let measurements: u64 = run.a_m.values().sum();
        println!(
            "α = {alpha}: estimate {:.5} (error {:.2e}), {} iterations, {} circuit runs, max depth {}",
            run.estimate,
            run.error(oracle.target()),
            run.iterations,
            measurements,
            run.a_m.keys().max().copied().unwrap_or(0),
        );
        println!("         formula N = {:.0}", avqe::n_measurements(1e-2, alpha)?);
    }
    Ok(())
}
