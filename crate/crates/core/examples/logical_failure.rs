//! Logical failure rates, timeout failures and simple quantum volume.

use qstack::qec;

fn main() -> qstack::Result<()> {
    let shots = 5000;
    for p in [0.005, 0.01, 0.02] {
        for d in [3, 5] {
            let e = qec::logical_failure_rate(d, p, shots, 1)?;
            println!("d = {d}, p = {p}: p_L = {:.2e} ± {:.1e}", e.value, e.stderr);
        }
    }

    let results = qec::run_shots(5, 0.01, shots, 2)?;
    println!("mean work units at d = 5: {:.1}", qec::mean_work(&results));
    for w in [Some(0), Some(50), Some(200), None] {
        let t = qec::timeout_summary(&results, w);
        println!("W_max = {w:?}: p_ToE = {:.3e}, p_ToE/2 <= p_L: {}", t.p_toe.value, t.inequality_holds);
    }

    println!("SQV(78, 1e-3) = {:e}", qec::sqv(78, 1e-3)?);
    Ok(())
}
