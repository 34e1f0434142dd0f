//! Compares VQE and AVQE gate totals as α grows, on a coarse grid.

use qstack::avqe::{self, AqpeConfig};

fn main() -> qstack::Result<()> {
    let p = 1e-2;
    let base = AqpeConfig::new(0.0, p, 5);
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let (table, found) = avqe::crossover(&base, &grid, &[10, 1000], 9)?;
    println!("{:>5} {:>6} {:>12} {:>12}", "α", "n_P", "VQE", "AVQE");
    for c in &table {
        println!("{:>5} {:>6} {:>12.3e} {:>12.3e}", c.alpha, c.n_p, c.vqe, c.avqe);
    }
    println!("crossover α (n_P = 10, 1000): {found:?}");
    println!("α_max at depth 100: {:.3}", avqe::alpha_max(p, 100.0)?);
    Ok(())
}
