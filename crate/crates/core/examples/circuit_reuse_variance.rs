//! Estimator variance when each random circuit is reused `l` times instead of
//! drawing a fresh circuit per shot.

use qstack::sampling::{self, Scheme, TwoLevelModel};

fn main() -> qstack::Result<()> {
    let (mu, sigma2, k) = (0.3, 0.05, 20);
    println!("{:>4} {:>12} {:>12} {:>12} {:>10}", "l", "var_reuse", "mc_reuse", "var_fresh", "n(0.01)");
    for l in [1, 5, 20, 100] {
        let model = TwoLevelModel::new(mu, sigma2, k, l)?;
        let mc = sampling::monte_carlo_variance(&model, Scheme::Reuse, 100_000, 20, l)?;
        println!(
            "{l:>4} {:>12.3e} {:>12.3e} {:>12.3e} {:>10}",
            sampling::var_scheme1(&model),
            mc.variance,
            sampling::var_scheme2(&model),
            sampling::samples_required(mu, sigma2, l, 0.01)?,
        );
    }
    Ok(())
}
