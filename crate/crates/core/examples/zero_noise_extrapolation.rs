//! Zero-noise extrapolation with unitary folding and with parameter noise.

use qstack::sim::{self, NoiseModel, PauliString};
use qstack::zne::{self, Ensemble, Method, Scaling};

fn main() -> qstack::Result<()> {
    let base = zne::layered_ansatz(2, 2, 3)?;
    let observable: PauliString = "ZI".parse()?;
    let exact = sim::final_state(&base)?.expectation(&observable)?;
    println!("noiseless <ZI> = {exact:.4}");

    let folding = Ensemble {
        base: base.clone(),
        scaling: Scaling::UnitaryFolding { blocks_per_layer: vec![0, 1, 2] },
        shots: 4000,
        noise: NoiseModel::new(0.01, 0.0)?,
        seed: 1,
    };
    let table = zne::collect(&folding, &observable)?;
    for row in &table {
        println!("λ = {:.3}: {:.4} ± {:.4}", row.lambda, row.mean, row.stderr);
    }
    for method in [Method::Richardson, Method::Linear, Method::Exponential] {
        let fit = zne::extrapolate(&table, method)?;
        println!("{:>12}: E(0) = {:.4} ± {:.4}", method.name(), fit.e_zero, fit.e_zero_stderr);
    }

    let params = Ensemble {
        base,
        scaling: Scaling::ParameterScaling { lambdas: zne::DEFAULT_LAMBDAS.to_vec(), reference_variance: 0.05 },
        shots: 4000,
        noise: NoiseModel::ideal(),
        seed: 2,
    };
    let table = zne::collect(&params, &observable)?;
    let fit = zne::extrapolate(&table, Method::Exponential)?;
    println!("parameter scaling, exponential: E(0) = {:.4} ± {:.4}", fit.e_zero, fit.e_zero_stderr);
    Ok(())
}
