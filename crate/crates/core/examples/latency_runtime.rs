//! Phase-estimation iteration time as the CPU-QPU latency grows.

use std::collections::BTreeMap;

use qstack::stack::{self, CircuitModel, HardwareProfile};

fn main() -> qstack::Result<()> {
    let model = CircuitModel::GateCount { n_p: 10 };
    for profile in stack::builtin_profiles() {
        println!("{}", profile.name);
        for latency in [1e-7, 1e-6, 1e-5, 1e-4, 1e-3] {
            let p = profile.with_latency(latency);
            let t1 = stack::aqpe_iteration_time(&p, 1, model);
            let t100 = stack::aqpe_iteration_time(&p, 100, model);
            println!("  latency {latency:.0e} s: T(1) = {t1:.3e} s, T(100) = {t100:.3e} s");
        }
    }
    let schedule: BTreeMap<u32, u64> = [(1, 40), (4, 30), (16, 20), (64, 10)].into();
    let ion = HardwareProfile::trapped_ion();
    println!("total for a sample schedule on {}: {:.3e} s", ion.name, stack::aqpe_total_time(&ion, &schedule, model));
    Ok(())
}
