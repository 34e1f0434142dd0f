//! Instruction bandwidth, while-loop idle time and decoder backlog.

use qstack::stack::{self, BandwidthSpec, HardwareProfile};

fn main() -> qstack::Result<()> {
    let spec = BandwidthSpec { n_qubits: 150, utilisation: 0.5, bytes_per_gate: 2.0, t_gate: 120e-9 };
    println!("gate stream: {:e} B/s", stack::gate_stream_bandwidth(&spec)?);
    println!("QEC stream, 10^5 qubits at 100 MHz: {:e} B/s", stack::qec_instruction_bandwidth(100_000, 1e8, 1.0)?);

    for latency in [1e-6, 100e-6] {
        let profile = HardwareProfile::trapped_ion().with_latency(latency);
        for t in [1e-6, 100e-6, 800e-6] {
            let closed = stack::while_loop_idle_fraction(&profile, t)?;
            let sim = stack::simulate_while_loop(&profile, t, 200, 0.5, false, 1)?;
            let local = stack::simulate_while_loop(&profile, t, 200, 0.5, true, 1)?;
            println!(
                "latency {latency:.0e} s, t_c = {t:.0e} s: idle {closed:.4} (simulated {:.4}, local {:.4})",
                sim.idle_fraction(),
                local.idle_fraction()
            );
        }
    }

    for f in [0.9, 1.0, 1.01, 1.1] {
        let b = stack::backlog_from_factor(f, 1000, 1e-6)?;
        println!("backlog f = {f}: 10^{:.2} s", b.log10_seconds);
    }
    Ok(())
}
