//! Closed-form gate budget and its dependence on the principal quantum
//! number of the Rydberg pair.

use hybridgate::constants::TWO_PI;
use hybridgate::metrics::{analytic_fidelity, gate_duration, pi_pulse_error, scaling_estimate};
use hybridgate::model::PhysicalParams;

fn main() -> hybridgate::Result<()> {
    let p = PhysicalParams::default();
    println!("gate duration  = {:.1} ns", gate_duration(p.rabi, p.g)? * 1e9);
    println!("pi-pulse error = {:.2e}", pi_pulse_error(p.rabi, p.gamma_r)?);
    println!("kappa/2pi      = {:.1} kHz", p.kappa() / TWO_PI / 1e3);

    println!("\n{:>4} {:>11} {:>12} {:>10}", "n", "g/2pi (MHz)", "tau_r (us)", "F_analytic");
    for n in [50, 70, 90, 110] {
        let s = scaling_estimate(n, &p)?;
        let scaled = s.apply(&p);
        println!("{n:>4} {:>11.3} {:>12.1} {:>10.6}", s.g / TWO_PI / 1e6, 1e6 / s.gamma_r, analytic_fidelity(&scaled)?);
    }
    Ok(())
}
