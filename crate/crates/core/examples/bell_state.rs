//! Prepare the atom–photon Bell state at the default operating point and
//! compare it with the closed-form estimate.

use hybridgate::metrics::analytic_fidelity;
use hybridgate::model::PhysicalParams;
use hybridgate::protocol::bell_prep;

fn main() -> hybridgate::Result<()> {
    let p = PhysicalParams::default();

    for ideal in [true, false] {
        let res = bell_prep(&p, ideal)?;
        let kind = if ideal { "ideal" } else { "finite" };
        println!("{kind} pi-pulses: F = {:.6}, cavity load F = {:.6}", res.fidelity, res.cavity_prep_fidelity);
    }
    println!("analytic estimate: {:.6}", analytic_fidelity(&p)?);

    let res = bell_prep(&p, true)?;
    println!("\nschedule (nmax = {}):", res.nmax);
    for line in &res.schedule {
        println!("  {line}");
    }
    Ok(())
}
