//! Build a pulse schedule by hand: drive |1> to |r>, then let the atom
//! absorb the cavity photon, reading out atom and cavity populations at
//! several points along the way.

use std::f64::consts::PI;

use hybridgate::evolve::{run_schedule, Schedule};
use hybridgate::model::{PhysicalParams, SegmentConfig};
use hybridgate::protocol::pi_pulse;
use hybridgate::qops::{AtomLevel, DensityMatrix, FactorKind, HilbertSpace};

fn main() -> hybridgate::Result<()> {
    let p = PhysicalParams::default();
    let space = HilbertSpace::atom_cavity(3)?;

    // atom in |1>, one photon in the cavity
    let rho0 = DensityMatrix::basis(space.clone(), space.index_of(&[AtomLevel::Ground1.index(), 1]))?;

    for fraction in [0.25, 0.5, 0.75, 1.0] {
        let mut sched = Schedule::new();
        sched.push_unitary("excite", pi_pulse(&space)?)?;
        sched.push_evolve("swap", fraction * PI / (2.0 * p.g), SegmentConfig::resonant(&p))?;
        let rho = run_schedule(&rho0, &p, &sched)?;

        let atom = rho.partial_trace(&[FactorKind::Atom])?;
        let cavity = rho.partial_trace(&[FactorKind::Cavity])?;
        println!(
            "t = {:4.2} x pi/2g: P(r) = {:.4}  P(r') = {:.4}  P(n=0) = {:.4}  P(n=1) = {:.4}",
            fraction,
            atom.population(AtomLevel::Rydberg.index()),
            atom.population(AtomLevel::RydbergP.index()),
            cavity.population(0),
            cavity.population(1),
        );
    }
    Ok(())
}
