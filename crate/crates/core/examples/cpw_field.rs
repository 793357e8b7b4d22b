//! Electrostatic field above a coplanar waveguide and the resulting
//! single-photon coupling to a Rydberg transition.

use hybridgate::constants::TWO_PI;
use hybridgate::cpwfield::{normalize_zero_point, profile, solve_potential, summarize, CpwGeometry};
use hybridgate::model::PhysicalParams;

fn main() -> hybridgate::Result<()> {
    // 1 µm grid keeps this quick; the default is 0.5 µm
    let geom = CpwGeometry::default().with_spacing(1e-6);
    let grid = normalize_zero_point(solve_potential(&geom)?)?;
    let d = PhysicalParams::default().dipole_rr;
    let s = summarize(&grid, d)?;

    println!("{} x {} nodes, {} SOR iterations", grid.shape().0, grid.shape().1, grid.iterations);
    println!("eps_eff = {:.3}, resonator length = {:.2} mm", geom.eps_eff(), geom.resonator_length * 1e3);
    println!("g/2pi at surface above gap  = {:.3} MHz", s.g_surface_over_2pi_hz / 1e6);
    println!("g/2pi 10 um above gap       = {:.3} MHz", s.g_10um_over_2pi_hz / 1e6);
    println!("decay length                = {:.2} um", s.decay_length_m * 1e6);

    println!("\nprofile above the gap centre:");
    for pt in profile(&grid, geom.gap_center(), d)?.iter().step_by(10).take(8) {
        println!("  z = {:5.1} um  E0 = {:.3e} V/m  g/2pi = {:.3} MHz", pt.z.abs() * 1e6, pt.e0, pt.g / TWO_PI / 1e6);
    }
    Ok(())
}
