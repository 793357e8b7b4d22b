//! Bell fidelity over a coarse coupling / quality-factor grid, written as
//! CSV + JSON to a temporary directory.

use hybridgate::constants::TWO_PI;
use hybridgate::metrics::{log_axis, sweep_gq, SweepOptions};
use hybridgate::model::PhysicalParams;

fn main() -> hybridgate::Result<()> {
    let g_axis = log_axis(0.5e6, 20e6, 4);
    let q_axis = log_axis(1e4, 1e7, 4);
    let res = sweep_gq(&PhysicalParams::default(), &g_axis, &q_axis, &SweepOptions::default())?;

    print!("{:>12}", "g/2pi \\ Q");
    for q in &q_axis {
        print!("{q:>10.0e}");
    }
    println!();
    for (gi, g) in g_axis.iter().enumerate() {
        print!("{:>9.2} MHz", g / 1e6);
        for cell in &res.cells[gi * q_axis.len()..(gi + 1) * q_axis.len()] {
            print!("{:>10.5}", cell.f_bell.unwrap_or(f64::NAN));
        }
        println!();
    }

    let best = res.cells.iter().max_by(|a, b| a.f_bell.partial_cmp(&b.f_bell).unwrap()).unwrap();
    println!(
        "\nbest: F = {:.6} at g = 2pi x {:.2} MHz (g = {:.3e} rad/s), Q = {:.0e}",
        best.f_bell.unwrap_or(f64::NAN),
        best.g_over_2pi_hz / 1e6,
        best.g_over_2pi_hz * TWO_PI,
        best.q_factor
    );

    let dir = std::env::temp_dir().join("hybridgate_example");
    let (csv, json) = res.write(&dir, "sweep_gq")?;
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}
