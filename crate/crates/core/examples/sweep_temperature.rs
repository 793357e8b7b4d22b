//! Thermal degradation of the cavity load and of the Bell state.

use hybridgate::metrics::{linear_axis, sweep_temperature, SweepOptions};
use hybridgate::model::PhysicalParams;

fn main() -> hybridgate::Result<()> {
    let axis = linear_axis(0.0, 0.2, 0.02);
    let opts = SweepOptions { workers: Some(2), ..SweepOptions::default() };
    let res = sweep_temperature(&PhysicalParams::default(), &axis, &opts)?;

    println!("{:>8} {:>5} {:>10} {:>10}", "T (mK)", "nmax", "F_gamma", "F_bell");
    for c in &res.cells {
        println!(
            "{:>8.0} {:>5} {:>10.6} {:>10.6}",
            c.temp_k * 1e3,
            c.nmax,
            c.f_gamma.unwrap_or(f64::NAN),
            c.f_bell.unwrap_or(f64::NAN)
        );
    }
    println!("total {:.1} s", res.total_wall_time_s);
    Ok(())
}
