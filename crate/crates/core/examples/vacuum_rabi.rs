//! Vacuum Rabi oscillation |r,1> -> |r',0> over one full period.

use std::f64::consts::PI;

use hybridgate::evolve::Backend;
use hybridgate::model::PhysicalParams;
use hybridgate::protocol::vacuum_rabi;

fn main() -> hybridgate::Result<()> {
    let lossless = PhysicalParams::default().lossless();
    let lossy = PhysicalParams { q_factor: 1e4, ..PhysicalParams::default() };
    let times: Vec<f64> = (0..=20).map(|k| PI / lossless.g * k as f64 / 20.0).collect();

    let a = vacuum_rabi(&lossless, &times, Backend::Auto)?;
    let b = vacuum_rabi(&lossy, &times, Backend::Auto)?;

    println!("{:>10} {:>10} {:>10} {:>10}", "t (ns)", "sin^2(gt)", "Q = inf", "Q = 1e4");
    for ((t, pa), pb) in times.iter().zip(&a).zip(&b) {
        println!("{:>10.2} {:>10.6} {:>10.6} {:>10.6}", t * 1e9, (lossless.g * t).sin().powi(2), pa, pb);
    }
    Ok(())
}
