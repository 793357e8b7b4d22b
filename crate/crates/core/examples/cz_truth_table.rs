//! Truth table of the atom–photon Cz gate, with and without losses.

use hybridgate::model::PhysicalParams;
use hybridgate::protocol::{cz_truth_table, TRUTH_TABLE_LABELS};

fn main() -> hybridgate::Result<()> {
    let lossy = PhysicalParams::default();
    for (name, p) in [("lossless", lossy.lossless()), ("operating point", lossy)] {
        let table = cz_truth_table(&p, true)?;
        println!("{name}:");
        println!("  |photon,atom>  phase            population");
        for ((label, z), pop) in TRUTH_TABLE_LABELS.iter().zip(table.phases).zip(table.populations) {
            println!("  |{label}>          {:+.6}{:+.6}i  {pop:.6}", z.re, z.im);
        }
    }
    Ok(())
}
