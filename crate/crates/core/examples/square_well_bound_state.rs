//! Square well `q = -4` on `[0, 1)`: one bound state, its norming constant by
//! two routes, and the potential recovered from the computed data.

use halfline::forward::{forward, ForwardOptions};
use halfline::marchenko::{invert, InversionConfig};
use halfline::model::{Potential, RadialGrid};
use halfline::numkit::winding_number;

fn main() -> halfline::Result<()> {
    let q = Potential::square_well(RadialGrid::with_spacing(40.0, 0.01)?, 4.0, 1.0)?;
    let res = forward(
        &q,
        &ForwardOptions {
            compute_kernel: false,
            ..ForwardOptions::default()
        },
    )?;
    for nc in &res.norming {
        println!("kappa = {:.10}", nc.kappa);
        println!("  s (Wronskian)   = {:.10}", nc.s);
        println!("  s (1/||f||^2)   = {:.10}", nc.s_l2);
        println!("  relative diff   = {:.2e}", nc.relative_difference);
    }
    println!("index of S: {}", winding_number(res.sd.s_values())?.index);

    let inv = invert(&res.sd, &InversionConfig::default())?;
    println!("{:>6} {:>12} {:>12}", "x", "q", "recovered");
    for x in [0.0, 0.25, 0.5, 0.9, 0.99, 1.01, 1.1, 2.0] {
        let i = inv.potential.grid().index_of(x).expect("grid node");
        println!("{x:>6.2} {:>12.6} {:>12.6}", q.values()[i], inv.potential.values()[i]);
    }
    Ok(())
}
