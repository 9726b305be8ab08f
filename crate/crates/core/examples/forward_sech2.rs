//! Direct problem for `q = -2 sech² x`, whose Jost function is `k/(k+i)`:
//! no bound states and a zero-energy resonance.

use halfline::forward::{forward, ForwardOptions};
use halfline::model::{MomentumGrid, Potential, RadialGrid};
use halfline::numkit::winding_number;
use num_complex::Complex64;

fn main() -> halfline::Result<()> {
    let q = Potential::sech2(RadialGrid::with_spacing(40.0, 0.01)?, 1.0)?;
    let options = ForwardOptions {
        kgrid: MomentumGrid::with_spacing(200.0, 0.05)?,
        ..ForwardOptions::default()
    };
    let res = forward(&q, &options)?;
    let kg = res.sd.kgrid();

    println!("{:>8} {:>24} {:>12} {:>10}", "k", "f(k)", "|f - exact|", "delta");
    for k in [0.0, 0.5, 1.0, 2.0, 5.0, 20.0] {
        let i = kg.index_of(k).expect("grid node");
        let exact = Complex64::new(k, 0.0) / Complex64::new(k, 1.0);
        let f = res.jost.f0[i];
        println!(
            "{k:>8.2} {:>11.8} {:>+11.8}i {:>12.2e} {:>10.6}",
            f.re,
            f.im,
            (f - exact).norm(),
            res.delta.values[i]
        );
    }
    println!("bound states: {}", res.sd.bound_state_count());
    println!("resonance: {} (f(0) = {:.2e})", res.bound_states.resonance, res.bound_states.f_at_zero);
    println!("index of S: {}", winding_number(res.sd.s_values())?.index);
    if let Some(a) = &res.kernel {
        println!("A(0,0) = {:.8} (exact -1)", a.get(0, 0));
    }
    Ok(())
}
