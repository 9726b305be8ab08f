//! The reverse arrows from the transformation kernel: `A ⇒ F ⇒ A` and
//! `A ⇒ 𝒮`, checked against the forward data for the square well.

use halfline::forward::{forward, kernel_from_potential, BoundStateSearch, ForwardOptions};
use halfline::marchenko::{data_from_kernel, f_from_kernel, marchenko_kernel_extrapolated};
use halfline::model::{Potential, RadialGrid};

fn main() -> halfline::Result<()> {
    let q = Potential::square_well(RadialGrid::with_spacing(40.0, 0.01)?, 4.0, 1.0)?;
    let a = kernel_from_potential(&q)?;
    let f = f_from_kernel(&a)?;
    let half = RadialGrid::with_spacing(20.0, 0.01)?;
    let back = marchenko_kernel_extrapolated(&f, &half)?;
    let n = half.len();
    let err = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .map(|(i, j)| (back.get(i, j) - a.get(i, j)).abs())
        .fold(0.0, f64::max);
    println!("A -> F -> A: sup error {err:.2e} on [0, 20]");

    let res = forward(
        &q,
        &ForwardOptions {
            compute_kernel: false,
            ..ForwardOptions::default()
        },
    )?;
    let kd = data_from_kernel(&a, res.sd.kgrid(), &BoundStateSearch::for_potential(&q))?;
    let ds = kd
        .sd
        .s_values()
        .iter()
        .zip(res.sd.s_values())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    println!("A -> S: max |dS| {ds:.2e} against the forward data");
    for (x, y) in kd.sd.bound_states().iter().zip(res.sd.bound_states()) {
        println!("  kappa {:.8} vs {:.8}, s {:.8} vs {:.8}", x.kappa, y.kappa, x.s, y.s);
    }
    Ok(())
}
