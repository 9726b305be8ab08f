//! Inversion of `S = (k+i)/(k-i)`, equivalently `F(p) = 2e^{-p}`, which
//! reconstructs `q = -2 sech² x`.

use halfline::marchenko::{invert, InversionConfig};
use halfline::model::{MomentumGrid, ScatteringData};
use num_complex::Complex64;

fn main() -> halfline::Result<()> {
    let kgrid = MomentumGrid::with_spacing(200.0, 0.05)?;
    let sd = ScatteringData::from_fn(kgrid, |k| Complex64::new(k, 1.0) / Complex64::new(k, -1.0), vec![])?;
    let config = InversionConfig::default();
    let inv = invert(&sd, &config)?;
    if let Some(report) = &inv.report {
        println!("validation passed: {} (index {:?})", report.passed, report.index);
    }
    println!("A(0,0) = {:.10}", inv.kernel.get(0, 0));
    println!("{:>6} {:>14} {:>14} {:>10}", "x", "q", "-2 sech^2 x", "error");
    let grid = inv.potential.grid();
    for x in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let i = grid.index_of(x).expect("grid node");
        let exact = -2.0 / x.cosh().powi(2);
        let v = inv.potential.values()[i];
        println!("{x:>6.2} {v:>14.8} {exact:>14.8} {:>10.2e}", (v - exact).abs());
    }
    Ok(())
}
