//! Jost function from `S` alone by factorization, in the generic and the
//! resonant case.

use halfline::model::{BoundState, MomentumGrid, ScatteringData};
use halfline::riemann::{solve_riemann, verify_factorization, RiemannOptions};
use num_complex::Complex64;

fn ratio(k: f64) -> Complex64 {
    Complex64::new(k, 1.0) / Complex64::new(k, -1.0)
}

fn main() -> halfline::Result<()> {
    let kgrid = MomentumGrid::with_spacing(200.0, 0.05)?;
    let cases = [
        ("S = ((k+i)/(k-i))^2, kappa = {1}", ScatteringData::from_fn(kgrid.clone(), |k| ratio(k).powi(2), vec![BoundState::new(1.0, 2.0)])?),
        ("S = (k+i)/(k-i), resonance", ScatteringData::from_fn(kgrid.clone(), ratio, vec![])?),
    ];
    for (name, sd) in cases {
        let sol = solve_riemann(&sd, &RiemannOptions::default())?;
        let report = verify_factorization(&sol, &sd)?;
        println!("{name}");
        println!("  case {:?}, index {}", sol.case, sol.index);
        println!("  f(0) = {:.3e}", sol.f0[kgrid.zero_index()]);
        println!("  max |S(k) f(k) - f(-k)| = {:.2e}", report.relation_residual);
        println!("  |f(i kappa_j)| = {:?}", report.zero_residuals);
        let i = kgrid.index_of(1.0).expect("grid node");
        println!("  f(1) = {:.8}", sol.f0[i]);
        println!("  f(i/2) = {:.8}", sol.eval(Complex64::new(0.0, 0.5))?);
    }
    Ok(())
}
