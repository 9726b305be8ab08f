//! Writes sample inputs for the `halfline` binary into a directory
//! (default `./inputs`): potentials as `x,q` CSV and scattering data as JSON.
//!
//!     cargo run --release --example cli_inputs -- inputs
//!     cargo run --release --bin halfline -- roundtrip --potential inputs/sech2.csv --out out

use std::path::PathBuf;

use halfline::io;
use halfline::model::{BoundState, MomentumGrid, Potential, RadialGrid, ScatteringData};
use num_complex::Complex64;

fn main() -> halfline::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "inputs".into()));
    std::fs::create_dir_all(&dir)?;
    let grid = RadialGrid::with_spacing(40.0, 0.01)?;
    io::write_potential(&dir.join("zero.csv"), &Potential::zero(grid.clone()))?;
    io::write_potential(&dir.join("sech2.csv"), &Potential::sech2(grid.clone(), 1.0)?)?;
    io::write_potential(&dir.join("well.csv"), &Potential::square_well(grid, 4.0, 1.0)?)?;

    let kgrid = MomentumGrid::with_spacing(200.0, 0.05)?;
    let ratio = |k: f64| Complex64::new(k, 1.0) / Complex64::new(k, -1.0);
    io::write_scattering(&dir.join("trivial.json"), &ScatteringData::trivial(kgrid.clone()))?;
    io::write_scattering(&dir.join("soliton.json"), &ScatteringData::from_fn(kgrid.clone(), ratio, vec![])?)?;
    // One bound state at κ = 1 with s = 2, and the same data with s negated.
    let bound = ScatteringData::from_fn(kgrid, |k| ratio(k).powi(2), vec![BoundState::new(1.0, 2.0)])?;
    io::write_scattering(&dir.join("bound.json"), &bound)?;
    let tampered = bound.with_bound_states(vec![BoundState::new(1.0, -2.0)])?;
    io::write_scattering(&dir.join("tampered.json"), &tampered)?;
    println!("wrote inputs to {}", dir.display());
    Ok(())
}
