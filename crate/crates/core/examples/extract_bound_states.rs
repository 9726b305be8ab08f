//! Scattering data from samples of `F`: exponentials dominating `x < 0` are
//! stripped off as bound states, the rest is transformed back to `S`.

use halfline::marchenko::{build_F, extract_data_from_f, ExtractionOptions};
use halfline::model::{BoundState, MarchenkoInput, MomentumGrid, ScatteringData, UniformGrid};
use halfline::numkit::FourierOptions;
use num_complex::Complex64;

fn main() -> halfline::Result<()> {
    let kgrid = MomentumGrid::with_spacing(200.0, 0.05)?;
    let window = UniformGrid::with_spacing(-12.0, 40.0, 0.01)?;
    let f = MarchenkoInput::from_fn(window, |x| 2.0 * (-x).exp() + 3.0 * (-2.0 * x).exp())?;
    let ex = extract_data_from_f(&f, &kgrid, &ExtractionOptions::default())?;
    println!("F = 2e^-x + 3e^-2x:");
    for b in ex.sd.bound_states() {
        println!("  kappa = {:.8}, s = {:.8}", b.kappa, b.s);
    }

    // S -> F -> S for data with one bound state.
    let sd = ScatteringData::from_fn(
        kgrid.clone(),
        |k| (Complex64::new(k, 1.0) / Complex64::new(k, -1.0)).powi(2),
        vec![BoundState::new(1.0, 2.0)],
    )?;
    let f = build_F(&sd, -40.0, 40.0, 0.01, FourierOptions::default())?;
    let ex = extract_data_from_f(&f, &kgrid, &ExtractionOptions::default())?;
    let ds = ex
        .sd
        .s_values()
        .iter()
        .zip(sd.s_values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!("S -> F -> S: max |dS| = {ds:.2e}, jump of F_s at 0 = {:.6}", ex.jump);
    for b in ex.sd.bound_states() {
        println!("  kappa = {:.8}, s = {:.8}", b.kappa, b.s);
    }
    Ok(())
}
