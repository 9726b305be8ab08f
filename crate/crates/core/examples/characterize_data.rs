//! Validator for scattering data: the report on forward data and on three
//! single-fault tamperings.

use halfline::characterize::{full_report, ConditionThresholds};
use halfline::forward::{forward, ForwardOptions};
use halfline::model::{BoundState, Potential, RadialGrid, ScatteringData, ValidationReport};
use num_complex::Complex64;

fn show(name: &str, r: &ValidationReport) {
    println!("{name}: {}", if r.passed { "pass" } else { "fail" });
    for e in &r.entries {
        println!("  [{}] {:<20} {}", if e.passed { "ok" } else { "!!" }, e.name, e.detail);
    }
}

fn main() -> halfline::Result<()> {
    let q = Potential::square_well(RadialGrid::with_spacing(40.0, 0.01)?, 4.0, 1.0)?;
    let sd = forward(
        &q,
        &ForwardOptions {
            compute_kernel: false,
            ..ForwardOptions::default()
        },
    )?
    .sd;
    let th = ConditionThresholds::default();
    show("square well", &full_report(&sd, &th));

    let b = sd.bound_states()[0];
    let negated = sd.with_bound_states(vec![BoundState::new(b.kappa, -b.s)])?;
    show("negated norming constant", &full_report(&negated, &th));

    let scaled = sd.with_s_values(sd.s_values().iter().map(|s| 1.01 * s).collect())?;
    show("S scaled by 1.01", &full_report(&scaled, &th));

    let extra = |k: f64| (Complex64::new(k, 0.5) / Complex64::new(k, -0.5)).powi(2);
    let blaschke: ScatteringData = sd.with_s_values(
        sd.kgrid().nodes().iter().zip(sd.s_values()).map(|(&k, s)| s * extra(k)).collect(),
    )?;
    show("extra Blaschke factor", &full_report(&blaschke, &th));
    Ok(())
}
