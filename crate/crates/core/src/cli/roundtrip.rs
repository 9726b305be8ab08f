//! Every arrow of the pipeline applied to one potential, each scored against
//! the quantity it should reproduce.

use num_complex::Complex64;
use serde::Serialize;

use super::{PotentialMetric, Tolerances};
use crate::error::{Error, Result, Stage};
use crate::forward::{forward, BoundStateSearch, ForwardOptions};
use crate::marchenko::{
    build_F, data_from_kernel, extract_data_from_f, f_from_kernel, invert, marchenko_kernel_extrapolated,
    ExtractionOptions, InversionConfig,
};
use crate::model::{BoundState, MomentumGrid, Potential, ScatteringData, TransformationKernel};
use crate::numkit::{integrate, FourierOptions};
use crate::riemann::{solve_riemann, RiemannOptions};

#[derive(Debug, Clone)]
pub struct RoundtripOptions {
    pub kgrid: MomentumGrid,
    /// Grid and scheme of the `𝒮 ⇒ q` stage.
    pub inversion: InversionConfig,
    pub metric: PotentialMetric,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageError {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl StageError {
    fn new(name: &str, error: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            error,
            tolerance,
            passed: error <= tolerance,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundtripReport {
    pub stages: Vec<StageError>,
    pub passed: bool,
    pub bound_states: Vec<BoundState>,
    pub index: Option<i64>,
    pub resonance: bool,
    pub potential_sup: f64,
    pub potential_rel_l1: f64,
}

impl RoundtripReport {
    pub fn stage(&self, name: &str) -> Option<&StageError> {
        self.stages.iter().find(|s| s.name == name)
    }
}

fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest gap between two bound-state lists, `∞` if the counts differ.
fn bound_gap(a: &[BoundState], b: &[BoundState]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.kappa - y.kappa).abs().max((x.s - y.s).abs() / x.s.abs().max(1.0)))
        .fold(0.0, f64::max)
}

fn describe(states: &[BoundState]) -> String {
    let parts: Vec<String> = states.iter().map(|b| format!("({:.6}, {:.6})", b.kappa, b.s)).collect();
    format!("[{}]", parts.join(", "))
}

/// `(sup, relative L¹)` of `rec - q` on the nodes of `rec` inside `q`'s grid.
fn potential_errors(q: &Potential, rec: &Potential) -> Result<(f64, f64)> {
    let qg = q.grid();
    let rg = rec.grid();
    let m = (0..rg.len()).take_while(|&i| rg.node(i) <= qg.x_max() + 1e-9 * rg.step()).count();
    if m < 2 {
        return Err(Error::InvalidGrid("reconstruction grid does not overlap the potential".into()));
    }
    let exact: Vec<f64> = (0..m).map(|i| interpolate(q, rg.node(i))).collect();
    let diff: Vec<f64> = (0..m).map(|i| (rec.values()[i] - exact[i]).abs()).collect();
    let sup = diff.iter().fold(0.0_f64, |a, &b| a.max(b));
    let sub = rg.truncate(m - 1)?;
    let num = integrate(&diff, &sub)?;
    let den = integrate(&exact.iter().map(|v| v.abs()).collect::<Vec<_>>(), &sub)?;
    Ok((sup, if den > 0.0 { num / den } else { num }))
}

/// Piecewise-linear `q(x)`; exact at nodes.
fn interpolate(q: &Potential, x: f64) -> f64 {
    let g = q.grid();
    let t = x / g.step();
    let i = (t.floor() as usize).min(g.len() - 2);
    let w = t - i as f64;
    if w.abs() < 1e-9 {
        return q.values()[i];
    }
    (1.0 - w) * q.values()[i] + w * q.values()[i + 1]
}

/// `A ⇒ F ⇒ A` on the leading half of the kernel grid.
fn kernel_round_trip(a: &TransformationKernel) -> Result<f64> {
    let f = f_from_kernel(a)?;
    let half = a.grid().truncate((a.grid().len() - 1) / 2)?;
    let back = marchenko_kernel_extrapolated(&f, &half)?;
    let n = half.len();
    Ok((0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .map(|(i, j)| (back.get(i, j) - a.get(i, j)).abs())
        .fold(0.0, f64::max))
}

/// Runs forward, inverse, `A ⇒ F ⇒ A`, `𝒮 ⇒ F ⇒ 𝒮`, `A ⇒ 𝒮` and the Riemann
/// factorization on `q`. Errors carry the stage they came from.
pub fn roundtrip(q: &Potential, options: &RoundtripOptions) -> Result<RoundtripReport> {
    let tol = options.tolerances;
    let fwd = forward(
        q,
        &ForwardOptions {
            kgrid: options.kgrid.clone(),
            search: None,
            compute_kernel: true,
            row_k_max: 0.0,
            row_k_step: 0.0,
        },
    )
    .map_err(Error::at(Stage::Forward))?;
    let sd = &fwd.sd;
    let a = fwd.kernel.as_ref().expect("kernel requested");
    let mut stages = Vec::new();

    let inv = invert(sd, &options.inversion)?;
    let (sup, rel) = potential_errors(q, &inv.potential).map_err(Error::at(Stage::Potential))?;
    let (err, label) = match options.metric {
        PotentialMetric::Sup => (sup, "sup"),
        PotentialMetric::RelL1 => (rel, "relative L1"),
    };
    stages.push(StageError::new(
        "potential",
        err,
        tol.potential,
        format!("{label}; sup {sup:.3e}, relative L1 {rel:.3e}"),
    ));

    let e = kernel_round_trip(a).map_err(Error::at(Stage::Marchenko))?;
    stages.push(StageError::new("kernel_F_kernel", e, tol.kernel, "sup |A - A'| on the leading half".into()));

    let x = q.grid().x_max();
    let f = build_F(sd, -x, x, q.grid().step(), FourierOptions::default()).map_err(Error::at(Stage::BuildF))?;
    let ex = extract_data_from_f(&f, sd.kgrid(), &ExtractionOptions::default()).map_err(Error::at(Stage::Extraction))?;
    stages.push(scattering_stage("scattering_F_scattering", sd, &ex.sd, tol.scattering));

    let search = BoundStateSearch::for_potential(q);
    let kd = data_from_kernel(a, sd.kgrid(), &search).map_err(Error::at(Stage::Marchenko))?;
    stages.push(scattering_stage("kernel_scattering", sd, &kd.sd, tol.scattering));

    let sol = solve_riemann(sd, &RiemannOptions::default()).map_err(Error::at(Stage::Riemann))?;
    stages.push(StageError::new(
        "riemann_jost",
        sup_diff(&sol.f0, &fwd.jost.f0),
        tol.riemann,
        format!("sup |f_riemann - f_forward|, {:?} case", sol.case),
    ));

    let passed = stages.iter().all(|s| s.passed);
    Ok(RoundtripReport {
        stages,
        passed,
        bound_states: sd.bound_states().to_vec(),
        index: inv.report.as_ref().and_then(|r| r.index),
        resonance: fwd.bound_states.resonance,
        potential_sup: sup,
        potential_rel_l1: rel,
    })
}

/// `sup |ΔS|`, failed outright when the bound states do not match.
fn scattering_stage(name: &str, want: &ScatteringData, got: &ScatteringData, tol: f64) -> StageError {
    let ds = sup_diff(want.s_values(), got.s_values());
    let gap = bound_gap(want.bound_states(), got.bound_states());
    let mut stage = StageError::new(
        name,
        ds,
        tol,
        format!(
            "sup |dS|; bound states {} vs {}, gap {gap:.3e}",
            describe(want.bound_states()),
            describe(got.bound_states())
        ),
    );
    stage.passed &= gap <= tol;
    stage
}
