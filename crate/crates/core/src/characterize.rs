//! Checks that scattering data can come from a real potential with a finite
//! first moment.
//!
//! Four entries make up a report: symmetry/unitarity of `S` with `S(∞) = 1`,
//! positivity and ordering of the discrete spectrum, integrability of `F`, and
//! the index of `S` against the bound-state count and the sign of `S(0)`.
//!
//! Integrability cannot be decided from samples. It is approximated by
//! computing the integrals on a window and on its middle half and requiring
//! the relative growth to stay below `integrability_window`. A slowly
//! decaying `F` passes if the window is too short to see the growth.

use serde::{Deserialize, Serialize};

use crate::model::{ConditionEntry, MarchenkoInput, ScatteringData, UniformGrid, ValidationReport};
use crate::numkit::{differentiate, integrate, winding_number, FourierOptions};

pub const SYMMETRY_UNITARITY: &str = "symmetry_unitarity";
pub const DISCRETE_SPECTRUM: &str = "discrete_spectrum";
pub const INTEGRABILITY: &str = "integrability";
pub const INDEX: &str = "index";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionThresholds {
    pub unitarity_tol: f64,
    pub symmetry_tol: f64,
    /// Allowed `|S(±k_max) - 1|`.
    pub tail_tol: f64,
    /// Allowed relative growth of the integrals from the half window to the
    /// full window.
    pub integrability_window: f64,
    /// Allowed distance of the raw winding from the nearest integer.
    pub index_confidence: f64,
    /// `F` is built on `[-x, x]` with spacing `dx` for the integrability check.
    pub integrability_x: f64,
    pub integrability_dx: f64,
}

impl Default for ConditionThresholds {
    fn default() -> Self {
        Self {
            unitarity_tol: 1e-6,
            symmetry_tol: 1e-6,
            tail_tol: crate::model::TAIL_TOLERANCE,
            integrability_window: 0.05,
            index_confidence: 0.1,
            integrability_x: 40.0,
            integrability_dx: 0.02,
        }
    }
}

fn entry(name: &str, passed: bool, measured: f64, tolerance: f64, detail: String) -> ConditionEntry {
    ConditionEntry {
        name: name.to_string(),
        passed,
        measured,
        tolerance,
        detail,
    }
}

pub fn check_symmetry_unitarity(sd: &ScatteringData, th: &ConditionThresholds) -> ConditionEntry {
    let (unitarity, symmetry, tail) = sd.deviations();
    let passed = unitarity <= th.unitarity_tol && symmetry <= th.symmetry_tol && tail <= th.tail_tol;
    // Worst deviation relative to its own threshold.
    let measured = (unitarity / th.unitarity_tol)
        .max(symmetry / th.symmetry_tol)
        .max(tail / th.tail_tol);
    entry(
        SYMMETRY_UNITARITY,
        passed,
        measured,
        1.0,
        format!("max||S|-1| = {unitarity:.3e}, max|S(-k)-conj S(k)| = {symmetry:.3e}, |S(±k_max)-1| = {tail:.3e}"),
    )
}

pub fn check_discrete(sd: &ScatteringData) -> ConditionEntry {
    let states = sd.bound_states();
    let mut problems = Vec::new();
    for (j, b) in states.iter().enumerate() {
        if !(b.kappa > 0.0) {
            problems.push(format!("kappa[{j}] = {}", b.kappa));
        }
        if !(b.s > 0.0) {
            problems.push(format!("s[{j}] = {}", b.s));
        }
    }
    for (j, w) in states.windows(2).enumerate() {
        if !(w[1].kappa > w[0].kappa) {
            problems.push(format!("kappa[{}] not above kappa[{j}]", j + 1));
        }
    }
    let detail = if problems.is_empty() {
        format!("{} bound state(s)", states.len())
    } else {
        problems.join("; ")
    };
    entry(DISCRETE_SPECTRUM, problems.is_empty(), problems.len() as f64, 0.0, detail)
}

fn sub_grid(g: &UniformGrid, lo: usize, hi: usize) -> Option<UniformGrid> {
    (hi > lo).then(|| UniformGrid::new(g.node(lo), g.node(hi), hi - lo + 1).ok()).flatten()
}

/// `(I₁, I₂)` with `I₁ = ∫|F_s|` over `[-x, x]` and `I₂ = ∫ t|F'(t)| dt`
/// over `(0, x]`. `F` may jump at the origin, so `F'` is taken from the
/// samples at `t > 0` only.
fn integrals(f: &MarchenkoInput, x: f64) -> (f64, f64) {
    let g = &f.xgrid;
    let tol = 1e-9 * g.step();
    let inside = |lo: f64, hi: f64| -> Option<(usize, usize)> {
        let first = (0..g.len()).find(|&i| g.node(i) >= lo - tol)?;
        let last = (0..g.len()).rev().find(|&i| g.node(i) <= hi + tol)?;
        (last > first).then_some((first, last))
    };
    let i1 = inside(-x, x)
        .and_then(|(a, b)| {
            let abs: Vec<f64> = f.fs_values[a..=b].iter().map(|v| v.abs()).collect();
            integrate(&abs, &sub_grid(g, a, b)?).ok()
        })
        .unwrap_or(0.0);
    let i2 = inside(tol.max(0.5 * g.step()), x)
        .and_then(|(a, b)| {
            let sub = sub_grid(g, a, b)?;
            let d = differentiate(&f.f_values[a..=b], &sub).ok()?;
            let w: Vec<f64> = d.iter().enumerate().map(|(m, v)| sub.node(m) * v.abs()).collect();
            integrate(&w, &sub).ok()
        })
        .unwrap_or(0.0);
    (i1, i2)
}

pub fn check_integrability(f: &MarchenkoInput, th: &ConditionThresholds) -> ConditionEntry {
    let g = &f.xgrid;
    let x = g.end().min(-g.start()).max(0.0);
    let (a1, a2) = integrals(f, 0.5 * x);
    let (b1, b2) = integrals(f, x);
    let growth = |half: f64, full: f64| -> f64 {
        if full <= 1e-12 {
            0.0
        } else {
            (full - half) / full
        }
    };
    let (g1, g2) = (growth(a1, b1), growth(a2, b2));
    let finite = b1.is_finite() && b2.is_finite();
    let measured = g1.max(g2);
    entry(
        INTEGRABILITY,
        finite && measured < th.integrability_window,
        measured,
        th.integrability_window,
        format!("int|F_s| = {b1:.6e} (half window {a1:.6e}), int x|F'| = {b2:.6e} (half window {a2:.6e})"),
    )
}

pub fn check_index(sd: &ScatteringData, th: &ConditionThresholds) -> (ConditionEntry, Option<i64>) {
    let w = match winding_number(sd.s_values()) {
        Ok(w) => w,
        Err(e) => {
            return (entry(INDEX, false, 0.0, th.index_confidence, format!("inconclusive: {e}")), None);
        }
    };
    let j = sd.bound_state_count() as i64;
    let expected = if sd.is_resonant() { -2 * j - 1 } else { -2 * j };
    let confident = w.is_confident(th.index_confidence);
    let passed = confident && w.index <= 0 && w.index == expected;
    let detail = format!(
        "index {} (raw {:.6}), expected {expected} for J = {j}, S(0) sign {}",
        w.index,
        w.raw,
        sd.s_at_zero_sign()
    );
    (entry(INDEX, passed, w.distance, th.index_confidence, detail), Some(w.index))
}

/// All four checks; `F` is synthesised internally for the integrability entry.
pub fn full_report(sd: &ScatteringData, th: &ConditionThresholds) -> ValidationReport {
    let mut entries = vec![check_symmetry_unitarity(sd, th), check_discrete(sd)];
    let x = th.integrability_x;
    let integ = match crate::marchenko::build_F(sd, -x, x, th.integrability_dx, FourierOptions::default()) {
        Ok(f) => check_integrability(&f, th),
        Err(e) => entry(INTEGRABILITY, false, 0.0, th.integrability_window, format!("F not computable: {e}")),
    };
    entries.push(integ);
    let (idx, index) = check_index(sd, th);
    entries.push(idx);
    ValidationReport::new(entries, index, sd.bound_state_count(), sd.s_at_zero_sign())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoundState, MomentumGrid};
    use num_complex::Complex64;

    fn kgrid() -> MomentumGrid {
        MomentumGrid::with_spacing(200.0, 0.05).unwrap()
    }

    fn blaschke_s(k: f64) -> Complex64 {
        Complex64::new(k, 1.0) / Complex64::new(k, -1.0)
    }

    fn th() -> ConditionThresholds {
        ConditionThresholds::default()
    }

    #[test]
    fn symmetry_unitarity_cases() {
        assert!(check_symmetry_unitarity(&ScatteringData::trivial(kgrid()), &th()).passed);
        let drift = ScatteringData::from_fn(kgrid(), |k| Complex64::new(0.0, k).exp(), vec![]).unwrap();
        let e = check_symmetry_unitarity(&drift, &th());
        assert!(!e.passed && e.detail.contains("k_max"));
        let pole = ScatteringData::from_fn(kgrid(), blaschke_s, vec![]).unwrap();
        assert!(check_symmetry_unitarity(&pole, &th()).passed);
    }

    #[test]
    fn discrete_cases() {
        let sd = ScatteringData::trivial(kgrid());
        assert!(check_discrete(&sd).passed);
        assert!(!check_discrete(&sd.with_bound_states(vec![BoundState::new(1.0, -2.0)]).unwrap()).passed);
        let two = vec![BoundState::new(1.0, 2.0), BoundState::new(2.0, 3.0)];
        assert!(check_discrete(&sd.with_bound_states(two).unwrap()).passed);
    }

    fn window() -> UniformGrid {
        UniformGrid::with_spacing(-40.0, 40.0, 0.01).unwrap()
    }

    #[test]
    fn integrability_of_zero() {
        let f = MarchenkoInput::from_fn(window(), |_| 0.0).unwrap();
        assert_eq!(integrals(&f, 40.0), (0.0, 0.0));
        assert!(check_integrability(&f, &th()).passed);
    }

    #[test]
    fn integrability_of_half_line_exponential() {
        // Sampled with the mean value at the jump.
        let f = MarchenkoInput::from_fn(window(), |x| {
            if x > 0.0 {
                2.0 * (-x).exp()
            } else if x == 0.0 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let (i1, i2) = integrals(&f, 40.0);
        assert!((i1 - 2.0).abs() < 1e-3, "{i1}");
        assert!((i2 - 2.0).abs() < 1e-3, "{i2}");
        assert!(check_integrability(&f, &th()).passed);
    }

    #[test]
    fn slow_decay_fails_integrability() {
        let f = MarchenkoInput::from_fn(window(), |x| 1.0 / (1.0 + x.abs())).unwrap();
        let e = check_integrability(&f, &th());
        assert!(!e.passed, "{e:?}");
    }

    #[test]
    fn index_cases() {
        let (e, idx) = check_index(&ScatteringData::trivial(kgrid()), &th());
        assert!(e.passed);
        assert_eq!(idx, Some(0));
        let sq = ScatteringData::from_fn(kgrid(), |k| blaschke_s(k).powi(2), vec![BoundState::new(1.0, 2.0)]).unwrap();
        let (e, idx) = check_index(&sq, &th());
        assert!(e.passed);
        assert_eq!(idx, Some(-2));
        let res = ScatteringData::from_fn(kgrid(), blaschke_s, vec![]).unwrap();
        assert_eq!(res.s_at_zero_sign(), -1);
        let (e, idx) = check_index(&res, &th());
        assert!(e.passed);
        assert_eq!(idx, Some(-1));
        // Same S without the bound state it requires.
        let (e, _) = check_index(&sq.with_bound_states(vec![]).unwrap(), &th());
        assert!(!e.passed);
    }

    #[test]
    fn index_refusal_is_inconclusive() {
        let coarse = MomentumGrid::with_spacing(200.0, 10.0).unwrap();
        let sd = ScatteringData::from_fn(coarse, |k| Complex64::new(0.0, 0.3 * std::f64::consts::PI * k).exp(), vec![]).unwrap();
        let (e, idx) = check_index(&sd, &th());
        assert!(!e.passed && e.detail.starts_with("inconclusive"));
        assert_eq!(idx, None);
    }

    #[test]
    fn full_report_on_simple_data() {
        let rep = full_report(&ScatteringData::trivial(kgrid()), &th());
        assert!(rep.passed);
        assert_eq!(rep.entries.len(), 4);
        let bad = ScatteringData::from_fn(kgrid(), |k| blaschke_s(k).powi(2), vec![BoundState::new(1.0, -2.0)]).unwrap();
        let rep = full_report(&bad, &th());
        assert_eq!(rep.failed(), vec![DISCRETE_SPECTRUM]);
    }
}
