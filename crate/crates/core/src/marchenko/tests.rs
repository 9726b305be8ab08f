use approx::assert_abs_diff_eq;
use num_complex::Complex64;

use super::*;
use crate::model::{BoundState, UniformGrid};

fn soliton_f(x_max: f64, dx: f64) -> MarchenkoInput {
    let g = UniformGrid::with_spacing(0.0, 2.0 * x_max, dx).unwrap();
    MarchenkoInput::from_fn(g, |p| 2.0 * (-p).exp()).unwrap()
}

/// Rank-one closed form for `F(p) = 2e^{-p}`.
fn soliton_a(x: f64, y: f64) -> f64 {
    -2.0 * (-(x + y)).exp() / (1.0 + (-2.0 * x).exp())
}

fn config(x_max: f64, dx: f64) -> InversionConfig {
    InversionConfig {
        x_max,
        dx,
        ..InversionConfig::default()
    }
}

#[test]
fn zero_f_gives_zero_kernel() {
    let g = UniformGrid::with_spacing(0.0, 10.0, 0.05).unwrap();
    let f = MarchenkoInput::from_fn(g, |_| 0.0).unwrap();
    let a = marchenko_kernel(&f, &RadialGrid::with_spacing(5.0, 0.05).unwrap()).unwrap();
    assert_eq!(a.max_abs_difference(&TransformationKernel::zero(a.grid().clone())).unwrap(), 0.0);
    let row = solve_marchenko(&f, 1.0, 5.0, 0.05).unwrap();
    assert!(row.iter().all(|v| *v == 0.0));
}

#[test]
fn soliton_kernel_matches_closed_form() {
    let f = soliton_f(20.0, 0.01);
    let grid = RadialGrid::with_spacing(20.0, 0.01).unwrap();
    let a = marchenko_kernel(&f, &grid).unwrap();
    let exact = TransformationKernel::from_fn(grid.clone(), soliton_a);
    let err = a.max_abs_difference(&exact).unwrap();
    assert!(err < 1e-4, "sup error {err:e}");
}

#[test]
fn soliton_diagonal_origin_with_extrapolation() {
    let f = soliton_f(20.0, 0.01);
    let grid = RadialGrid::with_spacing(20.0, 0.01).unwrap();
    let a = marchenko_kernel_extrapolated(&f, &grid).unwrap();
    assert_abs_diff_eq!(a.get(0, 0), -1.0, epsilon = 1e-6);
    let exact = TransformationKernel::from_fn(grid, soliton_a);
    let err = a.max_abs_difference(&exact).unwrap();
    assert!(err < 1e-7, "sup error {err:e}");
}

#[test]
fn halving_step_reduces_kernel_error_fourfold() {
    let errs: Vec<f64> = [0.04, 0.02]
        .iter()
        .map(|&dx| {
            let f = soliton_f(10.0, dx);
            let grid = RadialGrid::with_spacing(10.0, dx).unwrap();
            let a = marchenko_kernel(&f, &grid).unwrap();
            a.max_abs_difference(&TransformationKernel::from_fn(grid, soliton_a)).unwrap()
        })
        .collect();
    let ratio = errs[0] / errs[1];
    assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
}

#[test]
fn sweep_agrees_with_direct_rows() {
    let f = soliton_f(8.0, 0.02);
    let grid = RadialGrid::with_spacing(8.0, 0.02).unwrap();
    let a = marchenko_kernel(&f, &grid).unwrap();
    for &i in &[0usize, 100, 250, 399] {
        let x = grid.node(i);
        let row = solve_marchenko(&f, x, 8.0, 0.02).unwrap();
        let diff = row.iter().zip(a.row(i)).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-10, "row {i}: {diff:e}");
    }
}

#[test]
fn soliton_potential_recovered() {
    let f = soliton_f(20.0, 0.01);
    let (_, q) = invert_f(&f, &config(20.0, 0.01)).unwrap();
    let sup = q
        .grid()
        .nodes()
        .iter()
        .zip(q.values())
        .filter(|(x, _)| **x <= 8.0)
        .map(|(x, v)| (v + 2.0 / x.cosh().powi(2)).abs())
        .fold(0.0, f64::max);
    assert!(sup < 1e-3, "sup {sup:e}");
    assert_abs_diff_eq!(q.values()[0], -2.0, epsilon = 1e-3);
}

#[test]
fn recovered_potential_is_self_consistent() {
    let f = soliton_f(20.0, 0.01);
    let (a, q) = invert_f(&f, &config(20.0, 0.01)).unwrap();
    let tails = crate::numkit::tail_integrals(q.values(), q.grid().step());
    let diag = a.diagonal();
    let err = diag.iter().zip(&tails).map(|(d, t)| (d - 0.5 * t).abs()).fold(0.0, f64::max);
    assert!(err < 1e-3, "{err:e}");
}

#[test]
fn zero_kernel_gives_zero_potential() {
    let grid = RadialGrid::with_spacing(5.0, 0.1).unwrap();
    let q = recover_potential(&TransformationKernel::zero(grid), DerivScheme::FivePoint).unwrap();
    assert!(q.values().iter().all(|v| *v == 0.0));
}

fn kgrid() -> MomentumGrid {
    MomentumGrid::with_spacing(200.0, 0.01).unwrap()
}

#[test]
fn build_f_trivial_and_discrete() {
    let sd = ScatteringData::trivial(kgrid());
    let f = build_F(&sd, -5.0, 5.0, 0.1, FourierOptions::default()).unwrap();
    assert!(f.f_values.iter().all(|v| v.abs() < 1e-14));
    let sd = sd.with_bound_states(vec![BoundState::new(1.0, 2.0)]).unwrap();
    let f = build_F(&sd, -5.0, 5.0, 0.1, FourierOptions::default()).unwrap();
    for (x, v) in f.xgrid.nodes().iter().zip(&f.f_values) {
        assert_abs_diff_eq!(*v, 2.0 * (-x).exp(), epsilon = 1e-12);
    }
}

#[test]
fn build_f_single_pole_residue_oracle() {
    // 1 - S = -2i/(k - i): residue at k = i gives 2e^{-x} for x > 0.
    let sd = ScatteringData::from_fn(kgrid(), |k| Complex64::new(k, 1.0) / Complex64::new(k, -1.0), vec![]).unwrap();
    let f = build_F(&sd, -10.0, 10.0, 0.05, FourierOptions::default()).unwrap();
    for (x, v) in f.xgrid.nodes().iter().zip(&f.fs_values) {
        if x.abs() < 1e-12 {
            continue;
        }
        let exact = if *x > 0.0 { 2.0 * (-x).exp() } else { 0.0 };
        assert!((v - exact).abs() < 1e-3, "x = {x}: {v} vs {exact}");
    }
}

#[test]
fn build_f_rejects_asymmetric_spectrum() {
    let sd = ScatteringData::from_fn(kgrid(), |k| Complex64::new(0.0, k).exp() * 0.0 + Complex64::new(1.0, 0.5 / (1.0 + k * k)), vec![]).unwrap();
    assert!(matches!(build_F(&sd, -2.0, 2.0, 0.1, FourierOptions::default()), Err(Error::ComplexResidual(_))));
}

#[test]
fn extraction_recovers_two_exponentials() {
    let g = UniformGrid::with_spacing(-12.0, 40.0, 0.01).unwrap();
    let f = MarchenkoInput::from_fn(g, |x| 2.0 * (-x).exp() + 3.0 * (-2.0 * x).exp()).unwrap();
    let kg = MomentumGrid::with_spacing(200.0, 0.05).unwrap();
    let ex = extract_data_from_f(&f, &kg, &ExtractionOptions::default()).unwrap();
    let b = ex.sd.bound_states();
    assert_eq!(b.len(), 2);
    assert_abs_diff_eq!(b[0].kappa, 1.0, epsilon = 1e-4);
    assert_abs_diff_eq!(b[0].s, 2.0, epsilon = 1e-4);
    assert_abs_diff_eq!(b[1].kappa, 2.0, epsilon = 1e-4);
    assert_abs_diff_eq!(b[1].s, 3.0, epsilon = 1e-4);
}

#[test]
fn extraction_of_zero_is_trivial() {
    let g = UniformGrid::with_spacing(-12.0, 40.0, 0.01).unwrap();
    let f = MarchenkoInput::from_fn(g, |_| 0.0).unwrap();
    let kg = MomentumGrid::with_spacing(50.0, 0.05).unwrap();
    let ex = extract_data_from_f(&f, &kg, &ExtractionOptions::default()).unwrap();
    assert!(ex.sd.bound_states().is_empty());
    assert!(ex.sd.s_values().iter().all(|s| (s - 1.0).norm() < 1e-14));
}

#[test]
fn extraction_of_half_line_exponential() {
    let g = UniformGrid::with_spacing(-12.0, 40.0, 0.01).unwrap();
    let f = MarchenkoInput::from_fn(g, |x| if x > 0.0 { 2.0 * (-x).exp() } else { 0.0 }).unwrap();
    let kg = MomentumGrid::with_spacing(200.0, 0.05).unwrap();
    let ex = extract_data_from_f(&f, &kg, &ExtractionOptions::default()).unwrap();
    assert!(ex.sd.bound_states().is_empty());
    assert_abs_diff_eq!(ex.jump, 2.0, epsilon = 1e-5);
    let err = kg
        .nodes()
        .iter()
        .zip(ex.sd.s_values())
        .map(|(&k, s)| (s - Complex64::new(k, 1.0) / Complex64::new(k, -1.0)).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-3, "{err:e}");
    assert_eq!(ex.sd.s_at_zero_sign(), -1);
}

#[test]
fn kernel_to_f_closed_form() {
    let grid = RadialGrid::with_spacing(20.0, 0.01).unwrap();
    let a = TransformationKernel::from_fn(grid, |_, y| -2.0 * (-y).exp() / 2.0);
    let f = f_from_kernel(&a).unwrap();
    for (p, v) in f.xgrid.nodes().iter().zip(&f.f_values) {
        assert!((v - 2.0 * (-p).exp()).abs() < 1e-6, "p = {p}: {v}");
    }
    let zero = f_from_kernel(&TransformationKernel::zero(RadialGrid::with_spacing(4.0, 0.1).unwrap())).unwrap();
    assert!(zero.f_values.iter().all(|v| *v == 0.0));
}

#[test]
fn f_to_kernel_to_f_round_trip() {
    let f = soliton_f(20.0, 0.01);
    let a = marchenko_kernel_extrapolated(&f, &RadialGrid::with_spacing(20.0, 0.01).unwrap()).unwrap();
    let back = f_from_kernel(&a).unwrap();
    let err = back.f_values.iter().zip(&f.f_values).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    assert!(err < 1e-5, "{err:e}");
}

#[test]
fn data_from_zero_kernel() {
    let a = TransformationKernel::zero(RadialGrid::with_spacing(10.0, 0.01).unwrap());
    let kg = MomentumGrid::with_spacing(20.0, 0.05).unwrap();
    let search = crate::forward::BoundStateSearch {
        kappa_min: 1e-3,
        kappa_max: 2.0,
        step: 0.01,
        resonance_tol: 1e-3,
    };
    let d = data_from_kernel(&a, &kg, &search).unwrap();
    assert!(d.sd.bound_states().is_empty());
    assert!(d.sd.s_values().iter().all(|s| (s - 1.0).norm() < 1e-14));
}

#[test]
fn data_from_separable_kernel() {
    let grid = RadialGrid::with_spacing(40.0, 0.01).unwrap();
    let a = TransformationKernel::from_fn(grid, soliton_a);
    let kg = MomentumGrid::with_spacing(20.0, 0.05).unwrap();
    let search = crate::forward::BoundStateSearch {
        kappa_min: 1e-3,
        kappa_max: 2.0,
        step: 0.01,
        resonance_tol: 1e-3,
    };
    let d = data_from_kernel(&a, &kg, &search).unwrap();
    let err = kg
        .nodes()
        .iter()
        .zip(&d.f0)
        .map(|(&k, f)| (f - Complex64::new(k, 0.0) / Complex64::new(k, 1.0)).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-4, "{err:e}");
    assert!(d.sd.bound_states().is_empty());
    assert!(d.sd.is_resonant());
}

#[test]
fn invert_trivial_data() {
    let sd = ScatteringData::trivial(MomentumGrid::with_spacing(200.0, 0.05).unwrap());
    let inv = invert(&sd, &config(10.0, 0.02)).unwrap();
    assert!(inv.potential.max_abs() < 1e-8);
    assert!(inv.report.unwrap().passed);
}

#[test]
fn invert_refuses_invalid_data_unless_forced() {
    let sd = ScatteringData::trivial(MomentumGrid::with_spacing(50.0, 0.05).unwrap())
        .with_bound_states(vec![BoundState::new(1.0, -2.0)])
        .unwrap();
    let err = invert(&sd, &config(5.0, 0.05)).unwrap_err();
    assert_eq!(err.stage(), Some(Stage::Validation));
    let forced = InversionConfig {
        force: true,
        ..config(5.0, 0.05)
    };
    assert!(invert(&sd, &forced).unwrap().report.is_none());
}

#[test]
fn extraction_survives_large_bound_state_term() {
    // F_d reaches 1e17 at x = -40; the transform must not see its rounding noise.
    let kg = kgrid();
    let ratio = |k: f64| Complex64::new(k, 1.0) / Complex64::new(k, -1.0);
    let sd = ScatteringData::from_fn(kg.clone(), |k| ratio(k).powi(2), vec![BoundState::new(1.0, 2.0)]).unwrap();
    let f = build_F(&sd, -40.0, 40.0, 0.01, FourierOptions::default()).unwrap();
    let ex = extract_data_from_f(&f, &kg, &ExtractionOptions::default()).unwrap();
    let ds = sd.s_values().iter().zip(ex.sd.s_values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    assert!(ds < 1e-3, "{ds}");
    assert_abs_diff_eq!(ex.sd.bound_states()[0].kappa, 1.0, epsilon = 1e-6);
}
