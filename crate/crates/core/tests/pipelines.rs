//! Cross-module invariants on randomly drawn inputs.

use halfline::forward::{
    diagonal_identity_error, forward, jost_boundary_at, kernel_from_potential, ForwardOptions, ForwardResult,
};
use halfline::io;
use halfline::marchenko::{extract_data_from_f, marchenko_kernel_extrapolated, ExtractionOptions};
use halfline::model::{BoundState, MarchenkoInput, MomentumGrid, Potential, RadialGrid, ScatteringData, UniformGrid};
use halfline::numkit::winding_number;
use halfline::riemann::{solve_riemann, RiemannOptions};
use num_complex::Complex64;
use proptest::prelude::*;

fn bump(depth: f64, centre: f64) -> Potential {
    let grid = RadialGrid::with_spacing(12.0, 0.02).unwrap();
    Potential::from_fn(grid, |x| -depth * (-(x - centre).powi(2)).exp()).unwrap()
}

/// `|f(0)|`; near zero the phase of `S` turns by `π` within `|k| ~ |f(0)|`,
/// which the test momentum grid cannot resolve.
fn f_at_zero(q: &Potential) -> f64 {
    jost_boundary_at(q, Complex64::new(0.0, 0.0)).unwrap().f0.norm()
}

fn run(q: &Potential) -> ForwardResult {
    let options = ForwardOptions {
        kgrid: MomentumGrid::with_spacing(60.0, 0.05).unwrap(),
        row_k_step: 0.0,
        ..ForwardOptions::default()
    };
    forward(q, &options).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn forward_data_satisfy_the_necessary_conditions(depth in 0.2f64..4.0, centre in 0.0f64..3.0) {
        let q = bump(depth, centre);
        prop_assume!(f_at_zero(&q) > 0.2);
        let res = run(&q);
        let sd = &res.sd;
        let (unitarity, symmetry, _) = sd.deviations();
        prop_assert!(unitarity < 1e-10, "unitarity {unitarity}");
        prop_assert!(symmetry < 1e-12, "symmetry {symmetry}");
        prop_assert!(sd.bound_states().iter().all(|b| b.kappa > 0.0 && b.s > 0.0));
        let w = winding_number(sd.s_values()).unwrap();
        let j = sd.bound_state_count() as i64;
        prop_assert_eq!(w.index, -2 * j);
    }

    #[test]
    fn kernel_diagonal_is_half_the_tail_integral(depth in 0.2f64..4.0, centre in 0.0f64..3.0) {
        let q = bump(depth, centre);
        let a = kernel_from_potential(&q).unwrap();
        prop_assert!(diagonal_identity_error(&a, &q) < 1e-5);
    }

    #[test]
    fn riemann_reproduces_the_forward_jost_function(depth in 0.2f64..4.0, centre in 0.0f64..3.0) {
        let q = bump(depth, centre);
        prop_assume!(f_at_zero(&q) > 0.2);
        let res = run(&q);
        let sol = solve_riemann(&res.sd, &RiemannOptions::default()).unwrap();
        let err = sol.f0.iter().zip(&res.jost.f0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn riemann_recovers_blaschke_factor(kappa in 0.3f64..3.0, s in 0.1f64..5.0) {
        let kg = MomentumGrid::with_spacing(100.0, 0.05).unwrap();
        let b = |k: f64| Complex64::new(k, kappa) / Complex64::new(k, -kappa);
        let sd = ScatteringData::from_fn(kg.clone(), |k| b(k).powi(2), vec![BoundState::new(kappa, s)]).unwrap();
        let sol = solve_riemann(&sd, &RiemannOptions::default()).unwrap();
        for (k, f) in kg.nodes().iter().zip(&sol.f0) {
            prop_assert!((f - 1.0 / b(*k)).norm() < 1e-6, "k = {}", k);
        }
    }

    /// Separable closed form for `F = s e^{-κp}`, up to `e^{-2κ x_max}`:
    /// `A(x, y) = -s e^{-κ(x+y)} / (1 + s e^{-2κx} / (2κ))`.
    #[test]
    fn marchenko_matches_separable_closed_form(kappa in 1.0f64..3.0, s in 0.2f64..4.0) {
        let grid = RadialGrid::with_spacing(8.0, 0.01).unwrap();
        let f = MarchenkoInput::from_fn(UniformGrid::with_spacing(0.0, 16.0, 0.01).unwrap(), |p| s * (-kappa * p).exp()).unwrap();
        let a = marchenko_kernel_extrapolated(&f, &grid).unwrap();
        let exact = |x: f64, y: f64| -s * (-kappa * (x + y)).exp() / (1.0 + s * (-2.0 * kappa * x).exp() / (2.0 * kappa));
        for i in (0..grid.len()).step_by(13) {
            for j in (i..grid.len()).step_by(13) {
                let e = (a.get(i, j) - exact(grid.node(i), grid.node(j))).abs();
                prop_assert!(e < 1e-6, "({}, {}): {}", grid.node(i), grid.node(j), e);
            }
        }
    }

    #[test]
    fn extraction_recovers_single_exponential(kappa in 0.5f64..3.0, s in 0.5f64..5.0) {
        let g = UniformGrid::with_spacing(-12.0, 12.0, 0.01).unwrap();
        let f = MarchenkoInput::from_fn(g, |x| s * (-kappa * x).exp()).unwrap();
        let kg = MomentumGrid::with_spacing(20.0, 0.1).unwrap();
        let ex = extract_data_from_f(&f, &kg, &ExtractionOptions::default()).unwrap();
        let b = ex.sd.bound_states();
        prop_assert_eq!(b.len(), 1);
        prop_assert!((b[0].kappa - kappa).abs() < 1e-4 && (b[0].s - s).abs() < 1e-4 * s.max(1.0));
    }

    #[test]
    fn potential_files_round_trip(values in proptest::collection::vec(-1e3f64..1e3, 2..50)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.csv");
        let grid = RadialGrid::new(0.1 * (values.len() - 1) as f64, values.len()).unwrap();
        let q = Potential::new(grid, values).unwrap();
        io::write_potential(&path, &q).unwrap();
        prop_assert_eq!(io::read_potential(&path).unwrap(), q);
    }
}
