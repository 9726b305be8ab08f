//! Reverse arrows from the transformation kernel: `A ⇒ F` and `A ⇒ 𝒮`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::forward::{s_from_jost, BoundStateSearch};
use crate::model::{BoundState, MarchenkoInput, MomentumGrid, ScatteringData, TransformationKernel};
use crate::numkit::{filon, filon_exp, find_root, integrate, sign_changes, solve_volterra_backward};

/// `F` on `[0, y_max]` from the `x = 0` row of the Marchenko equation,
/// `F(p) + A(0, p) + ∫_p^{y_max} A(0, t - p) F(t) dt = 0`, taking `F = 0`
/// beyond `y_max`. With an even cell count the trapezoid solution is
/// extrapolated against the one at twice the spacing.
pub fn f_from_kernel(a: &TransformationKernel) -> Result<MarchenkoInput> {
    f_from_kernel_with(a, true)
}

/// [`f_from_kernel`] with the extrapolation optional. Without it the result
/// is the exact discrete inverse of the trapezoid [`super::marchenko_kernel`]
/// at `x = 0`.
pub fn f_from_kernel_with(a: &TransformationKernel, richardson: bool) -> Result<MarchenkoInput> {
    let grid = a.grid();
    let row = a.row(0);
    let fine = solve_volterra_backward(|i, j| row[j - i], row, grid.uniform())?;
    let coarse_grid = if richardson { grid.coarsen(2) } else { None };
    let f = match coarse_grid {
        Some(cg) => {
            let sub: Vec<f64> = row.iter().step_by(2).copied().collect();
            let coarse = solve_volterra_backward(|i, j| sub[j - i], &sub, cg.uniform())?;
            super::richardson_values(&fine, &coarse)
        }
        None => fine,
    };
    MarchenkoInput::from_total(grid.uniform().clone(), f)
}

fn as_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

#[derive(Debug, Clone)]
pub struct KernelData {
    pub sd: ScatteringData,
    /// `f(k) = 1 + ∫ A(0, y) e^{iky} dy` on the momentum grid.
    pub f0: Vec<Complex64>,
    pub f_at_zero: f64,
}

/// Scattering data from the kernel alone: the Jost function from the `x = 0`
/// row, bound states from its zeros on the imaginary axis and norming
/// constants from `||f_j||⁻²` with `f_j(x) = e^{-κx} + ∫_x A(x, y) e^{-κy} dy`.
pub fn data_from_kernel(a: &TransformationKernel, kgrid: &MomentumGrid, search: &BoundStateSearch) -> Result<KernelData> {
    let grid = a.grid();
    let row0 = as_complex(a.row(0));
    let z = kgrid.zero_index();
    let half: Vec<Complex64> = (z..kgrid.len())
        .into_par_iter()
        .map(|i| Ok(1.0 + filon(&row0, grid.uniform(), kgrid.node(i))?))
        .collect::<Result<_>>()?;
    let mut f0 = vec![Complex64::new(0.0, 0.0); kgrid.len()];
    for (off, v) in half.into_iter().enumerate() {
        f0[z + off] = v;
        f0[kgrid.mirror(z + off)] = v.conj();
    }
    f0[z].im = 0.0;

    let laplace = |kappa: f64| -> f64 {
        filon_exp(&row0, grid.uniform(), Complex64::new(-kappa, 0.0))
            .map(|v| 1.0 + v.re)
            .unwrap_or(f64::NAN)
    };
    let kappas = sign_changes(laplace, search.kappa_min, search.kappa_max, search.step)
        .into_iter()
        .map(|(lo, hi)| find_root(laplace, lo, hi, 0.0))
        .collect::<Result<Vec<f64>>>()?;
    let bound = kappas
        .iter()
        .map(|&kappa| Ok(BoundState::new(kappa, 1.0 / bound_state_norm(a, kappa)?)))
        .collect::<Result<Vec<_>>>()?;
    let f_at_zero = f0[z].re;
    let sd = s_from_jost(kgrid, &f0, bound, f_at_zero.abs() < search.resonance_tol)?;
    Ok(KernelData { sd, f0, f_at_zero })
}

/// `∫_0^∞ f_j(x)² dx` with `f_j` built from the kernel rows.
fn bound_state_norm(a: &TransformationKernel, kappa: f64) -> Result<f64> {
    let grid = a.grid();
    let n = grid.len();
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = grid.node(i);
            let row = as_complex(a.row(i));
            let tail = if row.len() >= 2 {
                let sub = crate::model::UniformGrid::new(x, grid.x_max(), row.len())?;
                filon_exp(&row, &sub, Complex64::new(-kappa, 0.0))?.re
            } else {
                0.0
            };
            Ok((-kappa * x).exp() + tail)
        })
        .collect::<Result<_>>()?;
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    Ok(integrate(&sq, grid)? + (-2.0 * kappa * grid.x_max()).exp() / (2.0 * kappa))
}
