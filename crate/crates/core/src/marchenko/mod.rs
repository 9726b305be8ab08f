//! Inversion `𝒮 ⇒ F ⇒ A ⇒ q` and the reverse arrows between scattering data,
//! `F` and the transformation kernel.

mod reverse;
mod spectrum;
mod sweep;

pub use reverse::{data_from_kernel, f_from_kernel, f_from_kernel_with, KernelData};
pub use spectrum::{build_F, extract_data_from_f, Extraction, ExtractionOptions, IMAG_RESIDUAL_TOL};
pub use sweep::{marchenko_kernel, solve_marchenko};

use crate::characterize::{full_report, ConditionThresholds};
use crate::error::{Error, Result, Stage};
use crate::model::{
    MarchenkoInput, MomentumGrid, Potential, RadialGrid, ScatteringData, TransformationKernel, ValidationReport,
};
use crate::numkit::{differentiate, differentiate5, FourierOptions, OriginConvention};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivScheme {
    /// Second-order central differences.
    Central,
    /// Five-point stencil, one-sided near the ends.
    FivePoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InversionConfig {
    pub x_max: f64,
    pub dx: f64,
    /// Momentum grid used when data are regenerated from a kernel.
    pub k_max: f64,
    pub dk: f64,
    pub fourier: FourierOptions,
    /// Combine the diagonal with a `2Δx` solve to cancel the `O(Δx²)` term.
    pub richardson: bool,
    pub deriv_scheme: DerivScheme,
    /// Run even if the data fail validation.
    pub force: bool,
    pub thresholds: ConditionThresholds,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            x_max: 20.0,
            dx: 0.01,
            k_max: 200.0,
            dk: 0.05,
            fourier: FourierOptions {
                origin: OriginConvention::RightLimit,
                ..FourierOptions::default()
            },
            richardson: true,
            deriv_scheme: DerivScheme::FivePoint,
            force: false,
            thresholds: ConditionThresholds::default(),
        }
    }
}

impl InversionConfig {
    pub fn radial_grid(&self) -> Result<RadialGrid> {
        RadialGrid::with_spacing(self.x_max, self.dx)
    }

    pub fn momentum_grid(&self) -> Result<MomentumGrid> {
        MomentumGrid::with_spacing(self.k_max, self.dk)
    }
}

#[derive(Debug, Clone)]
pub struct Inversion {
    pub potential: Potential,
    pub kernel: TransformationKernel,
    /// `F` on `[0, 2 x_max]`.
    pub f: MarchenkoInput,
    /// `None` when validation was skipped with `force`.
    pub report: Option<ValidationReport>,
}

/// `q = -2 d/dx A(x, x)`.
pub fn recover_potential(a: &TransformationKernel, scheme: DerivScheme) -> Result<Potential> {
    let grid = a.grid();
    let diag = a.diagonal();
    let d = match scheme {
        DerivScheme::Central => differentiate(&diag, grid.uniform())?,
        DerivScheme::FivePoint => differentiate5(&diag, grid.uniform())?,
    };
    Potential::new(grid.clone(), d.into_iter().map(|v| -2.0 * v).collect())
}

/// Richardson combination of a kernel with its counterpart at twice the
/// spacing. The correction `(A_h - A_2h)/3` is formed on the shared nodes and
/// averaged from the nearest shared nodes elsewhere.
pub(crate) fn richardson_kernel(fine: &TransformationKernel, coarse: &TransformationKernel) -> Result<TransformationKernel> {
    let n = fine.grid().len();
    if coarse.grid().len() * 2 - 1 != n {
        return Err(Error::LengthMismatch {
            expected: n.div_ceil(2),
            found: coarse.grid().len(),
        });
    }
    let corr = |i: usize, j: usize| (fine.get(i, j) - coarse.get(i / 2, j / 2)) / 3.0;
    let rows = (0..n)
        .map(|i| {
            (i..n)
                .map(|j| {
                    let c = match (i % 2, j % 2) {
                        (0, 0) => corr(i, j),
                        (1, 0) => 0.5 * (corr(i - 1, j) + corr(i + 1, j)),
                        (0, 1) => 0.5 * (corr(i, j - 1) + corr(i, j + 1)),
                        _ if i == j => 0.5 * (corr(i - 1, j - 1) + corr(i + 1, j + 1)),
                        _ => 0.25 * (corr(i - 1, j - 1) + corr(i - 1, j + 1) + corr(i + 1, j - 1) + corr(i + 1, j + 1)),
                    };
                    fine.get(i, j) + c
                })
                .collect()
        })
        .collect();
    TransformationKernel::new(fine.grid().clone(), rows)
}

/// 1-D counterpart of [`richardson_kernel`].
pub(crate) fn richardson_values(fine: &[f64], coarse: &[f64]) -> Vec<f64> {
    let corr: Vec<f64> = coarse.iter().enumerate().map(|(j, c)| (fine[2 * j] - c) / 3.0).collect();
    fine.iter()
        .enumerate()
        .map(|(i, v)| v + if i % 2 == 0 { corr[i / 2] } else { 0.5 * (corr[i / 2] + corr[i / 2 + 1]) })
        .collect()
}

/// [`marchenko_kernel`] extrapolated against a solve at twice the spacing,
/// which cancels the `O(Δx²)` trapezoid error. Grids with an odd cell count
/// get the plain kernel.
pub fn marchenko_kernel_extrapolated(f: &MarchenkoInput, grid: &RadialGrid) -> Result<TransformationKernel> {
    let fine = marchenko_kernel(f, grid)?;
    match grid.coarsen(2) {
        Some(cg) => richardson_kernel(&fine, &marchenko_kernel(f, &cg)?),
        None => Ok(fine),
    }
}

/// Kernel and potential from `F` given on a grid that contains the lattice
/// `{j Δx : 0 <= j <= 2N}`.
pub fn invert_f(f: &MarchenkoInput, config: &InversionConfig) -> Result<(TransformationKernel, Potential)> {
    let grid = config.radial_grid()?;
    let kernel = if config.richardson {
        marchenko_kernel_extrapolated(f, &grid)
    } else {
        marchenko_kernel(f, &grid)
    }
    .map_err(Error::at(Stage::Marchenko))?;
    let q = recover_potential(&kernel, config.deriv_scheme).map_err(Error::at(Stage::Potential))?;
    Ok((kernel, q))
}

/// `𝒮 ⇒ F ⇒ A ⇒ q`.
pub fn invert(sd: &ScatteringData, config: &InversionConfig) -> Result<Inversion> {
    let report = if config.force {
        None
    } else {
        let report = full_report(sd, &config.thresholds);
        if !report.passed {
            return Err(Error::at(Stage::Validation)(Error::InvalidInput(format!(
                "scattering data fail: {}",
                report.failed().join(", ")
            ))));
        }
        Some(report)
    };
    let f = build_F(sd, 0.0, 2.0 * config.x_max, config.dx, config.fourier).map_err(Error::at(Stage::BuildF))?;
    let (kernel, potential) = invert_f(&f, config)?;
    Ok(Inversion {
        potential,
        kernel,
        f,
        report,
    })
}

#[cfg(test)]
mod tests;
