use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::UniformGrid;

/// Composite quadrature rule on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rule {
    #[default]
    Trapezoid,
    /// Simpson's rule; an even node count closes with a 3/8 panel.
    Simpson,
}

/// Quadrature weights for `n` nodes of spacing `h`.
pub fn weights(n: usize, h: f64, rule: Rule) -> Vec<f64> {
    let mut w = vec![0.0; n];
    match n {
        0 => {}
        1 => {}
        2 => {
            w[0] = 0.5 * h;
            w[1] = 0.5 * h;
        }
        _ if rule == Rule::Trapezoid => {
            w.iter_mut().for_each(|v| *v = h);
            w[0] = 0.5 * h;
            w[n - 1] = 0.5 * h;
        }
        _ => {
            // Simpson on the leading panels, 3/8 on the last three cells when
            // the cell count is odd.
            let simpson_cells = if (n - 1).is_multiple_of(2) { n - 1 } else { n - 4 };
            for c in (0..simpson_cells).step_by(2) {
                w[c] += h / 3.0;
                w[c + 1] += 4.0 * h / 3.0;
                w[c + 2] += h / 3.0;
            }
            if simpson_cells < n - 1 {
                let s = simpson_cells;
                w[s] += 3.0 * h / 8.0;
                w[s + 1] += 9.0 * h / 8.0;
                w[s + 2] += 9.0 * h / 8.0;
                w[s + 3] += 3.0 * h / 8.0;
            }
        }
    }
    w
}

/// Sample types that can be integrated: `f64` and `Complex64`.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

/// Simpson-rule integral of `samples` over `grid`.
pub fn integrate<T: Integrand>(samples: &[T], grid: &UniformGrid) -> Result<T> {
    integrate_with(samples, grid, Rule::Simpson)
}

pub fn integrate_with<T: Integrand>(samples: &[T], grid: &UniformGrid, rule: Rule) -> Result<T> {
    if samples.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: samples.len(),
        });
    }
    let w = weights(samples.len(), grid.step(), rule);
    // Fixed ascending order keeps results reproducible.
    Ok(samples
        .iter()
        .zip(&w)
        .fold(T::zero(), |acc, (&s, &wi)| acc + s * wi))
}

/// Second-order derivative: central differences inside, one-sided
/// second-order formulas at both ends.
pub fn differentiate(samples: &[f64], grid: &UniformGrid) -> Result<Vec<f64>> {
    let n = samples.len();
    if n != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: n,
        });
    }
    if n < 3 {
        return Err(Error::InvalidGrid(format!(
            "differentiation needs at least 3 nodes, got {n}"
        )));
    }
    let h = grid.step();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (samples[i + 1] - samples[i - 1]) / (2.0 * h);
    }
    d[n - 1] = (3.0 * samples[n - 1] - 4.0 * samples[n - 2] + samples[n - 3]) / (2.0 * h);
    Ok(d)
}

/// Fourth-order derivative (five-point stencil, one-sided near the ends).
/// Falls back to [`differentiate`] on grids with fewer than five nodes.
pub fn differentiate5(samples: &[f64], grid: &UniformGrid) -> Result<Vec<f64>> {
    let n = samples.len();
    if n < 5 {
        return differentiate(samples, grid);
    }
    if n != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: n,
        });
    }
    let h12 = 12.0 * grid.step();
    let f = samples;
    let mut d = vec![0.0; n];
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / h12;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / h12;
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / h12;
    }
    let m = n - 1;
    d[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4]) / h12;
    d[m - 1] = (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) / h12;
    Ok(d)
}

/// Trapezoid tail integrals `∫_{x_i}^{x_end} f`, for every node.
pub fn tail_integrals(samples: &[f64], h: f64) -> Vec<f64> {
    let n = samples.len();
    let mut out = vec![0.0; n];
    for i in (0..n.saturating_sub(1)).rev() {
        out[i] = out[i + 1] + 0.5 * h * (samples[i] + samples[i + 1]);
    }
    out
}
