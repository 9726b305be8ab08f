use nalgebra::{DMatrix, DVector};

use super::quadrature::{weights, Rule};
use crate::error::{Error, Result};
use crate::model::UniformGrid;

/// Condition estimates beyond this are treated as numerically singular.
const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct FredholmSolution {
    pub values: Vec<f64>,
    /// `‖(I + KW)h + g‖ / ‖g‖` of the discrete system.
    pub residual: f64,
    /// Pivot-ratio estimate of the condition number.
    pub condition: f64,
}

/// Nyström solution of `h(t) + ∫ K(s, t) h(s) ds = -g(t)` on `grid`.
pub fn solve_fredholm(
    kernel: impl Fn(f64, f64) -> f64,
    rhs: &[f64],
    grid: &UniformGrid,
    rule: Rule,
) -> Result<FredholmSolution> {
    let n = grid.len();
    if rhs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: rhs.len(),
        });
    }
    let w = weights(n, grid.step(), rule);
    let nodes = grid.nodes();
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta + w[j] * kernel(nodes[j], nodes[i])
    });
    let b = DVector::from_iterator(n, rhs.iter().map(|g| -g));
    let lu = matrix.clone().lu();
    let u = lu.u();
    let (mut pmax, mut pmin) = (0.0_f64, f64::INFINITY);
    for i in 0..n {
        let p = u[(i, i)].abs();
        pmax = pmax.max(p);
        pmin = pmin.min(p);
    }
    let condition = if pmin > 0.0 { pmax / pmin } else { f64::INFINITY };
    if !(condition < MAX_CONDITION) {
        return Err(Error::SingularSystem { condition });
    }
    let x = lu.solve(&b).ok_or(Error::SingularSystem { condition })?;
    let r = &matrix * &x - &b;
    let scale = b.norm().max(f64::MIN_POSITIVE);
    let residual = if b.norm() == 0.0 { r.norm() } else { r.norm() / scale };
    Ok(FredholmSolution {
        values: x.iter().copied().collect(),
        residual,
        condition,
    })
}

/// Backward-marching solution of the Volterra equation
/// `h(t_i) + ∫_{t_i}^{t_end} K(i, j) h(t_j) dt_j = -g(t_i)`.
///
/// `kernel(i, j)` is only queried for `j >= i`. The trapezoid rule is used,
/// so the diagonal term enters implicitly with weight `Δ/2`.
pub fn solve_volterra_backward(
    kernel: impl Fn(usize, usize) -> f64,
    rhs: &[f64],
    grid: &UniformGrid,
) -> Result<Vec<f64>> {
    let n = grid.len();
    if rhs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: rhs.len(),
        });
    }
    let h = grid.step();
    let mut out = vec![0.0; n];
    out[n - 1] = -rhs[n - 1];
    for i in (0..n - 1).rev() {
        let mut acc = 0.0;
        for j in i + 1..n {
            let w = if j == n - 1 { 0.5 * h } else { h };
            acc += w * kernel(i, j) * out[j];
        }
        let diag = 1.0 + 0.5 * h * kernel(i, i);
        if diag.abs() < 1e-14 {
            return Err(Error::SingularSystem {
                condition: f64::INFINITY,
            });
        }
        out[i] = (-rhs[i] - acc) / diag;
    }
    Ok(out)
}
