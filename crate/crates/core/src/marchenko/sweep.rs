//! Whole-kernel Marchenko solve by bordering.
//!
//! For fixed `x = x_i` the trapezoid discretisation of
//! `A(x, y) + F(x + y) + ∫_x^Y A(x, s) F(s + y) ds = 0` in the scaled unknowns
//! `b_m = w_m A(x_i, y_m)` is the symmetric system `(W⁻¹ + H) b = -F(x_i + y)`
//! with `H_lm = F(y_l + y_m)`. Going from `x_{i+1}` to `x_i` changes one
//! diagonal entry (the old front node becomes interior) and borders the matrix
//! with the new node, so the inverse is carried along with a Sherman–Morrison
//! update and a Schur-complement border in `O(d²)` per step.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{MarchenkoInput, RadialGrid, TransformationKernel};
use crate::numkit::{solve_fredholm, Rule};

/// Samples `F(p_j)`, `p_j = j Δ`, `j = 0..=2N`, read off a Marchenko input
/// whose grid contains those nodes.
pub(crate) fn sample_on_lattice(f: &MarchenkoInput, h: f64, n_cells: usize) -> Result<Vec<f64>> {
    let g = &f.xgrid;
    let ratio = h / g.step();
    let stride = ratio.round();
    let offset = -g.start() / g.step();
    if (ratio - stride).abs() > 1e-9 || stride < 1.0 || (offset - offset.round()).abs() > 1e-9 || offset < -1e-9 {
        return Err(Error::InvalidGrid(format!(
            "F grid (start {}, step {}) does not contain the lattice of step {h} from 0",
            g.start(),
            g.step()
        )));
    }
    let (stride, offset) = (stride as usize, offset.round() as usize);
    Ok((0..=2 * n_cells)
        .map(|j| f.f_values.get(offset + j * stride).copied().unwrap_or(0.0))
        .collect())
}

/// Kernel rows `rows[i][m] = A(x_i, x_{i+m})` from `F` on the lattice.
pub(crate) fn sweep(fvals: &[f64], n_cells: usize, h: f64) -> Result<Vec<Vec<f64>>> {
    let n = n_cells;
    if fvals.len() < 2 * n + 1 || n == 0 {
        return Err(Error::InvalidGrid("Marchenko sweep needs at least one cell and F on [0, 2Y]".into()));
    }
    let stride = n + 1;
    // P = M⁻¹ in local order: local index L is node N - L.
    let mut p = vec![0.0; stride * stride];
    let mut rows: Vec<Vec<f64>> = (0..=n).map(|i| vec![0.0; n + 1 - i]).collect();
    rows[n][0] = -fvals[2 * n];
    p[0] = 1.0 / (2.0 / h + fvals[2 * n]);
    let mut d = 1;
    let mut beta = vec![0.0; stride];
    let mut r = vec![0.0; stride];
    let mut pb = vec![0.0; stride];
    let mut pr = vec![0.0; stride];
    let mut v = vec![0.0; stride];
    for i in (0..n).rev() {
        // Column of the old front node (local d - 1), before any change.
        let front = d - 1;
        let shrink = i + 1 < n;
        for l in 0..d {
            let node = n - l;
            beta[l] = fvals[i + node];
            r[l] = -fvals[i + node];
            v[l] = p[l * stride + front];
        }
        // One pass for Pβ and Pr.
        {
            let (beta, r) = (&beta[..d], &r[..d]);
            pb[..d]
                .par_iter_mut()
                .zip(pr[..d].par_iter_mut())
                .enumerate()
                .for_each(|(l, (yb, yr))| {
                    let row = &p[l * stride..l * stride + d];
                    let (mut sb, mut sr) = (0.0, 0.0);
                    for ((a, b), c) in row.iter().zip(beta).zip(r) {
                        sb += a * b;
                        sr += a * c;
                    }
                    *yb = sb;
                    *yr = sr;
                });
        }
        // Sherman–Morrison: P' = P - c1 v vᵀ for the diagonal change -1/h.
        let c1 = if shrink {
            let dch = -1.0 / h;
            let denom = 1.0 + dch * v[front];
            if denom.abs() < 1e-300 {
                return Err(Error::SingularSystem { condition: f64::INFINITY });
            }
            dch / denom
        } else {
            0.0
        };
        let vb: f64 = v[..d].iter().zip(&beta[..d]).map(|(a, b)| a * b).sum();
        let vr: f64 = v[..d].iter().zip(&r[..d]).map(|(a, b)| a * b).sum();
        for l in 0..d {
            pb[l] -= c1 * v[l] * vb;
            pr[l] -= c1 * v[l] * vr;
        }
        // Border with node i.
        let alpha = 2.0 / h + fvals[2 * i];
        let sigma = alpha - beta[..d].iter().zip(&pb[..d]).map(|(a, b)| a * b).sum::<f64>();
        if !(sigma.abs() > 1e-300) || !sigma.is_finite() {
            return Err(Error::SingularSystem { condition: f64::INFINITY });
        }
        let u = &pb;
        let r_new = -fvals[2 * i];
        let ur: f64 = u[..d].iter().zip(&r[..d]).map(|(a, b)| a * b).sum();
        // Solution of the bordered system.
        let b_new = (r_new - ur) / sigma;
        let w_front = |m: usize| if m == i || m == n { 0.5 * h } else { h };
        rows[i][0] = b_new / w_front(i);
        for l in 0..d {
            let m = n - l;
            let b = pr[l] + u[l] * (ur - r_new) / sigma;
            rows[i][m - i] = b / w_front(m);
        }
        // P ← P' + u uᵀ/σ, new row/column -u/σ, corner 1/σ.
        {
            let inv = 1.0 / sigma;
            let (v, u) = (&v[..d], &u[..d]);
            p.par_chunks_mut(stride).take(d).enumerate().for_each(|(l, row)| {
                let (cv, cu) = (c1 * v[l], u[l] * inv);
                for ((x, a), b) in row[..d].iter_mut().zip(v).zip(u) {
                    *x += -cv * a + cu * b;
                }
                row[d] = -cu;
            });
            for l in 0..d {
                p[d * stride + l] = -u[l] * inv;
            }
            p[d * stride + d] = inv;
        }
        d += 1;
    }
    Ok(rows)
}

/// Kernel on `grid` (`Y = x_max`) with `F` read from `f`, which must cover
/// `[0, 2Y]` on a lattice containing the multiples of the grid step.
pub fn marchenko_kernel(f: &MarchenkoInput, grid: &RadialGrid) -> Result<TransformationKernel> {
    let n_cells = grid.len() - 1;
    let fvals = sample_on_lattice(f, grid.step(), n_cells)?;
    TransformationKernel::new(grid.clone(), sweep(&fvals, n_cells, grid.step())?)
}

/// Row `A(x, ·)` on `[x, y_max]` by a direct Nyström solve (independent of
/// the sweep). `x` and `y_max` must be nodes of the lattice of step `dy`.
pub fn solve_marchenko(f: &MarchenkoInput, x: f64, y_max: f64, dy: f64) -> Result<Vec<f64>> {
    let grid = crate::model::UniformGrid::with_spacing(x, y_max, dy)?;
    if grid.len() < 2 {
        return Err(Error::InvalidGrid("Marchenko row needs at least two nodes".into()));
    }
    let rhs: Vec<f64> = grid.nodes().iter().map(|y| f.eval(x + y)).collect();
    let sol = solve_fredholm(|s, t| f.eval(s + t), &rhs, &grid, Rule::Trapezoid)?;
    Ok(sol.values)
}
