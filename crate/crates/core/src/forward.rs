//! The direct problem: potential to Jost function, bound states, norming
//! constants, `S(k)`, phase shift and transformation kernel.
//!
//! The Jost solution is written as `f(x, k) = e^{ikx} m(x, k)`, which turns
//! the Volterra equation into
//!
//! ```text
//! m(x) = 1 + ∫_x^X K(y - x) q(y) m(y) dy,   K(d) = (e^{2ikd} - 1) / (2ik).
//! ```
//!
//! `q m` is interpolated linearly on each cell and `K` is integrated exactly
//! against it, so the march is stable for large real `k` and for `k = iκ`
//! alike. Running sums make one backward sweep `O(N)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    BoundState, JostField, JostRow, MomentumGrid, Potential, RadialGrid, ScatteringData, TransformationKernel,
};
use crate::numkit::{find_root, integrate, sign_changes, unwrap_phase, CellWeights};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Boundary values of the Jost solution at one `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JostBoundary {
    pub f0: Complex64,
    pub fprime0: Complex64,
}

/// Full `x`-profile of the Jost solution at one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct JostSolution {
    pub k: Complex64,
    /// `f(x_i, k)` on the potential grid, from the base scheme.
    pub values: Vec<Complex64>,
    /// Boundary values, Richardson-extrapolated when the grid allows it.
    pub boundary: JostBoundary,
}

struct March {
    boundary: JostBoundary,
    m: Option<Vec<Complex64>>,
}

fn march(q: &[f64], h: f64, k: Complex64, keep: bool) -> March {
    let n = q.len();
    let w = CellWeights::new(2.0 * I * k, h);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut profile = keep.then(|| vec![one; n]);
    let (mut t, mut u, mut v) = (zero, zero, zero);
    let mut m_next = one;
    let mut g_next = one * q[n - 1];
    for i in (0..n - 1).rev() {
        let rhs = 1.0 + w.kb * g_next + w.shift * t + w.k_step * v;
        let m = rhs / (1.0 - w.ka * q[i]);
        let g = m * q[i];
        t = w.ka * g + w.kb * g_next + w.shift * t + w.k_step * v;
        u = w.a * g + w.b * g_next + w.shift * u;
        v += 0.5 * h * (g + g_next);
        if let Some(p) = profile.as_mut() {
            p[i] = m;
        }
        m_next = m;
        g_next = g;
    }
    March {
        boundary: JostBoundary {
            f0: m_next,
            fprime0: I * k * m_next - u,
        },
        m: profile,
    }
}

fn check_k(k: Complex64) -> Result<()> {
    if k.im < 0.0 || !k.is_finite() {
        return Err(Error::InvalidInput(format!("Jost solution needs Im k >= 0, got k = {k}")));
    }
    Ok(())
}

fn richardson_ok(n: usize) -> bool {
    n >= 5 && (n - 1).is_multiple_of(2)
}

/// `f(0, k)` and `f'(0, k)`. On grids with an even cell count the base result
/// is combined with a half-resolution sweep as `(4 v_h - v_2h) / 3`.
pub fn jost_boundary_at(q: &Potential, k: Complex64) -> Result<JostBoundary> {
    check_k(k)?;
    let values = q.values();
    let h = q.grid().step();
    let fine = march(values, h, k, false).boundary;
    if !richardson_ok(values.len()) {
        return Ok(fine);
    }
    let coarse_q: Vec<f64> = values.iter().step_by(2).copied().collect();
    let coarse = march(&coarse_q, 2.0 * h, k, false).boundary;
    Ok(JostBoundary {
        f0: (4.0 * fine.f0 - coarse.f0) / 3.0,
        fprime0: (4.0 * fine.fprime0 - coarse.fprime0) / 3.0,
    })
}

/// Jost solution `f(x, k)` on the potential grid, marching back from `x_max`
/// where `f = e^{ikx}`.
pub fn solve_jost(q: &Potential, k: Complex64) -> Result<JostSolution> {
    check_k(k)?;
    let grid = q.grid();
    let m = march(q.values(), grid.step(), k, true).m.expect("profile requested");
    let values = m
        .iter()
        .enumerate()
        .map(|(i, mi)| (I * k * grid.node(i)).exp() * mi)
        .collect();
    Ok(JostSolution {
        k,
        values,
        boundary: jost_boundary_at(q, k)?,
    })
}

/// `f(k)` and `f'(0, k)` on a symmetric real grid. Only `k >= 0` is
/// computed; the negative half is the complex conjugate.
pub fn jost_boundary(q: &Potential, kgrid: &MomentumGrid) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let z = kgrid.zero_index();
    let half: Vec<JostBoundary> = (z..kgrid.len())
        .into_par_iter()
        .map(|i| jost_boundary_at(q, Complex64::new(kgrid.node(i), 0.0)))
        .collect::<Result<_>>()?;
    let n = kgrid.len();
    let mut f0 = vec![Complex64::new(0.0, 0.0); n];
    let mut fp = f0.clone();
    for (off, b) in half.iter().enumerate() {
        let i = z + off;
        f0[i] = b.f0;
        fp[i] = b.fprime0;
        f0[kgrid.mirror(i)] = b.f0.conj();
        fp[kgrid.mirror(i)] = b.fprime0.conj();
    }
    // f(0) is real for a real potential.
    f0[z].im = 0.0;
    fp[z].re = 0.0;
    Ok((f0, fp))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundStateSearch {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub step: f64,
    /// `|f(0)|` below this flags a zero-energy resonance.
    pub resonance_tol: f64,
}

impl BoundStateSearch {
    /// Scan range covering every admissible `κ` for `q`: `κ² <= max|q|`.
    pub fn for_potential(q: &Potential) -> Self {
        Self {
            kappa_min: 1e-3,
            kappa_max: q.max_abs().sqrt() * 1.05 + 0.05,
            step: 0.01,
            resonance_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStates {
    pub kappas: Vec<f64>,
    /// `f(k = 0)`.
    pub f_at_zero: f64,
    pub resonance: bool,
}

/// `f(0, iκ)`, real for a real potential.
fn jost_imaginary(q: &Potential, kappa: f64) -> Result<f64> {
    Ok(jost_boundary_at(q, Complex64::new(0.0, kappa))?.f0.re)
}

/// Zeros `iκ_j` of the Jost function: sign changes of `f(0, iκ)` on the scan,
/// each refined to machine precision.
pub fn find_bound_states(q: &Potential, search: &BoundStateSearch) -> Result<BoundStates> {
    if !(search.kappa_max > search.kappa_min && search.kappa_min > 0.0 && search.step > 0.0) {
        return Err(Error::InvalidInput(format!(
            "bad bound-state scan [{}, {}] step {}",
            search.kappa_min, search.kappa_max, search.step
        )));
    }
    let g = |kappa: f64| jost_imaginary(q, kappa).unwrap_or(f64::NAN);
    let n = ((search.kappa_max - search.kappa_min) / search.step).ceil() as usize;
    let samples: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|i| (search.kappa_min + i as f64 * search.step).min(search.kappa_max))
        .collect();
    let values: Vec<f64> = samples.par_iter().map(|&x| g(x)).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InconsistentState("Jost function not finite on the bound-state scan".into()));
    }
    let lookup = |x: f64| {
        let idx = ((x - search.kappa_min) / search.step).round() as usize;
        if idx <= n && (samples[idx] - x).abs() < 1e-12 {
            values[idx]
        } else {
            g(x)
        }
    };
    let brackets = sign_changes(lookup, search.kappa_min, search.kappa_max, search.step);
    let kappas = brackets
        .into_par_iter()
        .map(|(a, b)| find_root(g, a, b, 0.0))
        .collect::<Result<Vec<f64>>>()?;
    let f_at_zero = jost_boundary_at(q, Complex64::new(0.0, 0.0))?.f0.re;
    Ok(BoundStates {
        kappas,
        f_at_zero,
        resonance: f_at_zero.abs() < search.resonance_tol,
    })
}

/// Norming constant with its independent cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormingConstant {
    pub kappa: f64,
    /// `-2iκ / (f'(0, iκ) ḟ(iκ))`, from the Wronskian of `f(·, k)` and
    /// `f(·, iκ)` as `k → iκ`.
    pub s: f64,
    /// `-2iκ f'(0, iκ) / ḟ(iκ) = s f'(0, iκ)²`: the norming constant of the
    /// solution normalised by `φ'(0) = 1`.
    pub c_regular: f64,
    /// `1 / ∫ f(x, iκ)² dx`.
    pub s_l2: f64,
    pub relative_difference: f64,
}

/// `ḟ(iκ)` below this marks a zero that is not simple.
const SIMPLE_ZERO_TOL: f64 = 1e-8;

pub fn norming_constants(q: &Potential, kappas: &[f64]) -> Result<Vec<NormingConstant>> {
    kappas.par_iter().map(|&kappa| norming_constant(q, kappa)).collect()
}

fn norming_constant(q: &Potential, kappa: f64) -> Result<NormingConstant> {
    let h = 1e-4 * kappa;
    let dg = (jost_imaginary(q, kappa + h)? - jost_imaginary(q, kappa - h)?) / (2.0 * h);
    if dg.abs() < SIMPLE_ZERO_TOL {
        return Err(Error::ZeroNotSimple {
            kappa,
            derivative: dg.abs(),
        });
    }
    let fp = jost_boundary_at(q, Complex64::new(0.0, kappa))?.fprime0.re;
    // ḟ(iκ) = -i ∂_κ f(0, iκ).
    let s = 2.0 * kappa / (fp * dg);
    let s_l2 = 1.0 / squared_norm(q, kappa)?;
    Ok(NormingConstant {
        kappa,
        s,
        c_regular: 2.0 * kappa * fp / dg,
        s_l2,
        relative_difference: (s - s_l2).abs() / s.abs().max(s_l2.abs()),
    })
}

/// `∫_0^X f(x, iκ)² dx`, extrapolated from the full and half-resolution
/// profiles when possible.
fn squared_norm(q: &Potential, kappa: f64) -> Result<f64> {
    let norm_on = |q: &Potential| -> Result<f64> {
        let sol = solve_jost(q, Complex64::new(0.0, kappa))?;
        let sq: Vec<f64> = sol.values.iter().map(|f| f.re * f.re).collect();
        // The tail beyond x_max, where f = e^{-κx}, is added in closed form.
        let x_max = q.grid().x_max();
        Ok(integrate(&sq, q.grid())? + (-2.0 * kappa * x_max).exp() / (2.0 * kappa))
    };
    let fine = norm_on(q)?;
    if !richardson_ok(q.grid().len()) {
        return Ok(fine);
    }
    let coarse = norm_on(&q.coarsen(2).expect("even cell count"))?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `|f(k)|` below this away from `k = 0` means the data are inconsistent.
const REAL_AXIS_ZERO_TOL: f64 = 1e-12;

/// `S(k) = conj f(k) / f(k)` from Jost boundary values. At `k = 0` the value
/// is set by the resonance flag: `-1` if `f(0) = 0`, else `+1`.
pub fn s_from_jost(
    kgrid: &MomentumGrid,
    f0: &[Complex64],
    bound_states: Vec<BoundState>,
    resonance: bool,
) -> Result<ScatteringData> {
    if f0.len() != kgrid.len() {
        return Err(Error::LengthMismatch {
            expected: kgrid.len(),
            found: f0.len(),
        });
    }
    let z = kgrid.zero_index();
    let sign: i8 = if resonance { -1 } else { 1 };
    let mut s = Vec::with_capacity(f0.len());
    for (i, f) in f0.iter().enumerate() {
        if i == z {
            s.push(Complex64::new(sign as f64, 0.0));
            continue;
        }
        if f.norm() < REAL_AXIS_ZERO_TOL {
            return Err(Error::InconsistentState(format!(
                "Jost function vanishes at real k = {}",
                kgrid.node(i)
            )));
        }
        let v = f.conj() / f;
        // Exact unimodularity; the ratio is unimodular up to rounding.
        s.push(v / v.norm());
    }
    ScatteringData::new(kgrid.clone(), s, bound_states, sign)
}

/// Scattering data of `q` on `kgrid`: `S`, bound states and norming constants.
pub fn s_matrix(q: &Potential, kgrid: &MomentumGrid) -> Result<ScatteringData> {
    let (f0, _) = jost_boundary(q, kgrid)?;
    let found = find_bound_states(q, &BoundStateSearch::for_potential(q))?;
    let bound = norming_constants(q, &found.kappas)?
        .into_iter()
        .map(|c| BoundState::new(c.kappa, c.s))
        .collect();
    s_from_jost(kgrid, &f0, bound, found.resonance)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShift {
    /// `δ(k)` on the momentum grid; the `k = 0` node holds `δ(0⁺)`.
    pub values: Vec<f64>,
    /// `max |δ(-k) + δ(k)|` over `k ≠ 0`, each half unwrapped independently.
    pub oddness: f64,
}

/// `δ = ½ arg S`, continued from the principal value at `±k_max`.
pub fn phase_shift(sd: &ScatteringData) -> Result<PhaseShift> {
    let kgrid = sd.kgrid();
    let s = sd.s_values();
    let n = s.len();
    let z = kgrid.zero_index();
    // k_max down to 0.
    let right: Vec<Complex64> = s[z..].iter().rev().copied().collect();
    let right_phase = unwrap_phase(&right)?;
    // -k_max up to 0.
    let left_phase = unwrap_phase(&s[..=z])?;
    let mut values = vec![0.0; n];
    for (off, p) in right_phase.iter().enumerate() {
        values[n - 1 - off] = 0.5 * p;
    }
    let mut oddness = 0.0_f64;
    for i in 0..z {
        let own = 0.5 * left_phase[i];
        values[i] = -values[kgrid.mirror(i)];
        oddness = oddness.max((own - values[i]).abs());
    }
    Ok(PhaseShift { values, oddness })
}

/// Transformation kernel `A(x, y)`, `0 <= x <= y <= x_max`.
///
/// In `u = (x + y)/2`, `v = (y - x)/2` the kernel `B(u, v) = A(u - v, u + v)`
/// satisfies
///
/// ```text
/// B(u, v) = ½ ∫_u^∞ q + ∫_0^v dv' ∫_u^∞ q(t - v') B(t, v') dt,
/// ```
///
/// which is marched in `v` on a lattice of half the grid step, trapezoid in
/// both directions. `A` vanishes for `x >= x_max`, which closes the domain.
/// The march is repeated on the linear interpolant of `q` at half the step
/// and the two are Richardson-combined, so both solves see the same
/// piecewise-linear potential.
pub fn kernel_from_potential(q: &Potential) -> Result<TransformationKernel> {
    let coarse = goursat_kernel(q)?;
    let fine = goursat_kernel(&q.refine(2)?)?;
    let n = q.grid().len();
    let rows = (0..n)
        .map(|i| {
            (i..n)
                .map(|j| {
                    let f = fine.get(2 * i, 2 * j);
                    f + (f - coarse.get(i, j)) / 3.0
                })
                .collect()
        })
        .collect();
    TransformationKernel::new(q.grid().clone(), rows)
}

fn goursat_kernel(q: &Potential) -> Result<TransformationKernel> {
    let grid = q.grid();
    let n_cells = grid.len() - 1;
    let eta = 0.5 * grid.step();
    // q on the half-step lattice, zero past x_max.
    let qh: Vec<f64> = (0..=2 * n_cells)
        .map(|m| {
            let i = m / 2;
            if m % 2 == 0 {
                q.values()[i]
            } else {
                0.5 * (q.values()[i] + q.values()[i + 1])
            }
        })
        .collect();
    let q_at = |m: isize| -> f64 {
        if m < 0 || m as usize > 2 * n_cells {
            0.0
        } else {
            qh[m as usize]
        }
    };
    let p_len = 3 * n_cells + 2;
    // B(u_p, 0) = ½ ∫_{u_p}^∞ q.
    let mut b0 = vec![0.0; p_len];
    for p in (0..2 * n_cells).rev() {
        b0[p] = b0[p + 1] + 0.25 * eta * (qh[p] + qh[p + 1]);
    }
    let mut rows: Vec<Vec<f64>> = (0..=n_cells).map(|i| vec![0.0; n_cells + 1 - i]).collect();
    let mut integral = vec![0.0; p_len]; // ∫_0^{v_{r-1}} G dv'
    let mut g_prev = vec![0.0; p_len];
    let mut g_cur = vec![0.0; p_len];
    let mut b_col = vec![0.0; p_len];
    for r in 0..=n_cells {
        let p_top = r + 2 * n_cells;
        g_cur.iter_mut().for_each(|v| *v = 0.0);
        if r == 0 {
            b_col[..=p_top].copy_from_slice(&b0[..=p_top]);
            for p in (0..p_top).rev() {
                let (qa, qb) = (q_at(p as isize), q_at(p as isize + 1));
                g_cur[p] = g_cur[p + 1] + 0.5 * eta * (qa * b_col[p] + qb * b_col[p + 1]);
            }
        } else {
            for p in r..=p_top {
                integral[p] += 0.5 * eta * g_prev[p];
            }
            let x_off = r as isize;
            b_col[p_top] = b0[p_top] + integral[p_top];
            for p in (r..p_top).rev() {
                let qa = q_at(p as isize - x_off);
                let qb = q_at(p as isize + 1 - x_off);
                let c = b0[p] + integral[p] + 0.5 * eta * g_cur[p + 1];
                let bp = (c + 0.25 * eta * eta * qb * b_col[p + 1]) / (1.0 - 0.25 * eta * eta * qa);
                b_col[p] = bp;
                g_cur[p] = g_cur[p + 1] + 0.5 * eta * (qa * bp + qb * b_col[p + 1]);
            }
            for p in r..=p_top {
                integral[p] += 0.5 * eta * g_cur[p];
            }
        }
        for i in 0..=n_cells - r {
            rows[i][r] = b_col[2 * i + r];
        }
        std::mem::swap(&mut g_prev, &mut g_cur);
    }
    TransformationKernel::new(grid.clone(), rows)
}

/// `sup |A(x, y)| / ∫_{(x+y)/2}^∞ |q|` over nodes where the denominator is
/// not negligible.
pub fn kernel_estimate_ratio(kernel: &TransformationKernel, q: &Potential) -> f64 {
    let grid = q.grid();
    let n = grid.len();
    let abs: Vec<f64> = q.values().iter().map(|v| v.abs()).collect();
    // Tail integrals on the half-step lattice, so (x + y)/2 is always a node.
    let half: Vec<f64> = (0..2 * n - 1)
        .map(|m| if m % 2 == 0 { abs[m / 2] } else { 0.5 * (abs[m / 2] + abs[m / 2 + 1]) })
        .collect();
    let tails = crate::numkit::tail_integrals(&half, 0.5 * grid.step());
    let floor = 1e-10 * tails[0].max(f64::MIN_POSITIVE);
    let mut ratio = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            let d = tails[i + j];
            if d > floor {
                ratio = ratio.max(kernel.get(i, j).abs() / d);
            }
        }
    }
    ratio
}

/// `max |A(x, x) - ½ ∫_x^∞ q|`.
pub fn diagonal_identity_error(kernel: &TransformationKernel, q: &Potential) -> f64 {
    let tails = crate::numkit::tail_integrals(q.values(), q.grid().step());
    kernel
        .diagonal()
        .iter()
        .zip(&tails)
        .map(|(a, t)| (a - 0.5 * t).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct ForwardOptions {
    pub kgrid: MomentumGrid,
    pub search: Option<BoundStateSearch>,
    pub compute_kernel: bool,
    /// Real momenta `|k| <= row_k_max` at spacing `row_k_step` keep their
    /// full `x`-profile in the Jost field.
    pub row_k_max: f64,
    pub row_k_step: f64,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        Self {
            kgrid: MomentumGrid::with_spacing(200.0, 0.05).expect("default momentum grid"),
            search: None,
            compute_kernel: true,
            row_k_max: 20.0,
            row_k_step: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ForwardResult {
    pub jost: JostField,
    pub sd: ScatteringData,
    pub delta: PhaseShift,
    pub kernel: Option<TransformationKernel>,
    pub bound_states: BoundStates,
    pub norming: Vec<NormingConstant>,
}

/// Profiles `f(x, k)` at the requested real momenta and at each `iκ_j`.
fn jost_rows(q: &Potential, options: &ForwardOptions, kappas: &[f64]) -> Result<Vec<JostRow>> {
    let mut ks: Vec<Complex64> = Vec::new();
    if options.row_k_step > 0.0 {
        let m = (options.row_k_max / options.row_k_step).floor() as i64;
        ks.extend((-m..=m).map(|j| Complex64::new(j as f64 * options.row_k_step, 0.0)));
    }
    ks.extend(kappas.iter().map(|&kappa| Complex64::new(0.0, kappa)));
    ks.into_par_iter()
        .map(|k| {
            // Negative real k via conjugation, as on the boundary.
            let (kk, flip) = if k.im == 0.0 && k.re < 0.0 { (-k, true) } else { (k, false) };
            let sol = solve_jost(q, kk)?;
            let values = if flip { sol.values.iter().map(|v| v.conj()).collect() } else { sol.values };
            Ok(JostRow { k, values })
        })
        .collect()
}

/// The full direct problem for `q`.
pub fn forward(q: &Potential, options: &ForwardOptions) -> Result<ForwardResult> {
    let kgrid = &options.kgrid;
    let (f0, fprime0) = jost_boundary(q, kgrid)?;
    let search = options.search.unwrap_or_else(|| BoundStateSearch::for_potential(q));
    let bound_states = find_bound_states(q, &search)?;
    let norming = norming_constants(q, &bound_states.kappas)?;
    let bound = norming.iter().map(|c| BoundState::new(c.kappa, c.s)).collect();
    let sd = s_from_jost(kgrid, &f0, bound, bound_states.resonance)?;
    let delta = phase_shift(&sd)?;
    let kernel = if options.compute_kernel {
        Some(kernel_from_potential(q)?)
    } else {
        None
    };
    let rows = jost_rows(q, options, &bound_states.kappas)?;
    let xgrid: RadialGrid = q.grid().clone();
    Ok(ForwardResult {
        jost: JostField {
            xgrid,
            kgrid: kgrid.clone(),
            f0,
            fprime0,
            rows,
        },
        sd,
        delta,
        kernel,
        bound_states,
        norming,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{filon, winding_number};
    use std::f64::consts::PI;

    fn xgrid() -> RadialGrid {
        RadialGrid::with_spacing(40.0, 0.01).unwrap()
    }

    fn sech2() -> Potential {
        Potential::sech2(xgrid(), 1.0).unwrap()
    }

    fn well() -> Potential {
        Potential::square_well(xgrid(), 4.0, 1.0).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Two-region matching for `q = -v0` on `[0, a)`: `f(0, k)`.
    fn well_f0(k: Complex64, v0: f64, a: f64) -> Complex64 {
        let kk = (k * k + v0).sqrt();
        (I * k * a).exp() * ((kk * a).cos() - I * k * (kk * a).sin() / kk)
    }

    /// Bisection on `√(4-κ²) cot √(4-κ²) + κ = 0`.
    fn well_kappa() -> f64 {
        let g = |kappa: f64| {
            let s = (4.0 - kappa * kappa).sqrt();
            s * s.cos() / s.sin() + kappa
        };
        let (mut a, mut b) = (0.1, 1.5);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if g(a) * g(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn free_jost_solution_is_a_plane_wave() {
        let q = Potential::zero(RadialGrid::with_spacing(10.0, 0.05).unwrap());
        for k in [c(0.0, 0.0), c(3.0, 0.0), c(0.0, 1.5), c(2.0, 0.5)] {
            let sol = solve_jost(&q, k).unwrap();
            for (i, f) in sol.values.iter().enumerate() {
                let x = q.grid().node(i);
                assert!((f - (I * k * x).exp()).norm() < 1e-14);
            }
            assert!((sol.boundary.f0 - 1.0).norm() < 1e-14);
            assert!((sol.boundary.fprime0 - I * k).norm() < 1e-14);
        }
    }

    #[test]
    fn lower_half_plane_is_rejected() {
        assert!(solve_jost(&sech2(), c(1.0, -0.1)).is_err());
    }

    #[test]
    fn sech2_jost_function_at_one() {
        let b = jost_boundary_at(&sech2(), c(1.0, 0.0)).unwrap();
        assert!((b.f0 - c(0.5, -0.5)).norm() < 1e-4, "{}", b.f0);
    }

    #[test]
    fn sech2_jost_function_uniformly() {
        let kgrid = MomentumGrid::with_spacing(20.0, 0.05).unwrap();
        let (f0, _) = jost_boundary(&sech2(), &kgrid).unwrap();
        for (k, f) in kgrid.nodes().iter().zip(&f0) {
            let exact = k / (k + I);
            assert!((f - exact).norm() < 1e-4, "k = {k}");
        }
    }

    #[test]
    fn square_well_matches_plane_wave_matching() {
        let q = well();
        for k in [c(2.0, 0.0), c(0.3, 0.0), c(0.0, 0.7), c(7.5, 0.0)] {
            let b = jost_boundary_at(&q, k).unwrap();
            let exact = well_f0(k, 4.0, 1.0);
            assert!((b.f0 - exact).norm() < 1e-6, "k = {k}: {} vs {exact}", b.f0);
        }
    }

    #[test]
    fn square_well_large_k_tail() {
        let q = well();
        let k_max = 200.0;
        let f = jost_boundary_at(&q, c(k_max, 0.0)).unwrap().f0;
        // |f(k) - 1| ~ ∫|q| / (2k) for large k.
        assert!((f - 1.0).norm() <= 4.0 / k_max);
    }

    #[test]
    fn no_bound_states_for_zero_potential() {
        let q = Potential::zero(RadialGrid::with_spacing(10.0, 0.05).unwrap());
        let mut search = BoundStateSearch::for_potential(&q);
        search.kappa_max = 2.0;
        let found = find_bound_states(&q, &search).unwrap();
        assert!(found.kappas.is_empty());
        assert!(!found.resonance);
        assert!(norming_constants(&q, &found.kappas).unwrap().is_empty());
    }

    #[test]
    fn square_well_single_bound_state() {
        let q = well();
        let found = find_bound_states(&q, &BoundStateSearch::for_potential(&q)).unwrap();
        assert_eq!(found.kappas.len(), 1);
        let oracle = well_kappa();
        assert!((oracle - 0.63).abs() < 0.01);
        assert!((found.kappas[0] - oracle).abs() < 1e-6, "{} vs {oracle}", found.kappas[0]);
        assert!(!found.resonance);
    }

    #[test]
    fn sech2_has_only_a_resonance() {
        let q = sech2();
        let found = find_bound_states(&q, &BoundStateSearch::for_potential(&q)).unwrap();
        assert!(found.kappas.is_empty());
        assert!(found.resonance);
        assert!(found.f_at_zero.abs() < 1e-6);
    }

    #[test]
    fn square_well_norming_formulas_agree() {
        let q = well();
        let nc = norming_constants(&q, &[well_kappa()]).unwrap();
        assert_eq!(nc.len(), 1);
        assert!(nc[0].s > 0.0 && nc[0].s_l2 > 0.0);
        assert!(nc[0].relative_difference < 1e-4, "{:?}", nc[0]);
        let fp = jost_boundary_at(&q, c(0.0, nc[0].kappa)).unwrap().fprime0.re;
        assert!((nc[0].c_regular - nc[0].s * fp * fp).abs() < 1e-10);
        // Independent oracle: ∫ f² of the matched solution by fine Simpson.
        let kappa = well_kappa();
        let kk = (4.0 - kappa * kappa).sqrt();
        let inside = |x: f64| (-kappa).exp() * ((kk * (x - 1.0)).cos() - kappa / kk * (kk * (x - 1.0)).sin());
        let n = 20000;
        let h = 1.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * inside(i as f64 * h).powi(2);
        }
        let norm = s * h / 3.0 + (-2.0 * kappa).exp() / (2.0 * kappa);
        assert!((nc[0].s_l2 - 1.0 / norm).abs() * norm < 1e-5);
    }

    #[test]
    fn free_scattering_matrix_is_one() {
        let q = Potential::zero(RadialGrid::with_spacing(10.0, 0.05).unwrap());
        let sd = s_matrix(&q, &MomentumGrid::with_spacing(50.0, 0.1).unwrap()).unwrap();
        assert!(sd.s_values().iter().all(|s| (s - 1.0).norm() < 1e-12));
        assert_eq!(sd.s_at_zero_sign(), 1);
    }

    #[test]
    fn sech2_scattering_matrix() {
        let kgrid = MomentumGrid::with_spacing(200.0, 0.05).unwrap();
        let sd = s_matrix(&sech2(), &kgrid).unwrap();
        assert_eq!(sd.s_at_zero_sign(), -1);
        for (i, (k, s)) in kgrid.nodes().iter().zip(sd.s_values()).enumerate() {
            assert!((s.norm() - 1.0).abs() < 1e-8);
            if i != kgrid.zero_index() {
                assert!((s - (k + I) / (k - I)).norm() < 1e-4, "k = {k}");
            }
        }
        let w = winding_number(sd.s_values()).unwrap();
        assert_eq!(w.index, -1);
    }

    #[test]
    fn square_well_index_law() {
        let q = well();
        let sd = s_matrix(&q, &MomentumGrid::with_spacing(200.0, 0.05).unwrap()).unwrap();
        assert_eq!(sd.bound_state_count(), 1);
        assert_eq!(winding_number(sd.s_values()).unwrap().index, -2);
        // Reality: S(-k) S(k) = 1 and S(-k) = conj S(k).
        let kg = sd.kgrid();
        for i in 0..kg.len() {
            let (s, sm) = (sd.s_values()[i], sd.s_values()[kg.mirror(i)]);
            assert!((s * sm - 1.0).norm() < 1e-8);
            assert!((sm - s.conj()).norm() < 1e-8);
        }
    }

    #[test]
    fn trivial_phase_shift() {
        let sd = ScatteringData::trivial(MomentumGrid::with_spacing(10.0, 0.1).unwrap());
        let d = phase_shift(&sd).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_pole_phase_shift() {
        let kgrid = MomentumGrid::with_spacing(200.0, 0.05).unwrap();
        let sd = ScatteringData::from_fn(kgrid.clone(), |k| (k + I) / (k - I), vec![]).unwrap();
        let d = phase_shift(&sd).unwrap();
        let z = kgrid.zero_index();
        // arg((k+i)/(k-i)) = 2 atan(1/k): δ(0⁺) = π/2, δ(k) → 0.
        assert!((d.values[z] - PI / 2.0).abs() < 1e-3);
        let k = kgrid.node(z + 10);
        assert!((d.values[z + 10] - (1.0 / k).atan()).abs() < 1e-12);
        assert!(d.oddness < 1e-8);
        for i in 0..kgrid.len() {
            if i != z {
                assert!((d.values[i] + d.values[kgrid.mirror(i)]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn zero_potential_has_zero_kernel() {
        let q = Potential::zero(RadialGrid::with_spacing(5.0, 0.05).unwrap());
        let a = kernel_from_potential(&q).unwrap();
        assert_eq!(a.max_abs_difference(&TransformationKernel::zero(q.grid().clone())).unwrap(), 0.0);
    }

    #[test]
    fn sech2_kernel_matches_closed_form() {
        let q = sech2();
        let a = kernel_from_potential(&q).unwrap();
        assert!((a.get(0, 0) + 1.0).abs() < 1e-4, "{}", a.get(0, 0));
        let exact = TransformationKernel::from_fn(q.grid().clone(), |x, y| {
            -2.0 * (-(x + y)).exp() / (1.0 + (-2.0 * x).exp())
        });
        let err = a.max_abs_difference(&exact).unwrap();
        assert!(err < 1e-4, "{err}");
        assert!(diagonal_identity_error(&a, &q) < 1e-4);
        assert!(kernel_estimate_ratio(&a, &q) < 10.0);
    }

    #[test]
    fn kernel_transform_reproduces_jost_function() {
        for q in [sech2(), well()] {
            let a = kernel_from_potential(&q).unwrap();
            let row: Vec<Complex64> = a.row(0).iter().map(|&v| c(v, 0.0)).collect();
            for k in [-10.0, -3.3, 0.0, 0.5, 2.0, 7.0, 10.0] {
                let via_kernel = 1.0 + filon(&row, q.grid(), k).unwrap();
                let direct = jost_boundary_at(&q, c(k, 0.0)).unwrap().f0;
                assert!((via_kernel - direct).norm() < 1e-4, "k = {k}: {via_kernel} vs {direct}");
            }
            assert!(kernel_estimate_ratio(&a, &q) < 10.0);
        }
    }

    #[test]
    fn forward_composite_is_consistent() {
        let q = well();
        let opts = ForwardOptions {
            kgrid: MomentumGrid::with_spacing(50.0, 0.05).unwrap(),
            compute_kernel: false,
            ..ForwardOptions::default()
        };
        let res = forward(&q, &opts).unwrap();
        assert_eq!(res.sd.bound_state_count(), 1);
        assert!(res.jost.reflection_deviation() < 1e-14);
        assert!(res.delta.oddness < 1e-8);
        let bound_row = res.jost.rows.iter().find(|r| r.k.im > 0.0).unwrap();
        assert!(bound_row.values[0].norm() < 1e-3);
        assert!(crate::model::validate_scattering_data(&res.sd, 1e-6).is_empty());
    }
}
