//! Scattering data to `F` and back.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BoundState, MarchenkoInput, MomentumGrid, ScatteringData, UniformGrid};
use crate::numkit::{fourier_space_to_kernel_many, FourierOptions, SpectralSynthesis};

/// Imaginary synthesis residual, relative to `max(1, max|F_s|)`, beyond which
/// the input is declared not conjugate-symmetric.
pub const IMAG_RESIDUAL_TOL: f64 = 1e-6;

/// A peeled remainder is fitted only where it exceeds this fraction of `F`.
const PEEL_DOMINANCE: f64 = 1e-3;

/// Relative rounding error assumed for `F - F_d`.
const ROUNDING: f64 = 64.0 * f64::EPSILON;

/// `F = F_s + F_d` on `[x_lo, x_hi]` at spacing `dx`, with
/// `F_s = (1/2π) ∫ (1 - S) e^{ikx} dk` and `F_d = Σ s_j e^{-κ_j x}`.
#[allow(non_snake_case)]
pub fn build_F(sd: &ScatteringData, x_lo: f64, x_hi: f64, dx: f64, options: FourierOptions) -> Result<MarchenkoInput> {
    let xgrid = UniformGrid::with_spacing(x_lo, x_hi, dx)?;
    let h: Vec<Complex64> = sd.s_values().iter().map(|s| 1.0 - s).collect();
    let synth = SpectralSynthesis::new(&h, sd.kgrid(), options)?;
    let xs = xgrid.nodes();
    let values = synth.eval_many(&xs);
    let fs: Vec<f64> = values.iter().map(|v| v.value).collect();
    let scale = fs.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let imag = values.iter().fold(0.0_f64, |m, v| m.max(v.imag_residual.abs()));
    if imag > IMAG_RESIDUAL_TOL * scale {
        return Err(Error::ComplexResidual(imag));
    }
    let fd: Vec<f64> = xs
        .iter()
        .map(|&x| sd.bound_states().iter().map(|b| b.s * (-b.kappa * x).exp()).sum())
        .collect();
    MarchenkoInput::new(xgrid, fs, fd, imag)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionOptions {
    /// Fraction of the window, from its negative end, used for fitting.
    pub window_fraction: f64,
    /// Stripping stops once `|F - F_d| <= stripping_tol·|F| + noise_floor`
    /// everywhere on the fitting window.
    pub stripping_tol: f64,
    pub noise_floor: f64,
    /// Fitted `κ`s closer than this are refused as unresolvable.
    pub min_kappa_gap: f64,
    pub max_states: usize,
}

impl Default for ExtractionOptions {
    fn default() -> Self {
        Self {
            window_fraction: 0.25,
            stripping_tol: 1e-6,
            noise_floor: 1e-5,
            min_kappa_gap: 1e-2,
            max_states: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub sd: ScatteringData,
    /// Jump `F_s(0⁺) - F_s(0⁻)`, removed analytically before transforming.
    pub jump: f64,
    /// `sup |F - F_d|` on the fitting window after the last strip.
    pub remainder: f64,
}

/// Line fit `y ≈ c0 + c1 x`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    let c1 = (n * sxy - sx * sy) / det;
    ((sy - c1 * sx) / n, c1)
}

fn model(states: &[BoundState], x: f64) -> f64 {
    states.iter().map(|b| b.s * (-b.kappa * x).exp()).sum()
}

/// Gauss–Newton on `Σ (ln F_d(x) - ln F(x))²` over `(κ_j, ln s_j)`.
fn refine(states: &mut [BoundState], xs: &[f64], fs: &[f64]) {
    let m = 2 * states.len();
    for _ in 0..50 {
        let mut jtj = nalgebra::DMatrix::<f64>::zeros(m, m);
        let mut jtr = nalgebra::DVector::<f64>::zeros(m);
        let mut valid = true;
        for (&x, &f) in xs.iter().zip(fs) {
            let total = model(states, x);
            if !(total > 0.0 && f > 0.0) {
                valid = false;
                break;
            }
            let r = total.ln() - f.ln();
            let mut row = vec![0.0; m];
            for (j, b) in states.iter().enumerate() {
                let term = b.s * (-b.kappa * x).exp() / total;
                row[2 * j] = -x * term;
                row[2 * j + 1] = term;
            }
            for a in 0..m {
                jtr[a] += row[a] * r;
                for c in 0..m {
                    jtj[(a, c)] += row[a] * row[c];
                }
            }
        }
        if !valid {
            return;
        }
        let Some(step) = jtj.lu().solve(&jtr) else { return };
        let mut size = 0.0_f64;
        for (j, b) in states.iter_mut().enumerate() {
            b.kappa -= step[2 * j];
            b.s *= (-step[2 * j + 1]).exp();
            size = size.max(step[2 * j].abs()).max(step[2 * j + 1].abs());
        }
        if size < 1e-14 {
            return;
        }
    }
}

/// Recover `{S, κ_j, s_j}` from `F` sampled on a window reaching far into
/// `x < 0`, where `F_d` dominates.
///
/// Exponentials are stripped one at a time from log-linear fits on the most
/// negative part of the window, then refined jointly. The jump of `F_s` at
/// the origin is estimated from both sides and transformed in closed form as
/// `J₀/(1 + ik)`; the continuous remainder goes through the piecewise-linear
/// transform.
pub fn extract_data_from_f(f: &MarchenkoInput, kgrid: &MomentumGrid, options: &ExtractionOptions) -> Result<Extraction> {
    let grid = &f.xgrid;
    let (x_lo, x_hi) = (grid.start(), grid.end());
    let zero = grid
        .index_of(0.0)
        .ok_or_else(|| Error::InvalidGrid("extraction window must contain x = 0 as a node".into()))?;
    if zero < 4 || zero + 4 > grid.len() {
        return Err(Error::InvalidGrid("extraction window must extend on both sides of x = 0".into()));
    }
    let cut = (x_lo + options.window_fraction * (x_hi - x_lo)).min(-grid.step());
    let window: Vec<usize> = (0..grid.len()).filter(|&i| grid.node(i) <= cut).collect();
    if window.len() < 8 {
        return Err(Error::Stripping("window too narrow".into()));
    }
    let xs: Vec<f64> = window.iter().map(|&i| grid.node(i)).collect();
    let fw: Vec<f64> = window.iter().map(|&i| f.f_values[i]).collect();
    // Remainder measured against the stopping rule: <= 1 means done.
    let excess = |states: &[BoundState]| -> (f64, f64) {
        let mut worst = 0.0_f64;
        let mut sup = 0.0_f64;
        for (&x, &v) in xs.iter().zip(&fw) {
            let r = (v - model(states, x)).abs();
            sup = sup.max(r);
            worst = worst.max(r / (options.stripping_tol * v.abs() + options.noise_floor));
        }
        (worst, sup)
    };

    // Peeling: each new exponential is fitted where the remainder of the
    // previous fits dominates F, i.e. progressively closer to x = 0. The
    // peeled estimates then seed a joint refinement that decides when to stop.
    let mut peeled: Vec<BoundState> = Vec::new();
    let mut states: Vec<BoundState> = Vec::new();
    let (mut worst, mut remainder) = excess(&states);
    while worst > 1.0 {
        if peeled.len() == options.max_states {
            return Err(Error::Stripping(format!(
                "remainder {remainder:.3e} left after {} exponentials",
                options.max_states
            )));
        }
        let resid: Vec<f64> = xs.iter().zip(&fw).map(|(&x, &v)| v - model(&peeled, x)).collect();
        let (lo, hi) = if peeled.is_empty() {
            // Most negative stretch, up to half the window.
            let lead = resid.iter().take_while(|&&r| r > 0.0).count();
            (0, lead.min((xs.len() / 2).max(4)))
        } else {
            let tail = resid
                .iter()
                .zip(&fw)
                .rev()
                .take_while(|(&r, &v)| r > 0.0 && r > PEEL_DOMINANCE * v.abs())
                .count();
            (xs.len() - tail, xs.len())
        };
        if hi - lo < 4 {
            return Err(Error::Stripping(format!(
                "remainder {remainder:.3e} is not a growing exponential; window too narrow"
            )));
        }
        let ln_r: Vec<f64> = resid[lo..hi].iter().map(|r| r.ln()).collect();
        let (c0, c1) = line_fit(&xs[lo..hi], &ln_r);
        let kappa = -c1;
        if !(kappa > 0.0) {
            return Err(Error::Stripping(format!("fitted kappa {kappa} is not positive")));
        }
        if let Some(prev) = peeled.last() {
            if !(kappa < prev.kappa) {
                return Err(Error::Stripping(format!(
                    "recovered kappa {kappa} not below previous {}",
                    prev.kappa
                )));
            }
            if prev.kappa - kappa < options.min_kappa_gap {
                return Err(Error::Stripping(format!(
                    "kappas {kappa} and {} closer than {}",
                    prev.kappa, options.min_kappa_gap
                )));
            }
        }
        peeled.push(BoundState::new(kappa, c0.exp()));
        states = peeled.clone();
        refine(&mut states, &xs, &fw);
        let (w, r) = excess(&states);
        if w > worst {
            return Err(Error::Stripping("non-monotone residual growth; window too narrow".into()));
        }
        worst = w;
        remainder = r;
    }
    if states.windows(2).any(|w| w[0].kappa - w[1].kappa < options.min_kappa_gap) {
        return Err(Error::Stripping("refined kappas not separated".into()));
    }

    // F_s on the whole window, jump removed.
    let nodes = grid.nodes();
    let mut fs: Vec<f64> = nodes
        .iter()
        .zip(&f.f_values)
        .map(|(&x, &v)| v - model(&states, x))
        .collect();
    // Far out on x < 0, F - F_d is rounding noise of F_d; drop it there.
    if let Some(last) = (0..zero).rev().find(|&i| ROUNDING * f.f_values[i].abs() > options.noise_floor) {
        fs[..=last].iter_mut().for_each(|v| *v = 0.0);
    }
    let right = 3.0 * fs[zero + 1] - 3.0 * fs[zero + 2] + fs[zero + 3];
    let left = 3.0 * fs[zero - 1] - 3.0 * fs[zero - 2] + fs[zero - 3];
    let jump = right - left;
    for (i, v) in fs.iter_mut().enumerate() {
        if i > zero {
            *v -= jump * (-nodes[i]).exp();
        }
    }
    fs[zero] = left;
    let ft = fourier_space_to_kernel_many(&fs, grid, kgrid)?;
    let s_values: Vec<Complex64> = kgrid
        .nodes()
        .par_iter()
        .zip(ft.par_iter())
        .map(|(&k, t)| 1.0 - t - jump / Complex64::new(1.0, k))
        .collect();
    let z = kgrid.zero_index();
    let sign = if s_values[z].re < 0.0 { -1 } else { 1 };
    Ok(Extraction {
        sd: ScatteringData::new(kgrid.clone(), s_values, states, sign)?,
        jump,
        remainder,
    })
}
