//! Oscillatory integrals between momentum and position space.
//!
//! `x → k` transforms integrate the piecewise-linear interpolant of the
//! samples against `e^{-ikx}` exactly, so their accuracy does not degrade when
//! `k Δx` is of order one. `k → x` synthesis uses tapered trapezoid weights
//! after removing a fitted `(iαk + γ)/(k² + 1)` tail whose transform is known
//! in closed form; that captures the `1/k` decay of `1 - S(k)` and with it the
//! jump of `F_s` at the origin.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{MomentumGrid, UniformGrid};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Below this `|z|` the cell weights are summed from their power series.
const SERIES_RADIUS: f64 = 0.5;
const SERIES_TERMS: usize = 24;

/// Recompute the running phase from scratch this often.
const RESEED: usize = 256;

/// Exact integrals of `e^{ωu}` and of the two-point kernel
/// `(e^{ωu} - 1)/ω` against the hat functions of one cell `[0, h]`,
/// with `z = ω h` complex.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CellWeights {
    /// `∫ e^{ωu} (1 - u/h) du`
    pub a: Complex64,
    /// `∫ e^{ωu} (u/h) du`
    pub b: Complex64,
    /// `∫ (e^{ωu} - 1)/ω (1 - u/h) du`
    pub ka: Complex64,
    /// `∫ (e^{ωu} - 1)/ω (u/h) du`
    pub kb: Complex64,
    /// `(e^{ωh} - 1)/ω`
    pub k_step: Complex64,
    /// `e^{ωh}`
    pub shift: Complex64,
}

impl CellWeights {
    pub fn new(omega: Complex64, h: f64) -> Self {
        let z = omega * h;
        let shift = z.exp();
        if z.norm() < SERIES_RADIUS {
            // E1 = Σ zⁿ/(n+1)!, E2 = Σ zⁿ/(n!(n+2)),
            // KA = Σ zⁿ/((n+1)!(n+2)(n+3)), KB = Σ zⁿ/((n+1)!(n+3)).
            let mut e1 = Complex64::new(0.0, 0.0);
            let mut e2 = e1;
            let mut ka = e1;
            let mut kb = e1;
            let mut zn = Complex64::new(1.0, 0.0);
            let mut fact_n = 1.0;
            for n in 0..SERIES_TERMS {
                let nf = n as f64;
                let fact_n1 = fact_n * (nf + 1.0);
                e1 += zn / fact_n1;
                e2 += zn / (fact_n * (nf + 2.0));
                ka += zn / (fact_n1 * (nf + 2.0) * (nf + 3.0));
                kb += zn / (fact_n1 * (nf + 3.0));
                zn *= z;
                fact_n = fact_n1;
            }
            Self {
                a: (e1 - e2) * h,
                b: e2 * h,
                ka: ka * h * h,
                kb: kb * h * h,
                k_step: e1 * h,
                shift,
            }
        } else {
            let e1 = (shift - 1.0) / z;
            let e2 = (shift * (z - 1.0) + 1.0) / (z * z);
            let a = (e1 - e2) * h;
            let b = e2 * h;
            Self {
                a,
                b,
                ka: (a - 0.5 * h) * h / z,
                kb: (b - 0.5 * h) * h / z,
                k_step: e1 * h,
                shift,
            }
        }
    }
}

/// `∫ s(t) e^{iωt} dt` over `grid`, exact for the piecewise-linear
/// interpolant of the samples.
pub fn filon(samples: &[Complex64], grid: &UniformGrid, omega: f64) -> Result<Complex64> {
    filon_exp(samples, grid, I * omega)
}

/// `∫ s(t) e^{zt} dt` for complex `z`, exact for the piecewise-linear
/// interpolant. With `Re z <= 0` on a grid starting at 0 the running factor
/// never overflows.
pub fn filon_exp(samples: &[Complex64], grid: &UniformGrid, z: Complex64) -> Result<Complex64> {
    if samples.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: samples.len(),
        });
    }
    let h = grid.step();
    let w = CellWeights::new(z, h);
    let rot = (z * h).exp();
    let mut phase = (z * grid.start()).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..samples.len() - 1 {
        if j % RESEED == 0 {
            phase = (z * grid.node(j)).exp();
        }
        acc += phase * (w.a * samples[j] + w.b * samples[j + 1]);
        phase *= rot;
    }
    Ok(acc)
}

/// `∫ F_s(x) e^{-ikx} dx` over the sampled window (the transform that
/// returns `1 - S(k)`).
pub fn fourier_space_to_kernel(fs: &[f64], grid: &UniformGrid, k: f64) -> Result<Complex64> {
    let samples: Vec<Complex64> = fs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    filon(&samples, grid, -k)
}

/// [`fourier_space_to_kernel`] on every node of `kgrid`, in parallel.
pub fn fourier_space_to_kernel_many(
    fs: &[f64],
    grid: &UniformGrid,
    kgrid: &MomentumGrid,
) -> Result<Vec<Complex64>> {
    if fs.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: fs.len(),
        });
    }
    let samples: Vec<Complex64> = fs.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let ks = kgrid.nodes();
    ks.par_iter()
        .map(|&k| filon(&samples, grid, -k))
        .collect()
}

/// How the tail model's sign function is evaluated at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OriginConvention {
    /// Mean of the one-sided limits (what a symmetric Fourier integral gives).
    #[default]
    Mean,
    /// Limit from `x > 0`, for half-line use.
    RightLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierOptions {
    /// Fraction of `[0, k_max]` over which a raised-cosine taper rolls off.
    pub taper_fraction: f64,
    /// Subtract the fitted `(iαk + γ)/(k² + 1)` tail and add its exact transform.
    pub tail_model: bool,
    pub origin: OriginConvention,
}

impl Default for FourierOptions {
    fn default() -> Self {
        Self {
            taper_fraction: 0.1,
            tail_model: true,
            origin: OriginConvention::Mean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierValue {
    pub value: f64,
    /// Imaginary part of the synthesis; zero for conjugate-symmetric input.
    pub imag_residual: f64,
}

/// Fitted large-`k` behaviour `h(k) ≈ (iαk + γ)/(k² + 1) + c₀`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpectralTail {
    pub alpha: f64,
    pub gamma: f64,
    pub offset: f64,
}

impl SpectralTail {
    /// Least-squares fit on `k_max/2 <= |k| <= k_max`.
    pub fn fit(h: &[Complex64], kgrid: &MomentumGrid) -> Self {
        let k_max = kgrid.k_max();
        let (mut s_im, mut s_phi) = (0.0, 0.0);
        // Normal equations for Re h = γ u + c₀, u = 1/(k²+1).
        let (mut suu, mut su, mut s1, mut sur, mut sr) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (i, v) in h.iter().enumerate() {
            let k = kgrid.node(i);
            if k.abs() < 0.5 * k_max {
                continue;
            }
            let phi = k / (k * k + 1.0);
            s_im += v.im * phi;
            s_phi += phi * phi;
            let u = 1.0 / (k * k + 1.0);
            suu += u * u;
            su += u;
            s1 += 1.0;
            sur += u * v.re;
            sr += v.re;
        }
        if s_phi == 0.0 || s1 < 3.0 {
            return Self::default();
        }
        let alpha = s_im / s_phi;
        let det = suu * s1 - su * su;
        let (gamma, offset) = if det.abs() > 1e-300 {
            ((sur * s1 - su * sr) / det, (suu * sr - su * sur) / det)
        } else {
            (0.0, sr / s1)
        };
        Self {
            alpha,
            gamma,
            offset,
        }
    }

    pub fn spectrum(&self, k: f64) -> Complex64 {
        Complex64::new(self.gamma, self.alpha * k) / (k * k + 1.0)
    }

    /// `(1/2π) ∫ (iαk + γ)/(k² + 1) e^{ikx} dk`.
    pub fn transform(&self, x: f64, origin: OriginConvention) -> f64 {
        let sign = if x > 0.0 {
            1.0
        } else if x < 0.0 {
            -1.0
        } else {
            match origin {
                OriginConvention::Mean => 0.0,
                OriginConvention::RightLimit => 1.0,
            }
        };
        let decay = (-x.abs()).exp();
        -0.5 * self.alpha * sign * decay + 0.5 * self.gamma * decay
    }
}

/// Precomputed `k → x` synthesis `(1/2π) ∫ h(k) e^{ikx} dk` for a fixed
/// spectrum; evaluate at as many `x` as needed.
#[derive(Debug, Clone)]
pub struct SpectralSynthesis {
    kgrid: MomentumGrid,
    weighted: Vec<Complex64>,
    tail: SpectralTail,
    options: FourierOptions,
}

impl SpectralSynthesis {
    pub fn new(h: &[Complex64], kgrid: &MomentumGrid, options: FourierOptions) -> Result<Self> {
        if h.len() != kgrid.len() {
            return Err(Error::LengthMismatch {
                expected: kgrid.len(),
                found: h.len(),
            });
        }
        let tail = if options.tail_model {
            SpectralTail::fit(h, kgrid)
        } else {
            SpectralTail::default()
        };
        let k_max = kgrid.k_max();
        let dk = kgrid.step();
        let taper_start = (1.0 - options.taper_fraction.clamp(0.0, 1.0)) * k_max;
        let n = kgrid.len();
        let weighted = (0..n)
            .map(|i| {
                let k = kgrid.node(i);
                let residual = h[i] - tail.spectrum(k);
                let mut w = if i == 0 || i == n - 1 { 0.5 * dk } else { dk };
                if options.taper_fraction > 0.0 && k.abs() > taper_start {
                    let t = (k.abs() - taper_start) / (k_max - taper_start);
                    w *= 0.5 * (1.0 + (PI * t).cos());
                }
                residual * (w / (2.0 * PI))
            })
            .collect();
        Ok(Self {
            kgrid: kgrid.clone(),
            weighted,
            tail,
            options,
        })
    }

    pub fn tail(&self) -> SpectralTail {
        self.tail
    }

    pub fn eval(&self, x: f64) -> FourierValue {
        let dk = self.kgrid.step();
        let rot = Complex64::from_polar(1.0, x * dk);
        let mut phase = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, w) in self.weighted.iter().enumerate() {
            if i % RESEED == 0 {
                phase = Complex64::from_polar(1.0, x * self.kgrid.node(i));
            }
            acc += w * phase;
            phase *= rot;
        }
        let model = if self.options.tail_model {
            self.tail.transform(x, self.options.origin)
        } else {
            0.0
        };
        FourierValue {
            value: acc.re + model,
            imag_residual: acc.im,
        }
    }

    pub fn eval_many(&self, xs: &[f64]) -> Vec<FourierValue> {
        xs.par_iter().map(|&x| self.eval(x)).collect()
    }
}

/// `(1/2π) ∫ h(k) e^{ikx} dk` for a conjugate-symmetric spectrum sampled on
/// `kgrid`.
pub fn fourier_kernel_to_space(
    h: &[Complex64],
    kgrid: &MomentumGrid,
    x: f64,
    options: FourierOptions,
) -> Result<FourierValue> {
    Ok(SpectralSynthesis::new(h, kgrid, options)?.eval(x))
}
