use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::UniformGrid;

/// `-ln(1 - u) / u`, equal to `b·∫_b^∞ dt / (t (t - u b))` for a `c/t` tail.
fn tail_factor(u: Complex64) -> Complex64 {
    if u.norm() < 1e-3 {
        1.0 + u / 2.0 + u * u / 3.0 + u * u * u / 4.0
    } else {
        -(1.0 - u).ln() / u
    }
}

/// Contribution of the regions outside the grid when `phi ~ c/t` there.
fn tails(phi: &[Complex64], grid: &UniformGrid, z: Complex64) -> Complex64 {
    let (a, b) = (grid.start(), grid.end());
    let mut out = Complex64::new(0.0, 0.0);
    if b > 0.0 {
        out += phi[phi.len() - 1] * tail_factor(z / b);
    }
    if a < 0.0 {
        out -= phi[0] * tail_factor(z / a);
    }
    out
}

fn check_len(phi: &[Complex64], grid: &UniformGrid) -> Result<()> {
    if phi.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: phi.len(),
        });
    }
    if phi.len() < 4 {
        return Err(Error::InvalidGrid("Cauchy integrals need at least 4 nodes".into()));
    }
    Ok(())
}

/// Principal value `v.p. ∫ phi(t) / (t - k0) dt` over the grid.
///
/// Singularity subtraction: the trapezoid rule is applied to
/// `(phi(t) - phi(k0)) / (t - k0)` and `phi(k0) ln((b - k0)/(k0 - a))` is
/// added back. With `tail`, the integral beyond the grid is included
/// assuming `phi ~ c/t` outside.
pub fn pv_cauchy(phi: &[Complex64], grid: &UniformGrid, k0: f64, tail: bool) -> Result<Complex64> {
    check_len(phi, grid)?;
    let (a, b, h, n) = (grid.start(), grid.end(), grid.step(), grid.len());
    if !(k0 > a && k0 < b) {
        return Err(Error::InvalidInput(format!(
            "principal value point {k0} not strictly inside [{a}, {b}]"
        )));
    }
    let pos = (k0 - a) / h;
    let j = pos.round();
    let mut sum = Complex64::new(0.0, 0.0);
    let phi0 = if (pos - j).abs() < 1e-9 && j >= 1.0 && (j as usize) < n - 1 {
        let j = j as usize;
        for i in 0..n {
            let v = if i == j {
                node_derivative(phi, j, h)
            } else {
                (phi[i] - phi[j]) / (grid.node(i) - k0)
            };
            sum += v * trapezoid_weight(i, n, h);
        }
        phi[j]
    } else {
        // Off-node: the cubic through the four surrounding nodes supplies
        // phi(k0) and, via exact divided differences, the integrand at those
        // nodes without cancellation.
        let local = LocalCubic::new(phi, n, pos);
        let phi0 = local.value();
        for i in 0..n {
            let v = match local.divided_difference(i) {
                Some(d) => d / h,
                None => (phi[i] - phi0) / (grid.node(i) - k0),
            };
            sum += v * trapezoid_weight(i, n, h);
        }
        phi0
    };
    sum += phi0 * ((b - k0) / (k0 - a)).ln();
    if tail {
        sum += tails(phi, grid, Complex64::new(k0, 0.0));
    }
    Ok(sum)
}

/// [`pv_cauchy`] at every interior node (ends get zero).
pub fn pv_cauchy_nodes(phi: &[Complex64], grid: &UniformGrid, tail: bool) -> Result<Vec<Complex64>> {
    check_len(phi, grid)?;
    let n = grid.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            if i == 0 || i == n - 1 {
                Ok(Complex64::new(0.0, 0.0))
            } else {
                pv_cauchy(phi, grid, grid.node(i), tail)
            }
        })
        .collect()
}

/// `∫ phi(t) / (t - z) dt` for `z` off the real axis, with `phi` taken
/// piecewise linear and each cell integrated exactly.
pub fn cauchy_integral(phi: &[Complex64], grid: &UniformGrid, z: Complex64, tail: bool) -> Result<Complex64> {
    check_len(phi, grid)?;
    if z.im == 0.0 {
        return Err(Error::InvalidInput("Cauchy integral point lies on the real axis".into()));
    }
    let h = grid.step();
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..grid.len() - 1 {
        let (t0, t1) = (grid.node(i), grid.node(i + 1));
        let beta = (phi[i + 1] - phi[i]) / h;
        let alpha = phi[i] + beta * (z - t0);
        sum += alpha * ((t1 - z) / (t0 - z)).ln() + beta * h;
    }
    if tail {
        sum += tails(phi, grid, z);
    }
    Ok(sum)
}

fn trapezoid_weight(i: usize, n: usize, h: f64) -> f64 {
    if i == 0 || i == n - 1 {
        0.5 * h
    } else {
        h
    }
}

fn node_derivative(phi: &[Complex64], j: usize, h: f64) -> Complex64 {
    if j >= 2 && j + 2 < phi.len() {
        (phi[j - 2] - 8.0 * phi[j - 1] + 8.0 * phi[j + 1] - phi[j + 2]) / (12.0 * h)
    } else {
        (phi[j + 1] - phi[j - 1]) / (2.0 * h)
    }
}

/// Newton-form cubic through nodes `base..base + 4`, in the local variable
/// `s = pos - base` (units of the grid step).
struct LocalCubic {
    base: usize,
    s0: f64,
    d: [Complex64; 4],
}

impl LocalCubic {
    fn new(phi: &[Complex64], n: usize, pos: f64) -> Self {
        let base = (pos.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let f = &phi[base..base + 4];
        let d1 = f[1] - f[0];
        let d2 = f[2] - 2.0 * f[1] + f[0];
        let d3 = f[3] - 3.0 * f[2] + 3.0 * f[1] - f[0];
        LocalCubic {
            base,
            s0: pos - base as f64,
            d: [f[0], d1, d2 / 2.0, d3 / 6.0],
        }
    }

    fn value(&self) -> Complex64 {
        let s = self.s0;
        self.d[0] + self.d[1] * s + self.d[2] * (s * (s - 1.0)) + self.d[3] * (s * (s - 1.0) * (s - 2.0))
    }

    /// `(p(s_i) - p(s0)) / (s_i - s0)` for stencil nodes.
    fn divided_difference(&self, i: usize) -> Option<Complex64> {
        if i < self.base || i >= self.base + 4 {
            return None;
        }
        let (s, s0) = ((i - self.base) as f64, self.s0);
        Some(
            self.d[1]
                + self.d[2] * (s + s0 - 1.0)
                + self.d[3] * (s * s + s * s0 + s0 * s0 - 3.0 * (s + s0) + 2.0),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MomentumGrid;
    use std::f64::consts::PI;

    fn grid(k_max: f64, dk: f64) -> MomentumGrid {
        MomentumGrid::with_spacing(k_max, dk).unwrap()
    }

    fn sample(g: &MomentumGrid, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        g.nodes().into_iter().map(f).collect()
    }

    #[test]
    fn odd_integrands_vanish() {
        let g = grid(200.0, 0.05);
        let one = sample(&g, |_| Complex64::new(1.0, 0.0));
        assert!(pv_cauchy(&one, &g, 0.0, false).unwrap().norm() < 1e-10);
        let lorentz = sample(&g, |t| Complex64::new(1.0 / (t * t + 1.0), 0.0));
        assert!(pv_cauchy(&lorentz, &g, 0.0, true).unwrap().norm() < 1e-8);
    }

    #[test]
    fn arctangent_integral_with_tail() {
        let g = grid(200.0, 0.05);
        let phi = sample(&g, |t| Complex64::new(t / (t * t + 1.0), 0.0));
        let v = pv_cauchy(&phi, &g, 0.0, true).unwrap();
        assert!((v.re - PI).abs() < 1e-4, "{v}");
        // Without the tail the truncation error is 2/k_max.
        let bare = pv_cauchy(&phi, &g, 0.0, false).unwrap();
        assert!((bare.re - (PI - 0.01)).abs() < 1e-4);
    }

    #[test]
    fn lower_analytic_function_oracle() {
        let g = grid(200.0, 0.05);
        let two_i = Complex64::new(0.0, 2.0);
        let phi = sample(&g, |t| 1.0 / (t - two_i));
        for k0 in [0.0, 0.7, -3.0, 10.0, 0.3125] {
            let v = pv_cauchy(&phi, &g, k0, true).unwrap();
            let exact = -Complex64::i() * PI / (k0 - two_i);
            assert!((v - exact).norm() < 1e-4, "{k0}: {v} vs {exact}");
        }
    }

    #[test]
    fn endpoint_is_rejected() {
        let g = grid(10.0, 0.5);
        let phi = sample(&g, |_| Complex64::new(1.0, 0.0));
        assert!(pv_cauchy(&phi, &g, 10.0, false).is_err());
        assert!(pv_cauchy(&phi, &g, -11.0, false).is_err());
    }

    #[test]
    fn off_axis_residue_oracle() {
        let g = grid(200.0, 0.05);
        let phi = sample(&g, |t| 1.0 / (t - Complex64::new(0.0, 2.0)));
        // Closing in the upper half-plane picks up only the pole at 2i.
        let v = cauchy_integral(&phi, &g, Complex64::new(0.0, -1.0), true).unwrap();
        assert!((v - 2.0 * PI / 3.0).norm() < 1e-4, "{v}");
        let w = cauchy_integral(&phi, &g, Complex64::new(0.5, 1.0), true).unwrap();
        assert!(w.norm() < 1e-4, "{w}");
    }

    #[test]
    fn node_and_interpolated_paths_agree() {
        let g = grid(50.0, 0.1);
        let phi = sample(&g, |t| Complex64::new((-t * t / 8.0).exp(), t / (t * t + 4.0)));
        let at_node = pv_cauchy(&phi, &g, 1.0, true).unwrap();
        let nearby = pv_cauchy(&phi, &g, 1.0 + 1e-7, true).unwrap();
        assert!((at_node - nearby).norm() < 1e-5);
    }
}
