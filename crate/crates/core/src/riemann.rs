//! Jost function from `S(k)` and the bound-state locations alone.
//!
//! `f(k) = S(-k) f(-k)` on the real axis is a scalar Riemann problem. The
//! zeros `iκ_j` are divided out with a Blaschke product `w`, which leaves
//! `φ₊ = g φ₋` with `g = S(-k)/w(k)²` of index zero. `ln g` is then single
//! valued and `φ₊` is its exponentiated Cauchy integral. A zero-energy
//! resonance (`S(0) = -1`) adds the factor `k/(k + iκ₀)` to the Blaschke
//! product, so `g` picks up `(k + iκ₀)/(k - iκ₀)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{MomentumGrid, ScatteringData};
use crate::numkit::{cauchy_integral, pv_cauchy_nodes, unwrap_phase, winding_number};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `w(k) = Π (k - iκ_j)/(k + iκ_j)`.
pub fn blaschke(kappas: &[f64], k: Complex64) -> Result<Complex64> {
    let mut w = Complex64::new(1.0, 0.0);
    for &kappa in kappas {
        if !(kappa > 0.0) {
            return Err(Error::InvalidInput(format!("Blaschke zero kappa = {kappa} must be positive")));
        }
        let den = k + I * kappa;
        if den.norm() == 0.0 {
            return Err(Error::InvalidInput(format!("k = -i{kappa} is a pole of the Blaschke product")));
        }
        w *= (k - I * kappa) / den;
    }
    Ok(w)
}

/// `w₀(k) = w(k)·k/(k + iκ₀)`.
pub fn blaschke_shifted(kappas: &[f64], kappa_shift: f64, k: Complex64) -> Result<Complex64> {
    if !(kappa_shift > 0.0) {
        return Err(Error::InvalidInput(format!("kappa shift {kappa_shift} must be positive")));
    }
    if kappas.contains(&kappa_shift) {
        return Err(Error::InvalidInput(format!("kappa shift {kappa_shift} coincides with a bound state")));
    }
    let den = k + I * kappa_shift;
    if den.norm() == 0.0 {
        return Err(Error::InvalidInput(format!("k = -i{kappa_shift} is a pole of w0")));
    }
    Ok(blaschke(kappas, k)? * k / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RiemannCase {
    Generic,
    Resonance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannOptions {
    /// `κ₀` in the resonance factor; `1 + max κ_j` when absent.
    pub kappa_shift: Option<f64>,
    /// Add the exterior of the Cauchy integral under a `c/k` model of `ln g`.
    pub tail_correction: bool,
}

impl Default for RiemannOptions {
    fn default() -> Self {
        Self {
            kappa_shift: None,
            tail_correction: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RiemannSolution {
    pub kgrid: MomentumGrid,
    pub f0: Vec<Complex64>,
    /// Boundary values `φ₊(k + i0)`.
    pub phi_plus: Vec<Complex64>,
    /// Continuous `ln g` (purely imaginary).
    pub log_g: Vec<Complex64>,
    pub index: i64,
    pub case: RiemannCase,
    pub kappas: Vec<f64>,
    pub kappa_shift: f64,
    tail_correction: bool,
}

impl RiemannSolution {
    fn factor(&self, z: Complex64) -> Result<Complex64> {
        match self.case {
            RiemannCase::Generic => blaschke(&self.kappas, z),
            RiemannCase::Resonance => blaschke_shifted(&self.kappas, self.kappa_shift, z),
        }
    }

    /// `f(z) = w(z) exp[(1/2πi) ∫ ln g(t)/(t - z) dt]` for `Im z > 0`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if !(z.im > 0.0) {
            return Err(Error::InvalidInput(format!("f(z) continuation needs Im z > 0, got {z}")));
        }
        let c = cauchy_integral(&self.log_g, self.kgrid.uniform(), z, self.tail_correction)?;
        Ok(self.factor(z)? * (c / (2.0 * std::f64::consts::PI * I)).exp())
    }
}

/// Solve the Riemann problem for the Jost function of `sd`.
pub fn solve_riemann(sd: &ScatteringData, options: &RiemannOptions) -> Result<RiemannSolution> {
    let kgrid = sd.kgrid().clone();
    let kappas: Vec<f64> = sd.bound_states().iter().map(|b| b.kappa).collect();
    let j = kappas.len() as i64;
    let s = sd.s_values();
    if let Some(i) = s.iter().position(|v| v.norm() == 0.0) {
        return Err(Error::ZeroSample { index: i });
    }
    let w = winding_number(s)?;
    let case = if sd.is_resonant() {
        RiemannCase::Resonance
    } else {
        RiemannCase::Generic
    };
    let expected = match case {
        RiemannCase::Generic => -2 * j,
        RiemannCase::Resonance => -2 * j - 1,
    };
    if w.index != expected {
        return Err(Error::IndexMismatch {
            index: w.index,
            bound_states: kappas.len(),
        });
    }
    let kappa_shift = options
        .kappa_shift
        .unwrap_or_else(|| 1.0 + kappas.iter().copied().fold(0.0, f64::max));
    if case == RiemannCase::Resonance {
        blaschke_shifted(&kappas, kappa_shift, I)?;
    }

    let n = kgrid.len();
    let g: Vec<Complex64> = (0..n)
        .map(|i| {
            let k = Complex64::new(kgrid.node(i), 0.0);
            let s_minus = s[kgrid.mirror(i)];
            let wk = blaschke(&kappas, k)?;
            let mut v = s_minus / (wk * wk);
            if case == RiemannCase::Resonance {
                v *= (k + I * kappa_shift) / (k - I * kappa_shift);
            }
            Ok(v / v.norm())
        })
        .collect::<Result<_>>()?;
    let gw = winding_number(&g)?;
    if gw.index != 0 {
        return Err(Error::IndexMismatch {
            index: w.index,
            bound_states: kappas.len(),
        });
    }
    let log_g: Vec<Complex64> = unwrap_phase(&g)?.into_iter().map(|t| I * t).collect();

    let mut pv = pv_cauchy_nodes(&log_g, kgrid.uniform(), options.tail_correction)?;
    // The end nodes carry no principal value; extend linearly from inside.
    pv[0] = 2.0 * pv[1] - pv[2];
    pv[n - 1] = 2.0 * pv[n - 2] - pv[n - 3];
    let two_pi_i = 2.0 * std::f64::consts::PI * I;
    let phi_plus: Vec<Complex64> = pv
        .iter()
        .zip(&log_g)
        .map(|(p, l)| (p / two_pi_i + 0.5 * l).exp())
        .collect();
    let mut sol = RiemannSolution {
        kgrid,
        f0: Vec::new(),
        phi_plus,
        log_g,
        index: w.index,
        case,
        kappas,
        kappa_shift,
        tail_correction: options.tail_correction,
    };
    sol.f0 = (0..n)
        .into_par_iter()
        .map(|i| Ok(sol.factor(Complex64::new(sol.kgrid.node(i), 0.0))? * sol.phi_plus[i]))
        .collect::<Result<_>>()?;
    Ok(sol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationReport {
    /// `max |S(k) f(k) - f(-k)|`.
    pub relation_residual: f64,
    /// `max |f(-k) - conj f(k)|`.
    pub reflection_residual: f64,
    /// `|f(iκ_j)|` from the continuation into the upper half-plane.
    pub zero_residuals: Vec<f64>,
    /// `max |f(±k_max) - 1|`.
    pub tail_residual: f64,
    /// `max ||φ₊| - 1|`. Diagnostic only: `|φ₊| = |f|` on the real axis.
    pub phi_modulus_deviation: f64,
    pub index: i64,
    pub case: RiemannCase,
}

pub fn verify_factorization(sol: &RiemannSolution, sd: &ScatteringData) -> Result<FactorizationReport> {
    let kg = &sol.kgrid;
    let n = kg.len();
    if sd.kgrid().len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: sd.kgrid().len(),
        });
    }
    let s = sd.s_values();
    let f = &sol.f0;
    let mut relation = 0.0_f64;
    let mut reflection = 0.0_f64;
    for i in 0..n {
        let m = kg.mirror(i);
        relation = relation.max((s[i] * f[i] - f[m]).norm());
        reflection = reflection.max((f[m] - f[i].conj()).norm());
    }
    let zero_residuals = sol
        .kappas
        .iter()
        .map(|&kappa| sol.eval(Complex64::new(0.0, kappa)).map(|v| v.norm()))
        .collect::<Result<_>>()?;
    let tail = (f[0] - 1.0).norm().max((f[n - 1] - 1.0).norm());
    let phi_dev = sol.phi_plus.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);
    Ok(FactorizationReport {
        relation_residual: relation,
        reflection_residual: reflection,
        zero_residuals,
        tail_residual: tail,
        phi_modulus_deviation: phi_dev,
        index: sol.index,
        case: sol.case,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BoundState;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn kgrid() -> MomentumGrid {
        MomentumGrid::with_spacing(200.0, 0.05).unwrap()
    }

    #[test]
    fn blaschke_values() {
        assert_abs_diff_eq!((blaschke(&[1.0], c(0.0, 0.0)).unwrap() - (-1.0)).norm(), 0.0, epsilon = 1e-15);
        assert!((blaschke(&[1.0], c(1e12, 0.0)).unwrap() - 1.0).norm() < 1e-11);
        for k in [-7.0, -0.3, 0.0, 2.5, 100.0] {
            let w = blaschke(&[1.0], c(k, 0.0)).unwrap();
            assert!((w.norm() - 1.0).abs() < 1e-14);
            let wm = blaschke(&[1.0], c(-k, 0.0)).unwrap();
            assert!((wm - 1.0 / w).norm() < 1e-14);
        }
        assert!(blaschke(&[1.0], c(0.0, -1.0)).is_err());
    }

    #[test]
    fn shifted_blaschke_values() {
        assert_abs_diff_eq!((blaschke_shifted(&[], 1.0, I).unwrap() - 0.5).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(blaschke_shifted(&[1.0, 2.0], 3.0, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(blaschke_shifted(&[1.0], 1.0, I).is_err());
        // w₀ vanishes at 0; the index 2J + 1 belongs to w₀(k)/w₀(-k), the
        // factor that enters g.
        let vals: Vec<Complex64> = kgrid()
            .nodes()
            .iter()
            .map(|&k| {
                let z = if k == 0.0 { c(1e-9, 0.0) } else { c(k, 0.0) };
                blaschke_shifted(&[1.0], 2.0, z).unwrap() / blaschke_shifted(&[1.0], 2.0, -z).unwrap()
            })
            .collect();
        assert_eq!(winding_number(&vals).unwrap().index, 3);
    }

    #[test]
    fn trivial_data_give_unit_jost_function() {
        let sd = ScatteringData::trivial(kgrid());
        let sol = solve_riemann(&sd, &RiemannOptions::default()).unwrap();
        assert!(sol.f0.iter().all(|f| (f - 1.0).norm() < 1e-12));
        let rep = verify_factorization(&sol, &sd).unwrap();
        assert!(rep.relation_residual < 1e-12 && rep.reflection_residual < 1e-12);
        assert_eq!(sol.case, RiemannCase::Generic);
    }

    #[test]
    fn blaschke_squared_data() {
        let sd = ScatteringData::from_fn(
            kgrid(),
            |k| (c(k, 1.0) / c(k, -1.0)).powi(2),
            vec![BoundState::new(1.0, 2.0)],
        )
        .unwrap();
        let sol = solve_riemann(&sd, &RiemannOptions::default()).unwrap();
        assert_eq!(sol.index, -2);
        for (k, f) in sol.kgrid.nodes().iter().zip(&sol.f0) {
            if k.abs() <= 20.0 {
                assert!((f - c(*k, -1.0) / c(*k, 1.0)).norm() < 1e-6, "k = {k}");
            }
        }
        let rep = verify_factorization(&sol, &sd).unwrap();
        assert!(rep.zero_residuals[0] <= 1e-8);
    }

    #[test]
    fn resonance_data() {
        let sd = ScatteringData::from_fn(kgrid(), |k| c(k, 1.0) / c(k, -1.0), vec![]).unwrap();
        let sol = solve_riemann(&sd, &RiemannOptions::default()).unwrap();
        assert_eq!(sol.case, RiemannCase::Resonance);
        assert_eq!(sol.index, -1);
        let z = sol.kgrid.zero_index();
        assert!(sol.f0[z].norm() <= 1e-3);
        let rep = verify_factorization(&sol, &sd).unwrap();
        assert!(rep.relation_residual <= 1e-4, "{}", rep.relation_residual);
        for (k, f) in sol.kgrid.nodes().iter().zip(&sol.f0) {
            assert!((f - c(*k, 0.0) / c(*k, 1.0)).norm() < 1e-4, "k = {k}");
        }
    }

    #[test]
    fn index_inconsistent_with_bound_states() {
        let sd = ScatteringData::from_fn(kgrid(), |k| (c(k, 1.0) / c(k, -1.0)).powi(2), vec![]).unwrap();
        assert!(matches!(
            solve_riemann(&sd, &RiemannOptions::default()),
            Err(Error::IndexMismatch { index: -2, bound_states: 0 })
        ));
    }

    #[test]
    fn extra_blaschke_square_shifts_index_by_two() {
        let base = ScatteringData::from_fn(kgrid(), |k| (c(k, 1.0) / c(k, -1.0)).powi(2), vec![BoundState::new(1.0, 2.0)])
            .unwrap();
        let more = ScatteringData::from_fn(
            kgrid(),
            |k| (c(k, 1.0) / c(k, -1.0)).powi(2) * (c(k, 3.0) / c(k, -3.0)).powi(2),
            vec![BoundState::new(1.0, 2.0), BoundState::new(3.0, 1.0)],
        )
        .unwrap();
        let a = solve_riemann(&base, &RiemannOptions::default()).unwrap();
        let b = solve_riemann(&more, &RiemannOptions::default()).unwrap();
        assert_eq!(b.index - a.index, -2);
    }
}
