use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest principal-value phase step accepted between neighbouring samples.
/// Steps near ±π cannot be assigned a branch reliably.
pub const MAX_PHASE_STEP: f64 = 0.9 * PI;

/// Continuous argument along the samples, starting from the principal
/// argument of the first one.
pub fn unwrap_phase(values: &[Complex64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev: Option<Complex64> = None;
    for (i, &v) in values.iter().enumerate() {
        if v == Complex64::new(0.0, 0.0) || !v.is_finite() {
            return Err(Error::ZeroSample { index: i });
        }
        match prev {
            None => out.push(v.arg()),
            Some(p) => {
                let step = (v / p).arg();
                if step.abs() > MAX_PHASE_STEP {
                    return Err(Error::PhaseJump { index: i, jump: step });
                }
                let last = *out.last().unwrap();
                out.push(last + step);
            }
        }
        prev = Some(v);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub index: i64,
    /// Unrounded argument increment over `2π`.
    pub raw: f64,
    /// `|raw - index|`; small values mean a trustworthy count.
    pub distance: f64,
}

impl Winding {
    pub fn is_confident(&self, tol: f64) -> bool {
        self.distance <= tol
    }
}

/// Winding number of a sampled path whose ends both sit near 1.
pub fn winding_number(values: &[Complex64]) -> Result<Winding> {
    if values.len() < 2 {
        return Err(Error::InvalidInput("winding number needs at least two samples".into()));
    }
    let phase = unwrap_phase(values)?;
    let raw = (phase[phase.len() - 1] - phase[0]) / (2.0 * PI);
    let index = raw.round();
    Ok(Winding {
        index: index as i64,
        raw,
        distance: (raw - index).abs(),
    })
}
