use crate::error::{Error, Result};

/// Root of `g` in `[a, b]` by Illinois-modified regula falsi, falling back to
/// bisection whenever the secant step stalls.
///
/// Stops once `|g(root)| <= tol` or the bracket has shrunk to a few ulps.
pub fn find_root(g: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let (mut fa, mut fb) = (g(a), g(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::NoSignChange { a, b });
    }
    // Side retained on the previous step: -1 left, +1 right.
    let mut side = 0;
    for _ in 0..200 {
        let width = b - a;
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = g(c);
        if fc.abs() <= tol || fc == 0.0 {
            return Ok(c);
        }
        if fa * fc < 0.0 {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
        // Guarantee bracket shrinkage if regula falsi keeps clinging to one end.
        if b - a > 0.5 * width {
            let m = 0.5 * (a + b);
            let fm = g(m);
            if fm.abs() <= tol || fm == 0.0 {
                return Ok(m);
            }
            if fa.signum() == fm.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
            side = 0;
        }
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Brackets `[x_i, x_{i+1}]` on the scan `a, a + step, …, b` where `g`
/// changes sign. Exact zeros at scan points produce a bracket around them.
pub fn sign_changes(g: impl Fn(f64) -> f64, a: f64, b: f64, step: f64) -> Vec<(f64, f64)> {
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let xs: Vec<f64> = (0..=n).map(|i| (a + i as f64 * step).min(b)).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if ys[i] * ys[i + 1] < 0.0 {
            out.push((xs[i], xs[i + 1]));
        } else if ys[i + 1] == 0.0 && i + 2 <= n && ys[i] * ys[i + 2] < 0.0 {
            out.push((xs[i], xs[i + 2]));
            i += 1;
        }
        i += 1;
    }
    out
}
