//! Domain types shared by every stage of the pipeline.
//!
//! All types are plain values: once constructed they are never mutated in
//! place, so they can be shared freely between worker threads.

use std::ops::Deref;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when deciding whether a coordinate sits on a node.
const NODE_SNAP: f64 = 1e-9;

/// Largest tolerated `|S(±k_max) - 1|` in the structural checks.
pub const TAIL_TOLERANCE: f64 = 0.1;

/// Uniformly spaced nodes `start + i * step`, `i = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    start: f64,
    step: f64,
    n: usize,
}

impl UniformGrid {
    pub fn new(start: f64, end: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 nodes, got {n}")));
        }
        if !(start.is_finite() && end.is_finite()) || end <= start {
            return Err(Error::InvalidGrid(format!(
                "interval [{start}, {end}] is empty or not finite"
            )));
        }
        Ok(Self {
            start,
            step: (end - start) / (n - 1) as f64,
            n,
        })
    }

    /// Grid covering `[start, end]` with spacing as close to `step` as the
    /// interval allows (the spacing is adjusted so that `end` is a node).
    pub fn with_spacing(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {step}")));
        }
        let cells = ((end - start) / step).round().max(1.0) as usize;
        Self::new(start, end, cells + 1)
    }

    /// Builds a grid from explicit sample positions, rejecting non-uniform input.
    pub fn from_nodes(nodes: &[f64]) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidGrid("need at least 2 nodes".into()));
        }
        let grid = Self::new(nodes[0], nodes[nodes.len() - 1], nodes.len())?;
        let tol = 1e-6 * grid.step;
        for (i, &x) in nodes.iter().enumerate() {
            if (x - grid.node(i)).abs() > tol {
                return Err(Error::InvalidGrid(format!(
                    "non-uniform spacing at node {i} (x = {x})"
                )));
            }
        }
        Ok(grid)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.node(self.n - 1)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Index of the node at `x`, if `x` coincides with one.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let t = (x - self.start) / self.step;
        let i = t.round();
        if i < 0.0 || i as usize >= self.n || (t - i).abs() > NODE_SNAP * t.abs().max(1.0) {
            None
        } else {
            Some(i as usize)
        }
    }

    /// Every `factor`-th node, provided the last node is kept.
    pub fn coarsen(&self, factor: usize) -> Option<Self> {
        if factor == 0 || !(self.n - 1).is_multiple_of(factor) || (self.n - 1) / factor < 1 {
            return None;
        }
        Some(Self {
            start: self.start,
            step: self.step * factor as f64,
            n: (self.n - 1) / factor + 1,
        })
    }
}

/// Uniform grid on `[0, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid(UniformGrid);

impl RadialGrid {
    pub fn new(x_max: f64, n: usize) -> Result<Self> {
        Ok(Self(UniformGrid::new(0.0, x_max, n)?))
    }

    pub fn with_spacing(x_max: f64, dx: f64) -> Result<Self> {
        Ok(Self(UniformGrid::with_spacing(0.0, x_max, dx)?))
    }

    pub fn from_uniform(grid: UniformGrid) -> Result<Self> {
        if grid.start().abs() > NODE_SNAP * grid.step() {
            return Err(Error::InvalidGrid(format!(
                "radial grid must start at 0, starts at {}",
                grid.start()
            )));
        }
        Ok(Self(UniformGrid { start: 0.0, ..grid }))
    }

    pub fn x_max(&self) -> f64 {
        self.0.end()
    }

    pub fn uniform(&self) -> &UniformGrid {
        &self.0
    }

    pub fn coarsen(&self, factor: usize) -> Option<Self> {
        self.0.coarsen(factor).map(Self)
    }

    /// The leading nodes `0..=m` as a grid of their own.
    pub fn truncate(&self, m: usize) -> Result<Self> {
        if m == 0 || m >= self.len() {
            return Err(Error::InvalidGrid(format!("cannot truncate to {m} cells")));
        }
        Ok(Self(UniformGrid {
            n: m + 1,
            ..self.0.clone()
        }))
    }
}

impl Deref for RadialGrid {
    type Target = UniformGrid;

    fn deref(&self) -> &UniformGrid {
        &self.0
    }
}

/// Symmetric uniform grid on `[-k_max, k_max]` with an odd node count, so that
/// `k = 0` is always the middle node and `-k` is present iff `k` is.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid(UniformGrid);

impl MomentumGrid {
    pub fn new(k_max: f64, n: usize) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "momentum grid needs an odd node count >= 3, got {n}"
            )));
        }
        Ok(Self(UniformGrid::new(-k_max, k_max, n)?))
    }

    pub fn with_spacing(k_max: f64, dk: f64) -> Result<Self> {
        if !(dk > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {dk}")));
        }
        let half = (k_max / dk).round().max(1.0) as usize;
        Self::new(k_max, 2 * half + 1)
    }

    pub fn from_nodes(nodes: &[f64]) -> Result<Self> {
        let grid = UniformGrid::from_nodes(nodes)?;
        if (grid.start() + grid.end()).abs() > 1e-6 * grid.step() {
            return Err(Error::InvalidGrid("momentum grid is not symmetric about 0".into()));
        }
        Self::new(grid.end(), grid.len())
    }

    pub fn k_max(&self) -> f64 {
        self.0.end()
    }

    /// Index of the flagged `k = 0` node.
    pub fn zero_index(&self) -> usize {
        self.0.len() / 2
    }

    /// Index of the node at `-k_i`.
    #[inline]
    pub fn mirror(&self, i: usize) -> usize {
        self.0.len() - 1 - i
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        // Exact antisymmetry: k_{mirror(i)} == -k_i bit for bit.
        let z = self.zero_index();
        if i >= z {
            (i - z) as f64 * self.0.step()
        } else {
            -((z - i) as f64 * self.0.step())
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    pub fn uniform(&self) -> &UniformGrid {
        &self.0
    }
}

impl Deref for MomentumGrid {
    type Target = UniformGrid;

    fn deref(&self) -> &UniformGrid {
        &self.0
    }
}

/// A real potential sampled on a radial grid.
///
/// A jump discontinuity that falls on a node should carry the mean of the two
/// one-sided limits there; the quadratures used downstream are then second
/// order across the jump.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    grid: RadialGrid,
    values: Vec<f64>,
    support_hint: f64,
}

impl Potential {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "potential sample {i} is not finite"
            )));
        }
        let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let support_hint = values
            .iter()
            .rposition(|v| v.abs() > 1e-14 * peak)
            .map(|i| grid.node(i))
            .unwrap_or(0.0);
        Ok(Self {
            grid,
            values,
            support_hint,
        })
    }

    pub fn from_fn(grid: RadialGrid, q: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().into_iter().map(q).collect();
        Self::new(grid, values)
    }

    pub fn zero(grid: RadialGrid) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
            support_hint: 0.0,
        }
    }

    /// `q(x) = -depth` on `[0, width)`, zero beyond; the node at `width`
    /// (if any) carries `-depth / 2`.
    pub fn square_well(grid: RadialGrid, depth: f64, width: f64) -> Result<Self> {
        let snap = 1e-9 * grid.step();
        Self::from_fn(grid, |x| {
            if (x - width).abs() <= snap {
                -0.5 * depth
            } else if x < width {
                -depth
            } else {
                0.0
            }
        })
    }

    /// `q(x) = -2 a^2 / cosh^2(a x)`, the reflectionless profile whose Jost
    /// function is `k / (k + i a)`.
    pub fn sech2(grid: RadialGrid, a: f64) -> Result<Self> {
        Self::from_fn(grid, |x| -2.0 * a * a / (a * x).cosh().powi(2))
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest node at which `q` is not negligible.
    pub fn support_hint(&self) -> f64 {
        self.support_hint
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Every `factor`-th sample.
    pub fn coarsen(&self, factor: usize) -> Option<Self> {
        let grid = self.grid.coarsen(factor)?;
        let values = self.values.iter().step_by(factor).copied().collect();
        Self::new(grid, values).ok()
    }

    /// Linear interpolant of the samples on a grid `factor` times finer.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidGrid("refinement factor must be positive".into()));
        }
        let n = self.grid.len();
        let grid = RadialGrid::new(self.grid.x_max(), (n - 1) * factor + 1)?;
        let v = &self.values;
        let values = (0..grid.len())
            .map(|m| {
                let (i, r) = (m / factor, m % factor);
                if r == 0 {
                    v[i]
                } else {
                    let t = r as f64 / factor as f64;
                    v[i] * (1.0 - t) + v[i + 1] * t
                }
            })
            .collect();
        Self::new(grid, values)
    }
}

/// Trapezoid quadrature of `x |q(x)|`: the first moment that defines the
/// admissible decay class.
pub fn l11_moment(q: &Potential) -> Result<f64> {
    if let Some(i) = q.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("potential sample {i} is not finite")));
    }
    let grid = q.grid();
    let integrand: Vec<f64> = q
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| grid.node(i) * v.abs())
        .collect();
    crate::numkit::integrate_with(&integrand, grid, crate::numkit::Rule::Trapezoid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub kappa: f64,
    pub s: f64,
}

impl BoundState {
    pub fn new(kappa: f64, s: f64) -> Self {
        Self { kappa, s }
    }

    pub fn is_admissible(&self) -> bool {
        self.kappa > 0.0 && self.s > 0.0 && self.kappa.is_finite() && self.s.is_finite()
    }
}

/// `S(k)` on a symmetric momentum grid plus the discrete spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringData {
    kgrid: MomentumGrid,
    s_values: Vec<Complex64>,
    bound_states: Vec<BoundState>,
    s_at_zero_sign: i8,
}

impl ScatteringData {
    /// Bound states are sorted by `kappa`; repeated `kappa` values are rejected
    /// because the zeros they stand for are simple.
    pub fn new(
        kgrid: MomentumGrid,
        s_values: Vec<Complex64>,
        mut bound_states: Vec<BoundState>,
        s_at_zero_sign: i8,
    ) -> Result<Self> {
        if s_values.len() != kgrid.len() {
            return Err(Error::LengthMismatch {
                expected: kgrid.len(),
                found: s_values.len(),
            });
        }
        if s_at_zero_sign != 1 && s_at_zero_sign != -1 {
            return Err(Error::InvalidInput(format!(
                "S(0) sign flag must be +1 or -1, got {s_at_zero_sign}"
            )));
        }
        if s_values.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::InvalidInput("S(k) contains non-finite samples".into()));
        }
        bound_states.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
        for pair in bound_states.windows(2) {
            if pair[0].kappa == pair[1].kappa {
                return Err(Error::InvalidInput(format!(
                    "repeated bound state kappa = {}",
                    pair[0].kappa
                )));
            }
        }
        Ok(Self {
            kgrid,
            s_values,
            bound_states,
            s_at_zero_sign,
        })
    }

    /// Samples `S` from a closure, with the sign flag read off `S(0)`.
    pub fn from_fn(
        kgrid: MomentumGrid,
        s: impl Fn(f64) -> Complex64,
        bound_states: Vec<BoundState>,
    ) -> Result<Self> {
        let values: Vec<Complex64> = kgrid.nodes().into_iter().map(s).collect();
        let sign = if values[kgrid.zero_index()].re < 0.0 { -1 } else { 1 };
        Self::new(kgrid, values, bound_states, sign)
    }

    /// `S == 1`, no bound states.
    pub fn trivial(kgrid: MomentumGrid) -> Self {
        let n = kgrid.len();
        Self {
            kgrid,
            s_values: vec![Complex64::new(1.0, 0.0); n],
            bound_states: Vec::new(),
            s_at_zero_sign: 1,
        }
    }

    pub fn kgrid(&self) -> &MomentumGrid {
        &self.kgrid
    }

    pub fn s_values(&self) -> &[Complex64] {
        &self.s_values
    }

    pub fn bound_states(&self) -> &[BoundState] {
        &self.bound_states
    }

    pub fn bound_state_count(&self) -> usize {
        self.bound_states.len()
    }

    pub fn s_at_zero_sign(&self) -> i8 {
        self.s_at_zero_sign
    }

    /// True in the exceptional case `f(0) = 0`, flagged by `S(0) = -1`.
    pub fn is_resonant(&self) -> bool {
        self.s_at_zero_sign < 0
    }

    pub fn with_s_values(&self, s_values: Vec<Complex64>) -> Result<Self> {
        Self::new(
            self.kgrid.clone(),
            s_values,
            self.bound_states.clone(),
            self.s_at_zero_sign,
        )
    }

    pub fn with_bound_states(&self, bound_states: Vec<BoundState>) -> Result<Self> {
        Self::new(
            self.kgrid.clone(),
            self.s_values.clone(),
            bound_states,
            self.s_at_zero_sign,
        )
    }

    /// `(max ||S| - 1|, max |S(-k) - conj S(k)|, max |S(±k_max) - 1|)`.
    pub fn deviations(&self) -> (f64, f64, f64) {
        let n = self.kgrid.len();
        let mut unitarity = 0.0_f64;
        let mut symmetry = 0.0_f64;
        for i in 0..n {
            let s = self.s_values[i];
            unitarity = unitarity.max((s.norm() - 1.0).abs());
            let mirrored = self.s_values[self.kgrid.mirror(i)];
            symmetry = symmetry.max((mirrored - s.conj()).norm());
        }
        let tail = (self.s_values[0] - 1.0)
            .norm()
            .max((self.s_values[n - 1] - 1.0).norm());
        (unitarity, symmetry, tail)
    }
}

/// A structural invariant that does not hold.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Unitarity { max_deviation: f64 },
    ConjugateSymmetry { max_deviation: f64 },
    Tail { deviation: f64 },
    NonPositiveKappa { index: usize, kappa: f64 },
    NonPositiveNorming { index: usize, s: f64 },
    KappaOrder { index: usize },
}

/// Lists every violated structural invariant of `sd`. Unitarity and conjugate
/// symmetry are checked at `tol`; the `S(±k_max) ≈ 1` tail at
/// [`TAIL_TOLERANCE`] (or `tol`, if larger).
pub fn validate_scattering_data(sd: &ScatteringData, tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    let (unitarity, symmetry, tail) = sd.deviations();
    if !(unitarity <= tol) {
        out.push(Violation::Unitarity {
            max_deviation: unitarity,
        });
    }
    if !(symmetry <= tol) {
        out.push(Violation::ConjugateSymmetry {
            max_deviation: symmetry,
        });
    }
    if !(tail <= TAIL_TOLERANCE.max(tol)) {
        out.push(Violation::Tail { deviation: tail });
    }
    for (index, b) in sd.bound_states().iter().enumerate() {
        if !(b.kappa > 0.0) {
            out.push(Violation::NonPositiveKappa {
                index,
                kappa: b.kappa,
            });
        }
        if !(b.s > 0.0) {
            out.push(Violation::NonPositiveNorming { index, s: b.s });
        }
    }
    for (i, pair) in sd.bound_states().windows(2).enumerate() {
        if !(pair[1].kappa > pair[0].kappa) {
            out.push(Violation::KappaOrder { index: i + 1 });
        }
    }
    out
}

/// One stored slice `k ↦ f(·, k)` of the Jost solution.
#[derive(Debug, Clone, PartialEq)]
pub struct JostRow {
    pub k: Complex64,
    pub values: Vec<Complex64>,
}

/// Jost solution samples: boundary values on the whole momentum grid and the
/// full `x`-profile for a selected set of momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct JostField {
    pub xgrid: RadialGrid,
    pub kgrid: MomentumGrid,
    /// `f(k) = f(0, k)` on `kgrid`.
    pub f0: Vec<Complex64>,
    /// `f'(0, k)` on `kgrid`.
    pub fprime0: Vec<Complex64>,
    pub rows: Vec<JostRow>,
}

impl JostField {
    /// `max |f(±k_max) - 1|`; small when the grid resolves the large-`k` limit.
    pub fn tail_deviation(&self) -> f64 {
        let n = self.f0.len();
        (self.f0[0] - 1.0).norm().max((self.f0[n - 1] - 1.0).norm())
    }

    /// `max |f(-k) - conj f(k)|`.
    pub fn reflection_deviation(&self) -> f64 {
        (0..self.f0.len())
            .map(|i| (self.f0[self.kgrid.mirror(i)] - self.f0[i].conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Triangular kernel `A(x_i, y_j)`, `j >= i`, on a single radial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformationKernel {
    grid: RadialGrid,
    rows: Vec<Vec<f64>>,
}

impl TransformationKernel {
    /// `rows[i][m]` holds `A(x_i, x_{i+m})`.
    pub fn new(grid: RadialGrid, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = grid.len();
        if rows.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: rows.len(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n - i {
                return Err(Error::LengthMismatch {
                    expected: n - i,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("kernel row {i} is not finite")));
            }
        }
        Ok(Self { grid, rows })
    }

    pub fn from_fn(grid: RadialGrid, a: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.len();
        let rows = (0..n)
            .map(|i| (i..n).map(|j| a(grid.node(i), grid.node(j))).collect())
            .collect();
        Self { grid, rows }
    }

    pub fn zero(grid: RadialGrid) -> Self {
        Self::from_fn(grid, |_, _| 0.0)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// `A(x_i, y_j)`; zero below the diagonal.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j < i {
            0.0
        } else {
            self.rows[i][j - i]
        }
    }

    /// `A(x_i, y)` for `y >= x_i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    pub fn max_abs_difference(&self, other: &Self) -> Result<f64> {
        if self.grid.len() != other.grid.len() {
            return Err(Error::LengthMismatch {
                expected: self.grid.len(),
                found: other.grid.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .zip(&other.rows)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max))
    }
}

/// Samples of `F = F_s + F_d` and `F'` on a uniform window.
#[derive(Debug, Clone, PartialEq)]
pub struct MarchenkoInput {
    pub xgrid: UniformGrid,
    pub f_values: Vec<f64>,
    pub fs_values: Vec<f64>,
    pub fd_values: Vec<f64>,
    pub fprime: Vec<f64>,
    /// Largest imaginary part discarded while synthesising `F_s`.
    pub imag_residual: f64,
}

impl MarchenkoInput {
    pub fn new(
        xgrid: UniformGrid,
        fs_values: Vec<f64>,
        fd_values: Vec<f64>,
        imag_residual: f64,
    ) -> Result<Self> {
        let n = xgrid.len();
        for len in [fs_values.len(), fd_values.len()] {
            if len != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        let f_values: Vec<f64> = fs_values.iter().zip(&fd_values).map(|(a, b)| a + b).collect();
        let fprime = crate::numkit::differentiate(&f_values, &xgrid)?;
        Ok(Self {
            xgrid,
            f_values,
            fs_values,
            fd_values,
            fprime,
            imag_residual,
        })
    }

    /// `F` given as a total, with no known split (everything is booked as `F_s`).
    pub fn from_total(xgrid: UniformGrid, f_values: Vec<f64>) -> Result<Self> {
        let zeros = vec![0.0; f_values.len()];
        Self::new(xgrid, f_values, zeros, 0.0)
    }

    pub fn from_fn(xgrid: UniformGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = xgrid.nodes().into_iter().map(f).collect();
        Self::from_total(xgrid, values)
    }

    /// `F` at `x`, by linear interpolation; zero outside the window.
    pub fn eval(&self, x: f64) -> f64 {
        let g = &self.xgrid;
        let t = (x - g.start()) / g.step();
        if t < -NODE_SNAP || t > (g.len() - 1) as f64 + NODE_SNAP {
            return 0.0;
        }
        let i = (t.floor().max(0.0) as usize).min(g.len() - 2);
        let frac = (t - i as f64).clamp(0.0, 1.0);
        self.f_values[i] * (1.0 - frac) + self.f_values[i + 1] * frac
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub entries: Vec<ConditionEntry>,
    pub passed: bool,
    pub index: Option<i64>,
    pub bound_states: usize,
    pub s_zero_sign: i8,
}

impl ValidationReport {
    pub fn new(
        entries: Vec<ConditionEntry>,
        index: Option<i64>,
        bound_states: usize,
        s_zero_sign: i8,
    ) -> Self {
        let passed = entries.iter().all(|e| e.passed);
        Self {
            entries,
            passed,
            index,
            bound_states,
            s_zero_sign,
        }
    }

    pub fn failed(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| !e.passed)
            .map(|e| e.name.as_str())
            .collect()
    }

    pub fn entry(&self, name: &str) -> Option<&ConditionEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn blaschke_s(k: f64) -> Complex64 {
        Complex64::new(k, 1.0) / Complex64::new(k, -1.0)
    }

    #[test]
    fn momentum_grid_is_exactly_symmetric() {
        let g = MomentumGrid::with_spacing(200.0, 0.05).unwrap();
        assert_eq!(g.len(), 8001);
        assert_eq!(g.node(g.zero_index()), 0.0);
        for i in 0..g.len() {
            assert_eq!(g.node(g.mirror(i)), -g.node(i));
        }
        assert!(MomentumGrid::new(1.0, 4).is_err());
    }

    #[test]
    fn non_uniform_nodes_are_rejected() {
        assert!(UniformGrid::from_nodes(&[0.0, 0.1, 0.25]).is_err());
        assert!(UniformGrid::from_nodes(&[0.0, 0.1, 0.2]).is_ok());
        assert!(RadialGrid::from_uniform(UniformGrid::new(1.0, 2.0, 3).unwrap()).is_err());
    }

    #[test]
    fn identity_data_has_no_violations() {
        let sd = ScatteringData::trivial(MomentumGrid::new(10.0, 101).unwrap());
        assert!(validate_scattering_data(&sd, 1e-12).is_empty());
    }

    #[test]
    fn non_unimodular_data_is_reported() {
        let kgrid = MomentumGrid::new(10.0, 101).unwrap();
        let sd = ScatteringData::from_fn(kgrid, |_| Complex64::new(2.0, 0.0), vec![]).unwrap();
        let v = validate_scattering_data(&sd, 1e-8);
        assert!(v.iter().any(|v| matches!(v, Violation::Unitarity { .. })));
    }

    #[test]
    fn blaschke_ratio_passes_structural_checks() {
        let kgrid = MomentumGrid::new(50.0, 4001).unwrap();
        let sd = ScatteringData::from_fn(kgrid, blaschke_s, vec![]).unwrap();
        assert_eq!(sd.s_at_zero_sign(), -1);
        assert!(validate_scattering_data(&sd, 1e-12).is_empty());
    }

    #[test]
    fn repeated_kappa_is_rejected_and_order_is_normalised() {
        let kgrid = MomentumGrid::new(10.0, 21).unwrap();
        let sd = ScatteringData::trivial(kgrid);
        assert!(sd
            .with_bound_states(vec![BoundState::new(1.0, 1.0), BoundState::new(1.0, 2.0)])
            .is_err());
        let sorted = sd
            .with_bound_states(vec![BoundState::new(2.0, 3.0), BoundState::new(1.0, 2.0)])
            .unwrap();
        assert_eq!(sorted.bound_states()[0].kappa, 1.0);
    }

    #[test]
    fn first_moment_of_zero_potential_vanishes() {
        let q = Potential::zero(RadialGrid::with_spacing(10.0, 0.1).unwrap());
        assert_eq!(l11_moment(&q).unwrap(), 0.0);
    }

    #[test]
    fn first_moment_of_sech2() {
        let grid = RadialGrid::with_spacing(40.0, 0.01).unwrap();
        let q = Potential::sech2(grid, 1.0).unwrap();
        // ∫ x 2 sech² x dx = 2 ln 2
        assert!((l11_moment(&q).unwrap() - 2.0 * LN_2).abs() < 1e-4);
    }

    #[test]
    fn first_moment_of_square_well_is_exact() {
        let grid = RadialGrid::with_spacing(5.0, 0.01).unwrap();
        let q = Potential::square_well(grid, 4.0, 1.0).unwrap();
        assert!((l11_moment(&q).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn non_finite_potential_is_rejected() {
        let grid = RadialGrid::new(1.0, 3).unwrap();
        assert!(Potential::new(grid, vec![0.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn kernel_vanishes_below_diagonal() {
        let grid = RadialGrid::new(1.0, 5).unwrap();
        let a = TransformationKernel::from_fn(grid, |x, y| x + y + 1.0);
        assert_eq!(a.get(3, 1), 0.0);
        assert_eq!(a.get(1, 3), 1.0 + 0.25 + 0.75);
        assert_eq!(a.diagonal().len(), 5);
    }

    #[test]
    fn marchenko_input_sums_parts() {
        let grid = UniformGrid::new(0.0, 1.0, 11).unwrap();
        let fs = vec![1.0; 11];
        let fd = grid.nodes().iter().map(|x| x * 2.0).collect();
        let input = MarchenkoInput::new(grid, fs, fd, 0.0).unwrap();
        for (i, f) in input.f_values.iter().enumerate() {
            assert_eq!(*f, input.fs_values[i] + input.fd_values[i]);
            assert!((input.fprime[i] - 2.0).abs() < 1e-12);
        }
    }
}
