//! Numerical building blocks: quadrature, oscillatory transforms, integral
//! equations, root finding, phase unwrapping and Cauchy integrals.

mod cauchy;
mod fourier;
mod linear;
mod quadrature;
mod roots;
mod winding;

pub use cauchy::{cauchy_integral, pv_cauchy, pv_cauchy_nodes};
pub(crate) use fourier::CellWeights;
pub use fourier::{
    filon, filon_exp, fourier_kernel_to_space, fourier_space_to_kernel, fourier_space_to_kernel_many, FourierOptions,
    FourierValue, OriginConvention, SpectralSynthesis, SpectralTail,
};
pub use linear::{solve_fredholm, solve_volterra_backward, FredholmSolution};
pub use quadrature::{differentiate, differentiate5, integrate, integrate_with, tail_integrals, weights, Integrand, Rule};
pub use roots::{find_root, sign_changes};
pub use winding::{unwrap_phase, winding_number, Winding, MAX_PHASE_STEP};
