//! Basis evaluation and generalized Fourier transforms on `S²` and `SO(3)`.
//!
//! Both manifolds use fully orthonormal bases, so analysis and synthesis
//! are exact inverses on band-limited data and Parseval holds without
//! degree-dependent prefactors:
//!
//! * `S²`: orthonormal spherical harmonics `Y_{ℓ,m}` with the
//!   Condon-Shortley phase;
//! * `SO(3)`: `u^ℓ_{mn} = √((2ℓ+1)/8π²) · conj(D^ℓ_{mn})`, the scaling that
//!   makes rotation act as a left multiplication by `D^ℓ(R)` on coefficient
//!   blocks, mirroring the `S²` case.
//!
//! Quadrature weights enter once, in analysis.

mod legendre;
mod transform;
mod wigner;

pub use legendre::{assoc_legendre, LegendreTable};
pub use transform::{
    eval_s2, eval_so3, s2_analysis, s2_synthesis, so3_analysis, so3_basis, so3_synthesis,
    sph_harm,
};
pub use wigner::{
    unit_vector, vector_angles, wigner_big_d, wigner_big_d_stack, wigner_d, wigner_d_stack,
    Rotation, RotationMatrix,
};

/// Orthonormalization constant for the degree-`ℓ` Wigner-D entries.
#[inline]
pub fn so3_norm(l: usize) -> f64 {
    ((2 * l + 1) as f64 / (8.0 * std::f64::consts::PI * std::f64::consts::PI)).sqrt()
}
