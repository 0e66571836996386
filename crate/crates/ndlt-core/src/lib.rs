//! Needlet analysis on the sphere `S²` and the rotation group `SO(3)`.
//!
//! The crate provides the numerical building blocks for multiscale,
//! rotation-equivariant processing of spherical signals:
//!
//! * [`quadrature`] — Gauss-Legendre based sampling rules on `[-1,1]`, `S²`
//!   and `SO(3)` with declared polynomial exactness;
//! * [`harmonics`] — associated Legendre functions, spherical harmonics,
//!   Wigner d/D matrices and forward/inverse generalized Fourier transforms;
//! * [`filterbank`] — the low/high-pass filter bank `{a; b¹, b²}` and the
//!   associated needlet generators `{α; β¹, β²}`;
//! * [`needlet`] — multi-level tight-frame decomposition/reconstruction,
//!   spatial needlet sequences, needlet kernels and tightness checks;
//! * [`convolution`] — spectral rotation and convolution on both manifolds,
//!   plus the per-band needlet block convolution;
//! * [`layers`] — wavelet shrinkage, spectral pooling and the spatial ReLU
//!   reference path;
//! * [`harness`] — equivariance-error measurement, the operator ablation
//!   table, the σ-sensitivity sweep, the coarse-scale decay curve and the
//!   molecular potential signal generator.
//!
//! All spectral containers are generic over the floating-point width so the
//! same pipelines can be run in single and double precision.

pub mod convolution;
pub mod error;
pub mod filterbank;
pub mod harmonics;
pub mod harness;
pub mod layers;
pub mod needlet;
pub mod quadrature;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use harmonics::{Rotation, RotationMatrix};
pub use quadrature::{GaussLegendre1D, Manifold, QuadratureRule};
pub use scalar::Real;
pub use spectral::{GridSignal, Spectral, SpectralS2, SpectralSo3};
