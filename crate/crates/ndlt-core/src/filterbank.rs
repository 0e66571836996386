//! The needlet filter bank `{a; b¹, b²}` and generators `{α; β¹, β²}`.
//!
//! All six profiles are even, real, compactly supported in the Fourier
//! variable and map into `[0, 1]`. The filters satisfy the partition of
//! unity `â² + (b̂¹)² + (b̂²)² = 1` on `[0, 1/2]` and are tied to the
//! generators by the two-scale relations
//!
//! ```text
//! α̂(2ξ) = â(ξ) α̂(ξ),      β̂ⁿ(2ξ) = b̂ⁿ(ξ) α̂(ξ),   n = 1, 2.
//! ```
//!
//! Note the `β̂²` branch on `[1/2, 1]` is `½ sin(π ν(2|ξ| - 1))`; this is the
//! unique form consistent with the two-scale relation for `b̂²`, via the
//! double-angle identity `sin(x)cos(x) = ½ sin(2x)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Low-pass / high-pass filter selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterKind {
    A,
    B1,
    B2,
}

/// Needlet generator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorKind {
    Alpha,
    Beta1,
    Beta2,
}

/// Smooth ramp `ν(t) = t⁴ (35 - 84t + 70t² - 20t³)`, clamped to `[0, 1]`
/// outside the unit interval so every piecewise branch is total on ℝ.
///
/// Above `t = 1/2` the polynomial loses ~2 digits to cancellation; the
/// exact symmetry `ν(t) + ν(1-t) = 1` (the derivative `140 t³(1-t)³` is
/// symmetric) keeps evaluations at full precision over the whole ramp.
pub fn nu(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else if t <= 0.5 {
        t * t * t * t * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)))
    } else {
        let u = 1.0 - t;
        1.0 - u * u * u * u * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u)))
    }
}

/// Fourier profile of a filter, zero-extended beyond `|ξ| = 1/2`.
pub fn filter_hat(kind: FilterKind, xi: f64) -> f64 {
    let x = xi.abs();
    match kind {
        FilterKind::A => {
            if x < 0.125 {
                1.0
            } else if x <= 0.25 {
                (FRAC_PI_2 * nu(8.0 * x - 1.0)).cos()
            } else {
                0.0
            }
        }
        FilterKind::B1 => {
            if x < 0.125 {
                0.0
            } else if x <= 0.25 {
                (FRAC_PI_2 * nu(8.0 * x - 1.0)).sin()
            } else if x <= 0.5 {
                (FRAC_PI_2 * nu(4.0 * x - 1.0)).cos()
            } else {
                0.0
            }
        }
        FilterKind::B2 => {
            if x < 0.25 {
                0.0
            } else if x <= 0.5 {
                (FRAC_PI_2 * nu(4.0 * x - 1.0)).sin()
            } else {
                0.0
            }
        }
    }
}

/// Fourier profile of a needlet generator.
pub fn generator_hat(kind: GeneratorKind, xi: f64) -> f64 {
    let x = xi.abs();
    match kind {
        GeneratorKind::Alpha => {
            if x < 0.25 {
                1.0
            } else if x <= 0.5 {
                (FRAC_PI_2 * nu(4.0 * x - 1.0)).cos()
            } else {
                0.0
            }
        }
        GeneratorKind::Beta1 => {
            if x < 0.25 {
                0.0
            } else if x < 0.5 {
                (FRAC_PI_2 * nu(4.0 * x - 1.0)).sin()
            } else if x <= 1.0 {
                let c = (FRAC_PI_2 * nu(2.0 * x - 1.0)).cos();
                c * c
            } else {
                0.0
            }
        }
        GeneratorKind::Beta2 => {
            if x < 0.5 {
                0.0
            } else if x <= 1.0 {
                0.5 * (std::f64::consts::PI * nu(2.0 * x - 1.0)).sin()
            } else {
                0.0
            }
        }
    }
}

/// Low-pass generator response at degree `l` and scale `j`, i.e.
/// `α̂(l / 2^j)` with `λ_l = l`.
pub fn alpha_at(l: usize, j: usize) -> f64 {
    generator_hat(GeneratorKind::Alpha, l as f64 / (1u64 << j) as f64)
}

/// High-pass generator response `β̂ⁿ(l / 2^j)` for `n ∈ {1, 2}`.
pub fn beta_at(n: usize, l: usize, j: usize) -> f64 {
    let kind = match n {
        1 => GeneratorKind::Beta1,
        2 => GeneratorKind::Beta2,
        _ => panic!("generator index must be 1 or 2, got {n}"),
    };
    generator_hat(kind, l as f64 / (1u64 << j) as f64)
}

/// Filter response `â(l / 2^j)` or `b̂ⁿ(l / 2^j)`.
pub fn filter_at(kind: FilterKind, l: usize, j: usize) -> f64 {
    filter_hat(kind, l as f64 / (1u64 << j) as f64)
}
