//! ZYZ rotations and Wigner d/D matrices.
//!
//! Rotations act on points as `R(α,β,γ) = R_z(α) R_y(β) R_z(γ)`. The
//! Wigner matrices follow `D^ℓ_{mn}(α,β,γ) = e^{-imα} d^ℓ_{mn}(β) e^{-inγ}`
//! with real orthogonal `d^ℓ(β)`, so `D^ℓ(R₁) D^ℓ(R₂) = D^ℓ(R₁ ∘ R₂)`.
//!
//! The small-d matrices are built degree by degree: boundary rows and
//! columns (`max(|m|,|n|) = ℓ`) come from the closed binomial form, the
//! interior from the three-term recurrence in `ℓ` at fixed `(m, n)`, which
//! stays well conditioned through the degrees used here.

use ndarray::Array2;
use num_complex::Complex;
use rand::Rng;
use std::f64::consts::PI;

use crate::scalar::{Real, C};

/// ZYZ Euler triple with `α, γ ∈ [0, 2π)` and `β ∈ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

fn wrap_two_pi(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = x % two_pi;
    if y < 0.0 {
        y += two_pi;
    }
    y
}

impl Rotation {
    /// Wraps `α` and `γ` into `[0, 2π)`; `β` must lie in `[0, π]` up to
    /// roundoff slack.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        assert!(
            (-1e-9..=PI + 1e-9).contains(&beta),
            "colatitude angle {beta} outside [0, π]"
        );
        Rotation {
            alpha: wrap_two_pi(alpha),
            beta: beta.clamp(0.0, PI),
            gamma: wrap_two_pi(gamma),
        }
    }

    pub fn identity() -> Self {
        Rotation {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
        }
    }

    /// Haar-uniform sample: `α, γ` uniform on `[0, 2π)`, `cos β` uniform on
    /// `[-1, 1]`.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let alpha = rng.gen_range(0.0..2.0 * PI);
        let gamma = rng.gen_range(0.0..2.0 * PI);
        let cos_beta: f64 = rng.gen_range(-1.0..1.0);
        Rotation::new(alpha, cos_beta.acos(), gamma)
    }

    pub fn matrix(&self) -> RotationMatrix {
        RotationMatrix::from_zyz(self)
    }

    /// `self ∘ inner`: apply `inner` first, then `self`.
    pub fn compose(&self, inner: &Rotation) -> Rotation {
        self.matrix().mul(&inner.matrix()).to_zyz()
    }

    pub fn inverse(&self) -> Rotation {
        self.matrix().transpose().to_zyz()
    }
}

/// Plain 3×3 rotation matrix used to compose rotations and move points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(pub [[f64; 3]; 3]);

impl RotationMatrix {
    pub fn from_zyz(r: &Rotation) -> Self {
        let (sa, ca) = r.alpha.sin_cos();
        let (sb, cb) = r.beta.sin_cos();
        let (sg, cg) = r.gamma.sin_cos();
        // R_z(α) R_y(β) R_z(γ)
        RotationMatrix([
            [ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb],
            [sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb],
            [-sb * cg, sb * sg, cb],
        ])
    }

    pub fn mul(&self, other: &RotationMatrix) -> RotationMatrix {
        let a = &self.0;
        let b = &other.0;
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        RotationMatrix(out)
    }

    pub fn transpose(&self) -> RotationMatrix {
        let a = &self.0;
        RotationMatrix([
            [a[0][0], a[1][0], a[2][0]],
            [a[0][1], a[1][1], a[2][1]],
            [a[0][2], a[1][2], a[2][2]],
        ])
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let a = &self.0;
        [
            a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
            a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
            a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
        ]
    }

    /// Recover ZYZ angles; at the gimbal poles `β ∈ {0, π}` the split
    /// between `α` and `γ` is fixed by `γ = 0`.
    pub fn to_zyz(&self) -> Rotation {
        let a = &self.0;
        let sin_beta = (a[0][2] * a[0][2] + a[1][2] * a[1][2]).sqrt();
        let beta = sin_beta.atan2(a[2][2]);
        if sin_beta > 1e-12 {
            let alpha = a[1][2].atan2(a[0][2]);
            let gamma = a[2][1].atan2(-a[2][0]);
            Rotation::new(alpha, beta, gamma)
        } else if a[2][2] > 0.0 {
            // Pure z-rotation by α + γ.
            Rotation::new(a[1][0].atan2(a[0][0]), 0.0, 0.0)
        } else {
            // R = R_z(α) R_y(π): first column is (-cos α, -sin α, 0)ᵀ... with
            // our convention R_y(π) = diag(-1, 1, -1), so column 0 is
            // (-cos α, -sin α, 0)ᵀ.
            Rotation::new((-a[1][0]).atan2(-a[0][0]), PI, 0.0)
        }
    }
}

/// Cartesian unit vector of the spherical point `(α, β)`.
pub fn unit_vector(alpha: f64, beta: f64) -> [f64; 3] {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    [sb * ca, sb * sa, cb]
}

/// Spherical angles `(α, β)` of a unit vector.
pub fn vector_angles(v: [f64; 3]) -> (f64, f64) {
    let beta = (v[0] * v[0] + v[1] * v[1]).sqrt().atan2(v[2]);
    let alpha = if v[1] == 0.0 && v[0] == 0.0 {
        0.0
    } else {
        wrap_two_pi(v[1].atan2(v[0]))
    };
    (alpha, beta)
}

fn sqrt_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut p = 1.0f64;
    for i in 1..=k {
        p *= (n - k + i) as f64 / i as f64;
    }
    p.sqrt()
}

/// All small-d matrices `d^ℓ(β)` for `ℓ = 0..=l_max`.
pub fn wigner_d_stack(l_max: usize, beta: f64) -> Vec<Array2<f64>> {
    let x = beta.cos();
    let c = (beta / 2.0).cos();
    let s = (beta / 2.0).sin();
    let mut stack: Vec<Array2<f64>> = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let w = 2 * l + 1;
        let li = l as isize;
        let mut d = Array2::<f64>::zeros((w, w));
        for m in -li..=li {
            for n in -li..=li {
                let (um, un) = ((m + li) as usize, (n + li) as usize);
                let value = if m == li {
                    sign(li - n) * sqrt_binomial(2 * l, (li - n) as usize)
                        * c.powi((li + n) as i32)
                        * s.powi((li - n) as i32)
                } else if m == -li {
                    sqrt_binomial(2 * l, (li + n) as usize)
                        * c.powi((li - n) as i32)
                        * s.powi((li + n) as i32)
                } else if n == li {
                    sqrt_binomial(2 * l, (li - m) as usize)
                        * c.powi((li + m) as i32)
                        * s.powi((li - m) as i32)
                } else if n == -li {
                    sign(li + m) * sqrt_binomial(2 * l, (li + m) as usize)
                        * c.powi((li - m) as i32)
                        * s.powi((li + m) as i32)
                } else {
                    // Interior: three-term recurrence in ℓ at fixed (m, n).
                    let lf = l as f64;
                    let (mf, nf) = (m as f64, n as f64);
                    let denom = ((lf * lf - mf * mf) * (lf * lf - nf * nf)).sqrt();
                    let a = lf * (2.0 * lf - 1.0) / denom;
                    let shift = if m == 0 || n == 0 {
                        0.0
                    } else {
                        mf * nf / (lf * (lf - 1.0))
                    };
                    let prev = stack[l - 1][((m + li - 1) as usize, (n + li - 1) as usize)];
                    let mut v = a * (x - shift) * prev;
                    if l >= 2
                        && m.unsigned_abs() <= l - 2
                        && n.unsigned_abs() <= l - 2
                    {
                        let lm = lf - 1.0;
                        let b = (lf / (lf - 1.0))
                            * ((lm * lm - mf * mf) * (lm * lm - nf * nf)).sqrt()
                            / denom;
                        let prev2 =
                            stack[l - 2][((m + li - 2) as usize, (n + li - 2) as usize)];
                        v -= b * prev2;
                    }
                    v
                };
                d[(um, un)] = value;
            }
        }
        stack.push(d);
    }
    stack
}

#[inline]
fn sign(k: isize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Small-d matrix `d^ℓ(β)`, real orthogonal, `d^ℓ(0) = I`.
pub fn wigner_d(l: usize, beta: f64) -> Array2<f64> {
    wigner_d_stack(l, beta).pop().expect("stack is non-empty")
}

/// Wigner-D matrix `D^ℓ(R)` in the requested precision.
pub fn wigner_big_d<T: Real>(l: usize, r: &Rotation) -> Array2<C<T>> {
    wigner_big_d_stack(l, r).pop().expect("stack is non-empty")
}

/// All `D^ℓ(R)` for `ℓ = 0..=l_max`. Entries are computed in f64 and
/// demoted, so single-precision pipelines see 32-bit storage.
pub fn wigner_big_d_stack<T: Real>(l_max: usize, r: &Rotation) -> Vec<Array2<C<T>>> {
    let d_stack = wigner_d_stack(l_max, r.beta);
    let phase = |angle: f64, k: isize| -> Complex<f64> {
        Complex::from_polar(1.0, -angle * k as f64)
    };
    let mut out = Vec::with_capacity(l_max + 1);
    for (l, d) in d_stack.iter().enumerate() {
        let li = l as isize;
        let w = 2 * l + 1;
        let mut block = Array2::<C<T>>::zeros((w, w));
        for m in -li..=li {
            let pa = phase(r.alpha, m);
            for n in -li..=li {
                let z = pa * d[((m + li) as usize, (n + li) as usize)] * phase(r.gamma, n);
                block[((m + li) as usize, (n + li) as usize)] = crate::scalar::demote(z);
            }
        }
        out.push(block);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn small_d_identity_at_zero() {
        for l in [0usize, 1, 4, 9] {
            let d = wigner_d(l, 0.0);
            for i in 0..2 * l + 1 {
                for j in 0..2 * l + 1 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(d[(i, j)], expect, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn small_d_degree_one_from_cartesian_oracle() {
        // Degree-1 harmonics are linear in (x, y, z); conjugating the
        // Cartesian rotation R_y(β) with the basis change to
        // (Y_{1,-1}, Y_{1,0}, Y_{1,1}) must reproduce d¹(β).
        // Y_{1,-1} ∝ (x - iy), Y_{1,0} ∝ z, Y_{1,1} ∝ -(x + iy).
        let beta = 0.83;
        let d = wigner_d(1, beta);
        let (sb, cb) = beta.sin_cos();
        let r2 = 2.0f64.sqrt();
        let expected = [
            [(1.0 + cb) / 2.0, sb / r2, (1.0 - cb) / 2.0],
            [-sb / r2, cb, sb / r2],
            [(1.0 - cb) / 2.0, -sb / r2, (1.0 + cb) / 2.0],
        ];
        // expected[m'+1][m+1] built by hand from the oracle above equals the
        // classical d¹ with rows m = -1..1.
        for (i, row) in expected.iter().enumerate() {
            for (j, &want) in row.iter().enumerate() {
                assert_abs_diff_eq!(d[(i, j)], want, epsilon = 1e-14);
            }
        }
        assert_abs_diff_eq!(d[(1, 1)], beta.cos(), epsilon = 1e-15);
    }

    #[test]
    fn small_d_is_orthogonal() {
        for l in [1usize, 2, 5, 16, 33, 64] {
            let d = wigner_d(l, 1.234567);
            let w = 2 * l + 1;
            for i in 0..w {
                for j in 0..w {
                    let dot: f64 = (0..w).map(|k| d[(k, i)] * d[(k, j)]).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (dot - expect).abs() < 1e-12,
                        "l={l} ({i},{j}): {:e}",
                        (dot - expect).abs()
                    );
                }
            }
        }
    }

    #[test]
    fn big_d_trivial_cases() {
        let r = Rotation::new(0.9, 0.4, 2.2);
        let d0 = wigner_big_d::<f64>(0, &r);
        assert_abs_diff_eq!(d0[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d0[(0, 0)].im, 0.0, epsilon = 1e-15);

        let id = wigner_big_d::<f64>(3, &Rotation::identity());
        for i in 0..7 {
            for j in 0..7 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(id[(i, j)].re, expect, epsilon = 1e-14);
                assert_abs_diff_eq!(id[(i, j)].im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn homomorphism_under_composition() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..6 {
            let r1 = Rotation::random(&mut rng);
            let r2 = Rotation::random(&mut rng);
            let composed = r1.compose(&r2);
            for l in 0..=8usize {
                let d1 = wigner_big_d::<f64>(l, &r1);
                let d2 = wigner_big_d::<f64>(l, &r2);
                let dc = wigner_big_d::<f64>(l, &composed);
                let w = 2 * l + 1;
                let mut frob = 0.0f64;
                for i in 0..w {
                    for j in 0..w {
                        let mut acc = Complex::new(0.0, 0.0);
                        for k in 0..w {
                            acc += d1[(i, k)] * d2[(k, j)];
                        }
                        frob += (acc - dc[(i, j)]).norm_sqr();
                    }
                }
                assert!(frob.sqrt() < 1e-11, "l={l}: {:e}", frob.sqrt());
            }
        }
    }

    #[test]
    fn zyz_matrix_round_trip() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..50 {
            let r = Rotation::random(&mut rng);
            let back = r.matrix().to_zyz();
            let m1 = r.matrix().0;
            let m2 = back.matrix().0;
            for i in 0..3 {
                for j in 0..3 {
                    assert_abs_diff_eq!(m1[i][j], m2[i][j], epsilon = 1e-12);
                }
            }
        }
        // Gimbal poles.
        for beta in [0.0, PI] {
            let r = Rotation::new(1.1, beta, 0.7);
            let back = r.matrix().to_zyz();
            let m1 = r.matrix().0;
            let m2 = back.matrix().0;
            for i in 0..3 {
                for j in 0..3 {
                    assert_abs_diff_eq!(m1[i][j], m2[i][j], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn inverse_is_matrix_transpose() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let r = Rotation::random(&mut rng);
        let inv = r.inverse();
        let prod = r.matrix().mul(&inv.matrix()).0;
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(prod[i][j], expect, epsilon = 1e-13);
            }
        }
    }
}
