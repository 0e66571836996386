//! Forward and inverse generalized Fourier transforms.
//!
//! The equispaced axes (longitude on `S²`, the two rotation angles on
//! `SO(3)`) are handled by FFTs; the Gauss-Legendre colatitude axis by
//! direct weighted sums. Reduction order is fixed (colatitudes ascending),
//! so results do not depend on scheduling.

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use super::legendre::LegendreTable;
use super::so3_norm;
use super::wigner::wigner_d_stack;
use crate::error::{Error, Result};
use crate::quadrature::{Manifold, QuadratureRule};
use crate::scalar::{Real, C};
use crate::spectral::{GridSignal, SpectralS2, SpectralSo3};

/// Orthonormal spherical harmonic `Y_{ℓ,m}(α, β)`.
///
/// Negative orders follow `Y_{ℓ,-m} = (-1)^m conj(Y_{ℓ,m})`.
pub fn sph_harm(l: usize, m: isize, alpha: f64, beta: f64) -> Result<Complex<f64>> {
    if m.unsigned_abs() > l {
        return Err(Error::invalid(format!("|m| = {} exceeds l = {l}", m.abs())));
    }
    let table = LegendreTable::new(l, beta.cos());
    Ok(sph_harm_from_table(&table, l, m, alpha))
}

#[inline]
fn order_sign(m: isize) -> f64 {
    if m >= 0 || m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[inline]
fn sph_harm_from_table(table: &LegendreTable, l: usize, m: isize, alpha: f64) -> Complex<f64> {
    let p = table.value(l, m.unsigned_abs());
    Complex::from_polar(1.0, m as f64 * alpha) * (order_sign(m) * p)
}

/// Orthonormal `SO(3)` basis function
/// `u^ℓ_{mn}(α,β,γ) = √((2ℓ+1)/8π²) e^{imα} d^ℓ_{mn}(β) e^{inγ}`.
pub fn so3_basis(l: usize, m: isize, n: isize, alpha: f64, beta: f64, gamma: f64) -> Complex<f64> {
    let stack = wigner_d_stack(l, beta);
    let li = l as isize;
    let d = stack[l][((m + li) as usize, (n + li) as usize)];
    Complex::from_polar(1.0, m as f64 * alpha + n as f64 * gamma) * (so3_norm(l) * d)
}

/// FFT bin of order `m` in a length-`n` transform.
#[inline]
fn bin(m: isize, n: usize) -> usize {
    m.rem_euclid(n as isize) as usize
}

fn expect_manifold(rule: &QuadratureRule, manifold: Manifold) -> Result<()> {
    if rule.manifold() != manifold {
        return Err(Error::invalid(format!(
            "rule is on {}, expected {}",
            rule.manifold(),
            manifold
        )));
    }
    Ok(())
}

/// Forward transform on `S²`: coefficients up to the rule's bandwidth.
pub fn s2_analysis<T: Real>(signal: &GridSignal<T>) -> Result<SpectralS2<T>> {
    let rule = signal.rule();
    expect_manifold(rule, Manifold::S2)?;
    let l_max = rule.bandwidth();
    let na = rule.alphas().len();
    let nb = rule.betas().len();
    let scale = rule.angular_weight();

    let fft = FftPlanner::<T>::new().plan_fft_forward(na);
    let mut out = SpectralS2::<T>::zeros(l_max, signal.channels());
    let mut line = vec![Complex::new(T::zero(), T::zero()); na];

    for c in 0..signal.channels() {
        let samples = signal.channel(c);
        // FFT along α for every colatitude: F[k][iβ].
        let mut f_grid = vec![Complex::new(T::zero(), T::zero()); na * nb];
        for ib in 0..nb {
            for ia in 0..na {
                line[ia] = samples[ia * nb + ib];
            }
            fft.process(&mut line);
            for k in 0..na {
                f_grid[k * nb + ib] = line[k];
            }
        }
        let coeffs = out.channel_mut(c);
        for ib in 0..nb {
            let table = LegendreTable::new(l_max, rule.betas()[ib].cos());
            let w = rule.beta_weights()[ib] * scale;
            for m in -(l_max as isize)..=(l_max as isize) {
                let z = f_grid[bin(m, na) * nb + ib];
                let mu = m.unsigned_abs();
                let sgn = order_sign(m) * w;
                let run = table.order_run(mu);
                for (dl, &p) in run.iter().enumerate() {
                    let l = mu + dl;
                    coeffs[SpectralS2::<T>::idx(l, m)] += z * T::of(sgn * p);
                }
            }
        }
    }
    Ok(out)
}

/// Inverse transform on `S²`: evaluate on the rule's points.
pub fn s2_synthesis<T: Real>(
    spec: &SpectralS2<T>,
    rule: &Arc<QuadratureRule>,
) -> Result<GridSignal<T>> {
    expect_manifold(rule, Manifold::S2)?;
    if rule.bandwidth() < spec.bandwidth() {
        return Err(Error::invalid(format!(
            "rule bandwidth {} below signal bandwidth {}",
            rule.bandwidth(),
            spec.bandwidth()
        )));
    }
    let l_spec = spec.bandwidth();
    let na = rule.alphas().len();
    let nb = rule.betas().len();

    let ifft = FftPlanner::<T>::new().plan_fft_inverse(na);
    let mut out = GridSignal::<T>::zeros(Arc::clone(rule), spec.channels());
    let mut line = vec![Complex::new(T::zero(), T::zero()); na];

    for c in 0..spec.channels() {
        let coeffs = spec.channel(c);
        for ib in 0..nb {
            let table = LegendreTable::new(l_spec, rule.betas()[ib].cos());
            line.fill(Complex::new(T::zero(), T::zero()));
            for m in -(l_spec as isize)..=(l_spec as isize) {
                let mu = m.unsigned_abs();
                let sgn = order_sign(m);
                let run = table.order_run(mu);
                let mut acc = Complex::new(T::zero(), T::zero());
                for (dl, &p) in run.iter().enumerate() {
                    let l = mu + dl;
                    acc += coeffs[SpectralS2::<T>::idx(l, m)] * T::of(sgn * p);
                }
                line[bin(m, na)] = acc;
            }
            ifft.process(&mut line);
            let samples = out.channel_mut(c);
            for ia in 0..na {
                samples[ia * nb + ib] = line[ia];
            }
        }
    }
    Ok(out)
}

fn fft_2d<T: Real>(slab: &mut [C<T>], rows: usize, cols: usize, fft: &Arc<dyn Fft<T>>) {
    debug_assert_eq!(rows, cols);
    // Rows in place.
    for r in 0..rows {
        fft.process(&mut slab[r * cols..(r + 1) * cols]);
    }
    // Columns through a scratch line.
    let mut line = vec![Complex::new(T::zero(), T::zero()); rows];
    for ccol in 0..cols {
        for r in 0..rows {
            line[r] = slab[r * cols + ccol];
        }
        fft.process(&mut line);
        for r in 0..rows {
            slab[r * cols + ccol] = line[r];
        }
    }
}

/// Forward transform on `SO(3)`: coefficients up to the rule's bandwidth.
pub fn so3_analysis<T: Real>(signal: &GridSignal<T>) -> Result<SpectralSo3<T>> {
    let rule = signal.rule();
    expect_manifold(rule, Manifold::So3)?;
    let l_max = rule.bandwidth();
    let na = rule.alphas().len();
    let nb = rule.betas().len();
    let ng = rule.gammas().len();
    let scale = rule.angular_weight();

    let fft = FftPlanner::<T>::new().plan_fft_forward(na);
    let mut out = SpectralSo3::<T>::zeros(l_max, signal.channels());
    let mut slab = vec![Complex::new(T::zero(), T::zero()); na * ng];

    for c in 0..signal.channels() {
        let samples = signal.channel(c);
        let coeffs = out.channel_mut(c);
        for ib in 0..nb {
            // Gather the (α, γ) slab at this colatitude; α is the row.
            for ia in 0..na {
                let base = (ia * nb + ib) * ng;
                slab[ia * ng..(ia + 1) * ng].copy_from_slice(&samples[base..base + ng]);
            }
            // Row FFT covers γ, column FFT covers α.
            fft_2d(&mut slab, na, ng, &fft);
            let d_stack = wigner_d_stack(l_max, rule.betas()[ib]);
            let w = rule.beta_weights()[ib] * scale;
            for (l, d) in d_stack.iter().enumerate() {
                let li = l as isize;
                let factor = w * so3_norm(l);
                let base = SpectralSo3::<T>::block_offset(l);
                let width = 2 * l + 1;
                for m in -li..=li {
                    let row = bin(m, na) * ng;
                    let um = (m + li) as usize;
                    for n in -li..=li {
                        let un = (n + li) as usize;
                        let z = slab[row + bin(n, ng)];
                        coeffs[base + um * width + un] += z * T::of(factor * d[(um, un)]);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Inverse transform on `SO(3)`: evaluate on the rule's points.
pub fn so3_synthesis<T: Real>(
    spec: &SpectralSo3<T>,
    rule: &Arc<QuadratureRule>,
) -> Result<GridSignal<T>> {
    expect_manifold(rule, Manifold::So3)?;
    if rule.bandwidth() < spec.bandwidth() {
        return Err(Error::invalid(format!(
            "rule bandwidth {} below signal bandwidth {}",
            rule.bandwidth(),
            spec.bandwidth()
        )));
    }
    let l_spec = spec.bandwidth();
    let na = rule.alphas().len();
    let nb = rule.betas().len();
    let ng = rule.gammas().len();

    let ifft = FftPlanner::<T>::new().plan_fft_inverse(na);
    let mut out = GridSignal::<T>::zeros(Arc::clone(rule), spec.channels());
    let mut slab = vec![Complex::new(T::zero(), T::zero()); na * ng];

    for c in 0..spec.channels() {
        let coeffs = spec.channel(c);
        let samples = out.channel_mut(c);
        for ib in 0..nb {
            let d_stack = wigner_d_stack(l_spec, rule.betas()[ib]);
            slab.fill(Complex::new(T::zero(), T::zero()));
            for (l, d) in d_stack.iter().enumerate() {
                let li = l as isize;
                let factor = so3_norm(l);
                let base = SpectralSo3::<T>::block_offset(l);
                let width = 2 * l + 1;
                for m in -li..=li {
                    let row = bin(m, na) * ng;
                    let um = (m + li) as usize;
                    for n in -li..=li {
                        let un = (n + li) as usize;
                        slab[row + bin(n, ng)] +=
                            coeffs[base + um * width + un] * T::of(factor * d[(um, un)]);
                    }
                }
            }
            fft_2d(&mut slab, na, ng, &ifft);
            for ia in 0..na {
                let base = (ia * nb + ib) * ng;
                samples[base..base + ng].copy_from_slice(&slab[ia * ng..(ia + 1) * ng]);
            }
        }
    }
    Ok(out)
}

/// Evaluate an `S²` spectral signal at an arbitrary point, in f64.
pub fn eval_s2<T: Real>(spec: &SpectralS2<T>, channel: usize, alpha: f64, beta: f64) -> Complex<f64> {
    let table = LegendreTable::new(spec.bandwidth(), beta.cos());
    let mut acc = Complex::new(0.0, 0.0);
    for l in 0..=spec.bandwidth() {
        for m in -(l as isize)..=(l as isize) {
            let y = sph_harm_from_table(&table, l, m, alpha);
            acc += crate::scalar::promote(spec.get(channel, l, m)) * y;
        }
    }
    acc
}

/// Evaluate an `SO(3)` spectral signal at an arbitrary rotation, in f64.
pub fn eval_so3<T: Real>(
    spec: &SpectralSo3<T>,
    channel: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Complex<f64> {
    let stack = wigner_d_stack(spec.bandwidth(), beta);
    let mut acc = Complex::new(0.0, 0.0);
    for (l, d) in stack.iter().enumerate() {
        let li = l as isize;
        let norm = so3_norm(l);
        for m in -li..=li {
            for n in -li..=li {
                let u = Complex::from_polar(1.0, m as f64 * alpha + n as f64 * gamma)
                    * (norm * d[((m + li) as usize, (n + li) as usize)]);
                acc += crate::scalar::promote(spec.get(channel, l, m, n)) * u;
            }
        }
    }
    acc
}
