//! Spectral rotation and convolution.
//!
//! Rotation acts per degree as a left multiplication by `D^ℓ(R)` on both
//! manifolds (a vector action on `S²`, a block action on `SO(3)`), matching
//! the spatial definition `(L_R f)(x) = f(R⁻¹ x)`; the sign convention is
//! pinned by the resampling test below. Convolutions are per-degree
//! products: an outer product `f̂_ℓ ⊗ conj(φ̂_ℓ)` mapping `S²` into `SO(3)`
//! and the block product `f̂^ℓ (φ̂^ℓ)†` on `SO(3)`. Both therefore commute
//! with rotation exactly in exact arithmetic.

use ndarray::Array2;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::harmonics::{wigner_big_d_stack, Rotation};
use crate::needlet::NeedletCoefficients;
use crate::scalar::{Real, C};
use crate::spectral::{Spectral, SpectralS2, SpectralSo3};

/// Precomputed Wigner-D blocks of one rotation, reusable across signals.
#[derive(Debug, Clone)]
pub struct SpectralRotation<T: Real> {
    blocks: Vec<Array2<C<T>>>,
}

impl<T: Real> SpectralRotation<T> {
    pub fn new(l_max: usize, r: &Rotation) -> Self {
        SpectralRotation {
            blocks: wigner_big_d_stack(l_max, r),
        }
    }

    pub fn l_max(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, l: usize) -> &Array2<C<T>> {
        &self.blocks[l]
    }

    /// Rotate a spectral signal: `f̂_ℓ ← D^ℓ(R) f̂_ℓ`.
    pub fn apply(&self, spec: &Spectral<T>) -> Spectral<T> {
        assert!(
            spec.bandwidth() <= self.l_max(),
            "rotation prepared to degree {} cannot act on bandwidth {}",
            self.l_max(),
            spec.bandwidth()
        );
        let mut out = spec.clone();
        for c in 0..spec.channels() {
            for l in 0..=spec.bandwidth() {
                let d = &self.blocks[l];
                let w = 2 * l + 1;
                let src = spec.degree_entries(c, l);
                let dst = out.degree_entries_mut(c, l);
                match spec.manifold() {
                    crate::quadrature::Manifold::S2 => {
                        for i in 0..w {
                            let mut acc = Complex::new(T::zero(), T::zero());
                            for k in 0..w {
                                acc += d[(i, k)] * src[k];
                            }
                            dst[i] = acc;
                        }
                    }
                    crate::quadrature::Manifold::So3 => {
                        for i in 0..w {
                            for j in 0..w {
                                let mut acc = Complex::new(T::zero(), T::zero());
                                for k in 0..w {
                                    acc += d[(i, k)] * src[k * w + j];
                                }
                                dst[i * w + j] = acc;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Rotate every band of a needlet coefficient set.
    pub fn apply_needlet(&self, c: &NeedletCoefficients<T>) -> NeedletCoefficients<T> {
        let mut out = c.clone();
        for band in out.bands_mut() {
            *band = self.apply(band);
        }
        out
    }
}

/// Rotate a spectral signal by a single rotation.
pub fn rotate<T: Real>(spec: &Spectral<T>, r: &Rotation) -> Spectral<T> {
    SpectralRotation::new(spec.bandwidth(), r).apply(spec)
}

fn filter_channel(filter_channels: usize, signal_channels: usize, c: usize) -> Result<usize> {
    if filter_channels == 1 {
        Ok(0)
    } else if filter_channels == signal_channels {
        Ok(c)
    } else {
        Err(Error::invalid(format!(
            "filter has {filter_channels} channels, signal has {signal_channels}; expected 1 or equal"
        )))
    }
}

/// `S²` convolution in the frequency domain: degree block
/// `(m, n) ↦ f̂_{ℓ,m} conj(φ̂_{ℓ,n})`, an `SO(3)` spectrum.
pub fn s2_convolve<T: Real>(
    signal: &SpectralS2<T>,
    filter: &SpectralS2<T>,
) -> Result<SpectralSo3<T>> {
    if signal.bandwidth() != filter.bandwidth() {
        return Err(Error::invalid(format!(
            "bandwidth mismatch: signal {}, filter {}",
            signal.bandwidth(),
            filter.bandwidth()
        )));
    }
    let l_max = signal.bandwidth();
    let mut out = SpectralSo3::<T>::zeros(l_max, signal.channels());
    for c in 0..signal.channels() {
        let fc = filter_channel(filter.channels(), signal.channels(), c)?;
        for l in 0..=l_max {
            let f = signal.degree(c, l);
            let g = filter.degree(fc, l);
            let w = 2 * l + 1;
            let block = out.block_mut(c, l);
            for m in 0..w {
                for n in 0..w {
                    block[m * w + n] = f[m] * g[n].conj();
                }
            }
        }
    }
    Ok(out)
}

/// `SO(3)` convolution in the frequency domain: `f̂^ℓ (φ̂^ℓ)†` per degree.
pub fn so3_convolve<T: Real>(
    signal: &SpectralSo3<T>,
    filter: &SpectralSo3<T>,
) -> Result<SpectralSo3<T>> {
    if signal.bandwidth() != filter.bandwidth() {
        return Err(Error::invalid(format!(
            "bandwidth mismatch: signal {}, filter {}",
            signal.bandwidth(),
            filter.bandwidth()
        )));
    }
    let l_max = signal.bandwidth();
    let mut out = SpectralSo3::<T>::zeros(l_max, signal.channels());
    for c in 0..signal.channels() {
        let fc = filter_channel(filter.channels(), signal.channels(), c)?;
        for l in 0..=l_max {
            let f = signal.block(c, l);
            let g = filter.block(fc, l);
            let w = 2 * l + 1;
            let block = out.block_mut(c, l);
            for m in 0..w {
                for k in 0..w {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for n in 0..w {
                        acc += f[m * w + n] * g[k * w + n].conj();
                    }
                    block[m * w + k] = acc;
                }
            }
        }
    }
    Ok(out)
}

/// One spectral filter for a needlet band.
///
/// The default diagonal form carries one complex scalar per degree (a zonal
/// filter); the full form carries a complete spectrum and applies as the
/// manifold's convolution.
#[derive(Debug, Clone)]
pub enum BandFilter<T: Real> {
    Diagonal(Vec<C<T>>),
    Full(Spectral<T>),
}

impl<T: Real> BandFilter<T> {
    /// Diagonal filter that leaves every degree unchanged.
    pub fn identity(l_max: usize) -> Self {
        BandFilter::Diagonal(vec![Complex::new(T::one(), T::zero()); l_max + 1])
    }

    pub fn zero(l_max: usize) -> Self {
        BandFilter::Diagonal(vec![Complex::new(T::zero(), T::zero()); l_max + 1])
    }

    fn apply(&self, band: &Spectral<T>) -> Result<Spectral<T>> {
        match self {
            BandFilter::Diagonal(values) => {
                if values.len() <= band.bandwidth() {
                    return Err(Error::invalid(format!(
                        "diagonal filter covers {} degrees, band needs {}",
                        values.len(),
                        band.bandwidth() + 1
                    )));
                }
                Ok(band.scale_per_degree_complex(|l| values[l].conj()))
            }
            BandFilter::Full(filter) => {
                if filter.bandwidth() < band.bandwidth() {
                    return Err(Error::invalid(format!(
                        "full filter bandwidth {} below band bandwidth {}",
                        filter.bandwidth(),
                        band.bandwidth()
                    )));
                }
                let trimmed = filter.resized(band.bandwidth());
                match (band, &trimmed) {
                    (Spectral::S2(f), Spectral::S2(g)) => Ok(Spectral::So3(s2_convolve(f, g)?)),
                    (Spectral::So3(f), Spectral::So3(g)) => {
                        Ok(Spectral::So3(so3_convolve(f, g)?))
                    }
                    _ => Err(Error::invalid(
                        "filter manifold does not match the band manifold",
                    )),
                }
            }
        }
    }
}

/// Three spectral filters matched to the (lowpass, hp1, hp2) bands.
#[derive(Debug, Clone)]
pub struct FilterTriple<T: Real> {
    pub lowpass: BandFilter<T>,
    pub hp1: BandFilter<T>,
    pub hp2: BandFilter<T>,
}

impl<T: Real> FilterTriple<T> {
    pub fn identity(l_max: usize) -> Self {
        FilterTriple {
            lowpass: BandFilter::identity(l_max),
            hp1: BandFilter::identity(l_max),
            hp2: BandFilter::identity(l_max),
        }
    }

    pub fn zero(l_max: usize) -> Self {
        FilterTriple {
            lowpass: BandFilter::zero(l_max),
            hp1: BandFilter::zero(l_max),
            hp2: BandFilter::zero(l_max),
        }
    }

    /// The same diagonal profile on all three bands.
    pub fn diagonal(values: Vec<C<T>>) -> Self {
        FilterTriple {
            lowpass: BandFilter::Diagonal(values.clone()),
            hp1: BandFilter::Diagonal(values.clone()),
            hp2: BandFilter::Diagonal(values),
        }
    }
}

/// Apply a filter triple band-wise: `φ̂₁` to the low pass, `φ̂₂` to every
/// `w¹` band, `φ̂₃` to every `w²` band. Band supports are preserved because
/// each application is a per-degree product.
pub fn needlet_block_convolve<T: Real>(
    c: &NeedletCoefficients<T>,
    t: &FilterTriple<T>,
) -> Result<NeedletCoefficients<T>> {
    let lowpass = t.lowpass.apply(c.lowpass())?;
    let mut highpass = Vec::new();
    for j in c.highpass_scales() {
        let (w1, w2) = c.highpass(j);
        highpass.push((t.hp1.apply(w1)?, t.hp2.apply(w2)?));
    }
    NeedletCoefficients::from_bands(c.j0(), c.j_end(), lowpass, highpass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::{eval_s2, eval_so3, s2_synthesis, so3_synthesis, vector_angles};
    use crate::needlet::{decompose, reconstruct};
    use crate::quadrature::{s2_rule, so3_rule, Manifold};
    use crate::spectral::random_spectral;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::sync::Arc;

    fn random(manifold: Manifold, l: usize, seed: u64) -> Spectral<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        random_spectral(manifold, l, 1, 0.0, &mut rng)
    }

    #[test]
    fn identity_rotation_is_identity() {
        for manifold in [Manifold::S2, Manifold::So3] {
            let f = random(manifold, 6, 1);
            let g = rotate(&f, &Rotation::identity());
            assert!(f.diff_norm_sq(&g).sqrt() < 1e-13);
        }
    }

    #[test]
    fn rotation_composition() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for manifold in [Manifold::S2, Manifold::So3] {
            let f = random(manifold, 8, 3);
            for _ in 0..4 {
                let r1 = Rotation::random(&mut rng);
                let r2 = Rotation::random(&mut rng);
                let chained = rotate(&rotate(&f, &r1), &r2);
                let direct = rotate(&f, &r2.compose(&r1));
                assert!(
                    chained.diff_norm_sq(&direct).sqrt() < 1e-11,
                    "{manifold:?}: {:e}",
                    chained.diff_norm_sq(&direct).sqrt()
                );
            }
        }
    }

    #[test]
    fn rotation_matches_spatial_resampling_s2() {
        // Samples of the rotated spectrum must equal f(R⁻¹ x) at the grid.
        let l = 8;
        let rule = Arc::new(s2_rule(l).unwrap());
        let f = random(Manifold::S2, l, 5);
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let r = Rotation::random(&mut rng);
        let rotated = rotate(&f, &r);
        let grid = s2_synthesis(rotated.as_s2().unwrap(), &rule).unwrap();
        let inv = r.inverse().matrix();
        let f_s2 = f.as_s2().unwrap();
        for (k, (p, _)) in rule.iter().enumerate() {
            let y = inv.apply(crate::harmonics::unit_vector(p[0], p[1]));
            let (alpha, beta) = vector_angles(y);
            let direct = eval_s2(f_s2, 0, alpha, beta);
            let sampled = grid.samples()[k];
            assert!(
                (direct - sampled).norm() < 1e-10,
                "point {k}: {:e}",
                (direct - sampled).norm()
            );
        }
    }

    #[test]
    fn rotation_matches_spatial_resampling_so3() {
        let l = 4;
        let rule = Arc::new(so3_rule(l).unwrap());
        let f = random(Manifold::So3, l, 7);
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let r = Rotation::random(&mut rng);
        let rotated = rotate(&f, &r);
        let grid = so3_synthesis(rotated.as_so3().unwrap(), &rule).unwrap();
        let r_inv = r.inverse();
        let f_so3 = f.as_so3().unwrap();
        for k in (0..rule.n_points()).step_by(37) {
            let p = rule.point(k);
            let q = Rotation::new(p[0], p[1], p[2]);
            let moved = r_inv.compose(&q);
            let direct = eval_so3(f_so3, 0, moved.alpha, moved.beta, moved.gamma);
            let sampled = grid.samples()[k];
            assert!(
                (direct - sampled).norm() < 1e-10,
                "point {k}: {:e}",
                (direct - sampled).norm()
            );
        }
    }

    #[test]
    fn analysis_of_rotated_samples_matches_spectral_rotation() {
        // Rotate-then-analyze equals analyze-then-rotate.
        let l = 6;
        let rule = Arc::new(s2_rule(l).unwrap());
        let f = random(Manifold::S2, l, 9);
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let r = Rotation::random(&mut rng);
        let inv = r.inverse().matrix();
        let mut grid = crate::spectral::GridSignal::<f64>::zeros(Arc::clone(&rule), 1);
        let f_s2 = f.as_s2().unwrap();
        for (k, (p, _)) in rule.iter().enumerate() {
            let y = inv.apply(crate::harmonics::unit_vector(p[0], p[1]));
            let (alpha, beta) = vector_angles(y);
            grid.samples_mut()[k] = eval_s2(f_s2, 0, alpha, beta);
        }
        let analyzed = Spectral::S2(crate::harmonics::s2_analysis(&grid).unwrap());
        let expected = rotate(&f, &r);
        assert!(
            analyzed.diff_norm_sq(&expected).sqrt() < 1e-10,
            "{:e}",
            analyzed.diff_norm_sq(&expected).sqrt()
        );
    }

    #[test]
    fn s2_convolve_unit_coefficients() {
        let mut f = SpectralS2::<f64>::zeros(3, 1);
        let mut g = SpectralS2::<f64>::zeros(3, 1);
        f.set(0, 2, 1, Complex::new(1.0, 0.0));
        g.set(0, 2, -1, Complex::new(1.0, 0.0));
        let out = s2_convolve(&f, &g).unwrap();
        for l in 0..=3usize {
            let li = l as isize;
            for m in -li..=li {
                for n in -li..=li {
                    let z = out.get(0, l, m, n);
                    if (l, m, n) == (2, 1, -1) {
                        assert_eq!(z, Complex::new(1.0, 0.0));
                    } else {
                        assert_eq!(z, Complex::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn s2_convolve_zero_degree_blocks_stay_zero() {
        let f = random(Manifold::S2, 4, 11);
        let mut g = SpectralS2::<f64>::zeros(4, 1);
        g.set(0, 1, 0, Complex::new(0.3, 0.1));
        let out = s2_convolve(f.as_s2().unwrap(), &g).unwrap();
        for l in [0usize, 2, 3, 4] {
            assert_eq!(Spectral::So3(out.clone()).norm_sq_degrees(l, l), 0.0);
        }
    }

    #[test]
    fn so3_convolve_identity_filter() {
        let f = random(Manifold::So3, 5, 13);
        let mut id = SpectralSo3::<f64>::zeros(5, 1);
        for l in 0..=5usize {
            let li = l as isize;
            for m in -li..=li {
                id.set(0, l, m, m, Complex::new(1.0, 0.0));
            }
        }
        let out = so3_convolve(f.as_so3().unwrap(), &id).unwrap();
        assert!(Spectral::So3(out).diff_norm_sq(&f).sqrt() < 1e-14);
    }

    #[test]
    fn so3_convolve_unit_entries() {
        // Single entries multiply per the matrix index rule:
        // out[m,k] = f[m,n] conj(g[k,n]).
        let mut f = SpectralSo3::<f64>::zeros(2, 1);
        let mut g = SpectralSo3::<f64>::zeros(2, 1);
        f.set(0, 2, 1, -2, Complex::new(2.0, 0.0));
        g.set(0, 2, 0, -2, Complex::new(0.0, 1.0));
        let out = so3_convolve(&f, &g).unwrap();
        for l in 0..=2usize {
            let li = l as isize;
            for m in -li..=li {
                for k in -li..=li {
                    let z = out.get(0, l, m, k);
                    if (l, m, k) == (2, 1, 0) {
                        assert_eq!(z, Complex::new(0.0, -2.0));
                    } else {
                        assert_eq!(z, Complex::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn bandwidth_mismatch_rejected() {
        let f = SpectralS2::<f64>::zeros(3, 1);
        let g = SpectralS2::<f64>::zeros(4, 1);
        assert!(s2_convolve(&f, &g).is_err());
        let f3 = SpectralSo3::<f64>::zeros(3, 1);
        let g3 = SpectralSo3::<f64>::zeros(4, 1);
        assert!(so3_convolve(&f3, &g3).is_err());
    }

    #[test]
    fn so3_convolution_is_equivariant() {
        let f = random(Manifold::So3, 8, 17);
        let g = random(Manifold::So3, 8, 18);
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        let g_so3 = g.as_so3().unwrap();
        for _ in 0..5 {
            let r = Rotation::random(&mut rng);
            let lhs = so3_convolve(rotate(&f, &r).as_so3().unwrap(), g_so3).unwrap();
            let rhs = rotate(&Spectral::So3(so3_convolve(f.as_so3().unwrap(), g_so3).unwrap()), &r);
            let err = Spectral::So3(lhs).diff_norm_sq(&rhs);
            assert!(err < 1e-24, "aggregate {err:e}");
        }
    }

    #[test]
    fn s2_convolution_is_equivariant() {
        let f = random(Manifold::S2, 8, 21);
        let g = random(Manifold::S2, 8, 22);
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let g_s2 = g.as_s2().unwrap();
        for _ in 0..5 {
            let r = Rotation::random(&mut rng);
            let lhs = s2_convolve(rotate(&f, &r).as_s2().unwrap(), g_s2).unwrap();
            let rhs = rotate(&Spectral::So3(s2_convolve(f.as_s2().unwrap(), g_s2).unwrap()), &r);
            let err = Spectral::So3(lhs).diff_norm_sq(&rhs);
            assert!(err < 1e-24, "aggregate {err:e}");
        }
    }

    #[test]
    fn convolution_is_bilinear() {
        let f = random(Manifold::So3, 4, 25);
        let g = random(Manifold::So3, 4, 26);
        let h = random(Manifold::So3, 4, 27);
        let fg = so3_convolve(f.as_so3().unwrap(), g.as_so3().unwrap()).unwrap();
        let fh = so3_convolve(f.as_so3().unwrap(), h.as_so3().unwrap()).unwrap();
        let sum_inputs = Spectral::So3(g.as_so3().unwrap().clone());
        let gh = sum_inputs.add(&h);
        let f_gh = so3_convolve(f.as_so3().unwrap(), gh.as_so3().unwrap()).unwrap();
        let direct = Spectral::So3(fg).add(&Spectral::So3(fh));
        assert!(direct.diff_norm_sq(&Spectral::So3(f_gh)).sqrt() < 1e-12);
    }

    #[test]
    fn real_origin_spectra_convolve_to_real_origin() {
        let f = crate::spectral::symmetrize_real(&random(Manifold::S2, 5, 29));
        let g = crate::spectral::symmetrize_real(&random(Manifold::S2, 5, 30));
        let out = s2_convolve(f.as_s2().unwrap(), g.as_s2().unwrap()).unwrap();
        assert!(out.real_origin_residual() < 1e-14);
    }

    #[test]
    fn identity_triple_leaves_coefficients_unchanged() {
        let f = random(Manifold::So3, 16, 31);
        let c = decompose(&f, 2).unwrap();
        let out = needlet_block_convolve(&c, &FilterTriple::identity(16)).unwrap();
        assert_eq!(c.diff_norm_sq(&out), 0.0);
    }

    #[test]
    fn zero_triple_annihilates() {
        let f = random(Manifold::So3, 16, 33);
        let c = decompose(&f, 2).unwrap();
        let out = needlet_block_convolve(&c, &FilterTriple::zero(16)).unwrap();
        assert_eq!(out.norm_sq(), 0.0);
    }

    #[test]
    fn block_convolve_with_identity_reconstructs() {
        let f = random(Manifold::So3, 16, 35);
        let c = decompose(&f, 3).unwrap();
        let out = needlet_block_convolve(&c, &FilterTriple::identity(16)).unwrap();
        let back = reconstruct(&out).unwrap();
        let padded = f.resized(back.bandwidth());
        assert!(back.diff_norm_sq(&padded).sqrt() < 1e-12);
    }

    #[test]
    fn block_convolve_rejects_short_filter() {
        let f = random(Manifold::So3, 16, 37);
        let c = decompose(&f, 2).unwrap();
        let short = FilterTriple::identity(3);
        assert!(needlet_block_convolve(&c, &short).is_err());
    }

    #[test]
    fn needlet_block_convolution_is_equivariant() {
        let f = random(Manifold::So3, 16, 39);
        let mut rng = ChaCha12Rng::seed_from_u64(40);
        let mut values = Vec::new();
        for _ in 0..=16 {
            values.push(Complex::new(
                rand::Rng::gen_range(&mut rng, -1.0..1.0),
                rand::Rng::gen_range(&mut rng, -1.0..1.0),
            ));
        }
        let triple = FilterTriple::diagonal(values);
        for _ in 0..5 {
            let r = Rotation::random(&mut rng);
            let op = SpectralRotation::<f64>::new(16, &r);
            let lhs = needlet_block_convolve(&decompose(&op.apply(&f), 3).unwrap(), &triple)
                .unwrap();
            let rhs =
                op.apply_needlet(&needlet_block_convolve(&decompose(&f, 3).unwrap(), &triple)
                    .unwrap());
            let err = lhs.diff_norm_sq(&rhs);
            assert!(err < 1e-13, "aggregate {err:e}");
        }
    }
}
