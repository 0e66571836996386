//! Non-linear and resolution operators: wavelet shrinkage, spectral
//! pooling and the spatial-ReLU reference path.

use num_complex::Complex;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::harmonics::{s2_analysis, s2_synthesis, so3_analysis, so3_synthesis};
use crate::needlet::NeedletCoefficients;
use crate::quadrature::QuadratureRule;
use crate::scalar::{Real, C};
use crate::spectral::Spectral;

/// Parameters of the soft-threshold shrinkage.
///
/// The threshold is `λ = σ √(2 log N) / √N`; by default `N` counts every
/// high-pass coefficient the operator touches (all scales and channels
/// together), and can be overridden.
#[derive(Debug, Clone, Copy)]
pub struct ShrinkageConfig {
    sigma: f64,
    count_override: Option<usize>,
}

impl ShrinkageConfig {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma.is_nan() || sigma < 0.0 {
            return Err(Error::invalid(format!(
                "noise level must be non-negative, got {sigma}"
            )));
        }
        Ok(ShrinkageConfig {
            sigma,
            count_override: None,
        })
    }

    /// Fix the coefficient count `N` instead of deriving it per input.
    pub fn with_count(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("coefficient count must be at least 1"));
        }
        self.count_override = Some(n);
        Ok(self)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Threshold for an input carrying `default_count` high-pass entries.
    pub fn threshold(&self, default_count: usize) -> f64 {
        let n = self.count_override.unwrap_or(default_count).max(1) as f64;
        self.sigma * (2.0 * n.ln()).sqrt() / n.sqrt()
    }
}

/// Complex soft threshold: shrink the magnitude by `λ`, keep the phase.
#[inline]
pub fn soft_threshold<T: Real>(z: C<T>, lambda: T) -> C<T> {
    let a = z.norm();
    if a <= lambda {
        Complex::new(T::zero(), T::zero())
    } else {
        z * ((a - lambda) / a)
    }
}

/// Soft-threshold every high-pass coefficient; the low pass is returned
/// untouched. With `σ = 0` the operator is the identity, bit for bit.
pub fn shrink<T: Real>(c: &NeedletCoefficients<T>, cfg: &ShrinkageConfig) -> NeedletCoefficients<T> {
    if cfg.sigma == 0.0 {
        return c.clone();
    }
    let lambda = T::of(cfg.threshold(c.highpass_len()));
    let mut out = c.clone();
    for band in out.highpass_bands_mut() {
        for z in band.coeffs_mut() {
            *z = soft_threshold(*z, lambda);
        }
    }
    out
}

/// Keep degrees `0 ..= ⌊L/2⌋`, halving the bandwidth.
///
/// Retained blocks are copied verbatim, which is what makes the operator
/// commute with rotation exactly rather than to roundoff.
pub fn spectral_pool<T: Real>(spec: &Spectral<T>) -> Result<Spectral<T>> {
    if spec.bandwidth() < 2 {
        return Err(Error::invalid(format!(
            "bandwidth {} too small to pool",
            spec.bandwidth()
        )));
    }
    Ok(spec.resized(spec.bandwidth() / 2))
}

/// ReLU in the sample domain: synthesize on `rule`, clamp the real part at
/// zero, drop the imaginary part, analyze back.
///
/// The rule's bandwidth must equal the signal's. Band-limited transforms of
/// real signals carry only roundoff-level imaginary parts, so zeroing them
/// loses nothing for the intended inputs.
pub fn spatial_relu<T: Real>(
    spec: &Spectral<T>,
    rule: &Arc<QuadratureRule>,
) -> Result<Spectral<T>> {
    if rule.manifold() != spec.manifold() || rule.bandwidth() != spec.bandwidth() {
        return Err(Error::invalid(format!(
            "rule ({}, L = {}) does not match signal ({}, L = {})",
            rule.manifold(),
            rule.bandwidth(),
            spec.manifold(),
            spec.bandwidth()
        )));
    }
    let relu = |grid: &mut crate::spectral::GridSignal<T>| {
        for z in grid.samples_mut() {
            *z = Complex::new(z.re.max(T::zero()), T::zero());
        }
    };
    match spec {
        Spectral::S2(s) => {
            let mut grid = s2_synthesis(s, rule)?;
            relu(&mut grid);
            Ok(Spectral::S2(s2_analysis(&grid)?))
        }
        Spectral::So3(s) => {
            let mut grid = so3_synthesis(s, rule)?;
            relu(&mut grid);
            Ok(Spectral::So3(so3_analysis(&grid)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::rotate;
    use crate::harmonics::Rotation;
    use crate::needlet::decompose;
    use crate::quadrature::{rule_for, Manifold};
    use crate::spectral::{random_spectral, symmetrize_real, GridSignal};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn random(manifold: Manifold, l: usize, seed: u64) -> Spectral<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        random_spectral(manifold, l, 1, 0.0, &mut rng)
    }

    #[test]
    fn threshold_formula() {
        let cfg = ShrinkageConfig::new(0.5).unwrap();
        let n = 1000.0f64;
        let expect = 0.5 * (2.0 * n.ln()).sqrt() / n.sqrt();
        assert_eq!(cfg.threshold(1000), expect);
        let fixed = cfg.with_count(10).unwrap();
        assert_eq!(fixed.threshold(1000), 0.5 * (2.0 * 10f64.ln()).sqrt() / 10f64.sqrt());
        assert!(ShrinkageConfig::new(-0.1).is_err());
    }

    #[test]
    fn soft_threshold_cases() {
        let lam = 0.25f64;
        // |x| = λ → 0
        assert_eq!(
            soft_threshold(Complex::new(0.25, 0.0), lam),
            Complex::new(0.0, 0.0)
        );
        // x = 2λ → λ, sign preserved
        let out = soft_threshold(Complex::new(0.5, 0.0), lam);
        assert!((out.re - 0.25).abs() < 1e-15 && out.im == 0.0);
        let out = soft_threshold(Complex::new(-0.5, 0.0), lam);
        assert!((out.re + 0.25).abs() < 1e-15);
        // Phase preserved for complex input.
        let z = Complex::from_polar(0.8, 1.1);
        let out = soft_threshold(z, lam);
        assert!((out.arg() - z.arg()).abs() < 1e-14);
        assert!((out.norm() - 0.55).abs() < 1e-14);
    }

    #[test]
    fn sigma_zero_is_identity() {
        let f = random(Manifold::So3, 16, 1);
        let c = decompose(&f, 2).unwrap();
        let out = shrink(&c, &ShrinkageConfig::new(0.0).unwrap());
        assert_eq!(c.diff_norm_sq(&out), 0.0);
    }

    #[test]
    fn low_pass_band_is_never_touched() {
        let f = random(Manifold::So3, 16, 2);
        let c = decompose(&f, 2).unwrap();
        let out = shrink(&c, &ShrinkageConfig::new(0.8).unwrap());
        assert_eq!(c.lowpass().diff_norm_sq(out.lowpass()), 0.0);
        assert!(out.highpass_norm_sq() < c.highpass_norm_sq());
    }

    #[test]
    fn shrinkage_is_non_expansive_and_monotone_in_sigma() {
        let f = random(Manifold::S2, 16, 3);
        let c = decompose(&f, 2).unwrap();
        let mut previous = c.highpass_norm_sq();
        for sigma in [1e-3, 1e-2, 0.1, 0.5, 2.0] {
            let out = shrink(&c, &ShrinkageConfig::new(sigma).unwrap());
            // Per coefficient |Shr(x)| ≤ |x|.
            for (a, b) in c
                .highpass_bands()
                .flat_map(|band| band.coeffs())
                .zip(out.highpass_bands().flat_map(|band| band.coeffs()))
            {
                assert!(b.norm() <= a.norm() + 1e-15);
            }
            let energy = out.highpass_norm_sq();
            assert!(energy <= previous + 1e-15);
            previous = energy;
        }
    }

    #[test]
    fn pool_counts_and_repeat() {
        let f = random(Manifold::S2, 4, 4);
        let pooled = spectral_pool(&f).unwrap();
        assert_eq!(pooled.bandwidth(), 2);
        assert_eq!(pooled.coeffs().len(), 9);
        let twice = spectral_pool(&pooled).unwrap();
        assert_eq!(twice.bandwidth(), 1);
        // Same as retaining ⌊L/4⌋ from the start.
        assert!(twice.diff_norm_sq(&f.resized(1)) == 0.0);
        assert!(spectral_pool(&f.resized(1)).is_err());
    }

    #[test]
    fn pool_commutes_with_rotation_bitwise() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for manifold in [Manifold::S2, Manifold::So3] {
            let f = random(manifold, 8, 6);
            let r = Rotation::random(&mut rng);
            let a = spectral_pool(&rotate(&f, &r)).unwrap();
            let b = rotate(&spectral_pool(&f).unwrap(), &r);
            assert_eq!(a.coeffs(), b.coeffs(), "{manifold:?}");
        }
    }

    #[test]
    fn pool_is_a_projection() {
        let f = random(Manifold::S2, 8, 7);
        let once = spectral_pool(&f).unwrap();
        let padded = once.resized(8);
        let again = spectral_pool(&padded).unwrap();
        assert_eq!(once.coeffs(), again.coeffs());
    }

    #[test]
    fn relu_is_identity_on_non_negative_signals() {
        // |h|² of a half-bandwidth signal is band-limited and ≥ 0.
        let l = 8;
        let rule = Arc::new(rule_for(Manifold::S2, l).unwrap());
        let h = symmetrize_real(&random(Manifold::S2, l / 2, 8));
        let h_grid = s2_synthesis(h.as_s2().unwrap(), &rule).unwrap();
        let mut grid = GridSignal::<f64>::zeros(Arc::clone(&rule), 1);
        for (dst, src) in grid.samples_mut().iter_mut().zip(h_grid.samples()) {
            *dst = Complex::new(src.norm_sqr(), 0.0);
        }
        let spec = Spectral::S2(s2_analysis(&grid).unwrap());
        let out = spatial_relu(&spec, &rule).unwrap();
        let rel = out.diff_norm_sq(&spec).sqrt() / spec.norm_sq().sqrt();
        assert!(rel < 1e-11, "rel {rel:e}");
    }

    #[test]
    fn relu_of_f_and_minus_f_sum_to_abs() {
        let l = 6;
        let rule = Arc::new(rule_for(Manifold::S2, l).unwrap());
        let f = symmetrize_real(&random(Manifold::S2, l, 9));
        let minus = f.map_entries(|z| -z);
        let a = spatial_relu(&f, &rule).unwrap();
        let b = spatial_relu(&minus, &rule).unwrap();
        // Oracle: analysis of |f| on the same grid.
        let grid = s2_synthesis(f.as_s2().unwrap(), &rule).unwrap();
        let mut abs_grid = GridSignal::<f64>::zeros(Arc::clone(&rule), 1);
        for (dst, src) in abs_grid.samples_mut().iter_mut().zip(grid.samples()) {
            *dst = Complex::new(src.re.abs(), 0.0);
        }
        let abs_spec = Spectral::S2(s2_analysis(&abs_grid).unwrap());
        let sum = a.add(&b);
        assert!(sum.diff_norm_sq(&abs_spec).sqrt() < 1e-11);
    }

    #[test]
    fn real_signals_have_negligible_imaginary_leakage() {
        let l = 12;
        let rule = Arc::new(rule_for(Manifold::S2, l).unwrap());
        let f = symmetrize_real(&random(Manifold::S2, l, 10));
        let grid = s2_synthesis(f.as_s2().unwrap(), &rule).unwrap();
        let worst = grid
            .samples()
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-12, "imaginary leakage {worst:e}");
    }

    #[test]
    fn relu_rejects_mismatched_rule() {
        let rule = Arc::new(rule_for(Manifold::S2, 4).unwrap());
        let f = random(Manifold::S2, 6, 11);
        assert!(spatial_relu(&f, &rule).is_err());
        let f3 = random(Manifold::So3, 4, 12);
        assert!(spatial_relu(&f3, &rule).is_err());
    }
}
