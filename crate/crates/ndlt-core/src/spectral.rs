//! Spectral and grid-sample containers.
//!
//! Coefficient layouts are fixed so binary files round-trip bit exactly:
//! `S²` data is degree-major with `m = -ℓ..ℓ` inside each degree, `SO(3)`
//! data is degree-major with row-major `(2ℓ+1) × (2ℓ+1)` blocks, and both
//! are channel-major overall. Grid samples follow the point order of the
//! owning quadrature rule.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{Manifold, QuadratureRule};
use crate::scalar::{Real, C};
use num_complex::Complex;

/// Coefficients `f̂_{ℓ,m}` per channel, `ℓ = 0..=L`, `m = -ℓ..=ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralS2<T: Real> {
    bandwidth: usize,
    channels: usize,
    coeffs: Vec<C<T>>,
}

/// Number of `S²` coefficients per channel at bandwidth `l`.
pub fn s2_len(l: usize) -> usize {
    (l + 1) * (l + 1)
}

/// Number of `SO(3)` coefficients per channel at bandwidth `l`:
/// `Σ_{ℓ≤l} (2ℓ+1)²`.
pub fn so3_len(l: usize) -> usize {
    (l + 1) * (2 * l + 1) * (2 * l + 3) / 3
}

impl<T: Real> SpectralS2<T> {
    pub fn zeros(bandwidth: usize, channels: usize) -> Self {
        SpectralS2 {
            bandwidth,
            channels,
            coeffs: vec![Complex::new(T::zero(), T::zero()); channels * s2_len(bandwidth)],
        }
    }

    pub fn from_coeffs(bandwidth: usize, channels: usize, coeffs: Vec<C<T>>) -> Result<Self> {
        if coeffs.len() != channels * s2_len(bandwidth) {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                channels * s2_len(bandwidth),
                coeffs.len()
            )));
        }
        Ok(SpectralS2 {
            bandwidth,
            channels,
            coeffs,
        })
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Flat index of `(ℓ, m)` within one channel.
    #[inline]
    pub fn idx(l: usize, m: isize) -> usize {
        debug_assert!(m.unsigned_abs() <= l);
        l * l + (m + l as isize) as usize
    }

    #[inline]
    pub fn get(&self, channel: usize, l: usize, m: isize) -> C<T> {
        self.coeffs[channel * s2_len(self.bandwidth) + Self::idx(l, m)]
    }

    #[inline]
    pub fn set(&mut self, channel: usize, l: usize, m: isize, value: C<T>) {
        self.coeffs[channel * s2_len(self.bandwidth) + Self::idx(l, m)] = value;
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C<T>] {
        &mut self.coeffs
    }

    pub fn channel(&self, c: usize) -> &[C<T>] {
        let n = s2_len(self.bandwidth);
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [C<T>] {
        let n = s2_len(self.bandwidth);
        &mut self.coeffs[c * n..(c + 1) * n]
    }

    /// Degree-`ℓ` coefficient vector of one channel.
    pub fn degree(&self, c: usize, l: usize) -> &[C<T>] {
        let base = c * s2_len(self.bandwidth) + l * l;
        &self.coeffs[base..base + 2 * l + 1]
    }

    pub fn degree_mut(&mut self, c: usize, l: usize) -> &mut [C<T>] {
        let base = c * s2_len(self.bandwidth) + l * l;
        &mut self.coeffs[base..base + 2 * l + 1]
    }

    /// Largest residual of the real-origin symmetry
    /// `f̂_{ℓ,-m} = (-1)^m conj(f̂_{ℓ,m})`.
    pub fn real_origin_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for c in 0..self.channels {
            for l in 0..=self.bandwidth {
                for m in 0..=(l as isize) {
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    let lhs = crate::scalar::promote(self.get(c, l, -m));
                    let rhs = crate::scalar::promote(self.get(c, l, m)).conj() * sign;
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        worst
    }
}

/// Blocks `f̂^ℓ ∈ ℂ^{(2ℓ+1)×(2ℓ+1)}` per channel, `ℓ = 0..=L`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSo3<T: Real> {
    bandwidth: usize,
    channels: usize,
    coeffs: Vec<C<T>>,
}

impl<T: Real> SpectralSo3<T> {
    pub fn zeros(bandwidth: usize, channels: usize) -> Self {
        SpectralSo3 {
            bandwidth,
            channels,
            coeffs: vec![Complex::new(T::zero(), T::zero()); channels * so3_len(bandwidth)],
        }
    }

    pub fn from_coeffs(bandwidth: usize, channels: usize, coeffs: Vec<C<T>>) -> Result<Self> {
        if coeffs.len() != channels * so3_len(bandwidth) {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                channels * so3_len(bandwidth),
                coeffs.len()
            )));
        }
        Ok(SpectralSo3 {
            bandwidth,
            channels,
            coeffs,
        })
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Offset of block `ℓ` within one channel.
    #[inline]
    pub fn block_offset(l: usize) -> usize {
        if l == 0 {
            0
        } else {
            so3_len(l - 1)
        }
    }

    /// Flat index of `(ℓ, m, n)` within one channel; `m` is the row.
    #[inline]
    pub fn idx(l: usize, m: isize, n: isize) -> usize {
        debug_assert!(m.unsigned_abs() <= l && n.unsigned_abs() <= l);
        let w = 2 * l + 1;
        Self::block_offset(l) + (m + l as isize) as usize * w + (n + l as isize) as usize
    }

    #[inline]
    pub fn get(&self, channel: usize, l: usize, m: isize, n: isize) -> C<T> {
        self.coeffs[channel * so3_len(self.bandwidth) + Self::idx(l, m, n)]
    }

    #[inline]
    pub fn set(&mut self, channel: usize, l: usize, m: isize, n: isize, value: C<T>) {
        self.coeffs[channel * so3_len(self.bandwidth) + Self::idx(l, m, n)] = value;
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C<T>] {
        &mut self.coeffs
    }

    pub fn channel(&self, c: usize) -> &[C<T>] {
        let n = so3_len(self.bandwidth);
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [C<T>] {
        let n = so3_len(self.bandwidth);
        &mut self.coeffs[c * n..(c + 1) * n]
    }

    /// Row-major degree-`ℓ` block of one channel.
    pub fn block(&self, c: usize, l: usize) -> &[C<T>] {
        let base = c * so3_len(self.bandwidth) + Self::block_offset(l);
        let w = 2 * l + 1;
        &self.coeffs[base..base + w * w]
    }

    pub fn block_mut(&mut self, c: usize, l: usize) -> &mut [C<T>] {
        let base = c * so3_len(self.bandwidth) + Self::block_offset(l);
        let w = 2 * l + 1;
        &mut self.coeffs[base..base + w * w]
    }

    /// Largest residual of the real-origin symmetry
    /// `f̂_{-m,-n} = (-1)^{m-n} conj(f̂_{m,n})`.
    pub fn real_origin_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for c in 0..self.channels {
            for l in 0..=self.bandwidth {
                for m in -(l as isize)..=(l as isize) {
                    for n in -(l as isize)..=(l as isize) {
                        let sign = if (m - n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                        let lhs = crate::scalar::promote(self.get(c, l, -m, -n));
                        let rhs = crate::scalar::promote(self.get(c, l, m, n)).conj() * sign;
                        worst = worst.max((lhs - rhs).norm());
                    }
                }
            }
        }
        worst
    }
}

/// A spectral signal on either manifold.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectral<T: Real> {
    S2(SpectralS2<T>),
    So3(SpectralSo3<T>),
}

impl<T: Real> Spectral<T> {
    pub fn zeros(manifold: Manifold, bandwidth: usize, channels: usize) -> Self {
        match manifold {
            Manifold::S2 => Spectral::S2(SpectralS2::zeros(bandwidth, channels)),
            Manifold::So3 => Spectral::So3(SpectralSo3::zeros(bandwidth, channels)),
        }
    }

    pub fn manifold(&self) -> Manifold {
        match self {
            Spectral::S2(_) => Manifold::S2,
            Spectral::So3(_) => Manifold::So3,
        }
    }

    pub fn bandwidth(&self) -> usize {
        match self {
            Spectral::S2(s) => s.bandwidth(),
            Spectral::So3(s) => s.bandwidth(),
        }
    }

    pub fn channels(&self) -> usize {
        match self {
            Spectral::S2(s) => s.channels(),
            Spectral::So3(s) => s.channels(),
        }
    }

    /// Coefficient count per channel.
    pub fn len_per_channel(&self) -> usize {
        match self {
            Spectral::S2(s) => s2_len(s.bandwidth()),
            Spectral::So3(s) => so3_len(s.bandwidth()),
        }
    }

    pub fn coeffs(&self) -> &[C<T>] {
        match self {
            Spectral::S2(s) => s.coeffs(),
            Spectral::So3(s) => s.coeffs(),
        }
    }

    pub fn coeffs_mut(&mut self) -> &mut [C<T>] {
        match self {
            Spectral::S2(s) => s.coeffs_mut(),
            Spectral::So3(s) => s.coeffs_mut(),
        }
    }

    /// Entries of degree `ℓ` in one channel (vector or row-major block).
    pub fn degree_entries(&self, c: usize, l: usize) -> &[C<T>] {
        match self {
            Spectral::S2(s) => s.degree(c, l),
            Spectral::So3(s) => s.block(c, l),
        }
    }

    pub fn degree_entries_mut(&mut self, c: usize, l: usize) -> &mut [C<T>] {
        match self {
            Spectral::S2(s) => s.degree_mut(c, l),
            Spectral::So3(s) => s.block_mut(c, l),
        }
    }

    /// Multiply every degree-`ℓ` entry by the real profile `g(ℓ)`.
    pub fn scale_per_degree<F: Fn(usize) -> f64>(&self, g: F) -> Self {
        let mut out = self.clone();
        for c in 0..out.channels() {
            for l in 0..=out.bandwidth() {
                let factor = T::of(g(l));
                for z in out.degree_entries_mut(c, l) {
                    *z *= factor;
                }
            }
        }
        out
    }

    /// Multiply every degree-`ℓ` entry by the complex scalar `g(ℓ)`.
    pub fn scale_per_degree_complex<F: Fn(usize) -> C<T>>(&self, g: F) -> Self {
        let mut out = self.clone();
        for c in 0..out.channels() {
            for l in 0..=out.bandwidth() {
                let factor = g(l);
                for z in out.degree_entries_mut(c, l) {
                    *z *= factor;
                }
            }
        }
        out
    }

    /// Copy into a container of bandwidth `new_l`, truncating or
    /// zero-padding degrees as needed.
    pub fn resized(&self, new_l: usize) -> Self {
        let mut out = Spectral::zeros(self.manifold(), new_l, self.channels());
        let keep = self.bandwidth().min(new_l);
        for c in 0..self.channels() {
            for l in 0..=keep {
                out.degree_entries_mut(c, l)
                    .copy_from_slice(self.degree_entries(c, l));
            }
        }
        out
    }

    /// Total energy `Σ |f̂|²`, accumulated in f64.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs()
            .iter()
            .map(|z| {
                let w = crate::scalar::promote(*z);
                w.norm_sqr()
            })
            .sum()
    }

    /// Energy restricted to degrees `lo..=hi`.
    pub fn norm_sq_degrees(&self, lo: usize, hi: usize) -> f64 {
        let mut total = 0.0;
        for c in 0..self.channels() {
            for l in lo..=hi.min(self.bandwidth()) {
                total += self
                    .degree_entries(c, l)
                    .iter()
                    .map(|z| crate::scalar::promote(*z).norm_sqr())
                    .sum::<f64>();
            }
        }
        total
    }

    /// `Σ |self - other|²`; containers must have identical shape.
    pub fn diff_norm_sq(&self, other: &Self) -> f64 {
        assert_eq!(self.manifold(), other.manifold());
        assert_eq!(self.bandwidth(), other.bandwidth());
        assert_eq!(self.channels(), other.channels());
        self.coeffs()
            .iter()
            .zip(other.coeffs())
            .map(|(a, b)| (crate::scalar::promote(*a) - crate::scalar::promote(*b)).norm_sqr())
            .sum()
    }

    /// Apply `f` to every coefficient.
    pub fn map_entries<F: Fn(C<T>) -> C<T>>(&self, f: F) -> Self {
        let mut out = self.clone();
        for z in out.coeffs_mut() {
            *z = f(*z);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.bandwidth(), other.bandwidth());
        let mut out = self.clone();
        for (z, w) in out.coeffs_mut().iter_mut().zip(other.coeffs()) {
            *z += *w;
        }
        out
    }

    /// Convert the coefficient storage to another precision.
    pub fn cast<U: Real>(&self) -> Spectral<U> {
        let convert = |coeffs: &[C<T>]| -> Vec<C<U>> {
            coeffs
                .iter()
                .map(|z| Complex::new(U::of(z.re.to_f64()), U::of(z.im.to_f64())))
                .collect()
        };
        match self {
            Spectral::S2(s) => Spectral::S2(
                SpectralS2::from_coeffs(s.bandwidth(), s.channels(), convert(s.coeffs()))
                    .expect("shape preserved"),
            ),
            Spectral::So3(s) => Spectral::So3(
                SpectralSo3::from_coeffs(s.bandwidth(), s.channels(), convert(s.coeffs()))
                    .expect("shape preserved"),
            ),
        }
    }

    pub fn as_s2(&self) -> Result<&SpectralS2<T>> {
        match self {
            Spectral::S2(s) => Ok(s),
            Spectral::So3(_) => Err(Error::invalid("expected an S² spectral signal")),
        }
    }

    pub fn as_so3(&self) -> Result<&SpectralSo3<T>> {
        match self {
            Spectral::So3(s) => Ok(s),
            Spectral::S2(_) => Err(Error::invalid("expected an SO(3) spectral signal")),
        }
    }
}

impl<T: Real> From<SpectralS2<T>> for Spectral<T> {
    fn from(s: SpectralS2<T>) -> Self {
        Spectral::S2(s)
    }
}

impl<T: Real> From<SpectralSo3<T>> for Spectral<T> {
    fn from(s: SpectralSo3<T>) -> Self {
        Spectral::So3(s)
    }
}

/// Random band-limited signal: independent complex Gaussian coefficients
/// with per-degree scale `(1+ℓ)^{-decay}`, normalized to unit energy.
pub fn random_spectral<T: Real, R: rand::Rng>(
    manifold: Manifold,
    bandwidth: usize,
    channels: usize,
    decay: f64,
    rng: &mut R,
) -> Spectral<T> {
    use rand_distr::StandardNormal;
    let mut out = Spectral::<f64>::zeros(manifold, bandwidth, channels);
    for c in 0..channels {
        for l in 0..=bandwidth {
            let scale = (1.0 + l as f64).powf(-decay);
            for z in out.degree_entries_mut(c, l) {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *z = Complex::new(re * scale, im * scale);
            }
        }
    }
    let norm = out.norm_sq().sqrt();
    if norm > 0.0 {
        for z in out.coeffs_mut() {
            *z /= norm;
        }
    }
    out.cast()
}

/// Symmetrize a spectrum so it is the transform of a real-valued signal.
///
/// On `S²` this enforces `f̂_{ℓ,-m} = (-1)^m conj(f̂_{ℓ,m})`; on `SO(3)`,
/// `f̂_{-m,-n} = (-1)^{m-n} conj(f̂_{m,n})`.
pub fn symmetrize_real<T: Real>(spec: &Spectral<T>) -> Spectral<T> {
    let mut out = spec.clone();
    match &mut out {
        Spectral::S2(s) => {
            for c in 0..s.channels() {
                for l in 0..=s.bandwidth() {
                    for m in 1..=(l as isize) {
                        let sign = if m % 2 == 0 { T::one() } else { -T::one() };
                        let a = s.get(c, l, m);
                        let b = s.get(c, l, -m);
                        let avg = (a + b.conj() * sign) * T::of(0.5);
                        s.set(c, l, m, avg);
                        s.set(c, l, -m, avg.conj() * sign);
                    }
                    let d = s.get(c, l, 0);
                    s.set(c, l, 0, Complex::new(d.re, T::zero()));
                }
            }
        }
        Spectral::So3(s) => {
            for c in 0..s.channels() {
                for l in 0..=s.bandwidth() {
                    let li = l as isize;
                    for m in -li..=li {
                        for n in -li..=li {
                            if (m, n) < (-m, -n) {
                                continue;
                            }
                            let sign = if (m - n) % 2 == 0 { T::one() } else { -T::one() };
                            let a = s.get(c, l, m, n);
                            let b = s.get(c, l, -m, -n);
                            let avg = (a + b.conj() * sign) * T::of(0.5);
                            s.set(c, l, m, n, avg);
                            s.set(c, l, -m, -n, avg.conj() * sign);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Complex samples of a multi-channel function on a quadrature rule's points.
///
/// Samples are channel-major; within a channel they follow the rule's point
/// order.
#[derive(Debug, Clone)]
pub struct GridSignal<T: Real> {
    rule: Arc<QuadratureRule>,
    channels: usize,
    samples: Vec<C<T>>,
}

impl<T: Real> GridSignal<T> {
    pub fn zeros(rule: Arc<QuadratureRule>, channels: usize) -> Self {
        let n = rule.n_points();
        GridSignal {
            rule,
            channels,
            samples: vec![Complex::new(T::zero(), T::zero()); channels * n],
        }
    }

    pub fn from_samples(
        rule: Arc<QuadratureRule>,
        channels: usize,
        samples: Vec<C<T>>,
    ) -> Result<Self> {
        if samples.len() != channels * rule.n_points() {
            return Err(Error::invalid(format!(
                "expected {} samples, got {}",
                channels * rule.n_points(),
                samples.len()
            )));
        }
        Ok(GridSignal {
            rule,
            channels,
            samples,
        })
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &[C<T>] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [C<T>] {
        &mut self.samples
    }

    pub fn channel(&self, c: usize) -> &[C<T>] {
        let n = self.rule.n_points();
        &self.samples[c * n..(c + 1) * n]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [C<T>] {
        let n = self.rule.n_points();
        &mut self.samples[c * n..(c + 1) * n]
    }

    /// Weighted energy `Σ_k ω_k |f(x_k)|²`, accumulated in f64.
    pub fn weighted_norm_sq(&self) -> f64 {
        let n = self.rule.n_points();
        let mut total = 0.0;
        for c in 0..self.channels {
            for k in 0..n {
                total += self.rule.weight(k)
                    * crate::scalar::promote(self.samples[c * n + k]).norm_sqr();
            }
        }
        total
    }
}
