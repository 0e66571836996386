//! Multi-level needlet decomposition and reconstruction.
//!
//! Both directions run purely in the frequency domain with `λ_ℓ = ℓ`:
//! stepping down a level multiplies degree `ℓ` by `conj(â(ℓ/2^j))` for the
//! low pass and `conj(b̂ⁿ(ℓ/2^j))` for the two high passes; stepping up
//! recombines with the un-conjugated filters. The partition of unity makes
//! the system a tight frame: reconstruction is exact and energy telescopes
//! level by level.
//!
//! Spatial sequences (the `√ω`-weighted samples) and pointwise needlet
//! kernels are separate explicit operations so no transforms hide inside
//! the cascade.

use num_complex::Complex;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::filterbank::{alpha_at, beta_at, filter_at, FilterKind};
use crate::harmonics::{
    s2_synthesis, so3_norm, so3_synthesis, sph_harm, wigner_d_stack, LegendreTable,
};
use crate::quadrature::{rule_for, Manifold, QuadratureRule};
use crate::scalar::Real;
use crate::spectral::{GridSignal, Spectral};

/// Smallest `k` with `2^k ≥ n` (for `n ≥ 1`).
pub fn ceil_log2(n: usize) -> usize {
    let mut k = 0;
    while (1usize << k) < n {
        k += 1;
    }
    k
}

/// Finest scale for an input of bandwidth `l`: every degree must sit inside
/// the level-`J` filter window `ℓ/2^J ≤ 1/2`.
pub fn finest_scale(l: usize) -> usize {
    ceil_log2(l.max(1)) + 1
}

/// Bandwidth `Λ_j = 2^{j-1}` carried by the scale-`j` low pass.
pub fn lowpass_bandwidth(j: usize) -> usize {
    1usize << (j - 1)
}

/// One low-pass sequence at the coarse scale plus per-scale high-pass pairs.
#[derive(Debug, Clone)]
pub struct NeedletCoefficients<T: Real> {
    j0: usize,
    j_end: usize,
    lowpass: Spectral<T>,
    /// `highpass[i]` holds `(w¹, w²)` at scale `j0 + i`.
    highpass: Vec<(Spectral<T>, Spectral<T>)>,
}

impl<T: Real> NeedletCoefficients<T> {
    /// Coarse scale `J₀`.
    pub fn j0(&self) -> usize {
        self.j0
    }

    /// Fine scale `J`; high-pass scales run `J₀ ..= J-1`.
    pub fn j_end(&self) -> usize {
        self.j_end
    }

    pub fn manifold(&self) -> Manifold {
        self.lowpass.manifold()
    }

    pub fn channels(&self) -> usize {
        self.lowpass.channels()
    }

    pub fn lowpass(&self) -> &Spectral<T> {
        &self.lowpass
    }

    pub fn lowpass_mut(&mut self) -> &mut Spectral<T> {
        &mut self.lowpass
    }

    /// High-pass pair `(w¹_j, w²_j)` at scale `j`.
    pub fn highpass(&self, j: usize) -> &(Spectral<T>, Spectral<T>) {
        &self.highpass[j - self.j0]
    }

    pub fn highpass_scales(&self) -> impl Iterator<Item = usize> {
        self.j0..self.j_end
    }

    pub fn bands(&self) -> impl Iterator<Item = &Spectral<T>> {
        std::iter::once(&self.lowpass)
            .chain(self.highpass.iter().flat_map(|(a, b)| [a, b]))
    }

    pub fn bands_mut(&mut self) -> impl Iterator<Item = &mut Spectral<T>> {
        std::iter::once(&mut self.lowpass)
            .chain(self.highpass.iter_mut().flat_map(|(a, b)| [a, b]))
    }

    pub fn highpass_bands(&self) -> impl Iterator<Item = &Spectral<T>> {
        self.highpass.iter().flat_map(|(a, b)| [a, b])
    }

    pub fn highpass_bands_mut(&mut self) -> impl Iterator<Item = &mut Spectral<T>> {
        self.highpass.iter_mut().flat_map(|(a, b)| [a, b])
    }

    /// Complex entries across all high-pass bands and channels.
    pub fn highpass_len(&self) -> usize {
        self.highpass_bands()
            .map(|b| b.channels() * b.len_per_channel())
            .sum()
    }

    pub fn highpass_norm_sq(&self) -> f64 {
        self.highpass_bands().map(|b| b.norm_sq()).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.lowpass.norm_sq() + self.highpass_norm_sq()
    }

    /// Squared distance between matching bands of two coefficient sets.
    pub fn diff_norm_sq(&self, other: &Self) -> f64 {
        assert_eq!(self.j0, other.j0);
        assert_eq!(self.j_end, other.j_end);
        self.bands()
            .zip(other.bands())
            .map(|(a, b)| a.diff_norm_sq(b))
            .sum()
    }

    /// Squared distance restricted to the high-pass bands.
    pub fn highpass_diff_norm_sq(&self, other: &Self) -> f64 {
        self.highpass_bands()
            .zip(other.highpass_bands())
            .map(|(a, b)| a.diff_norm_sq(b))
            .sum()
    }

    pub fn cast<U: Real>(&self) -> NeedletCoefficients<U> {
        NeedletCoefficients {
            j0: self.j0,
            j_end: self.j_end,
            lowpass: self.lowpass.cast(),
            highpass: self
                .highpass
                .iter()
                .map(|(a, b)| (a.cast(), b.cast()))
                .collect(),
        }
    }

    /// Rebuild from parts, validating scale metadata and band shapes.
    pub fn from_bands(
        j0: usize,
        j_end: usize,
        lowpass: Spectral<T>,
        highpass: Vec<(Spectral<T>, Spectral<T>)>,
    ) -> Result<Self> {
        if j0 == 0 || j0 >= j_end {
            return Err(Error::invalid(format!(
                "scales must satisfy 1 <= J0 < J, got J0 = {j0}, J = {j_end}"
            )));
        }
        if highpass.len() != j_end - j0 {
            return Err(Error::invalid(format!(
                "expected {} high-pass scales, got {}",
                j_end - j0,
                highpass.len()
            )));
        }
        if lowpass.bandwidth() != lowpass_bandwidth(j0) {
            return Err(Error::invalid(format!(
                "low-pass bandwidth {} does not match scale {j0}",
                lowpass.bandwidth()
            )));
        }
        for (i, (w1, w2)) in highpass.iter().enumerate() {
            let j = j0 + i;
            let expect = 1usize << j;
            for band in [w1, w2] {
                if band.bandwidth() != expect
                    || band.manifold() != lowpass.manifold()
                    || band.channels() != lowpass.channels()
                {
                    return Err(Error::invalid(format!(
                        "high-pass band at scale {j} has inconsistent shape"
                    )));
                }
            }
        }
        Ok(NeedletCoefficients {
            j0,
            j_end,
            lowpass,
            highpass,
        })
    }
}

/// Multi-level decomposition of a spectral signal down to coarse scale `j0`.
///
/// The finest scale is derived from the input bandwidth; degrees the
/// generator supports exclude are exactly zero in every band.
pub fn decompose<T: Real>(input: &Spectral<T>, j0: usize) -> Result<NeedletCoefficients<T>> {
    let j_end = finest_scale(input.bandwidth());
    if j0 == 0 {
        return Err(Error::invalid("coarse scale J0 must be at least 1"));
    }
    if j0 >= j_end {
        return Err(Error::invalid(format!(
            "coarse scale J0 = {j0} must be below the finest scale J = {j_end}"
        )));
    }

    let mut v = input.resized(lowpass_bandwidth(j_end));
    let mut highpass: Vec<(Spectral<T>, Spectral<T>)> = Vec::with_capacity(j_end - j0);
    for j in ((j0 + 1)..=j_end).rev() {
        let w1 = v
            .scale_per_degree(|l| filter_at(FilterKind::B1, l, j))
            .resized(1usize << (j - 1));
        let w2 = v
            .scale_per_degree(|l| filter_at(FilterKind::B2, l, j))
            .resized(1usize << (j - 1));
        v = v
            .scale_per_degree(|l| filter_at(FilterKind::A, l, j))
            .resized(lowpass_bandwidth(j - 1));
        highpass.push((w1, w2));
    }
    highpass.reverse();
    NeedletCoefficients::from_bands(j0, j_end, v, highpass)
}

/// Rebuild the fine-scale spectrum from needlet coefficients.
///
/// Returns bandwidth `Λ_J = 2^{J-1}`; together with [`decompose`] this is
/// the identity on band-limited input.
pub fn reconstruct<T: Real>(c: &NeedletCoefficients<T>) -> Result<Spectral<T>> {
    // Re-validate so hand-assembled coefficient sets are checked too.
    NeedletCoefficients::from_bands(
        c.j0,
        c.j_end,
        c.lowpass.clone(),
        c.highpass.clone(),
    )?;
    let mut v = c.lowpass.clone();
    for (i, (w1, w2)) in c.highpass.iter().enumerate() {
        let j = c.j0 + i + 1;
        let target = lowpass_bandwidth(j);
        let mut next = v
            .resized(target)
            .scale_per_degree(|l| filter_at(FilterKind::A, l, j));
        next = next.add(
            &w1.resized(target)
                .scale_per_degree(|l| filter_at(FilterKind::B1, l, j)),
        );
        next = next.add(
            &w2.resized(target)
                .scale_per_degree(|l| filter_at(FilterKind::B2, l, j)),
        );
        v = next;
    }
    Ok(v)
}

/// Which band of the frame a kernel or spatial sequence belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandKind {
    Lowpass,
    Hp1,
    Hp2,
}

impl BandKind {
    /// Generator profile of the band at `(ℓ, j)`.
    pub fn response(self, l: usize, j: usize) -> f64 {
        match self {
            BandKind::Lowpass => alpha_at(l, j),
            BandKind::Hp1 => beta_at(1, l, j),
            BandKind::Hp2 => beta_at(2, l, j),
        }
    }
}

/// One spatial needlet sequence: `√ω`-weighted samples at its scale's rule.
#[derive(Debug, Clone)]
pub struct SpatialBand<T: Real> {
    pub scale: usize,
    pub kind: BandKind,
    pub signal: GridSignal<T>,
}

/// Discrete sequence of one band on a given rule, including the `√ω` factor.
///
/// The rule must be exact for degree `2^{scale+1}`.
pub fn spatial_band<T: Real>(
    band: &Spectral<T>,
    scale: usize,
    rule: &Arc<QuadratureRule>,
) -> Result<GridSignal<T>> {
    let needed = 1usize << (scale + 1);
    if rule.exactness_degree() < needed {
        return Err(Error::precondition(format!(
            "rule exactness {} below the degree {needed} required at scale {scale}",
            rule.exactness_degree()
        )));
    }
    let mut grid = match band {
        Spectral::S2(s) => s2_synthesis(s, rule)?,
        Spectral::So3(s) => so3_synthesis(s, rule)?,
    };
    let n = rule.n_points();
    let weights: Vec<T> = (0..n).map(|k| T::of(rule.weight(k).sqrt())).collect();
    for c in 0..grid.channels() {
        let samples = grid.channel_mut(c);
        for k in 0..n {
            samples[k] *= weights[k];
        }
    }
    Ok(grid)
}

/// Spatial sequences of every band, on automatically chosen rules
/// (bandwidth `2^j` at scale `j`, hence exactness `2^{j+1} + 1`).
pub fn spatial_coeffs<T: Real>(c: &NeedletCoefficients<T>) -> Result<Vec<SpatialBand<T>>> {
    let manifold = c.manifold();
    let mut out = Vec::new();
    let rule = Arc::new(rule_for(manifold, 1usize << c.j0())?);
    out.push(SpatialBand {
        scale: c.j0(),
        kind: BandKind::Lowpass,
        signal: spatial_band(c.lowpass(), c.j0(), &rule)?,
    });
    for j in c.highpass_scales() {
        let rule = Arc::new(rule_for(manifold, 1usize << j)?);
        let (w1, w2) = c.highpass(j);
        out.push(SpatialBand {
            scale: j,
            kind: BandKind::Hp1,
            signal: spatial_band(w1, j, &rule)?,
        });
        out.push(SpatialBand {
            scale: j,
            kind: BandKind::Hp2,
            signal: spatial_band(w2, j, &rule)?,
        });
    }
    Ok(out)
}

/// Pointwise needlet kernel at scale `j`:
/// `Σ_ℓ ĝ(ℓ/2^j) Σ conj(u_ℓ(y)) u_ℓ(x)` with `ĝ` the band's generator.
///
/// `l_cap` truncates the spectral sum below its natural limit `2^j`.
pub fn needlet_kernel(
    manifold: Manifold,
    j: usize,
    y: [f64; 3],
    x: [f64; 3],
    kind: BandKind,
    l_cap: Option<usize>,
) -> Complex<f64> {
    assert!(j >= 1, "kernel scale must be at least 1");
    let l_max = l_cap.unwrap_or(1usize << j).min(1usize << j);
    let mut acc = Complex::new(0.0, 0.0);
    match manifold {
        Manifold::S2 => {
            let ty = LegendreTable::new(l_max, y[1].cos());
            let tx = LegendreTable::new(l_max, x[1].cos());
            for l in 0..=l_max {
                let g = kind.response(l, j);
                if g == 0.0 {
                    continue;
                }
                let mut degree = Complex::new(0.0, 0.0);
                for m in -(l as isize)..=(l as isize) {
                    let mu = m.unsigned_abs();
                    let s = if m >= 0 || m % 2 == 0 { 1.0 } else { -1.0 };
                    let uy = Complex::from_polar(1.0, m as f64 * y[0]) * (s * ty.value(l, mu));
                    let ux = Complex::from_polar(1.0, m as f64 * x[0]) * (s * tx.value(l, mu));
                    degree += uy.conj() * ux;
                }
                acc += degree * g;
            }
        }
        Manifold::So3 => {
            let sy = wigner_d_stack(l_max, y[1]);
            let sx = wigner_d_stack(l_max, x[1]);
            for l in 0..=l_max {
                let g = kind.response(l, j);
                if g == 0.0 {
                    continue;
                }
                let norm_sq = so3_norm(l) * so3_norm(l);
                let li = l as isize;
                let mut degree = Complex::new(0.0, 0.0);
                for m in -li..=li {
                    for n in -li..=li {
                        let (um, un) = ((m + li) as usize, (n + li) as usize);
                        let phase = Complex::from_polar(
                            1.0,
                            m as f64 * (x[0] - y[0]) + n as f64 * (x[2] - y[2]),
                        );
                        degree += phase * (sy[l][(um, un)] * sx[l][(um, un)]);
                    }
                }
                acc += degree * (g * norm_sq);
            }
        }
    }
    acc
}

/// Residuals from the numerical tight-frame checks.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TightnessReport {
    pub manifold: String,
    pub bandwidth: usize,
    pub j0: usize,
    pub j_end: usize,
    pub trials: usize,
    /// Worst per-level relative defect of
    /// `‖v_j‖² = ‖v_{j-1}‖² + Σ_n ‖wⁿ_{j-1}‖²`.
    pub max_energy_residual: f64,
    /// Worst relative reconstruction error over the random trials.
    pub max_reconstruction_residual: f64,
    /// Worst deviation of the generator-weighted quadrature Gram products
    /// from the Kronecker delta.
    pub max_gram_residual: f64,
}

/// Run the tight-frame conditions numerically: per-level energy identities
/// and perfect reconstruction on random band-limited signals, plus the
/// Gram products of sampled basis functions on each scale's rule.
pub fn verify_tightness(
    manifold: Manifold,
    l: usize,
    j0: usize,
    trials: usize,
    seed: u64,
) -> Result<TightnessReport> {
    use rand::SeedableRng;
    let j_end = finest_scale(l);
    if j0 == 0 || j0 >= j_end {
        return Err(Error::invalid(format!(
            "coarse scale J0 = {j0} invalid for bandwidth {l}"
        )));
    }
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);

    let mut max_energy = 0.0f64;
    let mut max_recon = 0.0f64;
    for _ in 0..trials {
        let signal = crate::spectral::random_spectral::<f64, _>(manifold, l, 1, 0.0, &mut rng);
        let padded = signal.resized(lowpass_bandwidth(j_end));
        // Walk the cascade checking the energy identity at every level.
        let mut v = padded.clone();
        for j in ((j0 + 1)..=j_end).rev() {
            let w1 = v.scale_per_degree(|d| filter_at(FilterKind::B1, d, j));
            let w2 = v.scale_per_degree(|d| filter_at(FilterKind::B2, d, j));
            let v_next = v.scale_per_degree(|d| filter_at(FilterKind::A, d, j));
            let upper = v.norm_sq();
            let lower = v_next.norm_sq() + w1.norm_sq() + w2.norm_sq();
            max_energy = max_energy.max((upper - lower).abs() / upper.max(1e-300));
            v = v_next.resized(lowpass_bandwidth(j - 1));
        }
        let coeffs = decompose(&padded, j0)?;
        let rebuilt = reconstruct(&coeffs)?;
        let rel = rebuilt.diff_norm_sq(&padded.resized(rebuilt.bandwidth())).sqrt()
            / padded.norm_sq().sqrt().max(1e-300);
        max_recon = max_recon.max(rel);
    }

    // Gram products of sampled basis functions on each scale's rule; the
    // degrees active at scale j run up to 2^{j-1}.
    let mut max_gram = 0.0f64;
    for j in j0..j_end {
        let rule = Arc::new(rule_for(manifold, 1usize << j)?);
        let active = lowpass_bandwidth(j).min(l);
        let indices = basis_indices(manifold, active, 24, &mut rng);
        for &(bl, m, n) in &indices {
            let grid = sample_basis(manifold, &rule, bl, m, n)?;
            let coeffs: Spectral<f64> = match manifold {
                Manifold::S2 => Spectral::S2(crate::harmonics::s2_analysis(&grid)?),
                Manifold::So3 => Spectral::So3(crate::harmonics::so3_analysis(&grid)?),
            };
            let weight_l = alpha_at(bl, j);
            for dl in 0..=coeffs.bandwidth() {
                let weight = weight_l * alpha_at(dl, j);
                for (e, z) in coeffs.degree_entries(0, dl).iter().enumerate() {
                    let expect = if dl == bl && own_entry(manifold, bl, m, n) == e {
                        1.0
                    } else {
                        0.0
                    };
                    max_gram = max_gram.max((weight * (z - expect)).norm());
                }
            }
        }
    }

    Ok(TightnessReport {
        manifold: manifold.as_str().to_string(),
        bandwidth: l,
        j0,
        j_end,
        trials,
        max_energy_residual: max_energy,
        max_reconstruction_residual: max_recon,
        max_gram_residual: max_gram,
    })
}

fn own_entry(manifold: Manifold, l: usize, m: isize, n: isize) -> usize {
    let li = l as isize;
    match manifold {
        Manifold::S2 => (m + li) as usize,
        Manifold::So3 => (m + li) as usize * (2 * l + 1) + (n + li) as usize,
    }
}

fn basis_indices(
    manifold: Manifold,
    l_max: usize,
    cap: usize,
    rng: &mut impl rand::Rng,
) -> Vec<(usize, isize, isize)> {
    let mut all = Vec::new();
    for l in 0..=l_max {
        let li = l as isize;
        for m in -li..=li {
            match manifold {
                Manifold::S2 => all.push((l, m, 0)),
                Manifold::So3 => {
                    for n in -li..=li {
                        all.push((l, m, n));
                    }
                }
            }
        }
    }
    if all.len() <= cap {
        return all;
    }
    // Deterministic subsample once the index set gets large.
    let mut picked = Vec::with_capacity(cap);
    for _ in 0..cap {
        let k = rng.gen_range(0..all.len());
        picked.push(all.swap_remove(k));
    }
    picked
}

fn sample_basis(
    manifold: Manifold,
    rule: &Arc<QuadratureRule>,
    l: usize,
    m: isize,
    n: isize,
) -> Result<GridSignal<f64>> {
    let mut grid = GridSignal::<f64>::zeros(Arc::clone(rule), 1);
    match manifold {
        Manifold::S2 => {
            for (k, (p, _)) in rule.iter().enumerate() {
                grid.samples_mut()[k] = sph_harm(l, m, p[0], p[1])?;
            }
        }
        Manifold::So3 => {
            // One small-d evaluation per colatitude, phases per (α, γ).
            let li = l as isize;
            let norm = so3_norm(l);
            let d_at: Vec<f64> = rule
                .betas()
                .iter()
                .map(|&beta| {
                    wigner_d_stack(l, beta)[l][((m + li) as usize, (n + li) as usize)]
                })
                .collect();
            let nb = rule.betas().len();
            let ng = rule.gammas().len();
            for (ia, &alpha) in rule.alphas().iter().enumerate() {
                for (ib, dv) in d_at.iter().enumerate() {
                    for (ig, &gamma) in rule.gammas().iter().enumerate() {
                        let k = (ia * nb + ib) * ng + ig;
                        grid.samples_mut()[k] = Complex::from_polar(
                            1.0,
                            m as f64 * alpha + n as f64 * gamma,
                        ) * (norm * dv);
                    }
                }
            }
        }
    }
    Ok(grid)
}
