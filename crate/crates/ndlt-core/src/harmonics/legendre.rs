//! Associated Legendre functions, raw and fully normalized.

use crate::error::{Error, Result};

/// Associated Legendre function `P_ℓ^{(m)}(t)` with the Condon-Shortley
/// phase, by the stable `m`-then-`ℓ` upward recurrence.
pub fn assoc_legendre(l: usize, m: usize, t: f64) -> Result<f64> {
    if m > l {
        return Err(Error::invalid(format!("order m = {m} exceeds degree l = {l}")));
    }
    // P_m^m = (-1)^m (2m-1)!! (1-t²)^{m/2}
    let sin_t = ((1.0 - t) * (1.0 + t)).max(0.0).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * sin_t;
        fact += 2.0;
    }
    if l == m {
        return Ok(pmm);
    }
    let mut p_prev = pmm;
    let mut p = t * (2 * m + 1) as f64 * pmm;
    for k in (m + 2)..=l {
        let kf = k as f64;
        let mf = m as f64;
        let next = ((2.0 * kf - 1.0) * t * p - (kf + mf - 1.0) * p_prev) / (kf - mf);
        p_prev = p;
        p = next;
    }
    Ok(p)
}

/// Fully normalized associated Legendre values
/// `P̄_ℓ^m = √((2ℓ+1)/4π · (ℓ-m)!/(ℓ+m)!) · P_ℓ^{(m)}` for all `ℓ ≤ l_max`,
/// `0 ≤ m ≤ ℓ`, at a single argument. `Y_{ℓ,m}(α,β) = P̄_ℓ^m(cos β) e^{imα}`
/// for `m ≥ 0`.
///
/// The normalized recurrence keeps every intermediate `O(1)`, so no
/// factorial ratios appear and degrees well past 64 stay finite.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    l_max: usize,
    /// Layout: for each m, the run `ℓ = m..=l_max`.
    values: Vec<f64>,
}

impl LegendreTable {
    pub fn new(l_max: usize, t: f64) -> Self {
        let total = (l_max + 1) * (l_max + 2) / 2;
        let mut values = vec![0.0; total];
        let sin_t = ((1.0 - t) * (1.0 + t)).max(0.0).sqrt();

        // P̄_0^0 = 1/√(4π)
        let mut diag = 0.5 / std::f64::consts::PI.sqrt();
        let mut offset = 0usize;
        for m in 0..=l_max {
            let run = &mut values[offset..offset + (l_max - m + 1)];
            run[0] = diag;
            if m < l_max {
                // P̄_{m+1}^m = √(2m+3) · t · P̄_m^m
                run[1] = ((2 * m + 3) as f64).sqrt() * t * diag;
            }
            for l in (m + 2)..=l_max {
                let lf = l as f64;
                let mf = m as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((2.0 * lf + 1.0) * ((lf - 1.0) * (lf - 1.0) - mf * mf))
                    / ((2.0 * lf - 3.0) * (lf * lf - mf * mf)))
                    .sqrt();
                run[l - m] = a * t * run[l - m - 1] - b * run[l - m - 2];
            }
            offset += l_max - m + 1;
            // Next diagonal: P̄_{m+1}^{m+1} = -√((2m+3)/(2m+2)) sin β · P̄_m^m
            diag *= -(((2 * m + 3) as f64) / ((2 * m + 2) as f64)).sqrt() * sin_t;
        }
        LegendreTable { l_max, values }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    #[inline]
    fn run_offset(&self, m: usize) -> usize {
        // Σ_{k<m} (l_max - k + 1)
        m * (self.l_max + 1) - m * (m.saturating_sub(1)) / 2
    }

    /// `P̄_ℓ^m` for `0 ≤ m ≤ ℓ ≤ l_max`.
    #[inline]
    pub fn value(&self, l: usize, m: usize) -> f64 {
        debug_assert!(m <= l && l <= self.l_max);
        self.values[self.run_offset(m) + (l - m)]
    }

    /// Contiguous run `ℓ = m..=l_max` at fixed order `m`.
    #[inline]
    pub fn order_run(&self, m: usize) -> &[f64] {
        let off = self.run_offset(m);
        &self.values[off..off + (self.l_max - m + 1)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn p00_is_one() {
        for t in [-1.0, -0.3, 0.0, 0.99, 1.0] {
            assert_eq!(assoc_legendre(0, 0, t).unwrap(), 1.0);
        }
    }

    #[test]
    fn p20_at_zero() {
        assert_abs_diff_eq!(assoc_legendre(2, 0, 0.0).unwrap(), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn order_above_degree_rejected() {
        assert!(assoc_legendre(2, 3, 0.5).is_err());
    }

    #[test]
    fn p85_matches_rodrigues_oracle() {
        // P_8^5(t) = (-1)^5 (1-t²)^{5/2} d⁵/dt⁵ P_8(t), with
        // P_8(t) = (6435 t⁸ - 12012 t⁶ + 6930 t⁴ - 1260 t² + 35) / 128.
        let t: f64 = 0.3;
        let mut coeffs = [
            35.0 / 128.0,
            0.0,
            -1260.0 / 128.0,
            0.0,
            6930.0 / 128.0,
            0.0,
            -12012.0 / 128.0,
            0.0,
            6435.0 / 128.0,
        ];
        for _ in 0..5 {
            for k in 1..coeffs.len() {
                coeffs[k - 1] = k as f64 * coeffs[k];
            }
            let n = coeffs.len();
            coeffs[n - 1] = 0.0;
        }
        let d5: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * t.powi(k as i32))
            .sum();
        let expected = -(1.0 - t * t).powf(2.5) * d5;
        let got = assoc_legendre(8, 5, t).unwrap();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-10 * expected.abs().max(1.0));
    }

    #[test]
    fn normalized_table_matches_direct_normalization() {
        let t = 0.42;
        let table = LegendreTable::new(12, t);
        for l in 0..=12usize {
            for m in 0..=l {
                let raw = assoc_legendre(l, m, t).unwrap();
                let mut ratio = 1.0;
                for k in (l as i64 - m as i64 + 1)..=(l as i64 + m as i64) {
                    ratio /= k as f64;
                }
                let norm =
                    ((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI) * ratio).sqrt() * raw;
                assert_abs_diff_eq!(table.value(l, m), norm, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn table_is_finite_to_degree_64() {
        for t in [-0.999, -0.5, 0.0, 0.73, 0.999] {
            let table = LegendreTable::new(64, t);
            for l in 0..=64usize {
                for m in 0..=l {
                    assert!(table.value(l, m).is_finite());
                }
            }
        }
    }
}
