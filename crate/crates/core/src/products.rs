//! Canonical products `G_Λ` in log-polar form, with certified truncation.
//!
//! One-sided: `G(z) = ∏_{k≥0} (1 - z/λ_k)`. Two-sided:
//! `G(z) = ∏_{m≥1} (1 - λ_{-m}/z) · ∏_{k≥0} (1 - z/λ_k)`.
//!
//! Factors are summed as logarithms. Each factor is evaluated with
//! [`LogComplex::one_minus`], which is exact enough near a zero that no
//! special treatment of points close to a node is needed.

use crate::error::{Error, Result};
use crate::geometry::{dist_to_sequence, dlog_nearest};
use crate::logc::{ln_1p_exp, LogComplex};
use crate::sequence::SequenceSpec;
use crate::spaces::weight_phi;

/// How far the infinite products are carried.
///
/// `rel_tol` bounds the absolute error of `log G` (so the relative error of
/// `G`), `hard_cap` the number of factors per tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    pub rel_tol: f64,
    pub hard_cap: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            rel_tol: 1e-12,
            hard_cap: 200_000,
        }
    }
}

impl TruncationPolicy {
    pub fn new(rel_tol: f64, hard_cap: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
            return Err(Error::validation("/rel_tol", "rel_tol must lie in (0, 1e-3]"));
        }
        if hard_cap == 0 {
            return Err(Error::validation("/hard_cap", "hard_cap must be positive"));
        }
        Ok(TruncationPolicy { rel_tol, hard_cap })
    }

    pub fn with_rel_tol(rel_tol: f64) -> Result<Self> {
        Self::new(rel_tol, Self::default().hard_cap)
    }
}

/// The factor of `G` belonging to node `k`: `1 - z/λ_k` for `k ≥ 0`,
/// `1 - λ_k/z` for `k < 0`.
pub fn factor(spec: &SequenceSpec, k: i64, z: LogComplex) -> LogComplex {
    let lam = spec.node_unchecked(k);
    if k >= 0 {
        (z / lam).one_minus()
    } else {
        (lam / z).one_minus()
    }
}

/// Smallest index window `[lo, hi]` outside of which the factors at `|z| =
/// e^{logmod}` contribute at most `rel_tol` to `log G`.
///
/// With `S = sup|δ|`, `|z/λ_k| ≤ B_k = exp(logmod - (k + 2/p - S)/2α)`,
/// a geometric sequence with ratio `q = e^{-1/2α}`; together with
/// `|log(1-w)| ≤ |w|/(1-|w|)` the discarded right tail is at most
/// `B_K / ((1-q)(1-B_K))`. The left tail is symmetric.
pub fn truncation_range(spec: &SequenceSpec, logmod: f64, pol: &TruncationPolicy) -> Result<(i64, i64)> {
    let alpha = spec.space.alpha;
    let tp = spec.space.two_over_p();
    let s = spec.sup_delta();
    let two = spec.space.is_two_sided();
    let q = (-1.0 / (2.0 * alpha)).exp();
    let budget = if two { pol.rel_tol / 2.0 } else { pol.rel_tol };
    let tail = |ln_b: f64| -> f64 {
        let b = ln_b.exp();
        if b >= 1.0 {
            f64::INFINITY
        } else {
            b / ((1.0 - q) * (1.0 - b))
        }
    };
    // first K with B_K small enough: solve ln B_K ≤ ln(budget (1-q)/2), then verify
    let target = (budget * (1.0 - q) / 2.0).ln();
    let right_bound = |k: i64| logmod - (k as f64 + tp - s) / (2.0 * alpha);
    let mut k_end = (2.0 * alpha * (logmod - target) - tp + s).ceil().max(0.0) as i64;
    while tail(right_bound(k_end)) > budget {
        k_end += 1;
    }
    let cap = pol.hard_cap as i64;
    if k_end > cap {
        return Err(Error::Truncation {
            factors: pol.hard_cap,
            achieved: tail(right_bound(cap)),
        });
    }
    let hi = k_end - 1;
    if !two {
        return Ok((0, hi));
    }
    // |λ_{-m}/z| ≤ exp((-m + 2/p + S)/2α - logmod)
    let left_bound = |m: i64| (-(m as f64) + tp + s) / (2.0 * alpha) - logmod;
    let mut m_end = (2.0 * alpha * (logmod - target) + tp + s).ceil().max(1.0) as i64;
    while tail(left_bound(m_end)) > budget {
        m_end += 1;
    }
    if m_end - 1 > cap {
        return Err(Error::Truncation {
            factors: pol.hard_cap,
            achieved: tail(left_bound(cap + 1)),
        });
    }
    Ok((-(m_end - 1), hi))
}

/// Product of the factors with index in `[lo, hi]`, skipping `exclude`.
/// Reports the first vanishing factor.
pub(crate) fn product_over(
    spec: &SequenceSpec,
    z: LogComplex,
    range: (i64, i64),
    exclude: Option<i64>,
) -> std::result::Result<LogComplex, i64> {
    let mut logmod = 0.0;
    let mut phase = 0.0;
    for k in range.0..=range.1 {
        if Some(k) == exclude {
            continue;
        }
        let f = factor(spec, k, z);
        if f.is_zero() {
            return Err(k);
        }
        logmod += f.logmod();
        phase += f.phase();
    }
    Ok(LogComplex::new(logmod, phase))
}

fn nonzero_point(z: LogComplex) -> Result<()> {
    if z.is_zero() {
        Err(Error::Domain("products are evaluated at nonzero points".into()))
    } else {
        Ok(())
    }
}

/// `G_Λ(z)`; exactly [`LogComplex::ZERO`] when `z` is a node.
///
/// One-sided products at `z = 0` equal 1 and are returned as such.
pub fn canonical_product(spec: &SequenceSpec, z: LogComplex, pol: &TruncationPolicy) -> Result<LogComplex> {
    if z.is_zero() && !spec.space.is_two_sided() {
        return Ok(LogComplex::ONE);
    }
    nonzero_point(z)?;
    let range = truncation_range(spec, z.logmod(), pol)?;
    Ok(product_over(spec, z, range, None).unwrap_or(LogComplex::ZERO))
}

/// `G_Λ(z)` with the factor of node `k` removed.
pub fn product_excluding(spec: &SequenceSpec, z: LogComplex, k: i64, pol: &TruncationPolicy) -> Result<LogComplex> {
    spec.space.check_index(k)?;
    nonzero_point(z)?;
    let range = truncation_range(spec, z.logmod(), pol)?;
    Ok(product_over(spec, z, range, Some(k)).unwrap_or(LogComplex::ZERO))
}

/// `G'_Λ(λ_k)`, computed as `-E_k(λ_k)/λ_k` for `k ≥ 0` and `E_k(λ_k)/λ_k`
/// for `k < 0`, where `E_k` is the product without the `k`-th factor.
pub fn product_derivative_at_node(spec: &SequenceSpec, k: i64, pol: &TruncationPolicy) -> Result<LogComplex> {
    spec.space.check_index(k)?;
    let lam = spec.node_unchecked(k);
    let range = truncation_range(spec, lam.logmod(), pol)?;
    let e = product_over(spec, lam, range, Some(k)).map_err(|other| Error::Degenerate { index: k, other })?;
    Ok(if k >= 0 { -(e / lam) } else { e / lam })
}

/// A ratio `|G(z)| / comparator(z)` together with its parts, all as natural logs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    /// Index the comparator is built around.
    pub nearest: i64,
    /// `ln |G(z)|` (`-inf` at a node).
    pub log_abs_g: f64,
    /// `ln` of the comparator (`-inf` at a node).
    pub log_comparator: f64,
    /// `ln` of the ratio, computed without the cancelling zero factor so it
    /// stays finite at nodes.
    pub log_ratio: f64,
}

impl Estimate {
    pub fn ratio(&self) -> f64 {
        self.log_ratio.exp()
    }
}

/// `|G(z)|` against `(|z - λ_n|/|λ_n|) ∏_{0≤k<n} |z/λ_k|` with `λ_n` the
/// `d_log`-nearest node (for two-sided `n < 0`:
/// `(|z - λ_n|/|z|) ∏_{n<j<0} |λ_j/z|`).
pub fn coarse_estimate(spec: &SequenceSpec, z: LogComplex, pol: &TruncationPolicy) -> Result<Estimate> {
    nonzero_point(z)?;
    let n = dlog_nearest(spec, z)?;
    let lz = z.logmod();
    let lam_n = spec.node_unchecked(n);
    let range = truncation_range(spec, lz, pol)?;
    let e_n = product_over(spec, z, range, Some(n)).map_err(|other| Error::Degenerate { index: n, other })?;
    let f_n = factor(spec, n, z);
    let log_dist_n = (z - lam_n).modulus().logmod();
    // the modulus of the nearest factor divided by its comparator part is exactly 1
    let rest: f64 = if n >= 0 {
        (0..n).map(|k| lz - spec.node_unchecked(k).logmod()).sum()
    } else {
        (n + 1..0).map(|j| spec.node_unchecked(j).logmod() - lz).sum()
    };
    let log_comparator = log_dist_n - if n >= 0 { lam_n.logmod() } else { lz } + rest;
    Ok(Estimate {
        nearest: n,
        log_abs_g: e_n.logmod() + f_n.logmod(),
        log_comparator,
        log_ratio: e_n.logmod() - rest,
    })
}

pub fn coarse_estimate_ratio(spec: &SequenceSpec, z: LogComplex, pol: &TruncationPolicy) -> Result<f64> {
    Ok(coarse_estimate(spec, z, pol)?.ratio())
}

/// Exponent `1/2 + avg(δ_k + 2/p)` of the fine estimate, averaged over
/// `0 ≤ k ≤ n` (or `n ≤ k ≤ -1` for two-sided `n < 0`).
pub fn fine_exponent(spec: &SequenceSpec, n: i64) -> f64 {
    let (lo, hi) = if n >= 0 { (0, n) } else { (n, -1) };
    let sum: f64 = (lo..=hi).map(|k| spec.delta_at(k)).sum();
    0.5 + spec.space.two_over_p() + sum / (hi - lo + 1) as f64
}

/// `|G(z)|` against `e^{φ(z)} dist(z, Λ) / (1+|z|)^{e_n}` (two-sided:
/// `|z|^{e_n}`), with `e_n` from [`fine_exponent`] at the `d_log`-nearest
/// index `n`.
pub fn fine_estimate(spec: &SequenceSpec, z: LogComplex, pol: &TruncationPolicy) -> Result<Estimate> {
    nonzero_point(z)?;
    let lz = z.logmod();
    let n = dlog_nearest(spec, z)?;
    let (dist, j) = dist_to_sequence(spec, z)?;
    let range = truncation_range(spec, lz, pol)?;
    let e_j = product_over(spec, z, range, Some(j)).map_err(|other| Error::Degenerate { index: j, other })?;
    let f_j = factor(spec, j, z);
    // |factor_j| / dist = 1/|λ_j| (j ≥ 0) or 1/|z| (j < 0)
    let log_g_over_dist = e_j.logmod() - if j >= 0 { spec.node_unchecked(j).logmod() } else { lz };
    let log_base = if spec.space.is_two_sided() { lz } else { ln_1p_exp(lz) };
    let expo = fine_exponent(spec, n);
    let phi = weight_phi(&spec.space, z);
    let log_comparator = phi + dist.logmod() - expo * log_base;
    Ok(Estimate {
        nearest: n,
        log_abs_g: e_j.logmod() + f_j.logmod(),
        log_comparator,
        log_ratio: log_g_over_dist + expo * log_base - phi,
    })
}

pub fn fine_estimate_ratio(spec: &SequenceSpec, z: LogComplex, pol: &TruncationPolicy) -> Result<f64> {
    Ok(fine_estimate(spec, z, pol)?.ratio())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::{Exponent, SpaceParams, TailedSpec};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn gamma(two: bool) -> SequenceSpec {
        let space = if two {
            SpaceParams::two_sided(1.0, Exponent::Infinite)
        } else {
            SpaceParams::one_sided(1.0, Exponent::Infinite)
        };
        SequenceSpec::base(space)
    }

    /// Partial product with plain complex arithmetic.
    fn brute(spec: &SequenceSpec, z: Complex64, n: i64) -> Complex64 {
        let lo = if spec.space.is_two_sided() { -n } else { 0 };
        let mut acc = Complex64::new(1.0, 0.0);
        for k in lo..n {
            let lam = spec.node_unchecked(k).to_complex();
            acc *= if k >= 0 { 1.0 - z / lam } else { 1.0 - lam / z };
        }
        acc
    }

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy::new(0.0, 10).is_err());
        assert!(TruncationPolicy::new(1e-2, 10).is_err());
        assert!(TruncationPolicy::new(1e-3, 10).is_ok());
    }

    #[test]
    fn zero_at_nodes() {
        let pol = TruncationPolicy::default();
        for two in [false, true] {
            let g = gamma(two);
            for k in [0, 3, 17] {
                assert!(canonical_product(&g, g.node(k).unwrap(), &pol).unwrap().is_zero());
            }
        }
        let g = gamma(true);
        assert!(canonical_product(&g, g.node(-4).unwrap(), &pol).unwrap().is_zero());
    }

    #[test]
    fn value_near_origin_is_one() {
        let g = gamma(false);
        let v = canonical_product(&g, LogComplex::from_real(1e-12), &TruncationPolicy::default()).unwrap();
        assert!((v.to_complex() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn matches_partial_product_at_minus_one() {
        // the nodes e^{k/2} exceed f64 range past k ≈ 1400; 500 factors are plenty
        let g = gamma(false);
        let want = brute(&g, Complex64::new(-1.0, 0.0), 500);
        let got = canonical_product(&g, LogComplex::from_real(-1.0), &TruncationPolicy::default()).unwrap();
        assert!((got.to_complex() - want).norm() <= 1e-9 * want.norm());
    }

    #[test]
    fn derivative_matches_difference_quotient_oracle() {
        let g = gamma(false);
        let pol = TruncationPolicy::default();
        let d = product_derivative_at_node(&g, 0, &pol).unwrap().to_complex();
        // G'(λ_0) = -(1/λ_0) ∏_{j≥1} (1 - λ_0/λ_j)
        let mut want = Complex64::new(-1.0, 0.0);
        for j in 1..500 {
            want *= 1.0 - 1.0 / g.node_unchecked(j).to_complex();
        }
        assert!((d - want).norm() <= 1e-9 * want.norm());
        // G is positive on (0, λ_0), so it decreases through its first zero
        assert!((d.arg().abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn derivative_of_two_sided_product() {
        let g = gamma(true);
        let pol = TruncationPolicy::default();
        for k in [-3i64, 2] {
            let lam = g.node_unchecked(k);
            let d = product_derivative_at_node(&g, k, &pol).unwrap().to_complex();
            let h = 1e-6 * lam.abs();
            let zp = LogComplex::from_complex(lam.to_complex() + h);
            let zm = LogComplex::from_complex(lam.to_complex() - h);
            let gp = canonical_product(&g, zp, &pol).unwrap().to_complex();
            let gm = canonical_product(&g, zm, &pol).unwrap().to_complex();
            let fd = (gp - gm) / (2.0 * h);
            assert!((d - fd).norm() <= 1e-6 * d.norm(), "k = {k}: {d} vs {fd}");
        }
    }

    #[test]
    fn coincident_nodes_are_degenerate() {
        let sp = SpaceParams::one_sided(1.0, Exponent::Infinite);
        let s = SequenceSpec::new(sp, TailedSpec::table([(0, 0.0), (1, -1.0)], 0.0), TailedSpec::constant(0.0)).unwrap();
        assert!(matches!(
            product_derivative_at_node(&s, 0, &TruncationPolicy::default()),
            Err(Error::Degenerate { index: 0, other: 1 })
        ));
    }

    #[test]
    fn estimates_multiply_back_to_g() {
        let pol = TruncationPolicy::default();
        for two in [false, true] {
            let g = gamma(two);
            for &(l, th) in &[(0.25, 0.0), (7.3, PI), (-2.2, 1.0), (3.0, 0.3)] {
                let z = LogComplex::new(l, th);
                let lg = canonical_product(&g, z, &pol).unwrap().logmod();
                let c = coarse_estimate(&g, z, &pol).unwrap();
                let f = fine_estimate(&g, z, &pol).unwrap();
                assert!((c.log_ratio + c.log_comparator - lg).abs() < 1e-9);
                assert!((f.log_ratio + f.log_comparator - lg).abs() < 1e-9);
                assert!((c.log_abs_g - lg).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn coarse_ratio_examples() {
        let pol = TruncationPolicy::default();
        let g = gamma(false);
        let r = coarse_estimate_ratio(&g, LogComplex::from_logmod(0.25), &pol).unwrap();
        assert!((1.0 / 50.0..=50.0).contains(&r));
        let r1 = coarse_estimate_ratio(&g, LogComplex::new(7.3, PI), &pol).unwrap();
        let r2 = coarse_estimate_ratio(&g, LogComplex::new(2.3, PI), &pol).unwrap();
        assert!(r1 / r2 <= 3.0 && r2 / r1 <= 3.0);
        // finite nonzero limit at a node
        let at = coarse_estimate_ratio(&g, g.node(4).unwrap(), &pol).unwrap();
        assert!(at.is_finite() && at > 0.0);
    }

    #[test]
    fn fine_ratio_inside_unit_disc() {
        let g = gamma(false);
        let r = fine_estimate_ratio(&g, LogComplex::new(-0.7, 2.0), &TruncationPolicy::default()).unwrap();
        assert!(r.is_finite() && r > 0.0);
    }

    #[test]
    fn truncation_cap_is_enforced() {
        let g = gamma(false);
        let pol = TruncationPolicy::new(1e-12, 10).unwrap();
        assert!(matches!(
            canonical_product(&g, LogComplex::from_logmod(20.0), &pol),
            Err(Error::Truncation { factors: 10, .. })
        ));
    }
}
