//! The matrix `T_mk = w(γ_m)/w(λ_k) · g_k(γ_m)` carrying data on the
//! geometric sequence `Γ` to data on `Λ`.
//!
//! Its entries decay exponentially off the diagonal exactly when the window
//! condition holds; when it fails, one triangle grows instead.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::logc::{normalize_phase, LogComplex};
use crate::products::{factor, product_over, truncation_range, TruncationPolicy};
use crate::sequence::{describe, SequenceSpec, TailedSpec};
use crate::spaces::eval_weight;

/// Phases for `Γ` placing `γ_m` on the ray opposite to the node of `Λ`
/// nearest in modulus (smaller index on ties), so that
/// `dist(γ_m, Λ) ≳ |γ_m|`.
pub fn gamma_phase_choice(spec: &SequenceSpec) -> Result<TailedSpec> {
    let s = spec.sup_delta();
    let two = spec.space.is_two_sided();
    let reach = s.ceil() as i64 + 1;
    let nearest = |m: i64| -> i64 {
        let lo = if two { m - reach } else { (m - reach).max(0) };
        let mut best = (f64::INFINITY, lo);
        for k in lo..=m + reach {
            let d = (k as f64 + spec.delta_at(k) - m as f64).abs();
            if d < best.0 {
                best = (d, k);
            }
        }
        best.1
    };
    let phase = |m: i64| normalize_phase(spec.theta.at(nearest(m)) + std::f64::consts::PI);
    let period = spec.joint_period()?;
    let (lo, hi) = spec.core();
    describe(phase, spec.side(), (lo - reach - 1, hi + reach + 1), period)
}

/// `Γ` with the given phases.
pub fn gamma_spec(spec: &SequenceSpec, phases: &TailedSpec) -> SequenceSpec {
    SequenceSpec {
        space: spec.space,
        delta: TailedSpec::constant(0.0),
        theta: phases.clone(),
    }
}

/// Exponent of the predicted size of `|T_mk|`:
/// `(1/4α)(-(m-k) - 2 Σ_{k≤j<m} δ_j)` for `m > k`,
/// `(1/4α)(-(k-m) + 2 Σ_{m≤j<k} δ_j)` for `m < k`, `0` on the diagonal.
pub fn predicted_log_entry(spec: &SequenceSpec, m: i64, k: i64) -> f64 {
    let a4 = 4.0 * spec.space.alpha;
    if m > k {
        let s: f64 = (k..m).map(|j| spec.delta_at(j)).sum();
        (-((m - k) as f64) - 2.0 * s) / a4
    } else if m < k {
        let s: f64 = (m..k).map(|j| spec.delta_at(j)).sum();
        (-((k - m) as f64) + 2.0 * s) / a4
    } else {
        0.0
    }
}

struct Row {
    gamma: LogComplex,
    range: (i64, i64),
    /// `G(γ_m)`
    g: LogComplex,
    weight: LogComplex,
}

struct Col {
    k: i64,
    lam: LogComplex,
    /// `E_k(λ_k)`
    e: LogComplex,
    weight: LogComplex,
}

fn row(spec: &SequenceSpec, gamma: &SequenceSpec, m: i64, pol: &TruncationPolicy) -> Result<Row> {
    let g_m = gamma.node(m)?;
    let range = truncation_range(spec, g_m.logmod(), pol)?;
    let g = product_over(spec, g_m, range, None).map_err(|_| Error::OnNode { index: m })?;
    Ok(Row {
        gamma: g_m,
        range,
        g,
        weight: eval_weight(&spec.space, g_m),
    })
}

fn col(spec: &SequenceSpec, k: i64, pol: &TruncationPolicy) -> Result<Col> {
    let lam = spec.node(k)?;
    let range = truncation_range(spec, lam.logmod(), pol)?;
    let e = product_over(spec, lam, range, Some(k)).map_err(|other| Error::Degenerate { index: k, other })?;
    Ok(Col {
        k,
        lam,
        e,
        weight: eval_weight(&spec.space, lam),
    })
}

fn entry(spec: &SequenceSpec, r: &Row, c: &Col) -> LogComplex {
    let in_range = c.k >= r.range.0 && c.k <= r.range.1;
    let e_at_gamma = if in_range { r.g / factor(spec, c.k, r.gamma) } else { r.g };
    let mut g_k = e_at_gamma / c.e;
    if c.k < 0 {
        g_k = g_k * (c.lam / r.gamma);
    }
    r.weight / c.weight * g_k
}

/// A single entry `T_mk`.
pub fn t_entry(spec: &SequenceSpec, gamma_phases: &TailedSpec, m: i64, k: i64, pol: &TruncationPolicy) -> Result<LogComplex> {
    let gamma = gamma_spec(spec, gamma_phases);
    Ok(entry(spec, &row(spec, &gamma, m, pol)?, &col(spec, k, pol)?))
}

/// A finite block of `T` with everything needed to recompute it.
#[derive(Clone, Debug)]
pub struct TMatrixSection {
    pub rows: RangeInclusive<i64>,
    pub cols: RangeInclusive<i64>,
    /// Row-major.
    pub entries: Vec<LogComplex>,
    pub spec: SequenceSpec,
    pub gamma_phases: TailedSpec,
    pub pol: TruncationPolicy,
}

impl TMatrixSection {
    pub fn n_rows(&self) -> usize {
        (self.rows.end() - self.rows.start() + 1) as usize
    }

    pub fn n_cols(&self) -> usize {
        (self.cols.end() - self.cols.start() + 1) as usize
    }

    pub fn get(&self, m: i64, k: i64) -> LogComplex {
        let i = (m - self.rows.start()) as usize;
        let j = (k - self.cols.start()) as usize;
        self.entries[i * self.n_cols() + j]
    }

    /// `(m, k, T_mk)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, LogComplex)> + '_ {
        let nc = self.n_cols();
        self.entries.iter().enumerate().map(move |(idx, v)| {
            (
                self.rows.start() + (idx / nc) as i64,
                self.cols.start() + (idx % nc) as i64,
                *v,
            )
        })
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().map(|e| e.logmod()).fold(f64::NEG_INFINITY, f64::max).exp()
    }
}

/// Compute every entry of `T` over `rows × cols`.
pub fn assemble_section(
    spec: &SequenceSpec,
    gamma_phases: &TailedSpec,
    rows: RangeInclusive<i64>,
    cols: RangeInclusive<i64>,
    pol: &TruncationPolicy,
) -> Result<TMatrixSection> {
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::Domain("section ranges must be nonempty".into()));
    }
    let gamma = gamma_spec(spec, gamma_phases);
    let row_data: Vec<Row> = rows
        .clone()
        .into_par_iter()
        .map(|m| row(spec, &gamma, m, pol))
        .collect::<Result<_>>()?;
    let col_data: Vec<Col> = cols
        .clone()
        .into_par_iter()
        .map(|k| col(spec, k, pol))
        .collect::<Result<_>>()?;
    let entries: Vec<LogComplex> = row_data
        .par_iter()
        .flat_map_iter(|r| col_data.iter().map(move |c| entry(spec, r, c)))
        .collect();
    Ok(TMatrixSection {
        rows,
        cols,
        entries,
        spec: spec.clone(),
        gamma_phases: gamma_phases.clone(),
        pol: *pol,
    })
}

/// Least-squares lines `log|T_mk| ≈ offset + slope · |m - k|`, fitted
/// separately above (`m < k`) and below (`m > k`) the diagonal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub slope_upper: f64,
    pub slope_lower: f64,
    pub offset_upper: f64,
    pub offset_lower: f64,
}

impl DecayFit {
    pub fn offset(&self) -> f64 {
        0.5 * (self.offset_upper + self.offset_lower)
    }
}

fn fit_line(points: &[(f64, f64)], which: &str) -> Result<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(Error::FitDegenerate(format!("{which} half has fewer than two entries")));
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::FitDegenerate(format!("{which} half has a single distance")));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

pub fn decay_fit(section: &TMatrixSection) -> Result<DecayFit> {
    if section.n_rows() < 16 || section.n_cols() < 16 {
        return Err(Error::FitDegenerate("section must be at least 16×16".into()));
    }
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for (m, k, v) in section.iter() {
        if v.is_zero() || m == k {
            continue;
        }
        let d = (m - k).abs() as f64;
        if m < k {
            upper.push((d, v.logmod()));
        } else {
            lower.push((d, v.logmod()));
        }
    }
    let (slope_upper, offset_upper) = fit_line(&upper, "upper")?;
    let (slope_lower, offset_lower) = fit_line(&lower, "lower")?;
    Ok(DecayFit {
        slope_upper,
        slope_lower,
        offset_upper,
        offset_lower,
    })
}

/// Largest `|log|T_mk| - predicted_log_entry(m, k)|` over the section.
pub fn prediction_residual(section: &TMatrixSection) -> f64 {
    section
        .iter()
        .map(|(m, k, v)| (v.logmod() - predicted_log_entry(&section.spec, m, k)).abs())
        .fold(0.0, f64::max)
}

/// Exact finite-section norms for `p ∈ {1, 2, ∞}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionNorms {
    /// Largest column sum.
    pub p1: f64,
    /// Spectral norm.
    pub p2: f64,
    /// Largest row sum.
    pub pinf: f64,
}

impl SectionNorms {
    /// Riesz–Thorin bound `p1^{1/p} pinf^{1-1/p}` for `1 ≤ p ≤ ∞`; `None`
    /// for `p < 1`, where no such bound is available.
    pub fn interpolated(&self, p: f64) -> Option<f64> {
        if p.is_nan() || p < 1.0 {
            return None;
        }
        let t = 1.0 / p;
        Some(self.p1.powf(t) * self.pinf.powf(1.0 - t))
    }
}

const POWER_ITERATIONS: usize = 10_000;

pub fn section_norms(section: &TMatrixSection) -> Result<SectionNorms> {
    let nr = section.n_rows();
    let nc = section.n_cols();
    // rescale so the largest entry is 1
    let scale = section.entries.iter().map(|e| e.logmod()).fold(f64::NEG_INFINITY, f64::max);
    if scale == f64::NEG_INFINITY {
        return Ok(SectionNorms {
            p1: 0.0,
            p2: 0.0,
            pinf: 0.0,
        });
    }
    let a: Vec<Complex64> = section
        .entries
        .iter()
        .map(|e| LogComplex::new(e.logmod() - scale, e.phase()).to_complex())
        .collect();
    let p1 = (0..nc)
        .map(|j| (0..nr).map(|i| a[i * nc + j].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let pinf = (0..nr)
        .map(|i| a[i * nc..(i + 1) * nc].iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max);

    let mut v = vec![Complex64::new(1.0, 0.0); nc];
    let mut rho = 0.0;
    let mut converged = false;
    for _ in 0..POWER_ITERATIONS {
        let av: Vec<Complex64> = (0..nr)
            .map(|i| a[i * nc..(i + 1) * nc].iter().zip(&v).map(|(x, y)| x * y).sum())
            .collect();
        let mut w: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); nc];
        for i in 0..nr {
            for j in 0..nc {
                w[j] += a[i * nc + j].conj() * av[i];
            }
        }
        let vn: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>();
        let next: f64 = v.iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum::<f64>() / vn;
        let wn = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if wn == 0.0 {
            rho = 0.0;
            converged = true;
            break;
        }
        v = w.into_iter().map(|x| x / wn).collect();
        if (next - rho).abs() <= 1e-14 * next.abs() {
            rho = next;
            converged = true;
            break;
        }
        rho = next;
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "power iteration for the spectral norm",
            iterations: POWER_ITERATIONS,
        });
    }
    let s = scale.exp();
    Ok(SectionNorms {
        p1: p1 * s,
        p2: rho.max(0.0).sqrt() * s,
        pinf: pinf * s,
    })
}
