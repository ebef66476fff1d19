//! Weights, norms, restriction to sequences and the interpolation series.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::criterion::{decide_cis, Decision};
use crate::error::{Error, Result};
use crate::logc::{ln_1p_exp, LogComplex};
use crate::products::{factor, product_excluding, product_over, truncation_range, TruncationPolicy};
use crate::quadrature::Rule;
use crate::sequence::{Exponent, SequenceSpec, Side, SpaceParams};

/// `φ(z)`: `α log₊²|z|` one-sided, `α log²|z|` two-sided.
pub fn weight_phi(space: &SpaceParams, z: LogComplex) -> f64 {
    let l = z.logmod();
    match space.side {
        Side::OneSided => {
            let l = l.max(0.0);
            space.alpha * l * l
        }
        Side::TwoSided => space.alpha * l * l,
    }
}

/// `ln` of the polynomial part of the evaluation weight: `ln(1+|z|)`
/// one-sided, `ln |z|` two-sided.
fn log_base(space: &SpaceParams, z: LogComplex) -> f64 {
    match space.side {
        Side::OneSided => ln_1p_exp(z.logmod()),
        Side::TwoSided => z.logmod(),
    }
}

/// `w(λ) = (1+|λ|)^{2/p} e^{-φ(λ)}` (two-sided `|λ|^{2/p} e^{-φ(λ)}`).
pub fn eval_weight(space: &SpaceParams, lam: LogComplex) -> LogComplex {
    LogComplex::from_logmod(space.two_over_p() * log_base(space, lam) - weight_phi(space, lam))
}

/// Where an [`Evaluable`] is analytic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Plane,
    PuncturedPlane,
}

/// A deterministic function on the plane, evaluated in log-polar form.
pub trait Evaluable: Send + Sync {
    fn eval(&self, z: LogComplex) -> Result<LogComplex>;
    fn domain(&self) -> Domain;
}

/// `c · z^n`.
#[derive(Clone, Copy, Debug)]
pub struct Monomial {
    pub coef: LogComplex,
    pub power: i32,
}

impl Monomial {
    pub fn constant(c: f64) -> Self {
        Monomial {
            coef: LogComplex::from_real(c),
            power: 0,
        }
    }

    pub fn power(n: i32) -> Self {
        Monomial {
            coef: LogComplex::ONE,
            power: n,
        }
    }
}

impl Evaluable for Monomial {
    fn eval(&self, z: LogComplex) -> Result<LogComplex> {
        if self.power == 0 {
            return Ok(self.coef);
        }
        if z.is_zero() {
            return if self.power > 0 {
                Ok(LogComplex::ZERO)
            } else {
                Err(Error::Domain("negative power evaluated at 0".into()))
            };
        }
        let n = self.power as f64;
        Ok(self.coef * LogComplex::new(n * z.logmod(), n * z.phase()))
    }

    fn domain(&self) -> Domain {
        if self.power >= 0 {
            Domain::Plane
        } else {
            Domain::PuncturedPlane
        }
    }
}

/// `s · f`.
pub struct Scaled<'a> {
    pub scale: LogComplex,
    pub inner: &'a dyn Evaluable,
}

impl Evaluable for Scaled<'_> {
    fn eval(&self, z: LogComplex) -> Result<LogComplex> {
        Ok(self.scale * self.inner.eval(z)?)
    }

    fn domain(&self) -> Domain {
        self.inner.domain()
    }
}

fn side_domain(side: Side) -> Domain {
    match side {
        Side::OneSided => Domain::Plane,
        Side::TwoSided => Domain::PuncturedPlane,
    }
}

/// `G_Λ` as an [`Evaluable`].
pub struct CanonicalProduct {
    pub spec: SequenceSpec,
    pub pol: TruncationPolicy,
}

impl Evaluable for CanonicalProduct {
    fn eval(&self, z: LogComplex) -> Result<LogComplex> {
        crate::products::canonical_product(&self.spec, z, &self.pol)
    }

    fn domain(&self) -> Domain {
        side_domain(self.spec.side())
    }
}

/// Finitely supported data `(c_k)` on the index set of a space.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSeq {
    pub support: BTreeMap<i64, Complex64>,
    pub space: SpaceParams,
}

impl SampleSeq {
    pub fn new(space: SpaceParams, support: BTreeMap<i64, Complex64>) -> Result<Self> {
        for k in support.keys() {
            space.check_index(*k)?;
        }
        Ok(SampleSeq { support, space })
    }

    pub fn unit(space: SpaceParams, k: i64) -> Result<Self> {
        Self::new(space, BTreeMap::from([(k, Complex64::new(1.0, 0.0))]))
    }

    pub fn get(&self, k: i64) -> Complex64 {
        self.support.get(&k).copied().unwrap_or_default()
    }

    /// `(Σ |c_k|^p)^{1/p}`, or `sup |c_k|` for `p = ∞`.
    pub fn lp_norm(&self) -> f64 {
        match self.space.p {
            Exponent::Infinite => self.support.values().map(|c| c.norm()).fold(0.0, f64::max),
            Exponent::Finite(p) => self.support.values().map(|c| c.norm().powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }

    /// Largest `|c_k - d_k|` over the union of supports.
    pub fn sup_distance(&self, other: &SampleSeq) -> f64 {
        self.support
            .keys()
            .chain(other.support.keys())
            .map(|k| (self.get(*k) - other.get(*k)).norm())
            .fold(0.0, f64::max)
    }
}

/// `(R_Λ f)_k = f(λ_k) w(λ_k)` for `k` in `window`.
pub fn restriction(spec: &SequenceSpec, f: &dyn Evaluable, window: RangeInclusive<i64>) -> Result<SampleSeq> {
    let mut support = BTreeMap::new();
    for k in window {
        let lam = spec.node(k)?;
        let v = f
            .eval(lam)
            .map_err(|e| Error::AtNode {
                index: k,
                source: Box::new(e),
            })?;
        support.insert(k, (v * eval_weight(&spec.space, lam)).to_complex());
    }
    Ok(SampleSeq {
        support,
        space: spec.space,
    })
}

/// `g_k(z) = G_Λ(z) / (G'_Λ(λ_k)(z - λ_k))`, evaluated as `E_k(z)/E_k(λ_k)`
/// (times `λ_k/z` for `k < 0`) with `E_k` the product without the `k`-th
/// factor. `g_k(λ_k) = 1` and `g_k(λ_j) = 0` hold exactly.
pub struct Biorthogonal {
    spec: SequenceSpec,
    k: i64,
    pol: TruncationPolicy,
    lam: LogComplex,
    norm_const: LogComplex,
}

pub fn biorthogonal(spec: &SequenceSpec, k: i64, pol: &TruncationPolicy) -> Result<Biorthogonal> {
    let lam = spec.node(k)?;
    let range = truncation_range(spec, lam.logmod(), pol)?;
    let norm_const = product_over(spec, lam, range, Some(k)).map_err(|other| Error::Degenerate { index: k, other })?;
    Ok(Biorthogonal {
        spec: spec.clone(),
        k,
        pol: *pol,
        lam,
        norm_const,
    })
}

impl Biorthogonal {
    pub fn index(&self) -> i64 {
        self.k
    }

    /// `E_k(λ_k)`.
    pub fn normalization(&self) -> LogComplex {
        self.norm_const
    }
}

impl Evaluable for Biorthogonal {
    fn eval(&self, z: LogComplex) -> Result<LogComplex> {
        if z == self.lam {
            return Ok(LogComplex::ONE);
        }
        if z.is_zero() {
            return if self.k >= 0 {
                Ok(LogComplex::ONE / self.norm_const)
            } else {
                Err(Error::Domain("two-sided biorthogonal functions have a pole at 0".into()))
            };
        }
        let e = product_excluding(&self.spec, z, self.k, &self.pol)?;
        let v = e / self.norm_const;
        Ok(if self.k < 0 { v * (self.lam / z) } else { v })
    }

    fn domain(&self) -> Domain {
        side_domain(self.spec.side())
    }
}

/// `f = Σ_k c_k w(λ_k)^{-1} g_k`, a finite sum.
pub struct Interpolant {
    spec: SequenceSpec,
    pol: TruncationPolicy,
    /// enumeration shift applied to the data indices (two-sided)
    shift: i64,
    terms: Vec<Term>,
    /// set when the sequence is not certified complete interpolating
    pub cis_warning: bool,
}

struct Term {
    k: i64,
    lam: LogComplex,
    coef: LogComplex,
}

/// Build the interpolation series for `data` on `Λ`.
///
/// For two-sided sequences whose window condition holds only after a
/// re-numbering `λ'_k = λ_{k+m}`, the series is built in the shifted
/// enumeration; data indices keep referring to the nodes of `spec`. If `Λ`
/// is not certified complete interpolating the series is still built and
/// [`Interpolant::cis_warning`] is set.
pub fn interpolate(spec: &SequenceSpec, data: &SampleSeq, pol: &TruncationPolicy) -> Result<Interpolant> {
    if data.space != spec.space {
        return Err(Error::Domain("data and sequence live in different spaces".into()));
    }
    let verdict = decide_cis(spec)?;
    let monotone = spec.is_monotone()?;
    let shift = match verdict.shift_m {
        Some(m) if monotone => m,
        _ => 0,
    };
    let working = if shift != 0 { spec.shift_enumeration(shift)? } else { spec.clone() };
    let mut terms = Vec::new();
    for (&k, &c) in &data.support {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let j = k - shift;
        let g = biorthogonal(&working, j, pol)?;
        let lam = g.lam;
        let w = eval_weight(&spec.space, lam);
        // g_j(z) = E_j(z) / E_j(λ_j), folded into the coefficient
        let coef = LogComplex::from_complex(c) / w / g.norm_const;
        terms.push(Term { k: j, lam, coef });
    }
    Ok(Interpolant {
        spec: working,
        pol: *pol,
        shift,
        terms,
        cis_warning: verdict.decision != Decision::Yes,
    })
}

impl Interpolant {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Enumeration shift applied internally.
    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// `|(R_Λ f)_k - c_k|` for every `k` in `window` (indices of the input
    /// enumeration).
    pub fn residuals(&self, data: &SampleSeq, window: RangeInclusive<i64>) -> Result<Vec<(i64, f64)>> {
        let mut out = Vec::new();
        for k in window {
            if !self.spec.space.admits(k - self.shift) {
                continue;
            }
            let lam = self.spec.node(k - self.shift)?;
            let v = self.eval(lam).map_err(|e| Error::AtNode {
                index: k,
                source: Box::new(e),
            })?;
            let r = (v * eval_weight(&self.spec.space, lam)).to_complex();
            out.push((k, (r - data.get(k)).norm()));
        }
        Ok(out)
    }
}

impl Evaluable for Interpolant {
    fn eval(&self, z: LogComplex) -> Result<LogComplex> {
        if self.terms.is_empty() {
            return Ok(LogComplex::ZERO);
        }
        if z.is_zero() {
            if self.spec.space.is_two_sided() {
                return Err(Error::Domain("two-sided interpolants are evaluated on the punctured plane".into()));
            }
            // E_k(0) = 1
            return Ok(LogComplex::sum(self.terms.iter().map(|t| t.coef)));
        }
        let range = truncation_range(&self.spec, z.logmod(), &self.pol)?;
        let mut logmod = 0.0;
        let mut phase = 0.0;
        let mut at_node = None;
        for j in range.0..=range.1 {
            let f = factor(&self.spec, j, z);
            if f.is_zero() {
                at_node = Some(j);
                continue;
            }
            logmod += f.logmod();
            phase += f.phase();
        }
        // `full` is G(z) without the factor of a node sitting at z (if any)
        let full = LogComplex::new(logmod, phase);
        if let Some(j) = at_node {
            return Ok(match self.terms.iter().find(|t| t.k == j) {
                Some(t) => {
                    let v = t.coef * full;
                    if j < 0 {
                        v * (t.lam / z)
                    } else {
                        v
                    }
                }
                None => LogComplex::ZERO,
            });
        }
        let in_range = |k: i64| k >= range.0 && k <= range.1;
        let terms = self.terms.iter().map(|t| {
            let e = if in_range(t.k) { full / factor(&self.spec, t.k, z) } else { full };
            let v = t.coef * e;
            if t.k < 0 {
                v * (t.lam / z)
            } else {
                v
            }
        });
        Ok(LogComplex::sum(terms))
    }

    fn domain(&self) -> Domain {
        side_domain(self.spec.side())
    }
}

/// Quadrature resolution for [`norm_fp`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadParams {
    /// Gauss–Legendre nodes over `θ ∈ (-π, π]`.
    pub theta_nodes: usize,
    /// Gauss–Legendre nodes per panel in `t = log|z|`.
    pub t_nodes: usize,
    /// Panel width in `t` before scaling by `1/sqrt(pα)`.
    pub panel_width: f64,
    /// Panels are added outward until their contribution drops below this
    /// fraction of the running total.
    pub tail_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadParams {
    fn default() -> Self {
        QuadParams {
            theta_nodes: 64,
            t_nodes: 16,
            panel_width: 0.5,
            tail_tol: 1e-16,
            max_panels: 4000,
        }
    }
}

impl QuadParams {
    /// Twice the resolution in both directions.
    pub fn refined(&self) -> Self {
        QuadParams {
            theta_nodes: 2 * self.theta_nodes,
            t_nodes: 2 * self.t_nodes,
            ..*self
        }
    }
}

/// `‖f‖_{p,φ}` and, for finite `p`, the integral `‖f‖^p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormValue {
    pub norm: f64,
    /// `∫ |f|^p e^{-pφ} dA`; equals `norm` for `p = ∞`.
    pub integral: f64,
    pub log_integral: f64,
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Sample `ln(|f| e^{-φ})` over a `t`-panel.
fn panel_samples(
    space: &SpaceParams,
    f: &dyn Evaluable,
    t_rule: &Rule,
    theta: &Rule,
) -> Result<Vec<(f64, f64, f64)>> {
    let points: Vec<(f64, f64)> = t_rule
        .nodes
        .iter()
        .flat_map(|&t| theta.nodes.iter().map(move |&th| (t, th)))
        .collect();
    points
        .par_iter()
        .map(|&(t, th)| {
            let z = LogComplex::new(t, th);
            let v = f.eval(z)?;
            let lv = v.logmod() - weight_phi(space, z);
            if lv.is_nan() || lv == f64::INFINITY {
                return Err(Error::NonFinite { t, theta: th });
            }
            Ok((t, th, lv))
        })
        .collect()
}

/// `‖f‖^p = ∫ |f|^p e^{-pφ} dA` under `z = e^{t+iθ}`, `dA = e^{2t} dt dθ`,
/// by composite Gauss–Legendre rules; `p = ∞` takes the grid maximum of
/// `|f| e^{-φ}` and refines it locally.
pub fn norm_fp(space: &SpaceParams, f: &dyn Evaluable, quad: &QuadParams) -> Result<NormValue> {
    let theta = Rule::on(quad.theta_nodes, -std::f64::consts::PI, std::f64::consts::PI);
    let p_eff = match space.p {
        Exponent::Finite(p) => p,
        Exponent::Infinite => 1.0,
    };
    let h = quad.panel_width * (1.0 / (p_eff * space.alpha).sqrt()).min(1.0);
    match space.p {
        Exponent::Finite(p) => norm_finite(space, f, quad, &theta, h, p),
        Exponent::Infinite => norm_sup(space, f, quad, &theta, h),
    }
}

fn norm_finite(space: &SpaceParams, f: &dyn Evaluable, quad: &QuadParams, theta: &Rule, h: f64, p: f64) -> Result<NormValue> {
    let panel = |i: i64| -> Result<f64> {
        let a = i as f64 * h;
        let rule = Rule::on(quad.t_nodes, a, a + h);
        let samples = panel_samples(space, f, &rule, theta)?;
        let nt = theta.nodes.len();
        let logs: Vec<f64> = samples
            .iter()
            .enumerate()
            .map(|(idx, &(t, _, lv))| {
                let wt = rule.weights[idx / nt] * theta.weights[idx % nt];
                p * lv + 2.0 * t + wt.ln()
            })
            .collect();
        Ok(log_sum_exp(&logs))
    };
    let mut contributions = vec![panel(0)?, panel(-1)?];
    let mut total = log_sum_exp(&contributions);
    for dir in [1i64, -1] {
        let mut i = if dir > 0 { 1 } else { -2 };
        let mut prev = contributions[if dir > 0 { 0 } else { 1 }];
        let mut quiet = 0;
        let mut count = 0;
        loop {
            let c = panel(i)?;
            contributions.push(c);
            total = log_sum_exp(&[total, c]);
            if c - total < quad.tail_tol.ln() && c <= prev {
                quiet += 1;
            } else {
                quiet = 0;
            }
            if quiet >= 3 {
                break;
            }
            prev = c;
            i += dir;
            count += 1;
            if count > quad.max_panels {
                return Err(Error::NonConvergence {
                    what: "norm quadrature (integral does not settle)",
                    iterations: quad.max_panels,
                });
            }
        }
    }
    // re-sum in a fixed order for run-to-run reproducibility
    let log_integral = log_sum_exp(&contributions);
    Ok(NormValue {
        norm: (log_integral / p).exp(),
        integral: log_integral.exp(),
        log_integral,
    })
}

fn norm_sup(space: &SpaceParams, f: &dyn Evaluable, quad: &QuadParams, theta: &Rule, h: f64) -> Result<NormValue> {
    let panel_max = |i: i64| -> Result<(f64, f64, f64)> {
        let a = i as f64 * h;
        let rule = Rule::on(quad.t_nodes, a, a + h);
        let samples = panel_samples(space, f, &rule, theta)?;
        Ok(samples
            .into_iter()
            .fold((f64::NAN, f64::NAN, f64::NEG_INFINITY), |b, s| if s.2 > b.2 { s } else { b }))
    };
    let mut best = panel_max(0)?;
    for dir in [1i64, -1] {
        let mut i = if dir > 0 { 1 } else { -1 };
        let mut quiet = 0;
        let mut count = 0;
        loop {
            let m = panel_max(i)?;
            if m.2 > best.2 + 1e-15 * best.2.abs().max(1.0) {
                best = m;
                quiet = 0;
            } else {
                quiet += 1;
            }
            if quiet >= 8 {
                break;
            }
            i += dir;
            count += 1;
            if count > quad.max_panels {
                return Err(Error::NonConvergence {
                    what: "sup-norm search (function grows without bound)",
                    iterations: quad.max_panels,
                });
            }
        }
    }
    // pattern search around the best grid point
    let value = |t: f64, th: f64| -> Result<f64> {
        let z = LogComplex::new(t, th);
        Ok(f.eval(z)?.logmod() - weight_phi(space, z))
    };
    let (mut t, mut th, mut v) = best;
    if v > f64::NEG_INFINITY {
        let mut st = h / quad.t_nodes as f64;
        let mut sth = std::f64::consts::TAU / quad.theta_nodes as f64;
        while st > 1e-10 {
            let mut moved = false;
            for (dt, dth) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let (nt, nth) = (t + dt * st, th + dth * sth);
                let nv = value(nt, nth)?;
                if nv > v {
                    t = nt;
                    th = nth;
                    v = nv;
                    moved = true;
                }
            }
            if !moved {
                st *= 0.5;
                sth *= 0.5;
            }
        }
    }
    let norm = v.exp();
    Ok(NormValue {
        norm,
        integral: norm,
        log_integral: v,
    })
}

/// `|f(z)| (1+|z|)^{2/p} e^{-φ(z)} / ‖f‖` (two-sided with `|z|^{2/p}`).
pub fn eval_bound_ratio(space: &SpaceParams, f: &dyn Evaluable, normf: f64, z: LogComplex) -> Result<f64> {
    if normf.is_nan() || normf <= 0.0 {
        return Err(Error::Domain("norm must be positive".into()));
    }
    let v = f.eval(z)?;
    if v.is_zero() {
        return Ok(0.0);
    }
    let base = if z.is_zero() { 0.0 } else { log_base(space, z) };
    Ok((v.logmod() + space.two_over_p() * base - weight_phi(space, z) - normf.ln()).exp())
}

/// `Σ_k dist(z,Γ) (1+|γ_k|)^{1/2} / ((1+|z|)^{1/2} |z - γ_k|)` over the
/// unperturbed sequence `Γ` of `spec` (phases kept, `δ` ignored); the
/// two-sided form uses `|γ_k|` and `|z|`.
///
/// Requires `dist(z, Γ) ≥ 0.05 (1+|z|)` (two-sided `0.05 |z|`).
pub fn weight_sum(spec: &SequenceSpec, z: LogComplex) -> Result<f64> {
    Ok(weight_sum_terms(spec, z)?.0)
}

/// The sum together with its term at the `d_log`-nearest index.
pub fn weight_sum_terms(spec: &SequenceSpec, z: LogComplex) -> Result<(f64, f64)> {
    if z.is_zero() {
        return Err(Error::Domain("weight sum is evaluated at nonzero points".into()));
    }
    let gamma = SequenceSpec {
        space: spec.space,
        delta: crate::sequence::TailedSpec::constant(0.0),
        theta: spec.theta.clone(),
    };
    let space = &spec.space;
    let (dist, _) = crate::geometry::dist_to_sequence(&gamma, z)?;
    let log_scale = log_base(space, z);
    if dist.logmod() < (0.05f64).ln() + log_scale {
        return Err(Error::Domain(format!(
            "point is within the node guard: dist(z, Γ) = {:e}",
            dist.abs()
        )));
    }
    let term = |k: i64| -> f64 {
        let g = gamma.node_unchecked(k);
        let d = (z - g).modulus().logmod();
        (dist.logmod() + 0.5 * log_base(space, g) - 0.5 * log_scale - d).exp()
    };
    let alpha = space.alpha;
    let x = 2.0 * alpha * z.logmod() - space.two_over_p();
    let start = if space.is_two_sided() { x.floor() as i64 } else { (x.floor() as i64).max(0) };
    // terms decay at least like e^{-|k - x|/4α} away from |z|
    let q = (-1.0 / (4.0 * alpha)).exp();
    let mut total = 0.0;
    let mut k = start;
    loop {
        let t = term(k);
        total += t;
        let far = gamma.node_unchecked(k).logmod() > z.logmod() + 1.0;
        if far && 2.0 * t / (1.0 - q) < 1e-16 * total {
            break;
        }
        k += 1;
    }
    let lower_end = if space.is_two_sided() { i64::MIN } else { 0 };
    let mut k = start - 1;
    while k >= lower_end {
        let t = term(k);
        total += t;
        let far = gamma.node_unchecked(k).logmod() < z.logmod() - 1.0;
        if space.is_two_sided() && far && 2.0 * t / (1.0 - q) < 1e-16 * total {
            break;
        }
        k -= 1;
    }
    Ok((total, term(crate::geometry::dlog_nearest(&gamma, z)?)))
}
