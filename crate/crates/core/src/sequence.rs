//! Space parameters and finitely described perturbed geometric sequences.
//!
//! A sequence is `λ_k = exp((k + 2/p + δ_k) / 2α) · e^{iθ_k}` where `δ` and `θ`
//! are [`TailedSpec`]s: constants, periodic patterns, or finite tables with
//! constant tails. Every operation in the crate reduces these to a
//! [`Profile`], i.e. a finite set of overrides on top of one periodic pattern
//! per side, which is what makes the window condition exactly decidable.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::logc::LogComplex;

/// Integrability exponent `p ∈ (0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    /// `2/p`, which is `0` for `p = ∞`.
    pub fn two_over_p(self) -> f64 {
        match self {
            Exponent::Finite(p) => 2.0 / p,
            Exponent::Infinite => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Ok(Exponent::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                match v {
                    "inf" => Ok(Exponent::Infinite),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "one")]
    OneSided,
    #[serde(rename = "two")]
    TwoSided,
}

/// `(α, p)` and sidedness; fixes the weight `φ` and the index set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub alpha: f64,
    pub p: Exponent,
    pub side: Side,
}

impl SpaceParams {
    pub fn new(alpha: f64, p: Exponent, side: Side) -> Result<Self> {
        let s = SpaceParams { alpha, p, side };
        s.validate()?;
        Ok(s)
    }

    pub fn one_sided(alpha: f64, p: Exponent) -> Self {
        SpaceParams {
            alpha,
            p,
            side: Side::OneSided,
        }
    }

    pub fn two_sided(alpha: f64, p: Exponent) -> Self {
        SpaceParams {
            alpha,
            p,
            side: Side::TwoSided,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::validation("/alpha", "alpha must be a finite positive number"));
        }
        if let Exponent::Finite(p) = self.p {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::validation("/p", "p must be positive (or \"inf\")"));
            }
        }
        Ok(())
    }

    pub fn two_over_p(&self) -> f64 {
        self.p.two_over_p()
    }

    pub fn is_two_sided(&self) -> bool {
        self.side == Side::TwoSided
    }

    /// Whether `k` belongs to `ℕ₀` (one-sided) or `ℤ` (two-sided).
    pub fn admits(&self, k: i64) -> bool {
        k >= 0 || self.is_two_sided()
    }

    pub(crate) fn check_index(&self, k: i64) -> Result<()> {
        if self.admits(k) {
            Ok(())
        } else {
            Err(Error::IndexDomain {
                index: k,
                reason: "one-sided sequences are indexed by k >= 0",
            })
        }
    }
}

/// A finite description of a real sequence indexed by `ℕ₀` or `ℤ`.
///
/// `Periodic` may carry finitely many `overrides`; canonicalization of
/// one-sided periodic sequences produces them and they are omitted from JSON
/// when empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TailedSpec {
    Constant {
        value: f64,
    },
    Periodic {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty", with = "int_keys")]
        overrides: BTreeMap<i64, f64>,
    },
    Table {
        #[serde(with = "int_keys")]
        entries: BTreeMap<i64, f64>,
        default_right: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default_left: Option<f64>,
    },
}

/// Index maps are JSON objects keyed by decimal integer strings.
mod int_keys {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<i64, f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<i64, f64>, D::Error> {
        let raw = BTreeMap::<String, f64>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.parse::<i64>()
                    .map(|k| (k, v))
                    .map_err(|_| D::Error::custom(format!("index key `{k}` is not a decimal integer")))
            })
            .collect()
    }
}

impl TailedSpec {
    pub fn constant(value: f64) -> Self {
        TailedSpec::Constant { value }
    }

    pub fn periodic(values: Vec<f64>) -> Self {
        TailedSpec::Periodic {
            values,
            overrides: BTreeMap::new(),
        }
    }

    /// Table with the same default on both tails.
    pub fn table<I: IntoIterator<Item = (i64, f64)>>(entries: I, default: f64) -> Self {
        TailedSpec::Table {
            entries: entries.into_iter().collect(),
            default_right: default,
            default_left: None,
        }
    }

    pub fn table_two_sided<I: IntoIterator<Item = (i64, f64)>>(
        entries: I,
        default_left: f64,
        default_right: f64,
    ) -> Self {
        TailedSpec::Table {
            entries: entries.into_iter().collect(),
            default_right,
            default_left: Some(default_left),
        }
    }

    /// Value at index `k`. Total on `ℤ`; one-sided callers only ask for `k >= 0`.
    pub fn at(&self, k: i64) -> f64 {
        match self {
            TailedSpec::Constant { value } => *value,
            TailedSpec::Periodic { values, overrides } => match overrides.get(&k) {
                Some(v) => *v,
                None => values[k.rem_euclid(values.len() as i64) as usize],
            },
            TailedSpec::Table {
                entries,
                default_right,
                default_left,
            } => match entries.get(&k) {
                Some(v) => *v,
                None if k < 0 => default_left.unwrap_or(*default_right),
                None => *default_right,
            },
        }
    }

    pub fn profile(&self) -> Profile {
        match self {
            TailedSpec::Constant { value } => Profile {
                overrides: BTreeMap::new(),
                left: vec![*value],
                right: vec![*value],
            },
            TailedSpec::Periodic { values, overrides } => Profile {
                overrides: overrides.clone(),
                left: values.clone(),
                right: values.clone(),
            },
            TailedSpec::Table {
                entries,
                default_right,
                default_left,
            } => Profile {
                overrides: entries.clone(),
                left: vec![default_left.unwrap_or(*default_right)],
                right: vec![*default_right],
            },
        }
    }

    pub(crate) fn validate(&self, side: Side, pointer: &str) -> Result<()> {
        let finite = |v: f64, what: &str| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::validation(format!("{pointer}/{what}"), "value must be finite"))
            }
        };
        let keys_ok = |m: &BTreeMap<i64, f64>, what: &str| -> Result<()> {
            for (k, v) in m {
                if side == Side::OneSided && *k < 0 {
                    return Err(Error::validation(
                        format!("{pointer}/{what}/{k}"),
                        "negative index in a one-sided spec",
                    ));
                }
                finite(*v, &format!("{what}/{k}"))?;
            }
            Ok(())
        };
        match self {
            TailedSpec::Constant { value } => finite(*value, "value"),
            TailedSpec::Periodic { values, overrides } => {
                if values.is_empty() {
                    return Err(Error::validation(
                        format!("{pointer}/values"),
                        "periodic pattern must be nonempty",
                    ));
                }
                for (i, v) in values.iter().enumerate() {
                    finite(*v, &format!("values/{i}"))?;
                }
                keys_ok(overrides, "overrides")
            }
            TailedSpec::Table {
                entries,
                default_right,
                default_left,
            } => {
                keys_ok(entries, "entries")?;
                finite(*default_right, "default_right")?;
                match (side, default_left) {
                    (Side::TwoSided, None) => Err(Error::validation(
                        format!("{pointer}/default_left"),
                        "missing field `default_left` (required for side \"two\")",
                    )),
                    (Side::OneSided, Some(_)) => Err(Error::validation(
                        format!("{pointer}/default_left"),
                        "`default_left` is only allowed for side \"two\"",
                    )),
                    (_, Some(v)) => finite(*v, "default_left"),
                    _ => Ok(()),
                }
            }
        }
    }

    /// Re-index: the returned spec takes the value `self.at(k + m) + add` at `k`.
    pub(crate) fn shifted(&self, m: i64, add: f64, side: Side) -> TailedSpec {
        match self {
            TailedSpec::Constant { value } => TailedSpec::Constant { value: value + add },
            TailedSpec::Periodic { values, overrides } => {
                let n = values.len() as i64;
                let values = (0..n)
                    .map(|i| values[(i + m).rem_euclid(n) as usize] + add)
                    .collect();
                let overrides = overrides.iter().map(|(k, v)| (k - m, v + add)).collect();
                TailedSpec::Periodic { values, overrides }
            }
            TailedSpec::Table {
                entries,
                default_right,
                default_left,
            } => {
                let mut out: BTreeMap<i64, f64> =
                    entries.iter().map(|(k, v)| (k - m, v + add)).collect();
                if side == Side::TwoSided {
                    // indices whose side of 0 changes must be spelled out
                    let (lo, hi) = if m > 0 { (-m, -1) } else { (0, -m - 1) };
                    for k in lo..=hi {
                        out.entry(k).or_insert_with(|| self.at(k + m) + add);
                    }
                }
                TailedSpec::Table {
                    entries: out,
                    default_right: default_right + add,
                    default_left: default_left.map(|v| v + add),
                }
            }
        }
    }
}

/// Finite overrides on top of a periodic pattern per side.
///
/// Pattern entries are anchored at index 0: `right[k mod len]` for `k >= 0`
/// and `left[k mod len]` for `k < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub overrides: BTreeMap<i64, f64>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl Profile {
    pub fn at(&self, k: i64) -> f64 {
        if let Some(v) = self.overrides.get(&k) {
            return *v;
        }
        let pat = if k < 0 { &self.left } else { &self.right };
        pat[k.rem_euclid(pat.len() as i64) as usize]
    }

    /// Smallest interval `[lo, hi]` containing 0 and every override.
    pub fn core(&self) -> (i64, i64) {
        let lo = self.overrides.keys().next().copied().unwrap_or(0).min(0);
        let hi = self.overrides.keys().next_back().copied().unwrap_or(0).max(0);
        (lo, hi)
    }

    pub fn right_mean(&self) -> f64 {
        mean(&self.right)
    }

    pub fn left_mean(&self) -> f64 {
        mean(&self.left)
    }

    pub fn sup_abs(&self, side: Side) -> f64 {
        let mut s = self
            .overrides
            .iter()
            .filter(|(k, _)| side == Side::TwoSided || **k >= 0)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max);
        s = self.right.iter().map(|v| v.abs()).fold(s, f64::max);
        if side == Side::TwoSided {
            s = self.left.iter().map(|v| v.abs()).fold(s, f64::max);
        }
        s
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

const MAX_JOINT_PERIOD: usize = 1 << 16;

/// Rebuild a [`TailedSpec`] from a sequence known to follow `period`-periodic
/// tails outside `core`.
pub(crate) fn describe(
    f: impl Fn(i64) -> f64,
    side: Side,
    core: (i64, i64),
    period: usize,
) -> Result<TailedSpec> {
    let p = period as i64;
    let right_start = (core.1 + 1).div_euclid(p) * p + if (core.1 + 1).rem_euclid(p) == 0 { 0 } else { p };
    let right: Vec<f64> = (0..p).map(|i| f(right_start + i)).collect();
    let left: Option<Vec<f64>> = (side == Side::TwoSided).then(|| {
        let start = (core.0 - p).div_euclid(p) * p;
        (0..p).map(|i| f(start + i)).collect()
    });
    let right = reduce_period(right);
    let left = left.map(reduce_period);
    let scan_lo = if side == Side::TwoSided { core.0 - p } else { 0 };
    let scan_hi = core.1 + p;

    let right_const = right.len() == 1;
    let left_const = left.as_ref().is_none_or(|l| l.len() == 1);
    if right_const && left_const {
        let dr = right[0];
        let dl = left.as_ref().map(|l| l[0]);
        let tail = |k: i64| if k < 0 { dl.unwrap_or(dr) } else { dr };
        let entries: BTreeMap<i64, f64> = (scan_lo..=scan_hi)
            .filter_map(|k| {
                let v = f(k);
                (v != tail(k)).then_some((k, v))
            })
            .collect();
        if entries.is_empty() && dl.is_none_or(|l| l == dr) {
            return Ok(TailedSpec::Constant { value: dr });
        }
        return Ok(TailedSpec::Table {
            entries,
            default_right: dr,
            default_left: dl,
        });
    }
    if let Some(l) = &left {
        if *l != right {
            return Err(Error::Domain(
                "sequence has different periodic patterns on its two tails".into(),
            ));
        }
    }
    let n = right.len() as i64;
    let overrides = (scan_lo..=scan_hi)
        .filter_map(|k| {
            let v = f(k);
            (v != right[k.rem_euclid(n) as usize]).then_some((k, v))
        })
        .collect();
    Ok(TailedSpec::Periodic {
        values: right,
        overrides,
    })
}

fn reduce_period(v: Vec<f64>) -> Vec<f64> {
    let n = v.len();
    for d in 1..n {
        if n.is_multiple_of(d) && (0..n).all(|i| v[i] == v[i % d]) {
            return v[..d].to_vec();
        }
    }
    v
}

/// `δ`, `θ` and the space: a complete description of `Λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    #[serde(flatten)]
    pub space: SpaceParams,
    pub delta: TailedSpec,
    pub theta: TailedSpec,
}

impl SequenceSpec {
    pub fn new(space: SpaceParams, delta: TailedSpec, theta: TailedSpec) -> Result<Self> {
        let s = SequenceSpec {
            space,
            delta,
            theta,
        };
        s.validate()?;
        Ok(s)
    }

    /// The unperturbed sequence `Γ` (`δ ≡ 0`, `θ ≡ 0`).
    pub fn base(space: SpaceParams) -> Self {
        SequenceSpec {
            space,
            delta: TailedSpec::constant(0.0),
            theta: TailedSpec::constant(0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.space.validate()?;
        self.delta.validate(self.space.side, "/delta")?;
        self.theta.validate(self.space.side, "/theta")
    }

    /// Parse and validate a spec from JSON. Missing top-level fields are
    /// reported with their JSON pointer.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::validation("", format!("malformed JSON: {e}")))?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::validation("", "spec must be a JSON object"))?;
        for field in ["alpha", "p", "side", "delta", "theta"] {
            if !obj.contains_key(field) {
                return Err(Error::validation(
                    format!("/{field}"),
                    format!("missing field `{field}`"),
                ));
            }
        }
        let spec: SequenceSpec = serde_json::from_value(value.clone())
            .map_err(|e| Error::validation("", e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serialization is infallible")
    }

    pub fn side(&self) -> Side {
        self.space.side
    }

    pub fn delta_at(&self, k: i64) -> f64 {
        self.delta.at(k)
    }

    /// `λ_k` in log-polar form.
    pub fn node(&self, k: i64) -> Result<LogComplex> {
        self.space.check_index(k)?;
        Ok(self.node_unchecked(k))
    }

    pub(crate) fn node_unchecked(&self, k: i64) -> LogComplex {
        let logmod = (k as f64 + self.space.two_over_p() + self.delta.at(k)) / (2.0 * self.space.alpha);
        LogComplex::new(logmod, self.theta.at(k))
    }

    /// `sup_k |δ_k|` over the admissible index set.
    pub fn sup_delta(&self) -> f64 {
        self.delta.profile().sup_abs(self.space.side)
    }

    /// Period shared by the tails of `δ` and `θ`.
    pub(crate) fn joint_period(&self) -> Result<usize> {
        let d = self.delta.profile();
        let t = self.theta.profile();
        let mut p = lcm(d.right.len(), t.right.len());
        if self.space.is_two_sided() {
            p = lcm(p, lcm(d.left.len(), t.left.len()));
        }
        if p > MAX_JOINT_PERIOD {
            return Err(Error::Domain(format!("joint period {p} is too large")));
        }
        Ok(p)
    }

    /// Interval containing 0 and every override of `δ` and `θ`.
    pub(crate) fn core(&self) -> (i64, i64) {
        let (a, b) = self.delta.profile().core();
        let (c, d) = self.theta.profile().core();
        (a.min(c), b.max(d))
    }

    /// Whether `k + δ_k` is nondecreasing on the whole index set.
    pub fn is_monotone(&self) -> Result<bool> {
        let p = self.joint_period()? as i64;
        let (lo, hi) = self.core();
        let start = if self.space.is_two_sided() { lo - p - 1 } else { 0 };
        Ok((start..=hi + p).all(|k| self.delta.at(k + 1) + 1.0 >= self.delta.at(k)))
    }

    /// Re-enumerate by nondecreasing modulus, recomputing `δ` and carrying
    /// `θ` along with each node. Specs that are already ordered are returned
    /// unchanged.
    ///
    /// The new index of node `k` is its rank: `k` plus the number of later
    /// nodes of smaller modulus minus the number of earlier nodes of larger
    /// modulus. Ties keep the original order.
    pub fn canonicalize(&self) -> Result<SequenceSpec> {
        self.validate()?;
        if self.is_monotone()? {
            return Ok(self.clone());
        }
        let side = self.space.side;
        let two = side == Side::TwoSided;
        let p = self.joint_period()? as i64;
        let (lo, hi) = self.core();
        let radius = (2.0 * self.sup_delta()).floor() as i64 + 1;
        let new_core = (if two { lo - 3 * radius } else { 0 }, hi + 3 * radius);
        // new indices needed by `describe`, plus slack for the inverse map
        let need_lo = if two { new_core.0 - 2 * p - 1 } else { 0 };
        let need_hi = new_core.1 + 2 * p + 1;
        let k_lo = if two { need_lo - 2 * radius } else { 0 };
        let k_hi = need_hi + 2 * radius;

        let x = |k: i64, j: i64| self.delta.at(k) + (k - j) as f64;
        let rank = |k: i64| -> i64 {
            let mut r = k;
            for k2 in k + 1..=k + radius {
                if x(k2, k) < self.delta.at(k) {
                    r += 1;
                }
            }
            let from = if two { k - radius } else { (k - radius).max(0) };
            for k2 in from..k {
                if x(k2, k) > self.delta.at(k) {
                    r -= 1;
                }
            }
            r
        };
        let mut delta_new = BTreeMap::new();
        let mut theta_new = BTreeMap::new();
        for k in k_lo..=k_hi {
            let j = rank(k);
            // δ'_j = (k + δ_k) - j, with the integer part kept exact
            delta_new.insert(j, self.delta.at(k) + (k - j) as f64);
            theta_new.insert(j, self.theta.at(k));
        }
        let lookup = |m: &BTreeMap<i64, f64>, j: i64| -> f64 {
            *m.get(&j).expect("canonicalization window covers every needed index")
        };
        let delta = describe(|j| lookup(&delta_new, j), side, new_core, p as usize)?;
        let theta = describe(|j| lookup(&theta_new, j), side, new_core, p as usize)?;
        let out = SequenceSpec {
            space: self.space,
            delta,
            theta,
        };
        debug_assert!(out.is_monotone().unwrap_or(false));
        Ok(out)
    }

    /// Re-number a two-sided sequence: `λ'_k = λ_{k+m}`, so `δ'_k = δ_{k+m} + m`.
    pub fn shift_enumeration(&self, m: i64) -> Result<SequenceSpec> {
        if !self.space.is_two_sided() {
            return Err(Error::UnsupportedSide {
                op: "shift_enumeration",
            });
        }
        if m == 0 {
            return Ok(self.clone());
        }
        Ok(SequenceSpec {
            space: self.space,
            delta: self.delta.shifted(m, m as f64, Side::TwoSided),
            theta: self.theta.shifted(m, 0.0, Side::TwoSided),
        })
    }

    /// Express the same point set with exponent `p_new`:
    /// `δ'_k = δ_k + 2/p_old - 2/p_new`.
    pub fn reindex_for_exponent(&self, p_new: Exponent) -> Result<SequenceSpec> {
        let space = SpaceParams {
            p: p_new,
            ..self.space
        };
        space.validate()?;
        let add = self.space.two_over_p() - p_new.two_over_p();
        Ok(SequenceSpec {
            space,
            delta: self.delta.shifted(0, add, self.space.side),
            theta: self.theta.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(alpha: f64, p: Exponent, side: Side, delta: TailedSpec, theta: TailedSpec) -> SequenceSpec {
        SequenceSpec::new(SpaceParams { alpha, p, side }, delta, theta).unwrap()
    }

    #[test]
    fn node_examples() {
        let s = SequenceSpec::base(SpaceParams::one_sided(1.0, Exponent::Finite(2.0)));
        let l0 = s.node(0).unwrap();
        assert_eq!(l0.logmod(), 0.5);
        assert!((l0.abs() - 1.64872).abs() < 1e-5);

        let s = SequenceSpec::base(SpaceParams::one_sided(1.0, Exponent::Infinite));
        assert_eq!(s.node(0).unwrap().logmod(), 0.0);

        let s = spec(
            0.5,
            Exponent::Finite(1.0),
            Side::OneSided,
            TailedSpec::constant(0.25),
            TailedSpec::constant(PI),
        );
        let l3 = s.node(3).unwrap();
        assert_eq!(l3.logmod(), 5.25);
        assert_eq!(l3.phase(), PI);
    }

    #[test]
    fn negative_index_rejected_for_one_sided() {
        let s = SequenceSpec::base(SpaceParams::one_sided(1.0, Exponent::Infinite));
        assert!(matches!(s.node(-1), Err(Error::IndexDomain { index: -1, .. })));
        let s = SequenceSpec::base(SpaceParams::two_sided(1.0, Exponent::Infinite));
        assert!(s.node(-1).is_ok());
    }

    #[test]
    fn tailed_spec_evaluation() {
        let p = TailedSpec::periodic(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.at(-1), 3.0);
        assert_eq!(p.at(4), 2.0);
        let t = TailedSpec::table_two_sided([(2, 9.0)], -1.0, 1.0);
        assert_eq!(t.at(2), 9.0);
        assert_eq!(t.at(-5), -1.0);
        assert_eq!(t.at(5), 1.0);
    }

    #[test]
    fn sup_delta_examples() {
        let sp = SpaceParams::one_sided(1.0, Exponent::Infinite);
        let s = SequenceSpec::new(sp, TailedSpec::periodic(vec![0.4, -0.4]), TailedSpec::constant(0.0)).unwrap();
        assert_eq!(s.sup_delta(), 0.4);
        let s = SequenceSpec::new(sp, TailedSpec::table([(5, 2.0)], 0.0), TailedSpec::constant(0.0)).unwrap();
        assert_eq!(s.sup_delta(), 2.0);
    }

    #[test]
    fn validation_errors() {
        let sp = SpaceParams::two_sided(1.0, Exponent::Infinite);
        let err = SequenceSpec::new(sp, TailedSpec::table([(0, 1.0)], 0.0), TailedSpec::constant(0.0)).unwrap_err();
        assert!(matches!(err, Error::Validation { ref pointer, .. } if pointer == "/delta/default_left"));
        let err = SequenceSpec::new(sp, TailedSpec::periodic(vec![]), TailedSpec::constant(0.0)).unwrap_err();
        assert!(matches!(err, Error::Validation { ref pointer, .. } if pointer == "/delta/values"));
        assert!(SpaceParams::new(-1.0, Exponent::Infinite, Side::OneSided).is_err());
        assert!(SpaceParams::new(1.0, Exponent::Finite(0.0), Side::OneSided).is_err());
    }

    #[test]
    fn missing_field_has_pointer() {
        let err = SequenceSpec::from_json(r#"{"p": 2, "side": "one", "delta": {"kind":"constant","value":0}, "theta": {"kind":"constant","value":0}}"#).unwrap_err();
        match err {
            Error::Validation { pointer, .. } => assert_eq!(pointer, "/alpha"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn json_schema_shape() {
        let s = spec(
            1.0,
            Exponent::Infinite,
            Side::TwoSided,
            TailedSpec::table_two_sided([(-3, 0.5), (7, -0.25)], 0.1, 0.2),
            TailedSpec::periodic(vec![0.0, PI]),
        );
        let json = s.to_json();
        assert_eq!(
            json,
            r#"{"alpha":1.0,"p":"inf","side":"two","delta":{"kind":"table","entries":{"-3":0.5,"7":-0.25},"default_right":0.2,"default_left":0.1},"theta":{"kind":"periodic","values":[0.0,3.141592653589793]}}"#
        );
        let back = SequenceSpec::from_json(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn shift_examples() {
        let sp = SpaceParams::two_sided(1.0, Exponent::Finite(2.0));
        let s = SequenceSpec::new(sp, TailedSpec::constant(0.8), TailedSpec::constant(0.0)).unwrap();
        let t = s.shift_enumeration(-1).unwrap();
        match t.delta {
            TailedSpec::Constant { value } => assert!((value + 0.2).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert_eq!(s.shift_enumeration(0).unwrap(), s);

        let s = SequenceSpec::new(sp, TailedSpec::periodic(vec![0.2, -0.1, 0.3]), TailedSpec::constant(0.0)).unwrap();
        let t = s.shift_enumeration(3).unwrap();
        assert_eq!(t.delta, TailedSpec::periodic(vec![3.2, 2.9, 3.3]));

        let one = SequenceSpec::base(SpaceParams::one_sided(1.0, Exponent::Infinite));
        assert!(matches!(one.shift_enumeration(1), Err(Error::UnsupportedSide { .. })));
    }

    #[test]
    fn shift_of_two_sided_table_keeps_point_set() {
        let sp = SpaceParams::two_sided(0.7, Exponent::Finite(3.0));
        let s = SequenceSpec::new(
            sp,
            TailedSpec::table_two_sided([(-1, 0.3), (2, -0.2)], 0.1, -0.4),
            TailedSpec::table_two_sided([(0, 1.0)], 2.0, -2.0),
        )
        .unwrap();
        for m in [-4, -1, 2, 5] {
            let t = s.shift_enumeration(m).unwrap();
            for k in -15..15 {
                let a = t.node(k).unwrap();
                let b = s.node(k + m).unwrap();
                assert!((a.logmod() - b.logmod()).abs() <= 4.0 * f64::EPSILON * b.logmod().abs().max(1.0));
                assert_eq!(a.phase(), b.phase());
            }
        }
    }

    #[test]
    fn reindex_examples() {
        let sp = SpaceParams::one_sided(1.0, Exponent::Finite(2.0));
        let s = SequenceSpec::new(sp, TailedSpec::constant(0.1), TailedSpec::constant(0.0)).unwrap();
        let at = |p: Exponent| s.reindex_for_exponent(p).unwrap().delta.at(0);
        assert!((at(Exponent::Infinite) - 1.1).abs() < 1e-15);
        assert!((at(Exponent::Finite(1.0)) + 0.9).abs() < 1e-15);
        assert!((at(Exponent::Finite(4.0)) - 0.6).abs() < 1e-15);
        let r = s.reindex_for_exponent(Exponent::Finite(4.0)).unwrap();
        for k in 0..10 {
            assert!((r.node(k).unwrap().logmod() - s.node(k).unwrap().logmod()).abs() < 1e-14);
        }
    }

    #[test]
    fn canonicalize_one_sided_table() {
        let sp = SpaceParams::one_sided(1.0, Exponent::Infinite);
        let s = SequenceSpec::new(sp, TailedSpec::table([(0, 5.0)], 0.0), TailedSpec::constant(0.0)).unwrap();
        assert!(!s.is_monotone().unwrap());
        let c = s.canonicalize().unwrap();
        assert!(c.is_monotone().unwrap());
        assert_eq!(
            c.delta,
            TailedSpec::table([(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0), (4, 1.0)], 0.0)
        );
    }

    #[test]
    fn canonicalize_two_sided_periodic() {
        let sp = SpaceParams::two_sided(1.0, Exponent::Infinite);
        let s = SequenceSpec::new(sp, TailedSpec::periodic(vec![2.0, -2.0]), TailedSpec::periodic(vec![0.0, 1.0])).unwrap();
        let c = s.canonicalize().unwrap();
        assert!(c.is_monotone().unwrap());
        // the positions k + δ_k are exactly the integers
        assert_eq!(c.delta, TailedSpec::constant(0.0));
        // node with position 0 came from k = -2 (even, phase 0); position 1 from k = 3 (odd)
        assert_eq!(c.theta.at(0), 0.0);
        assert_eq!(c.theta.at(1), 1.0);
    }

    #[test]
    fn canonicalize_one_sided_periodic_needs_overrides() {
        let sp = SpaceParams::one_sided(1.0, Exponent::Infinite);
        let s = SequenceSpec::new(sp, TailedSpec::periodic(vec![2.0, -2.0]), TailedSpec::constant(0.0)).unwrap();
        let c = s.canonicalize().unwrap();
        assert!(c.is_monotone().unwrap());
        // positions {2, -1, 4, 1, 6, 3, ...} sorted: -1, 1, 2, 3, 4, ...
        let pos: Vec<f64> = (0..8).map(|j| j as f64 + c.delta.at(j)).collect();
        assert_eq!(pos, vec![-1.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
    }

    #[test]
    fn monotone_specs_are_untouched() {
        let sp = SpaceParams::two_sided(1.0, Exponent::Finite(2.0));
        let s = SequenceSpec::new(sp, TailedSpec::periodic(vec![0.3, -0.3]), TailedSpec::constant(1.0)).unwrap();
        assert_eq!(s.canonicalize().unwrap(), s);
    }
}
