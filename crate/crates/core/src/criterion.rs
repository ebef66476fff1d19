//! Exact decision of complete interpolation for finitely described sequences.
//!
//! A sequence is complete interpolating iff it is separated, `δ` is bounded,
//! and (after an integer re-numbering in the two-sided case) every long
//! enough window average of `δ` stays below `1/2 - ε`. For a [`TailedSpec`]
//! the window averages converge to the tail means, so the third condition
//! reduces to a strict inequality on those means plus a finite search for
//! the window length.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::separation_constant;
use crate::sequence::{Profile, SequenceSpec, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Yes,
    No,
    /// Reserved for sequences that are not finitely described; never produced.
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Failure {
    Separation,
    Boundedness,
    Window,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    pub sep_const: f64,
    pub sup_delta: f64,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub window_n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_m: Option<i64>,
    pub failures: Vec<Failure>,
}

/// Outcome of the window condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowCondition {
    pub holds: bool,
    pub n: Option<u64>,
    pub eps: Option<f64>,
    pub m: Option<i64>,
}

/// `(true, sup_k |δ_k|)`; finite descriptions are always bounded.
pub fn check_bounded(spec: &SequenceSpec) -> (bool, f64) {
    (true, spec.sup_delta())
}

/// `Σ_{k=0}^{n-1} δ_k` for `n ≥ 0`, `-Σ_{k=n}^{-1} δ_k` for `n < 0`.
struct PrefixSums {
    profile: Profile,
    right_prefix: Vec<f64>,
    left_suffix: Vec<f64>,
}

impl PrefixSums {
    fn new(profile: Profile) -> Self {
        let mut right_prefix = vec![0.0];
        for v in &profile.right {
            right_prefix.push(right_prefix.last().unwrap() + v);
        }
        // left_suffix[r] = Σ_{i=1}^{r} left[len - i]
        let mut left_suffix = vec![0.0];
        for v in profile.left.iter().rev() {
            left_suffix.push(left_suffix.last().unwrap() + v);
        }
        PrefixSums {
            profile,
            right_prefix,
            left_suffix,
        }
    }

    fn at(&self, n: i64) -> f64 {
        let pattern = |k: i64| {
            let pat = if k < 0 { &self.profile.left } else { &self.profile.right };
            pat[k.rem_euclid(pat.len() as i64) as usize]
        };
        if n >= 0 {
            let len = self.profile.right.len() as i64;
            let base = (n / len) as f64 * self.right_prefix[len as usize]
                + self.right_prefix[(n % len) as usize];
            let corr: f64 = self
                .profile
                .overrides
                .range(0..n)
                .map(|(k, v)| v - pattern(*k))
                .sum();
            base + corr
        } else {
            let m = -n;
            let len = self.profile.left.len() as i64;
            let base = (m / len) as f64 * self.left_suffix[len as usize]
                + self.left_suffix[(m % len) as usize];
            let corr: f64 = self
                .profile
                .overrides
                .range(n..0)
                .map(|(k, v)| v - pattern(*k))
                .sum();
            -(base + corr)
        }
    }
}

/// Exact `sup_n |(1/N) Σ_{k=n}^{n+N-1} δ_k|` over admissible starts `n`.
///
/// Windows inside a tail repeat with the tail period, so only starts up to
/// one period beyond the overrides (on each side) need to be visited.
pub fn window_sup(spec: &SequenceSpec, n_len: u64) -> f64 {
    assert!(n_len >= 1, "window length must be positive");
    let profile = spec.delta.profile();
    let (lo, hi) = profile.core();
    let n = n_len as i64;
    let start_lo = match spec.side() {
        Side::TwoSided => lo - n - profile.left.len() as i64 + 1,
        Side::OneSided => 0,
    };
    let start_hi = hi + profile.right.len() as i64;
    let sums = PrefixSums::new(profile);
    let mut best = 0.0f64;
    let mut prev = sums.at(start_lo);
    for start in start_lo..=start_hi {
        let next = sums.at(start + n);
        let avg = ((next - prev) / n_len as f64).abs();
        best = best.max(avg);
        prev = sums.at(start + 1);
    }
    best
}

/// Window lengths are searched one by one up to this bound, then by doubling
/// up to the a-priori length that is guaranteed to work.
const LINEAR_SEARCH: u64 = 2048;
const MAX_WINDOW: u64 = 50_000_000;

/// Tail means `(μ₋, μ₊)`; `μ₋` is `None` for one-sided sequences.
pub fn tail_means(spec: &SequenceSpec) -> (Option<f64>, f64) {
    let p = spec.delta.profile();
    let left = (spec.side() == Side::TwoSided).then(|| p.left_mean());
    (left, p.right_mean())
}

/// Decide the window condition, returning the witnesses `N`, `ε` and the
/// enumeration shift `m` (two-sided) when it holds.
///
/// `ε = (1/2 - max |shifted tail mean|)/2`, and `N` is the smallest window
/// length with `window_sup ≤ 1/2 - ε` for the shifted sequence (searched
/// exhaustively up to 2048, by doubling past that).
pub fn check_condition_iii(spec: &SequenceSpec) -> Result<WindowCondition> {
    let (left, right) = tail_means(spec);
    let (worst, m) = match left {
        None => (right.abs(), None),
        Some(left) => {
            let reach = left.abs().ceil() as i64 + right.abs().ceil() as i64 + 1;
            let valid: Vec<i64> = (-reach..=reach)
                .filter(|m| {
                    let m = *m as f64;
                    (left + m).abs().max((right + m).abs()) < 0.5
                })
                .collect();
            debug_assert!(valid.len() <= 1, "the enumeration shift is unique");
            match valid.first() {
                Some(&m) => ((left + m as f64).abs().max((right + m as f64).abs()), Some(m)),
                None => {
                    return Ok(WindowCondition {
                        holds: false,
                        n: None,
                        eps: None,
                        m: None,
                    })
                }
            }
        }
    };
    if worst >= 0.5 {
        return Ok(WindowCondition {
            holds: false,
            n: None,
            eps: None,
            m: None,
        });
    }
    let eps = (0.5 - worst) / 2.0;
    let shifted = match m {
        Some(m) => spec.shift_enumeration(m)?,
        None => spec.clone(),
    };
    let n = smallest_window(&shifted, 0.5 - eps, eps)?;
    Ok(WindowCondition {
        holds: true,
        n: Some(n),
        eps: Some(eps),
        m,
    })
}

fn smallest_window(spec: &SequenceSpec, bound: f64, eps: f64) -> Result<u64> {
    // Residuals around the tail means sum to at most `c` over any window.
    let profile = spec.delta.profile();
    let (lo, hi) = profile.core();
    let s = spec.sup_delta();
    let span = (hi - lo + 1) as f64 + (profile.left.len() + profile.right.len()) as f64;
    let guaranteed = ((span * 2.0 * s / eps).ceil() as u64).max(1);
    let linear_end = guaranteed.min(LINEAR_SEARCH);
    for n in 1..=linear_end {
        if window_sup(spec, n) <= bound {
            return Ok(n);
        }
    }
    if guaranteed > MAX_WINDOW {
        return Err(Error::NonConvergence {
            what: "window length search",
            iterations: MAX_WINDOW as usize,
        });
    }
    let mut n = linear_end;
    while n < guaranteed {
        n = (2 * n).min(guaranteed);
        if window_sup(spec, n) <= bound {
            return Ok(n);
        }
    }
    Ok(guaranteed)
}

/// Full decision with witnesses. The input is canonicalized first.
pub fn decide_cis(spec: &SequenceSpec) -> Result<Verdict> {
    let spec = spec.canonicalize()?;
    let sep_const = separation_constant(&spec)?;
    let (bounded, sup_delta) = check_bounded(&spec);
    let iii = check_condition_iii(&spec)?;
    let mut failures = Vec::new();
    if sep_const == 0.0 {
        failures.push(Failure::Separation);
    }
    if !bounded {
        failures.push(Failure::Boundedness);
    }
    if !iii.holds {
        failures.push(Failure::Window);
    }
    let decision = if failures.is_empty() {
        Decision::Yes
    } else {
        Decision::No
    };
    Ok(Verdict {
        decision,
        sep_const,
        sup_delta,
        window_n: iii.n,
        epsilon: iii.eps,
        shift_m: iii.m,
        failures,
    })
}
