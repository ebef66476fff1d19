//! The `d_log` geometry of `ℂ \ {0}` and distances from points to sequences.

use crate::error::{Error, Result};
use crate::logc::LogComplex;
use crate::sequence::{SequenceSpec, Side};

/// `|log|z| - log|w|| + |z/|z| - w/|w||`.
pub fn dlog(z: LogComplex, w: LogComplex) -> Result<f64> {
    if z.is_zero() || w.is_zero() {
        return Err(Error::Domain("d_log is defined on the punctured plane".into()));
    }
    Ok(dlog_raw(z, w))
}

fn dlog_raw(z: LogComplex, w: LogComplex) -> f64 {
    (z.logmod() - w.logmod()).abs() + 2.0 * (0.5 * (z.phase() - w.phase())).sin().abs()
}

/// Euclidean distance `|z - w|`.
pub fn euclid(z: LogComplex, w: LogComplex) -> f64 {
    (z - w).abs()
}

/// `d_log` when both points are outside the unit disc, Euclidean when both
/// are inside it, and the larger of the two otherwise.
pub fn dlog_plus(z: LogComplex, w: LogComplex) -> f64 {
    if z.is_zero() || w.is_zero() {
        return euclid(z, w);
    }
    let outside = (z.logmod() >= 0.0, w.logmod() >= 0.0);
    match outside {
        (true, true) => dlog_raw(z, w),
        (false, false) => euclid(z, w),
        _ => dlog_raw(z, w).max(euclid(z, w)),
    }
}

/// The separation metric of the space: `d_log₊` one-sided, `d_log` two-sided.
pub fn side_metric(side: Side, z: LogComplex, w: LogComplex) -> f64 {
    match side {
        Side::OneSided => dlog_plus(z, w),
        Side::TwoSided => dlog_raw(z, w),
    }
}

/// Position of `z` on the index axis: the real `x` with `|z| = e^{(x + 2/p)/2α}`.
fn index_position(spec: &SequenceSpec, z: LogComplex) -> f64 {
    2.0 * spec.space.alpha * z.logmod() - spec.space.two_over_p()
}

/// Euclidean distance from `z` to `Λ` (log-modulus form) and an index
/// attaining it; ties go to the smaller index.
///
/// The search starts from the nodes whose modulus is comparable to `|z|`
/// and is then widened to every node whose modulus lies within the best
/// distance found of `|z|`. For two-sided sequences the infimum may be
/// approached only as `k → -∞` (e.g. `z = -1` against a positive real
/// sequence); the search then stops once `|λ_k| ≤ 2^{-60}|z|` and reports
/// that index.
pub fn dist_to_sequence(spec: &SequenceSpec, z: LogComplex) -> Result<(LogComplex, i64)> {
    if z.is_zero() {
        return Err(Error::Domain("distance is evaluated at nonzero points".into()));
    }
    let alpha = spec.space.alpha;
    let tp = spec.space.two_over_p();
    let s = spec.sup_delta();
    let two = spec.space.is_two_sided();
    let x = index_position(spec, z);
    let floor_k = |k: f64| -> i64 {
        let k = k.floor().max(-1e15) as i64;
        if two {
            k
        } else {
            k.max(0)
        }
    };
    let radius = 2.0 * alpha * (s + 1.0) + 1.0;
    let mut lo = floor_k(x - radius);
    let mut hi = floor_k(x + radius) + 1;

    let mut best: Option<(LogComplex, i64)> = None;
    let consider = |k: i64, best: &mut Option<(LogComplex, i64)>| {
        let d = (z - spec.node_unchecked(k)).modulus();
        match best {
            Some((b, bk)) if d.logmod() > b.logmod() || (d.logmod() == b.logmod() && k > *bk) => {}
            _ => *best = Some((d, k)),
        }
    };
    for k in lo..=hi {
        consider(k, &mut best);
    }
    // widen to every node with ||λ_k| - |z|| < d*
    loop {
        let (d, _) = best.expect("window is nonempty");
        let dz = d.logmod() - z.logmod(); // ln(d*/|z|)
        let up = z.logmod() + crate::logc::ln_1p_exp(dz);
        let new_hi = floor_k(2.0 * alpha * up - tp + s) + 1;
        let new_lo = if dz < 0.0 {
            let down = z.logmod() + (-dz.exp()).ln_1p();
            floor_k(2.0 * alpha * down - tp - s)
        } else if two {
            // nodes approach 0 and their distance to z approaches |z|
            floor_k(x - 2.0 * alpha * 60.0 * std::f64::consts::LN_2 - 2.0 * s - 1.0)
        } else {
            0
        };
        let mut changed = false;
        for k in (new_lo..lo).rev() {
            consider(k, &mut best);
            changed = true;
        }
        for k in hi + 1..=new_hi {
            consider(k, &mut best);
            changed = true;
        }
        lo = lo.min(new_lo);
        hi = hi.max(new_hi);
        if !changed {
            break;
        }
    }
    Ok(best.expect("window is nonempty"))
}

/// Index of the `d_log`-nearest node (smaller index on ties).
pub fn dlog_nearest(spec: &SequenceSpec, z: LogComplex) -> Result<i64> {
    if z.is_zero() {
        return Err(Error::Domain("d_log is defined on the punctured plane".into()));
    }
    let alpha = spec.space.alpha;
    let s = spec.sup_delta();
    let two = spec.space.is_two_sided();
    let x = index_position(spec, z);
    let clamp = |k: i64| if two { k } else { k.max(0) };
    let k0 = clamp(x.round() as i64);
    let d0 = dlog_raw(z, spec.node_unchecked(k0));
    // any better node has |log|λ_k| - log|z|| ≤ d0
    let reach = 2.0 * alpha * d0 + s + 1.0;
    let lo = clamp((x - reach).floor() as i64);
    let hi = clamp((x + reach).ceil() as i64);
    let mut best = (d0, k0);
    for k in lo..=hi {
        let d = dlog_raw(z, spec.node_unchecked(k));
        if d < best.0 || (d == best.0 && k < best.1) {
            best = (d, k);
        }
    }
    Ok(best.1)
}

/// Exact infimum of the separation metric over distinct pairs of nodes.
///
/// Pairs further apart than `D = ⌈2αU + 2 sup|δ|⌉ + 1` in index, where `U` is
/// the distance of one adjacent pair, cannot beat `U`. Past the finitely
/// many overrides of `δ` and `θ` the pair distances repeat with the joint
/// period, so finitely many pairs decide the infimum.
pub fn separation_constant(spec: &SequenceSpec) -> Result<f64> {
    let side = spec.side();
    let alpha = spec.space.alpha;
    let s = spec.sup_delta();
    let p = spec.joint_period()? as i64;
    let (lo, hi) = spec.core();
    let dist = |j: i64, k: i64| side_metric(side, spec.node_unchecked(j), spec.node_unchecked(k));
    let upper = dist(0, 1);
    if upper == 0.0 {
        return Ok(0.0);
    }
    let d_max = (2.0 * alpha * upper + 2.0 * s).ceil() as i64 + 1;
    let (j_lo, j_hi) = match side {
        Side::TwoSided => (lo - d_max - p, hi + p),
        // nodes inside the unit disc have k < 2 sup|δ|; include them all
        Side::OneSided => (0, hi + p + d_max + (2.0 * s).ceil() as i64 + 2),
    };
    let mut best = upper;
    for j in j_lo..=j_hi {
        for d in 1..=d_max {
            let v = dist(j, j + d);
            if v < best {
                best = v;
                if best == 0.0 {
                    return Ok(0.0);
                }
            }
        }
    }
    Ok(best)
}

/// First pair of exactly coincident nodes, if any.
pub fn find_coincidence(spec: &SequenceSpec) -> Result<Option<(i64, i64)>> {
    if separation_constant(spec)? > 0.0 {
        return Ok(None);
    }
    let s = spec.sup_delta();
    let p = spec.joint_period()? as i64;
    let (lo, hi) = spec.core();
    let d_max = (2.0 * s).ceil() as i64 + 1;
    let j_lo = if spec.space.is_two_sided() { lo - d_max - p } else { 0 };
    for j in j_lo..=hi + p + d_max {
        for d in 1..=d_max {
            if spec.node_unchecked(j) == spec.node_unchecked(j + d) {
                return Ok(Some((j, j + d)));
            }
        }
    }
    Ok(None)
}
