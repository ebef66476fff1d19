#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use rand::Rng;
use smallfock::criterion::decide_cis;
use smallfock::sequence::{Exponent, SpaceParams};
use smallfock::{SequenceSpec, TailedSpec};

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.json"))
}

pub fn corpus(name: &str) -> SequenceSpec {
    let text = std::fs::read_to_string(corpus_path(name)).expect("corpus file");
    SequenceSpec::from_json(&text).expect("corpus spec parses")
}

/// Corpus specs that are complete interpolating.
pub const CIS_CORPUS: &[&str] = &[
    "delta0_one",
    "delta03_one",
    "periodic04_one",
    "gamma_inf_one",
    "delta0_two",
    "delta08_two",
    "mixed_two",
];

/// Every separated corpus spec.
pub const SEPARATED_CORPUS: &[&str] = &[
    "delta0_one",
    "delta03_one",
    "delta05_one",
    "delta075_one",
    "periodic04_one",
    "gamma_inf_one",
    "delta0_two",
    "delta08_two",
    "mixed_two",
];

/// Canonical enumeration, shifted so that the window condition holds at
/// `m = 0` when it holds at all.
pub fn working_enumeration(spec: &SequenceSpec) -> SequenceSpec {
    let v = decide_cis(spec).unwrap();
    let s = spec.canonicalize().unwrap();
    match v.shift_m {
        Some(m) if s.space.is_two_sided() => s.shift_enumeration(m).unwrap(),
        _ => s,
    }
}

pub fn spec(alpha: f64, p: Exponent, two_sided: bool, delta: TailedSpec, theta: TailedSpec) -> SequenceSpec {
    let space = if two_sided {
        SpaceParams::two_sided(alpha, p)
    } else {
        SpaceParams::one_sided(alpha, p)
    };
    SequenceSpec::new(space, delta, theta).unwrap()
}

pub fn gamma(alpha: f64, p: Exponent) -> SequenceSpec {
    SequenceSpec::base(SpaceParams::one_sided(alpha, p))
}

/// A random finitely described sequence with `|δ| ≤ amp`.
pub fn random_tailed<R: Rng>(rng: &mut R, amp: f64, two_sided: bool) -> TailedSpec {
    match rng.gen_range(0..3) {
        0 => TailedSpec::constant(rng.gen_range(-amp..=amp)),
        1 => {
            let n = rng.gen_range(1..=4);
            TailedSpec::periodic((0..n).map(|_| rng.gen_range(-amp..=amp)).collect())
        }
        _ => {
            let lo = if two_sided { -6 } else { 0 };
            let entries: Vec<(i64, f64)> = (0..rng.gen_range(1..=5))
                .map(|_| (rng.gen_range(lo..=8), rng.gen_range(-amp..=amp)))
                .collect();
            let right = rng.gen_range(-amp..=amp);
            if two_sided {
                TailedSpec::table_two_sided(entries, rng.gen_range(-amp..=amp), right)
            } else {
                TailedSpec::table(entries, right)
            }
        }
    }
}

pub fn random_phases<R: Rng>(rng: &mut R) -> TailedSpec {
    if rng.gen_bool(0.5) {
        TailedSpec::constant(rng.gen_range(-PI..PI))
    } else {
        let n = rng.gen_range(1..=3);
        TailedSpec::periodic((0..n).map(|_| rng.gen_range(-PI..PI)).collect())
    }
}

pub fn random_exponent<R: Rng>(rng: &mut R) -> Exponent {
    match rng.gen_range(0..5) {
        0 => Exponent::Infinite,
        1 => Exponent::Finite(0.5),
        2 => Exponent::Finite(1.0),
        3 => Exponent::Finite(2.0),
        _ => Exponent::Finite(3.0),
    }
}
