mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallfock::criterion::{decide_cis, tail_means, window_sup, Decision};
use smallfock::geometry::{dist_to_sequence, dlog};
use smallfock::products::{canonical_product, coarse_estimate, fine_estimate, TruncationPolicy};
use smallfock::sequence::Exponent;
use smallfock::spaces::{interpolate, norm_fp, Evaluable, Monomial, QuadParams, SampleSeq, Scaled};
use smallfock::toperator::{assemble_section, decay_fit, gamma_phase_choice};
use smallfock::{LogComplex, SequenceSpec, TailedSpec};

use common::*;

fn random_spec(seed: u64, amp: f64) -> SequenceSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_sided = rng.gen_bool(0.5);
    spec(
        rng.gen_range(0.5..2.0),
        random_exponent(&mut rng),
        two_sided,
        random_tailed(&mut rng, amp, two_sided),
        random_phases(&mut rng),
    )
}

fn random_two_sided(seed: u64, amp: f64) -> SequenceSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    spec(
        rng.gen_range(0.5..2.0),
        random_exponent(&mut rng),
        true,
        random_tailed(&mut rng, amp, true),
        random_phases(&mut rng),
    )
}

fn point() -> impl Strategy<Value = LogComplex> {
    (-30.0..30.0f64, -PI..PI).prop_map(|(t, th)| LogComplex::new(t, th))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dlog_is_a_metric(a in point(), b in point(), c in point()) {
        let ab = dlog(a, b).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, dlog(b, a).unwrap());
        prop_assert_eq!(dlog(a, a).unwrap(), 0.0);
        prop_assert!(ab <= dlog(a, c).unwrap() + dlog(c, b).unwrap() + 1e-12);
        if a != b {
            prop_assert!(ab > 0.0);
        }
    }

    #[test]
    fn logcomplex_round_trip(re in -1e3..1e3f64, im in -1e3..1e3f64) {
        let z = Complex64::new(re, im);
        let back = LogComplex::from_complex(z).to_complex();
        let ulp = |x: f64| x.abs() * f64::EPSILON * 4.0 + f64::MIN_POSITIVE;
        prop_assert!((back.re - re).abs() <= ulp(z.norm()));
        prop_assert!((back.im - im).abs() <= ulp(z.norm()));
    }

    #[test]
    fn logcomplex_multiplication(a in (-1e3..1e3f64, -1e3..1e3f64), b in (-1e3..1e3f64, -1e3..1e3f64)) {
        let (x, y) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let got = (LogComplex::from_complex(x) * LogComplex::from_complex(y)).to_complex();
        let want = x * y;
        prop_assert!((got - want).norm() <= 1e-12 * want.norm());
    }

    #[test]
    fn canonical_moduli_nondecreasing(seed in any::<u64>()) {
        let s = random_spec(seed, 2.5).canonicalize().unwrap();
        let ks: Vec<i64> = if s.space.is_two_sided() { (-40..40).collect() } else { (0..80).collect() };
        for w in ks.windows(2) {
            prop_assert!(s.node(w[0]).unwrap().logmod() <= s.node(w[1]).unwrap().logmod());
        }
    }

    #[test]
    fn spec_json_round_trip(seed in any::<u64>()) {
        let s = random_spec(seed, 1.0);
        prop_assert_eq!(SequenceSpec::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn shift_keeps_decision(seed in any::<u64>(), m in -5i64..=5) {
        let s = random_two_sided(seed, 1.2);
        let a = decide_cis(&s).unwrap().decision;
        let b = decide_cis(&s.shift_enumeration(m).unwrap()).unwrap().decision;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn reindex_keeps_decision(seed in any::<u64>(), base in 0usize..4) {
        // 2/p ∈ {3, 2, 1, 0}: every pair differs by an integer
        let exps = [Exponent::Finite(2.0 / 3.0), Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinite];
        let s = random_two_sided(seed, 1.2).reindex_for_exponent(exps[base]).unwrap();
        let a = decide_cis(&s).unwrap().decision;
        for q in exps {
            prop_assert_eq!(a, decide_cis(&s.reindex_for_exponent(q).unwrap()).unwrap().decision);
        }
    }

    #[test]
    fn yes_witness_is_sound(seed in any::<u64>()) {
        let s = random_spec(seed, 0.9);
        let v = decide_cis(&s).unwrap();
        if v.decision == Decision::Yes {
            let mut c = s.canonicalize().unwrap();
            if let Some(m) = v.shift_m {
                c = c.shift_enumeration(m).unwrap();
            }
            let n = v.window_n.unwrap();
            prop_assert!(window_sup(&c, n) <= 0.5 - v.epsilon.unwrap());
        }
    }

    #[test]
    fn valid_shift_is_unique(seed in any::<u64>()) {
        let s = random_two_sided(seed, 2.0).canonicalize().unwrap();
        let (left, right) = tail_means(&s);
        let left = left.unwrap();
        let valid: Vec<i64> = (-10..=10)
            .filter(|m| (left + *m as f64).abs().max((right + *m as f64).abs()) < 0.5)
            .collect();
        prop_assert!(valid.len() <= 1);
        let v = decide_cis(&s).unwrap();
        if v.failures.is_empty() {
            prop_assert_eq!(valid, vec![v.shift_m.unwrap()]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dist_matches_brute_force(seed in any::<u64>(), t in -40.0..40.0f64, th in -PI..PI) {
        let s = random_spec(seed, 1.0);
        let z = LogComplex::new(t, th);
        let (d, _) = dist_to_sequence(&s, z).unwrap();
        // on the ray opposite the left tail the infimum is only approached as
        // k → -∞, so the left range reaches far enough to see it to f64 precision
        let ks: Vec<i64> = if s.space.is_two_sided() { (-2000..=200).collect() } else { (0..=200).collect() };
        let brute = ks
            .into_iter()
            .map(|k| {
                let lam = s.node(k).unwrap();
                // |z - λ| = |z| |1 - λ/z| evaluated in scaled complex arithmetic
                let w = Complex64::from_polar((lam.logmod() - t).exp(), lam.phase() - th);
                t.exp() * (Complex64::new(1.0, 0.0) - w).norm()
            })
            .fold(f64::INFINITY, f64::min);
        prop_assert!((d.abs() - brute).abs() <= 1e-12 * brute, "{} vs {}", d.abs(), brute);
    }

    #[test]
    fn product_vanishes_exactly_on_nodes(seed in any::<u64>(), k in 0i64..30, t in -5.0..12.0f64, th in -PI..PI) {
        let s = random_spec(seed, 0.45);
        let pol = TruncationPolicy::default();
        let k = if s.space.is_two_sided() { k - 15 } else { k };
        prop_assert!(canonical_product(&s, s.node(k).unwrap(), &pol).unwrap().is_zero());
        let z = LogComplex::new(t, th);
        let (d, _) = dist_to_sequence(&s, z).unwrap();
        prop_assert_eq!(canonical_product(&s, z, &pol).unwrap().is_zero(), d.is_zero());
    }

    #[test]
    fn estimates_recombine_to_product(seed in any::<u64>(), t in -5.0..20.0f64, th in -PI..PI) {
        let s = random_spec(seed, 0.45);
        let pol = TruncationPolicy::default();
        let z = LogComplex::new(t, th);
        let g = canonical_product(&s, z, &pol).unwrap().logmod();
        for e in [coarse_estimate(&s, z, &pol).unwrap(), fine_estimate(&s, z, &pol).unwrap()] {
            let back = e.log_ratio + e.log_comparator;
            prop_assert!((back - g).abs() <= 1e-10 * g.abs().max(1.0), "{} vs {}", back, g);
        }
    }

    #[test]
    fn decay_certificate(delta in -0.45..0.45f64, alpha in 0.5..2.0f64) {
        let s = spec(alpha, Exponent::Finite(2.0), false, TailedSpec::constant(delta), TailedSpec::constant(0.0));
        let v = decide_cis(&s).unwrap();
        prop_assert_eq!(v.decision, Decision::Yes);
        let sec = assemble_section(&s, &gamma_phase_choice(&s).unwrap(), 0..=127, 0..=127, &TruncationPolicy::default()).unwrap();
        let f = decay_fit(&sec).unwrap();
        let threshold = -v.epsilon.unwrap() / (8.0 * alpha);
        prop_assert!(f.slope_upper <= threshold && f.slope_lower <= threshold, "{:?} vs {}", f, threshold);
    }

    #[test]
    fn blow_up_certificate(size in 0.55..1.0f64, negative in any::<bool>(), alpha in 0.5..2.0f64) {
        let delta = if negative { -size } else { size };
        let s = spec(alpha, Exponent::Finite(2.0), false, TailedSpec::constant(delta), TailedSpec::constant(0.0));
        prop_assert_eq!(decide_cis(&s).unwrap().decision, Decision::No);
        let sec = assemble_section(&s, &gamma_phase_choice(&s).unwrap(), 0..=127, 0..=127, &TruncationPolicy::default()).unwrap();
        let f = decay_fit(&sec).unwrap();
        let threshold = (2.0 * size - 1.0) / (8.0 * alpha);
        prop_assert!(f.slope_upper.max(f.slope_lower) >= threshold, "{:?} vs {}", f, threshold);
    }

    #[test]
    fn sections_reassemble_bit_identically(seed in any::<u64>()) {
        let s = working_enumeration(&random_spec(seed, 0.45));
        let pol = TruncationPolicy::default();
        let phases = gamma_phase_choice(&s).unwrap();
        let r = if s.space.is_two_sided() { -8..=7 } else { 0..=15 };
        let a = assemble_section(&s, &phases, r.clone(), r.clone(), &pol).unwrap();
        let b = assemble_section(&a.spec, &a.gamma_phases, a.rows.clone(), a.cols.clone(), &a.pol).unwrap();
        prop_assert_eq!(a.entries, b.entries);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coarse_spread_is_uniform(seed in any::<u64>()) {
        let s = random_spec(seed, 0.45);
        let pol = TruncationPolicy::default();
        // a fixed grid, so the larger range sees a superset of the points
        let spread = |hi: f64| {
            let steps = ((hi - 1.0) / 0.1).round() as usize;
            let r: Vec<f64> = (0..=steps)
                .flat_map(|i| (0..48).map(move |j| LogComplex::new(1.0 + 0.1 * i as f64, -PI + (j as f64 + 0.5) * PI / 24.0)))
                .map(|z| coarse_estimate(&s, z, &pol).unwrap().ratio())
                .collect();
            r.iter().cloned().fold(0.0, f64::max) / r.iter().cloned().fold(f64::INFINITY, f64::min)
        };
        let near = spread(15.0);
        let far = spread(25.0);
        prop_assert!(far <= 2.0 * near, "{} vs {}", far, near);
    }


    #[test]
    fn interpolation_is_linear(
        seed in any::<u64>(),
        a in (-2.0..2.0f64, -2.0..2.0f64),
        b in (-2.0..2.0f64, -2.0..2.0f64),
        t in 0.0..15.0f64,
        th in -PI..PI,
    ) {
        let s = working_enumeration(&random_spec(seed, 0.45));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lo = if s.space.is_two_sided() { -5 } else { 0 };
        let mut draw = || -> BTreeMap<i64, Complex64> {
            (lo..lo + 8).map(|k| (k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))).collect()
        };
        let (c, d) = (draw(), draw());
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let mix: BTreeMap<i64, Complex64> = c.keys().map(|k| (*k, a * c[k] + b * d[k])).collect();
        let pol = TruncationPolicy::default();
        let f = |m: BTreeMap<i64, Complex64>| interpolate(&s, &SampleSeq::new(s.space, m).unwrap(), &pol).unwrap();
        let z = LogComplex::new(t, th);
        let lhs = f(mix).eval(z).unwrap().to_complex();
        let rhs = a * f(c).eval(z).unwrap().to_complex() + b * f(d).eval(z).unwrap().to_complex();
        let scale = lhs.norm().max(rhs.norm());
        prop_assert!((lhs - rhs).norm() <= 1e-10 * scale, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn norm_is_homogeneous(n in 0i32..3, logs in -20.0..20.0f64, phase in -PI..PI, p in prop_oneof![Just(0.5), Just(1.0), Just(2.0), Just(3.0), Just(f64::INFINITY)], alpha in 0.5..2.0f64) {
        let exponent = if p.is_finite() { Exponent::Finite(p) } else { Exponent::Infinite };
        let g = gamma(alpha, exponent);
        let f = Monomial::power(n);
        let sf = Scaled { scale: LogComplex::new(logs, phase), inner: &f as &dyn Evaluable };
        let q = QuadParams::default();
        let a = norm_fp(&g.space, &f, &q).unwrap().norm;
        let b = norm_fp(&g.space, &sf, &q).unwrap().norm;
        prop_assert!((b / (a * logs.exp()) - 1.0).abs() <= 1e-10);
    }
}
