//! Interpolate finitely supported data on a complete interpolating sequence.
//!
//! Run with `cargo run --example interpolation`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use smallfock::products::TruncationPolicy;
use smallfock::spaces::{interpolate, norm_fp, QuadParams, SampleSeq};
use smallfock::{Exponent, SequenceSpec, SpaceParams, TailedSpec};

fn main() -> smallfock::Result<()> {
    let space = SpaceParams::two_sided(1.0, Exponent::Finite(2.0));
    let spec = SequenceSpec::new(space, TailedSpec::constant(0.8), TailedSpec::constant(0.4))?;
    let pol = TruncationPolicy::default();

    let support: BTreeMap<i64, Complex64> = [
        (-3, Complex64::new(1.0, 0.0)),
        (0, Complex64::new(0.0, -2.0)),
        (4, Complex64::new(0.5, 0.5)),
    ]
    .into_iter()
    .collect();
    let data = SampleSeq::new(space, support)?;
    let f = interpolate(&spec, &data, &pol)?;
    println!("enumeration shift: {}  warning: {}", f.shift(), f.cis_warning);

    for (k, r) in f.residuals(&data, -6..=6)? {
        println!("k = {k:>3}  |f(λ_k) w(λ_k)^-1 - c_k| = {r:.2e}");
    }

    let n = norm_fp(&space, &f, &QuadParams::default())?;
    println!("‖f‖ = {:.6}  ‖c‖ = {:.6}  ratio = {:.4}", n.norm, data.lp_norm(), n.norm / data.lp_norm());
    Ok(())
}
