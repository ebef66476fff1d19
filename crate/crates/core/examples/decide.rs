//! Decide complete interpolation for a few perturbed lattices.
//!
//! Run with `cargo run --example decide`.

use smallfock::criterion::decide_cis;
use smallfock::{Exponent, SequenceSpec, SpaceParams, TailedSpec};

fn main() -> smallfock::Result<()> {
    let space = SpaceParams::one_sided(1.0, Exponent::Finite(2.0));
    let cases = [
        ("unperturbed", TailedSpec::constant(0.0)),
        ("constant 0.3", TailedSpec::constant(0.3)),
        ("constant 0.5", TailedSpec::constant(0.5)),
        ("periodic [0.9, -0.2]", TailedSpec::periodic(vec![0.9, -0.2])),
        ("periodic [0.9, 0.2]", TailedSpec::periodic(vec![0.9, 0.2])),
    ];
    for (name, delta) in cases {
        let spec = SequenceSpec::new(space, delta, TailedSpec::constant(0.0))?;
        let v = decide_cis(&spec)?;
        println!(
            "{name:>22}: {:?}  sep={:.4} sup|δ|={:.2} N={:?} ε={:?} failures={:?}",
            v.decision, v.sep_const, v.sup_delta, v.window_n, v.epsilon, v.failures
        );
    }

    // two-sided: a large constant shift is absorbed by re-numbering
    let two = SequenceSpec::new(
        SpaceParams::two_sided(1.0, Exponent::Finite(2.0)),
        TailedSpec::constant(1.8),
        TailedSpec::constant(0.0),
    )?;
    let v = decide_cis(&two)?;
    println!("two-sided δ = 1.8: {:?} with shift m = {:?}", v.decision, v.shift_m);
    Ok(())
}
