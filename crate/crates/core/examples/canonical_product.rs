//! Evaluate a canonical product and compare it with its growth estimates.
//!
//! Run with `cargo run --example canonical_product`.

use std::f64::consts::PI;

use smallfock::products::{canonical_product, coarse_estimate, fine_estimate, TruncationPolicy};
use smallfock::{Exponent, LogComplex, SequenceSpec, SpaceParams, TailedSpec};

fn main() -> smallfock::Result<()> {
    let spec = SequenceSpec::new(
        SpaceParams::one_sided(1.0, Exponent::Finite(2.0)),
        TailedSpec::constant(0.3),
        TailedSpec::periodic(vec![0.0, 1.5]),
    )?;
    let pol = TruncationPolicy::default();

    println!("{:>6} {:>7} {:>12} {:>10} {:>10} {:>4}", "log|z|", "arg z", "log|G|", "coarse", "fine", "n");
    for t in [0.5, 2.0, 5.0, 10.0, 20.0] {
        for th in [0.0, PI / 2.0, PI] {
            let z = LogComplex::new(t, th);
            let g = canonical_product(&spec, z, &pol)?;
            let c = coarse_estimate(&spec, z, &pol)?;
            let f = fine_estimate(&spec, z, &pol)?;
            println!(
                "{t:>6.1} {th:>7.3} {:>12.4} {:>10.4} {:>10.4} {:>4}",
                g.logmod(),
                c.ratio(),
                f.ratio(),
                c.nearest
            );
        }
    }

    // the product vanishes exactly at the nodes
    let node = spec.node(7)?;
    println!("log|G(λ_7)| = {}", canonical_product(&spec, node, &pol)?.logmod());
    Ok(())
}
