//! Node placement, re-enumeration and separation of perturbed lattices.
//!
//! Run with `cargo run --example sequences`.

use smallfock::criterion::decide_cis;
use smallfock::geometry::{find_coincidence, separation_constant};
use smallfock::{Exponent, SequenceSpec, SpaceParams, TailedSpec};

fn main() -> smallfock::Result<()> {
    let space = SpaceParams::one_sided(1.0, Exponent::Finite(2.0));

    // a large override moves node 1 past node 3
    let spec = SequenceSpec::new(
        space,
        TailedSpec::table([(1, 2.5)], 0.0),
        TailedSpec::constant(0.0),
    )?;
    for k in 0..5 {
        let lam = spec.node(k)?;
        println!("λ_{k}: log|λ| = {:.4}, arg = {:.4}", lam.logmod(), lam.phase());
    }
    println!("monotone: {}", spec.is_monotone()?);
    let canon = spec.canonicalize()?;
    println!("canonical δ: {}", serde_json::to_string(&canon.delta).unwrap());
    println!("separation: {:.4}", separation_constant(&spec)?);

    // the same point set in the space with p = 1; one-sided enumerations
    // cannot absorb the integer offset, so the decision may change
    let q = spec.reindex_for_exponent(Exponent::Finite(1.0))?;
    println!(
        "p = 1 description: {}  decision {:?} (was {:?})",
        serde_json::to_string(&q.delta).unwrap(),
        decide_cis(&q)?.decision,
        decide_cis(&spec)?.decision
    );

    // a coincidence: node 1 is moved onto node 0
    let bad = SequenceSpec::new(space, TailedSpec::table([(1, -1.0)], 0.0), TailedSpec::constant(0.0))?;
    println!("coincident pair: {:?}", find_coincidence(&bad)?);
    Ok(())
}
