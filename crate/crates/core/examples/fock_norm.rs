//! Weighted integrals of monomials against their closed forms.
//!
//! Run with `cargo run --example fock_norm`.

use smallfock::cli::monomial_norm_oracle;
use smallfock::spaces::{norm_fp, Monomial, QuadParams};
use smallfock::{Exponent, SpaceParams};

fn main() -> smallfock::Result<()> {
    let q = QuadParams::default();
    let spaces = [
        SpaceParams::one_sided(1.0, Exponent::Finite(2.0)),
        SpaceParams::one_sided(0.5, Exponent::Finite(1.0)),
        SpaceParams::two_sided(1.0, Exponent::Finite(2.0)),
        SpaceParams::one_sided(1.0, Exponent::Infinite),
    ];
    for space in spaces {
        for n in -1..=3 {
            if !space.is_two_sided() && n < 0 {
                continue;
            }
            // the closed form is `‖z^n‖^p` for finite `p`
            let got = norm_fp(&space, &Monomial::power(n), &q)?.integral;
            let want = monomial_norm_oracle(&space, n);
            println!(
                "α={} p={:?} {:?} z^{n}: {got:.10e} (closed form {want:.10e}, rel {:.1e})",
                space.alpha,
                space.p,
                space.side,
                (got - want).abs() / want
            );
        }
    }
    Ok(())
}
