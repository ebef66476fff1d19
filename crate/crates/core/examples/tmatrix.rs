//! Assemble a section of the change-of-basis operator and fit its decay.
//!
//! Run with `cargo run --release --example tmatrix`.

use smallfock::products::TruncationPolicy;
use smallfock::toperator::{assemble_section, decay_fit, gamma_phase_choice, prediction_residual, section_norms};
use smallfock::{Exponent, SequenceSpec, SpaceParams, TailedSpec};

fn main() -> smallfock::Result<()> {
    let pol = TruncationPolicy::default();
    for delta in [0.0, 0.25, 0.75] {
        let spec = SequenceSpec::new(
            SpaceParams::one_sided(1.0, Exponent::Finite(2.0)),
            TailedSpec::constant(delta),
            TailedSpec::constant(0.0),
        )?;
        let phases = gamma_phase_choice(&spec)?;
        let section = assemble_section(&spec, &phases, 0..=47, 0..=47, &pol)?;
        let fit = decay_fit(&section)?;
        let norms = section_norms(&section)?;
        println!(
            "δ = {delta:.2}: slope above {:+.3}, below {:+.3}; residual {:.2}; ‖T‖₁ {:.1} ‖T‖₂ {:.1} ‖T‖∞ {:.1}",
            fit.slope_upper,
            fit.slope_lower,
            prediction_residual(&section),
            norms.p1,
            norms.p2,
            norms.pinf
        );
    }
    Ok(())
}
