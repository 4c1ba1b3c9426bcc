//! Recovers the leading error coefficients by Richardson extrapolation and
//! compares them with the commutator expressions.

use splitlab::order_lab::{extract_leading, leading_target};
use splitlab::problems::{generate, ProblemKind, ProblemSpec};
use splitlab::{Method, Result};

fn main() -> Result<()> {
    for spec in [
        ProblemSpec::nilpotent(),
        ProblemSpec::random(ProblemKind::RandomGeneral, 4, 1),
    ] {
        let pair = generate(&spec)?;
        println!("{}", spec.label());
        for m in [Method::LieTrotter, Method::PalindromicLieTrotter, Method::Strang] {
            let estimate = extract_leading(&pair, m, 0.25)?;
            let target = leading_target(&pair, m)?;
            println!(
                "  {:<7} max |estimate − target| = {:.2e}  (largest entry {:.3})",
                m.tag(),
                (&estimate - &target).max_abs_entry(),
                target.max_abs_entry()
            );
        }
    }
    Ok(())
}
