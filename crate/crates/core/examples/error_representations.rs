//! Evaluates each nested-integral error representation and compares it with
//! the directly computed error.

use splitlab::error_forms::{error_direct, error_lt_eq23, evaluate, selected_eq25_reading, ErrorForm};
use splitlab::matcore::opnorm2;
use splitlab::problems::{generate, ProblemKind, ProblemSpec};
use splitlab::quadrature::QuadratureRule;
use splitlab::{Method, Result};

fn main() -> Result<()> {
    let pair = generate(&ProblemSpec::random(ProblemKind::RandomSkew, 4, 4))?;
    let t = 0.5;
    println!("reading of the t⁴ palindromic integral: {:?}", selected_eq25_reading()?);

    for m in [Method::LieTrotter, Method::PalindromicLieTrotter, Method::Strang] {
        let direct = error_direct(&pair, m, t)?;
        println!("{m}: ‖E‖ = {:.6e}", opnorm2(&direct));
        for &form in ErrorForm::for_method(m) {
            let r = evaluate(&pair, m, form, t, 1e-9)?;
            println!(
                "  {:<11} deviation {:.2e}  ({} nodes per level)",
                form.tag(),
                opnorm2(&(&r.value - &direct)),
                r.nodes_per_level
            );
        }
    }

    let (leading, correction) = error_lt_eq23(&pair, t, &QuadratureRule::default())?;
    println!(
        "LT split: ‖leading‖ = {:.4e}, ‖correction‖ = {:.4e}",
        opnorm2(&leading),
        opnorm2(&correction)
    );
    Ok(())
}
