//! Evaluates the logarithmic-norm bounds and checks them against measured
//! errors, including the behaviour around ω = 0.

use splitlab::bounds::{
    bound_lt, bound_plt, bound_strang, check_bound, evaluate_with, BoundInputs, BoundKind, EvaluationPath,
};
use splitlab::problems::{default_corpus, generate};
use splitlab::{Method, Result};

fn main() -> Result<()> {
    let unit = BoundInputs {
        t: 1.0,
        mu_ab: 0.0,
        omega: 0.0,
        c1: 1.0,
        c2: 1.0,
        c3: 1.0,
    };
    println!("ω = 0, t = 1, unit commutators:");
    println!("  LT {:.12}", bound_lt(&unit)?.value);
    println!("  PLT {:.12}", bound_plt(&unit)?.value);
    println!("  Strang {:.12}", bound_strang(&unit)?.value);

    let seam = BoundInputs { omega: 1e-2, ..unit };
    for kind in [BoundKind::LieTrotter, BoundKind::Palindromic, BoundKind::Strang] {
        let closed = evaluate_with(kind, &seam, EvaluationPath::ClosedForm)?;
        let series = evaluate_with(kind, &seam, EvaluationPath::SeriesFallback)?;
        println!("  seam {kind:?}: closed {closed:.16e} series {series:.16e}");
    }

    println!("\nproblem                        method   ‖E(1/2)‖     bound    ratio");
    for spec in default_corpus() {
        let pair = generate(&spec)?;
        for m in [Method::LieTrotter, Method::PalindromicLieTrotter, Method::Strang] {
            let r = check_bound(&pair, m, 0.5)?;
            println!(
                "{:<30} {:<7} {:.3e} {:.3e} {:>7.4}",
                spec.label(),
                m.tag(),
                r.measured,
                r.bound,
                r.slack_ratio
            );
        }
    }
    Ok(())
}
