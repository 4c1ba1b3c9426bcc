//! Builds the four splittings for a small pair and compares them with the
//! exact propagator.

use splitlab::matcore::opnorm2;
use splitlab::problems::{generate, ProblemKind, ProblemSpec};
use splitlab::splittings::{propagator, step_n, symmetry_defect};
use splitlab::{Method, Result};

fn main() -> Result<()> {
    let pair = generate(&ProblemSpec::random(ProblemKind::RandomGeneral, 4, 1))?;
    println!("‖[A,B]‖ = {:.4}, ω = {:.4}", pair.norm_comm_ab(), pair.omega());

    let t = 0.5;
    let exact = propagator(&pair, Method::Exact, t)?;
    println!("{:<11} {:>12} {:>12} {:>14}", "method", "‖Y − e^tS‖", "10 steps", "‖Y(t)Y(−t)−I‖");
    for m in Method::ALL.into_iter().filter(|&m| m != Method::Exact) {
        let one = opnorm2(&(&propagator(&pair, m, t)? - &exact));
        let ten = opnorm2(&(&step_n(&pair, m, t, 10)? - &exact));
        println!("{:<11} {one:>12.3e} {ten:>12.3e} {:>14.3e}", m.tag(), symmetry_defect(&pair, m, t)?);
    }
    Ok(())
}
