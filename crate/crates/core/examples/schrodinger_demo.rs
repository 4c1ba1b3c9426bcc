//! Error and bound of every splitting for a discretized 1-D Schrödinger
//! equation, as a CSV table on standard output.

use splitlab::experiment::{error_bound_table, write_table_csv};
use splitlab::matcore::lognorm;
use splitlab::problems::{generate, Potential, ProblemSpec};
use splitlab::{Method, Result};

fn main() -> Result<()> {
    let spec = ProblemSpec::schrodinger(32, Potential::Harmonic);
    let pair = generate(&spec)?;
    eprintln!(
        "μ[A] = {}, μ[B] = {}, μ[A+B] = {}, ‖[A,B]‖ = {:.4}",
        lognorm(pair.a()).value(),
        lognorm(pair.b()).value(),
        lognorm(pair.sum()).value(),
        pair.norm_comm_ab()
    );
    let methods = [Method::LieTrotter, Method::PalindromicLieTrotter, Method::Strang];
    let table = error_bound_table(&pair, &methods, 1.0, 9)?;
    write_table_csv(&table, std::io::stdout().lock())
}
