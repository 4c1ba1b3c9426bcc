//! Fits local orders from error norms on halving time grids.

use splitlab::order_lab::fit_local_order;
use splitlab::problems::{default_corpus, generate};
use splitlab::{Method, Result};

fn main() -> Result<()> {
    let methods = [Method::LieTrotter, Method::PalindromicLieTrotter, Method::Strang];
    print!("{:<30}", "problem");
    for m in methods {
        print!("{:>10}", m.tag());
    }
    println!();
    for spec in default_corpus() {
        let pair = generate(&spec)?;
        print!("{:<30}", spec.label());
        for m in methods {
            let fit = fit_local_order(&pair, m, 1.0, 2, 8)?;
            print!("{:>10.4}", fit.slope);
        }
        println!();
    }
    Ok(())
}
