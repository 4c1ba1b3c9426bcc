//! Runs a small experiment from an inline configuration and prints the rows.

use splitlab::experiment::{run, write_rows, ExperimentConfig};
use splitlab::Result;

const CONFIG: &str = r#"
methods = ["LT", "STRANG"]
t_grid = { t0 = 0.5, ratio = 0.5, count = 2 }
checks = ["bounds", "symmetry", "orders"]

[[problems]]
kind = "random_skew"
dim = 3
seed = 11

[[problems]]
id = "diag"
kind = "commuting_diag"
seed = 2
"#;

fn main() -> Result<()> {
    let config = ExperimentConfig::from_toml(CONFIG)?;
    let rows = run(&config)?;
    write_rows(&rows, config.output.format, std::io::stdout().lock())?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    eprintln!("{} rows, {failed} failed", rows.len());
    Ok(())
}
