use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use splitlab::experiment::{
    config_schema, error_bound_table, run, write_rows, write_table_csv, Check, ExperimentConfig, OutputFormat,
    ResultRow,
};
use splitlab::problems::{generate, Potential, ProblemSpec};
use splitlab::Result;

#[derive(Parser)]
#[command(name = "splitlab", version, about = "Splitting-error experiments on dense matrix pairs")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration; the built-in corpus when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    /// Seed of the first problem; later problems get consecutive seeds.
    #[arg(long, global = true)]
    seed_override: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks selected in the configuration.
    Run,
    /// Compare every integral representation with the direct error.
    VerifyRepresentations,
    /// Compare measured errors with the logarithmic-norm bounds.
    CheckBounds,
    /// Fit local orders on halving time grids.
    EstimateOrder,
    /// Extrapolate leading error coefficients.
    LeadingTerms,
    /// Run all checks on a 1-D Schrödinger pair and print an error/bound table.
    SchrodingerDemo {
        #[arg(long, default_value_t = 32)]
        grid_points: usize,
        #[arg(long, default_value = "harmonic")]
        potential: Potential,
        /// Spectral norm of the kinetic part.
        #[arg(long, default_value_t = 10.0)]
        scale: f64,
        /// Also write the check rows to this file.
        #[arg(long)]
        rows: Option<PathBuf>,
    },
    /// Print the JSON schema of the configuration file.
    PrintConfigSchema,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default_corpus(),
    };
    if let Some(seed) = common.seed_override {
        config.override_seeds(seed);
    }
    if let Some(tol) = common.quad_tol {
        config.quad_tol = tol;
    }
    if let Some(format) = common.format {
        config.output.format = match format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    if let Some(path) = &common.output {
        config.output.path = Some(path.clone());
    }
    config.validate()?;
    Ok(config)
}

fn summarize(rows: &[ResultRow]) -> bool {
    let failed: Vec<&ResultRow> = rows.iter().filter(|r| !r.pass).collect();
    for row in &failed {
        eprintln!("{row}");
    }
    eprintln!("{} rows, {} failed", rows.len(), failed.len());
    failed.is_empty()
}

fn execute(cli: Cli) -> Result<bool> {
    let only = |check: Check| Some(check);
    let selected = match &cli.command {
        Command::PrintConfigSchema => {
            let mut out = sink(cli.common.output.as_ref())?;
            serde_json::to_writer_pretty(&mut out, &config_schema()).map_err(io::Error::from)?;
            writeln!(out)?;
            return Ok(true);
        }
        Command::SchrodingerDemo {
            grid_points,
            potential,
            scale,
            rows,
        } => return schrodinger_demo(&cli.common, *grid_points, *potential, *scale, rows.as_ref()),
        Command::Run => None,
        Command::VerifyRepresentations => only(Check::Representations),
        Command::CheckBounds => only(Check::Bounds),
        Command::EstimateOrder => only(Check::Orders),
        Command::LeadingTerms => only(Check::Leading),
    };
    let mut config = load_config(&cli.common)?;
    if let Some(check) = selected {
        config.checks = [check].into_iter().collect();
    }
    let rows = run(&config)?;
    let mut out = sink(config.output.path.as_ref())?;
    write_rows(&rows, config.output.format, &mut out)?;
    out.flush()?;
    Ok(summarize(&rows))
}

fn schrodinger_demo(
    common: &Common,
    grid_points: usize,
    potential: Potential,
    scale: f64,
    rows_path: Option<&PathBuf>,
) -> Result<bool> {
    let spec = ProblemSpec::schrodinger(grid_points, potential).with_scale(scale);
    let mut config = load_config(common)?;
    config.problems = vec![spec.clone()];
    config.validate()?;
    let rows = run(&config)?;
    if let Some(path) = rows_path {
        let mut out = sink(Some(path))?;
        write_rows(&rows, config.output.format, &mut out)?;
        out.flush()?;
    }

    let pair = generate(&spec)?;
    let table = error_bound_table(&pair, &config.methods, 1.0, 9)?;
    let mut out = sink(common.output.as_ref())?;
    match config.output.format {
        OutputFormat::Csv => write_table_csv(&table, &mut out)?,
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &table).map_err(io::Error::from)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(summarize(&rows))
}
