//! Command-line interface.
//!
//! Subcommands: `fgt` (poverty indices over income bundles), `gini`
//! (decomposition by source), `synth` (generate a synthetic survey),
//! `report` (both analyses plus a summary), and `verify` (consistency
//! checks). Results go to stdout in one piece; progress notes and errors
//! go to stderr.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dineq_core::numeric::weighted_mean;
use dineq_core::{
    canonical_bundles, decompose, gini, poverty_table, Dataset, DatasetOptions, PovertyLine,
};

use crate::io;
use crate::report::{self, OutputFormat};
use crate::synth;
use crate::verify;

#[derive(Debug, Parser)]
#[command(
    name = "dineq",
    version,
    about = "Poverty and inequality decomposition by income source"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// FGT poverty indices over counterfactual income bundles
    Fgt(FgtArgs),
    /// Decompose the total-income Gini by income source
    Gini(GiniArgs),
    /// Generate a synthetic household survey CSV
    Synth(SynthArgs),
    /// Combined poverty and inequality report
    Report(ReportArgs),
    /// Run internal-consistency checks on a dataset
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Household survey CSV
    #[arg(long)]
    input: PathBuf,
    /// Accept negative source amounts (net losses); totals must stay
    /// non-negative
    #[arg(long)]
    allow_negative: bool,
}

impl InputArgs {
    fn read(&self) -> Result<Dataset> {
        let options = DatasetOptions {
            allow_negative: self.allow_negative,
            ..DatasetOptions::default()
        };
        Ok(io::read_dataset(&self.input, options)?)
    }
}

#[derive(Debug, Args)]
struct FgtArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Poverty-line income per period
    #[arg(long, default_value_t = 700.0)]
    poverty_line: f64,
    /// Comma-separated poverty aversion parameters
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0, 2.0])]
    alphas: Vec<f64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    output_format: OutputFormat,
    /// Run consistency checks first; abort if any fail
    #[arg(long)]
    verify: bool,
}

#[derive(Debug, Args)]
struct GiniArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    output_format: OutputFormat,
    /// Run consistency checks first; abort if any fail
    #[arg(long)]
    verify: bool,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Where to write the CSV; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Built-in profile: kedah-like or concentrated-nonfarm
    #[arg(long, default_value = synth::KEDAH_LIKE, conflicts_with = "config")]
    preset: String,
    /// TOML config file replacing the preset
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config's seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's household count
    #[arg(long = "n")]
    n_households: Option<usize>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Poverty-line income per period
    #[arg(long, default_value_t = 700.0)]
    poverty_line: f64,
    /// Comma-separated poverty aversion parameters
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0, 2.0])]
    alphas: Vec<f64>,
    /// table renders Markdown; csv is not available for the combined report
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    output_format: OutputFormat,
    /// Run consistency checks first; abort if any fail
    #[arg(long)]
    verify: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Poverty-line income per period
    #[arg(long, default_value_t = 700.0)]
    poverty_line: f64,
    /// Comma-separated poverty aversion parameters
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0, 2.0])]
    alphas: Vec<f64>,
}

/// Parse arguments from the environment and run once.
pub fn run() -> Result<()> {
    dispatch(Cli::parse())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fgt(args) => run_fgt(args),
        Command::Gini(args) => run_gini(args),
        Command::Synth(args) => run_synth(args),
        Command::Report(args) => run_report(args),
        Command::Verify(args) => run_verify(args),
    }
}

/// Run the check battery and abort with the failing lines on stderr.
fn gate_on_verification(data: &Dataset, line: Option<&PovertyLine>, alphas: &[f64]) -> Result<()> {
    let outcome = verify::verify_dataset(data, line, alphas)?;
    if !outcome.passed() {
        eprint!("{}", outcome.render());
        bail!(
            "verification failed: {} of {} checks",
            outcome.failures(),
            outcome.checks.len()
        );
    }
    Ok(())
}

fn run_fgt(args: FgtArgs) -> Result<()> {
    let data = args.input.read()?;
    let line = PovertyLine::new(args.poverty_line)?;
    if args.verify {
        gate_on_verification(&data, Some(&line), &args.alphas)?;
    }
    let table = poverty_table(&data, &canonical_bundles(), &line, &args.alphas)?;
    let doc = report::fgt_doc(&data, &table);
    let rendered = match args.output_format {
        OutputFormat::Table => report::render_fgt_table(&doc),
        OutputFormat::Json => report::render_json(&doc),
        OutputFormat::Csv => report::render_fgt_csv(&doc),
    };
    print!("{rendered}");
    Ok(())
}

fn run_gini(args: GiniArgs) -> Result<()> {
    let data = args.input.read()?;
    if args.verify {
        gate_on_verification(&data, None, &[])?;
    }
    let decomposition = decompose(&data)?;
    let doc = report::gini_doc(&data, &decomposition);
    let rendered = match args.output_format {
        OutputFormat::Table => report::render_gini_table(&doc),
        OutputFormat::Json => report::render_json(&doc),
        OutputFormat::Csv => report::render_gini_csv(&doc),
    };
    print!("{rendered}");
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => synth::load_config(path)?,
        None => synth::preset(&args.preset)?,
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(n) = args.n_households {
        config.n_households = n;
    }

    let data = synth::generate(&config)?;
    let csv = io::dataset_to_csv(&data);
    match &args.output {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("failed to write {}", path.display()))?;
            eprintln!("wrote {} households to {}", data.len(), path.display());
        }
        None => print!("{csv}"),
    }

    let totals = data.totals();
    let weights = data.weights();
    let mean = weighted_mean(&totals, &weights);
    let shares: Vec<String> = data
        .sources()
        .iter()
        .map(|source| {
            let values = data.source_values(source).expect("registered source");
            let share = weighted_mean(&values, &weights) / mean;
            format!("{source} {share:.3}")
        })
        .collect();
    eprintln!(
        "seed {}: n = {}, income shares: {}",
        config.seed,
        data.len(),
        shares.join(", ")
    );
    Ok(())
}

fn run_report(args: ReportArgs) -> Result<()> {
    if args.output_format == OutputFormat::Csv {
        bail!("the combined report has no csv form; use the fgt or gini subcommands for csv");
    }
    let data = args.input.read()?;
    let line = PovertyLine::new(args.poverty_line)?;
    if args.verify {
        gate_on_verification(&data, Some(&line), &args.alphas)?;
    }

    let bundles = canonical_bundles();
    let table = poverty_table(&data, &bundles, &line, &args.alphas)?;
    let decomposition = decompose(&data)?;
    let base_incomes = data.bundle_totals(&bundles[0])?;
    let base_gini = gini(&base_incomes, &data.weights())?;

    let doc = report::report_doc(
        report::fgt_doc(&data, &table),
        report::gini_doc(&data, &decomposition),
        base_gini,
    );
    let rendered = match args.output_format {
        OutputFormat::Table => report::render_report_markdown(&doc),
        OutputFormat::Json => report::render_json(&doc),
        OutputFormat::Csv => unreachable!("rejected above"),
    };
    print!("{rendered}");
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<()> {
    let data = args.input.read()?;
    let line = PovertyLine::new(args.poverty_line)?;
    let outcome = verify::verify_dataset(&data, Some(&line), &args.alphas)?;
    print!("{}", outcome.render());
    if !outcome.passed() {
        bail!(
            "verification failed: {} of {} checks",
            outcome.failures(),
            outcome.checks.len()
        );
    }
    println!(
        "verification passed: {} checks on {} households",
        outcome.checks.len(),
        data.len()
    );
    Ok(())
}
