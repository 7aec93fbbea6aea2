use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use monogamy::bounds::BoundId;
use monogamy::harness::{
    self, exit, parse_beta, parse_beta_list, parse_measure_list, CampaignConfig, FigureSpec, FileConfig, StateFamily,
};
use monogamy::roof::RoofConfig;
use monogamy::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "monogamy", version, about = "Entanglement measures and monogamy-bound checks for small qubit registers")]
struct Cli {
    /// TOML file of `key = value` settings; keys match the long flag names and flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reproduce worked example 1, 2 or 3 and check it against the published values.
    Example {
        id: u8,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Write the CSV behind figure 1, 2 or 3.
    Figure(FigureArgs),
    /// Run a seeded verification campaign over random states.
    Verify(CampaignArgs),
    /// Rank the tightest (or violated) checks of one bound.
    Hunt {
        /// Bound id: zhu, zhu-eof, jin, jzsz, jzsz-eof, lemma2, thm1..thm5.
        #[arg(long)]
        bound: Option<String>,
        /// Number of frontier states to list.
        #[arg(long)]
        top: Option<usize>,
        #[command(flatten)]
        campaign: CampaignArgs,
    },
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(long)]
    id: Option<u8>,
    /// Accepts `2sqrt2`.
    #[arg(long, allow_hyphen_values = true)]
    beta_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta_max: Option<String>,
    #[arg(long)]
    steps: Option<usize>,
    /// Output CSV path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CampaignArgs {
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated β values, e.g. `4,4.5,6,10` or `2sqrt2,3`.
    #[arg(long)]
    betas: Option<String>,
    /// Comma-separated subset of concurrence, eof, cren (or `all`).
    #[arg(long)]
    measures: Option<String>,
    /// haar, gsd, gsd-saturating, gsd-balanced, product or w-class.
    #[arg(long)]
    family: Option<String>,
    /// JSONL report path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    ensemble_size: Option<usize>,
}

/// Merges flags over the file; validation happens once the measures are final.
fn campaign_config(args: &CampaignArgs, file: &FileConfig) -> Result<CampaignConfig> {
    let defaults = CampaignConfig::default();
    let measures = match args.measures.as_ref().or(file.measures.as_ref()) {
        Some(s) => parse_measure_list(s)?,
        None => defaults.measures,
    };
    let beta_grid = match args.betas.as_ref().or(file.betas.as_ref()) {
        Some(s) => parse_beta_list(s)?,
        None => defaults.beta_grid,
    };
    let family = match args.family.as_ref().or(file.family.as_ref()) {
        Some(s) => s.parse::<StateFamily>()?,
        None => defaults.family,
    };
    let base_roof = RoofConfig::default();
    let roof = RoofConfig {
        restarts: args.restarts.or(file.restarts).unwrap_or(base_roof.restarts),
        max_iters: args.max_iters.or(file.max_iters).unwrap_or(base_roof.max_iters),
        ensemble_size: args.ensemble_size.or(file.ensemble_size),
        ..base_roof
    };
    let config = CampaignConfig {
        n_qubits: args.qubits.or(file.qubits).unwrap_or(defaults.n_qubits),
        samples: args.samples.or(file.samples).unwrap_or(defaults.samples),
        beta_grid,
        seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        measures,
        roof,
        output_path: args.out.clone().or_else(|| file.out.clone()),
        family,
    };
    Ok(config)
}

fn run_example(id: u8, json: bool) -> Result<i32> {
    let report = harness::reproduce_example(id)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?);
    } else {
        print!("{}", report.render());
    }
    Ok(if report.passed() { exit::OK } else { exit::VIOLATION })
}

fn run_figure(args: &FigureArgs, file: &FileConfig) -> Result<i32> {
    let id = args
        .id
        .or(file.id)
        .ok_or_else(|| Error::Config("figure needs --id".into()))?;
    let mut spec = FigureSpec::full_range(id, args.steps.or(file.steps).unwrap_or(200))?;
    if let Some(s) = args.beta_min.as_ref().or(file.beta_min.as_ref()) {
        spec.beta_min = parse_beta(s)?;
    }
    if let Some(s) = args.beta_max.as_ref().or(file.beta_max.as_ref()) {
        spec.beta_max = parse_beta(s)?;
    }
    match args.out.as_ref().or(file.out.as_ref()) {
        Some(path) => {
            let rows = harness::emit_figure_data(&spec, path)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => {
            let rows = harness::figure_rows(&spec)?;
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            harness::write_figure_csv(&spec, &rows, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(exit::OK)
}

fn run_verify(args: &CampaignArgs, file: &FileConfig) -> Result<i32> {
    let config = campaign_config(args, file)?;
    let outcome = harness::run_campaign(&config)?;
    print!("{}", outcome.summary.render_table());
    println!("elapsed: {:.3} s", outcome.elapsed_secs);
    if let Some(path) = &config.output_path {
        println!("reports: {}", path.display());
    }
    Ok(if outcome.summary.violations() == 0 { exit::OK } else { exit::VIOLATION })
}

fn run_hunt(bound: Option<&String>, top: Option<usize>, args: &CampaignArgs, file: &FileConfig) -> Result<i32> {
    let bound: BoundId = bound
        .or(file.bound.as_ref())
        .ok_or_else(|| Error::Config("hunt needs --bound".into()))?
        .parse()?;
    let config = campaign_config(args, file)?;
    let k = top.or(file.top).unwrap_or(10);
    let res = harness::hunt_counterexamples(&config, bound, k)?;
    println!("bound {}: {} violation(s)", res.bound, res.violations.len());
    let rows = res.violations.iter().map(|c| ("VIOLATION", c)).chain(res.frontier.iter().map(|c| ("frontier", c)));
    for (tag, c) in rows {
        println!(
            "{tag:<10} {:<24} beta={:<20} margin={:<24e} lhs={:<22} rhs={:<22} [{:?}]",
            c.state_id, c.beta, c.margin, c.lhs_pow, c.rhs, c.status
        );
    }
    Ok(if res.violations.is_empty() { exit::OK } else { exit::VIOLATION })
}

fn load_file(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        Some(p) => FileConfig::load(p),
        None => Ok(FileConfig::default()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_file(cli.config.as_deref()).and_then(|file| match &cli.command {
        Command::Example { id, json } => run_example(*id, *json),
        Command::Figure(args) => run_figure(args, &file),
        Command::Verify(args) => run_verify(args, &file),
        Command::Hunt { bound, top, campaign } => run_hunt(bound.as_ref(), *top, campaign, &file),
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::USAGE as u8)
        }
    }
}
