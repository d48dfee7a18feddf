//! Command-line front end for the analysis pipeline.

use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};

use fika_core::cli::{
    cmd_analyze, cmd_coverage, cmd_generate, cmd_report, cmd_triage, CliError, RunConfig,
};
use fika_core::scenario::PromptMode;

#[derive(Parser)]
#[command(
    name = "fika",
    version,
    about = "Reachability analysis and scenario generation for third-party library call sites"
)]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Code model (.fika fixture DSL, otherwise JSON).
    #[arg(long, global = true)]
    model: Option<String>,
    /// Artifact directory.
    #[arg(long, global = true)]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the call graph and write the path inventory.
    Analyze {
        /// Also write the edge list to callgraph.txt.
        #[arg(long)]
        dump_graph: bool,
    },
    /// Check developer-test coverage at every library call site.
    Coverage(CoverageArgs),
    /// Generate reachability scenarios for uncovered sites.
    Generate(GenerateArgs),
    /// Evaluate vulnerability rules with executability evidence.
    Triage(TriageArgs),
    /// Rebuild the consolidated report from on-disk artifacts.
    Report,
}

#[derive(Args)]
struct CoverageArgs {
    /// LCOV file with developer-test coverage (repeatable).
    #[arg(long = "lcov")]
    lcov: Vec<String>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long = "lcov")]
    lcov: Vec<String>,
    /// Prompt mode: BL1, BL2 or FULL.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<PromptMode>,
    #[arg(long)]
    max_attempts: Option<u32>,
    #[arg(long)]
    workers: Option<usize>,
    /// LLM provider: `mock:<dir>` or `http`.
    #[arg(long)]
    provider: Option<String>,
    #[arg(long)]
    base_url: Option<String>,
    /// Model name sent to an HTTP provider.
    #[arg(long)]
    llm_model: Option<String>,
    #[arg(long)]
    api_key_env: Option<String>,
    /// Execution adapter command and its arguments (repeatable, in order).
    #[arg(long = "adapter", allow_hyphen_values = true)]
    adapter: Vec<String>,
    #[arg(long)]
    project_root: Option<String>,
}

#[derive(Args)]
struct TriageArgs {
    #[arg(long = "lcov")]
    lcov: Vec<String>,
    /// Vulnerability rules file.
    #[arg(long)]
    rules: Option<String>,
}

fn parse_mode(text: &str) -> Result<PromptMode, String> {
    match text.to_ascii_uppercase().as_str() {
        "BL1" => Ok(PromptMode::Bl1),
        "BL2" => Ok(PromptMode::Bl2),
        "FULL" => Ok(PromptMode::Full),
        other => Err(format!("unknown mode {other} (expected BL1, BL2 or FULL)")),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("fika: {}", e.message);
        process::exit(e.exit_code);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(model) = cli.model {
        config.model = Some(model);
    }
    if let Some(out) = cli.out {
        config.out = out;
    }

    match cli.command {
        Command::Analyze { dump_graph } => {
            let doc = cmd_analyze(&config, dump_graph)?;
            println!(
                "{}: {} paths, {} warnings -> {}/inventory.json",
                doc.project,
                doc.paths.len(),
                doc.warnings.len(),
                config.out
            );
        }
        Command::Coverage(args) => {
            if !args.lcov.is_empty() {
                config.coverage = args.lcov;
            }
            let doc = cmd_coverage(&config)?;
            println!("covered pairs {} -> {}/coverage.json", doc.summary, config.out);
        }
        Command::Generate(args) => {
            if !args.lcov.is_empty() {
                config.coverage = args.lcov;
            }
            if let Some(mode) = args.mode {
                config.mode = mode;
            }
            if let Some(n) = args.max_attempts {
                config.max_attempts = n;
            }
            if let Some(n) = args.workers {
                config.workers = n;
            }
            if args.provider.is_some() {
                config.provider = args.provider;
            }
            if args.base_url.is_some() {
                config.base_url = args.base_url;
            }
            if args.llm_model.is_some() {
                config.llm_model = args.llm_model;
            }
            if args.api_key_env.is_some() {
                config.api_key_env = args.api_key_env;
            }
            if !args.adapter.is_empty() {
                config.adapter = args.adapter;
            }
            if args.project_root.is_some() {
                config.project_root = args.project_root;
            }
            let doc = cmd_generate(&config)?;
            let reached = doc
                .outcomes
                .iter()
                .filter(|o| o.status == fika_core::scenario::OutcomeStatus::Reached)
                .count();
            println!(
                "reached {reached}/{} targets -> {}/outcomes.json",
                doc.outcomes.len(),
                config.out
            );
        }
        Command::Triage(args) => {
            if !args.lcov.is_empty() {
                config.coverage = args.lcov;
            }
            if args.rules.is_some() {
                config.rules = args.rules;
            }
            let doc = cmd_triage(&config)?;
            println!("{} rules -> {}/triage.json", doc.rows.len(), config.out);
        }
        Command::Report => {
            let doc = cmd_report(&config)?;
            println!("{}: report.json written to {}", doc.module, config.out);
        }
    }
    Ok(())
}
