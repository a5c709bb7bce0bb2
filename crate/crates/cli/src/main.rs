//! Benchmark front end: play games under metered search budgets and analyze
//! the results.
//!
//! `run` plays one configuration, `sweep` a parameter grid from a TOML file,
//! `analyze` turns a records file into rank tables plus significance tests,
//! and `list` shows what is available. Records go to stdout unless `--out`
//! is given; identical seeds give identical records (the `ms` column aside).

use std::fs::File;
use std::io;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use omcts::harness::{
    aggregate, budget_grid, exploration_grid, format_rank_table, rank_algorithms,
    read_records_csv, read_records_json, rollout_grid, run_matrix, sweep_specs,
    write_rank_table_csv, write_records_csv, write_records_json, AgentKind, RunRecord,
};
use omcts::stats::{friedman_test, wilcoxon_signed_rank};
use omcts::{GameConfig, RunSpec};

#[derive(Parser)]
#[command(name = "omcts", version, about = "Budget-metered game search benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one configuration and emit its per-episode records.
    Run(RunArgs),
    /// Run a parameter grid described by a TOML file.
    Sweep(SweepArgs),
    /// Summarize a records file into rank tables and significance tests.
    Analyze(AnalyzeArgs),
    /// Show the available games and agents.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Game name, optionally with parameters: `gapworld`, `twoarm:q=0.6`, ...
    #[arg(long)]
    game: GameConfig,
    /// One of: mcts, mixmax, n-mcts, o-mcts, pb-mcts.
    #[arg(long)]
    agent: AgentKind,
    /// Forward-model calls allowed per decision.
    #[arg(long, default_value_t = 250)]
    budget: u64,
    /// Exploration constant.
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    c: f64,
    /// Rollout length cap.
    #[arg(long, default_value_t = 10)]
    rl: u32,
    /// Blend weight between mean and max; mixmax only.
    #[arg(long)]
    q: Option<f64>,
    /// Master seed; episode seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Episodes to play.
    #[arg(long, default_value_t = 1)]
    reps: u32,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Grid description; see sweep.example.toml next to this crate.
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Records file produced by `run` or `sweep` (.csv or .json).
    #[arg(long)]
    input: PathBuf,
    /// Significance level for the rank tests.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Also write the rank table as CSV here.
    #[arg(long)]
    rank_csv: Option<PathBuf>,
}

#[derive(Args)]
struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Grid description accepted by `sweep`. Omitted fields fall back to the
/// default grids, one episode, seed 0, and Q = 0.25.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    games: Vec<String>,
    agents: Vec<String>,
    #[serde(default = "budget_grid")]
    budgets: Vec<u64>,
    #[serde(default = "exploration_grid")]
    explorations: Vec<f64>,
    #[serde(default = "rollout_grid")]
    rollout_lens: Vec<u32>,
    #[serde(default = "default_qs")]
    qs: Vec<f64>,
    #[serde(default = "default_episodes")]
    episodes: u32,
    #[serde(default)]
    master_seed: u64,
}

fn default_qs() -> Vec<f64> {
    vec![0.25]
}

fn default_episodes() -> u32 {
    1
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run_cmd(args),
        Command::Sweep(args) => sweep_cmd(args),
        Command::Analyze(args) => analyze_cmd(args),
        Command::List => list_cmd(),
    }
}

fn run_cmd(args: RunArgs) -> Result<()> {
    if args.q.is_some() && !args.agent.needs_q() {
        bail!("--q only applies to the mixmax agent");
    }
    let mut spec = RunSpec::new(args.game, args.agent, args.budget);
    spec.exploration = args.c;
    spec.rollout_len = args.rl;
    spec.q = args.q.or(spec.q);
    spec.episodes = args.reps;
    spec.master_seed = args.seed;
    let records = run_matrix(&[spec])?;
    write_records(&records, &args.out)
}

fn sweep_cmd(args: SweepArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let file: SweepFile = toml::from_str(&text)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    let games = file
        .games
        .iter()
        .map(|g| g.parse::<GameConfig>().map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    let agents = file
        .agents
        .iter()
        .map(|a| a.parse::<AgentKind>().map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    let specs = sweep_specs(
        &games,
        &agents,
        &file.budgets,
        &file.explorations,
        &file.rollout_lens,
        &file.qs,
        file.episodes,
        file.master_seed,
    );
    if specs.is_empty() {
        bail!("the grid in {} is empty", args.config.display());
    }
    eprintln!("sweep: {} configurations x {} episodes", specs.len(), file.episodes);
    let records = run_matrix(&specs)?;
    write_records(&records, &args.out)
}

fn analyze_cmd(args: AnalyzeArgs) -> Result<()> {
    let file = File::open(&args.input)
        .with_context(|| format!("opening {}", args.input.display()))?;
    let records = if args.input.extension().is_some_and(|e| e == "json") {
        read_records_json(file)?
    } else {
        read_records_csv(file)?
    };
    if records.is_empty() {
        bail!("{} holds no records", args.input.display());
    }
    println!("{} records", records.len());
    let table = rank_algorithms(&aggregate(&records))?;
    print!("{}", format_rank_table(&table));
    if let Some(path) = &args.rank_csv {
        write_rank_table_csv(File::create(path)?, &table)?;
        println!("rank table written to {}", path.display());
    }

    if table.agents.len() < 2 || table.cells.len() < 2 {
        println!("significance tests need at least two agents and two (game, budget) cells");
        return Ok(());
    }
    let fr = friedman_test(&table.rank_matrix())?;
    println!(
        "Friedman: chi^2 = {:.4} (dof {}), p = {:.4} -> {} at alpha = {}",
        fr.statistic,
        fr.dof,
        fr.p_value,
        if fr.p_value < args.alpha { "ranks differ" } else { "no detectable difference" },
        args.alpha,
    );
    println!("pairwise Wilcoxon signed rank over per-cell ranks:");
    for (i, a) in table.agents.iter().enumerate() {
        for b in &table.agents[i + 1..] {
            let xs = table.agent_ranks(a).expect("agent came from the table");
            let ys = table.agent_ranks(b).expect("agent came from the table");
            match wilcoxon_signed_rank(&xs, &ys) {
                Ok(w) => println!(
                    "  {a} vs {b}: W = {:.1}, p = {:.4}{}",
                    w.statistic,
                    w.p_value,
                    if w.p_value < args.alpha { "  (significant)" } else { "" },
                ),
                Err(e) => println!("  {a} vs {b}: skipped ({e})"),
            }
        }
    }
    Ok(())
}

fn list_cmd() -> Result<()> {
    println!("games (parameters shown at their defaults, override as name:key=value,...):");
    for game in GameConfig::default_suite() {
        println!("  {game}");
    }
    println!("agents:");
    for agent in AgentKind::all() {
        println!("  {agent}");
    }
    println!("default budgets: {:?}", budget_grid());
    println!("default C grid: {:?}", exploration_grid());
    println!("default RL grid: {:?}", rollout_grid());
    Ok(())
}

fn write_records(records: &[RunRecord], out: &OutArgs) -> Result<()> {
    fn sink(path: Option<&Path>) -> Result<Box<dyn io::Write>> {
        Ok(match path {
            Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
            None => Box::new(io::stdout().lock()),
        })
    }
    let writer = sink(out.out.as_deref())?;
    match out.format {
        Format::Csv => write_records_csv(writer, records)?,
        Format::Json => write_records_json(writer, records)?,
    }
    if let Some(p) = &out.out {
        eprintln!("{} records written to {}", records.len(), p.display());
    }
    Ok(())
}
