//! `misinfo`: command-line front end for misinformation-game analysis.
//!
//! Reads games and misinformation games as JSON (see the library's `json`
//! module for the schema), writes JSON, DOT, or CSV. All strategy and
//! position indices in output are 1-based. Exit codes: 0 on success, 1 on a
//! domain error (degenerate game, non-canonical input, cap exceeded, ...),
//! 2 on I/O or parse errors.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use misinfo_games::adaptation::{
    compute_sme, export_dot, find_one_sme, naive_adaptation, parallel_traverse,
};
use misinfo_games::experiments::{emit_csv, monte_carlo, Setting};
use misinfo_games::game::StrategyProfile;
use misinfo_games::inflation::inflate_game;
use misinfo_games::json as gjson;
use misinfo_games::misinfo::{inflation_process, nme_with_mode, PositionSet};
use misinfo_games::nash::{all_nash, SolveMode};
use misinfo_games::Options;

#[derive(Parser)]
#[command(name = "misinfo", version, about = "Misinformation-game analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Input file (JSON); stdin when omitted.
    #[arg(long = "in", global = true, value_name = "FILE")]
    input: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long = "out", global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Worker threads for the adaptation traversal.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Seed for the numeric solver and the experiment generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format for equilibrium listings: json or text.
    #[arg(long, global = true, default_value = "json")]
    format: String,

    /// Residual tolerance of the numeric N-player solver.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,

    /// Support threshold for numeric-mode probabilities.
    #[arg(long = "support-eps", global = true, default_value_t = 1e-7)]
    support_eps: f64,

    /// Accept degenerate games (vertex equilibria only) instead of failing.
    #[arg(long = "allow-degenerate", global = true)]
    allow_degenerate: bool,

    /// Abort traversal beyond this many position sets.
    #[arg(long = "max-nodes", global = true, default_value_t = 1_000_000)]
    max_nodes: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Nash equilibria of a single normal-form game.
    Solve,
    /// Natural misinformed equilibria of a misinformation game.
    Nme,
    /// Canonicalize a misinformation game via the inflation process.
    Canonicalize,
    /// Inflate a game to a target shape, e.g. --target 3,3,1.
    Inflate {
        #[arg(long, value_name = "COUNTS")]
        target: String,
    },
    /// Run the adaptation procedure and report graph statistics.
    Adapt,
    /// Stable misinformed equilibria of a misinformation game.
    Sme,
    /// Follow one greedy adaptation path to a single stable equilibrium.
    OneSme,
    /// Monte Carlo experiment over random games; emits CSV.
    Experiment {
        /// Strategy counts of the random games, e.g. 2,2.
        #[arg(long, default_value = "2,2")]
        shape: String,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long = "payoff-min", default_value_t = -10)]
        payoff_min: i64,
        #[arg(long = "payoff-max", default_value_t = 10)]
        payoff_max: i64,
    },
    /// Adaptation graph in DOT format.
    ExportDot {
        /// Drop no-op edges and the nodes only they reach.
        #[arg(long)]
        loopless: bool,
    },
}

enum CliError {
    /// Computation failed (exit 1).
    Domain(misinfo_games::Error),
    /// Reading, parsing, or writing failed (exit 2).
    Io(String),
}

impl From<misinfo_games::Error> for CliError {
    fn from(e: misinfo_games::Error) -> Self {
        CliError::Domain(e)
    }
}

fn options(c: &Common) -> Options {
    Options {
        tol: c.tol,
        support_epsilon: c.support_eps,
        seed: c.seed,
        allow_degenerate: c.allow_degenerate,
        max_nodes: c.max_nodes,
        ..Options::default()
    }
}

fn read_input(c: &Common) -> Result<String, CliError> {
    match &c.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
            Ok(buf)
        }
    }
}

fn write_output(c: &Common, text: &str) -> Result<(), CliError> {
    match &c.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn parse_game(text: &str) -> Result<misinfo_games::NormalFormGame, CliError> {
    gjson::game_from_str(text).map_err(|e| CliError::Io(e.to_string()))
}

fn parse_misinfo(text: &str) -> Result<misinfo_games::MisinformationGame, CliError> {
    gjson::misinfo_from_str(text).map_err(|e| CliError::Io(e.to_string()))
}

fn parse_counts(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| CliError::Io(format!("bad strategy count {t:?}: {e}")))
        })
        .collect()
}

fn config_json(c: &Common) -> Value {
    json!({
        "threads": c.threads,
        "seed": c.seed,
        "tol": c.tol,
        "support_eps": c.support_eps,
        "allow_degenerate": c.allow_degenerate,
        "max_nodes": c.max_nodes,
    })
}

fn profiles_json(profiles: &[StrategyProfile]) -> Value {
    Value::Array(profiles.iter().map(gjson::profile_to_json).collect())
}

fn profiles_text(profiles: &[StrategyProfile]) -> String {
    let mut out = String::new();
    for (i, p) in profiles.iter().enumerate() {
        let players: Vec<String> = p
            .strategies
            .iter()
            .map(|m| {
                let probs: Vec<String> = m
                    .probs
                    .iter()
                    .map(misinfo_games::rational::format_rational)
                    .collect();
                format!("({})", probs.join(", "))
            })
            .collect();
        out.push_str(&format!("{}: {}\n", i + 1, players.join(" x ")));
    }
    out
}

/// A position set as nested arrays with 1-based strategy indices.
fn position_set_json(set: &PositionSet) -> Value {
    Value::Array(
        set.iter()
            .map(|v| Value::Array(v.iter().map(|&i| json!(i + 1)).collect()))
            .collect(),
    )
}

fn render_profiles(c: &Common, key: &str, profiles: &[StrategyProfile], extra: Value) -> String {
    if c.format == "text" {
        return profiles_text(profiles);
    }
    let mut obj = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": config_json(c),
        key: profiles_json(profiles),
    });
    if let (Some(map), Some(more)) = (obj.as_object_mut(), extra.as_object()) {
        for (k, v) in more {
            map.insert(k.clone(), v.clone());
        }
    }
    pretty(&obj)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("valid JSON");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let c = &cli.common;
    let opts = options(c);
    match &cli.command {
        Command::Solve => {
            let game = parse_game(&read_input(c)?)?;
            let set = all_nash(&game, &opts)?;
            if set.degenerate && !opts.allow_degenerate {
                return Err(misinfo_games::Error::DegenerateGame(
                    "input game".into(),
                )
                .into());
            }
            let extra = json!({
                "mode": match set.mode { SolveMode::Exact => "exact", SolveMode::Numeric => "numeric" },
                "degenerate": set.degenerate,
                "complete": set.complete,
            });
            write_output(c, &render_profiles(c, "equilibria", &set.profiles, extra))
        }
        Command::Nme => {
            let mg = parse_misinfo(&read_input(c)?)?;
            let (profiles, mode) = nme_with_mode(&mg, &opts)?;
            let extra = json!({
                "mode": match mode { SolveMode::Exact => "exact", SolveMode::Numeric => "numeric" },
            });
            write_output(c, &render_profiles(c, "nme", &profiles, extra))
        }
        Command::Canonicalize => {
            let mg = parse_misinfo(&read_input(c)?)?;
            let canonical = inflation_process(&mg)?;
            write_output(c, &gjson::misinfo_to_string(&canonical))
        }
        Command::Inflate { target } => {
            let game = parse_game(&read_input(c)?)?;
            let counts = parse_counts(target)?;
            let inflated = inflate_game(&game, &counts)?;
            write_output(c, &gjson::game_to_string(&inflated))
        }
        Command::Adapt => {
            let mg = parse_misinfo(&read_input(c)?)?;
            let result = parallel_traverse(&mg, &opts, c.threads)?;
            let smes = compute_sme(&result);
            let naive = naive_adaptation(&mg, &opts, mg.actual.num_cells() + 2)?;
            let report = json!({
                "version": env!("CARGO_PKG_VERSION"),
                "config": config_json(c),
                "lad": naive.lad,
                "unique_mgs": result.unique_mgs,
                "naive_nodes": naive.total_nodes,
                "leaves": result.leaves(),
                "smes": smes.len(),
                "terminal": Value::Array(
                    result.terminal.iter().map(position_set_json).collect()
                ),
                "sme_profiles": profiles_json(&smes),
            });
            write_output(c, &pretty(&report))
        }
        Command::Sme => {
            let mg = parse_misinfo(&read_input(c)?)?;
            let result = parallel_traverse(&mg, &opts, c.threads)?;
            let smes = compute_sme(&result);
            write_output(c, &render_profiles(c, "smes", &smes, json!({})))
        }
        Command::OneSme => {
            let mg = parse_misinfo(&read_input(c)?)?;
            let (profile, updates) = find_one_sme(&mg, &opts)?;
            let report = json!({
                "version": env!("CARGO_PKG_VERSION"),
                "config": config_json(c),
                "profile": gjson::profile_to_json(&profile),
                "updates": updates,
            });
            write_output(c, &pretty(&report))
        }
        Command::Experiment {
            shape,
            runs,
            payoff_min,
            payoff_max,
        } => {
            let counts = parse_counts(shape)?;
            let mut setting = Setting::new(counts, *runs, c.seed);
            setting.payoff_range = (*payoff_min, *payoff_max);
            setting.threads = c.threads;
            let summary = monte_carlo(&setting, &opts)?;
            write_output(c, &emit_csv(&summary))
        }
        Command::ExportDot { loopless } => {
            let mg = parse_misinfo(&read_input(c)?)?;
            let result = parallel_traverse(&mg, &opts, c.threads)?;
            write_output(c, &export_dot(&result, *loopless))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
