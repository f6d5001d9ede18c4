//! Command-line front end: compile format files, render flowcharts, and
//! evaluate formats exactly or by Monte Carlo.
//!
//! Exit codes: 0 on success, 1 on validation or domain errors, 2 on usage
//! errors. Diagnostics go to standard error; data goes to standard output
//! (`--out` selects JSON or CSV). `render --dot FILE` additionally writes
//! the DOT text to a file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bracketforge::dsl;
use bracketforge::engine::{self, DEFAULT_STATE_CAP};
use bracketforge::metrics;
use bracketforge::types::{Format, PlacementDistribution, StrengthModel};
use bracketforge::{builder, flowchart, signatures, BracketSignature};

const STATE_CAP_ENV: &str = "BRACKETFORGE_STATE_CAP";

#[derive(Parser)]
#[command(
    name = "bracketforge",
    version,
    about = "Compile, analyze, and evaluate tournament formats"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, compile, and validate a format file
    Validate {
        /// Format file (.fmt)
        #[arg(long)]
        format: PathBuf,
    },
    /// Build the proper bracket for a signature as canonical format text
    Build {
        /// Per-round entrant counts, e.g. 8,0,0
        #[arg(long, value_delimiter = ',', required = true)]
        signature: Vec<u32>,
    },
    /// Render a format's flowchart as Graphviz DOT
    Render {
        #[arg(long)]
        format: PathBuf,
        /// Also write the DOT text to this file
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Exact placement distribution by full enumeration
    Enumerate {
        #[arg(long)]
        format: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Branch budget override (also settable via BRACKETFORGE_STATE_CAP)
        #[arg(long)]
        state_cap: Option<u64>,
        #[arg(long, value_enum, default_value_t = OutKind::Json)]
        out: OutKind,
    },
    /// Monte Carlo placement distribution
    Simulate {
        #[arg(long)]
        format: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Number of replications
        #[arg(long, required = true)]
        reps: u64,
        /// Master seed for the replication streams
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (the result is identical for any count)
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, value_enum, default_value_t = OutKind::Json)]
        out: OutKind,
    },
    /// Record profile of a full power-of-two Swiss event
    Swiss {
        #[arg(long, conflicts_with = "format", requires = "rounds")]
        teams: Option<u32>,
        #[arg(long)]
        rounds: Option<u32>,
        /// Read teams and rounds from a swiss policy file instead
        #[arg(long)]
        format: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutKind::Json)]
        out: OutKind,
    },
    /// Evaluate several same-sized formats side by side
    Compare {
        /// Format files; repeat the flag once per format
        #[arg(long = "format", required = true)]
        formats: Vec<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
        /// Estimate by Monte Carlo with this many replications instead of
        /// exact enumeration
        #[arg(long)]
        reps: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        state_cap: Option<u64>,
        #[arg(long, value_enum, default_value_t = OutKind::Json)]
        out: OutKind,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutKind {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Coin,
    Bt,
    Matrix,
}

#[derive(Args)]
struct ModelArgs {
    /// Strength model family
    #[arg(long, value_enum, default_value_t = ModelKind::Coin)]
    model: ModelKind,
    /// CSV of per-seed strengths (required for --model bt)
    #[arg(long)]
    strengths: Option<PathBuf>,
    /// CSV of pairwise win probabilities (required for --model matrix)
    #[arg(long)]
    matrix: Option<PathBuf>,
}

type CliError = Box<dyn std::error::Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { format } => {
            let compiled = load_format(&format)?;
            if let Format::Static(mb) = &compiled.format {
                let report = flowchart::validate(mb);
                if !report.ok() {
                    return Err(format!("{report}").into());
                }
            }
            println!("ok");
            Ok(())
        }
        Command::Build { signature } => {
            let sig = BracketSignature::new(signature.clone())?;
            let mb = builder::build_proper_bracket(&sig);
            let name: Vec<String> = signature.iter().map(u32::to_string).collect();
            print!(
                "{}",
                dsl::emit_multibracket(&format!("proper-{}", name.join("-")), &mb)
            );
            Ok(())
        }
        Command::Render { format, dot } => {
            let compiled = load_format(&format)?;
            let Format::Static(mb) = &compiled.format else {
                return Err("dynamic policies have no static flowchart to render".into());
            };
            let text = flowchart::to_dot(mb);
            if let Some(path) = dot {
                std::fs::write(&path, &text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            } else {
                print!("{text}");
            }
            Ok(())
        }
        Command::Enumerate {
            format,
            model,
            state_cap,
            out,
        } => {
            let compiled = load_format(&format)?;
            let model = load_model(&model)?;
            let cap = resolve_state_cap(state_cap)?;
            let dist = engine::enumerate_exact(&compiled.format, &model.model, cap)?;
            emit_distribution(&compiled, &model, &dist, "exact", out);
            Ok(())
        }
        Command::Simulate {
            format,
            model,
            reps,
            seed,
            workers,
            out,
        } => {
            let compiled = load_format(&format)?;
            let model = load_model(&model)?;
            let dist = engine::simulate(&compiled.format, &model.model, reps, seed, workers)?;
            emit_distribution(&compiled, &model, &dist, "mc", out);
            Ok(())
        }
        Command::Swiss {
            teams,
            rounds,
            format,
            out,
        } => {
            let (teams, rounds) = match (teams, rounds, format) {
                (Some(t), Some(r), None) => (t, r),
                (None, None, Some(path)) => {
                    let compiled = load_format(&path)?;
                    match compiled.format {
                        Format::Dynamic(bracketforge::DynamicPolicy::Swiss {
                            team_count,
                            rounds,
                            ..
                        }) => (team_count, rounds),
                        _ => return Err("file does not declare a swiss policy".into()),
                    }
                }
                _ => return Err("pass either --teams with --rounds, or --format".into()),
            };
            let profile = signatures::swiss_record_profile(teams, rounds)?;
            match out {
                OutKind::Json => {
                    #[derive(Serialize)]
                    struct Row {
                        wins: u32,
                        losses: u32,
                        count: u64,
                    }
                    #[derive(Serialize)]
                    struct Output {
                        teams: u32,
                        rounds: u32,
                        profile: Vec<Row>,
                    }
                    let output = Output {
                        teams,
                        rounds,
                        profile: profile
                            .iter()
                            .map(|&(rec, count)| Row {
                                wins: rec.wins,
                                losses: rec.losses,
                                count,
                            })
                            .collect(),
                    };
                    println!("{}", serde_json::to_string_pretty(&output).unwrap());
                }
                OutKind::Csv => {
                    let mut text = String::from("wins,losses,count\n");
                    for (rec, count) in &profile {
                        let _ = writeln!(text, "{},{},{count}", rec.wins, rec.losses);
                    }
                    print!("{text}");
                }
            }
            Ok(())
        }
        Command::Compare {
            formats,
            model,
            reps,
            seed,
            workers,
            state_cap,
            out,
        } => {
            let model = load_model(&model)?;
            let cap = resolve_state_cap(state_cap)?;
            let mut results = Vec::new();
            for path in &formats {
                let compiled = load_format(path)?;
                let dist = match reps {
                    Some(r) => engine::simulate(&compiled.format, &model.model, r, seed, workers)?,
                    None => engine::enumerate_exact(&compiled.format, &model.model, cap)?,
                };
                results.push((compiled.name.clone(), dist));
            }
            let report = metrics::compare_formats(&results)?;
            let method = if reps.is_some() { "mc" } else { "exact" };
            match out {
                OutKind::Json => {
                    #[derive(Serialize)]
                    struct Entry<'a> {
                        format: &'a str,
                        top_seed_win_probability: f64,
                        dominance_violations: u32,
                        expected_total_matches: f64,
                    }
                    #[derive(Serialize)]
                    struct Output<'a> {
                        team_count: u32,
                        model: &'a str,
                        method: &'a str,
                        entries: Vec<Entry<'a>>,
                    }
                    let output = Output {
                        team_count: report.team_count,
                        model: model.name,
                        method,
                        entries: report
                            .entries
                            .iter()
                            .map(|e| Entry {
                                format: &e.name,
                                top_seed_win_probability: e.top_seed_win_probability,
                                dominance_violations: e.dominance_violations,
                                expected_total_matches: e.expected_total_matches,
                            })
                            .collect(),
                    };
                    println!("{}", serde_json::to_string_pretty(&output).unwrap());
                }
                OutKind::Csv => {
                    let mut text = String::from(
                        "format,top_seed_win_probability,dominance_violations,expected_total_matches\n",
                    );
                    for e in &report.entries {
                        let _ = writeln!(
                            text,
                            "{},{},{},{}",
                            e.name,
                            e.top_seed_win_probability,
                            e.dominance_violations,
                            e.expected_total_matches
                        );
                    }
                    print!("{text}");
                }
            }
            Ok(())
        }
    }
}

fn load_format(path: &Path) -> Result<dsl::Compiled, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let ast = dsl::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    dsl::compile(&ast).map_err(|e| format!("{}: {e}", path.display()).into())
}

struct LoadedModel {
    model: StrengthModel,
    name: &'static str,
}

fn load_model(args: &ModelArgs) -> Result<LoadedModel, CliError> {
    match args.model {
        ModelKind::Coin => Ok(LoadedModel {
            model: StrengthModel::coin(),
            name: "coin",
        }),
        ModelKind::Bt => {
            let path = args
                .strengths
                .as_ref()
                .ok_or("--model bt requires --strengths FILE")?;
            let values = read_numbers(path)?;
            Ok(LoadedModel {
                model: StrengthModel::bradley_terry(values.into_iter().flatten().collect())?,
                name: "bt",
            })
        }
        ModelKind::Matrix => {
            let path = args
                .matrix
                .as_ref()
                .ok_or("--model matrix requires --matrix FILE")?;
            let rows = read_numbers(path)?;
            Ok(LoadedModel {
                model: StrengthModel::matrix(rows)?,
                name: "matrix",
            })
        }
    }
}

/// Reads a CSV of numbers, one row per line; a single leading header line
/// is tolerated and skipped.
fn read_numbers(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line
            .split(',')
            .map(|cell| cell.trim().parse::<f64>())
            .collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(e) if i == 0 => {
                // header line
                let _ = e;
            }
            Err(e) => {
                return Err(format!("{}:{}: {e}", path.display(), i + 1).into());
            }
        }
    }
    if rows.is_empty() {
        return Err(format!("{}: no numeric rows", path.display()).into());
    }
    Ok(rows)
}

fn resolve_state_cap(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var(STATE_CAP_ENV) {
        Ok(value) => value
            .parse::<u64>()
            .map_err(|_| format!("{STATE_CAP_ENV} must be an integer, got `{value}`").into()),
        Err(_) => Ok(DEFAULT_STATE_CAP),
    }
}

#[derive(Serialize)]
struct DistributionOutput<'a> {
    format: &'a str,
    team_count: u32,
    model: &'a str,
    method: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reps: Option<u64>,
    /// Row-major [seed][place] probabilities.
    #[serde(rename = "D")]
    d: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stderr: Option<Vec<f64>>,
    expected_matches: &'a [f64],
    total_matches: f64,
}

fn emit_distribution(
    compiled: &dsl::Compiled,
    model: &LoadedModel,
    dist: &PlacementDistribution,
    method: &str,
    out: OutKind,
) {
    match out {
        OutKind::Json => {
            let output = DistributionOutput {
                format: &compiled.name,
                team_count: dist.team_count(),
                model: model.name,
                method,
                reps: dist.reps,
                d: dist.d.iter().flatten().copied().collect(),
                stderr: dist
                    .std_err
                    .as_ref()
                    .map(|rows| rows.iter().flatten().copied().collect()),
                expected_matches: &dist.expected_matches,
                total_matches: dist.total_matches,
            };
            println!("{}", serde_json::to_string_pretty(&output).unwrap());
        }
        OutKind::Csv => {
            let mut text = String::new();
            text.push_str(if dist.std_err.is_some() {
                "seed,place,prob,stderr\n"
            } else {
                "seed,place,prob\n"
            });
            for (s, row) in dist.d.iter().enumerate() {
                for (p, &prob) in row.iter().enumerate() {
                    match &dist.std_err {
                        Some(se) => {
                            let _ = writeln!(text, "{},{},{},{}", s + 1, p + 1, prob, se[s][p]);
                        }
                        None => {
                            let _ = writeln!(text, "{},{},{}", s + 1, p + 1, prob);
                        }
                    }
                }
            }
            print!("{text}");
        }
    }
}
