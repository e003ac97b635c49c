mod fuzz;

use clap::{Args, Parser, Subcommand};
use covdex::coloring::{find_coloring, ColoringError, DEFAULT_NODE_BUDGET};
use covdex::density::{codensity_within, gupta_bound_with_cap, DensityError, DEFAULT_ENUMERATION_CAP};
use covdex::graph::parse_edge_list;
use covdex::oracle::{brute_cover_index, verify_decomposition, OracleError, DEFAULT_COVER_EDGE_CAP};
use covdex::{decompose, DecomposeOptions, EdgeId, Multigraph};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const SEED_ENV: &str = "COVDEX_SEED";

#[derive(Parser)]
#[command(name = "covdex", version, about = "Edge-cover decompositions of multigraphs")]
struct Cli {
    /// Write a run report (command, input digest, parameters, outcome, payload) here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Indent JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Include wall-clock timings; output is no longer byte-stable.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Serialize)]
struct Limits {
    /// Largest vertex count for exhaustive odd-set enumeration.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    /// Node budget for the exact edge-coloring search.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Exact co-density with a minimizing odd set.
    Codensity {
        file: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Minimum degree, co-density and k = min{δ-1, floor(co-density)}.
    Bound {
        file: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Search for a proper edge coloring with the given number of colors.
    Color {
        file: PathBuf,
        #[arg(short = 'm', long)]
        colors: usize,
        #[command(flatten)]
        limits: Limits,
    },
    /// Construct k edge-disjoint edge covers.
    Decompose {
        file: PathBuf,
        /// Also write {"k", "covers"} to this file.
        #[arg(long)]
        json: Option<PathBuf>,
        /// On failure, write the pipeline state to this directory.
        #[arg(long)]
        dump_on_fail: Option<PathBuf>,
        #[command(flatten)]
        limits: Limits,
    },
    /// Exact cover index by exhaustive search.
    Xi {
        file: PathBuf,
        /// Largest edge count searched.
        #[arg(long, default_value_t = DEFAULT_COVER_EDGE_CAP)]
        edge_cap: usize,
    },
    /// Check that a covers file lists disjoint edge covers of a graph.
    Verify { file: PathBuf, covers: PathBuf },
    /// Run the pipeline and the oracles on seeded random multigraphs.
    Fuzz(fuzz::FuzzArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Ok,
    VerificationFailed,
    Usage,
    ResourceLimit,
    Candidate,
}

impl Outcome {
    fn code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::VerificationFailed => 1,
            Outcome::Usage => 2,
            Outcome::ResourceLimit => 3,
            Outcome::Candidate => 4,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Outcome::Ok => "ok",
            Outcome::Candidate => "counterexample-candidate",
            _ => "error",
        }
    }
}

/// What a command produced: the stdout payload, or an error object for
/// stderr. Both go into the run report.
struct Finished {
    outcome: Outcome,
    payload: Value,
}

impl Finished {
    fn ok(payload: Value) -> Self {
        Finished {
            outcome: Outcome::Ok,
            payload,
        }
    }

    fn error(outcome: Outcome, kind: &str, message: impl ToString) -> Self {
        Finished {
            outcome,
            payload: json!({ "error": kind, "message": message.to_string() }),
        }
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    command: &'a str,
    input_digest: String,
    parameters: Value,
    outcome: &'static str,
    payload: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<u128>,
}

#[derive(Deserialize)]
struct CoversFile {
    #[serde(default)]
    #[allow(dead_code)]
    k: Option<usize>,
    covers: Vec<Vec<EdgeId>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, digest, parameters, finished) = run(&cli);
    let print = |value: &Value| {
        if cli.pretty {
            serde_json::to_string_pretty(value)
        } else {
            serde_json::to_string(value)
        }
        .expect("JSON values serialize")
    };
    let failed = matches!(
        finished.outcome,
        Outcome::Usage | Outcome::ResourceLimit
    ) || finished.payload.get("error").is_some();
    if failed {
        eprintln!("{}", print(&finished.payload));
    } else {
        println!("{}", print(&finished.payload));
    }
    if let Some(path) = &cli.report {
        let report = RunReport {
            command: name,
            input_digest: digest,
            parameters,
            outcome: finished.outcome.label(),
            payload: &finished.payload,
            wall_time_ms: cli.timings.then(|| start.elapsed().as_millis()),
        };
        let text = print(&serde_json::to_value(report).expect("report serializes"));
        if let Err(e) = std::fs::write(path, text + "\n") {
            eprintln!("{}", json!({ "error": "io", "message": format!("{}: {e}", path.display()) }));
            return ExitCode::from(Outcome::Usage.code());
        }
    }
    ExitCode::from(finished.outcome.code())
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn load(path: &Path) -> Result<(Multigraph, String), Finished> {
    let bytes = std::fs::read(path)
        .map_err(|e| Finished::error(Outcome::Usage, "io", format!("{}: {e}", path.display())))?;
    let text = String::from_utf8_lossy(&bytes);
    let g = parse_edge_list(&text)
        .map_err(|e| Finished::error(Outcome::Usage, "parse", format!("{}: {e}", path.display())))?;
    Ok((g, sha256_hex(&bytes)))
}

fn density_failure(e: DensityError) -> Finished {
    match e {
        DensityError::TooLarge { .. } => Finished::error(Outcome::ResourceLimit, "too_large", e),
        _ => Finished::error(Outcome::VerificationFailed, "density", e),
    }
}

fn run(cli: &Cli) -> (&'static str, String, Value, Finished) {
    let timings = cli.timings;
    match &cli.command {
        Command::Codensity { file, limits } => with_graph("codensity", file, json!(limits), |g| {
            let within: Vec<_> = g.vertices().collect();
            match codensity_within(g, &within, limits.cap) {
                Ok((rho, witness)) => Finished::ok(json!({ "codensity": rho, "witness": witness })),
                Err(e) => density_failure(e),
            }
        }),
        Command::Bound { file, limits } => with_graph("bound", file, json!(limits), |g| {
            match gupta_bound_with_cap(g, limits.cap) {
                Ok(bound) => Finished::ok(json!(bound)),
                Err(e) => density_failure(e),
            }
        }),
        Command::Color { file, colors, limits } => {
            let params = json!({ "colors": colors, "cap": limits.cap, "budget": limits.budget });
            with_graph("color", file, params, |g| match find_coloring(g, *colors, limits.budget) {
                Ok(Some(c)) => Finished::ok(json!({
                    "status": "found",
                    "colors": colors,
                    "assignment": c.assignment(),
                })),
                Ok(None) => Finished::ok(json!({ "status": "impossible", "colors": colors })),
                Err(e @ ColoringError::BudgetExhausted { .. }) => Finished {
                    outcome: Outcome::ResourceLimit,
                    payload: json!({ "status": "budget", "colors": colors, "message": e.to_string() }),
                },
                Err(e) => Finished::error(Outcome::ResourceLimit, "palette", e),
            })
        }
        Command::Decompose {
            file,
            json: out,
            dump_on_fail,
            limits,
        } => with_graph("decompose", file, json!(limits), |g| {
            let options = DecomposeOptions {
                enumeration_cap: limits.cap,
                node_budget: limits.budget,
                special_step_cap: None,
                timings,
            };
            run_decompose(g, options, out.as_deref(), dump_on_fail.as_deref())
        }),
        Command::Xi { file, edge_cap } => with_graph("xi", file, json!({ "edge_cap": edge_cap }), |g| {
            match brute_cover_index(g, *edge_cap) {
                Ok(xi) => Finished::ok(json!({ "xi": xi })),
                Err(e @ OracleError::TooLarge { .. }) => Finished::error(Outcome::ResourceLimit, "too_large", e),
            }
        }),
        Command::Verify { file, covers } => {
            let cover_bytes = std::fs::read(covers);
            with_graph("verify", file, json!({ "covers": covers }), |g| {
                let bytes = match &cover_bytes {
                    Ok(b) => b,
                    Err(e) => return Finished::error(Outcome::Usage, "io", format!("{}: {e}", covers.display())),
                };
                let parsed: CoversFile = match serde_json::from_slice(bytes) {
                    Ok(p) => p,
                    Err(e) => return Finished::error(Outcome::Usage, "parse", format!("{}: {e}", covers.display())),
                };
                match verify_decomposition(g, &parsed.covers) {
                    Ok(()) => Finished::ok(json!({ "valid": true, "covers": parsed.covers.len() })),
                    Err(failure) => Finished {
                        outcome: Outcome::VerificationFailed,
                        payload: json!({
                            "valid": false,
                            "diagnostic": failure.to_string(),
                            "failure": failure,
                        }),
                    },
                }
            })
        }
        Command::Fuzz(args) => {
            let seed = match std::env::var(SEED_ENV) {
                Ok(text) => match text.trim().parse::<u64>() {
                    Ok(s) => s,
                    Err(e) => {
                        let f = Finished::error(Outcome::Usage, "usage", format!("{SEED_ENV}={text}: {e}"));
                        return ("fuzz", String::new(), Value::Null, f);
                    }
                },
                Err(_) => args.seed,
            };
            let params = args.parameters(seed);
            let digest = sha256_hex(params.to_string().as_bytes());
            let finished = fuzz::run(args, seed, timings);
            ("fuzz", digest, params, finished)
        }
    }
}

fn with_graph(
    name: &'static str,
    file: &Path,
    parameters: Value,
    body: impl FnOnce(&Multigraph) -> Finished,
) -> (&'static str, String, Value, Finished) {
    match load(file) {
        Ok((g, digest)) => (name, digest, parameters, body(&g)),
        Err(f) => (name, String::new(), parameters, f),
    }
}

fn run_decompose(g: &Multigraph, options: DecomposeOptions, out: Option<&Path>, dump: Option<&Path>) -> Finished {
    match decompose(g, options) {
        Ok(d) => {
            if let Some(path) = out {
                let text = json!({ "k": d.k, "covers": d.covers }).to_string();
                if let Err(e) = std::fs::write(path, text + "\n") {
                    return Finished::error(Outcome::Usage, "io", format!("{}: {e}", path.display()));
                }
            }
            Finished::ok(json!(d))
        }
        Err(report) => {
            if let Some(dir) = dump {
                let path = dir.join("failure.json");
                let written = std::fs::create_dir_all(dir).and_then(|_| {
                    std::fs::write(&path, serde_json::to_string_pretty(&*report).expect("report serializes"))
                });
                if let Err(e) = written {
                    return Finished::error(Outcome::Usage, "io", format!("{}: {e}", path.display()));
                }
            }
            let outcome = if report.resource_limit {
                Outcome::ResourceLimit
            } else if !report.hypotheses_held {
                Outcome::Candidate
            } else {
                Outcome::VerificationFailed
            };
            Finished {
                outcome,
                payload: json!({
                    "error": "decompose",
                    "stage": report.stage,
                    "message": report.message,
                    "hypotheses_held": report.hypotheses_held,
                    "resource_limit": report.resource_limit,
                }),
            }
        }
    }
}
