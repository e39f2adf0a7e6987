//! `birkhoff`: command-line front end for the quasigroup identity workbench.
//!
//! Exit codes: 0 on success, 1 on a negative mathematical outcome that was
//! asked to be flagged (`find --expect-found`, a rejected proof), 2 on usage
//! or input errors.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use birkhoff_core::classification::{classify_all, ClassifyParams};
use birkhoff_core::derivations::{builtin, builtin_derivations, verify_derivation, Derivation};
use birkhoff_core::identities::{satisfied_identities, Identity, IdentitySet, Tag};
use birkhoff_core::model_search::{count_models, find_model, Outcome, SearchQuery};
use birkhoff_core::witness::{self, check_witness};
use birkhoff_core::FiniteAlgebra;
use clap::{ArgGroup, Parser, Subcommand};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "birkhoff", version, about = "Check, search, prove and classify identity sets for quasigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report which of the six identities hold in an algebra.
    Check {
        /// Algebra JSON file, or `-` for standard input.
        #[arg(long)]
        algebra: PathBuf,
    },
    /// Search for an algebra satisfying TAGS and violating one identity.
    Find {
        /// Identities to satisfy, as tag letters, e.g. `ACB` (`-` for none).
        #[arg(long)]
        satisfy: String,
        /// Tag letter, or an identity such as `(x*y) = (y*x)`.
        #[arg(long)]
        violate: Option<String>,
        #[arg(long)]
        order: usize,
        /// Wall-clock budget in milliseconds.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        /// Exit with status 1 unless a model is found.
        #[arg(long)]
        expect_found: bool,
        #[arg(long)]
        json: bool,
    },
    /// Count labelled algebras of the given order satisfying TAGS.
    Count {
        #[arg(long)]
        satisfy: String,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        json: bool,
    },
    /// Classify all 64 subsets of the six identities.
    Classify {
        #[arg(long, default_value_t = 4)]
        max_order: usize,
        /// Budget per search in milliseconds.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        /// Also write the JSON report to this file.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Verify a builtin derivation (or `all`) or a derivation file.
    #[command(group(ArgGroup::new("source").required(true).args(["builtin", "file"])))]
    Prove {
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check an integer witness on a finite window.
    Example {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 100)]
        window: i64,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

/// Accepts a bare algebra or any object embedding one under `"algebra"`
/// (such as `find --json` output).
fn parse_algebra(text: &str) -> Result<FiniteAlgebra> {
    let mut value: serde_json::Value = serde_json::from_str(text).context("malformed JSON")?;
    if let Some(inner) = value.get_mut("algebra") {
        value = inner.take();
    }
    serde_json::from_value(value).context("invalid algebra")
}

fn parse_tags(s: &str) -> Result<IdentitySet> {
    IdentitySet::parse_letters(s).map_err(Into::into)
}

fn parse_violation(s: &str) -> Result<Identity> {
    if s.contains('=') {
        return Ok(s.parse()?);
    }
    let tag: Tag = s.parse()?;
    Ok(Identity::canonical(tag))
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Check { algebra } => {
            let alg = parse_algebra(&read_input(&algebra)?)?;
            print_json(&json!({ "satisfied": satisfied_identities(&alg) }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Find { satisfy, violate, order, budget, expect_found, json } => {
            let violate = violate.as_deref().map(parse_violation).transpose()?;
            let q = SearchQuery::new(parse_tags(&satisfy)?, violate, order, Duration::from_millis(budget));
            let result = find_model(&q)?;
            if json {
                print_json(&result)?;
            } else {
                match &result.outcome {
                    Outcome::Found { algebra } => {
                        println!("FOUND order {} ({} nodes)", algebra.order(), result.stats.nodes);
                        for (name, t) in [("mul", algebra.mul()), ("ldiv", algebra.ldiv()), ("rdiv", algebra.rdiv())] {
                            println!("{name}:");
                            for row in t.rows() {
                                let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
                                println!("  {}", cells.join(" "));
                            }
                        }
                    }
                    Outcome::Exhausted => println!("EXHAUSTED ({} nodes)", result.stats.nodes),
                    Outcome::Timeout => println!("TIMEOUT ({} nodes)", result.stats.nodes),
                }
            }
            let found = matches!(result.outcome, Outcome::Found { .. });
            Ok(if expect_found && !found { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Command::Count { satisfy, order, json } => {
            let set = parse_tags(&satisfy)?;
            let count = count_models(set, order)?;
            if json {
                print_json(&json!({ "satisfy": set, "order": order, "count": count }))?;
            } else {
                println!("{count}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { max_order, budget, json } => {
            let report = classify_all(ClassifyParams { max_order, budget_ms: budget })?;
            println!("{report}");
            if let Some(path) = json {
                fs::write(&path, report.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Prove { builtin: name, file, json } => {
            let derivations: Vec<Derivation> = match (name, file) {
                (Some(n), _) if n == "all" => builtin_derivations(),
                (Some(n), _) => match builtin(&n) {
                    Some(d) => vec![d],
                    None => {
                        let known: Vec<String> = builtin_derivations().into_iter().map(|d| d.name).collect();
                        bail!("unknown builtin derivation `{n}` (known: {}, all)", known.join(", "));
                    }
                },
                (None, Some(path)) => {
                    let text = read_input(&path)?;
                    vec![Derivation::from_json(&text).context("invalid derivation JSON")?]
                }
                (None, None) => unreachable!("clap requires one source"),
            };
            let mut all_ok = true;
            for d in &derivations {
                let verdict = verify_derivation(d);
                all_ok &= verdict.is_ok();
                if json {
                    print_json(&json!({
                        "name": d.name,
                        "premises": d.premises,
                        "goal": d.goal,
                        "verdict": if verdict.is_ok() { "VERIFIED" } else { "REJECTED" },
                        "steps": d.proof_length(),
                        "error": verdict.as_ref().err().map(ToString::to_string),
                    }))?;
                } else {
                    match verdict {
                        Ok(()) => println!("VERIFIED: {d} ({} steps)", d.proof_length()),
                        Err(e) => println!("REJECTED: {d}: {e}"),
                    }
                }
            }
            Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Example { name, window, json } => {
            if window < 0 {
                bail!("window must be non-negative");
            }
            let Some(w) = witness::lookup(&name) else {
                bail!("unknown witness `{name}`");
            };
            let report = check_witness(&w, window);
            if json {
                print_json(&report)?;
            } else {
                print!("{report}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
