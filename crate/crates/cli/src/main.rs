//! `privcalc` command-line front end.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use privcalc::encoding::{check_correspondence, encode};
use privcalc::policy::{check_wellformed, Policy};
use privcalc::safety::{detect_errors, safety_scan, SafetyOptions};
use privcalc::satisfaction::{verify, Coverage, VerifyOptions};
use privcalc::semantics::{explore, state_hash};
use privcalc::syntax::{parse_env, parse_policy, parse_process, parse_system, Diagnostic};
use privcalc::typing::{type_system_with, Gamma, IdDirection, Options};

use output::{Format, Out};

#[derive(Parser)]
#[command(name = "privcalc", version, about = "Privacy calculus workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Anonymous,
    Known,
}

#[derive(Args)]
struct Common {
    /// Typing environment (.env).
    #[arg(long)]
    env: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "anonymous")]
    id_direction: Direction,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Infer the permission interface of a system.
    Typecheck {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Type a system and check its interface against a policy.
    Verify {
        file: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        /// Report interface types the policy does not bind.
        #[arg(long)]
        strict_coverage: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Explore the τ transitions of a system.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Static error detection on the initial state.
    Errors {
        file: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        countlink_literal: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Error detection on every state reachable within `--depth` steps.
    Scan {
        file: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long)]
        countlink_literal: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Translate a process into the π-calculus with select/branch.
    Encode {
        file: PathBuf,
        /// Also check operational correspondence with this search bound.
        #[arg(long)]
        check: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check the well-formedness conditions of a policy.
    PolicyWf {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Exit status 2: unreadable input, parse or type failure.
struct Failure(String);

impl Failure {
    fn diagnostic(path: &Path, d: &Diagnostic) -> Self {
        let mut msg = format!("{}:{d}", path.display());
        if let Some(h) = &d.hint {
            msg.push_str(&format!("\n  hint: {h}"));
        }
        Failure(msg)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load<T>(path: &Path, parse: fn(&str) -> Result<T, Diagnostic>) -> Result<T, Failure> {
    parse(&read(path)?).map_err(|d| Failure::diagnostic(path, &d))
}

fn load_env(path: Option<&Path>) -> Result<Gamma, Failure> {
    match path {
        Some(p) => load(p, parse_env),
        None => Ok(Gamma::new()),
    }
}

fn options(common: &Common) -> Options {
    Options {
        id_direction: match common.id_direction {
            Direction::Anonymous => IdDirection::Anonymous,
            Direction::Known => IdDirection::Known,
        },
    }
}

fn safety_options(common: &Common, countlink_literal: bool) -> SafetyOptions {
    SafetyOptions {
        typing: options(common),
        countlink_literal,
    }
}

fn load_policy(path: &Path) -> Result<Policy, Failure> {
    load(path, parse_policy)
}

fn run(cmd: Command) -> Result<bool, Failure> {
    match cmd {
        Command::Typecheck { file, common } => {
            let gamma = load_env(common.env.as_deref())?;
            let s = load(&file, parse_system)?;
            let typed = type_system_with(&gamma, &s, options(&common))
                .map_err(|e| Failure(format!("type error: {e}")))?;
            Out::new(common.format).theta(&typed.theta.sorted());
            Ok(true)
        }
        Command::Verify {
            file,
            policy,
            strict_coverage,
            common,
        } => {
            let gamma = load_env(common.env.as_deref())?;
            let p = load_policy(&policy)?;
            let s = load(&file, parse_system)?;
            let opts = VerifyOptions {
                typing: options(&common),
                coverage: if strict_coverage {
                    Coverage::Strict
                } else {
                    Coverage::Ignore
                },
            };
            let (_, verdict) =
                verify(&p, &gamma, &s, opts).map_err(|e| Failure(format!("type error: {e}")))?;
            Out::new(common.format).verdict(&verdict);
            Ok(verdict.satisfied)
        }
        Command::Simulate {
            file,
            depth,
            format,
        } => {
            let s = load(&file, parse_system)?;
            let g = explore(&s, depth);
            Out::new(format).graph(&g);
            Ok(true)
        }
        Command::Errors {
            file,
            policy,
            countlink_literal,
            common,
        } => {
            let gamma = load_env(common.env.as_deref())?;
            let p = load_policy(&policy)?;
            let s = load(&file, parse_system)?;
            let found = detect_errors(&p, &gamma, &s, safety_options(&common, countlink_literal));
            let h = state_hash(&privcalc::kernel::normalize_system(&s));
            let rows: Vec<_> = found.into_iter().map(|f| (h.clone(), f)).collect();
            Out::new(common.format).findings(&rows, None);
            Ok(rows.is_empty())
        }
        Command::Scan {
            file,
            policy,
            depth,
            countlink_literal,
            common,
        } => {
            let gamma = load_env(common.env.as_deref())?;
            let p = load_policy(&policy)?;
            let s = load(&file, parse_system)?;
            let report = safety_scan(
                &p,
                &gamma,
                &s,
                depth,
                safety_options(&common, countlink_literal),
            );
            Out::new(common.format)
                .findings(&report.findings, Some((report.states, report.truncated)));
            Ok(report.safe())
        }
        Command::Encode {
            file,
            check,
            format,
        } => {
            let p = load(&file, parse_process)?;
            let e = encode(&p).map_err(|e| Failure(e.to_string()))?;
            let out = Out::new(format);
            out.encoded(&e);
            match check {
                Some(bound) => {
                    let report =
                        check_correspondence(&p, bound).map_err(|e| Failure(e.to_string()))?;
                    out.correspondence(&report);
                    Ok(report.holds())
                }
                None => Ok(true),
            }
        }
        Command::PolicyWf { file, format } => {
            let p = load_policy(&file)?;
            let violations = check_wellformed(&p);
            Out::new(format).wellformed(&violations);
            Ok(violations.is_empty())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
