//! Text, record and DOT renderings of command results.

use std::io::IsTerminal;

use clap::ValueEnum;
use serde::Serialize;

use privcalc::encoding::{CoreProcess, CorrespondenceReport, Outcome};
use privcalc::policy::{render_path, Violation};
use privcalc::safety::ErrorFinding;
use privcalc::satisfaction::Verdict;
use privcalc::semantics::{state_hash, StateGraph};
use privcalc::syntax::render_system;
use privcalc::typing::Theta;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// One JSON object per line.
    Records,
    /// Graphviz; only `simulate` draws a graph, other commands print text.
    Dot,
}

pub struct Out {
    format: Format,
    color: bool,
}

fn color_enabled() -> bool {
    match std::env::var("PRIVCALC_COLOR").as_deref() {
        Ok("always") => true,
        Ok("never") => false,
        _ => std::io::stdout().is_terminal(),
    }
}

fn record<T: Serialize>(r: &T) {
    println!("{}", serde_json::to_string(r).expect("records serialize"));
}

#[derive(Serialize)]
struct ThetaRecord<'a> {
    record: &'static str,
    private_type: &'a str,
    path: String,
    perms: Vec<String>,
}

#[derive(Serialize)]
struct VerdictRecord {
    record: &'static str,
    satisfied: bool,
    witnesses: usize,
}

#[derive(Serialize)]
struct WitnessRecord<'a> {
    record: &'static str,
    private_type: &'a str,
    path: String,
    failure: String,
    policy_node: String,
}

#[derive(Serialize)]
struct StateRecord {
    record: &'static str,
    index: usize,
    hash: String,
    state: String,
}

#[derive(Serialize)]
struct EdgeRecord {
    record: &'static str,
    from: String,
    to: String,
    label: String,
}

#[derive(Serialize)]
struct FindingRecord<'a> {
    record: &'static str,
    state: &'a str,
    clause: u8,
    private_type: &'a str,
    path: String,
    permission: &'a str,
    subterm: &'a str,
}

#[derive(Serialize)]
struct SummaryRecord {
    record: &'static str,
    states: usize,
    truncated: bool,
    findings: usize,
}

#[derive(Serialize)]
struct ViolationRecord<'a> {
    record: &'static str,
    condition: u8,
    private_type: &'a str,
    path: String,
    message: &'a str,
}

#[derive(Serialize)]
struct TextRecord {
    record: &'static str,
    text: String,
}

#[derive(Serialize)]
struct ObligationRecord<'a> {
    record: &'static str,
    clause: String,
    outcome: String,
    subject: &'a str,
}

impl Out {
    pub fn new(format: Format) -> Self {
        Out {
            format,
            color: color_enabled(),
        }
    }

    fn paint(&self, s: &str, good: bool) -> String {
        if self.color {
            format!("\x1b[{}m{s}\x1b[0m", if good { 32 } else { 31 })
        } else {
            s.to_string()
        }
    }

    pub fn theta(&self, theta: &Theta) {
        match self.format {
            Format::Records => {
                for (t, th) in theta.iter() {
                    record(&ThetaRecord {
                        record: "theta",
                        private_type: t.as_str(),
                        path: render_path(&th.path),
                        perms: th.perms.iter().map(|p| p.to_string()).collect(),
                    });
                }
            }
            _ => {
                if !theta.is_empty() {
                    println!("{theta}");
                }
            }
        }
    }

    pub fn verdict(&self, v: &Verdict) {
        match self.format {
            Format::Records => {
                record(&VerdictRecord {
                    record: "verdict",
                    satisfied: v.satisfied,
                    witnesses: v.witnesses.len(),
                });
                for w in &v.witnesses {
                    record(&WitnessRecord {
                        record: "witness",
                        private_type: w.private_type.as_str(),
                        path: render_path(&w.path),
                        failure: w.failure.to_string(),
                        policy_node: render_path(&w.policy_node),
                    });
                }
            }
            _ => {
                let head = if v.satisfied {
                    "satisfied".to_string()
                } else {
                    format!("violated ({} witness(es))", v.witnesses.len())
                };
                println!("{}", self.paint(&head, v.satisfied));
                for w in &v.witnesses {
                    println!("  {w}");
                }
            }
        }
    }

    pub fn graph(&self, g: &StateGraph) {
        match self.format {
            Format::Dot => print!("{}", g.to_dot()),
            Format::Records => {
                for (i, n) in g.nodes.iter().enumerate() {
                    record(&StateRecord {
                        record: "state",
                        index: i,
                        hash: state_hash(n),
                        state: render_system(n),
                    });
                }
                for e in &g.edges {
                    record(&EdgeRecord {
                        record: "edge",
                        from: state_hash(&g.nodes[e.from]),
                        to: state_hash(&g.nodes[e.to]),
                        label: e.label.to_string(),
                    });
                }
            }
            Format::Text => {
                for n in &g.nodes {
                    println!("{}  {}", state_hash(n), render_system(n).replace('\n', " "));
                }
                print!("{}", g.trace());
                println!(
                    "{} state(s), {} edge(s){}",
                    g.nodes.len(),
                    g.edges.len(),
                    if g.truncated {
                        ", truncated at the depth bound"
                    } else {
                        ""
                    }
                );
            }
        }
    }

    pub fn findings(&self, rows: &[(String, ErrorFinding)], scan: Option<(usize, bool)>) {
        match self.format {
            Format::Records => {
                for (h, f) in rows {
                    record(&FindingRecord {
                        record: "finding",
                        state: h,
                        clause: f.clause,
                        private_type: f.private_type.as_str(),
                        path: render_path(&f.path),
                        permission: &f.permission,
                        subterm: &f.subterm,
                    });
                }
                if let Some((states, truncated)) = scan {
                    record(&SummaryRecord {
                        record: "summary",
                        states,
                        truncated,
                        findings: rows.len(),
                    });
                }
            }
            _ => {
                for (h, f) in rows {
                    println!("{h} {}", self.paint(&f.to_string(), false));
                }
                let tail = match scan {
                    Some((n, t)) => {
                        format!(" in {n} state(s){}", if t { " (truncated)" } else { "" })
                    }
                    None => String::new(),
                };
                let head = if rows.is_empty() {
                    "no error found".to_string()
                } else {
                    format!("{} finding(s)", rows.len())
                };
                println!("{}{tail}", self.paint(&head, rows.is_empty()));
            }
        }
    }

    pub fn encoded(&self, e: &CoreProcess) {
        match self.format {
            Format::Records => record(&TextRecord {
                record: "encoding",
                text: e.to_string(),
            }),
            _ => println!("{e}"),
        }
    }

    pub fn correspondence(&self, r: &CorrespondenceReport) {
        match self.format {
            Format::Records => {
                for o in &r.obligations {
                    record(&ObligationRecord {
                        record: "obligation",
                        clause: format!("{:?}", o.clause).to_lowercase(),
                        outcome: format!("{:?}", o.outcome).to_lowercase(),
                        subject: &o.subject,
                    });
                }
            }
            _ => {
                let good = r.obligations.iter().all(|o| o.outcome == Outcome::Holds);
                println!("{}", self.paint(&r.to_string(), good));
            }
        }
    }

    pub fn wellformed(&self, vs: &[Violation]) {
        match self.format {
            Format::Records => {
                for v in vs {
                    record(&ViolationRecord {
                        record: "violation",
                        condition: v.condition,
                        private_type: v.private_type.as_str(),
                        path: render_path(&v.path),
                        message: &v.message,
                    });
                }
            }
            _ => {
                if vs.is_empty() {
                    println!("{}", self.paint("well-formed", true));
                }
                for v in vs {
                    println!("{}", self.paint(&v.to_string(), false));
                }
            }
        }
    }
}
