use std::collections::HashMap;
use std::fmt::Write;

use sha2::{Digest, Sha256};

use super::{tau_steps, Comm, Label};
use crate::kernel::{normalize_system, System, Term};
use crate::syntax::render_system;
use crate::typing::{type_system_with, Gamma, GammaKey, Options, Theta, Type};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Label,
    pub comm: Option<Comm>,
}

#[derive(Clone, Debug)]
pub struct StateGraph {
    /// Canonical (normalized) states; index 0 is the root.
    pub nodes: Vec<System>,
    pub edges: Vec<Edge>,
    pub root: usize,
    /// Nodes at the depth bound that still have successors.
    pub frontier: Vec<usize>,
    pub depth: usize,
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct ExploreOptions {
    pub depth: usize,
    /// Hard cap on the number of states.
    pub max_states: usize,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            depth: 6,
            max_states: 20_000,
        }
    }
}

/// First 12 hex digits of the SHA-256 of the rendered state.
pub fn state_hash(s: &System) -> String {
    let digest = Sha256::digest(render_system(s).as_bytes());
    hex::encode(&digest[..6])
}

pub fn explore(s: &System, depth: usize) -> StateGraph {
    explore_with(
        s,
        ExploreOptions {
            depth,
            ..ExploreOptions::default()
        },
    )
}

/// Breadth-first τ exploration over canonical states.
pub fn explore_with(s: &System, opts: ExploreOptions) -> StateGraph {
    let root = normalize_system(s);
    let mut index: HashMap<System, usize> = HashMap::from([(root.clone(), 0)]);
    let mut g = StateGraph {
        nodes: vec![root],
        edges: Vec::new(),
        root: 0,
        frontier: Vec::new(),
        depth: opts.depth,
        truncated: false,
    };
    let mut level = vec![0usize];
    for _ in 0..opts.depth {
        let mut next = Vec::new();
        for &from in &level {
            let state = g.nodes[from].clone();
            for st in tau_steps(&state) {
                let n = normalize_system(&st.next);
                let to = match index.get(&n) {
                    Some(&i) => i,
                    None => {
                        if g.nodes.len() >= opts.max_states {
                            g.truncated = true;
                            continue;
                        }
                        let i = g.nodes.len();
                        index.insert(n.clone(), i);
                        g.nodes.push(n);
                        next.push(i);
                        i
                    }
                };
                let edge = Edge {
                    from,
                    to,
                    label: st.label,
                    comm: st.comm,
                };
                if !g
                    .edges
                    .iter()
                    .any(|e| e.from == from && e.to == to && e.comm == edge.comm)
                {
                    g.edges.push(edge);
                }
            }
        }
        level = next;
        if level.is_empty() {
            break;
        }
    }
    g.frontier = level
        .into_iter()
        .filter(|&i| !tau_steps(&g.nodes[i]).is_empty())
        .collect();
    g.truncated |= !g.frontier.is_empty();
    g
}

impl StateGraph {
    /// One line per edge: `HASH --label--> HASH`.
    pub fn trace(&self) -> String {
        let hashes: Vec<String> = self.nodes.iter().map(state_hash).collect();
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(out, "{} --{}--> {}", hashes[e.from], e.label, hashes[e.to]);
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph states {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let text = render_system(n).replace('\\', "\\\\").replace('"', "\\\"");
            let _ = writeln!(out, "  s{i} [label=\"{}\\n{}\"];", state_hash(n), text);
        }
        for e in &self.edges {
            let label = match &e.comm {
                Some(c) => format!("tau {}", c.subject),
                None => e.label.to_string(),
            };
            let _ = writeln!(out, "  s{} -> s{} [label=\"{label}\"];", e.from, e.to);
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug)]
pub struct PreservationViolation {
    pub from: String,
    pub to: String,
    pub before: Theta,
    pub after: Option<Theta>,
    /// Set when the successor does not type.
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct PreservationReport {
    pub nodes: usize,
    pub edges_checked: usize,
    pub truncated: bool,
    pub violations: Vec<PreservationViolation>,
}

impl PreservationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Γ extended with the private values carried by τ steps, typed by the
/// payload of the channel they travelled on.
fn extend_gamma(gamma: &mut Gamma, comm: &Comm) {
    let subject = match &comm.subject_type {
        Some(t) => Some(gamma.resolve(t)),
        None => gamma.name(&comm.subject),
    };
    let Some(Type::Chan { payload, .. }) = subject else {
        return;
    };
    for (v, ty) in comm.values.iter().zip(&payload) {
        if let (Term::Private(pd), Type::Private { .. }) = (v, ty) {
            gamma.set(GammaKey::Data(pd.clone()), ty);
        }
    }
}

/// Θ′ ≼ Θ on every edge of `explore(s, depth)`.
pub fn check_preservation(
    gamma: &Gamma,
    s: &System,
    depth: usize,
    opts: Options,
) -> PreservationReport {
    check_graph(gamma, &explore(s, depth), opts)
}

/// Γ extended with every private value received along the edges of `g`.
pub fn extended_gamma(gamma: &Gamma, g: &StateGraph) -> Gamma {
    let mut gamma = gamma.clone();
    for e in &g.edges {
        if let Some(c) = &e.comm {
            extend_gamma(&mut gamma, c);
        }
    }
    gamma
}

pub fn check_graph(gamma: &Gamma, g: &StateGraph, opts: Options) -> PreservationReport {
    let gamma = extended_gamma(gamma, g);
    let typed: Vec<Result<Theta, String>> = g
        .nodes
        .iter()
        .map(|n| {
            type_system_with(&gamma, n, opts)
                .map(|t| t.theta)
                .map_err(|e| e.to_string())
        })
        .collect();
    let mut report = PreservationReport {
        nodes: g.nodes.len(),
        truncated: g.truncated,
        ..PreservationReport::default()
    };
    for e in &g.edges {
        let Ok(before) = &typed[e.from] else {
            continue;
        };
        report.edges_checked += 1;
        let bad = match &typed[e.to] {
            Ok(after) if after.leq(before) => None,
            Ok(after) => Some((Some(after.clone()), None)),
            Err(err) => Some((None, Some(err.clone()))),
        };
        if let Some((after, error)) = bad {
            report.violations.push(PreservationViolation {
                from: state_hash(&g.nodes[e.from]),
                to: state_hash(&g.nodes[e.to]),
                before: before.clone(),
                after,
                error,
            });
        }
    }
    report
}
