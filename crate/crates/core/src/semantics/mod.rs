//! Labelled transitions, bounded exploration and the preservation harness.

mod explore;
mod step;

use std::collections::BTreeSet;
use std::fmt;

use crate::kernel::{PrivacyType, PrivateData, Process, Sym, System, Term};

pub use explore::{
    check_graph, check_preservation, explore, explore_with, extended_gamma, state_hash, Edge,
    ExploreOptions, PreservationReport, PreservationViolation, StateGraph,
};
pub use step::eval_condition;

/// Which actions may synchronise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// References talk only to their store endpoint.
    Privacy,
    /// Every name is a plain channel; select/branch synchronise.
    Core,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Out {
        subject: Term,
        objects: Vec<Term>,
        extruded: BTreeSet<Sym>,
    },
    Inp {
        subject: Term,
        objects: Vec<Term>,
    },
    Tau,
}

fn list(ts: &[Term]) -> String {
    ts.iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Out {
                subject,
                objects,
                extruded,
            } => {
                if !extruded.is_empty() {
                    let ns: Vec<&str> = extruded.iter().map(|n| n.as_str()).collect();
                    write!(f, "(new {}) ", ns.join(", "))?;
                }
                write!(f, "{subject}!<{}>", list(objects))
            }
            Label::Inp { subject, objects } => write!(f, "{subject}?({})", list(objects)),
            Label::Tau => write!(f, "tau"),
        }
    }
}

/// The communication behind a τ step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comm {
    pub subject: Sym,
    /// Annotation of the subject when it is a restricted name.
    pub subject_type: Option<PrivacyType>,
    /// Values as received by the input side.
    pub values: Vec<Term>,
    /// The two dual labels that synchronised.
    pub pair: (Label, Label),
}

#[derive(Clone, Debug)]
pub struct Step<T> {
    pub label: Label,
    pub next: T,
    pub comm: Option<Comm>,
}

fn anon_of(full: &PrivateData, anon: &PrivateData) -> bool {
    matches!(full.identity, crate::kernel::Identity::Known(_))
        && anon.identity == crate::kernel::Identity::Hidden
        && full.data == anon.data
}

fn dual_once(l1: &Label, l2: &Label) -> bool {
    let (
        Label::Out {
            subject: s1,
            objects: v1,
            ..
        },
        Label::Inp {
            subject: s2,
            objects: v2,
        },
    ) = (l1, l2)
    else {
        return false;
    };
    match (s1, s2) {
        (Term::Name(a), Term::Name(b)) => a == b && v1 == v2,
        (Term::Dual(r), Term::Name(q)) | (Term::Name(r), Term::Dual(q)) if r == q => {
            if v1 == v2 {
                return true;
            }
            match (v1.as_slice(), v2.as_slice()) {
                ([Term::Private(a)], [Term::Private(b)]) => {
                    if matches!(s1, Term::Dual(_)) {
                        anon_of(a, b)
                    } else {
                        anon_of(b, a)
                    }
                }
                _ => false,
            }
        }
        _ => false,
    }
}

/// The symmetric duality relation on labels.
pub fn dual(l1: &Label, l2: &Label) -> bool {
    dual_once(l1, l2) || dual_once(l2, l1)
}

/// Immediate transitions of a system. Input labels are instantiated with
/// tuples drawn from `universe`.
pub fn labels(s: &System, universe: &[Term]) -> Vec<Step<System>> {
    step::system_labels(s, universe)
}

pub fn process_labels(p: &Process, universe: &[Term]) -> Vec<Step<Process>> {
    step::process_labels(p, universe)
}

/// τ successors of a system.
pub fn tau_steps(s: &System) -> Vec<Step<System>> {
    step::system_taus(s, Mode::Privacy)
}

pub fn process_tau_steps(p: &Process, mode: Mode) -> Vec<Step<Process>> {
    step::process_taus(p, mode)
}
