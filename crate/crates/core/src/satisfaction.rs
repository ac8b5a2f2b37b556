//! Policy satisfaction `P ⊩ Θ` and the end-to-end verdict.

use std::fmt;

use crate::kernel::{Sym, System};
use crate::policy::{render_path, FlatHierarchy, Hierarchy, PermSet, Permission, Policy};
use crate::typing::{type_system_with, Gamma, Options, Theta, TypeError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Coverage {
    /// Θ entries for types the policy does not bind are skipped.
    #[default]
    Ignore,
    /// ... or reported.
    Strict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    /// A permission not granted along the path.
    Permission(Permission),
    /// The path leaves the policy hierarchy at this group.
    MissingGroup(Sym),
    /// The type is not bound by the policy (strict coverage only).
    Uncovered,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Permission(p) => write!(f, "{p}"),
            Failure::MissingGroup(g) => write!(f, "group {g}"),
            Failure::Uncovered => write!(f, "uncovered type"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub private_type: Sym,
    pub path: Vec<Sym>,
    pub failure: Failure,
    /// Deepest policy node reached along `path`.
    pub policy_node: Vec<Sym>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} exercises {} (policy node {})",
            self.private_type,
            render_path(&self.path),
            self.failure,
            if self.policy_node.is_empty() {
                "-".to_string()
            } else {
                render_path(&self.policy_node)
            }
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub satisfied: bool,
    pub witnesses: Vec<Witness>,
}

impl Verdict {
    pub fn from_witnesses(witnesses: Vec<Witness>) -> Self {
        Verdict {
            satisfied: witnesses.is_empty(),
            witnesses,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.satisfied {
            return write!(f, "satisfied");
        }
        write!(f, "violated ({} witness(es))", self.witnesses.len())?;
        for w in &self.witnesses {
            write!(f, "\n  {w}")?;
        }
        Ok(())
    }
}

/// `H ⊩ θ`. Returns the failures for type `t` (empty when satisfied).
pub fn theta_witnesses(t: &Sym, h: &Hierarchy, theta: &FlatHierarchy) -> Vec<Witness> {
    let fail = |failure, node: Vec<Sym>| Witness {
        private_type: t.clone(),
        path: theta.path.clone(),
        failure,
        policy_node: node,
    };
    let Some(first) = theta.path.first() else {
        return vec![];
    };
    if *first != h.group {
        return vec![fail(Failure::MissingGroup(first.clone()), vec![])];
    }
    let mut node = h;
    let mut acc: PermSet = h.perms.clone();
    let mut reached = vec![h.group.clone()];
    for g in &theta.path[1..] {
        match node.child(g) {
            Some(c) => {
                acc = c.perms.union(&acc);
                reached.push(g.clone());
                node = c;
            }
            None => return vec![fail(Failure::MissingGroup(g.clone()), reached)],
        }
    }
    theta
        .perms
        .excess_over(&acc)
        .into_iter()
        .map(|p| fail(Failure::Permission(p), reached.clone()))
        .collect()
}

pub fn theta_satisfies(h: &Hierarchy, theta: &FlatHierarchy) -> bool {
    theta_witnesses(&Sym::new("_"), h, theta).is_empty()
}

/// `P ⊩ Θ`.
pub fn policy_satisfies(p: &Policy, theta: &Theta, coverage: Coverage) -> Verdict {
    let mut out = Vec::new();
    for (t, th) in theta.iter() {
        match p.get(t) {
            Some(h) => out.extend(theta_witnesses(t, h, th)),
            None if coverage == Coverage::Strict => out.push(Witness {
                private_type: t.clone(),
                path: th.path.clone(),
                failure: Failure::Uncovered,
                policy_node: vec![],
            }),
            None => {}
        }
    }
    Verdict::from_witnesses(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    pub typing: Options,
    pub coverage: Coverage,
}

/// Types `s` (with the policy's types declared private in Γ) and checks
/// the interface against `p`.
pub fn verify(
    p: &Policy,
    gamma: &Gamma,
    s: &System,
    opts: VerifyOptions,
) -> Result<(Theta, Verdict), TypeError> {
    let mut g = gamma.clone();
    g.merge_private(p.types().cloned());
    let typed = type_system_with(&g, s, opts.typing)?;
    let verdict = policy_satisfies(p, &typed.theta, opts.coverage);
    Ok((typed.theta, verdict))
}
