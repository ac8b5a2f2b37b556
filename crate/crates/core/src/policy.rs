//! Permissions, group hierarchies and privacy policies.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::num::NonZeroU64;

use crate::kernel::Sym;

/// Dissemination budget: a positive count or unlimited.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lambda {
    Fin(NonZeroU64),
    Omega,
}

impl Lambda {
    pub fn fin(n: u64) -> Option<Lambda> {
        NonZeroU64::new(n).map(Lambda::Fin)
    }

    pub const ONE: Lambda = Lambda::Fin(NonZeroU64::MIN);
}

/// The ⊕ monoid; saturates to ω on overflow.
impl std::ops::Add for Lambda {
    type Output = Lambda;

    fn add(self, other: Lambda) -> Lambda {
        match (self, other) {
            (Lambda::Fin(a), Lambda::Fin(b)) => {
                a.checked_add(b.get()).map_or(Lambda::Omega, Lambda::Fin)
            }
            _ => Lambda::Omega,
        }
    }
}

pub fn lambda_add(a: Lambda, b: Lambda) -> Lambda {
    a + b
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Fin(n) => write!(f, "{n}"),
            Lambda::Omega => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DisclosureKind {
    Disclosure,
    Confidential,
    Sensitive,
}

impl DisclosureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DisclosureKind::Disclosure => "disclosure",
            DisclosureKind::Confidential => "confidential",
            DisclosureKind::Sensitive => "sensitive",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "disclosure" => DisclosureKind::Disclosure,
            "confidential" => DisclosureKind::Confidential,
            "sensitive" => DisclosureKind::Sensitive,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Permission {
    Read,
    Update,
    Reference,
    Disseminate(Sym, Lambda),
    Store,
    ReadId,
    NonDisclose(DisclosureKind),
    Usage(Sym),
    Identify(Sym),
    Aggregate,
}

impl Permission {
    pub fn disseminate(g: &str, l: Lambda) -> Self {
        Permission::Disseminate(g.into(), l)
    }

    pub fn usage(p: &str) -> Self {
        Permission::Usage(p.into())
    }

    pub fn identify(t: &str) -> Self {
        Permission::Identify(t.into())
    }

    /// Single-permission ≼.
    pub fn leq(&self, other: &Permission) -> bool {
        match (self, other) {
            (Permission::Disseminate(g1, l1), Permission::Disseminate(g2, l2)) => {
                g1 == g2 && (l1 <= l2 || *l2 == Lambda::Omega)
            }
            _ => self == other,
        }
    }
}

impl fmt::Display for Permission {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Permission::Read => f.write_str("read"),
            Permission::Update => f.write_str("update"),
            Permission::Reference => f.write_str("reference"),
            Permission::Disseminate(g, l) => write!(f, "disseminate {g} {l}"),
            Permission::Store => f.write_str("store"),
            Permission::ReadId => f.write_str("readId"),
            Permission::NonDisclose(k) => write!(f, "nondisclose {}", k.as_str()),
            Permission::Usage(p) => write!(f, "usage {p}"),
            Permission::Identify(t) => write!(f, "identify {t}"),
            Permission::Aggregate => f.write_str("aggregate"),
        }
    }
}

/// A permission set with at most one `disseminate` entry per group.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PermSet(BTreeSet<Permission>);

impl PermSet {
    pub fn new() -> Self {
        PermSet::default()
    }

    /// Inserts, merging budgets of an existing `disseminate` for the same group.
    pub fn insert(&mut self, p: Permission) {
        if let Permission::Disseminate(g, l) = &p {
            let existing = self
                .0
                .iter()
                .find(|q| matches!(q, Permission::Disseminate(h, _) if h == g))
                .cloned();
            if let Some(old @ Permission::Disseminate(_, m)) = existing {
                self.0.remove(&old);
                self.0.insert(Permission::Disseminate(g.clone(), *l + m));
                return;
            }
        }
        self.0.insert(p);
    }

    /// ⊎
    pub fn union(&self, other: &PermSet) -> PermSet {
        let mut out = self.clone();
        out.extend(other.iter().cloned());
        out
    }

    pub fn contains(&self, p: &Permission) -> bool {
        self.0.contains(p)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Permission> {
        self.0.iter()
    }

    pub fn remove(&mut self, p: &Permission) -> bool {
        self.0.remove(p)
    }

    pub fn disseminate_budget(&self, g: &Sym) -> Option<Lambda> {
        self.0.iter().find_map(|p| match p {
            Permission::Disseminate(h, l) if h == g => Some(*l),
            _ => None,
        })
    }

    pub fn has_any_disseminate(&self) -> bool {
        self.0
            .iter()
            .any(|p| matches!(p, Permission::Disseminate(..)))
    }

    /// Every budget raised to ω.
    pub fn star(&self) -> PermSet {
        PermSet(
            self.0
                .iter()
                .map(|p| match p {
                    Permission::Disseminate(g, _) => {
                        Permission::Disseminate(g.clone(), Lambda::Omega)
                    }
                    q => q.clone(),
                })
                .collect(),
        )
    }

    /// ≼: every permission here is covered by one in `other`; purposes
    /// are compared as sets.
    pub fn leq(&self, other: &PermSet) -> bool {
        self.0.iter().all(|p| match p {
            Permission::Disseminate(g, _) => other
                .disseminate_budget(g)
                .is_some_and(|l2| p.leq(&Permission::Disseminate(g.clone(), l2))),
            _ => other.contains(p),
        })
    }

    /// Members of `self` not covered by `other`.
    pub fn excess_over(&self, other: &PermSet) -> Vec<Permission> {
        self.0
            .iter()
            .filter(|p| !PermSet::from_iter([(*p).clone()]).leq(other))
            .cloned()
            .collect()
    }
}

impl Extend<Permission> for PermSet {
    fn extend<I: IntoIterator<Item = Permission>>(&mut self, iter: I) {
        for p in iter {
            self.insert(p);
        }
    }
}

impl FromIterator<Permission> for PermSet {
    fn from_iter<I: IntoIterator<Item = Permission>>(iter: I) -> Self {
        let mut s = PermSet::new();
        s.extend(iter);
        s
    }
}

impl<'a> IntoIterator for &'a PermSet {
    type Item = &'a Permission;
    type IntoIter = std::collections::btree_set::Iter<'a, Permission>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for PermSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

pub fn perm_union(a: &PermSet, b: &PermSet) -> PermSet {
    a.union(b)
}

/// `G: prm [H...]`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hierarchy {
    pub group: Sym,
    pub perms: PermSet,
    pub children: Vec<Hierarchy>,
}

impl Hierarchy {
    pub fn leaf(group: &str, perms: impl IntoIterator<Item = Permission>) -> Self {
        Hierarchy {
            group: group.into(),
            perms: perms.into_iter().collect(),
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<Hierarchy>) -> Self {
        self.children = children;
        self
    }

    pub fn groups(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.walk(&mut |h| {
            out.insert(h.group.clone());
        });
        out
    }

    pub fn perms_all(&self) -> PermSet {
        let mut out = PermSet::new();
        self.walk(&mut |h| out.extend(h.perms.iter().cloned()));
        out
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Hierarchy)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    pub fn child(&self, g: &Sym) -> Option<&Hierarchy> {
        self.children.iter().find(|c| &c.group == g)
    }

    /// Descends along `path` accumulating permissions with ⊎.
    pub fn flatten(&self, path: &[Sym]) -> Result<FlatHierarchy, PolicyError> {
        let (first, rest) = path.split_first().ok_or(PolicyError::EmptyPath)?;
        if first != &self.group {
            return Err(PolicyError::NotFound(vec![first.clone()]));
        }
        let mut node = self;
        let mut perms = self.perms.clone();
        for (i, g) in rest.iter().enumerate() {
            node = node
                .child(g)
                .ok_or_else(|| PolicyError::NotFound(path[..i + 2].to_vec()))?;
            perms = perms.union(&node.perms);
        }
        Ok(FlatHierarchy {
            path: path.to_vec(),
            perms,
        })
    }
}

pub fn hierarchy_groups(h: &Hierarchy) -> BTreeSet<Sym> {
    h.groups()
}

pub fn hierarchy_perms(h: &Hierarchy) -> PermSet {
    h.perms_all()
}

pub fn flatten(h: &Hierarchy, path: &[Sym]) -> Result<FlatHierarchy, PolicyError> {
    h.flatten(path)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolicyError {
    #[error("flatten needs a non-empty group path")]
    EmptyPath,
    #[error("no policy node at {}", render_path(.0))]
    NotFound(Vec<Sym>),
}

pub fn render_path(p: &[Sym]) -> String {
    p.iter().map(Sym::as_str).collect::<Vec<_>>().join(".")
}

/// `θ`: a group path with accumulated permissions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlatHierarchy {
    pub path: Vec<Sym>,
    pub perms: PermSet,
}

impl FlatHierarchy {
    pub fn new(path: &[&str], perms: impl IntoIterator<Item = Permission>) -> Self {
        FlatHierarchy {
            path: path.iter().map(|g| Sym::new(g)).collect(),
            perms: perms.into_iter().collect(),
        }
    }

    pub fn groups(&self) -> BTreeSet<Sym> {
        self.path.iter().cloned().collect()
    }

    /// ≼: same path, permissions covered.
    pub fn leq(&self, other: &FlatHierarchy) -> bool {
        self.path == other.path && self.perms.leq(&other.perms)
    }
}

impl fmt::Display for FlatHierarchy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", render_path(&self.path), self.perms)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Policy {
    pub entries: Vec<(Sym, Hierarchy)>,
}

impl Policy {
    pub fn new(entries: Vec<(Sym, Hierarchy)>) -> Self {
        Policy { entries }
    }

    pub fn get(&self, t: &Sym) -> Option<&Hierarchy> {
        self.entries.iter().find(|(u, _)| u == t).map(|(_, h)| h)
    }

    pub fn types(&self) -> impl Iterator<Item = &Sym> {
        self.entries.iter().map(|(t, _)| t)
    }

    /// All groups mentioned anywhere in the policy.
    pub fn groups(&self) -> BTreeSet<Sym> {
        self.entries.iter().flat_map(|(_, h)| h.groups()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// 1: duplicate type, 2: cyclic nesting, 3: nondisclose conflict.
    pub condition: u8,
    pub private_type: Sym,
    pub path: Vec<Sym>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "condition {}: {} at {}: {}",
            self.condition,
            self.private_type,
            render_path(&self.path),
            self.message
        )
    }
}

pub fn check_wellformed(p: &Policy) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (t, h) in &p.entries {
        if !seen.insert(t.clone()) {
            out.push(Violation {
                condition: 1,
                private_type: t.clone(),
                path: vec![h.group.clone()],
                message: format!("private type {t} is bound more than once"),
            });
        }
        check_node(t, h, &mut Vec::new(), &mut out);
    }
    out
}

fn check_node(t: &Sym, h: &Hierarchy, path: &mut Vec<Sym>, out: &mut Vec<Violation>) {
    path.push(h.group.clone());
    let kinds: Vec<DisclosureKind> = h
        .perms
        .iter()
        .filter_map(|p| match p {
            Permission::NonDisclose(k) => Some(*k),
            _ => None,
        })
        .collect();
    let own_groups = h.groups();
    for c in &h.children {
        if c.groups().contains(&h.group) {
            out.push(Violation {
                condition: 2,
                private_type: t.clone(),
                path: path.clone(),
                message: format!("group {} occurs below itself", h.group),
            });
        }
        if let Some(kind) = kinds.first() {
            for p in c.perms_all().iter() {
                if let Permission::Disseminate(g, _) = p {
                    if !own_groups.contains(g) {
                        out.push(Violation {
                            condition: 3,
                            private_type: t.clone(),
                            path: path.clone(),
                            message: format!(
                                "nondisclose {} conflicts with disseminate {g} below {}",
                                kind.as_str(),
                                c.group
                            ),
                        });
                    }
                }
            }
        }
    }
    for c in &h.children {
        check_node(t, c, path, out);
    }
    path.pop();
}
