//! Error-system detection, countLink and the bounded safety scan.

use std::collections::HashMap;
use std::fmt;

use crate::kernel::{Identity, Placeholder, Process, Sym, System, Term};
use crate::policy::{render_path, Hierarchy, Lambda, PermSet, Permission, Policy};
use crate::semantics::{explore, state_hash, StateGraph};
use crate::typing::{type_match, Gamma, GammaKey, Options, Type};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SafetyOptions {
    pub typing: Options,
    /// Count outputs of `t<g>` data instead of `t` references.
    pub countlink_literal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ErrorFinding {
    pub clause: u8,
    pub private_type: Sym,
    pub path: Vec<Sym>,
    /// Rendered offending subterm.
    pub subterm: String,
    pub permission: String,
}

impl fmt::Display for ErrorFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "clause {}: {} at {} lacks {} in `{}`",
            self.clause,
            self.private_type,
            render_path(&self.path),
            self.permission,
            self.subterm
        )
    }
}

/// Local typing context: Γ plus the types of plain input variables.
#[derive(Clone)]
struct Scope {
    gamma: Gamma,
    vars: HashMap<Sym, Type>,
}

impl Scope {
    fn ty(&self, t: &Term) -> Option<Type> {
        match t {
            Term::Name(n) => self.gamma.name(n),
            Term::Var(x) => self.vars.get(x).cloned(),
            Term::Private(pd) => self.gamma.data(pd),
            Term::Dual(_) => None,
        }
    }

    fn restrict(&mut self, name: &Sym, ty: &Option<crate::kernel::PrivacyType>) {
        if let Some(t) = ty {
            let t = self.gamma.resolve(t);
            self.gamma.set(GammaKey::Name(name.clone()), &t);
        }
    }

    fn bind(&mut self, patterns: &[Placeholder], payload: &[Type]) {
        for (k, ty) in patterns.iter().zip(payload) {
            if let Placeholder::Var(x) = k {
                self.vars.insert(x.clone(), ty.clone());
            }
        }
    }
}

/// Number of link outputs over channels of `group` in `p`, `u64::MAX` when
/// a counted output sits under replication.
pub fn count_links(p: &Process, gamma: &Gamma, group: &Sym, t: &Sym, literal: bool) -> u64 {
    let sc = Scope {
        gamma: gamma.clone(),
        vars: HashMap::new(),
    };
    count(p, &sc, group, t, literal)
}

fn counted(ty: &Type, t: &Sym, literal: bool) -> bool {
    if literal {
        matches!(ty, Type::Private { t: u, .. } if u == t)
    } else {
        ty.reference_of().is_some_and(|(_, u, _)| u == t)
    }
}

fn count(p: &Process, sc: &Scope, group: &Sym, t: &Sym, literal: bool) -> u64 {
    match p {
        Process::Nil | Process::Store { .. } => 0,
        Process::Out {
            subject,
            objects,
            cont,
        } => {
            let here = match sc.ty(subject) {
                Some(Type::Chan { group: g, payload }) if (&g == group || literal) => payload
                    .iter()
                    .zip(objects)
                    .filter(|(ty, _)| counted(ty, t, literal))
                    .count()
                    as u64,
                _ => 0,
            };
            here.saturating_add(count(cont, sc, group, t, literal))
        }
        Process::Inp {
            subject,
            patterns,
            cont,
        } => {
            let mut inner = sc.clone();
            if let Some(Type::Chan { payload, .. }) = sc.ty(subject) {
                inner.bind(patterns, &payload);
            }
            count(cont, &inner, group, t, literal)
        }
        Process::Res { name, ty, body } => {
            let mut inner = sc.clone();
            inner.restrict(name, ty);
            count(body, &inner, group, t, literal)
        }
        Process::Par(a, b) => {
            count(a, sc, group, t, literal).saturating_add(count(b, sc, group, t, literal))
        }
        Process::If { then, els, .. } => {
            count(then, sc, group, t, literal).saturating_add(count(els, sc, group, t, literal))
        }
        Process::Repl(b) => match count(b, sc, group, t, literal) {
            0 => 0,
            _ => u64::MAX,
        },
        Process::Select { cont, .. } => count(cont, sc, group, t, literal),
        Process::Branch { arms, .. } => arms
            .iter()
            .map(|(_, q)| count(q, sc, group, t, literal))
            .fold(0, u64::saturating_add),
    }
}

/// Policy nodes along `path`, root first (shorter if the path leaves `h`).
fn nodes_along<'a>(h: &'a Hierarchy, path: &[Sym]) -> Vec<&'a Hierarchy> {
    let mut out = Vec::new();
    if path.first() != Some(&h.group) {
        return out;
    }
    let mut node = h;
    out.push(node);
    for g in &path[1..] {
        match node.child(g) {
            Some(c) => {
                node = c;
                out.push(c);
            }
            None => break,
        }
    }
    out
}

struct Detector<'a> {
    policy: &'a Policy,
    opts: SafetyOptions,
    out: Vec<ErrorFinding>,
}

/// An active component with the scope it is typed in.
struct Active<'p> {
    proc: &'p Process,
    scope: Scope,
}

fn actives<'p>(p: &'p Process, sc: &Scope, out: &mut Vec<Active<'p>>) {
    match p {
        Process::Nil => {}
        Process::Par(a, b) => {
            actives(a, sc, out);
            actives(b, sc, out);
        }
        Process::Res { name, ty, body } => {
            let mut inner = sc.clone();
            inner.restrict(name, ty);
            actives(body, &inner, out);
        }
        Process::Repl(b) => actives(b, sc, out),
        Process::If { then, els, .. } => {
            out.push(Active {
                proc: p,
                scope: sc.clone(),
            });
            actives(then, sc, out);
            actives(els, sc, out);
        }
        _ => out.push(Active {
            proc: p,
            scope: sc.clone(),
        }),
    }
}

impl Detector<'_> {
    fn permis(&self, t: &Sym, path: &[Sym]) -> Option<PermSet> {
        let h = self.policy.get(t)?;
        Some(h.flatten(path).map(|f| f.perms).unwrap_or_default())
    }

    fn report(&mut self, clause: u8, t: &Sym, path: &[Sym], p: &Process, perm: impl ToString) {
        self.out.push(ErrorFinding {
            clause,
            private_type: t.clone(),
            path: path.to_vec(),
            subterm: crate::syntax::render_process(p),
            permission: perm.to_string(),
        });
    }

    fn missing(&mut self, clause: u8, t: &Sym, path: &[Sym], p: &Process, perm: Permission) {
        if let Some(ps) = self.permis(t, path) {
            if !ps.contains(&perm) {
                self.report(clause, t, path, p, perm);
            }
        }
    }

    fn system(&mut self, s: &System, path: &mut Vec<Sym>, sc: &Scope) {
        match s {
            System::Group { group, body } => {
                path.push(group.clone());
                self.leaf(body, path, sc);
                path.pop();
            }
            System::GroupSys { group, body } => {
                path.push(group.clone());
                self.system(body, path, sc);
                path.pop();
            }
            System::Par(a, b) => {
                self.system(a, path, sc);
                self.system(b, path, sc);
            }
            System::Res { name, ty, body } => {
                let mut inner = sc.clone();
                inner.restrict(name, ty);
                self.system(body, path, &inner);
            }
            System::Bare(p) => {
                if !path.is_empty() {
                    self.leaf(p, path, sc);
                }
            }
        }
    }

    fn leaf(&mut self, body: &Process, path: &[Sym], sc: &Scope) {
        let mut acts = Vec::new();
        actives(body, sc, &mut acts);
        for a in &acts {
            self.active(a, path);
        }
        self.aggregation(&acts, path);
        self.link_budget(body, path, sc);
    }

    fn active(&mut self, a: &Active<'_>, path: &[Sym]) {
        let p = a.proc;
        match p {
            Process::Inp {
                subject, patterns, ..
            } => {
                let Some(Type::Chan { payload, .. }) = a.scope.ty(subject) else {
                    return;
                };
                for (k, ty) in patterns.iter().zip(&payload) {
                    if let Type::Private { t, .. } = ty {
                        self.missing(1, t, path, p, Permission::Read);
                        if matches!(k, Placeholder::Priv(..)) {
                            self.missing(5, t, path, p, Permission::ReadId);
                        }
                    } else if let Some((_, t, _)) = ty.reference_of() {
                        self.missing(3, t, path, p, Permission::Reference);
                    }
                }
            }
            Process::Out { subject, .. } => {
                let Some(Type::Chan { group, payload }) = a.scope.ty(subject) else {
                    return;
                };
                for ty in &payload {
                    if let Type::Private { t, .. } = ty {
                        self.missing(2, t, path, p, Permission::Update);
                    } else if let Some((_, t, _)) = ty.reference_of() {
                        if let Some(ps) = self.permis(t, path) {
                            if ps.disseminate_budget(&group).is_none() {
                                self.report(4, t, path, p, format!("disseminate {group}"));
                            }
                        }
                        self.nondisclosure(t, &group, path, p);
                    }
                }
            }
            Process::Store { reference, .. } => {
                let ty = a.scope.gamma.name(reference);
                if let Some((_, t, _)) = ty.as_ref().and_then(Type::reference_of) {
                    self.missing(6, t, path, p, Permission::Store);
                }
            }
            Process::If { lhs, rhs, .. } => {
                let Ok(d) = type_match(&a.scope.gamma, lhs, rhs, self.opts.typing) else {
                    return;
                };
                for (t, ps) in d.iter() {
                    for perm in ps.iter() {
                        let clause = match perm {
                            Permission::Usage(_) => 8,
                            Permission::Identify(_) => 9,
                            _ => continue,
                        };
                        self.missing(clause, t, path, p, perm.clone());
                    }
                }
            }
            _ => {}
        }
    }

    fn nondisclosure(&mut self, t: &Sym, carrier: &Sym, path: &[Sym], p: &Process) {
        let Some(h) = self.policy.get(t) else {
            return;
        };
        let hit = nodes_along(h, path).into_iter().find_map(|node| {
            let kind = node.perms.iter().find_map(|q| match q {
                Permission::NonDisclose(k) => Some(*k),
                _ => None,
            })?;
            (!node.groups().contains(carrier)).then_some(kind)
        });
        if let Some(kind) = hit {
            self.report(
                11,
                t,
                path,
                p,
                format!("nondisclose {} towards {carrier}", kind.as_str()),
            );
        }
    }

    fn aggregation(&mut self, acts: &[Active<'_>], path: &[Sym]) {
        let stores: Vec<(&Process, Identity, Sym)> = acts
            .iter()
            .filter_map(|a| match a.proc {
                Process::Store { reference, datum } => {
                    let ty = a.scope.gamma.name(reference)?;
                    let (_, t, _) = ty.reference_of()?;
                    Some((a.proc, datum.identity.clone(), t.clone()))
                }
                _ => None,
            })
            .collect();
        for (i, (p, id1, t1)) in stores.iter().enumerate() {
            for (_, id2, t2) in &stores[i + 1..] {
                let unify = matches!(id1, Identity::Var(_))
                    || matches!(id2, Identity::Var(_))
                    || id1 == id2;
                if unify {
                    self.missing(7, t1, path, p, Permission::Aggregate);
                    if t2 != t1 {
                        self.missing(7, t2, path, p, Permission::Aggregate);
                    }
                }
            }
        }
    }

    fn link_budget(&mut self, body: &Process, path: &[Sym], sc: &Scope) {
        let types: Vec<Sym> = self.policy.types().cloned().collect();
        for t in types {
            let Some(ps) = self.permis(&t, path) else {
                continue;
            };
            for perm in ps.iter() {
                let Permission::Disseminate(g, Lambda::Fin(n)) = perm else {
                    continue;
                };
                let c = count(body, sc, g, &t, self.opts.countlink_literal);
                if c > n.get() {
                    self.report(
                        10,
                        &t,
                        path,
                        body,
                        format!("disseminate {g} {n} (counted {})", show_count(c)),
                    );
                }
            }
        }
    }
}

fn show_count(c: u64) -> String {
    if c == u64::MAX {
        "inf".into()
    } else {
        c.to_string()
    }
}

/// Static check of every clause at every group path of `s`.
pub fn detect_errors(
    policy: &Policy,
    gamma: &Gamma,
    s: &System,
    opts: SafetyOptions,
) -> Vec<ErrorFinding> {
    let mut g = gamma.clone();
    g.merge_private(policy.types().cloned());
    let mut d = Detector {
        policy,
        opts,
        out: Vec::new(),
    };
    let sc = Scope {
        gamma: g,
        vars: HashMap::new(),
    };
    d.system(s, &mut Vec::new(), &sc);
    d.out.sort();
    d.out.dedup();
    d.out
}

#[derive(Clone, Debug, Default)]
pub struct SafetyReport {
    pub states: usize,
    pub truncated: bool,
    /// `(state hash, finding)`.
    pub findings: Vec<(String, ErrorFinding)>,
}

impl SafetyReport {
    pub fn safe(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Runs [`detect_errors`] on every state reachable within `depth` τ steps.
pub fn safety_scan(
    policy: &Policy,
    gamma: &Gamma,
    s: &System,
    depth: usize,
    opts: SafetyOptions,
) -> SafetyReport {
    scan_graph(policy, gamma, &explore(s, depth), opts)
}

pub fn scan_graph(
    policy: &Policy,
    gamma: &Gamma,
    g: &StateGraph,
    opts: SafetyOptions,
) -> SafetyReport {
    let gamma = crate::semantics::extended_gamma(gamma, g);
    let mut report = SafetyReport {
        states: g.nodes.len(),
        truncated: g.truncated,
        findings: Vec::new(),
    };
    for n in &g.nodes {
        let h = state_hash(n);
        for f in detect_errors(policy, &gamma, n, opts) {
            report.findings.push((h.clone(), f));
        }
    }
    report
}
