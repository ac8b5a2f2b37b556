//! Canonical representatives for structural congruence.
//!
//! Every binder is first renamed to a unique temporary. A process is then
//! flattened into a block: the restrictions reachable without crossing a
//! prefix, replication or group, and the parallel components underneath.
//! Components are sorted by a key in which not-yet-named binders are masked;
//! ties that mention masked binders are broken by trying the permutations of
//! the tied run and keeping the smallest rendering. Bound names are finally
//! numbered `%0, %1, ...` in order of first occurrence.

use std::collections::{HashMap, HashSet};
use std::fmt::Debug;

use super::{
    DataValue, Identity, Placeholder, PrivacyType, PrivateData, Process, Sym, System, Term,
};

const TEMP: char = '\u{1}';
/// Upper bound on tie permutations tried per block.
const PERMUTATION_CAP: usize = 120;

pub fn normalize(p: &Process) -> Process {
    let u = Uniq::default().proc(p, &mut Scope::default());
    canon_block(&u, &mut St::default())
}

pub fn normalize_system(s: &System) -> System {
    let u = Uniq::default().sys(s, &mut Scope::default());
    canon_sys_block(&u, &mut St::default())
}

/// Equality up to consistent renaming of bound names and variables.
pub fn alpha_eq(p: &Process, q: &Process) -> bool {
    let a = Uniq::default().proc(p, &mut Scope::default());
    let b = Uniq::default().proc(q, &mut Scope::default());
    a == b
}

pub fn alpha_eq_system(p: &System, q: &System) -> bool {
    let a = Uniq::default().sys(p, &mut Scope::default());
    let b = Uniq::default().sys(q, &mut Scope::default());
    a == b
}

// ---------------------------------------------------------------- uniquify

#[derive(Default)]
struct Scope {
    names: Vec<(Sym, Sym)>,
    vars: Vec<(Sym, Sym)>,
}

fn lookup(stack: &[(Sym, Sym)], s: &Sym) -> Sym {
    stack
        .iter()
        .rev()
        .find(|(k, _)| k == s)
        .map(|(_, v)| v.clone())
        .unwrap_or_else(|| s.clone())
}

#[derive(Default)]
struct Uniq {
    next: usize,
}

impl Uniq {
    fn fresh(&mut self) -> Sym {
        let s = Sym::from(format!("{TEMP}{}", self.next));
        self.next += 1;
        s
    }

    fn term(&self, t: &Term, sc: &Scope) -> Term {
        match t {
            Term::Name(n) => Term::Name(lookup(&sc.names, n)),
            Term::Dual(n) => Term::Dual(lookup(&sc.names, n)),
            Term::Var(x) => Term::Var(lookup(&sc.vars, x)),
            Term::Private(pd) => Term::Private(self.pd(pd, sc)),
        }
    }

    fn pd(&self, pd: &PrivateData, sc: &Scope) -> PrivateData {
        PrivateData {
            identity: match &pd.identity {
                Identity::Var(x) => Identity::Var(lookup(&sc.vars, x)),
                i => i.clone(),
            },
            data: match &pd.data {
                DataValue::Var(x) => DataValue::Var(lookup(&sc.vars, x)),
                d => d.clone(),
            },
        }
    }

    fn proc(&mut self, p: &Process, sc: &mut Scope) -> Process {
        match p {
            Process::Nil => Process::Nil,
            Process::Out {
                subject,
                objects,
                cont,
            } => Process::Out {
                subject: self.term(subject, sc),
                objects: objects.iter().map(|o| self.term(o, sc)).collect(),
                cont: Box::new(self.proc(cont, sc)),
            },
            Process::Inp {
                subject,
                patterns,
                cont,
            } => {
                let subject = self.term(subject, sc);
                let depth = sc.vars.len();
                let bind = |x: &Sym, sc: &mut Scope, me: &mut Self| {
                    let f = me.fresh();
                    sc.vars.push((x.clone(), f.clone()));
                    f
                };
                let patterns = patterns
                    .iter()
                    .map(|k| match k {
                        Placeholder::Var(x) => Placeholder::Var(bind(x, sc, self)),
                        Placeholder::Priv(x, y) => {
                            let x = bind(x, sc, self);
                            Placeholder::Priv(x, bind(y, sc, self))
                        }
                        Placeholder::Anon(y) => Placeholder::Anon(bind(y, sc, self)),
                    })
                    .collect();
                let cont = Box::new(self.proc(cont, sc));
                sc.vars.truncate(depth);
                Process::Inp {
                    subject,
                    patterns,
                    cont,
                }
            }
            Process::Res { name, ty, body } => {
                let f = self.fresh();
                sc.names.push((name.clone(), f.clone()));
                let body = self.proc(body, sc);
                sc.names.pop();
                Process::Res {
                    name: f,
                    ty: ty.clone(),
                    body: Box::new(body),
                }
            }
            Process::Par(a, b) => {
                let a = self.proc(a, sc);
                Process::par(a, self.proc(b, sc))
            }
            Process::Repl(b) => Process::repl(self.proc(b, sc)),
            Process::If {
                op,
                lhs,
                rhs,
                then,
                els,
            } => {
                let lhs = self.term(lhs, sc);
                let rhs = self.term(rhs, sc);
                let then = Box::new(self.proc(then, sc));
                Process::If {
                    op: *op,
                    lhs,
                    rhs,
                    then,
                    els: Box::new(self.proc(els, sc)),
                }
            }
            Process::Store { reference, datum } => Process::Store {
                reference: lookup(&sc.names, reference),
                datum: self.pd(datum, sc),
            },
            Process::Select {
                subject,
                label,
                cont,
            } => Process::Select {
                subject: self.term(subject, sc),
                label: *label,
                cont: Box::new(self.proc(cont, sc)),
            },
            Process::Branch { subject, arms } => Process::Branch {
                subject: self.term(subject, sc),
                arms: arms.iter().map(|(l, q)| (*l, self.proc(q, sc))).collect(),
            },
        }
    }

    fn sys(&mut self, s: &System, sc: &mut Scope) -> System {
        match s {
            System::Group { group, body } => System::Group {
                group: group.clone(),
                body: self.proc(body, sc),
            },
            System::GroupSys { group, body } => System::GroupSys {
                group: group.clone(),
                body: Box::new(self.sys(body, sc)),
            },
            System::Par(a, b) => {
                let a = self.sys(a, sc);
                System::par(a, self.sys(b, sc))
            }
            System::Res { name, ty, body } => {
                let f = self.fresh();
                sc.names.push((name.clone(), f.clone()));
                let body = self.sys(body, sc);
                sc.names.pop();
                System::Res {
                    name: f,
                    ty: ty.clone(),
                    body: Box::new(body),
                }
            }
            System::Bare(p) => System::Bare(self.proc(p, sc)),
        }
    }
}

// ---------------------------------------------------------------- canonical naming

fn is_temp(s: &Sym) -> bool {
    s.as_str().starts_with(TEMP)
}

#[derive(Clone, Default)]
struct St {
    map: HashMap<Sym, Sym>,
    next: usize,
    /// Key mode: unnamed outer binders print as `#`, inner ones as `@k`.
    mask: bool,
    local: usize,
    inner: HashSet<Sym>,
}

impl St {
    fn bind(&mut self, temp: &Sym) -> Sym {
        let s = if self.mask {
            self.local += 1;
            Sym::from(format!("@{}", self.local - 1))
        } else {
            self.next += 1;
            Sym::from(format!("%{}", self.next - 1))
        };
        self.map.insert(temp.clone(), s.clone());
        s
    }

    fn name(&mut self, n: &Sym) -> Sym {
        if let Some(c) = self.map.get(n) {
            return c.clone();
        }
        if !is_temp(n) {
            return n.clone();
        }
        if self.mask && !self.inner.contains(n) {
            Sym::new("#")
        } else {
            self.bind(n)
        }
    }

    fn masked(&self) -> St {
        St {
            map: self.map.clone(),
            next: self.next,
            mask: true,
            local: 0,
            inner: HashSet::new(),
        }
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Name(n) => Term::Name(self.name(n)),
            Term::Dual(n) => Term::Dual(self.name(n)),
            Term::Var(x) => Term::Var(self.name(x)),
            Term::Private(pd) => Term::Private(self.pd(pd)),
        }
    }

    fn pd(&mut self, pd: &PrivateData) -> PrivateData {
        PrivateData {
            identity: match &pd.identity {
                Identity::Var(x) => Identity::Var(self.name(x)),
                i => i.clone(),
            },
            data: match &pd.data {
                DataValue::Var(x) => DataValue::Var(self.name(x)),
                d => d.clone(),
            },
        }
    }
}

fn index_of(s: &Sym) -> usize {
    s.as_str()[1..].parse().unwrap_or(usize::MAX)
}

/// Orders `comps` canonically and renders them into `st`.
fn arrange<T, R: Debug>(comps: Vec<T>, st: &mut St, canon: &dyn Fn(&T, &mut St) -> R) -> Vec<R> {
    if st.mask {
        // keys only: every component numbers its inner binders from the same base
        let mut out: Vec<(String, R)> = comps
            .iter()
            .map(|c| {
                let r = canon(c, &mut st.clone());
                (format!("{r:?}"), r)
            })
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        return out.into_iter().map(|(_, r)| r).collect();
    }
    let mut keyed: Vec<(String, T)> = comps
        .into_iter()
        .map(|c| {
            let mut probe = st.masked();
            probe.inner = st.inner.clone();
            (format!("{:?}", canon(&c, &mut probe)), c)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));

    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < keyed.len() {
        let mut j = i + 1;
        while j < keyed.len() && keyed[j].0 == keyed[i].0 {
            j += 1;
        }
        if j - i > 1 && keyed[i].0.contains("\"#\"") {
            runs.push((i, j));
        }
        i = j;
    }
    let budget = runs
        .iter()
        .try_fold(1usize, |acc, (a, b)| {
            (1..=(b - a)).try_fold(acc, |x, k| x.checked_mul(k))
        })
        .unwrap_or(usize::MAX);

    let comps: Vec<T> = keyed.into_iter().map(|(_, c)| c).collect();
    if st.mask || runs.is_empty() || budget > PERMUTATION_CAP {
        return comps.iter().map(|c| canon(c, st)).collect();
    }

    let mut best: Option<(String, St, Vec<R>)> = None;
    let mut order: Vec<usize> = (0..comps.len()).collect();
    loop {
        let mut trial = st.clone();
        let out: Vec<R> = order
            .iter()
            .map(|&k| canon(&comps[k], &mut trial))
            .collect();
        let key = format!("{out:?}");
        if best.as_ref().is_none_or(|(b, _, _)| key < *b) {
            best = Some((key, trial, out));
        }
        if !next_order(&mut order, &runs) {
            break;
        }
    }
    let (_, chosen, out) = best.expect("at least one order");
    *st = chosen;
    out
}

/// Advances the per-run permutations like an odometer. False when exhausted.
fn next_order(order: &mut [usize], runs: &[(usize, usize)]) -> bool {
    for &(a, b) in runs {
        if next_permutation(&mut order[a..b]) {
            return true;
        }
        // next_permutation wrapped this run back to sorted; carry
    }
    false
}

fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        xs.reverse();
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

type Binders = Vec<(Sym, Option<PrivacyType>)>;

fn flatten<'a>(p: &'a Process, binders: &mut Binders, comps: &mut Vec<&'a Process>) {
    match p {
        Process::Nil => {}
        Process::Par(a, b) => {
            flatten(a, binders, comps);
            flatten(b, binders, comps);
        }
        Process::Res { name, ty, body } => {
            binders.push((name.clone(), ty.clone()));
            flatten(body, binders, comps);
        }
        _ => comps.push(p),
    }
}

/// Binders of the block that received a canonical name, outermost first.
fn live_binders(binders: &Binders, st: &St) -> Binders {
    let mut live: Binders = binders
        .iter()
        .filter_map(|(t, ty)| st.map.get(t).map(|c| (c.clone(), ty.clone())))
        .collect();
    live.sort_by_key(|(c, _)| index_of(c));
    live
}

fn canon_block(p: &Process, st: &mut St) -> Process {
    let mut binders = Binders::new();
    let mut comps = Vec::new();
    flatten(p, &mut binders, &mut comps);
    if st.mask {
        st.inner.extend(binders.iter().map(|(b, _)| b.clone()));
    }
    let body = Process::par_all(arrange(comps, st, &|c: &&Process, st| canon_comp(c, st)));
    live_binders(&binders, st)
        .into_iter()
        .rev()
        .fold(body, |acc, (name, ty)| Process::Res {
            name,
            ty,
            body: Box::new(acc),
        })
}

fn canon_comp(p: &Process, st: &mut St) -> Process {
    match p {
        Process::Out {
            subject,
            objects,
            cont,
        } => {
            let subject = st.term(subject);
            let objects = objects.iter().map(|o| st.term(o)).collect();
            Process::Out {
                subject,
                objects,
                cont: Box::new(canon_block(cont, st)),
            }
        }
        Process::Inp {
            subject,
            patterns,
            cont,
        } => {
            let subject = st.term(subject);
            let patterns = patterns
                .iter()
                .map(|k| match k {
                    Placeholder::Var(x) => Placeholder::Var(st.bind(x)),
                    Placeholder::Priv(x, y) => {
                        let x = st.bind(x);
                        Placeholder::Priv(x, st.bind(y))
                    }
                    Placeholder::Anon(y) => Placeholder::Anon(st.bind(y)),
                })
                .collect();
            Process::Inp {
                subject,
                patterns,
                cont: Box::new(canon_block(cont, st)),
            }
        }
        Process::Repl(b) => Process::repl(canon_block(b, st)),
        Process::If {
            op,
            lhs,
            rhs,
            then,
            els,
        } => {
            let lhs = st.term(lhs);
            let rhs = st.term(rhs);
            let then = Box::new(canon_block(then, st));
            Process::If {
                op: *op,
                lhs,
                rhs,
                then,
                els: Box::new(canon_block(els, st)),
            }
        }
        Process::Store { reference, datum } => Process::Store {
            reference: st.name(reference),
            datum: st.pd(datum),
        },
        Process::Select {
            subject,
            label,
            cont,
        } => {
            let subject = st.term(subject);
            Process::Select {
                subject,
                label: *label,
                cont: Box::new(canon_block(cont, st)),
            }
        }
        Process::Branch { subject, arms } => {
            let subject = st.term(subject);
            let mut arms: Vec<_> = arms.iter().collect();
            arms.sort_by_key(|(l, _)| *l);
            Process::Branch {
                subject,
                arms: arms
                    .into_iter()
                    .map(|(l, q)| (*l, canon_block(q, st)))
                    .collect(),
            }
        }
        Process::Nil | Process::Par(..) | Process::Res { .. } => canon_block(p, st),
    }
}

enum SComp<'a> {
    Group(&'a Sym, &'a Process),
    GroupSys(&'a Sym, &'a System),
    Bare(Vec<&'a Process>),
}

fn flatten_sys<'a>(s: &'a System, binders: &mut Binders, comps: &mut Vec<SComp<'a>>) {
    match s {
        System::Par(a, b) => {
            flatten_sys(a, binders, comps);
            flatten_sys(b, binders, comps);
        }
        System::Res { name, ty, body } => {
            binders.push((name.clone(), ty.clone()));
            flatten_sys(body, binders, comps);
        }
        System::Group { group, body } => comps.push(SComp::Group(group, body)),
        System::GroupSys { group, body } => comps.push(SComp::GroupSys(group, body)),
        System::Bare(p) => {
            // restrictions of a bare process behave as system-level ones
            let mut procs = Vec::new();
            flatten(p, binders, &mut procs);
            if !procs.is_empty() {
                comps.push(SComp::Bare(procs));
            }
        }
    }
}

fn canon_sys_block(s: &System, st: &mut St) -> System {
    let mut binders = Binders::new();
    let mut comps = Vec::new();
    flatten_sys(s, &mut binders, &mut comps);
    if st.mask {
        st.inner.extend(binders.iter().map(|(b, _)| b.clone()));
    }
    let parts = arrange(comps, st, &|c: &SComp, st| match c {
        SComp::Group(g, p) => System::Group {
            group: (*g).clone(),
            body: canon_block(p, st),
        },
        SComp::GroupSys(g, s) => System::GroupSys {
            group: (*g).clone(),
            body: Box::new(canon_sys_block(s, st)),
        },
        SComp::Bare(ps) => System::Bare(Process::par_all(arrange(
            ps.clone(),
            st,
            &|c: &&Process, st| canon_comp(c, st),
        ))),
    });
    let body = System::par_all(parts);
    live_binders(&binders, st)
        .into_iter()
        .rev()
        .fold(body, |acc, (name, ty)| System::Res {
            name,
            ty,
            body: Box::new(acc),
        })
}
