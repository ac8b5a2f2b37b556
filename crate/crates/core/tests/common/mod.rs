//! Seeded random generators shared by the property and acceptance suites.
#![allow(dead_code)]

use std::path::PathBuf;

use privcalc::kernel::{
    BranchLabel, DataValue, Identity, MatchOp, Placeholder, PrivacyType, PrivateData, Process, Sym,
    System, Term,
};
use privcalc::policy::{FlatHierarchy, Hierarchy, Lambda, PermSet, Permission, Policy};
use privcalc::syntax::{parse_env, parse_system};
use privcalc::typing::{type_system, Gamma, Theta};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn corpus(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(file)
}

pub fn read_corpus(file: &str) -> String {
    std::fs::read_to_string(corpus(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

fn pick<'a>(r: &mut StdRng, xs: &[&'a str]) -> &'a str {
    xs.choose(r).unwrap()
}

// ---------------------------------------------------------------------------
// Syntactic generators (round trip)

const NAMES: &[&str] = &["a", "b", "c", "r", "s", "chan2"];
const CONSTS: &[&str] = &["c1", "c2", "dna", "id", "id2"];
const GROUPS: &[&str] = &["G", "H", "K", "Lab", "Car"];
const TYPES: &[&str] = &["t", "u", "loc"];
const GROUNDS: &[&str] = &["g", "lambda", "Speed"];

struct Syn<'r> {
    r: &'r mut StdRng,
    fresh: usize,
}

impl Syn<'_> {
    fn var(&mut self) -> Sym {
        self.fresh += 1;
        Sym::from(format!("v{}", self.fresh))
    }

    fn bound(&mut self, vars: &[Sym]) -> Option<Sym> {
        vars.choose(self.r).cloned()
    }

    fn ty(&mut self, depth: usize) -> PrivacyType {
        if depth == 0 || self.r.gen_bool(0.4) {
            PrivacyType::base(pick(self.r, TYPES), pick(self.r, GROUNDS))
        } else {
            let n = self.r.gen_range(0..3);
            let payload = (0..n).map(|_| self.ty(depth - 1)).collect();
            PrivacyType::chan(pick(self.r, GROUPS), payload)
        }
    }

    fn datum(&mut self, vars: &[Sym]) -> PrivateData {
        let identity = match self.r.gen_range(0..3) {
            0 => Identity::Hidden,
            1 => match self.bound(vars) {
                Some(v) => Identity::Var(v),
                None => Identity::Known(pick(self.r, CONSTS).into()),
            },
            _ => Identity::Known(pick(self.r, CONSTS).into()),
        };
        let data = match self.r.gen_bool(0.3).then(|| self.bound(vars)).flatten() {
            Some(v) => DataValue::Var(v),
            None => DataValue::Const(pick(self.r, CONSTS).into()),
        };
        PrivateData::constructed(identity, data)
    }

    fn term(&mut self, vars: &[Sym]) -> Term {
        match self.r.gen_range(0..4) {
            0 => Term::Private(self.datum(vars)),
            1 => match self.bound(vars) {
                Some(v) => Term::Var(v),
                None => Term::name(pick(self.r, NAMES)),
            },
            _ => Term::name(pick(self.r, NAMES)),
        }
    }

    fn subject(&mut self, vars: &[Sym]) -> Term {
        match self.r.gen_range(0..5) {
            0 => Term::Dual(pick(self.r, NAMES).into()),
            1 => match self.bound(vars) {
                Some(v) => Term::Var(v),
                None => Term::name(pick(self.r, NAMES)),
            },
            _ => Term::name(pick(self.r, NAMES)),
        }
    }

    fn process(&mut self, depth: usize, vars: &[Sym]) -> Process {
        if depth == 0 {
            return match self.r.gen_range(0..3) {
                0 => Process::store(pick(self.r, NAMES), self.datum(&[])),
                _ => Process::Nil,
            };
        }
        let d = depth - 1;
        match self.r.gen_range(0..11) {
            0 => Process::Nil,
            1 | 2 => {
                let n = self.r.gen_range(0..3);
                let objects = (0..n).map(|_| self.term(vars)).collect();
                let subject = self.subject(vars);
                Process::out(subject, objects, self.process(d, vars))
            }
            3 | 4 => {
                let n = self.r.gen_range(0..3);
                let mut inner = vars.to_vec();
                let mut pats = Vec::new();
                for _ in 0..n {
                    let k = match self.r.gen_range(0..3) {
                        0 => Placeholder::Var(self.var()),
                        1 => Placeholder::Priv(self.var(), self.var()),
                        _ => Placeholder::Anon(self.var()),
                    };
                    inner.extend(k.vars().into_iter().cloned());
                    pats.push(k);
                }
                let subject = self.subject(vars);
                Process::inp(subject, pats, self.process(d, &inner))
            }
            5 => {
                let ty = self.r.gen_bool(0.5).then(|| self.ty(2));
                Process::res(pick(self.r, NAMES), ty, self.process(d, vars))
            }
            6 => Process::par(self.process(d, vars), self.process(d, vars)),
            7 => Process::repl(self.process(d, vars)),
            8 => {
                let op = if self.r.gen_bool(0.8) {
                    MatchOp::Eq
                } else {
                    MatchOp::Gt
                };
                let (lhs, rhs) = (self.term(vars), self.term(vars));
                let then = Box::new(self.process(d, vars));
                let els = Box::new(self.process(d, vars));
                Process::If {
                    op,
                    lhs,
                    rhs,
                    then,
                    els,
                }
            }
            9 => {
                let label = *[
                    BranchLabel::Rd,
                    BranchLabel::Wr,
                    BranchLabel::Ok,
                    BranchLabel::Fail,
                ]
                .choose(self.r)
                .unwrap();
                Process::Select {
                    subject: self.subject(vars),
                    label,
                    cont: Box::new(self.process(d, vars)),
                }
            }
            _ => {
                let mut labels = [
                    BranchLabel::Rd,
                    BranchLabel::Wr,
                    BranchLabel::Ok,
                    BranchLabel::Fail,
                ];
                labels.shuffle(self.r);
                let n = self.r.gen_range(1..3);
                let arms = labels[..n]
                    .iter()
                    .map(|l| (*l, self.process(d, vars)))
                    .collect();
                Process::Branch {
                    subject: self.subject(vars),
                    arms,
                }
            }
        }
    }

    fn system(&mut self, depth: usize) -> System {
        let choice = if depth == 0 {
            0
        } else {
            self.r.gen_range(0..5)
        };
        match choice {
            0 => System::group(pick(self.r, GROUPS), self.process(depth.min(3), &[])),
            1 => System::group_sys(pick(self.r, GROUPS), self.system_nonbare(depth - 1)),
            2 => System::par(self.system(depth - 1), self.system(depth - 1)),
            3 => {
                let ty = self.r.gen_bool(0.5).then(|| self.ty(2));
                System::res(pick(self.r, NAMES), ty, self.system_nonbare(depth - 1))
            }
            _ => System::Bare(self.process(depth.min(3), &[])),
        }
    }

    /// `G[P]` and `(new n) P` already cover a bare process under a group
    /// or binder, so those positions only get non-bare systems.
    fn system_nonbare(&mut self, depth: usize) -> System {
        match self.system(depth) {
            System::Bare(p) => System::group(pick(self.r, GROUPS), p),
            s => s,
        }
    }
}

pub fn gen_process(seed: u64, depth: usize) -> Process {
    let mut r = rng(seed);
    Syn {
        r: &mut r,
        fresh: 0,
    }
    .process(depth, &[])
}

pub fn gen_system(seed: u64, depth: usize) -> System {
    let mut r = rng(seed);
    Syn {
        r: &mut r,
        fresh: 0,
    }
    .system(depth)
}

const FRAGMENTS: &[&str] = &[
    "G[",
    "]",
    "||",
    "|",
    "!<",
    ">",
    "?(",
    ")",
    "(",
    ".",
    "0",
    "{",
    "#",
    "}",
    "_",
    "~",
    "new ",
    "store ",
    "if ",
    "=",
    " then ",
    " else ",
    ",",
    ":",
    "*",
    "x",
    "a",
    "<|",
    "|>",
    ">>",
    "private ",
    ";",
    "inf",
    "rd",
    "//",
    "\n",
    " ",
    "<",
    "[",
    "read",
    "disseminate",
    "t<g>",
    "é",
    "\u{0}",
    "99999999999999999999",
];

/// Token soup mixed with arbitrary characters.
pub fn fuzz_input(seed: u64) -> String {
    let mut r = rng(seed);
    let n = r.gen_range(0..40);
    let mut s = String::new();
    for _ in 0..n {
        if r.gen_bool(0.8) {
            s.push_str(pick(&mut r, FRAGMENTS));
        } else {
            s.push(r.gen::<char>());
        }
    }
    s
}

// ---------------------------------------------------------------------------
// Well-typed systems (preservation)

/// Environment shared by the generated well-typed systems.
pub const TYPED_ENV: &str = "
private t, u;
r1 : G1[t<g>];
r2 : G2[t<g>];
q1 : G1[u<g>];
a : G1[G1[t<g>]];
b : G2[G1[t<g>]];
k : p<g>;
";

pub fn typed_gamma() -> Gamma {
    parse_env(TYPED_ENV).unwrap()
}

#[derive(Clone)]
struct DataVar {
    id: Option<String>,
    data: String,
    ty: &'static str,
}

#[derive(Clone, Default)]
struct Scope {
    refs: Vec<(String, &'static str)>,
    data: Vec<DataVar>,
}

struct Typed<'r> {
    r: &'r mut StdRng,
    fresh: usize,
}

impl Typed<'_> {
    fn var(&mut self, base: &str) -> String {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    fn datum(&mut self, ty: &str, sc: &Scope) -> String {
        let same: Vec<&DataVar> = sc.data.iter().filter(|d| d.ty == ty).collect();
        match self.r.gen_range(0..4) {
            0 if !same.is_empty() => {
                let d = same.choose(self.r).unwrap();
                match &d.id {
                    Some(i) => format!("{{{i} # {}}}", d.data),
                    None => format!("{{_ # {}}}", d.data),
                }
            }
            1 => format!("{{_ # {}}}", pick(self.r, &["c1", "c2"])),
            _ => format!(
                "{{{} # {}}}",
                pick(self.r, &["id1", "id2"]),
                pick(self.r, &["c1", "c2", "c3"])
            ),
        }
    }

    fn process(&mut self, depth: usize, sc: &Scope) -> String {
        if depth == 0 {
            return "0".into();
        }
        let d = depth - 1;
        let (name, ty) = sc.refs.choose(self.r).cloned().unwrap();
        let g1: Vec<String> = sc
            .refs
            .iter()
            .filter(|(n, t)| *t == "t" && (n.starts_with('x') || n == "r1"))
            .map(|(n, _)| n.clone())
            .collect();
        match self.r.gen_range(0..10) {
            0 => "0".into(),
            1 | 2 => {
                let v = self.datum(ty, sc);
                format!("{name}!<{v}>.{}", self.process(d, sc))
            }
            3 | 4 => {
                let mut inner = sc.clone();
                let y = self.var("y");
                let pat = if self.r.gen_bool(0.6) {
                    let x = self.var("i");
                    inner.data.push(DataVar {
                        id: Some(x.clone()),
                        data: y.clone(),
                        ty,
                    });
                    format!("{{{x} # {y}}}")
                } else {
                    inner.data.push(DataVar {
                        id: None,
                        data: y.clone(),
                        ty,
                    });
                    format!("{{_ # {y}}}")
                };
                format!("{name}?({pat}).{}", self.process(d, &inner))
            }
            5 if !g1.is_empty() => {
                let chan = pick(self.r, &["a", "b"]);
                let obj = g1.choose(self.r).unwrap();
                format!("{chan}!<{obj}>.{}", self.process(d, sc))
            }
            5 | 6 => {
                let chan = pick(self.r, &["a", "b"]);
                let x = self.var("x");
                let mut inner = sc.clone();
                inner.refs.push((x.clone(), "t"));
                format!("{chan}?({x}).{}", self.process(d, &inner))
            }
            7 if !sc.data.is_empty() => {
                let l = sc.data.choose(self.r).unwrap();
                let rhs = match sc
                    .data
                    .iter()
                    .filter(|o| o.ty == l.ty)
                    .collect::<Vec<_>>()
                    .choose(self.r)
                {
                    Some(o) if self.r.gen_bool(0.5) => o.data.clone(),
                    _ => "k".into(),
                };
                let (p, q) = (self.process(d, sc), self.process(d, sc));
                format!("if {} = {rhs} then {p} else {q}", l.data)
            }
            7 | 8 => format!("({} | {})", self.process(d, sc), self.process(d, sc)),
            _ => format!("*{}", self.process(d, sc)),
        }
    }
}

/// A random system over [`TYPED_ENV`], at most `depth` nesting levels of
/// process syntax under each group. May fail to type; callers filter.
pub fn gen_typed_source(seed: u64, depth: usize) -> String {
    let mut r = rng(seed);
    let mut t = Typed {
        r: &mut r,
        fresh: 0,
    };
    let base = Scope {
        refs: vec![("r1".into(), "t"), ("r2".into(), "t"), ("q1".into(), "u")],
        data: Vec::new(),
    };
    let mut comps = Vec::new();
    let stores = [
        ("G1", "store r1 {id1 # c1}"),
        ("G2", "store r2 {id2 # c2}"),
        ("G1", "store q1 {id1 # c3}"),
    ];
    for (g, st) in stores {
        if t.r.gen_bool(0.6) {
            comps.push(format!("{g}[{st}]"));
        }
    }
    let n = t.r.gen_range(1..4);
    for _ in 0..n {
        let g = pick(t.r, &["G1", "G2", "G3"]);
        let d = t.r.gen_range(1..=depth.saturating_sub(2).max(1));
        let body = t.process(d, &base);
        comps.push(format!("{g}[{body}]"));
    }
    let inner = comps.join(" || ");
    if t.r.gen_bool(0.3) {
        format!("Top[{inner}]")
    } else {
        inner
    }
}

/// Well-typed generated systems with their source text.
pub fn typed_systems(seed: u64, wanted: usize, depth: usize) -> Vec<(String, System)> {
    let gamma = typed_gamma();
    let mut out = Vec::new();
    let mut s = seed;
    while out.len() < wanted {
        let src = gen_typed_source(s, depth);
        s += 1;
        let sys = parse_system(&src).unwrap_or_else(|d| panic!("{src}: {d}"));
        if type_system(&gamma, &sys).is_ok() {
            out.push((src, sys));
        }
        assert!(
            s < seed + 50 * wanted as u64 + 1000,
            "typed generator rejects too much"
        );
    }
    out
}

// ---------------------------------------------------------------------------
// Policies and interfaces (downward closure)

const PGROUPS: &[&str] = &["G1", "G2", "G3", "G4", "G5"];

fn lambda(r: &mut StdRng) -> Lambda {
    if r.gen_bool(0.3) {
        Lambda::Omega
    } else {
        Lambda::fin(r.gen_range(1..4)).unwrap()
    }
}

fn permission(r: &mut StdRng) -> Permission {
    match r.gen_range(0..9) {
        0 => Permission::Read,
        1 => Permission::Update,
        2 => Permission::Reference,
        3 => Permission::Store,
        4 => Permission::ReadId,
        5 => Permission::Aggregate,
        6 => Permission::disseminate(pick(r, PGROUPS), lambda(r)),
        7 => Permission::usage(pick(r, &["p1", "p2"])),
        _ => Permission::identify(pick(r, &["t", "u"])),
    }
}

fn perm_set(r: &mut StdRng, max: usize) -> PermSet {
    let n = r.gen_range(0..=max);
    (0..n).map(|_| permission(r)).collect()
}

/// Group `g` with children drawn from `pool`; siblings get distinct groups
/// and no group repeats along a path.
fn hierarchy(r: &mut StdRng, g: &str, depth: usize, pool: &[&'static str]) -> Hierarchy {
    let mut h = Hierarchy::leaf(g, perm_set(r, 3).iter().cloned());
    if depth == 0 || pool.is_empty() {
        return h;
    }
    let mut pool = pool.to_vec();
    pool.shuffle(r);
    let n = r.gen_range(0..=pool.len().min(2));
    let (kids, rest) = pool.split_at(n);
    for k in kids {
        h.children.push(hierarchy(r, k, depth - 1, rest));
    }
    h
}

pub fn gen_policy(seed: u64) -> Policy {
    let mut r = rng(seed);
    let mut entries = vec![(Sym::from("t"), hierarchy(&mut r, "G1", 2, &PGROUPS[1..]))];
    if r.gen_bool(0.5) {
        entries.push((Sym::from("u"), hierarchy(&mut r, "G1", 2, &PGROUPS[1..])));
    }
    Policy::new(entries)
}

fn paths(h: &Hierarchy, prefix: &mut Vec<Sym>, out: &mut Vec<Vec<Sym>>) {
    prefix.push(h.group.clone());
    out.push(prefix.clone());
    for c in &h.children {
        paths(c, prefix, out);
    }
    prefix.pop();
}

fn lower(r: &mut StdRng, p: &Permission) -> Permission {
    match p {
        Permission::Disseminate(g, Lambda::Omega) => Permission::Disseminate(g.clone(), lambda(r)),
        Permission::Disseminate(g, Lambda::Fin(n)) => {
            Permission::Disseminate(g.clone(), Lambda::fin(r.gen_range(1..=n.get())).unwrap())
        }
        other => other.clone(),
    }
}

fn sub_perms(r: &mut StdRng, ps: &PermSet, keep: f64) -> PermSet {
    let kept: Vec<&Permission> = ps.iter().filter(|_| r.gen_bool(keep)).collect();
    kept.into_iter().map(|p| lower(r, p)).collect()
}

/// An interface drawn from the policy's own allowances, plus an occasional
/// stray entry so that not every Θ1 is satisfied.
pub fn gen_theta_for(seed: u64, p: &Policy) -> Theta {
    let mut r = rng(seed);
    let mut theta = Theta::new();
    for (t, h) in &p.entries {
        let mut ps = Vec::new();
        paths(h, &mut Vec::new(), &mut ps);
        let n = r.gen_range(1..=3);
        for _ in 0..n {
            let path = ps.choose(&mut r).unwrap().clone();
            let allowed = h.flatten(&path).unwrap().perms;
            let mut perms = sub_perms(&mut r, &allowed, 0.7);
            if r.gen_bool(0.1) {
                perms.insert(permission(&mut r));
            }
            theta.push(t.clone(), FlatHierarchy { path, perms });
        }
    }
    theta
}

/// Some Θ2 with Θ2 ≼ Θ1: entries dropped, permissions dropped, budgets lowered.
pub fn weaken(seed: u64, theta: &Theta) -> Theta {
    let mut r = rng(seed);
    let mut out = Theta::new();
    for (t, th) in theta.iter() {
        if r.gen_bool(0.2) {
            continue;
        }
        let perms = sub_perms(&mut r, &th.perms, 0.7);
        out.push(
            t.clone(),
            FlatHierarchy {
                path: th.path.clone(),
                perms,
            },
        );
    }
    out
}

// ---------------------------------------------------------------------------
// Store programs (encoding)

/// At most two stores and three clients, each client one or two store
/// operations long.
pub fn gen_store_program(seed: u64) -> String {
    let mut r = rng(seed);
    let nstores = r.gen_range(1..=2);
    let refs: Vec<String> = (1..=nstores).map(|i| format!("r{i}")).collect();
    let mut comps: Vec<String> = refs
        .iter()
        .map(|s| format!("store {s} {{id # {}}}", pick(&mut r, &["c1", "c2"])))
        .collect();
    let nclients = r.gen_range(1..=3);
    for i in 0..nclients {
        let ops = r.gen_range(1..=2);
        let mut client = String::new();
        for j in 0..ops {
            let s = refs.choose(&mut r).unwrap();
            let op = match r.gen_range(0..3) {
                0 => format!("{s}?({{x{i}{j} # y{i}{j}}})."),
                1 => format!("{s}?({{_ # y{i}{j}}})."),
                _ => format!(
                    "{s}!<{{{} # {}}}>.",
                    pick(&mut r, &["id", "id", "id9"]),
                    pick(&mut r, &["c1", "c2", "c3"])
                ),
            };
            client.push_str(&op);
        }
        client.push('0');
        comps.push(client);
    }
    comps.join(" | ")
}

// ---------------------------------------------------------------------------
// Structural congruence

/// One congruence axiom applied at a random position of `p`. `alpha`
/// enables renaming of restricted names.
pub fn congruent_variant(seed: u64, p: &Process, alpha: bool) -> Process {
    let mut r = rng(seed);
    rewrite(&mut r, p, alpha)
}

fn rewrite(r: &mut StdRng, p: &Process, alpha: bool) -> Process {
    let descend = r.gen_bool(0.6);
    if descend {
        match p {
            Process::Par(a, b) => {
                return if r.gen_bool(0.5) {
                    Process::par(rewrite(r, a, alpha), (**b).clone())
                } else {
                    Process::par((**a).clone(), rewrite(r, b, alpha))
                };
            }
            Process::Res { name, ty, body } => {
                return Process::Res {
                    name: name.clone(),
                    ty: ty.clone(),
                    body: Box::new(rewrite(r, body, alpha)),
                };
            }
            Process::Repl(b) => return Process::repl(rewrite(r, b, alpha)),
            Process::Out {
                subject,
                objects,
                cont,
            } => {
                return Process::out(subject.clone(), objects.clone(), rewrite(r, cont, alpha));
            }
            Process::Inp {
                subject,
                patterns,
                cont,
            } => {
                return Process::inp(subject.clone(), patterns.clone(), rewrite(r, cont, alpha));
            }
            Process::If {
                op,
                lhs,
                rhs,
                then,
                els,
            } => {
                let (then, els) = if r.gen_bool(0.5) {
                    (rewrite(r, then, alpha), (**els).clone())
                } else {
                    ((**then).clone(), rewrite(r, els, alpha))
                };
                return Process::If {
                    op: *op,
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                    then: Box::new(then),
                    els: Box::new(els),
                };
            }
            _ => {}
        }
    }
    let mut options: Vec<Process> = vec![Process::par(p.clone(), Process::Nil)];
    let fresh = Sym::from("dead0");
    if !p.free_names().contains(&fresh) {
        options.push(Process::res("dead0", None, p.clone()));
    }
    match p {
        Process::Par(a, b) => {
            options.push(Process::par((**b).clone(), (**a).clone()));
            if let Process::Par(x, y) = &**a {
                options.push(Process::par(
                    (**x).clone(),
                    Process::par((**y).clone(), (**b).clone()),
                ));
            }
            if matches!(&**b, Process::Nil) {
                options.push((**a).clone());
            }
        }
        Process::Res { name, ty, body } => {
            if let Process::Res {
                name: m,
                ty: tm,
                body: inner,
            } = &**body
            {
                if m != name {
                    options.push(Process::Res {
                        name: m.clone(),
                        ty: tm.clone(),
                        body: Box::new(Process::Res {
                            name: name.clone(),
                            ty: ty.clone(),
                            body: inner.clone(),
                        }),
                    });
                }
            }
            if let Process::Par(a, b) = &**body {
                if !b.free_names().contains(name) {
                    options.push(Process::par(
                        Process::Res {
                            name: name.clone(),
                            ty: ty.clone(),
                            body: a.clone(),
                        },
                        (**b).clone(),
                    ));
                }
            }
            if alpha {
                let mut avoid = body.free_names();
                avoid.insert(name.clone());
                let fresh = privcalc::kernel::fresh_name(&Sym::from("alpha"), &avoid);
                options.push(Process::Res {
                    name: fresh.clone(),
                    ty: ty.clone(),
                    body: Box::new(privcalc::kernel::rename_name(body, name, &fresh)),
                });
            }
        }
        _ => {}
    }
    options.swap_remove(r.gen_range(0..options.len()))
}

// ---------------------------------------------------------------------------
// Permission maps

pub fn gen_delta(seed: u64) -> privcalc::typing::Delta {
    let mut r = rng(seed);
    let n = r.gen_range(0..3);
    (0..n)
        .map(|_| {
            (
                Sym::from(pick(&mut r, &["t", "u", "w"])),
                perm_set(&mut r, 4),
            )
        })
        .collect()
}

/// Some Δ′ ≼ Δ.
pub fn weaken_delta(seed: u64, d: &privcalc::typing::Delta) -> privcalc::typing::Delta {
    let mut r = rng(seed);
    d.iter()
        .filter(|_| r.gen_bool(0.8))
        .map(|(t, ps)| (t.clone(), ps.clone()))
        .collect::<Vec<_>>()
        .into_iter()
        .map(|(t, ps)| (t, sub_perms(&mut r, &ps, 0.7)))
        .collect()
}

/// Every root-to-node path of `h`.
pub fn policy_paths(h: &Hierarchy) -> Vec<Vec<Sym>> {
    let mut out = Vec::new();
    paths(h, &mut Vec::new(), &mut out);
    out
}

pub fn gen_perm_set(seed: u64, max: usize) -> PermSet {
    perm_set(&mut rng(seed), max)
}
