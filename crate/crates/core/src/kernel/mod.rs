//! Abstract syntax of the calculus: terms, processes, systems and the
//! binding machinery (free names, substitution, alpha-equivalence,
//! structural normalization).

mod normalize;
mod subst;

pub use normalize::{alpha_eq, alpha_eq_system, normalize, normalize_system};
pub use subst::{
    compatible, fresh_name, rename_name, substitute, substitute_all, substitute_term, SubstError,
};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// An interned-ish identifier. Cloning is a refcount bump.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(s: &str) -> Self {
        Sym(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Self {
        Sym::new(s)
    }
}

impl From<String> for Sym {
    fn from(s: String) -> Self {
        Sym(Arc::from(s))
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Identity {
    Known(Sym),
    Hidden,
    Var(Sym),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DataValue {
    Const(Sym),
    Var(Sym),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("private data {0} is not a communicable form")]
pub struct FormError(pub String);

/// `ι ⊗ δ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrivateData {
    pub identity: Identity,
    pub data: DataValue,
}

impl PrivateData {
    /// Builds one of the four communicable forms: `id⊗c`, `_⊗c`, `x⊗y`, `_⊗x`.
    pub fn communicable(identity: Identity, data: DataValue) -> Result<Self, FormError> {
        let pd = PrivateData { identity, data };
        if pd.is_communicable() {
            Ok(pd)
        } else {
            Err(FormError(pd.to_string()))
        }
    }

    /// Any combination. Used for store contents and output objects, where
    /// partially instantiated data such as `id⊗y` or `x⊗c` are written.
    pub fn constructed(identity: Identity, data: DataValue) -> Self {
        PrivateData { identity, data }
    }

    pub fn known(id: &str, c: &str) -> Self {
        PrivateData {
            identity: Identity::Known(id.into()),
            data: DataValue::Const(c.into()),
        }
    }

    pub fn hidden(c: &str) -> Self {
        PrivateData {
            identity: Identity::Hidden,
            data: DataValue::Const(c.into()),
        }
    }

    pub fn is_communicable(&self) -> bool {
        matches!(
            (&self.identity, &self.data),
            (Identity::Known(_), DataValue::Const(_))
                | (Identity::Hidden, DataValue::Const(_))
                | (Identity::Var(_), DataValue::Var(_))
                | (Identity::Hidden, DataValue::Var(_))
        )
    }

    /// No variables left: `id⊗c` or `_⊗c`.
    pub fn is_ground(&self) -> bool {
        matches!(
            (&self.identity, &self.data),
            (Identity::Known(_) | Identity::Hidden, DataValue::Const(_))
        )
    }

    /// `id⊗c` becomes `_⊗c`.
    pub fn anonymized(&self) -> Self {
        PrivateData {
            identity: Identity::Hidden,
            data: self.data.clone(),
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &Sym> {
        let i = match &self.identity {
            Identity::Var(x) => Some(x),
            _ => None,
        };
        let d = match &self.data {
            DataValue::Var(y) => Some(y),
            _ => None,
        };
        i.into_iter().chain(d)
    }
}

impl fmt::Display for PrivateData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match &self.identity {
            Identity::Known(s) | Identity::Var(s) => s.as_str(),
            Identity::Hidden => "_",
        };
        let d = match &self.data {
            DataValue::Const(s) | DataValue::Var(s) => s.as_str(),
        };
        write!(f, "{{{i} # {d}}}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// Channel, reference or constant; the sort comes from Γ.
    Name(Sym),
    /// Store-side endpoint `~r`.
    Dual(Sym),
    Private(PrivateData),
    /// Bound by an enclosing input pattern.
    Var(Sym),
}

impl Term {
    pub fn name(s: &str) -> Self {
        Term::Name(s.into())
    }

    pub fn var(s: &str) -> Self {
        Term::Var(s.into())
    }

    /// Constant terms: everything except variables (and data holding variables).
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Name(_) | Term::Dual(_) => true,
            Term::Private(pd) => pd.is_ground(),
            Term::Var(_) => false,
        }
    }

    /// The name this term refers to when used as a subject.
    pub fn subject_name(&self) -> Option<&Sym> {
        match self {
            Term::Name(n) | Term::Dual(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Name(s) | Term::Var(s) => write!(f, "{s}"),
            Term::Dual(s) => write!(f, "~{s}"),
            Term::Private(pd) => write!(f, "{pd}"),
        }
    }
}

/// Input placeholders `x`, `x⊗y`, `_⊗x`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Placeholder {
    Var(Sym),
    Priv(Sym, Sym),
    Anon(Sym),
}

impl Placeholder {
    pub fn vars(&self) -> Vec<&Sym> {
        match self {
            Placeholder::Var(x) | Placeholder::Anon(x) => vec![x],
            Placeholder::Priv(x, y) => vec![x, y],
        }
    }

    pub fn is_private(&self) -> bool {
        !matches!(self, Placeholder::Var(_))
    }
}

impl fmt::Display for Placeholder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Placeholder::Var(x) => write!(f, "{x}"),
            Placeholder::Priv(x, y) => write!(f, "{{{x} # {y}}}"),
            Placeholder::Anon(y) => write!(f, "{{_ # {y}}}"),
        }
    }
}

/// Surface type expression. Whether `X<g>` names a private type or a
/// purpose is decided by the typing environment.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrivacyType {
    Base {
        name: Sym,
        ground: Sym,
    },
    Chan {
        group: Sym,
        payload: Vec<PrivacyType>,
    },
}

impl PrivacyType {
    pub fn base(name: &str, ground: &str) -> Self {
        PrivacyType::Base {
            name: name.into(),
            ground: ground.into(),
        }
    }

    pub fn chan(group: &str, payload: Vec<PrivacyType>) -> Self {
        PrivacyType::Chan {
            group: group.into(),
            payload,
        }
    }
}

impl fmt::Display for PrivacyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrivacyType::Base { name, ground } => write!(f, "{name}<{ground}>"),
            PrivacyType::Chan { group, payload } => {
                write!(f, "{group}[")?;
                for (i, t) in payload.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MatchOp {
    Eq,
    Gt,
}

/// Labels of the select/branch extension used by the store encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BranchLabel {
    Rd,
    Wr,
    Ok,
    Fail,
}

impl BranchLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BranchLabel::Rd => "rd",
            BranchLabel::Wr => "wr",
            BranchLabel::Ok => "ok",
            BranchLabel::Fail => "fail",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "rd" => BranchLabel::Rd,
            "wr" => BranchLabel::Wr,
            "ok" => BranchLabel::Ok,
            "fail" => BranchLabel::Fail,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Process {
    Nil,
    Out {
        subject: Term,
        objects: Vec<Term>,
        cont: Box<Process>,
    },
    Inp {
        subject: Term,
        patterns: Vec<Placeholder>,
        cont: Box<Process>,
    },
    Res {
        name: Sym,
        ty: Option<PrivacyType>,
        body: Box<Process>,
    },
    Par(Box<Process>, Box<Process>),
    Repl(Box<Process>),
    If {
        op: MatchOp,
        lhs: Term,
        rhs: Term,
        then: Box<Process>,
        els: Box<Process>,
    },
    Store {
        reference: Sym,
        datum: PrivateData,
    },
    /// `a <| l . P` (encoding target only).
    Select {
        subject: Term,
        label: BranchLabel,
        cont: Box<Process>,
    },
    /// `a |> { l: P, ... }` (encoding target only).
    Branch {
        subject: Term,
        arms: Vec<(BranchLabel, Process)>,
    },
}

impl Process {
    pub fn out(subject: Term, objects: Vec<Term>, cont: Process) -> Self {
        Process::Out {
            subject,
            objects,
            cont: Box::new(cont),
        }
    }

    pub fn inp(subject: Term, patterns: Vec<Placeholder>, cont: Process) -> Self {
        Process::Inp {
            subject,
            patterns,
            cont: Box::new(cont),
        }
    }

    pub fn res(name: &str, ty: Option<PrivacyType>, body: Process) -> Self {
        Process::Res {
            name: name.into(),
            ty,
            body: Box::new(body),
        }
    }

    pub fn par(a: Process, b: Process) -> Self {
        Process::Par(Box::new(a), Box::new(b))
    }

    /// Left-nested parallel composition; `Nil` for an empty list.
    pub fn par_all(items: impl IntoIterator<Item = Process>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Process::Nil,
            Some(first) => it.fold(first, Process::par),
        }
    }

    pub fn repl(p: Process) -> Self {
        Process::Repl(Box::new(p))
    }

    pub fn if_eq(lhs: Term, rhs: Term, then: Process, els: Process) -> Self {
        Process::If {
            op: MatchOp::Eq,
            lhs,
            rhs,
            then: Box::new(then),
            els: Box::new(els),
        }
    }

    pub fn store(r: &str, datum: PrivateData) -> Self {
        Process::Store {
            reference: r.into(),
            datum,
        }
    }

    pub fn free_names(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        free_names_proc(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn free_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        free_vars_proc(self, &mut Vec::new(), &mut out);
        out
    }

    /// Number of AST nodes (processes, not terms).
    pub fn size(&self) -> usize {
        1 + match self {
            Process::Nil | Process::Store { .. } => 0,
            Process::Out { cont, .. }
            | Process::Inp { cont, .. }
            | Process::Select { cont, .. } => cont.size(),
            Process::Res { body, .. } | Process::Repl(body) => body.size(),
            Process::Par(a, b) => a.size() + b.size(),
            Process::If { then, els, .. } => then.size() + els.size(),
            Process::Branch { arms, .. } => arms.iter().map(|(_, p)| p.size()).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        1 + match self {
            Process::Nil | Process::Store { .. } => 0,
            Process::Out { cont, .. }
            | Process::Inp { cont, .. }
            | Process::Select { cont, .. } => cont.depth(),
            Process::Res { body, .. } | Process::Repl(body) => body.depth(),
            Process::Par(a, b) => a.depth().max(b.depth()),
            Process::If { then, els, .. } => then.depth().max(els.depth()),
            Process::Branch { arms, .. } => arms.iter().map(|(_, p)| p.depth()).max().unwrap_or(0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum System {
    Group {
        group: Sym,
        body: Process,
    },
    GroupSys {
        group: Sym,
        body: Box<System>,
    },
    Par(Box<System>, Box<System>),
    Res {
        name: Sym,
        ty: Option<PrivacyType>,
        body: Box<System>,
    },
    /// A process sitting directly in a system parallel composition; it
    /// belongs to the nearest enclosing group.
    Bare(Process),
}

impl System {
    pub fn group(g: &str, body: Process) -> Self {
        System::Group {
            group: g.into(),
            body,
        }
    }

    pub fn group_sys(g: &str, body: System) -> Self {
        System::GroupSys {
            group: g.into(),
            body: Box::new(body),
        }
    }

    pub fn par(a: System, b: System) -> Self {
        System::Par(Box::new(a), Box::new(b))
    }

    pub fn par_all(items: impl IntoIterator<Item = System>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => System::Bare(Process::Nil),
            Some(first) => it.fold(first, System::par),
        }
    }

    pub fn res(name: &str, ty: Option<PrivacyType>, body: System) -> Self {
        System::Res {
            name: name.into(),
            ty,
            body: Box::new(body),
        }
    }

    pub fn free_names(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        free_names_sys(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn free_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.for_each_process(&mut |p| out.extend(p.free_vars()));
        out
    }

    fn for_each_process(&self, f: &mut impl FnMut(&Process)) {
        match self {
            System::Group { body, .. } | System::Bare(body) => f(body),
            System::GroupSys { body, .. } | System::Res { body, .. } => body.for_each_process(f),
            System::Par(a, b) => {
                a.for_each_process(f);
                b.for_each_process(f);
            }
        }
    }

    pub fn size(&self) -> usize {
        1 + match self {
            System::Group { body, .. } | System::Bare(body) => body.size(),
            System::GroupSys { body, .. } | System::Res { body, .. } => body.size(),
            System::Par(a, b) => a.size() + b.size(),
        }
    }

    /// Groups occurring anywhere in the system.
    pub fn groups(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        fn go(s: &System, out: &mut BTreeSet<Sym>) {
            match s {
                System::Group { group, .. } => {
                    out.insert(group.clone());
                }
                System::GroupSys { group, body } => {
                    out.insert(group.clone());
                    go(body, out);
                }
                System::Par(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                System::Res { body, .. } => go(body, out),
                System::Bare(_) => {}
            }
        }
        go(self, &mut out);
        out
    }
}

fn term_names(t: &Term, bound: &[Sym], out: &mut BTreeSet<Sym>) {
    if let Term::Name(n) | Term::Dual(n) = t {
        if !bound.contains(n) {
            out.insert(n.clone());
        }
    }
}

fn free_names_proc(p: &Process, bound: &mut Vec<Sym>, out: &mut BTreeSet<Sym>) {
    match p {
        Process::Nil => {}
        Process::Out {
            subject,
            objects,
            cont,
        } => {
            term_names(subject, bound, out);
            objects.iter().for_each(|o| term_names(o, bound, out));
            free_names_proc(cont, bound, out);
        }
        Process::Inp { subject, cont, .. } | Process::Select { subject, cont, .. } => {
            term_names(subject, bound, out);
            free_names_proc(cont, bound, out);
        }
        Process::Branch { subject, arms } => {
            term_names(subject, bound, out);
            arms.iter()
                .for_each(|(_, q)| free_names_proc(q, bound, out));
        }
        Process::Res { name, body, .. } => {
            bound.push(name.clone());
            free_names_proc(body, bound, out);
            bound.pop();
        }
        Process::Par(a, b) => {
            free_names_proc(a, bound, out);
            free_names_proc(b, bound, out);
        }
        Process::Repl(b) => free_names_proc(b, bound, out),
        Process::If {
            lhs,
            rhs,
            then,
            els,
            ..
        } => {
            term_names(lhs, bound, out);
            term_names(rhs, bound, out);
            free_names_proc(then, bound, out);
            free_names_proc(els, bound, out);
        }
        Process::Store { reference, .. } => {
            if !bound.contains(reference) {
                out.insert(reference.clone());
            }
        }
    }
}

fn free_names_sys(s: &System, bound: &mut Vec<Sym>, out: &mut BTreeSet<Sym>) {
    match s {
        System::Group { body, .. } | System::Bare(body) => {
            for n in body.free_names() {
                if !bound.contains(&n) {
                    out.insert(n);
                }
            }
        }
        System::GroupSys { body, .. } => free_names_sys(body, bound, out),
        System::Par(a, b) => {
            free_names_sys(a, bound, out);
            free_names_sys(b, bound, out);
        }
        System::Res { name, body, .. } => {
            bound.push(name.clone());
            free_names_sys(body, bound, out);
            bound.pop();
        }
    }
}

fn term_vars(t: &Term, bound: &[Sym], out: &mut BTreeSet<Sym>) {
    match t {
        Term::Var(x) if !bound.contains(x) => {
            out.insert(x.clone());
        }
        Term::Private(pd) => {
            for v in pd.vars() {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        }
        _ => {}
    }
}

fn free_vars_proc(p: &Process, bound: &mut Vec<Sym>, out: &mut BTreeSet<Sym>) {
    match p {
        Process::Nil => {}
        Process::Out {
            subject,
            objects,
            cont,
        } => {
            term_vars(subject, bound, out);
            objects.iter().for_each(|o| term_vars(o, bound, out));
            free_vars_proc(cont, bound, out);
        }
        Process::Inp {
            subject,
            patterns,
            cont,
        } => {
            term_vars(subject, bound, out);
            let n = bound.len();
            for k in patterns {
                bound.extend(k.vars().into_iter().cloned());
            }
            free_vars_proc(cont, bound, out);
            bound.truncate(n);
        }
        Process::Select { subject, cont, .. } => {
            term_vars(subject, bound, out);
            free_vars_proc(cont, bound, out);
        }
        Process::Branch { subject, arms } => {
            term_vars(subject, bound, out);
            arms.iter().for_each(|(_, q)| free_vars_proc(q, bound, out));
        }
        Process::Res { body, .. } | Process::Repl(body) => free_vars_proc(body, bound, out),
        Process::Par(a, b) => {
            free_vars_proc(a, bound, out);
            free_vars_proc(b, bound, out);
        }
        Process::If {
            lhs,
            rhs,
            then,
            els,
            ..
        } => {
            term_vars(lhs, bound, out);
            term_vars(rhs, bound, out);
            free_vars_proc(then, bound, out);
            free_vars_proc(els, bound, out);
        }
        Process::Store { datum, .. } => {
            for v in datum.vars() {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        }
    }
}
