use std::collections::{BTreeSet, HashMap};

use super::{Delta, Gamma, GammaKey, Theta, Type};
use crate::kernel::{DataValue, Identity, Placeholder, PrivateData, Process, Sym, System, Term};
use crate::policy::{FlatHierarchy, Lambda, PermSet, Permission};

/// Which side of a known/anonymous match receives `identify`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IdDirection {
    /// `t_anon: identify(t_known)`
    #[default]
    Anonymous,
    /// `t_known: identify(t_anon)`
    Known,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub id_direction: IdDirection,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("unbound term `{0}`")]
    UnboundTerm(String),
    #[error("ill-typed match `{lhs}` against `{rhs}`: {reason}")]
    IllTypedMatch {
        lhs: String,
        rhs: String,
        reason: String,
    },
    #[error("reference `{0}` is used by more than one store")]
    LinearityViolation(Sym),
    #[error("restricted name `{0}` needs a type annotation")]
    UnannotatedRestriction(Sym),
    #[error("`{subject}` carries {expected} value(s), found {found}")]
    ArityMismatch {
        subject: String,
        expected: usize,
        found: usize,
    },
    #[error("`{term}` has type {found}, expected {expected}")]
    Mismatch {
        term: String,
        expected: String,
        found: String,
    },
    #[error("`{0}` is not a channel")]
    NotAChannel(String),
    #[error("store on `{0}` under replication")]
    ReplicatedFreeStore(Sym),
    #[error("store `{0}` holds data with a hidden identity")]
    HiddenStore(Sym),
    #[error("process outside of any group exercises permissions")]
    UnclosedBareProcess,
    #[error("`{0}` is only allowed in encoded output")]
    CoreOnlyConstruct(String),
    #[error("pattern `{pattern}` does not fit {ty}")]
    BadPattern { pattern: String, ty: String },
}

type Result<T> = std::result::Result<T, TypeError>;

/// Result of typing a process: Λ, Z and Δ.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProcTyping {
    pub lambda: BTreeSet<Sym>,
    pub z: Vec<(Identity, Sym)>,
    pub delta: Delta,
}

/// Result of typing a system: Λ and Θ.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SysTyping {
    pub lambda: BTreeSet<Sym>,
    pub theta: Theta,
}

#[derive(Clone, Debug)]
enum VarInfo {
    Plain(Type),
    /// data variable of a private pattern
    Data {
        t: Sym,
        g: Sym,
        known: bool,
    },
    /// identity variable of a private pattern
    Id,
}

#[derive(Clone)]
struct Ctx {
    gamma: Gamma,
    vars: HashMap<Sym, VarInfo>,
    opts: Options,
}

/// A classified match operand.
enum Operand {
    Datum { t: Sym, g: Sym, known: bool },
    Purpose { p: Sym, g: Sym },
    Channel,
}

fn mismatch(term: impl ToString, expected: &Type, found: &Type) -> TypeError {
    TypeError::Mismatch {
        term: term.to_string(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

/// Γ key for a private datum: pattern variables count as plain identifiers.
fn data_key(pd: &PrivateData) -> PrivateData {
    let identity = match &pd.identity {
        Identity::Var(x) => Identity::Known(x.clone()),
        i => i.clone(),
    };
    let data = match &pd.data {
        DataValue::Var(y) => DataValue::Const(y.clone()),
        d => d.clone(),
    };
    PrivateData::constructed(identity, data)
}

fn identify(i: &Identity) -> Option<Permission> {
    match i {
        Identity::Hidden => None,
        _ => Some(Permission::ReadId),
    }
}

/// Rules Name, Pdata and Cons over Γ alone.
pub fn type_value(gamma: &Gamma, v: &Term) -> Result<(Type, Delta)> {
    match v {
        Term::Name(n) => gamma
            .name(n)
            .map(|t| (t, Delta::new()))
            .ok_or_else(|| TypeError::UnboundTerm(n.to_string())),
        Term::Private(pd) => {
            let ty = gamma
                .data(&data_key(pd))
                .ok_or_else(|| TypeError::UnboundTerm(pd.to_string()))?;
            let Type::Private { t, .. } = &ty else {
                return Err(TypeError::UnboundTerm(pd.to_string()));
            };
            let d = Delta::single(t, identify(&pd.identity));
            Ok((ty, d))
        }
        Term::Var(x) => Err(TypeError::UnboundTerm(x.to_string())),
        Term::Dual(r) => Err(TypeError::CoreOnlyConstruct(format!("~{r}"))),
    }
}

/// Rules Id, Use, EqP and EqA, plus name/constant equality (empty Δ).
pub fn type_match(gamma: &Gamma, lhs: &Term, rhs: &Term, opts: Options) -> Result<Delta> {
    Ctx::new(gamma, opts).matching(lhs, rhs)
}

pub fn type_process(gamma: &Gamma, p: &Process) -> Result<ProcTyping> {
    type_process_with(gamma, p, Options::default())
}

pub fn type_process_with(gamma: &Gamma, p: &Process, opts: Options) -> Result<ProcTyping> {
    Ctx::new(gamma, opts).process(p)
}

pub fn type_system(gamma: &Gamma, s: &System) -> Result<SysTyping> {
    type_system_with(gamma, s, Options::default())
}

pub fn type_system_with(gamma: &Gamma, s: &System, opts: Options) -> Result<SysTyping> {
    let (lambda, pre) = Ctx::new(gamma, opts).system(s)?;
    let mut theta = Theta::new();
    for (t, path, perms) in pre {
        if path.is_empty() {
            return Err(TypeError::UnclosedBareProcess);
        }
        theta.push(t, FlatHierarchy { path, perms });
    }
    Ok(SysTyping { lambda, theta })
}

type PreTheta = Vec<(Sym, Vec<Sym>, PermSet)>;

fn disjoint(mut a: BTreeSet<Sym>, b: BTreeSet<Sym>) -> Result<BTreeSet<Sym>> {
    for r in b {
        if !a.insert(r.clone()) {
            return Err(TypeError::LinearityViolation(r));
        }
    }
    Ok(a)
}

fn unifiable(a: &Identity, b: &Identity) -> bool {
    matches!(a, Identity::Var(_)) || matches!(b, Identity::Var(_)) || a == b
}

impl Ctx {
    fn new(gamma: &Gamma, opts: Options) -> Self {
        Ctx {
            gamma: gamma.clone(),
            vars: HashMap::new(),
            opts,
        }
    }

    /// Type of a subject or object term.
    fn term(&self, v: &Term) -> Result<Type> {
        match v {
            Term::Var(x) => match self.vars.get(x) {
                Some(VarInfo::Plain(t)) => Ok(t.clone()),
                Some(VarInfo::Data { .. }) | Some(VarInfo::Id) => Err(TypeError::BadPattern {
                    pattern: x.to_string(),
                    ty: "a value position (pattern variables are only matched)".into(),
                }),
                None => Err(TypeError::UnboundTerm(x.to_string())),
            },
            other => type_value(&self.gamma, other).map(|(t, _)| t),
        }
    }

    fn channel(&self, u: &Term) -> Result<(Sym, Vec<Type>)> {
        match self.term(u)? {
            Type::Chan { group, payload } => Ok((group, payload)),
            _ => Err(TypeError::NotAChannel(u.to_string())),
        }
    }

    /// An output object checked against the expected payload type.
    fn object(&self, v: &Term, expected: &Type) -> Result<()> {
        let found = match v {
            Term::Private(pd) => {
                let from_vars = match &pd.data {
                    DataValue::Var(y) => match self.vars.get(y) {
                        Some(VarInfo::Data { t, g, .. }) => Some(Type::Private {
                            t: t.clone(),
                            g: g.clone(),
                        }),
                        _ => None,
                    },
                    _ => None,
                };
                match from_vars.or_else(|| self.gamma.data(&data_key(pd))) {
                    Some(t) => t,
                    None if matches!(expected, Type::Private { .. }) => expected.clone(),
                    None => return Err(TypeError::UnboundTerm(pd.to_string())),
                }
            }
            _ => self.term(v)?,
        };
        if &found != expected {
            return Err(mismatch(v, expected, &found));
        }
        Ok(())
    }

    fn operand(&self, v: &Term) -> Result<Operand> {
        match v {
            Term::Var(x) => match self.vars.get(x) {
                Some(VarInfo::Data { t, g, known }) => Ok(Operand::Datum {
                    t: t.clone(),
                    g: g.clone(),
                    known: *known,
                }),
                Some(VarInfo::Plain(Type::Purpose { p, g })) => Ok(Operand::Purpose {
                    p: p.clone(),
                    g: g.clone(),
                }),
                Some(VarInfo::Plain(Type::Chan { .. })) => Ok(Operand::Channel),
                Some(_) => Err(TypeError::BadPattern {
                    pattern: x.to_string(),
                    ty: "a match operand".into(),
                }),
                None => Err(TypeError::UnboundTerm(x.to_string())),
            },
            Term::Name(n) => match self.gamma.name(n) {
                Some(Type::Purpose { p, g }) => Ok(Operand::Purpose { p, g }),
                Some(_) => Ok(Operand::Channel),
                None => Err(TypeError::UnboundTerm(n.to_string())),
            },
            Term::Private(pd) => match self.gamma.data(&data_key(pd)) {
                Some(Type::Private { t, g }) => Ok(Operand::Datum {
                    t,
                    g,
                    known: pd.identity != Identity::Hidden,
                }),
                _ => Err(TypeError::UnboundTerm(pd.to_string())),
            },
            Term::Dual(r) => Err(TypeError::CoreOnlyConstruct(format!("~{r}"))),
        }
    }

    fn matching(&self, lhs: &Term, rhs: &Term) -> Result<Delta> {
        let ill = |reason: &str| TypeError::IllTypedMatch {
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            reason: reason.to_string(),
        };
        let datum = |t: &Sym, known: bool| Delta::single(t, known.then_some(Permission::ReadId));
        let (a, b) = (self.operand(lhs)?, self.operand(rhs)?);
        match (&a, &b) {
            (Operand::Channel, Operand::Channel) => Ok(Delta::new()),
            (Operand::Purpose { g: g1, .. }, Operand::Purpose { g: g2, .. }) => {
                if g1 != g2 {
                    return Err(ill("ground types differ"));
                }
                Ok(Delta::new())
            }
            (Operand::Datum { t, g, known }, Operand::Purpose { p, g: gp })
            | (Operand::Purpose { p, g: gp }, Operand::Datum { t, g, known }) => {
                if g != gp {
                    return Err(ill("ground types differ"));
                }
                let mut d = datum(t, *known);
                d.add(t, Permission::Usage(p.clone()));
                Ok(d)
            }
            (
                Operand::Datum {
                    t: t1,
                    g: g1,
                    known: k1,
                },
                Operand::Datum {
                    t: t2,
                    g: g2,
                    known: k2,
                },
            ) => {
                if g1 != g2 {
                    return Err(ill("ground types differ"));
                }
                let mut d = datum(t1, *k1).union(&datum(t2, *k2));
                if k1 == k2 {
                    if t1 != t2 {
                        return Err(ill("compared data have different private types"));
                    }
                    return Ok(d);
                }
                let (known_t, anon_t) = if *k1 { (t1, t2) } else { (t2, t1) };
                match self.opts.id_direction {
                    IdDirection::Anonymous => d.add(anon_t, Permission::Identify(known_t.clone())),
                    IdDirection::Known => d.add(known_t, Permission::Identify(anon_t.clone())),
                }
                Ok(d)
            }
            _ => Err(ill("operands of different kinds")),
        }
    }

    fn bind(&mut self, k: &Placeholder, ty: &Type) -> Result<Delta> {
        let bad = || TypeError::BadPattern {
            pattern: k.to_string(),
            ty: ty.to_string(),
        };
        match (k, ty) {
            (Placeholder::Var(_), Type::Private { .. }) => Err(bad()),
            (Placeholder::Var(x), _) => {
                self.vars.insert(x.clone(), VarInfo::Plain(ty.clone()));
                Ok(Delta::new())
            }
            (Placeholder::Priv(x, y), Type::Private { t, g }) => {
                if let Some(declared) = self.gamma.pattern(Some(x), y) {
                    if &declared != ty {
                        return Err(mismatch(k, &declared, ty));
                    }
                }
                self.vars.insert(x.clone(), VarInfo::Id);
                self.vars.insert(
                    y.clone(),
                    VarInfo::Data {
                        t: t.clone(),
                        g: g.clone(),
                        known: true,
                    },
                );
                Ok(Delta::single(t, [Permission::ReadId]))
            }
            (Placeholder::Anon(y), Type::Private { t, g }) => {
                if let Some(declared) = self.gamma.pattern(None, y) {
                    if &declared != ty {
                        return Err(mismatch(k, &declared, ty));
                    }
                }
                self.vars.insert(
                    y.clone(),
                    VarInfo::Data {
                        t: t.clone(),
                        g: g.clone(),
                        known: false,
                    },
                );
                Ok(Delta::single(t, []))
            }
            _ => Err(bad()),
        }
    }

    fn restricted(&self, name: &Sym, ty: &Option<crate::kernel::PrivacyType>) -> Result<Type> {
        match ty {
            Some(t) => Ok(self.gamma.resolve(t)),
            None => self
                .gamma
                .name(name)
                .ok_or_else(|| TypeError::UnannotatedRestriction(name.clone())),
        }
    }

    fn process(&self, p: &Process) -> Result<ProcTyping> {
        match p {
            Process::Nil => Ok(ProcTyping::default()),
            Process::Store { reference, datum } => {
                let rt = self
                    .gamma
                    .name(reference)
                    .ok_or_else(|| TypeError::UnboundTerm(reference.to_string()))?;
                let Some((_, t, g)) = rt.reference_of() else {
                    return Err(TypeError::NotAChannel(reference.to_string()));
                };
                let expected = Type::Private {
                    t: t.clone(),
                    g: g.clone(),
                };
                if datum.identity == Identity::Hidden {
                    return Err(TypeError::HiddenStore(reference.clone()));
                }
                self.object(&Term::Private(datum.clone()), &expected)?;
                Ok(ProcTyping {
                    lambda: BTreeSet::from([reference.clone()]),
                    z: vec![(datum.identity.clone(), t.clone())],
                    delta: Delta::single(t, [Permission::Store]),
                })
            }
            Process::Out {
                subject,
                objects,
                cont,
            } => {
                let (group, payload) = self.channel(subject)?;
                if payload.len() != objects.len() {
                    return Err(TypeError::ArityMismatch {
                        subject: subject.to_string(),
                        expected: payload.len(),
                        found: objects.len(),
                    });
                }
                let mut res = self.process(cont)?;
                for (v, ty) in objects.iter().zip(&payload) {
                    self.object(v, ty)?;
                    match ty {
                        Type::Private { t, .. } => res.delta.add(t, Permission::Update),
                        _ => {
                            if let Some((_, t, _)) = ty.reference_of() {
                                res.delta
                                    .add(t, Permission::Disseminate(group.clone(), Lambda::ONE));
                            }
                        }
                    }
                }
                Ok(res)
            }
            Process::Inp {
                subject,
                patterns,
                cont,
            } => {
                let (_, payload) = self.channel(subject)?;
                if payload.len() != patterns.len() {
                    return Err(TypeError::ArityMismatch {
                        subject: subject.to_string(),
                        expected: payload.len(),
                        found: patterns.len(),
                    });
                }
                let mut inner = self.clone();
                let mut d = Delta::new();
                for (k, ty) in patterns.iter().zip(&payload) {
                    d.merge(&inner.bind(k, ty)?);
                    match ty {
                        Type::Private { t, .. } => d.add(t, Permission::Read),
                        _ => {
                            if let Some((_, t, _)) = ty.reference_of() {
                                d.add(t, Permission::Reference);
                            }
                        }
                    }
                }
                let mut res = inner.process(cont)?;
                res.delta.merge(&d);
                Ok(res)
            }
            Process::Res { name, ty, body } => {
                let ty = self.restricted(name, ty)?;
                let mut inner = self.clone();
                inner.gamma.set(GammaKey::Name(name.clone()), &ty);
                let mut res = inner.process(body)?;
                res.lambda.remove(name);
                Ok(res)
            }
            Process::Repl(body) => {
                let res = self.process(body)?;
                if let Some(r) = res.lambda.iter().next() {
                    return Err(TypeError::ReplicatedFreeStore(r.clone()));
                }
                let mut delta = res.delta.star();
                for (_, t) in &res.z {
                    delta.add(t, Permission::Aggregate);
                }
                Ok(ProcTyping {
                    lambda: res.lambda,
                    z: res.z,
                    delta,
                })
            }
            Process::Par(a, b) => {
                let (ra, rb) = (self.process(a)?, self.process(b)?);
                let mut delta = ra.delta.union(&rb.delta);
                for (i, t) in &ra.z {
                    for (j, u) in &rb.z {
                        if unifiable(i, j) {
                            delta.add(t, Permission::Aggregate);
                            delta.add(u, Permission::Aggregate);
                        }
                    }
                }
                let mut z = ra.z;
                z.extend(rb.z);
                Ok(ProcTyping {
                    lambda: disjoint(ra.lambda, rb.lambda)?,
                    z,
                    delta,
                })
            }
            Process::If {
                lhs,
                rhs,
                then,
                els,
                ..
            } => {
                let d = self.matching(lhs, rhs)?;
                let (ra, rb) = (self.process(then)?, self.process(els)?);
                let mut z = ra.z;
                z.extend(rb.z);
                let mut lambda = ra.lambda;
                lambda.extend(rb.lambda);
                Ok(ProcTyping {
                    lambda,
                    z,
                    delta: d.union(&ra.delta).union(&rb.delta),
                })
            }
            Process::Select { subject, .. } => {
                Err(TypeError::CoreOnlyConstruct(format!("{subject} <|")))
            }
            Process::Branch { subject, .. } => {
                Err(TypeError::CoreOnlyConstruct(format!("{subject} |>")))
            }
        }
    }

    fn system(&self, s: &System) -> Result<(BTreeSet<Sym>, PreTheta)> {
        let wrap = |g: &Sym, pre: PreTheta| {
            pre.into_iter()
                .map(|(t, mut path, ps)| {
                    path.insert(0, g.clone());
                    (t, path, ps)
                })
                .collect::<PreTheta>()
        };
        match s {
            System::Group { group, body } => {
                let res = self.process(body)?;
                let pre = res
                    .delta
                    .iter()
                    .map(|(t, ps)| (t.clone(), vec![group.clone()], ps.clone()))
                    .collect();
                Ok((res.lambda, pre))
            }
            System::GroupSys { group, body } => {
                let (l, pre) = self.system(body)?;
                Ok((l, wrap(group, pre)))
            }
            System::Par(a, b) => {
                let (la, mut pa) = self.system(a)?;
                let (lb, pb) = self.system(b)?;
                pa.extend(pb);
                Ok((disjoint(la, lb)?, pa))
            }
            System::Res { name, ty, body } => {
                let ty = self.restricted(name, ty)?;
                let mut inner = self.clone();
                inner.gamma.set(GammaKey::Name(name.clone()), &ty);
                let (mut l, pre) = inner.system(body)?;
                l.remove(name);
                Ok((l, pre))
            }
            System::Bare(p) => {
                let res = self.process(p)?;
                let pre = res
                    .delta
                    .iter()
                    .map(|(t, ps)| (t.clone(), Vec::new(), ps.clone()))
                    .collect();
                Ok((res.lambda, pre))
            }
        }
    }
}
