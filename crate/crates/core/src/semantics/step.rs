//! Transition enumeration. Every state is alpha-renamed first so that
//! binders are pairwise distinct and disjoint from free names; the side
//! conditions of Res/Scp/LPar/RPar then hold by construction.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use super::{Comm, Label, Mode, Step};
use crate::kernel::{
    fresh_name, rename_name, substitute_all, BranchLabel, DataValue, Identity, MatchOp,
    PrivacyType, PrivateData, Process, Sym, System, Term,
};

type Acc<T> = Rc<dyn Fn(&[Term]) -> Option<T>>;
type Wrap<T> = Rc<dyn Fn(T) -> T>;
type Ann = HashMap<Sym, PrivacyType>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Channel,
    /// private-data pattern on a reference
    Reference,
    /// the store side `~r`
    Store,
}

enum Commit<T> {
    Out {
        extr: Vec<(Sym, Option<PrivacyType>)>,
        subj: Term,
        objs: Vec<Term>,
        cont: T,
    },
    Inp {
        subj: Term,
        arity: usize,
        shape: Shape,
        store_id: Option<Sym>,
        acc: Acc<T>,
    },
    Sel {
        subj: Term,
        label: BranchLabel,
        cont: T,
    },
    Offer {
        subj: Term,
        acc: Rc<dyn Fn(BranchLabel) -> Option<T>>,
    },
}

impl<T: Clone + 'static> Commit<T> {
    fn map<U: 'static>(&self, f: Rc<dyn Fn(T) -> U>) -> Commit<U> {
        match self {
            Commit::Out {
                extr,
                subj,
                objs,
                cont,
            } => Commit::Out {
                extr: extr.clone(),
                subj: subj.clone(),
                objs: objs.clone(),
                cont: f(cont.clone()),
            },
            Commit::Inp {
                subj,
                arity,
                shape,
                store_id,
                acc,
            } => {
                let acc = acc.clone();
                Commit::Inp {
                    subj: subj.clone(),
                    arity: *arity,
                    shape: *shape,
                    store_id: store_id.clone(),
                    acc: Rc::new(move |vs| acc(vs).map(|t| f(t))),
                }
            }
            Commit::Sel { subj, label, cont } => Commit::Sel {
                subj: subj.clone(),
                label: *label,
                cont: f(cont.clone()),
            },
            Commit::Offer { subj, acc } => {
                let acc = acc.clone();
                Commit::Offer {
                    subj: subj.clone(),
                    acc: Rc::new(move |l| acc(l).map(|t| f(t))),
                }
            }
        }
    }

    fn subject(&self) -> &Term {
        match self {
            Commit::Out { subj, .. }
            | Commit::Inp { subj, .. }
            | Commit::Sel { subj, .. }
            | Commit::Offer { subj, .. } => subj,
        }
    }

    /// Rules Res and Scp for a binder `n`.
    fn restrict(&self, n: &Sym, ty: &Option<PrivacyType>, wrap: Wrap<T>) -> Option<Commit<T>> {
        if self.subject().subject_name() == Some(n) {
            return None;
        }
        if let Commit::Out {
            extr,
            subj,
            objs,
            cont,
        } = self
        {
            if objs.iter().any(|o| matches!(o, Term::Name(m) if m == n)) {
                let mut extr = extr.clone();
                extr.push((n.clone(), ty.clone()));
                return Some(Commit::Out {
                    extr,
                    subj: subj.clone(),
                    objs: objs.clone(),
                    cont: cont.clone(),
                });
            }
        }
        Some(self.map(wrap))
    }
}

struct Tau<T> {
    next: T,
    comm: Option<Comm>,
}

impl<T: 'static> Tau<T> {
    fn map<U>(self, f: &dyn Fn(T) -> U) -> Tau<U> {
        Tau {
            next: f(self.next),
            comm: self.comm,
        }
    }
}

/// Commitments and internal steps of one node.
struct Acts<T> {
    commits: Vec<Commit<T>>,
    taus: Vec<Tau<T>>,
}

impl<T> Default for Acts<T> {
    fn default() -> Self {
        Acts {
            commits: Vec::new(),
            taus: Vec::new(),
        }
    }
}

/// The data component a conditional compares.
fn atom(t: &Term) -> Option<&Sym> {
    match t {
        Term::Name(n) | Term::Dual(n) => Some(n),
        Term::Private(pd) => match &pd.data {
            DataValue::Const(c) if !matches!(pd.identity, Identity::Var(_)) => Some(c),
            _ => None,
        },
        Term::Var(_) => None,
    }
}

/// Conditionals on ground operands; `None` when an operand is open.
pub fn eval_condition(op: MatchOp, lhs: &Term, rhs: &Term) -> Option<bool> {
    let (a, b) = (atom(lhs)?, atom(rhs)?);
    Some(match op {
        MatchOp::Eq => a == b,
        MatchOp::Gt => match (a.as_str().parse::<i64>(), b.as_str().parse::<i64>()) {
            (Ok(x), Ok(y)) => x > y,
            _ => a.as_str() > b.as_str(),
        },
    })
}

fn ground_known(pd: &PrivateData) -> Option<&Sym> {
    match (&pd.identity, &pd.data) {
        (Identity::Known(id), DataValue::Const(_)) => Some(id),
        _ => None,
    }
}

fn single_private(objs: &[Term]) -> Option<&PrivateData> {
    match objs {
        [Term::Private(pd)] => Some(pd),
        _ => None,
    }
}

pub(super) struct Engine {
    mode: Mode,
    ann: Ann,
}

impl Engine {
    fn new(mode: Mode) -> Self {
        Engine {
            mode,
            ann: Ann::new(),
        }
    }

    fn process(&self, p: &Process) -> Acts<Process> {
        match p {
            Process::Nil => Acts::default(),
            Process::Out {
                subject,
                objects,
                cont,
            } => {
                if subject.subject_name().is_none()
                    || matches!(subject, Term::Var(_))
                    || !objects.iter().all(Term::is_ground)
                {
                    return Acts::default();
                }
                Acts {
                    commits: vec![Commit::Out {
                        extr: vec![],
                        subj: subject.clone(),
                        objs: objects.clone(),
                        cont: (**cont).clone(),
                    }],
                    taus: vec![],
                }
            }
            Process::Inp {
                subject,
                patterns,
                cont,
            } => {
                if matches!(subject, Term::Var(_) | Term::Private(_)) {
                    return Acts::default();
                }
                let shape = match patterns.as_slice() {
                    [k] if k.is_private() => Shape::Reference,
                    _ => Shape::Channel,
                };
                let (cont, pats) = ((**cont).clone(), patterns.clone());
                Acts {
                    commits: vec![Commit::Inp {
                        subj: subject.clone(),
                        arity: patterns.len(),
                        shape,
                        store_id: None,
                        acc: Rc::new(move |vs| substitute_all(&cont, vs, &pats).ok()),
                    }],
                    taus: vec![],
                }
            }
            Process::Store { reference, datum } => {
                let mut commits = Vec::new();
                if ground_known(datum).is_some() {
                    commits.push(Commit::Out {
                        extr: vec![],
                        subj: Term::Dual(reference.clone()),
                        objs: vec![Term::Private(datum.clone())],
                        cont: p.clone(),
                    });
                }
                if datum.identity != Identity::Hidden {
                    let (r, current) = (reference.clone(), datum.identity.clone());
                    commits.push(Commit::Inp {
                        subj: Term::Dual(reference.clone()),
                        arity: 1,
                        shape: Shape::Store,
                        store_id: match &datum.identity {
                            Identity::Known(id) => Some(id.clone()),
                            _ => None,
                        },
                        acc: Rc::new(move |vs| {
                            let pd = single_private(vs)?;
                            let id = ground_known(pd)?;
                            let fits = match &current {
                                Identity::Var(_) => true,
                                Identity::Known(k) => k == id,
                                Identity::Hidden => false,
                            };
                            fits.then(|| Process::Store {
                                reference: r.clone(),
                                datum: pd.clone(),
                            })
                        }),
                    });
                }
                Acts {
                    commits,
                    taus: vec![],
                }
            }
            Process::Res { name, ty, body } => {
                let inner = self.process(body);
                let (n, t) = (name.clone(), ty.clone());
                let wrap: Wrap<Process> = Rc::new(move |q| Process::Res {
                    name: n.clone(),
                    ty: t.clone(),
                    body: Box::new(q),
                });
                Acts {
                    commits: inner
                        .commits
                        .iter()
                        .filter_map(|c| c.restrict(name, ty, wrap.clone()))
                        .collect(),
                    taus: inner.taus.into_iter().map(|s| s.map(&*wrap)).collect(),
                }
            }
            Process::Par(a, b) => {
                let (a, b) = ((**a).clone(), (**b).clone());
                let (la, lb) = (self.process(&a), self.process(&b));
                let join: Rc<dyn Fn(Process, Process) -> Process> = Rc::new(Process::par);
                let res: Rc<dyn Fn(Sym, Option<PrivacyType>, Process) -> Process> =
                    Rc::new(|n, ty, q| Process::Res {
                        name: n,
                        ty,
                        body: Box::new(q),
                    });
                self.parallel(la, lb, a, b, join, res)
            }
            Process::Repl(body) => {
                let inner = self.process(body);
                let again = p.clone();
                let wrap: Wrap<Process> = Rc::new(move |q| Process::par(q, again.clone()));
                Acts {
                    commits: inner.commits.iter().map(|c| c.map(wrap.clone())).collect(),
                    taus: inner.taus.into_iter().map(|s| s.map(&*wrap)).collect(),
                }
            }
            Process::If {
                op,
                lhs,
                rhs,
                then,
                els,
            } => match eval_condition(*op, lhs, rhs) {
                Some(true) => self.process(then),
                Some(false) => self.process(els),
                None => Acts::default(),
            },
            Process::Select {
                subject,
                label,
                cont,
            } => Acts {
                commits: vec![Commit::Sel {
                    subj: subject.clone(),
                    label: *label,
                    cont: (**cont).clone(),
                }],
                taus: vec![],
            },
            Process::Branch { subject, arms } => {
                let arms = arms.clone();
                Acts {
                    commits: vec![Commit::Offer {
                        subj: subject.clone(),
                        acc: Rc::new(move |l| {
                            arms.iter().find(|(m, _)| *m == l).map(|(_, q)| q.clone())
                        }),
                    }],
                    taus: vec![],
                }
            }
        }
    }

    fn system(&self, s: &System) -> Acts<System> {
        match s {
            System::Group { group, body } => {
                let g = group.clone();
                let wrap: Rc<dyn Fn(Process) -> System> = Rc::new(move |p| System::Group {
                    group: g.clone(),
                    body: p,
                });
                lift(self.process(body), wrap)
            }
            System::Bare(p) => lift(self.process(p), Rc::new(System::Bare)),
            System::GroupSys { group, body } => {
                let g = group.clone();
                let wrap: Wrap<System> = Rc::new(move |t| System::GroupSys {
                    group: g.clone(),
                    body: Box::new(t),
                });
                lift(self.system(body), wrap)
            }
            System::Res { name, ty, body } => {
                let inner = self.system(body);
                let (n, t) = (name.clone(), ty.clone());
                let wrap: Wrap<System> = Rc::new(move |q| System::Res {
                    name: n.clone(),
                    ty: t.clone(),
                    body: Box::new(q),
                });
                Acts {
                    commits: inner
                        .commits
                        .iter()
                        .filter_map(|c| c.restrict(name, ty, wrap.clone()))
                        .collect(),
                    taus: inner.taus.into_iter().map(|s| s.map(&*wrap)).collect(),
                }
            }
            System::Par(a, b) => {
                let (a, b) = ((**a).clone(), (**b).clone());
                let (la, lb) = (self.system(&a), self.system(&b));
                let join: Rc<dyn Fn(System, System) -> System> = Rc::new(System::par);
                let res: Rc<dyn Fn(Sym, Option<PrivacyType>, System) -> System> =
                    Rc::new(|n, ty, q| System::Res {
                        name: n,
                        ty,
                        body: Box::new(q),
                    });
                self.parallel(la, lb, a, b, join, res)
            }
        }
    }

    /// LPar, RPar and Tau.
    fn parallel<T: Clone + 'static>(
        &self,
        la: Acts<T>,
        lb: Acts<T>,
        a: T,
        b: T,
        join: Rc<dyn Fn(T, T) -> T>,
        res: Rc<dyn Fn(Sym, Option<PrivacyType>, T) -> T>,
    ) -> Acts<T> {
        let mut taus = Vec::new();
        for (o, i, left_out) in la
            .commits
            .iter()
            .flat_map(|x| lb.commits.iter().map(move |y| (x, y, true)))
            .chain(
                lb.commits
                    .iter()
                    .flat_map(|y| la.commits.iter().map(move |x| (y, x, false))),
            )
        {
            for (oc, ic, extr, comm) in self.sync(o, i) {
                let (l, r) = if left_out { (oc, ic) } else { (ic, oc) };
                let mut next = join(l, r);
                for (n, ty) in extr.into_iter().rev() {
                    next = res(n, ty, next);
                }
                taus.push(Tau { next, comm });
            }
        }
        let (j1, j2) = (join.clone(), join.clone());
        let (b1, a1) = (b.clone(), a.clone());
        let left: Rc<dyn Fn(T) -> T> = Rc::new(move |x| j1(x, b1.clone()));
        let right: Rc<dyn Fn(T) -> T> = Rc::new(move |y| j2(a1.clone(), y));
        taus.extend(la.taus.into_iter().map(|s| s.map(&*left)));
        taus.extend(lb.taus.into_iter().map(|s| s.map(&*right)));
        let mut commits: Vec<Commit<T>> = la.commits.iter().map(|c| c.map(left.clone())).collect();
        commits.extend(lb.commits.iter().map(|c| c.map(right.clone())));
        Acts { commits, taus }
    }

    /// Dual pairs of an output-side and an input-side commitment.
    #[allow(clippy::type_complexity)]
    fn sync<T: Clone>(
        &self,
        o: &Commit<T>,
        i: &Commit<T>,
    ) -> Vec<(T, T, Vec<(Sym, Option<PrivacyType>)>, Option<Comm>)> {
        match (o, i) {
            (
                Commit::Out {
                    extr,
                    subj: so,
                    objs,
                    cont,
                },
                Commit::Inp {
                    subj: si,
                    arity,
                    shape,
                    store_id,
                    acc,
                },
            ) => {
                if objs.len() != *arity {
                    return vec![];
                }
                let privacy = self.mode == Mode::Privacy;
                let candidates: Vec<Vec<Term>> = match (so, si) {
                    (Term::Dual(r), Term::Name(q)) if r == q && privacy => {
                        match single_private(objs) {
                            Some(pd) if ground_known(pd).is_some() => {
                                vec![objs.clone(), vec![Term::Private(pd.anonymized())]]
                            }
                            _ => vec![],
                        }
                    }
                    (Term::Name(r), Term::Dual(q)) if r == q && privacy => {
                        match single_private(objs) {
                            Some(pd) if ground_known(pd).is_some() => vec![objs.clone()],
                            Some(PrivateData {
                                identity: Identity::Hidden,
                                data: DataValue::Const(c),
                            }) => match store_id {
                                Some(id) => vec![vec![Term::Private(PrivateData::constructed(
                                    Identity::Known(id.clone()),
                                    DataValue::Const(c.clone()),
                                ))]],
                                None => vec![],
                            },
                            _ => vec![],
                        }
                    }
                    (Term::Name(a), Term::Name(b)) if a == b => {
                        let reference_out = single_private(objs).is_some();
                        if privacy && (reference_out || *shape == Shape::Store) {
                            vec![]
                        } else {
                            vec![objs.clone()]
                        }
                    }
                    _ => vec![],
                };
                let name = so.subject_name().cloned();
                candidates
                    .into_iter()
                    .filter_map(|vs| {
                        let ic = acc(&vs)?;
                        let subject = name.clone()?;
                        let comm = Comm {
                            subject_type: self.ann.get(&subject).cloned(),
                            pair: (
                                Label::Out {
                                    subject: so.clone(),
                                    objects: objs.clone(),
                                    extruded: extr.iter().map(|(n, _)| n.clone()).collect(),
                                },
                                Label::Inp {
                                    subject: si.clone(),
                                    objects: vs.clone(),
                                },
                            ),
                            subject,
                            values: vs,
                        };
                        Some((cont.clone(), ic, extr.clone(), Some(comm)))
                    })
                    .collect()
            }
            (Commit::Sel { subj, label, cont }, Commit::Offer { subj: s2, acc }) if subj == s2 => {
                acc(*label)
                    .map(|ic| (cont.clone(), ic, vec![], None))
                    .into_iter()
                    .collect()
            }
            _ => vec![],
        }
    }
}

fn lift<T: Clone + 'static, U: Clone + 'static>(acts: Acts<T>, f: Rc<dyn Fn(T) -> U>) -> Acts<U> {
    Acts {
        commits: acts.commits.iter().map(|c| c.map(f.clone())).collect(),
        taus: acts.taus.into_iter().map(|s| s.map(&*f)).collect(),
    }
}

// ---- alpha-renaming of binders --------------------------------------

fn binders_p(p: &Process, out: &mut BTreeSet<Sym>) {
    match p {
        Process::Res { name, body, .. } => {
            out.insert(name.clone());
            binders_p(body, out);
        }
        Process::Out { cont, .. } | Process::Inp { cont, .. } | Process::Select { cont, .. } => {
            binders_p(cont, out)
        }
        Process::Par(a, b) => {
            binders_p(a, out);
            binders_p(b, out);
        }
        Process::Repl(b) => binders_p(b, out),
        Process::If { then, els, .. } => {
            binders_p(then, out);
            binders_p(els, out);
        }
        Process::Branch { arms, .. } => arms.iter().for_each(|(_, q)| binders_p(q, out)),
        Process::Nil | Process::Store { .. } => {}
    }
}

fn binders_s(s: &System, out: &mut BTreeSet<Sym>) {
    match s {
        System::Group { body, .. } | System::Bare(body) => binders_p(body, out),
        System::GroupSys { body, .. } => binders_s(body, out),
        System::Par(a, b) => {
            binders_s(a, out);
            binders_s(b, out);
        }
        System::Res { name, body, .. } => {
            out.insert(name.clone());
            binders_s(body, out);
        }
    }
}

fn rename_sys(s: &System, old: &Sym, new: &Sym) -> System {
    match s {
        System::Group { group, body } => System::Group {
            group: group.clone(),
            body: rename_name(body, old, new),
        },
        System::Bare(p) => System::Bare(rename_name(p, old, new)),
        System::GroupSys { group, body } => System::GroupSys {
            group: group.clone(),
            body: Box::new(rename_sys(body, old, new)),
        },
        System::Par(a, b) => System::par(rename_sys(a, old, new), rename_sys(b, old, new)),
        System::Res { name, .. } if name == old => s.clone(),
        System::Res { name, ty, body } => System::Res {
            name: name.clone(),
            ty: ty.clone(),
            body: Box::new(rename_sys(body, old, new)),
        },
    }
}

struct Freshener<'a> {
    used: BTreeSet<Sym>,
    ann: &'a mut Ann,
}

impl Freshener<'_> {
    fn pick(&mut self, n: &Sym, ty: &Option<PrivacyType>) -> Sym {
        let f = fresh_name(n, &self.used);
        self.used.insert(f.clone());
        if let Some(t) = ty {
            self.ann.insert(f.clone(), t.clone());
        }
        f
    }

    fn process(&mut self, p: &Process) -> Process {
        match p {
            Process::Res { name, ty, body } => {
                let f = self.pick(name, ty);
                let body = rename_name(body, name, &f);
                Process::Res {
                    name: f,
                    ty: ty.clone(),
                    body: Box::new(self.process(&body)),
                }
            }
            Process::Out {
                subject,
                objects,
                cont,
            } => Process::Out {
                subject: subject.clone(),
                objects: objects.clone(),
                cont: Box::new(self.process(cont)),
            },
            Process::Inp {
                subject,
                patterns,
                cont,
            } => Process::Inp {
                subject: subject.clone(),
                patterns: patterns.clone(),
                cont: Box::new(self.process(cont)),
            },
            Process::Select {
                subject,
                label,
                cont,
            } => Process::Select {
                subject: subject.clone(),
                label: *label,
                cont: Box::new(self.process(cont)),
            },
            Process::Par(a, b) => Process::par(self.process(a), self.process(b)),
            Process::Repl(b) => Process::repl(self.process(b)),
            Process::If {
                op,
                lhs,
                rhs,
                then,
                els,
            } => Process::If {
                op: *op,
                lhs: lhs.clone(),
                rhs: rhs.clone(),
                then: Box::new(self.process(then)),
                els: Box::new(self.process(els)),
            },
            Process::Branch { subject, arms } => Process::Branch {
                subject: subject.clone(),
                arms: arms.iter().map(|(l, q)| (*l, self.process(q))).collect(),
            },
            Process::Nil | Process::Store { .. } => p.clone(),
        }
    }

    fn system(&mut self, s: &System) -> System {
        match s {
            System::Group { group, body } => System::Group {
                group: group.clone(),
                body: self.process(body),
            },
            System::Bare(p) => System::Bare(self.process(p)),
            System::GroupSys { group, body } => System::GroupSys {
                group: group.clone(),
                body: Box::new(self.system(body)),
            },
            System::Par(a, b) => System::par(self.system(a), self.system(b)),
            System::Res { name, ty, body } => {
                let f = self.pick(name, ty);
                let body = rename_sys(body, name, &f);
                System::Res {
                    name: f,
                    ty: ty.clone(),
                    body: Box::new(self.system(&body)),
                }
            }
        }
    }
}

fn freshen_process(p: &Process, ann: &mut Ann) -> Process {
    let mut used = p.free_names();
    binders_p(p, &mut used);
    Freshener { used, ann }.process(p)
}

fn freshen_system(s: &System, ann: &mut Ann) -> System {
    let mut used = s.free_names();
    binders_s(s, &mut used);
    Freshener { used, ann }.system(s)
}

// ---- public entry points --------------------------------------------

pub(super) fn system_taus(s: &System, mode: Mode) -> Vec<Step<System>> {
    let mut e = Engine::new(mode);
    let s = freshen_system(s, &mut e.ann);
    e.system(&s)
        .taus
        .into_iter()
        .map(|t| Step {
            label: Label::Tau,
            next: t.next,
            comm: t.comm,
        })
        .collect()
}

pub(super) fn process_taus(p: &Process, mode: Mode) -> Vec<Step<Process>> {
    let mut e = Engine::new(mode);
    let p = freshen_process(p, &mut e.ann);
    e.process(&p)
        .taus
        .into_iter()
        .map(|t| Step {
            label: Label::Tau,
            next: t.next,
            comm: t.comm,
        })
        .collect()
}

fn visible<T: Clone + 'static>(acts: Acts<T>, universe: &[Term]) -> Vec<Step<T>> {
    let mut out = Vec::new();
    for c in &acts.commits {
        match c {
            Commit::Out {
                extr,
                subj,
                objs,
                cont,
            } => out.push(Step {
                label: Label::Out {
                    subject: subj.clone(),
                    objects: objs.clone(),
                    extruded: extr.iter().map(|(n, _)| n.clone()).collect(),
                },
                next: cont.clone(),
                comm: None,
            }),
            Commit::Inp {
                subj, arity, acc, ..
            } => {
                for vs in tuples(universe, *arity) {
                    if let Some(next) = acc(&vs) {
                        out.push(Step {
                            label: Label::Inp {
                                subject: subj.clone(),
                                objects: vs,
                            },
                            next,
                            comm: None,
                        });
                    }
                }
            }
            Commit::Sel { .. } | Commit::Offer { .. } => {}
        }
    }
    out.extend(acts.taus.into_iter().map(|t| Step {
        label: Label::Tau,
        next: t.next,
        comm: t.comm,
    }));
    out
}

fn tuples(universe: &[Term], arity: usize) -> Vec<Vec<Term>> {
    (0..arity).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|prefix| {
                universe.iter().map(move |v| {
                    let mut t = prefix.clone();
                    t.push(v.clone());
                    t
                })
            })
            .collect()
    })
}

pub(super) fn system_labels(s: &System, universe: &[Term]) -> Vec<Step<System>> {
    let mut e = Engine::new(Mode::Privacy);
    let s = freshen_system(s, &mut e.ann);
    visible(e.system(&s), universe)
}

pub(super) fn process_labels(p: &Process, universe: &[Term]) -> Vec<Step<Process>> {
    let mut e = Engine::new(Mode::Privacy);
    let p = freshen_process(p, &mut e.ann);
    visible(e.process(&p), universe)
}
