//! Store encoding into the π-calculus with select/branch, and a bounded
//! operational-correspondence checker.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::kernel::{
    fresh_name, normalize, substitute_all, BranchLabel, DataValue, Identity, Placeholder,
    PrivateData, Process, Sym, Term,
};
use crate::semantics::{process_tau_steps, Mode};
use crate::syntax::render_process;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot encode `{term}`: {reason}")]
pub struct UnencodableTerm {
    pub term: String,
    pub reason: String,
}

/// A process of the encoding target: no stores, no dual references.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoreProcess(Process);

impl CoreProcess {
    pub fn as_process(&self) -> &Process {
        &self.0
    }

    pub fn into_process(self) -> Process {
        self.0
    }
}

impl fmt::Display for CoreProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_process(&self.0))
    }
}

fn syms(p: &Process, out: &mut BTreeSet<Sym>) {
    let term = |t: &Term, out: &mut BTreeSet<Sym>| match t {
        Term::Name(n) | Term::Dual(n) | Term::Var(n) => {
            out.insert(n.clone());
        }
        Term::Private(pd) => out.extend(pd.vars().cloned()),
    };
    match p {
        Process::Nil => {}
        Process::Out {
            subject,
            objects,
            cont,
        } => {
            term(subject, out);
            objects.iter().for_each(|o| term(o, out));
            syms(cont, out);
        }
        Process::Inp {
            subject,
            patterns,
            cont,
        } => {
            term(subject, out);
            for k in patterns {
                match k {
                    Placeholder::Var(x) | Placeholder::Anon(x) => {
                        out.insert(x.clone());
                    }
                    Placeholder::Priv(x, y) => {
                        out.insert(x.clone());
                        out.insert(y.clone());
                    }
                }
            }
            syms(cont, out);
        }
        Process::Res { name, body, .. } => {
            out.insert(name.clone());
            syms(body, out);
        }
        Process::Par(a, b) => {
            syms(a, out);
            syms(b, out);
        }
        Process::Repl(b) => syms(b, out),
        Process::If {
            lhs,
            rhs,
            then,
            els,
            ..
        } => {
            term(lhs, out);
            term(rhs, out);
            syms(then, out);
            syms(els, out);
        }
        Process::Store { reference, datum } => {
            out.insert(reference.clone());
            out.extend(datum.vars().cloned());
        }
        Process::Select { subject, cont, .. } => {
            term(subject, out);
            syms(cont, out);
        }
        Process::Branch { subject, arms } => {
            term(subject, out);
            arms.iter().for_each(|(_, q)| syms(q, out));
        }
    }
}

/// Store names plus names used with private-data I/O anywhere in `p`.
fn store_refs(p: &Process, out: &mut BTreeSet<Sym>) {
    match p {
        Process::Store { reference, .. } => {
            out.insert(reference.clone());
        }
        Process::Out {
            subject,
            objects,
            cont,
        } => {
            if let (Term::Name(n), [Term::Private(_)]) = (subject, objects.as_slice()) {
                out.insert(n.clone());
            }
            store_refs(cont, out)
        }
        Process::Inp {
            subject,
            patterns,
            cont,
        } => {
            if let (Term::Name(n), [Placeholder::Priv(..) | Placeholder::Anon(_)]) =
                (subject, patterns.as_slice())
            {
                out.insert(n.clone());
            }
            store_refs(cont, out)
        }
        Process::Select { cont, .. } => store_refs(cont, out),
        Process::Res { body, .. } | Process::Repl(body) => store_refs(body, out),
        Process::Par(a, b) => {
            store_refs(a, out);
            store_refs(b, out);
        }
        Process::If { then, els, .. } => {
            store_refs(then, out);
            store_refs(els, out);
        }
        Process::Branch { arms, .. } => arms.iter().for_each(|(_, q)| store_refs(q, out)),
        Process::Nil => {}
    }
}

/// Standalone `y` becomes `{_ # y}`; stops where `y` is rebound.
fn anonymize_var(p: &Process, y: &Sym) -> Process {
    let term = |t: &Term| match t {
        Term::Var(x) if x == y => Term::Private(PrivateData::constructed(
            Identity::Hidden,
            DataValue::Var(y.clone()),
        )),
        t => t.clone(),
    };
    let rec = |q: &Process| Box::new(anonymize_var(q, y));
    match p {
        Process::Out {
            subject,
            objects,
            cont,
        } => Process::Out {
            subject: subject.clone(),
            objects: objects.iter().map(term).collect(),
            cont: rec(cont),
        },
        Process::Inp {
            subject,
            patterns,
            cont,
        } => {
            let rebinds = patterns.iter().any(|k| match k {
                Placeholder::Var(x) | Placeholder::Anon(x) => x == y,
                Placeholder::Priv(a, b) => a == y || b == y,
            });
            Process::Inp {
                subject: subject.clone(),
                patterns: patterns.clone(),
                cont: if rebinds { cont.clone() } else { rec(cont) },
            }
        }
        Process::Res { name, ty, body } => Process::Res {
            name: name.clone(),
            ty: ty.clone(),
            body: rec(body),
        },
        Process::Par(a, b) => Process::Par(rec(a), rec(b)),
        Process::Repl(b) => Process::Repl(rec(b)),
        Process::If {
            op,
            lhs,
            rhs,
            then,
            els,
        } => Process::If {
            op: *op,
            lhs: term(lhs),
            rhs: term(rhs),
            then: rec(then),
            els: rec(els),
        },
        Process::Select {
            subject,
            label,
            cont,
        } => Process::Select {
            subject: subject.clone(),
            label: *label,
            cont: rec(cont),
        },
        Process::Branch { subject, arms } => Process::Branch {
            subject: subject.clone(),
            arms: arms
                .iter()
                .map(|(l, q)| (*l, anonymize_var(q, y)))
                .collect(),
        },
        Process::Nil | Process::Store { .. } => p.clone(),
    }
}

struct Encoder {
    refs: BTreeSet<Sym>,
    avoid: BTreeSet<Sym>,
}

fn nil() -> Process {
    Process::Nil
}

fn var(x: &Sym) -> Term {
    Term::Var(x.clone())
}

fn pair(x: &Sym, y: &Sym) -> Term {
    Term::Private(PrivateData::constructed(
        Identity::Var(x.clone()),
        DataValue::Var(y.clone()),
    ))
}

fn select(subject: Term, label: BranchLabel, cont: Process) -> Process {
    Process::Select {
        subject,
        label,
        cont: Box::new(cont),
    }
}

impl Encoder {
    fn fresh(&mut self, base: &str) -> Sym {
        let s = fresh_name(&Sym::new(base), &self.avoid);
        self.avoid.insert(s.clone());
        s
    }

    fn unencodable(p: &Process, reason: &str) -> UnencodableTerm {
        UnencodableTerm {
            term: render_process(p),
            reason: reason.into(),
        }
    }

    fn check_term(p: &Process, t: &Term) -> Result<(), UnencodableTerm> {
        match t {
            Term::Dual(_) => Err(Self::unencodable(p, "dual reference in user code")),
            _ => Ok(()),
        }
    }

    fn is_reference(&self, subject: &Term) -> bool {
        matches!(subject, Term::Name(n) if self.refs.contains(n))
    }

    /// Store references by name; a received reference only by usage shape.
    fn reads(&self, subject: &Term, patterns: &[Placeholder]) -> bool {
        match patterns {
            [Placeholder::Priv(..) | Placeholder::Anon(_)] => {
                self.is_reference(subject) || matches!(subject, Term::Var(_))
            }
            [_] => self.is_reference(subject),
            _ => false,
        }
    }

    fn writes(&self, subject: &Term, objects: &[Term]) -> bool {
        match objects {
            [Term::Private(_)] => self.is_reference(subject) || matches!(subject, Term::Var(_)),
            [_] => self.is_reference(subject),
            _ => false,
        }
    }

    fn store(
        &mut self,
        reference: &Sym,
        datum: &PrivateData,
        p: &Process,
    ) -> Result<Process, UnencodableTerm> {
        let (Identity::Known(id), DataValue::Const(_)) = (&datum.identity, &datum.data) else {
            return Err(Self::unencodable(p, "store content must be ground"));
        };
        let a = self.fresh("a");
        let l = self.fresh("l");
        let (x, y, w, z) = (
            self.fresh("x"),
            self.fresh("y"),
            self.fresh("w"),
            self.fresh("z"),
        );
        let cell = |v: Term| Process::out(Term::Name(a.clone()), vec![v], nil());
        let lv = var(&l);
        let rd = Process::out(lv.clone(), vec![pair(&x, &y)], cell(pair(&x, &y)));
        let wr = Process::inp(
            lv.clone(),
            vec![Placeholder::Priv(w.clone(), z.clone())],
            Process::if_eq(
                var(&w),
                Term::Name(id.clone()),
                select(lv.clone(), BranchLabel::Ok, cell(pair(&w, &z))),
                select(lv.clone(), BranchLabel::Fail, cell(pair(&x, &y))),
            ),
        );
        let server = Process::inp(
            Term::Name(a.clone()),
            vec![Placeholder::Priv(x.clone(), y.clone())],
            Process::inp(
                Term::Name(reference.clone()),
                vec![Placeholder::Var(l.clone())],
                Process::Branch {
                    subject: lv,
                    arms: vec![(BranchLabel::Rd, rd), (BranchLabel::Wr, wr)],
                },
            ),
        );
        let body = Process::par(cell(Term::Private(datum.clone())), Process::repl(server));
        Ok(Process::Res {
            name: a,
            ty: None,
            body: Box::new(body),
        })
    }

    fn read(
        &mut self,
        subject: &Term,
        k: &Placeholder,
        cont: &Process,
    ) -> Result<Process, UnencodableTerm> {
        let a = self.fresh("a");
        let (k, cont) = match k {
            Placeholder::Anon(y) => (
                Placeholder::Priv(self.fresh("x"), y.clone()),
                anonymize_var(cont, y),
            ),
            k => (k.clone(), cont.clone()),
        };
        let body = Process::out(
            subject.clone(),
            vec![Term::Name(a.clone())],
            select(
                Term::Name(a.clone()),
                BranchLabel::Rd,
                Process::inp(Term::Name(a.clone()), vec![k], self.enc(&cont)?),
            ),
        );
        Ok(Process::Res {
            name: a,
            ty: None,
            body: Box::new(body),
        })
    }

    fn write(
        &mut self,
        subject: &Term,
        v: &Term,
        cont: &Process,
        p: &Process,
    ) -> Result<Process, UnencodableTerm> {
        if let Term::Private(pd) = v {
            if pd.identity == Identity::Hidden {
                return Err(Self::unencodable(
                    p,
                    "anonymous write has no identity to check",
                ));
            }
        }
        let a = self.fresh("a");
        let b = self.fresh("b");
        let e = self.fresh("e");
        let k = self.fresh("k");
        let (an, bn, en) = (
            Term::Name(a.clone()),
            Term::Name(b.clone()),
            Term::Name(e.clone()),
        );
        let attempt = Process::Res {
            name: e,
            ty: None,
            body: Box::new(Process::out(
                subject.clone(),
                vec![en.clone()],
                select(
                    en.clone(),
                    BranchLabel::Wr,
                    Process::out(
                        en.clone(),
                        vec![var(&k)],
                        Process::Branch {
                            subject: en,
                            arms: vec![
                                (BranchLabel::Ok, Process::out(an.clone(), vec![], nil())),
                                (
                                    BranchLabel::Fail,
                                    Process::out(bn.clone(), vec![var(&k)], nil()),
                                ),
                            ],
                        },
                    ),
                ),
            )),
        };
        let body = Process::par_all([
            Process::out(bn.clone(), vec![v.clone()], nil()),
            Process::repl(Process::inp(bn, vec![Placeholder::Var(k)], attempt)),
            Process::inp(an, vec![], self.enc(cont)?),
        ]);
        Ok(Process::res(
            a.as_str(),
            None,
            Process::res(b.as_str(), None, body),
        ))
    }

    fn enc(&mut self, p: &Process) -> Result<Process, UnencodableTerm> {
        Ok(match p {
            Process::Nil => Process::Nil,
            Process::Store { reference, datum } => self.store(reference, datum, p)?,
            Process::Inp {
                subject,
                patterns,
                cont,
            } => {
                Self::check_term(p, subject)?;
                match patterns.as_slice() {
                    [k] if self.reads(subject, patterns) => self.read(subject, k, cont)?,
                    _ => Process::Inp {
                        subject: subject.clone(),
                        patterns: patterns.clone(),
                        cont: Box::new(self.enc(cont)?),
                    },
                }
            }
            Process::Out {
                subject,
                objects,
                cont,
            } => {
                Self::check_term(p, subject)?;
                for o in objects {
                    Self::check_term(p, o)?;
                }
                match objects.as_slice() {
                    [v] if self.writes(subject, objects) => self.write(subject, v, cont, p)?,
                    _ => Process::Out {
                        subject: subject.clone(),
                        objects: objects.clone(),
                        cont: Box::new(self.enc(cont)?),
                    },
                }
            }
            Process::Res { name, ty, body } => Process::Res {
                name: name.clone(),
                ty: ty.clone(),
                body: Box::new(self.enc(body)?),
            },
            Process::Par(a, b) => Process::par(self.enc(a)?, self.enc(b)?),
            Process::Repl(b) => Process::repl(self.enc(b)?),
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
                then: Box::new(self.enc(then)?),
                els: Box::new(self.enc(els)?),
            },
            Process::Select {
                subject,
                label,
                cont,
            } => select(subject.clone(), *label, self.enc(cont)?),
            Process::Branch { subject, arms } => Process::Branch {
                subject: subject.clone(),
                arms: arms
                    .iter()
                    .map(|(l, q)| Ok((*l, self.enc(q)?)))
                    .collect::<Result<_, UnencodableTerm>>()?,
            },
        })
    }
}

/// The store translation; every other constructor is mapped homomorphically.
pub fn encode(p: &Process) -> Result<CoreProcess, UnencodableTerm> {
    let mut refs = BTreeSet::new();
    store_refs(p, &mut refs);
    encode_with(p, refs)
}

/// [`encode`] with an explicit set of store references.
pub fn encode_with(p: &Process, refs: BTreeSet<Sym>) -> Result<CoreProcess, UnencodableTerm> {
    let mut avoid = BTreeSet::new();
    syms(p, &mut avoid);
    Encoder { refs, avoid }.enc(p).map(CoreProcess)
}

/// Immediate τ successors in the target calculus.
pub fn core_step(p: &CoreProcess) -> Vec<CoreProcess> {
    process_tau_steps(&p.0, Mode::Core)
        .into_iter()
        .map(|s| CoreProcess(s.next))
        .collect()
}

// ---------------------------------------------------------------- canonical states

fn flatten_block(p: &Process, binders: &mut Vec<Sym>, comps: &mut Vec<Process>) {
    match p {
        Process::Nil => {}
        Process::Par(a, b) => {
            flatten_block(a, binders, comps);
            flatten_block(b, binders, comps);
        }
        Process::Res { name, body, .. } => {
            binders.push(name.clone());
            flatten_block(body, binders, comps);
        }
        _ => comps.push(p.clone()),
    }
}

fn head_input(p: &Process) -> Option<&Sym> {
    match p {
        Process::Repl(b) => head_input(b),
        Process::Inp {
            subject: Term::Name(n),
            ..
        } => Some(n),
        _ => None,
    }
}

fn count_inputs_on(p: &Process, n: &Sym) -> usize {
    let here = |t: &Term| usize::from(matches!(t, Term::Name(m) if m == n));
    match p {
        Process::Nil | Process::Store { .. } => 0,
        Process::Inp { subject, cont, .. } => here(subject) + count_inputs_on(cont, n),
        Process::Branch { subject, arms } => {
            here(subject)
                + arms
                    .iter()
                    .map(|(_, q)| count_inputs_on(q, n))
                    .sum::<usize>()
        }
        Process::Out { cont, .. } | Process::Select { cont, .. } => count_inputs_on(cont, n),
        Process::Res { name, body, .. } if name != n => count_inputs_on(body, n),
        Process::Res { .. } => 0,
        Process::Repl(b) => count_inputs_on(b, n),
        Process::Par(a, b) => count_inputs_on(a, n) + count_inputs_on(b, n),
        Process::If { then, els, .. } => count_inputs_on(then, n) + count_inputs_on(els, n),
    }
}

/// One pass of garbage collection and cell hand-off on the top block.
/// Returns `None` when nothing applies.
fn tidy_once(p: &Process) -> Option<Process> {
    let mut binders = Vec::new();
    let mut comps = Vec::new();
    flatten_block(p, &mut binders, &mut comps);
    let bound: HashSet<&Sym> = binders.iter().collect();
    let free_elsewhere = |i: usize, n: &Sym| {
        comps
            .iter()
            .enumerate()
            .any(|(j, c)| j != i && c.free_names().contains(n))
    };

    // a server nobody can reach any more
    let dead = comps.iter().enumerate().position(|(i, c)| {
        head_input(c).is_some_and(|n| bound.contains(n) && !free_elsewhere(i, n))
    });
    if let Some(i) = dead {
        comps.remove(i);
        return Some(rebuild(binders, comps));
    }

    // `a!<v>.0 | *a?(k).Q` on a private cell with no other reader
    for (i, c) in comps.iter().enumerate() {
        let Process::Out {
            subject: Term::Name(n),
            objects,
            cont,
        } = c
        else {
            continue;
        };
        if **cont != Process::Nil || !bound.contains(n) {
            continue;
        }
        let total: usize = comps.iter().map(|q| count_inputs_on(q, n)).sum();
        if total != 1 {
            continue;
        }
        let server = comps.iter().position(|q| {
            matches!(q, Process::Repl(b) if matches!(&**b, Process::Inp { subject: Term::Name(m), .. } if m == n))
        });
        let Some(j) = server else {
            continue;
        };
        let Process::Repl(b) = &comps[j] else {
            unreachable!()
        };
        let Process::Inp { patterns, cont, .. } = &**b else {
            unreachable!()
        };
        let Ok(next) = substitute_all(cont, objects, patterns) else {
            continue;
        };
        comps[i] = next;
        return Some(rebuild(binders, comps));
    }
    None
}

fn rebuild(binders: Vec<Sym>, comps: Vec<Process>) -> Process {
    binders
        .into_iter()
        .rev()
        .fold(Process::par_all(comps), |acc, n| Process::Res {
            name: n,
            ty: None,
            body: Box::new(acc),
        })
}

/// Normal form up to structural congruence, unreachable servers and
/// deterministic cell hand-offs.
pub fn canonical(p: &Process) -> Process {
    let mut cur = normalize(p);
    while let Some(next) = tidy_once(&cur) {
        cur = normalize(&next);
    }
    cur
}

// ---------------------------------------------------------------- correspondence

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    /// Every source step is matched by encoded steps.
    Soundness,
    /// Every encoded step reverts or completes a source step.
    Completeness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    /// The reachable encoded states were exhausted without a match.
    Fails,
    /// The search hit the bound first.
    BoundExhausted,
}

#[derive(Clone, Debug)]
pub struct Obligation {
    pub clause: Clause,
    /// Rendered source target or encoded start state.
    pub subject: String,
    pub outcome: Outcome,
    /// Rendered states of the longest explored path when the check fails.
    pub trace: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct CorrespondenceReport {
    pub source_steps: usize,
    pub encoded_steps: usize,
    pub obligations: Vec<Obligation>,
}

impl CorrespondenceReport {
    pub fn holds(&self) -> bool {
        self.obligations.iter().all(|o| o.outcome == Outcome::Holds)
    }

    pub fn exhausted(&self) -> usize {
        self.count(Outcome::BoundExhausted)
    }

    pub fn failures(&self) -> usize {
        self.count(Outcome::Fails)
    }

    fn count(&self, o: Outcome) -> usize {
        self.obligations.iter().filter(|x| x.outcome == o).count()
    }
}

impl fmt::Display for CorrespondenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} source step(s), {} encoded step(s): {} held, {} failed, {} inconclusive",
            self.source_steps,
            self.encoded_steps,
            self.count(Outcome::Holds),
            self.failures(),
            self.exhausted()
        )?;
        for o in self
            .obligations
            .iter()
            .filter(|o| o.outcome != Outcome::Holds)
        {
            write!(f, "\n  {:?} {:?}: {}", o.clause, o.outcome, o.subject)?;
            for s in &o.trace {
                write!(f, "\n    -> {s}")?;
            }
        }
        Ok(())
    }
}

/// Canonical τ successors, memoised across searches.
#[derive(Default)]
struct Succ(HashMap<Process, Vec<Process>>);

impl Succ {
    fn of(&mut self, s: &Process) -> Vec<Process> {
        if let Some(v) = self.0.get(s) {
            return v.clone();
        }
        let mut v: Vec<Process> = process_tau_steps(s, Mode::Core)
            .into_iter()
            .map(|st| canonical(&st.next))
            .collect();
        v.sort();
        v.dedup();
        self.0.insert(s.clone(), v.clone());
        v
    }
}

/// Breadth-first search over canonical encoded states.
fn search(
    succ: &mut Succ,
    start: &Process,
    bound: usize,
    goal: &dyn Fn(&Process) -> bool,
) -> (Outcome, Vec<String>) {
    let mut parent: HashMap<Process, Option<Process>> = HashMap::from([(start.clone(), None)]);
    let mut queue = VecDeque::from([(start.clone(), 0usize)]);
    let mut cut = false;
    let mut last = start.clone();
    while let Some((s, d)) = queue.pop_front() {
        if goal(&s) {
            return (Outcome::Holds, vec![]);
        }
        last = s.clone();
        let next = succ.of(&s);
        if d == bound {
            cut |= !next.is_empty();
            continue;
        }
        for n in next {
            if !parent.contains_key(&n) {
                parent.insert(n.clone(), Some(s.clone()));
                queue.push_back((n, d + 1));
            }
        }
    }
    let mut trace = Vec::new();
    let mut cur = Some(last);
    while let Some(s) = cur {
        trace.push(render_process(&s));
        cur = parent.get(&s).cloned().flatten();
    }
    trace.reverse();
    (
        if cut {
            Outcome::BoundExhausted
        } else {
            Outcome::Fails
        },
        trace,
    )
}

/// Checks both correspondence clauses for the immediate steps of `p`,
/// searching at most `bound` encoded steps for each.
pub fn check_correspondence(
    p: &Process,
    bound: usize,
) -> Result<CorrespondenceReport, UnencodableTerm> {
    let source = process_tau_steps(p, Mode::Privacy);
    let mut refs = BTreeSet::new();
    store_refs(p, &mut refs);
    let start = canonical(encode_with(p, refs.clone())?.as_process());
    let mut targets = Vec::new();
    for st in &source {
        let e = encode_with(&st.next, refs.clone())?;
        targets.push((render_process(&st.next), canonical(e.as_process())));
    }
    let mut succ = Succ::default();
    let mut report = CorrespondenceReport {
        source_steps: source.len(),
        ..CorrespondenceReport::default()
    };

    for (text, target) in &targets {
        let (outcome, trace) = search(&mut succ, &start, bound, &|s| s == target);
        report.obligations.push(Obligation {
            clause: Clause::Soundness,
            subject: text.clone(),
            outcome,
            trace,
        });
    }

    let firsts = succ.of(&start);
    report.encoded_steps = firsts.len();
    for q in firsts {
        let (outcome, trace) = search(&mut succ, &q, bound, &|s| {
            s == &start || targets.iter().any(|(_, t)| t == s)
        });
        report.obligations.push(Obligation {
            clause: Clause::Completeness,
            subject: render_process(&q),
            outcome,
            trace,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_process;

    fn enc(src: &str) -> Process {
        encode(&parse_process(src).unwrap()).unwrap().into_process()
    }

    #[test]
    fn nil_is_nil() {
        assert_eq!(enc("0"), Process::Nil);
    }

    #[test]
    fn store_cell() {
        let expected = parse_process(
            "(new a) (a!<{id # c}>.0 | *a?({x # y}). r?(l). l |> {rd: l!<{x # y}>. a!<{x # y}>.0, \
             wr: l?({w # z}). if w = id then l <| ok. a!<{w # z}>.0 else l <| fail. a!<{x # y}>.0})",
        )
        .unwrap();
        assert!(crate::kernel::alpha_eq(&enc("store r {id # c}"), &expected));
    }

    #[test]
    fn reference_input() {
        let expected = parse_process("(new a) r!<a>. a <| rd. a?({x # y}).0").unwrap();
        assert!(crate::kernel::alpha_eq(&enc("r?({x # y}).0"), &expected));
    }

    #[test]
    fn homomorphic_and_hygienic() {
        let p = parse_process("(new n) (n!<c>.0 | *n?(x).0) | if c = d then r?({x # y}).0 else 0")
            .unwrap();
        let e = encode(&p).unwrap().into_process();
        assert_eq!(e.free_names(), p.free_names());
        assert!(matches!(e, Process::Par(..)));
    }

    #[test]
    fn dual_reference_is_rejected() {
        let p = Process::out(
            Term::Dual(Sym::new("r")),
            vec![Term::name("v")],
            Process::Nil,
        );
        assert!(encode(&p).is_err());
    }

    #[test]
    fn select_meets_branch() {
        let p = CoreProcess(parse_process("a <| rd. b!<c>.0 | a |> {rd: 0, wr: c!<d>.0}").unwrap());
        let next = core_step(&p);
        assert_eq!(next.len(), 1);
        assert_eq!(
            normalize(next[0].as_process()),
            normalize(&parse_process("b!<c>.0").unwrap())
        );
    }

    #[test]
    fn first_step_is_handshake() {
        let p = encode(&parse_process("store r {id # c} | r?({x # y}).0").unwrap()).unwrap();
        let start = canonical(p.as_process());
        let steps = process_tau_steps(&start, Mode::Core);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].comm.as_ref().unwrap().subject, Sym::new("r"));
    }

    #[test]
    fn read_pair_corresponds() {
        let p = parse_process("store r {id # c} | r?({x # y}). a!<y>.0").unwrap();
        let r = check_correspondence(&p, 12).unwrap();
        assert!(r.holds(), "{r}");
        assert_eq!(r.source_steps, 1);
    }

    #[test]
    fn failed_write_reverts() {
        let p = parse_process("store r {id # c} | r!<{other # d}>.0").unwrap();
        let r = check_correspondence(&p, 12).unwrap();
        assert_eq!(r.source_steps, 0);
        assert!(r.holds(), "{r}");
        assert!(r.encoded_steps > 0);
    }

    #[test]
    fn write_and_anonymous_read() {
        let p = parse_process("store r {id # c} | r!<{id # d}>.0 | r?({_ # y}). a!<y>.0").unwrap();
        let r = check_correspondence(&p, 12).unwrap();
        assert!(r.holds(), "{r}");
    }

    #[test]
    fn nil_is_vacuous() {
        let r = check_correspondence(&Process::Nil, 12).unwrap();
        assert!(r.holds() && r.obligations.is_empty());
    }
}
