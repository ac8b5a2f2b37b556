use std::collections::{BTreeMap, BTreeSet};

use super::{DataValue, Identity, Placeholder, PrivateData, Process, Sym, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstError {
    #[error("incompatible substitution of {value} for {placeholder}")]
    IncompatibleSubstitution { value: String, placeholder: String },
    #[error("arity mismatch: {values} values for {patterns} placeholders")]
    Arity { values: usize, patterns: usize },
}

/// `(v, k)` is a substitutable pair.
pub fn compatible(v: &Term, k: &Placeholder) -> bool {
    match (k, v) {
        (Placeholder::Var(_), Term::Name(_)) => true,
        (Placeholder::Var(_), Term::Private(pd)) => pd.is_ground(),
        (Placeholder::Priv(..), Term::Private(pd)) => matches!(
            (&pd.identity, &pd.data),
            (Identity::Known(_), DataValue::Const(_))
        ),
        (Placeholder::Anon(_), Term::Private(pd)) => matches!(
            (&pd.identity, &pd.data),
            (Identity::Hidden, DataValue::Const(_))
        ),
        _ => false,
    }
}

/// What a variable turns into in each of the positions it can occupy.
#[derive(Clone, Debug)]
struct Image {
    term: Term,
    ident: Identity,
    data: DataValue,
}

type Images = BTreeMap<Sym, Image>;

fn images_for(v: &Term, k: &Placeholder, out: &mut Images) -> Result<(), SubstError> {
    if !compatible(v, k) {
        return Err(SubstError::IncompatibleSubstitution {
            value: v.to_string(),
            placeholder: k.to_string(),
        });
    }
    match (k, v) {
        (Placeholder::Var(x), Term::Name(n)) => {
            out.insert(
                x.clone(),
                Image {
                    term: v.clone(),
                    ident: Identity::Known(n.clone()),
                    data: DataValue::Const(n.clone()),
                },
            );
        }
        (Placeholder::Var(x), Term::Private(pd)) => {
            out.insert(
                x.clone(),
                Image {
                    term: v.clone(),
                    ident: pd.identity.clone(),
                    data: pd.data.clone(),
                },
            );
        }
        (Placeholder::Priv(x, y), Term::Private(pd)) => {
            let (Identity::Known(id), DataValue::Const(c)) = (&pd.identity, &pd.data) else {
                unreachable!("checked by compatible")
            };
            out.insert(
                x.clone(),
                Image {
                    term: Term::Name(id.clone()),
                    ident: Identity::Known(id.clone()),
                    data: DataValue::Const(id.clone()),
                },
            );
            out.insert(
                y.clone(),
                Image {
                    term: v.clone(),
                    ident: pd.identity.clone(),
                    data: DataValue::Const(c.clone()),
                },
            );
        }
        (Placeholder::Anon(y), Term::Private(pd)) => {
            out.insert(
                y.clone(),
                Image {
                    term: v.clone(),
                    ident: Identity::Hidden,
                    data: pd.data.clone(),
                },
            );
        }
        _ => unreachable!("checked by compatible"),
    }
    Ok(())
}

/// `P{v/k}`.
pub fn substitute(p: &Process, v: &Term, k: &Placeholder) -> Result<Process, SubstError> {
    substitute_all(p, std::slice::from_ref(v), std::slice::from_ref(k))
}

/// Simultaneous polyadic substitution `P{ṽ/k̃}`.
pub fn substitute_all(p: &Process, vs: &[Term], ks: &[Placeholder]) -> Result<Process, SubstError> {
    if vs.len() != ks.len() {
        return Err(SubstError::Arity {
            values: vs.len(),
            patterns: ks.len(),
        });
    }
    let mut images = Images::new();
    for (v, k) in vs.iter().zip(ks) {
        images_for(v, k, &mut images)?;
    }
    if images.is_empty() {
        return Ok(p.clone());
    }
    Ok(apply(p, &images))
}

/// Substitution into a single term (no binders involved).
pub fn substitute_term(t: &Term, v: &Term, k: &Placeholder) -> Result<Term, SubstError> {
    let mut images = Images::new();
    images_for(v, k, &mut images)?;
    Ok(apply_term(t, &images))
}

fn image_names(images: &Images) -> BTreeSet<Sym> {
    images
        .values()
        .filter_map(|im| match &im.term {
            Term::Name(n) => Some(n.clone()),
            _ => None,
        })
        .collect()
}

fn apply_pd(pd: &PrivateData, images: &Images) -> PrivateData {
    let identity = match &pd.identity {
        Identity::Var(x) => images
            .get(x)
            .map(|im| im.ident.clone())
            .unwrap_or_else(|| pd.identity.clone()),
        other => other.clone(),
    };
    let data = match &pd.data {
        DataValue::Var(y) => images
            .get(y)
            .map(|im| im.data.clone())
            .unwrap_or_else(|| pd.data.clone()),
        other => other.clone(),
    };
    PrivateData { identity, data }
}

fn apply_term(t: &Term, images: &Images) -> Term {
    match t {
        Term::Var(x) => images
            .get(x)
            .map(|im| im.term.clone())
            .unwrap_or_else(|| t.clone()),
        Term::Private(pd) => Term::Private(apply_pd(pd, images)),
        _ => t.clone(),
    }
}

fn apply(p: &Process, images: &Images) -> Process {
    match p {
        Process::Nil => Process::Nil,
        Process::Out {
            subject,
            objects,
            cont,
        } => Process::Out {
            subject: apply_term(subject, images),
            objects: objects.iter().map(|o| apply_term(o, images)).collect(),
            cont: Box::new(apply(cont, images)),
        },
        Process::Inp {
            subject,
            patterns,
            cont,
        } => {
            let shadowed: BTreeSet<&Sym> = patterns.iter().flat_map(|k| k.vars()).collect();
            let inner: Images = images
                .iter()
                .filter(|(x, _)| !shadowed.contains(x))
                .map(|(x, im)| (x.clone(), im.clone()))
                .collect();
            Process::Inp {
                subject: apply_term(subject, images),
                patterns: patterns.clone(),
                cont: Box::new(if inner.is_empty() {
                    (**cont).clone()
                } else {
                    apply(cont, &inner)
                }),
            }
        }
        Process::Res { name, ty, body } => {
            let names = image_names(images);
            if names.contains(name) {
                let mut avoid = names;
                avoid.extend(body.free_names());
                let fresh = fresh_name(name, &avoid);
                let renamed = rename_name(body, name, &fresh);
                Process::Res {
                    name: fresh,
                    ty: ty.clone(),
                    body: Box::new(apply(&renamed, images)),
                }
            } else {
                Process::Res {
                    name: name.clone(),
                    ty: ty.clone(),
                    body: Box::new(apply(body, images)),
                }
            }
        }
        Process::Par(a, b) => Process::par(apply(a, images), apply(b, images)),
        Process::Repl(b) => Process::repl(apply(b, images)),
        Process::If {
            op,
            lhs,
            rhs,
            then,
            els,
        } => Process::If {
            op: *op,
            lhs: apply_term(lhs, images),
            rhs: apply_term(rhs, images),
            then: Box::new(apply(then, images)),
            els: Box::new(apply(els, images)),
        },
        Process::Store { reference, datum } => Process::Store {
            reference: reference.clone(),
            datum: apply_pd(datum, images),
        },
        Process::Select {
            subject,
            label,
            cont,
        } => Process::Select {
            subject: apply_term(subject, images),
            label: *label,
            cont: Box::new(apply(cont, images)),
        },
        Process::Branch { subject, arms } => Process::Branch {
            subject: apply_term(subject, images),
            arms: arms.iter().map(|(l, q)| (*l, apply(q, images))).collect(),
        },
    }
}

/// A name based on `base` that is not in `avoid`.
pub fn fresh_name(base: &Sym, avoid: &BTreeSet<Sym>) -> Sym {
    let stem = base
        .as_str()
        .trim_end_matches(|c: char| c == '\'' || c.is_ascii_digit());
    let stem = if stem.is_empty() { "n" } else { stem };
    (0..)
        .map(|i| Sym::from(format!("{stem}{i}")))
        .find(|s| !avoid.contains(s))
        .expect("unbounded supply")
}

fn rename_in_term(t: &Term, old: &Sym, new: &Sym) -> Term {
    match t {
        Term::Name(n) if n == old => Term::Name(new.clone()),
        Term::Dual(n) if n == old => Term::Dual(new.clone()),
        _ => t.clone(),
    }
}

/// Renames free occurrences of the name `old` (not variables).
pub fn rename_name(p: &Process, old: &Sym, new: &Sym) -> Process {
    let rt = |t: &Term| rename_in_term(t, old, new);
    match p {
        Process::Nil => Process::Nil,
        Process::Out {
            subject,
            objects,
            cont,
        } => Process::Out {
            subject: rt(subject),
            objects: objects.iter().map(rt).collect(),
            cont: Box::new(rename_name(cont, old, new)),
        },
        Process::Inp {
            subject,
            patterns,
            cont,
        } => Process::Inp {
            subject: rt(subject),
            patterns: patterns.clone(),
            cont: Box::new(rename_name(cont, old, new)),
        },
        Process::Res { name, .. } if name == old => p.clone(),
        Process::Res { name, ty, body } => {
            if name == new {
                // inner binder would capture the new name
                let mut avoid = body.free_names();
                avoid.insert(new.clone());
                avoid.insert(old.clone());
                let fresh = fresh_name(name, &avoid);
                let body = rename_name(body, name, &fresh);
                Process::Res {
                    name: fresh,
                    ty: ty.clone(),
                    body: Box::new(rename_name(&body, old, new)),
                }
            } else {
                Process::Res {
                    name: name.clone(),
                    ty: ty.clone(),
                    body: Box::new(rename_name(body, old, new)),
                }
            }
        }
        Process::Par(a, b) => Process::par(rename_name(a, old, new), rename_name(b, old, new)),
        Process::Repl(b) => Process::repl(rename_name(b, old, new)),
        Process::If {
            op,
            lhs,
            rhs,
            then,
            els,
        } => Process::If {
            op: *op,
            lhs: rt(lhs),
            rhs: rt(rhs),
            then: Box::new(rename_name(then, old, new)),
            els: Box::new(rename_name(els, old, new)),
        },
        Process::Store { reference, datum } => Process::Store {
            reference: if reference == old {
                new.clone()
            } else {
                reference.clone()
            },
            datum: datum.clone(),
        },
        Process::Select {
            subject,
            label,
            cont,
        } => Process::Select {
            subject: rt(subject),
            label: *label,
            cont: Box::new(rename_name(cont, old, new)),
        },
        Process::Branch { subject, arms } => Process::Branch {
            subject: rt(subject),
            arms: arms
                .iter()
                .map(|(l, q)| (*l, rename_name(q, old, new)))
                .collect(),
        },
    }
}
