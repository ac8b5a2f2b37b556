use std::fmt::Write;

use crate::kernel::{MatchOp, PrivacyType, Process, System, Term};
use crate::policy::{Hierarchy, Policy};
use crate::typing::{Gamma, GammaKey};

pub fn render_type(t: &PrivacyType) -> String {
    t.to_string()
}

fn binder(n: &crate::kernel::Sym, ty: &Option<PrivacyType>) -> String {
    match ty {
        Some(t) => format!("(new {n} : {t})"),
        None => format!("(new {n})"),
    }
}

fn terms(ts: &[Term]) -> String {
    ts.iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Renders `p` so that a `|` at the top level is allowed.
fn list(p: &Process, out: &mut String) {
    match p {
        Process::Par(a, b) => {
            list(a, out);
            out.push_str(" | ");
            unit(b, out);
        }
        _ => unit(p, out),
    }
}

/// Renders `p` as a single operand (parenthesising compositions).
fn unit(p: &Process, out: &mut String) {
    match p {
        Process::Nil => out.push('0'),
        Process::Out {
            subject,
            objects,
            cont,
        } => {
            let _ = write!(out, "{subject}!<{}>.", terms(objects));
            unit(cont, out);
        }
        Process::Inp {
            subject,
            patterns,
            cont,
        } => {
            let ks: Vec<String> = patterns.iter().map(|k| k.to_string()).collect();
            let _ = write!(out, "{subject}?({}).", ks.join(", "));
            unit(cont, out);
        }
        Process::Res { name, ty, body } => {
            out.push_str(&binder(name, ty));
            out.push(' ');
            unit(body, out);
        }
        Process::Par(..) => {
            out.push('(');
            list(p, out);
            out.push(')');
        }
        Process::Repl(b) => {
            out.push('*');
            unit(b, out);
        }
        Process::If {
            op,
            lhs,
            rhs,
            then,
            els,
        } => {
            let op = match op {
                MatchOp::Eq => "=",
                MatchOp::Gt => ">",
            };
            let _ = write!(out, "if {lhs} {op} {rhs} then ");
            unit(then, out);
            out.push_str(" else ");
            unit(els, out);
        }
        Process::Store { reference, datum } => {
            let _ = write!(out, "store {reference} {datum}");
        }
        Process::Select {
            subject,
            label,
            cont,
        } => {
            let _ = write!(out, "{subject} <| {}.", label.as_str());
            unit(cont, out);
        }
        Process::Branch { subject, arms } => {
            let _ = write!(out, "{subject} |> {{");
            for (i, (l, q)) in arms.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}: ", l.as_str());
                list(q, out);
            }
            out.push('}');
        }
    }
}

pub fn render_process(p: &Process) -> String {
    let mut s = String::new();
    list(p, &mut s);
    s
}

fn sys_list(s: &System, out: &mut String, sep: &str) {
    match s {
        System::Par(a, b) => {
            sys_list(a, out, sep);
            out.push_str(sep);
            sys_unit(b, out);
        }
        System::Bare(p) => list(p, out),
        _ => sys_unit(s, out),
    }
}

fn sys_unit(s: &System, out: &mut String) {
    match s {
        System::Group { group, body } => {
            let _ = write!(out, "{group}[");
            list(body, out);
            out.push(']');
        }
        System::GroupSys { group, body } => {
            let _ = write!(out, "{group}[");
            sys_list(body, out, " || ");
            out.push(']');
        }
        System::Par(..) => {
            out.push('(');
            sys_list(s, out, " || ");
            out.push(')');
        }
        System::Res { name, ty, body } => {
            out.push_str(&binder(name, ty));
            out.push(' ');
            sys_unit(body, out);
        }
        System::Bare(p) => unit(p, out),
    }
}

/// One top-level component per line.
pub fn render_system(s: &System) -> String {
    let mut out = String::new();
    sys_list(s, &mut out, "\n|| ");
    out
}

fn hierarchy(h: &Hierarchy, indent: usize, out: &mut String) {
    let perms: Vec<String> = h.perms.iter().map(|p| p.to_string()).collect();
    let _ = write!(out, "{} {{{}}}", h.group, perms.join(", "));
    if !h.children.is_empty() {
        out.push_str(" [\n");
        for (i, c) in h.children.iter().enumerate() {
            out.push_str(&"  ".repeat(indent + 1));
            hierarchy(c, indent + 1, out);
            if i + 1 < h.children.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str(&"  ".repeat(indent));
        out.push(']');
    }
}

pub fn render_policy(p: &Policy) -> String {
    let mut out = String::new();
    for (t, h) in &p.entries {
        let _ = write!(out, "private {t} >> ");
        hierarchy(h, 0, &mut out);
        out.push_str(";\n");
    }
    out
}

pub fn render_env(g: &Gamma) -> String {
    let mut out = String::new();
    let private: Vec<&str> = g.private_types().iter().map(|s| s.as_str()).collect();
    if !private.is_empty() {
        let _ = writeln!(out, "private {};", private.join(", "));
    }
    for (k, t) in g.iter() {
        match k {
            GammaKey::Name(n) => {
                let _ = writeln!(out, "{n} : {t};");
            }
            GammaKey::Data(pd) => {
                let _ = writeln!(out, "{pd} : {t};");
            }
        }
    }
    out
}
