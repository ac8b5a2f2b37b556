use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, Span};
use crate::kernel::{
    BranchLabel, DataValue, Identity, MatchOp, Placeholder, PrivacyType, PrivateData, Process, Sym,
    System, Term,
};
use crate::policy::{DisclosureKind, Hierarchy, Lambda, PermSet, Permission, Policy};
use crate::typing::{Gamma, GammaKey};

type PResult<T> = Result<T, Diagnostic>;

const MAX_DEPTH: usize = 200;

enum Item {
    P(Process),
    S(System),
}

impl Item {
    fn into_system(self) -> System {
        match self {
            Item::P(p) => System::Bare(p),
            Item::S(s) => s,
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    /// Innermost last; `true` marks an input variable, `false` a restricted name.
    scope: Vec<(Sym, bool)>,
    depth: usize,
}

fn kw(t: &Tok, word: &str) -> bool {
    matches!(t, Tok::Ident(s) if s == word)
}

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            i: 0,
            scope: Vec::new(),
            depth: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn span(&self) -> Span {
        self.toks[self.i].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        Diagnostic::error(
            self.span(),
            format!("expected {what}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, t: Tok) -> PResult<Span> {
        if *self.peek() == t {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&t.describe()))
        }
    }

    fn expect_kw(&mut self, word: &str) -> PResult<()> {
        if kw(self.peek(), word) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    fn ident(&mut self) -> PResult<(Sym, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((Sym::from(s), self.bump().span)),
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn ident_or_number(&mut self) -> PResult<(Sym, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Number(s) => Ok((Sym::from(s), self.bump().span)),
            _ => Err(self.unexpected("an identifier or number")),
        }
    }

    fn is_var(&self, s: &Sym) -> bool {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == s)
            .is_some_and(|(_, var)| *var)
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(Diagnostic::error(self.span(), "nesting too deep"));
        }
        Ok(())
    }

    // ------------------------------------------------------------ types

    fn ty(&mut self) -> PResult<PrivacyType> {
        self.enter()?;
        let (name, _) = self.ident()?;
        let t = match self.peek() {
            Tok::Lt => {
                self.bump();
                let (ground, _) = self.ident()?;
                self.expect(Tok::Gt)?;
                PrivacyType::Base { name, ground }
            }
            Tok::LBrack => {
                self.bump();
                let mut payload = Vec::new();
                if *self.peek() != Tok::RBrack {
                    payload.push(self.ty()?);
                    while self.eat(&Tok::Comma) {
                        payload.push(self.ty()?);
                    }
                }
                self.expect(Tok::RBrack)?;
                PrivacyType::Chan {
                    group: name,
                    payload,
                }
            }
            _ => return Err(self.unexpected("`<` or `[` in a type")),
        };
        self.depth -= 1;
        Ok(t)
    }

    // ------------------------------------------------------------ terms

    fn private_data(&mut self) -> PResult<PrivateData> {
        self.expect(Tok::LBrace)?;
        let identity = match self.peek().clone() {
            Tok::Underscore => {
                self.bump();
                Identity::Hidden
            }
            Tok::Ident(s) => {
                self.bump();
                let s = Sym::from(s);
                if self.is_var(&s) {
                    Identity::Var(s)
                } else {
                    Identity::Known(s)
                }
            }
            _ => return Err(self.unexpected("an identity or `_`")),
        };
        self.expect(Tok::Hash)?;
        let data = match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                let s = Sym::from(s);
                if self.is_var(&s) {
                    DataValue::Var(s)
                } else {
                    DataValue::Const(s)
                }
            }
            Tok::Number(s) => {
                self.bump();
                DataValue::Const(Sym::from(s))
            }
            _ => return Err(self.unexpected("a data value")),
        };
        self.expect(Tok::RBrace)?;
        Ok(PrivateData { identity, data })
    }

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                let s = Sym::from(s);
                Ok(if self.is_var(&s) {
                    Term::Var(s)
                } else {
                    Term::Name(s)
                })
            }
            Tok::Number(s) => {
                self.bump();
                Ok(Term::Name(Sym::from(s)))
            }
            Tok::Tilde => {
                self.bump();
                let (n, span) = self.ident()?;
                if self.is_var(&n) {
                    return Err(Diagnostic::error(
                        span,
                        "a dual endpoint needs a literal reference",
                    ));
                }
                Ok(Term::Dual(n))
            }
            Tok::LBrace => Ok(Term::Private(self.private_data()?)),
            _ => Err(self.unexpected("a term")),
        }
    }

    fn object(&mut self) -> PResult<Term> {
        let span = self.span();
        let t = self.term()?;
        if let Term::Dual(_) = t {
            return Err(
                Diagnostic::error(span, "a dual endpoint cannot be passed as an object")
                    .with_hint("only the store side uses `~r`"),
            );
        }
        Ok(t)
    }

    fn placeholder(&mut self) -> PResult<Placeholder> {
        let k = match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Placeholder::Var(Sym::from(s))
            }
            Tok::LBrace => {
                self.bump();
                let id = match self.peek().clone() {
                    Tok::Underscore => {
                        self.bump();
                        None
                    }
                    Tok::Ident(s) => {
                        self.bump();
                        Some(Sym::from(s))
                    }
                    _ => return Err(self.unexpected("a variable or `_`")),
                };
                self.expect(Tok::Hash)?;
                let (y, _) = self.ident()?;
                self.expect(Tok::RBrace)?;
                match id {
                    Some(x) => Placeholder::Priv(x, y),
                    None => Placeholder::Anon(y),
                }
            }
            _ => return Err(self.unexpected("a placeholder")),
        };
        // annotations on placeholders are accepted and not kept
        if self.eat(&Tok::Colon) {
            self.ty()?;
        }
        Ok(k)
    }

    // ------------------------------------------------------------ processes and systems

    fn sys_list(&mut self) -> PResult<Item> {
        let first = self.par_list()?;
        if *self.peek() != Tok::BarBar {
            return Ok(first);
        }
        let mut items = vec![first.into_system()];
        while self.eat(&Tok::BarBar) {
            items.push(self.par_list()?.into_system());
        }
        Ok(Item::S(System::par_all(items)))
    }

    fn par_list(&mut self) -> PResult<Item> {
        let start = self.span();
        let first = self.unit()?;
        if *self.peek() != Tok::Bar {
            return Ok(first);
        }
        let mut procs = Vec::new();
        let push = |it: Item, procs: &mut Vec<Process>| match it {
            Item::P(p) => {
                procs.push(p);
                Ok(())
            }
            Item::S(_) => Err(Diagnostic::error(
                start,
                "systems are composed with `||`, not `|`",
            )),
        };
        push(first, &mut procs)?;
        while self.eat(&Tok::Bar) {
            let it = self.unit()?;
            push(it, &mut procs)?;
        }
        Ok(Item::P(Process::par_all(procs)))
    }

    fn proc_unit(&mut self) -> PResult<Process> {
        let span = self.span();
        match self.unit()? {
            Item::P(p) => Ok(p),
            Item::S(_) => Err(Diagnostic::error(
                span,
                "expected a process, found a system",
            )),
        }
    }

    fn unit(&mut self) -> PResult<Item> {
        self.enter()?;
        let it = self.unit_inner()?;
        self.depth -= 1;
        Ok(it)
    }

    fn unit_inner(&mut self) -> PResult<Item> {
        let t = self.peek().clone();
        match t {
            Tok::Number(ref n) if n == "0" => {
                self.bump();
                Ok(Item::P(Process::Nil))
            }
            Tok::Star => {
                self.bump();
                Ok(Item::P(Process::repl(self.proc_unit()?)))
            }
            Tok::Ident(ref s) if s == "if" => self.conditional(),
            Tok::Ident(ref s) if s == "store" && matches!(self.peek_at(1), Tok::Ident(_)) => {
                self.bump();
                let (r, span) = self.ident()?;
                if self.is_var(&r) {
                    return Err(Diagnostic::error(
                        span,
                        "store references must be literal names",
                    ));
                }
                let datum = self.private_data()?;
                Ok(Item::P(Process::Store {
                    reference: r,
                    datum,
                }))
            }
            Tok::LParen if kw(self.peek_at(1), "new") => self.restriction(),
            Tok::LParen => {
                if let Some(p) = self.input_power()? {
                    return Ok(Item::P(p));
                }
                self.bump();
                let inner = self.sys_list()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(_) if *self.peek_at(1) == Tok::LBrack => {
                let (g, _) = self.ident()?;
                self.bump();
                let inner = self.sys_list()?;
                self.expect(Tok::RBrack)?;
                Ok(Item::S(match inner {
                    Item::P(body) => System::Group { group: g, body },
                    Item::S(s) => System::GroupSys {
                        group: g,
                        body: Box::new(s),
                    },
                }))
            }
            Tok::Ident(_) | Tok::Tilde | Tok::LBrace | Tok::Number(_) => self.prefix().map(Item::P),
            _ => Err(self.unexpected("a process or system")),
        }
    }

    fn restriction(&mut self) -> PResult<Item> {
        self.expect(Tok::LParen)?;
        self.expect_kw("new")?;
        let (name, _) = self.ident()?;
        let ty = if self.eat(&Tok::Colon) {
            Some(self.ty()?)
        } else {
            None
        };
        self.expect(Tok::RParen)?;
        self.scope.push((name.clone(), false));
        let body = self.unit();
        self.scope.pop();
        Ok(match body? {
            Item::P(p) => Item::P(Process::Res {
                name,
                ty,
                body: Box::new(p),
            }),
            Item::S(s) => Item::S(System::Res {
                name,
                ty,
                body: Box::new(s),
            }),
        })
    }

    /// `(u?(k...))^m P`. `None` (with the cursor restored) when the
    /// parenthesis does not open an input power.
    fn input_power(&mut self) -> PResult<Option<Process>> {
        let (save, depth) = (self.i, self.depth);
        let head = (|| -> PResult<(Term, Vec<Placeholder>)> {
            self.expect(Tok::LParen)?;
            let subject = self.term()?;
            self.expect(Tok::Query)?;
            let patterns = self.patterns()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::Caret)?;
            Ok((subject, patterns))
        })();
        let Ok((subject, patterns)) = head else {
            self.i = save;
            self.depth = depth;
            return Ok(None);
        };
        let span = self.span();
        let (m, _) = self.ident_or_number()?;
        let m: usize = match m.as_str().parse() {
            Ok(m) if (1..=64).contains(&m) => m,
            _ => {
                return Err(Diagnostic::error(
                    span,
                    "input power must be between 1 and 64",
                ))
            }
        };
        self.eat(&Tok::Dot);
        let cont = self.with_patterns(&patterns, |p| p.proc_unit())?;
        Ok(Some((0..m).fold(cont, |acc, _| {
            Process::inp(subject.clone(), patterns.clone(), acc)
        })))
    }

    fn patterns(&mut self) -> PResult<Vec<Placeholder>> {
        let start = self.expect(Tok::LParen)?;
        let mut ks = Vec::new();
        if *self.peek() != Tok::RParen {
            ks.push(self.placeholder()?);
            while self.eat(&Tok::Comma) {
                ks.push(self.placeholder()?);
            }
        }
        self.expect(Tok::RParen)?;
        let mut seen = std::collections::BTreeSet::new();
        for v in ks.iter().flat_map(|k| k.vars()) {
            if !seen.insert(v.clone()) {
                return Err(Diagnostic::error(
                    start,
                    format!("variable {v} bound twice in one input"),
                ));
            }
        }
        Ok(ks)
    }

    fn with_patterns<T>(
        &mut self,
        ks: &[Placeholder],
        f: impl FnOnce(&mut Self) -> PResult<T>,
    ) -> PResult<T> {
        let n = self.scope.len();
        for k in ks {
            for v in k.vars() {
                self.scope.push((v.clone(), true));
            }
        }
        let r = f(self);
        self.scope.truncate(n);
        r
    }

    fn prefix(&mut self) -> PResult<Process> {
        let span = self.span();
        let subject = self.term()?;
        if matches!(subject, Term::Private(_)) {
            return Err(Diagnostic::error(
                span,
                "private data cannot be used as a subject",
            ));
        }
        match self.peek() {
            Tok::Bang => {
                self.bump();
                self.expect(Tok::Lt)?;
                let mut objects = Vec::new();
                if *self.peek() != Tok::Gt {
                    objects.push(self.object()?);
                    while self.eat(&Tok::Comma) {
                        objects.push(self.object()?);
                    }
                }
                self.expect(Tok::Gt)?;
                self.expect(Tok::Dot)?;
                let cont = self.proc_unit()?;
                Ok(Process::out(subject, objects, cont))
            }
            Tok::Query => {
                self.bump();
                let patterns = self.patterns()?;
                self.expect(Tok::Dot)?;
                let cont = self.with_patterns(&patterns, |p| p.proc_unit())?;
                Ok(Process::inp(subject, patterns, cont))
            }
            Tok::Select => {
                self.bump();
                let label = self.label()?;
                self.expect(Tok::Dot)?;
                let cont = self.proc_unit()?;
                Ok(Process::Select {
                    subject,
                    label,
                    cont: Box::new(cont),
                })
            }
            Tok::Offer => {
                self.bump();
                self.expect(Tok::LBrace)?;
                let mut arms = Vec::new();
                loop {
                    let label = self.label()?;
                    self.expect(Tok::Colon)?;
                    let s = self.span();
                    let body = match self.par_list()? {
                        Item::P(p) => p,
                        Item::S(_) => {
                            return Err(Diagnostic::error(s, "branch arms are processes"))
                        }
                    };
                    arms.push((label, body));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RBrace)?;
                Ok(Process::Branch { subject, arms })
            }
            _ => Err(self.unexpected("`!`, `?`, `<|` or `|>`")),
        }
    }

    fn label(&mut self) -> PResult<BranchLabel> {
        let (l, span) = self.ident()?;
        BranchLabel::parse(l.as_str())
            .ok_or_else(|| Diagnostic::error(span, format!("unknown branch label {l}")))
    }

    fn conditional(&mut self) -> PResult<Item> {
        self.expect_kw("if")?;
        let lhs = self.term()?;
        let op = match self.peek() {
            Tok::Eq => MatchOp::Eq,
            Tok::Gt => MatchOp::Gt,
            _ => return Err(self.unexpected("`=` or `>`")),
        };
        self.bump();
        let rhs = self.term()?;
        self.expect_kw("then")?;
        let then = self.proc_unit()?;
        self.expect_kw("else")?;
        let els = self.proc_unit()?;
        Ok(Item::P(Process::If {
            op,
            lhs,
            rhs,
            then: Box::new(then),
            els: Box::new(els),
        }))
    }

    // ------------------------------------------------------------ policies

    fn lambda(&mut self) -> PResult<Lambda> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(s) if s == "inf" => {
                self.bump();
                Ok(Lambda::Omega)
            }
            Tok::Number(n) => {
                self.bump();
                n.parse::<u64>().ok().and_then(Lambda::fin).ok_or_else(|| {
                    Diagnostic::error(span, "a budget is a positive number or `inf`")
                })
            }
            _ => Err(self.unexpected("a number or `inf`")),
        }
    }

    fn permission(&mut self) -> PResult<Permission> {
        let (w, span) = self.ident()?;
        Ok(match w.as_str() {
            "read" => Permission::Read,
            "update" => Permission::Update,
            "reference" => Permission::Reference,
            "store" => Permission::Store,
            "readId" => Permission::ReadId,
            "aggregate" => Permission::Aggregate,
            "disseminate" => {
                let (g, _) = self.ident()?;
                Permission::Disseminate(g, self.lambda()?)
            }
            "nondisclose" => {
                let (k, span) = self.ident()?;
                Permission::NonDisclose(DisclosureKind::parse(k.as_str()).ok_or_else(|| {
                    Diagnostic::error(span, format!("unknown disclosure kind {k}"))
                        .with_hint("one of disclosure, confidential, sensitive")
                })?)
            }
            "usage" => Permission::Usage(self.ident()?.0),
            "identify" => Permission::Identify(self.ident()?.0),
            _ => return Err(Diagnostic::error(span, format!("unknown permission {w}"))),
        })
    }

    fn hierarchy(&mut self) -> PResult<Hierarchy> {
        self.enter()?;
        let (group, _) = self.ident()?;
        let mut perms = PermSet::new();
        if self.eat(&Tok::LBrace) {
            if *self.peek() != Tok::RBrace {
                perms.insert(self.permission()?);
                while self.eat(&Tok::Comma) {
                    perms.insert(self.permission()?);
                }
            }
            self.expect(Tok::RBrace)?;
        }
        let mut children = Vec::new();
        if self.eat(&Tok::LBrack) {
            if *self.peek() != Tok::RBrack {
                children.push(self.hierarchy()?);
                while self.eat(&Tok::Comma) {
                    children.push(self.hierarchy()?);
                }
            }
            self.expect(Tok::RBrack)?;
        }
        self.depth -= 1;
        Ok(Hierarchy {
            group,
            perms,
            children,
        })
    }
}

/// Parses a system file. A lone process becomes [`System::Bare`].
pub fn parse_system(src: &str) -> Result<System, Diagnostic> {
    let mut p = Parser::new(src)?;
    let item = p.sys_list()?;
    p.expect(Tok::Eof)?;
    Ok(item.into_system())
}

pub fn parse_process(src: &str) -> Result<Process, Diagnostic> {
    let mut p = Parser::new(src)?;
    let span = p.span();
    let item = p.sys_list()?;
    p.expect(Tok::Eof)?;
    match item {
        Item::P(q) => Ok(q),
        Item::S(_) => Err(Diagnostic::error(
            span,
            "expected a process, found a system",
        )),
    }
}

pub fn parse_policy(src: &str) -> Result<Policy, Diagnostic> {
    let mut p = Parser::new(src)?;
    let mut entries = Vec::new();
    while *p.peek() != Tok::Eof {
        p.expect_kw("private")?;
        let (t, _) = p.ident()?;
        p.expect(Tok::GtGt)?;
        let h = p.hierarchy()?;
        entries.push((t, h));
        p.eat(&Tok::Semi);
    }
    if entries.is_empty() {
        return Err(Diagnostic::error(
            p.span(),
            "policy must bind at least one private type",
        ));
    }
    Ok(Policy { entries })
}

pub fn parse_env(src: &str) -> Result<Gamma, Diagnostic> {
    let mut p = Parser::new(src)?;
    let mut gamma = Gamma::new();
    while *p.peek() != Tok::Eof {
        if kw(p.peek(), "private") && *p.peek_at(1) != Tok::Colon {
            p.bump();
            gamma.declare_private(&p.ident()?.0);
            while p.eat(&Tok::Comma) {
                gamma.declare_private(&p.ident()?.0);
            }
            p.eat(&Tok::Semi);
            continue;
        }
        let span = p.span();
        let key = if *p.peek() == Tok::LBrace {
            p.bump();
            let identity = if p.eat(&Tok::Underscore) {
                Identity::Hidden
            } else {
                Identity::Known(p.ident()?.0)
            };
            p.expect(Tok::Hash)?;
            let (c, _) = p.ident_or_number()?;
            p.expect(Tok::RBrace)?;
            GammaKey::Data(PrivateData {
                identity,
                data: DataValue::Const(c),
            })
        } else {
            GammaKey::Name(p.ident_or_number()?.0)
        };
        p.expect(Tok::Colon)?;
        let ty = p.ty()?;
        gamma
            .insert(key, ty)
            .map_err(|e| Diagnostic::error(span, e.to_string()))?;
        p.eat(&Tok::Semi);
    }
    Ok(gamma)
}
