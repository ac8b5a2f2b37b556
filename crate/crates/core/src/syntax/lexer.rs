use super::{Diagnostic, Pos, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(String),
    Underscore,
    Bang,
    Query,
    Lt,
    Gt,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Dot,
    Comma,
    Colon,
    Semi,
    Bar,
    BarBar,
    Star,
    Eq,
    Hash,
    Tilde,
    Caret,
    GtGt,
    /// `<|`
    Select,
    /// `|>`
    Offer,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Underscore => "_",
            Tok::Bang => "!",
            Tok::Query => "?",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Dot => ".",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Bar => "|",
            Tok::BarBar => "||",
            Tok::Star => "*",
            Tok::Eq => "=",
            Tok::Hash => "#",
            Tok::Tilde => "~",
            Tok::Caret => "^",
            Tok::GtGt => ">>",
            Tok::Select => "<|",
            Tok::Offer => "|>",
            Tok::Ident(_) | Tok::Number(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '%'
}

fn ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '%'
}

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let pos = |line, col| Pos { line, col };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = pos(line, col);
        let (tok, len) = if ident_start(c) {
            let mut j = i + 1;
            while j < chars.len() && ident_continue(chars[j]) {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let tok = if s == "_" {
                Tok::Underscore
            } else {
                Tok::Ident(s)
            };
            (tok, j - i)
        } else if c.is_ascii_digit() {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            (Tok::Number(chars[i..j].iter().collect()), j - i)
        } else {
            let next = chars.get(i + 1).copied();
            match (c, next) {
                ('|', Some('|')) => (Tok::BarBar, 2),
                ('|', Some('>')) => (Tok::Offer, 2),
                ('<', Some('|')) => (Tok::Select, 2),
                ('>', Some('>')) => (Tok::GtGt, 2),
                _ => {
                    let t = match c {
                        '!' => Tok::Bang,
                        '?' => Tok::Query,
                        '<' => Tok::Lt,
                        '>' => Tok::Gt,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '[' => Tok::LBrack,
                        ']' => Tok::RBrack,
                        '{' => Tok::LBrace,
                        '}' => Tok::RBrace,
                        '.' => Tok::Dot,
                        ',' => Tok::Comma,
                        ':' => Tok::Colon,
                        ';' => Tok::Semi,
                        '|' => Tok::Bar,
                        '*' => Tok::Star,
                        '=' => Tok::Eq,
                        '#' => Tok::Hash,
                        '~' => Tok::Tilde,
                        '^' => Tok::Caret,
                        _ => {
                            return Err(Diagnostic::error(
                                Span::new(start, pos(line, col + 1)),
                                format!("unexpected character {c:?}"),
                            ))
                        }
                    };
                    (t, 1)
                }
            }
        };
        i += len;
        col += len;
        out.push(Token {
            tok,
            span: Span::new(start, pos(line, col)),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(pos(line, col), pos(line, col)),
    });
    Ok(out)
}
