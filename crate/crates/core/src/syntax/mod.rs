//! Concrete syntax for system (`.pc`), policy (`.ppo`) and environment
//! (`.env`) files.
//!
//! ```text
//! Hospital[ Lab[ b?(w). w?({x # y}). r?({_ # z}). if y = z then c!<w>.0 else 0 ] ]
//! private patient_data >> Hospital {} [ Nurse {reference, disseminate Hospital inf} ];
//! r : Police[crime<dna>]
//! ```

mod lexer;
mod parser;
mod render;

use std::fmt;
use std::path::{Path, PathBuf};

pub use parser::{parse_env, parse_policy, parse_process, parse_system};
pub use render::{render_env, render_policy, render_process, render_system, render_type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn new(start: Pos, end: Pos) -> Self {
        Span { start, end }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}-{}:{}",
            self.start.line, self.start.col, self.end.line, self.end.col
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message}")]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub message: String,
    pub hint: Option<String>,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            span,
            message: message.into(),
            hint: None,
        }
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Self {
        self.hint = Some(hint.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    System,
    Policy,
    Environment,
}

impl FileKind {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "pc" => Some(FileKind::System),
            "ppo" => Some(FileKind::Policy),
            "env" => Some(FileKind::Environment),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SourceFile {
    pub path: PathBuf,
    pub text: String,
    pub kind: FileKind,
}

impl SourceFile {
    pub fn new(path: impl Into<PathBuf>, text: String, kind: Option<FileKind>) -> Option<Self> {
        let path = path.into();
        let kind = kind.or_else(|| FileKind::from_path(&path))?;
        Some(SourceFile { path, text, kind })
    }
}
