//! Workbench for a privacy-aware pi-calculus with groups.
pub mod encoding;
pub mod kernel;
pub mod policy;
pub mod safety;
pub mod satisfaction;
pub mod semantics;
pub mod syntax;
pub mod typing;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/overview.md")]
    struct Overview;
    #[doc = include_str!("../../../book/src/syntax.md")]
    struct Syntax;
    #[doc = include_str!("../../../book/src/typing.md")]
    struct Typing;
    #[doc = include_str!("../../../book/src/policies.md")]
    struct Policies;
    #[doc = include_str!("../../../book/src/semantics.md")]
    struct Semantics;
    #[doc = include_str!("../../../book/src/safety.md")]
    struct Safety;
    #[doc = include_str!("../../../book/src/encoding.md")]
    struct Encoding;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
