//! Permission inference: Δ for processes, Θ for systems, and ≼.

mod env;
mod iface;
mod rules;

pub use env::*;
pub use iface::*;
pub use rules::*;
