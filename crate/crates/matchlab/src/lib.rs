//! Online bipartite matching under stochastic arrival models.
//!
//! The crate has four layers:
//!
//! - [`models`] generates random type graphs and arrival sequences
//!   (Erdős–Rényi graphs, consecutive Poisson arrivals, known-i.i.d. draws)
//!   with reproducible per-stream randomness ([`seed`]).
//! - [`matching`] holds the exact offline oracles: maximum-cardinality and
//!   maximum-weight matching, and the residual-graph construction behind the
//!   two-matching policy.
//! - [`policies`] runs the online decision rules (greedy, greedy with free
//!   disposal, the one-suggested-matching rule, and the two-matching rule
//!   with free disposal) against an arrival sequence.
//! - [`analytics`] evaluates the closed-form performance theory: the
//!   expected-minimum function `h`, the greedy ODE, the fixed-point matching
//!   bound, ratio curves and their minimizer, and the Bernoulli-sum
//!   minimization lemma.
//!
//! [`harness`] ties these together into seeded Monte Carlo experiments, and
//! the `matchlab` binary exposes them as a CLI. The `book/` directory of the
//! repository walks through each layer; its code snippets compile and run as
//! doctests of this crate.

pub mod analytics;
pub mod error;
pub mod graph;
pub mod harness;
pub mod matching;
pub mod models;
pub mod policies;
pub mod seed;

pub use error::{Error, Result};
pub use graph::{ArrivalSequence, Instance, ModelTag, TypeGraph, TypeNode};
pub use matching::{Matching, ResidualGraph};
pub use models::{Density, ModelParams, RtpamView};
pub use policies::{SimulationTrace, TraceRound};
pub use seed::{Seed, SimRng, StreamKey};

// Book chapters double as doctests so the guide cannot drift from the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/offline.md")]
    mod offline {}
    #[doc = include_str!("../../../book/src/policies.md")]
    mod policies {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
