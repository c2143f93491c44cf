//! Classification and disentanglement of known sets of bipartite quantum
//! states.
//!
//! Given a finite set of bipartite density matrices, this crate checks which
//! of three sufficient conditions for exact disentanglement the set
//! satisfies — perfectly distinguishable members, identical marginals, or a
//! party whose marginals commute — runs the matching machine
//! (measure-and-prepare, bilocal preparation, or local broadcasting) on a
//! chosen member, and verifies the output: both marginals preserved, output
//! product or separable, and its distance from PPT.
//!
//! Modules:
//!
//! * [`linalg`] — dense complex matrices, tensor products, partial
//!   trace/transpose, a Jacobi Hermitian eigensolver;
//! * [`entanglement`] — bipartite state types and the PPT, product and
//!   maximal-entanglement predicates;
//! * [`disentangle`] — the classification logic and the three machines;
//! * [`catalog`] — named example sets and seeded random state generators.

pub mod catalog;
pub mod disentangle;
pub mod entanglement;
mod error;
pub mod linalg;

pub use error::{Error, Result};
