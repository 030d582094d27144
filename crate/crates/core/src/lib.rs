//! Weighted finite-state automata over differentiable semirings.
//!
//! The crate computes semiring dot products, single-source shortest
//! distances and the automaton weight `ν(A) = αᵀT*ω`, and differentiates
//! them with flattened vector-Jacobian products whose backward pass has
//! constant depth per ⊕-sum. A tape-based reverse mode ([`tape`]) and
//! brute-force references ([`oracle`]) are included for testing and
//! benchmarking.

pub mod check;
pub mod error;
pub mod generate;
pub mod linalg;
pub mod oracle;
pub mod semiring;
pub mod tape;
pub mod text;
pub mod wfsa;

pub use error::{Error, Result};
pub use linalg::{dot, dot_vjp, CotangentVector, CsrMatrix, SemiringVector};
pub use semiring::{
    Cotangent, Counted, CountedValue, Counting, ExpectationValue, Log, LogExpectation, LogKappa,
    OpCounter, Pair, Real, Semiring, SemiringParams,
};
pub use wfsa::{
    build_matrix, shortest_distance, topological_sort, weight, weight_vjp, Arc, Automaton,
    AutomatonGradients, Forward, WeightMatrix,
};
