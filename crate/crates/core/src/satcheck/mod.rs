//! Counterexample search for constrained fairness through unawareness.
//!
//! The query "two instances of F[C] agree on every unprotected feature but
//! receive different labels" is encoded as CNF over two copies of the
//! feature variables and handed to a small backtracking search, or exported
//! as DIMACS for an external solver.

mod cnf;
mod encode;
mod search;

pub use cnf::{export_dimacs, parse_dimacs, CnfFormula, Lit};
pub use encode::{decode_model, encode_ftu_counterexample};
pub use search::{search, SearchResult, SearchStats, SearchStatus};
