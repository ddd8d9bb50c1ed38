//! DLL search with clause learning, resolution trees with lemmas, and the
//! transformations relating search executions to proofs.

pub mod cnf;
pub mod proof;
pub mod checker;
pub mod conflict;
pub mod transforms;
pub mod solvers;
