//! Proof transformations: removing weakening, unfolding dags into trees with
//! input lemmas, restricting proofs, and simulating dags over the variable
//! extension.

mod extension;
mod restrict;
mod unfold;
mod weakening;

pub use extension::{build_input_chain, ve_simulate};
pub use restrict::restrict_proof;
pub use unfold::{unfold_to_rti, Unfolded};
pub use weakening::eliminate_weakening;

use crate::checker::{check_proof, Verdict};
use crate::cnf::{Clause, Formula};
use crate::proof::{LemmaPolicy, Proof, RuleSet, Shape, SystemDescriptor};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("input proof rejected:\n{0}")]
    Invalid(Verdict),
    #[error("input proof uses a rule this transformation does not accept: {0}")]
    Unsupported(String),
    #[error("the restriction satisfies the final clause")]
    Satisfied,
    #[error("the proof derives no clause")]
    NothingDerived,
    #[error("{t} derived clauses do not fit a tree of height {n}")]
    TooManyClauses { t: usize, n: usize },
    #[error("derived clause {0} is a tautology")]
    Tautology(Clause),
    #[error("the variable extension lacks {0}")]
    MissingExtensionClause(Clause),
    #[error("the formula has no variables to extend")]
    NoExtension,
    #[error("pivot {0} does not occur with the required signs")]
    PivotMissing(crate::cnf::Lit),
}

/// Any rule, lemmas anywhere, dag regularity off.
pub(crate) const ANY_PROOF: SystemDescriptor =
    SystemDescriptor { shape: Shape::Dag, lemmas: LemmaPolicy::Any, rules: RuleSet::ALL, regular: false, max_lemma_size: None };

pub(crate) fn validate(p: &Proof, f: &Formula, sys: &SystemDescriptor) -> Result<(), TransformError> {
    let v = check_proof(p, f, sys, false);
    if v.accepted() {
        Ok(())
    } else {
        Err(TransformError::Invalid(v))
    }
}
