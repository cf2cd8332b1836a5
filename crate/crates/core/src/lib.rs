//! Fairness auditing of classifiers over constrained feature spaces, based on
//! abductive explanations.

pub mod classifier;
pub mod document;
pub mod error;
pub mod explain;
pub mod expr;
pub mod fairness;
pub mod model;
pub mod satcheck;

pub use classifier::{ClassLabel, Classifier, ClassifierForm, DecisionTree, Equivalence, TreeNode};
pub use document::{parse_model, Model};
pub use error::{Error, Result};
pub use explain::{Decision, DecisionLattice, Explanation, ExplanationKind};
pub use expr::{parse_expr, BoolExpr};
pub use model::{
    constraint_scope_profile, ConstrainedSpace, ConstraintSet, Feature, FeatureSet, FeatureSpace, Instance, Limits,
    ScopeProfile, Value,
};
pub use fairness::{
    build_completion, check_decomposable, check_disentangled, check_ftu, check_loose, check_loose_at, loose_violations,
    classifier_verdict, decision_verdict, decision_verdicts, extend_protected_ftci, CausalGraph, ClassifierVerdict,
    DecisionStatus, DecisionVerdict, Engine, Outcome,
};
