//! Semantic similarity of Lean-style theorem statements.
//!
//! The pipeline is `parse_theorem` → `standardize` → `build_opt`, then
//! `gted_distance`/`similarity` on the resulting operator trees. The
//! [`evalkit`] module turns per-pair decisions into confusion matrices,
//! metric reports and threshold sweeps.
//!
//! ```
//! use gted_core::{similarity, tree_of, AlphaMode, CostModel, TransformationSet};
//!
//! let a = tree_of("theorem t1 (x : Nat) : P x", &Default::default()).unwrap();
//! let b = tree_of("theorem t2 (y : Nat) : P y", &Default::default()).unwrap();
//! let set = TransformationSet::with_alpha(AlphaMode::Scoped, true, CostModel::unit());
//! assert_eq!(similarity(&a, &b, &set, true), Some(1.0));
//! ```

pub mod corpus;
pub mod evalkit;
pub mod gted;
pub mod opt;
pub mod parser;
pub mod standardize;
pub mod ted;

pub use corpus::{fixture_trees, tree_of, Fixture, FIXTURES};
pub use evalkit::{
    bleu, confusion, identity_match, parse_theta_grid, report, sweep, write_sweep_csv,
    ConfusionMatrix, EvalError, MetricReport, SweepPoint,
};
pub use gted::{
    alpha_transformation, canonicalize, decide, gted_distance, is_colocal_depiction,
    is_local_depiction, passes_threshold, rename_bound_variable, score, similarity, AlphaMode,
    DecisionConfig, GeneralizedTransformation, GtedError, Matcher, Score, SpecialTransformation,
    TransformationSet,
};
pub use opt::{build_opt, expr_tree, NodeId, OperatorTree, OptError, OptNode};
pub use parser::{parse_theorem, Binder, Expr, ExprKind, ParseError, TheoremStmt};
pub use standardize::{standardize, StandardizeConfig, StandardizedStmt};
pub use ted::{ted_bruteforce, ted_distance, ted_edit_script, CostModel, EditOp, TedError};
