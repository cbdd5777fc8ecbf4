//! List colorings of rooted trees that avoid repetitions along paths.
//!
//! [`solver`] colors a tree from lists by an erase-and-retry procedure driven
//! by a seed; [`entropy`] records runs compactly and recovers seeds from the
//! records; [`oracle`] holds independent checkers.

pub mod coloring;
pub mod entropy;
pub mod oracle;
pub mod power;
pub mod solver;
pub mod tree;

pub use coloring::PartialColoring;
pub use entropy::{counting_report, decode, decode_verified, encode, expand_walk, CountingReport, LogError, RunLog};
pub use oracle::{exhaustive_choosable, thue_ternary, verify_coloring, OracleError, PathMode, Verdict, Violation};
pub use power::{contains_power, is_of_form, parse_rational, PowerError, PowerSpec, Rational};
pub use solver::{solve, Mode, Run, RunStatus, Seed, SolveOutcome, Solver, SolverConfig, SolverError, StepKind};
pub use tree::{Color, ListAssignment, ListError, RootedTree, TreeError, TreeModel, VertexId};
