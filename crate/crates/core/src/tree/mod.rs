//! Coverage queries on trees: distances through lowest common ancestors, a binary
//! version of the tree, its spine decomposition and per-λ coverage arrays.

mod binary;
mod coverage;
mod rooted;
mod spine;

pub use binary::{binarize, BinaryTransform, TreePoint};
pub use coverage::{
    build_coverage_arrays, query_at_least_k, query_count, CoverageAnswer, CoverageArray, CoverageArrays, TreeEngine,
};
pub use rooted::{build_distance_oracle, RootedTree, TreeDistanceOracle};
pub use spine::{spine_decompose, NodeKind, SpineNode, SpineTree};
