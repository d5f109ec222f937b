//! Exact solvers for the connected k-vertex one-center problem.
//!
//! Given a connected graph with positive vertex weights and edge lengths and an integer
//! `k`, find a point `x*` on the graph and a k-vertex subtree hanging off `x*` along
//! shortest paths that minimizes the largest weighted distance from `x*` to the subtree.

pub mod arrangement;
pub mod error;
pub mod feasibility;
pub mod generate;
pub mod graph;
pub mod klevel;
pub mod oracle;
pub mod par;
pub mod rational;
pub mod tree;
pub mod tree_solver;

pub use error::{Error, Result};
pub use graph::{all_pairs_distances, parse_instance, DistanceMatrix, EdgePoint, Graph, Instance, Solution};
pub use rational::Rational;
