//! Optimal graph joinings between weighted, vertex-labeled graphs.
//!
//! Graphs are weight functions on ordered vertex pairs. A joining of two
//! graphs is a weight function on the product vertex set that couples both
//! marginals and both random-walk transitions. Minimizing a vertex cost over
//! joinings is a linear program, solved here exactly over the rationals; the
//! zero-cost bijective extreme points of its solution set are the graph
//! isomorphisms for the label-based cost of a suitable labeling scheme.

pub mod error;
pub mod families;
pub mod graph;
pub mod iso;
pub mod joining;
pub mod labeling;
pub mod lp;
pub mod metric;
pub mod oracle;
pub mod rational;
pub mod sweep;

pub use error::{OgjError, Result};
pub use graph::{GraphDocument, MarkovChain, SimpleGraph, WeightedGraph};
pub use iso::{detect, identify, ogj_cost, DetectionResult, Verdict};
pub use joining::{ConstraintSystem, WeightJoining};
pub use labeling::{AugmentedLabeling, CostMatrix, LabelValue, Scheme};
pub use lp::{solve, BasicSolution, LpSolution};
pub use rational::Rational;
