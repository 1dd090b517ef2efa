//! Surface embeddings, Euler-excess lower bounds, and edge-deletion
//! certificates for dense graph families.
//!
//! The library has three layers:
//!
//! * combinatorial substrate — [`graph`] (families, invariants) and
//!   [`embedding`] (rotation systems, face tracing, surgery primitives);
//! * closed forms — [`formulas`] (exact rational excess, genus formulas,
//!   special values, bound chains);
//! * evidence — [`constructions`] (explicit embeddings and deletion
//!   certificates) checked against [`search`] (independent brute-force
//!   oracles for planarity, genus, skewness and plane crossing number).
//!
//! Everything is deterministic: identical inputs produce identical outputs,
//! including serialized files and search results, regardless of parallelism.

pub mod constructions;
pub mod embedding;
pub mod formulas;
pub mod graph;
pub mod reports;
pub mod search;

pub use graph::{generate, parse_graph, serialize_graph, FamilySpec, Girth, Graph, GraphError};
