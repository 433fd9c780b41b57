//! Exact unit-distance graphs, their colouring formulas, and clausal proof
//! tooling for shrinking unsatisfiable instances.

pub mod cnf;
pub mod field;
pub mod graph;
pub mod proof;
pub mod solver;
pub mod encode;
pub mod optimize;
pub mod trim;
