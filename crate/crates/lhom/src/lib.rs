//! Toolkit for list-homomorphism and binary constraint-satisfaction
//! instances: decision engines driven by linear layouts and feedback vertex
//! sets (including the rank-reduced representative-set sweep), target-graph
//! hardness invariants, and compilers from CNF-SAT into verified
//! list-homomorphism instances.

pub mod gadgets;
pub mod gen;
pub mod graph;
pub mod instance;
pub mod invariants;
pub mod io;
pub mod layouts;
pub mod solvers;
