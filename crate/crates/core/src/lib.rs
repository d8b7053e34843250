//! Reasoning engine for graph generating dependencies (GGDs) over property
//! graphs: parsing, matching, validation, the chase, satisfiability and
//! implication.

pub mod chase;
pub mod gen;
pub mod graph;
pub mod lang;
pub mod matcher;
pub mod random;
pub mod reasoner;
pub mod validator;
