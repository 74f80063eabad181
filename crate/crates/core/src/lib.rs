//! Decomposition of finite p-groups (p odd) into edges of cyclic groups in
//! the Roquette category, computed from conjugacy classes and power maps.
//!
//! The crate also carries an exact-rational model of the class-function
//! biset functor, used to check the identities the decomposition relies on.

pub mod arith;
pub mod class_functions;
pub mod cli;
pub mod constructions;
pub mod corpus;
pub mod decomposition;
pub mod group;
pub mod linalg;
pub mod oracles;
