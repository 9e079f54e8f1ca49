//! Exact toolkit for ternary and binary Leibniz algebras given by structure
//! constants, their operator classes, and finite-field cross-checks.

pub mod algebra;
pub mod catalog;
pub mod constructions;
pub mod error;
pub mod io;
pub mod operators;
pub mod scalar;
pub mod solvers;
