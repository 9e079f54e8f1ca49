//! Structure-constant models and identity residuals.

pub mod matrix;
pub mod residual;
pub mod structure;

pub use matrix::{OperatorMatrix, Vector};
pub use residual::{
    binary_compatibility_residual, binary_leibniz_residual, ternary_compatibility_residual,
    ternary_leibniz_residual, ResidualEntry, ResidualReport,
};
pub use structure::{all_tuples, basis, pencil, BinaryStructure, Structure, TernaryStructure};
