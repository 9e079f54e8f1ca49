//! Exact nullspaces for linear classes and finite-field enumeration for all classes.

pub mod completeness;
pub mod fp;
pub mod nullspace;
pub mod propositions;

pub use completeness::{completeness_report, completeness_report_family, CompletenessOptions, CompletenessReport};
pub use fp::{
    enumerate_binary_over_fp, enumerate_family_over_fp, enumerate_over_fp, CompiledSystem, EnumerateOptions, FpSolution, FpSolutionSet,
    DEFAULT_GUARD, PRIME_ALLOWLIST,
};
pub use nullspace::{nullspace, rank_mod_p, solve_linear, NullspaceResult};
pub use propositions::{
    idempotent_check, inverse_rota_baxter_check, square_zero_check, Proposition, PropositionCheck,
};
