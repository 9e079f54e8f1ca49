use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("invalid root {0}: roots must be nonzero and not a perfect square")]
    InvalidRoot(i64),
    #[error("duplicate root {0} after squarefree reduction")]
    DuplicateRoot(i64),
    #[error("roots {0:?} are multiplicatively dependent")]
    DependentRoots(Vec<i64>),
    #[error("sqrt({0}) is not in the declared field")]
    UndeclaredRoot(i64),
    #[error("undeclared parameter `{0}`")]
    UndeclaredParameter(String),
    #[error("missing value for parameter `{0}`")]
    MissingParameter(String),
    #[error("denominator vanishes at {0}")]
    DenominatorVanishes(String),
    #[error("sqrt({root}) has no residue mod {p}")]
    RootHasNoResidue { root: i64, p: u64 },
    #[error("denominator not invertible mod {0}")]
    NonInvertibleDenominator(u64),
    #[error("residue {residue} does not square to {root} mod {p}")]
    BadRootResidue { root: i64, residue: u64, p: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("expression syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("division by the zero polynomial")]
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("operator tuple has {got} matrices, class `{class}` needs {expected}")]
    WrongTupleArity { class: String, expected: usize, got: usize },
    #[error("class `{0}` is not linear")]
    NonlinearClass(String),
    #[error("structure constants depend on parameters {0:?}; instantiate them first")]
    ParametricAlgebra(Vec<String>),
    #[error("class `{0}` is not defined for this arity")]
    UnsupportedClass(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("search space {candidates} exceeds the guard {limit}")]
    SearchSpaceTooLarge { candidates: u128, limit: u128 },
    #[error("prime {0} is not in the supported list")]
    UnsupportedPrime(u64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("input bracket is not Leibniz")]
    NotLeibniz,
    #[error("operator is not averaging on the input")]
    NotAveraging,
    #[error("operator is not injective")]
    NotInjective,
    #[error("operator is not Nijenhuis on the input")]
    NotNijenhuis,
    #[error("binary precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },
    #[error("coefficient at {path}: {source}")]
    Coefficient {
        path: String,
        #[source]
        source: ScalarError,
    },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl DocumentError {
    pub fn schema(path: impl Into<String>, reason: impl Into<String>) -> Self {
        DocumentError::Schema { path: path.into(), reason: reason.into() }
    }

    /// Undeclared parameters and roots surface as their scalar error.
    pub fn scalar(&self) -> Option<&ScalarError> {
        match self {
            DocumentError::Coefficient { source, .. } => Some(source),
            _ => None,
        }
    }
}
