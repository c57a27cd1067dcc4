use thiserror::Error;

/// Every failure the engine reports. Validation failures are not errors; they
/// are carried by [`crate::report::ValidationReport`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("incompatible conductors {0} and {1}")]
    IncompatibleConductors(u32, u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not a complex: d∘d ≠ 0 starting at degree {0}")]
    NotAComplex(i32),
    #[error("not a chain map: f∘d ≠ d∘f in degree {0}")]
    NotChainMap(i32),
    #[error("modules live over different dgas")]
    BaseMismatch,
    #[error("morphisms are not composable: {0}")]
    ObjectMismatch(String),
    #[error("morphism is not closed")]
    NotClosed,
    #[error("expected degree {expected}, found {found}")]
    WrongDegree { expected: i32, found: i32 },
    #[error("hom complex is infinite dimensional: {0}")]
    InfiniteDimensional(String),
    #[error("module is not free: {0}")]
    NotFree(String),
    #[error("matrix is not idempotent")]
    NotIdempotent,
    #[error("invalid dga homomorphism: {0}")]
    InvalidHom(String),
    #[error("invalid bimodule: {0}")]
    InvalidBimodule(String),
    #[error("degrees are not complementary: {0}")]
    DegreeMismatch(String),
    #[error("input map is not a quasi-isomorphism: {0}")]
    NotQuasiIso(String),
    #[error("linear solve failed: {0}")]
    SolveFailed(String),
    #[error("connection lift failed in degree {0}")]
    LiftFailed(i32),
    #[error("not a module over the Lie algebra: {0}")]
    NotAModule(String),
    #[error("complex structure required")]
    MissingComplexStructure,
    #[error("curvature is not central: {0}")]
    NonCentralCurvature(String),
    #[error("curvature is not closed: {0}")]
    NonClosedCurvature(String),
    #[error("connection is not weight-homogeneous: {0}")]
    NotWeightHomogeneous(String),
    #[error("not a Lie algebra: {0}")]
    NotALieAlgebra(String),
    #[error("support box too small: {0}")]
    SupportBox(String),
    #[error("operation outside the supported class: {0}")]
    Unsupported(String),
    #[error("scalar parse error: {0}")]
    ScalarParse(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
