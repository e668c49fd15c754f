use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("empty input")]
    EmptyInput,
    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("quotient by every block leaves no unital algebra")]
    EmptyQuotient,
    #[error("{0} blocks exceed the enumeration guard of 20")]
    TooManyBlocks(usize),
    #[error("invalid *-homomorphism data: {0}")]
    InvalidHom(String),
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("element does not lie in the expected subspace (residual {residual:.3e})")]
    NotInSpan { residual: f64 },
    #[error("Shilov ideal computation is numerically inconsistent: {0}")]
    ShilovInconsistent(String),
    #[error("covers have different base algebras")]
    BaseMismatch,
    #[error("not a C*-cover: {0}")]
    NotCover(String),
    #[error("image of the ideal is not a union of target blocks: {0}")]
    ImageNotIdeal(String),
    #[error("ideal is not the Shilov ideal: {0}")]
    NotShilov(String),
    #[error("map is not completely contractive: {0}")]
    NotContractive(String),
    #[error("twist parameter |z| = {0} lies outside the closed unit disk")]
    OutsideDisk(f64),
    #[error("embedding is not an isometry (defect {0:.3e})")]
    NotIsometry(f64),
    #[error("corner block vanishes on every basis element")]
    TrivialCorner,
    #[error("representation is not block upper triangular (lower corner norm {0:.3e})")]
    NotUpperTriangular(f64),
    #[error("*-algebra decomposition failed: {0}")]
    Decomposition(String),
    #[error("word parse error at byte {position}: {message}")]
    WordParse { position: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
