use thiserror::Error;

use crate::report::Witness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size limit exceeded: {0}")]
    SizeExceeded(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("relation is not a partial order: {0}")]
    NotAPoset(Witness),
    #[error("lattice is not a frame: {0}")]
    NotAFrame(Witness),
    #[error("family is not closed under lattice operations: {0}")]
    NotClosed(String),
    #[error("elements belong to different frames")]
    CrossFrame,
    #[error("map is not a frame homomorphism: {0}")]
    NotAFrameHom(Witness),
    #[error("action violates a module law: {0}")]
    ModuleLaw(Witness),
    #[error("module is not stable (bx = b1 ∧ x fails): {0}")]
    NotStable(Witness),
    #[error("B-locale is not open")]
    NotOpen,
    #[error("B-locale is not étale")]
    NotEtale,
    #[error("inner product violates an axiom: {0}")]
    InnerProductLaw(Witness),
    #[error("module is not supported: {0}")]
    NotSupported(Witness),
    #[error("subset is not a Hilbert basis: {0}")]
    NoBasis(Witness),
    #[error("matrix is not a projection matrix: {0}")]
    NotProjection(Witness),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("arrow law violated: {0}")]
    ArrowLawViolation(Witness),
    #[error("map is not a module homomorphism: {0}")]
    NotAHom(Witness),
    #[error("map is not a sheaf homomorphism: {0}")]
    NotSheafHom(Witness),
    #[error("modules or frames do not match: {0}")]
    Mismatch(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
