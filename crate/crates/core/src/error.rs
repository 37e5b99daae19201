use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("tetrahedron index {0} out of range")]
    TetOutOfRange(usize),
    #[error("face {face} of tetrahedron {tet} is glued to itself")]
    SelfGluedFace { tet: usize, face: usize },
    #[error("gluing of face {face} of tetrahedron {tet} is not matched by its partner")]
    NonInvolutive { tet: usize, face: usize },
    #[error("face {face} of tetrahedron {tet} is already glued")]
    AlreadyGlued { tet: usize, face: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("malformed isomorphism signature: {0}")]
    MalformedSignature(String),
    #[error("unsupported signature version {0:?}")]
    UnsupportedVersion(char),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("move not applicable: {0}")]
    MoveRefused(String),
    #[error("index {index} out of range for {what}")]
    BadIndex { what: &'static str, index: usize },
    #[error("dimension mismatch: expected {expected} columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("surface vector is not admissible: {0}")]
    NotAdmissible(String),
    #[error("coordinate too large for an explicit surface complex")]
    CoordinateOverflow,
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
