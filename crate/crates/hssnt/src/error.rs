use thiserror::Error;

/// Errors surfaced by model construction, root extraction and the
/// realization machinery.
#[derive(Debug, Error)]
pub enum HssntError {
    #[error("invalid space spec: {0}")]
    InvalidSpec(String),
    #[error("vectors belong to different models")]
    ModelMismatch,
    #[error("supplied abelian subspace is not maximal: centralizer in p has dimension {got}, expected {expected}")]
    DegenerateAbelian { got: usize, expected: usize },
    #[error("eigenvalue clusters not separable at tolerance: {0}")]
    ClusteringAmbiguity(String),
    #[error("restricted root system does not match a C_r/BC_r template: {0}")]
    NotHermitianType(String),
    #[error("Weyl word does not evaluate to a signed permutation (residual {0:.3e})")]
    NotSignedPermutation(f64),
    #[error("center of k has dimension {0}, expected 1")]
    CenterDimensionError(usize),
    #[error("Z-basis decomposition failed: {0}")]
    DecompositionFailure(String),
    #[error("unknown odd function name: {0}")]
    UnknownName(String),
    #[error("no power series available for {0}; cannot form the dual function")]
    NoSeriesAvailable(String),
    #[error("spectral decomposition failed its certificate: {0}")]
    CertificateFailure(String),
    #[error("spectral value {value:.6} outside the domain radius {radius:.6} of {eta}")]
    DomainExceeded {
        eta: String,
        value: f64,
        radius: f64,
    },
    #[error("Bergman operator not positive definite (eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),
    #[error("rank mismatch: h-map has rank {h_rank}, space has rank {rank}")]
    RankMismatch { h_rank: usize, rank: usize },
    #[error("point outside the cut cube (spectral value {0:.6} >= pi/2)")]
    OutsideCutLocus(f64),
    #[error("point is not principal: |{0}(v)| = {1:.3e}")]
    NonPrincipalPoint(String, f64),
    #[error("Jacobi operator singular at this point (eigenvalue {0:.3e})")]
    SingularJacobi(f64),
    #[error("input vectors are linearly dependent")]
    DependentInput,
    #[error("model construction failed: {0}")]
    ModelConstruction(String),
    #[error("bad CLI input: {0}")]
    BadInput(String),
}

pub type Result<T> = std::result::Result<T, HssntError>;
