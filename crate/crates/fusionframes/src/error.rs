use core::fmt;

/// Everything that can go wrong across the crate.
///
/// Variants carry just enough payload to point at the offending input;
/// callers that need full diagnostics re-run the relevant check themselves.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A shape disagreed with what the operation needs.
    DimensionMismatch { expected: usize, got: usize },
    /// A matrix entry was NaN or infinite.
    NonFinite,
    /// A tolerance was zero, negative or non-finite.
    BadTolerance,
    /// Basis columns are linearly dependent at the rank tolerance.
    RankDeficient,
    /// The orthogonal complement of the full space is empty.
    FullSpace,
    /// A symmetric operation received a visibly asymmetric matrix.
    NotSymmetric,
    /// Elimination hit a pivot below the rank tolerance.
    Singular,
    /// Range and nullspace do not span the whole space together.
    NotComplementary,
    /// A matrix claimed to be a projection is not idempotent.
    NotIdempotent { residual: f64 },
    /// A tilt vector has mass on a kept axis.
    SupportViolation { index: usize },
    /// Tilt vectors are not pairwise orthogonal.
    NotOrthogonal { i: usize, j: usize },
    /// The input family does not span the whole space.
    NotSpanning,
    /// A vector in the input family is (numerically) zero.
    ZeroVector { index: usize },
    /// No reordering of the chosen basis has nonzero diagonal entries.
    /// Cannot happen for a spanning family; guarded defensively.
    NoValidPermutation,
    /// Exhaustive search refused: the ambient dimension exceeds the cap.
    SearchTooLarge { dim: usize, max: usize },
    /// A prescribed diagonal entry is below 1.
    BadEntry { index: usize },
    /// More prescribed entries exceed 1 than the geometry allows.
    InfeasibleEntries { allowed: usize },
    /// A paired tight construction needs dim(W) >= N/2.
    DimensionTooSmall,
    /// Chain shape parameters are inconsistent (zero counts, bad remainder,
    /// or dimensions that do not factor).
    BadFactorization,
    /// The family's operator has an eigenvalue at or below the frame
    /// tolerance; it cannot be inverted.
    NotAFrame,
    /// The given vectors are not a frame of the subspace (not inside it,
    /// or their Gram operator is singular on it).
    NotAFrameOfSubspace,
    /// A perturbation vector is not orthogonal to the subspace.
    PerturbationNotOrthogonal { index: usize },
    /// The perturbed vectors' orthogonal complement meets the subspace.
    DegenerateDirection,
    /// A fusion frame weight must be strictly positive and finite.
    NonPositiveWeight,
    /// A fusion frame needs at least one member.
    EmptyFamily,
    /// An index list had repeats or entries out of range.
    BadIndexSet,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NonFinite => write!(f, "matrix entries must be finite"),
            Error::BadTolerance => write!(f, "tolerances must be finite and strictly positive"),
            Error::RankDeficient => write!(f, "basis columns are linearly dependent"),
            Error::FullSpace => write!(f, "the full space has no orthogonal complement"),
            Error::NotSymmetric => write!(f, "matrix is not symmetric"),
            Error::Singular => write!(f, "matrix is singular at the rank tolerance"),
            Error::NotComplementary => {
                write!(f, "range and nullspace do not decompose the space")
            }
            Error::NotIdempotent { residual } => {
                write!(f, "matrix is not idempotent (residual {residual:e})")
            }
            Error::SupportViolation { index } => {
                write!(f, "tilt {index} has mass on a kept axis")
            }
            Error::NotOrthogonal { i, j } => {
                write!(f, "tilts {i} and {j} are not orthogonal")
            }
            Error::NotSpanning => write!(f, "vectors do not span the space"),
            Error::ZeroVector { index } => write!(f, "vector {index} is zero"),
            Error::NoValidPermutation => {
                write!(f, "no reordering gives nonzero diagonal pivots")
            }
            Error::SearchTooLarge { dim, max } => {
                write!(f, "exhaustive search refused: dimension {dim} exceeds cap {max}")
            }
            Error::BadEntry { index } => {
                write!(f, "prescribed diagonal entry {index} is below 1")
            }
            Error::InfeasibleEntries { allowed } => {
                write!(f, "at most {allowed} prescribed entries may exceed 1")
            }
            Error::DimensionTooSmall => {
                write!(f, "paired construction needs a subspace of at least half the dimension")
            }
            Error::BadFactorization => write!(f, "chain shape parameters are inconsistent"),
            Error::NotAFrame => write!(f, "family is not a frame (lower bound not positive)"),
            Error::NotAFrameOfSubspace => {
                write!(f, "vectors are not a frame of the subspace")
            }
            Error::PerturbationNotOrthogonal { index } => {
                write!(f, "perturbation {index} is not orthogonal to the subspace")
            }
            Error::DegenerateDirection => {
                write!(f, "perturbed vectors leave no valid projection direction")
            }
            Error::NonPositiveWeight => write!(f, "weights must be strictly positive"),
            Error::EmptyFamily => write!(f, "a fusion frame needs at least one member"),
            Error::BadIndexSet => write!(f, "index set has repeats or out-of-range entries"),
        }
    }
}

impl core::error::Error for Error {}
