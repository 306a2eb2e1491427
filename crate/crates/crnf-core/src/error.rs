use alloc::string::String;
use core::fmt;

/// Violated clause of the nondegeneracy requirement on a Hermitian family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyViolation {
    Shape,
    NotHermitian { index: usize },
    CommonKernel { dim: usize },
    LinearlyDependent { rank: usize },
}

/// Why a degree-k linear system failed to split into an image and a normal-form complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitFailure {
    /// The conditions cut out less than a complement of the image: some right-hand side is unreachable.
    Inconsistent { degree: u32, class: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    DimensionMismatch(&'static str),
    NotRealValued(&'static str),
    WeightTooLow { what: &'static str, min: u32, found: u32 },
    Precondition(&'static str),
    Family(FamilyViolation),
    Split(SplitFailure),
    Unsupported(String),
}

impl fmt::Display for FamilyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyViolation::Shape => write!(f, "matrices are not square of the declared size"),
            FamilyViolation::NotHermitian { index } => write!(f, "J_{} is not Hermitian", index + 1),
            FamilyViolation::CommonKernel { dim } => {
                write!(f, "nondegeneracy: the J_k share a kernel of dimension {dim}")
            }
            FamilyViolation::LinearlyDependent { rank } => {
                write!(f, "full rank: the J_k are linearly dependent over the reals (rank {rank})")
            }
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch(w) => write!(f, "dimension mismatch: {w}"),
            Error::NotRealValued(w) => write!(f, "{w} is not real-valued"),
            Error::WeightTooLow { what, min, found } => {
                write!(f, "{what} has a term of quasidegree {found}, expected at least {min}")
            }
            Error::Precondition(w) => write!(f, "precondition violated: {w}"),
            Error::Family(v) => write!(f, "invalid Hermitian family: {v}"),
            Error::Split(SplitFailure::Inconsistent { degree, class }) => write!(
                f,
                "normal-form conditions are not a complement of the image at degree {degree} (class {class}): inconsistent system"
            ),
            Error::Unsupported(w) => write!(f, "unsupported: {w}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
