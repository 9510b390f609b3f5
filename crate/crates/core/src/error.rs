use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

/// Every failure the numerical core can report.
///
/// Variants that correspond to a numerical guard carry the offending value
/// and are named by [`Error::guard`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("pole of the dielectric function at ζ = {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("query {re} + {im}i is outside the tabulated range [{lo}, {hi}] or off the real axis")]
    OutOfRange { re: f64, im: f64, lo: f64, hi: f64 },
    #[error("ζ = {re} + {im}i lies {distance:e} from a branch point of the index")]
    BranchPoint { re: f64, im: f64, distance: f64 },
    #[error("transmission denominator vanishes at ζ = {re} + {im}i (|D| = {magnitude:e})")]
    DenominatorZero { re: f64, im: f64, magnitude: f64 },
    #[error("spectral tail dominates: unmodelled tail {remainder:e} vs integral {total:e}")]
    TailDominance { remainder: f64, total: f64 },
    #[error("principal-value scheme cannot symmetrize at ζ = {re} + {im}i")]
    Singular { re: f64, im: f64 },
    #[error("unsupported model: {0}")]
    Unsupported(&'static str),
    #[error("under-resolved: {quantity} = {value:e} but must not exceed {limit:e}")]
    Resolution { quantity: &'static str, value: f64, limit: f64 },
    #[error("wraparound: {fraction:e} of the output energy sits in the last 1% of the window")]
    Wraparound { fraction: f64 },
    #[error("aliasing: carrier {carrier} exceeds 0.25·π/Δt = {limit}")]
    Aliasing { carrier: f64, limit: f64 },
    #[error("ω = {omega} is not strictly inside the grid")]
    Boundary { omega: f64 },
    #[error("phase step {step} rad exceeds π/2 between ω = {omega} and its neighbour")]
    PhaseStep { omega: f64, step: f64 },
    #[error("imaginary residue {ratio:e} of the kernel exceeds 1e-9 of its peak")]
    ImaginaryResidue { ratio: f64 },
    #[error("{count} cells still straddle a branch cut after maximal refinement")]
    Inconclusive { count: usize },
}

impl Error {
    /// Name of the numerical guard that fired, or `None` for input errors.
    pub fn guard(&self) -> Option<&'static str> {
        Some(match self {
            Error::Invalid(_) | Error::OutOfRange { .. } | Error::Unsupported(_) => return None,
            Error::Pole { .. } => "pole",
            Error::BranchPoint { .. } => "branch_point",
            Error::DenominatorZero { .. } => "denominator_zero",
            Error::TailDominance { .. } => "tail_dominance",
            Error::Singular { .. } => "pv_singular",
            Error::Resolution { .. } => "resolution",
            Error::Wraparound { .. } => "wraparound",
            Error::Aliasing { .. } => "aliasing",
            Error::Boundary { .. } => "boundary",
            Error::PhaseStep { .. } => "phase_unwrap",
            Error::ImaginaryResidue { .. } => "imaginary_residue",
            Error::Inconclusive { .. } => "straddle",
        })
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
