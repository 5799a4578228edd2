use thiserror::Error;

/// Errors shared across the crate.
///
/// Numerical routines that can recover (e.g. a rank-deficient least-squares
/// system solved by pseudo-inverse) report the condition in their output
/// instead of failing; only unrecoverable precondition violations surface
/// here.
#[derive(Debug, Error)]
pub enum CoreError {
    /// An element required to be unitary failed ‖u*u − 1‖ < tol.
    #[error("element is not unitary: ||u*u - 1|| = {residual:.3e}")]
    NonUnitary { residual: f64 },

    /// A coefficient window was too small: nonzero data detected on its
    /// boundary, so the truncation is not faithful.
    #[error("window too small: nonzero coefficient {magnitude:.3e} at boundary index {index:?}")]
    WindowTooSmall { index: Vec<i64>, magnitude: f64 },

    /// The closed-form component formula only applies to single-Kraus maps.
    #[error("closed form requires a single Kraus operator, got {count}")]
    MultiKraus { count: usize },

    /// Symmetrization residual of a matrix expected Hermitian exceeded the
    /// hard tolerance.
    #[error("matrix is not Hermitian: symmetrization residual {residual:.3e} > {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    /// A ψ-value table does not cover the indices a reconstruction needs.
    #[error("insufficient data: value table is missing index {index:?}")]
    InsufficientData { index: Vec<i64> },

    /// A translated sample point left the support of the measure.
    #[error("measure is not quasi-invariant on the sample: shift of point {point} leaves support")]
    NonQuasiInvariant { point: usize },

    /// A cocycle matrix failed the unitarity check.
    #[error("cocycle b{generator} at point {point} is not unitary: residual {residual:.3e}")]
    NonUnitaryCocycle {
        generator: usize,
        point: usize,
        residual: f64,
    },

    /// Cocycle-equivalence comparison requires equal multiplicity and
    /// identical measures.
    #[error("representation specs have mismatched multiplicity or measure: {reason}")]
    MeasureMismatch { reason: String },

    /// Malformed input data (spec files, parameter ranges).
    #[error("invalid spec: {reason}")]
    InvalidSpec { reason: String },
}
