//! Error type shared across the crate.

use crate::pointer::Slot;
use thiserror::Error;

/// Probability mass below this threshold makes conditioning ill defined.
pub const MIN_SELECTION_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum Error {
    /// A transition or amplitude model failed validation.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A pointer configuration failed validation (bad width, duplicate slot, ...).
    #[error("invalid pointer configuration: {0}")]
    InvalidPointer(String),

    /// The requested slot is not an active variable of the density.
    #[error("slot {0} is not active in this density")]
    UnknownSlot(Slot),

    /// Conditioning on an event of (near-)zero probability.
    #[error("selection probability {0:.3e} is below {MIN_SELECTION_PROBABILITY:.0e}; cannot normalize")]
    ZeroNormSelection(f64),

    /// The amplitude sum vanishes, so no weak value exists.
    #[error("amplitude sum is zero; weak value undefined")]
    ZeroAmplitudeSum,

    /// Coefficient sum vanishes, so the single-Gaussian limit is undefined.
    #[error("coefficient sum is zero; limit shift undefined")]
    ZeroCoefficientSum,

    /// The superposition vanishes at the requested point.
    #[error("superposition vanishes at f = {0}; relative error has a pole there")]
    VanishingSuperposition(f64),

    /// No extremum-count transition inside the scanned width range.
    #[error("no extremum-count transition found for ratio {ratio} in ({lo}, {hi})")]
    NoTransition { ratio: f64, lo: f64, hi: f64 },

    /// A rejection-sampling proposal exceeded its envelope; indicates a bug.
    #[error("rejection envelope violated: target {target:.6e} > envelope {envelope:.6e}")]
    EnvelopeViolation { target: f64, envelope: f64 },

    /// The density retains interference and cannot be read as a classical mixture.
    #[error("density has coherent cross terms; no incoherent mixture form exists")]
    CoherentCrossTerms,

    /// Statistics were requested for an empty trial list.
    #[error("empty trial list")]
    EmptySample,

    /// Invalid argument outside the above categories.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
