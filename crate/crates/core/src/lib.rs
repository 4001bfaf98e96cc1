//! Inaccurate Gaussian pointers watching a two-path system.
//!
//! A two-state system — stochastic or quantum — runs through four time slices
//! while up to five pointers record which states it visits. Accurate pointers
//! read exact occupancies and destroy interference; inaccurate (wide) pointers
//! leave the dynamics intact but smear every reading, and in the broad limit
//! the whole reading distribution is a single Gaussian displaced by a relative
//! route probability (classical) or by the real part of a relative route
//! amplitude (quantum), which can lie far outside `[0, 1]`.
//!
//! The crate provides:
//!
//! - [`classical`]: the stochastic network, its exact reading mixtures under
//!   pre-/post-selection, mean shifts, and route-probability recovery;
//! - [`quantum`]: the monitored qubit, coherent reading densities, weak
//!   values, moments, and the accurate-control-pointer experiment;
//! - [`asymptotics`]: single-Gaussian limits of two-Gaussian superpositions,
//!   error and moment laws, the extrema/pitchfork scan, and the which-way
//!   attribution bound;
//! - [`montecarlo`]: seeded, reproducible trial sampling with empirical
//!   validation against the analytic densities;
//! - [`config`]/[`export`]: JSON model ingestion and CSV/JSON emission.
//!
//! All computational types are immutable plain data; every function is pure,
//! so values can be shared freely across threads.

pub mod asymptotics;
pub mod classical;
pub mod config;
pub mod density;
pub mod error;
pub mod export;
pub mod montecarlo;
pub mod pointer;
pub mod quad;
pub mod quantum;

pub use classical::{
    ClassicalPath, GaussianMixtureDensity, RecoveredPathProbs, TransitionModel,
};
pub use density::{Marginal1D, ReadingDensity};
pub use error::{Error, Result};
pub use pointer::{PointerConfig, PointerSet, PointerWidth, Slot};
pub use quantum::{AmplitudeModel, CoherentGaussianDensity, PathAmplitudes, WeakValue};
