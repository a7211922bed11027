//! Simulation of a three-level Λ quantum heat engine whose control field is
//! phase-modulated by a vibrating nanomirror.
//!
//! The crate is split along the numerical pipeline:
//!
//! * [`params`] holds the engine configuration, reservoir occupations,
//!   dephasing rates and the mirror-modulated control field.
//! * [`dynamics`] integrates the Bloch equations in the time domain and finds
//!   stroboscopic (one mirror period) steady states.
//! * [`floquet`] holds the truncated-Fourier closed forms for populations,
//!   probe coherence and gain, plus a harmonic-balance solver of arbitrary
//!   order.
//! * [`thermo`] evaluates energy fluxes, first-law residuals and efficiency.
//! * [`sweep`] drives parameter sweeps, figure presets, CSV/SVG output and
//!   cross-solver reports. The `lambda-engine` binary wraps it.
//!
//! Rates and frequencies share one unit (MHz treated as an angular rate) and
//! time is in µs. ħ is 1 unless stated otherwise.

pub mod dynamics;
pub mod error;
pub mod floquet;
pub mod params;
pub mod state;
pub mod sweep;
pub mod thermo;

pub use error::{Error, Result};
pub use floquet::{Branch, FloquetComponents, GainResult, PopulationTriple};
pub use params::{EngineParams, ModulationMode, ReservoirSpec};
pub use state::{DensityState, Level};
pub use thermo::ThermoFluxes;

pub use num_complex::Complex64;
