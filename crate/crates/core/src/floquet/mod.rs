//! Frequency-domain layer: the truncated-Fourier closed forms for the
//! steady-state populations, probe coherence and gain, and a harmonic-balance
//! solver of arbitrary truncation order for the same periodic steady state.

mod closed_form;
mod components;
mod harmonic_balance;

pub use closed_form::{
    coherence_closed_form, coherence_closed_form_with, gain, gain_branch, gain_with,
    populations_closed_form, x_factor, Branch, GainResult, NumeratorReading, PopulationTriple,
};
pub use components::FloquetComponents;
pub use harmonic_balance::{
    generator, harmonic_balance_residual, harmonic_balance_solve, linear_response_gain,
    modulation_split, static_steady_state, GeneratorMatrix,
};
