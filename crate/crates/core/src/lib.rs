//! Conditional preparation of Fock states, Fock-state superpositions and
//! two-mode entangled states by cross-Kerr coupling of a signal mode to a
//! ring cavity monitored by an ON-OFF photodetector.
//!
//! - [`fock`]: truncated Fock-space states and metrics.
//! - [`cavity`]: the ring-cavity transfer functions and photon-number comb.
//! - [`filter`]: the conditional-state engine.
//! - [`oracle`]: independent brute-force checks of the engine.
//! - [`tomography`]: photon-number distribution by cavity scans.
//! - [`cli`]: configuration, presets and file output for the command-line tool.

pub mod cavity;
pub mod cli;
pub mod error;
pub mod filter;
pub mod fock;
pub mod oracle;
pub mod tomography;

pub use cavity::{comb, kappa, phase_shift, sigma, CavityParams, CombParams, KerrMedia};
pub use error::{Error, Result};
pub use filter::{
    conditional_output, conditional_output_with, design_superposition, entangled_target,
    success_probability, two_mode_conditional_output, ConditionalResult, FilterInput, FilterMode,
    FilterWarning, SuperpositionSpec,
};
pub use fock::{
    coherent_fock_vector, coherent_overlap, fidelity_with_pure, partial_trace,
    photon_number_distribution, purity, suggested_truncation, ComplexAmplitude, DensityMatrix,
    FockVector,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
