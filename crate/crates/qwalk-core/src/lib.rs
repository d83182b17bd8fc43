//! Simulator and claim-audit toolkit for 4-state coined quantum walks on the
//! integer line.
//!
//! The walk carries a 4-valued chirality: components 0,1 step left and 2,3
//! step right, mixed each step by a 4×4 coin built from an embedded 2×2
//! unitary. Two independent engines evolve it — exact sparse position-space
//! recursion ([`walk`]) and Fourier-ring propagation ([`spectral`]) — and the
//! [`limits`]/[`claims`] layers evaluate closed-form stationary and weak-limit
//! statements against that ground truth, recording a verdict for each.
//!
//! The `qwalk` binary exposes the `simulate`, `spectrum`, `limits`, and
//! `claims` subcommands over the same machinery; see [`commands`].

pub mod claims;
pub mod coin;
pub mod commands;
pub mod config;
pub mod limits;
pub mod linalg;
pub mod spectral;
pub mod walk;

pub use claims::{audit_claims, AuditConfig, ClaimReport, ClaimValue, Verdict};
pub use coin::{grover_diffusion, Chirality, CoinError, CoinMatrix, CoinSpec};
pub use config::{CoinChoice, ComplexDef, ConfigError, RunConfig};
pub use limits::{
    delta_closed_forms, delta_mass_quadrature, empirical_rescaled_moments, konno_density,
    limit_moments_spectral, oracle_stationary, theorem1_predict, LimitsError, Theorem1Prediction,
};
pub use linalg::{Mat4, Vec4, C64};
pub use spectral::{
    build_momentum_operator, eigensystem, fourier_propagate, group_velocity, spectral_sample,
    SpectralError, SpectralSample,
};
pub use walk::{
    origin_probability_sequence, Distribution, InitialState, ProbabilitySequence, WalkError,
    WalkState,
};
