//! Reduction of a coupled two-field eigenproblem to an eigenvalue-dependent
//! effective potential on the open channel, enumeration of the redundant
//! multivalued root set, realisation probabilities and regime statistics, a
//! seeded jump-process simulator over realisation centres, and the causal
//! kinematics chain.
//!
//! Every reduction result is checkable against the dense diagonalization of
//! the full coupled problem ([`spectral::solve_full`]); the multiset of
//! reduced roots shifted by the open-channel energy must reproduce the full
//! spectrum exactly.

pub mod beat;
pub mod config;
pub mod ep;
pub mod io;
pub mod kinematics;
pub mod model;
pub mod realisation;
pub mod spectral;
pub mod state;
pub mod synth;

#[cfg(test)]
pub(crate) mod test_fixtures;

pub use beat::{simulate, BeatConfig, BeatError, BeatTrajectory, ChiSquareReport, DriftStats};
pub use config::{build_system, BackgroundConfig, CouplingConfig, GridConfig, SystemConfig};
pub use ep::{
    build_ep, eigen_branches, find_all_roots, reconciled_roots, EffectivePotential, EpError,
    EvalCachePolicy, PoleGroup, RootKind, RootRecord, SolverParams,
};
pub use kinematics::{
    de_broglie_wavelength, derive, energy_partition, Constants, KinematicState, KinematicsError,
};
pub use model::{ChannelSet, CoupledSystem, Diagnostics, GridSpec, ModelError, Violation};
pub use realisation::{
    born_probabilities, classify_regime, complexity, expectation_density, group_realisations,
    BornReference, GroupingPolicy, ProjectionCoefficients, RealisationError, RealisationSet,
    Regime, RegimeThresholds,
};
pub use spectral::{
    assemble_closed_block, assemble_full_matrix, solve_full, solve_truncated, FullSpectrum,
    SpectralError, TruncatedMode, TruncatedSpectrum,
};
pub use state::{assemble_state, AssembledState};
pub use synth::{random_system, RandomInstance, SizeBounds};
