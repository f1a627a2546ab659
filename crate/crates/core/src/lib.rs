//! Lieb-Robinson-type bounds, signaling and scrambling time lower bounds,
//! and exact small-system dynamics for strongly long-range (power-law,
//! `alpha <= D`) interacting lattices.
//!
//! The modules build on each other bottom-up:
//!
//! * [`lattice`]: geometry, distances and power-law couplings;
//! * [`kernels`]: self-hop strength, ring spectrum and dense series oracle;
//! * [`bounds`]: commutator-norm bounds;
//! * [`signaling`]: threshold-crossing times derived from the bounds;
//! * [`dynamics`]: exact single-particle and Ising simulators;
//! * [`analysis`]: log-linear scaling fits.

pub mod analysis;
pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod kernels;
pub mod lattice;
pub mod signaling;

pub use analysis::{FitModel, FitResult, LogBase};
pub use bounds::{
    BoundMethod, BoundPrefactor, BoundValue, ExactSumBound, HopSchedule, HopSegment, ManySiteBound,
};
pub use dynamics::{AmplitudeState, HamiltonianSegment, ProtocolReport, SingleParticleHamiltonian};
pub use error::{Error, Result};
pub use kernels::{FourierSpectrum, HopParameters, ReproducibilityReport, SeriesOracle};
pub use lattice::{Boundary, CouplingModel, LatticeSpec};
pub use signaling::{SignalingMethod, SignalingSpec, SignalingTime};
