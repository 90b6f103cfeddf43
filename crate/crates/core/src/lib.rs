//! Simulation of a single-mode photonic heat engine fuelled by a beam of
//! correlated two-atom pairs.
//!
//! The crate is organised bottom-up:
//!
//! * [`atoms`]: two-qubit density matrices, the `(a, b, c, φ)` pure-state
//!   family and Wootters concurrence.
//! * [`reservoir`]: the coefficients of the cavity master equation produced
//!   by the atom-pair beam plus the vacuum bath.
//! * [`cavity`]: truncated Fock space, the exact collision map, its
//!   second-order expansion, the Lindblad generator, time integration and
//!   steady-state solvers.
//! * [`engine`]: entropy, effective temperatures, stroke heats, work and
//!   efficiency of the four-stroke cycle.
//! * [`sweep`]: configuration, presets and deterministic CSV output for
//!   parameter scans.
//!
//! All physics is written in `ħ = 1` rate units (rad/s); [`units`] holds the
//! constants used when converting to kelvin at reporting boundaries.

pub mod atoms;
pub mod cavity;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod reservoir;
pub mod sweep;
pub mod units;

pub use atoms::{build_pure_family, concurrence, spin_flip, AtomPairState, PureFamilyParams};
pub use cavity::{
    auto_fock_dim, build_fock, evolve, exact_map, lindblad_rhs, steady_state_moments,
    steady_state_numeric, superoperator_second_order, joint_unitary, CavityState, EvolveOptions, FockSpace,
    JointUnitary, SteadyMethod, SteadyMoments, SteadyOptions, Trajectory,
};
pub use engine::{
    effective_temperature, efficiency_closed_form, field_entropy, run_cycle, run_cycle_with,
    CyclePoint, CycleResult, Stage, StrokeMode,
};
pub use error::{Error, Result};
pub use reservoir::{
    detuning_envelope, operating_regime, reservoir_coefficients, reservoir_temperature,
    DetuningEnvelope, InteractionParams, OperatingRegime, ReservoirCoefficients,
};
pub use sweep::{run_convergence_study, run_cycle_preset, run_sweep, SweepConfig};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
