//! Cavity mode: truncated Fock space, collision maps, the Lindblad
//! generator, time evolution and steady states.

mod evolve;
mod fock;
mod lindblad;
mod state;
mod steady;
mod superop;
mod unitary;

pub use evolve::{evolve, EvolveOptions, Trajectory, TrajectoryPoint};
pub use fock::{build_fock, FockSpace};
pub use lindblad::{lindblad_rhs, liouvillian_matrix, Generator};
pub use state::{CavityState, DEFAULT_TAIL_TOLERANCE};
pub use steady::{
    auto_fock_dim, steady_state_moments, steady_state_numeric, SteadyMethod, SteadyMoments,
    SteadyOptions, MAX_AUTO_DIM,
};
pub use superop::superoperator_second_order;
pub use unitary::{exact_map, joint_unitary, JointUnitary, MapOutput};
