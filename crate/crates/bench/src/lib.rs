//! Shared fixtures for the kernel benchmarks: the experimental operating
//! point (g/2π = 334 kHz, κ/2π = 74 kHz, resonance) and a fuel state with
//! single-photon coherence.

use photonic_engine::units::hz_to_rad;
use photonic_engine::{build_pure_family, AtomPairState, InteractionParams, PureFamilyParams};

pub fn fuel() -> AtomPairState {
    build_pure_family(PureFamilyParams::new(1.0, 1.0, 1.0, 0.0)).expect("normalisable")
}

/// Physics at the given `gτ`, pair rate and cavity linewidth (Hz).
pub fn physics(g_tau: f64, n_pair: f64, kappa_hz: f64) -> InteractionParams {
    InteractionParams::with_g_tau(hz_to_rad(334e3), g_tau, hz_to_rad(kappa_hz), 0.0, n_pair).expect("valid")
}
