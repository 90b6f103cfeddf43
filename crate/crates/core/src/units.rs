//! Physical constants (CODATA 2018 exact values) and unit conversions.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Speed of light, m/s.
pub const C_LIGHT: f64 = 299_792_458.0;

/// Wavelength of the atomic transition used by the default presets, m.
pub const DEFAULT_WAVELENGTH: f64 = 791e-9;

/// Linear frequency (Hz) to angular frequency (rad/s).
pub fn hz_to_rad(f: f64) -> f64 {
    2.0 * PI * f
}

/// Angular frequency of light with the given vacuum wavelength.
pub fn wavelength_to_rad(lambda: f64) -> f64 {
    2.0 * PI * C_LIGHT / lambda
}

/// `ħω / k_B` in kelvin for an angular frequency in rad/s.
pub fn quantum_temperature(omega: f64) -> f64 {
    HBAR * omega / K_B
}
