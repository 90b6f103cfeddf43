//! Thermodynamics of the four-stroke cycle run by the cavity field.
//!
//! The cycle lives in the `(ω_c, n̄)` plane:
//!
//! 1. **heating** (1→2): at resonance the atom-pair beam raises the field
//!    from `n̄_th` to `n̄_ss` at fixed `ω_c`;
//! 2. **expansion** (2→3): `δ` is swept from 0 to `δ_final` while the field
//!    exchanges heat `Q₂₃ = ∫ n̄_ss |dω_c|`;
//! 3. **cooling** (3→4): the drive is removed and the field relaxes to `n̄_th`;
//! 4. **compression** (4→1): the sweep is undone, discarding
//!    `Q₄₁ = ∫ n̄_th |dω_c|`.
//!
//! Heat is positive when it enters the field; `Q₄₁` is reported as the
//! positive amount discarded, so `W_net = Q₂₃ − Q₄₁` and `η = 1 − Q₄₁/Q₂₃`.
//! Heats and works are in `ħ = 1` units (rad/s × photons).

use std::fmt;
use std::io::Write;

use crate::atoms::AtomPairState;
use crate::cavity::steady_state_moments;
use crate::error::{Error, Result};
use crate::reservoir::{reservoir_coefficients, InteractionParams, ReservoirCoefficients};
use crate::units::{HBAR, K_B};

/// Entropy of a thermal field, `S/k_B = (n+1) ln(n+1) − n ln n`.
pub fn field_entropy(n_th: f64) -> Result<f64> {
    if !n_th.is_finite() || n_th < 0.0 {
        return Err(Error::Domain(format!("thermal photon number {n_th}")));
    }
    if n_th == 0.0 {
        return Ok(0.0);
    }
    Ok((n_th + 1.0) * n_th.ln_1p() - n_th * n_th.ln())
}

/// Temperature of the field in kelvin,
/// `T = ħω_c n̄_ss / (n̄_th k_B ln(1 + 1/n̄_th))`.
///
/// With `n̄_ss = n̄_th` this is the temperature of a thermal field. At
/// `n̄_th = 0` the cold field is at zero temperature when `n̄_ss = 0`; a
/// driven field with no thermal component has a divergent temperature and is
/// reported as [`Error::DivergentTemperature`].
pub fn effective_temperature(omega_c: f64, n_ss: f64, n_th: f64) -> Result<f64> {
    if n_th.is_nan() || n_th < 0.0 || n_ss.is_nan() || n_ss < 0.0 || !omega_c.is_finite() {
        return Err(Error::Domain(format!("n_ss = {n_ss}, n_th = {n_th}, ω_c = {omega_c}")));
    }
    if n_th == 0.0 {
        return if n_ss == 0.0 { Ok(0.0) } else { Err(Error::DivergentTemperature) };
    }
    Ok(HBAR * omega_c * n_ss / (n_th * K_B * (1.0 / n_th).ln_1p()))
}

/// Closed-form efficiency
/// `η = 1 / (1 + (γ²/|α|²) n̄_th/(gN_pair)²) = 1 − n̄_th/n̄_ss`,
/// zero for an undriven field.
pub fn efficiency_closed_form(coeffs: &ReservoirCoefficients, params: &InteractionParams) -> Result<f64> {
    if coeffs.gamma <= 0.0 {
        return Err(Error::AboveThreshold { margin: coeffs.gamma });
    }
    let drive = (coeffs.alpha * (params.g * params.n_pair)).norm_sqr();
    if drive == 0.0 {
        return Ok(0.0);
    }
    Ok(drive / (drive + coeffs.gamma * coeffs.gamma * coeffs.n_th))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Heating,
    Expansion,
    Cooling,
    Compression,
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::Heating => "heating",
            Stage::Expansion => "expansion",
            Stage::Cooling => "cooling",
            Stage::Compression => "compression",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// How the photon numbers are evaluated along the iso-energetic strokes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StrokeMode {
    /// Values fixed at their resonant (`δ = 0`) stroke-entry values; this
    /// reproduces the closed-form efficiency exactly.
    #[default]
    EntryValues,
    /// Re-evaluate `n̄_ss(δ)` and `n̄_th(δ)` at every quadrature node.
    Pointwise,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CyclePoint {
    pub stage: Stage,
    pub delta: f64,
    /// `ω_c − ω_a = −δ`.
    pub omega_c_offset: f64,
    /// Absolute cavity frequency `ω_a − δ`.
    pub omega_c: f64,
    pub n_ss: f64,
    pub n_th: f64,
    /// Heat absorbed by the field along the strokes so far.
    pub q_cum: f64,
    /// Work done on the field along the strokes so far (`−q_cum`).
    pub w_cum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleResult {
    /// Heat absorbed during expansion.
    pub q23: f64,
    /// Heat discarded during compression (positive).
    pub q41: f64,
    pub w_net: f64,
    /// `1 − Q₄₁/Q₂₃`, zero when no heat is absorbed.
    pub eta: f64,
    /// Closed-form efficiency at resonance.
    pub eta_closed_form: f64,
    /// `None` when the hot field has no thermal component (divergent).
    pub t_eff_hot: Option<f64>,
    pub t_eff_cold: Option<f64>,
    /// `S/k_B` of the thermal field at the start of expansion.
    pub entropy: f64,
    /// `S/k_B` of the thermal field at the start of compression.
    pub entropy_compression: f64,
    /// Isochoric heats `ω_c Δn̄` of heating and cooling.
    pub q12: f64,
    pub q34: f64,
    /// Whether the engine absorbs heat at all (`Q₂₃ > 0`).
    pub operating: bool,
    pub mode: StrokeMode,
}

/// Runs the cycle with photon numbers held at their stroke-entry values.
pub fn run_cycle(
    state: &AtomPairState,
    params: &InteractionParams,
    delta_final: f64,
    steps: usize,
) -> Result<(CycleResult, Vec<CyclePoint>)> {
    run_cycle_with(state, params, delta_final, steps, StrokeMode::EntryValues)
}

/// Runs the cycle sweeping `δ` from 0 to `delta_final < 0` on `steps` nodes
/// per stroke, integrating with the trapezoidal rule.
pub fn run_cycle_with(
    state: &AtomPairState,
    params: &InteractionParams,
    delta_final: f64,
    steps: usize,
    mode: StrokeMode,
) -> Result<(CycleResult, Vec<CyclePoint>)> {
    if !delta_final.is_finite() || delta_final >= 0.0 {
        return Err(Error::InvalidParameter(format!("delta_final must be negative, got {delta_final}")));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("at least 2 steps are required, got {steps}")));
    }
    let levels = |delta: f64| -> Result<(f64, f64)> {
        let coeffs = reservoir_coefficients(state, &params.with_delta(delta))?;
        let m = steady_state_moments(&coeffs)?;
        Ok((m.n_ss, m.n_th))
    };
    let entry = levels(0.0)?;
    let deltas: Vec<f64> = (0..steps).map(|k| delta_final * k as f64 / (steps - 1) as f64).collect();
    let stroke: Vec<(f64, f64)> = match mode {
        StrokeMode::EntryValues => vec![entry; steps],
        StrokeMode::Pointwise => deltas.iter().map(|&d| levels(d)).collect::<Result<_>>()?,
    };
    let omega_c = |delta: f64| params.omega_a - delta;
    let point = |stage, delta: f64, (n_ss, n_th): (f64, f64), q: f64| CyclePoint {
        stage,
        delta,
        omega_c_offset: -delta,
        omega_c: omega_c(delta),
        n_ss,
        n_th,
        q_cum: q,
        w_cum: -q,
    };

    let mut points = Vec::with_capacity(2 * steps + 2);
    points.push(point(Stage::Heating, 0.0, entry, 0.0));

    let mut q23 = 0.0;
    for k in 0..steps {
        if k > 0 {
            let dw = (deltas[k] - deltas[k - 1]).abs();
            q23 += 0.5 * (stroke[k].0 + stroke[k - 1].0) * dw;
        }
        points.push(point(Stage::Expansion, deltas[k], stroke[k], q23));
    }
    let exit = stroke[steps - 1];
    points.push(point(Stage::Cooling, delta_final, exit, q23));

    // Both strokes are summed over the same nodes in the same order, so
    // equal integrands give bit-identical heats.
    let mut prefix41 = vec![0.0; steps];
    for k in 1..steps {
        let dw = (deltas[k] - deltas[k - 1]).abs();
        prefix41[k] = prefix41[k - 1] + 0.5 * (stroke[k].1 + stroke[k - 1].1) * dw;
    }
    let q41 = prefix41[steps - 1];
    for k in (0..steps).rev() {
        points.push(point(Stage::Compression, deltas[k], stroke[k], q23 - (q41 - prefix41[k])));
    }

    let w_net = q23 - q41;
    let operating = q23 > 0.0;
    let eta = if operating { 1.0 - q41 / q23 } else { 0.0 };
    let resonant = params.with_delta(0.0);
    let eta_closed_form = efficiency_closed_form(&reservoir_coefficients(state, &resonant)?, &resonant)?;

    let result = CycleResult {
        q23,
        q41,
        w_net,
        eta,
        eta_closed_form,
        t_eff_hot: effective_temperature(omega_c(0.0), entry.0, entry.1).ok(),
        t_eff_cold: effective_temperature(omega_c(delta_final), exit.1, exit.1).ok(),
        entropy: field_entropy(entry.1)?,
        entropy_compression: field_entropy(exit.1)?,
        q12: omega_c(0.0) * (entry.0 - entry.1),
        q34: -omega_c(delta_final) * (exit.0 - exit.1),
        operating,
        mode,
    };
    Ok((result, points))
}

/// Writes `stage,delta,omega_c_offset,n_ss,n_th,q_cum,w_cum` rows.
pub fn write_cycle_csv<W: Write>(points: &[CyclePoint], mut w: W) -> std::io::Result<()> {
    writeln!(w, "stage,delta,omega_c_offset,n_ss,n_th,q_cum,w_cum")?;
    // Adding +0.0 folds negative zero into zero.
    let z = |x: f64| x + 0.0;
    for p in points {
        writeln!(
            w,
            "{},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
            p.stage,
            z(p.delta),
            z(p.omega_c_offset),
            z(p.n_ss),
            z(p.n_th),
            z(p.q_cum),
            z(p.w_cum)
        )?;
    }
    Ok(())
}
