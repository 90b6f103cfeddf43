use std::io::Write;

use log::{debug, warn};
use nalgebra::DMatrix;

use super::lindblad::Generator;
use super::state::{tail_mass_of, CavityState, DEFAULT_TAIL_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, max_abs, min_eigenvalue, trace};
use crate::reservoir::ReservoirCoefficients;
use crate::C64;

/// Largest tolerated drift of `Tr ρ` during integration.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Options for [`evolve`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    /// Absolute local error allowed per step on any matrix element.
    pub tol: f64,
    /// Abort when the top Fock levels hold more than this population;
    /// `None` disables the check.
    pub tail_tolerance: Option<f64>,
    /// Include the frequency-pulling Hamiltonian term.
    pub include_heff: bool,
    /// Hard cap on the number of accepted plus rejected steps.
    pub max_steps: usize,
    /// Record a trajectory point at most this often (in seconds); every
    /// accepted step is recorded when `None`.
    pub sample_interval: Option<f64>,
    /// Compute the smallest eigenvalue of each recorded state.
    pub track_min_eigenvalue: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            tail_tolerance: Some(DEFAULT_TAIL_TOLERANCE),
            include_heff: false,
            max_steps: 2_000_000,
            sample_interval: None,
            track_min_eigenvalue: true,
        }
    }
}

/// Diagnostics recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub n_mean: f64,
    pub a_mean: C64,
    pub trace_err: f64,
    /// Smallest eigenvalue (NaN when not tracked).
    pub min_eig: f64,
    pub tail_mass: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub final_state: CavityState,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    /// Writes `t,n_mean,re_a,im_a,trace_err,min_eig,tail_mass` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,n_mean,re_a,im_a,trace_err,min_eig,tail_mass")?;
        for p in &self.points {
            writeln!(
                w,
                "{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                p.t, p.n_mean, p.a_mean.re, p.a_mean.im, p.trace_err, p.min_eig, p.tail_mass
            )?;
        }
        Ok(())
    }

    /// Smallest eigenvalue seen along the trajectory.
    pub fn min_eigenvalue(&self) -> f64 {
        self.points.iter().map(|p| p.min_eig).fold(f64::INFINITY, f64::min)
    }
}

// Dormand–Prince 5(4) tableau. The generator is time independent, so the
// stage times are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrates the master equation from `state` for a time `t_final` with an
/// adaptive Dormand–Prince 5(4) scheme.
///
/// The state is re-Hermitised after every step. Integration aborts with
/// [`Error::TraceDrift`] when the trace moves by more than 10⁻⁶ and with
/// [`Error::TruncationTooSmall`] when the tail population exceeds the
/// configured tolerance. Above threshold the horizon is capped at ten loss
/// times and a warning is logged.
pub fn evolve(
    state: &CavityState,
    coeffs: &ReservoirCoefficients,
    t_final: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_final = {t_final}")));
    }
    let mut t_end = t_final;
    if !coeffs.is_below_threshold() {
        let cap = 10.0 / coeffs.loss_rate().max(f64::MIN_POSITIVE);
        warn!("evolving above threshold (γ = {:.3e}); horizon capped at {cap:.3e} s", coeffs.gamma);
        t_end = t_end.min(cap);
    }
    let d = state.dim();
    let gen = Generator::new(coeffs, d, opts.include_heff);
    let tr0 = trace(state.matrix()).re;

    let mut y = state.matrix().clone();
    let mut t = 0.0;
    let mut points = vec![point(0.0, &y, tr0, opts)];
    let mut last_sample = 0.0;
    check_tail(&y, 0.0, opts)?;

    let scale = coeffs.rate_scale().max(f64::MIN_POSITIVE) * d as f64;
    let mut h = (0.01 / scale).min(t_end.max(f64::MIN_POSITIVE));
    let mut k1 = gen.apply(&y);
    let (mut accepted, mut rejected) = (0usize, 0usize);

    while t < t_end {
        if accepted + rejected >= opts.max_steps {
            return Err(Error::NoConvergence {
                residual: max_abs(&k1),
                steps: accepted + rejected,
                gap_estimate: f64::NAN,
            });
        }
        h = h.min(t_end - t);
        if h <= 1e-14 * t_end.max(f64::MIN_POSITIVE) && t + h < t_end {
            return Err(Error::StepSizeUnderflow(t));
        }
        let mut k: Vec<DMatrix<C64>> = Vec::with_capacity(7);
        k.push(k1.clone());
        for row in A.iter().take(7).skip(1) {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if row[j] != 0.0 {
                    ys += kj * C64::new(h * row[j], 0.0);
                }
            }
            k.push(gen.apply(&ys));
        }
        // Stage 7 is evaluated at the fifth-order solution (FSAL).
        let mut y5 = y.clone();
        for (j, kj) in k.iter().take(6).enumerate() {
            if A[6][j] != 0.0 {
                y5 += kj * C64::new(h * A[6][j], 0.0);
            }
        }
        let mut err = DMatrix::<C64>::zeros(d, d);
        for (j, kj) in k.iter().enumerate() {
            if E[j] != 0.0 {
                err += kj * C64::new(h * E[j], 0.0);
            }
        }
        let ratio = max_abs(&err) / opts.tol;
        if ratio <= 1.0 {
            t += h;
            y = hermitian_part(&y5);
            k1 = gen.apply(&y);
            accepted += 1;
            let tr = trace(&y).re;
            if (tr - tr0).abs() > TRACE_DRIFT_LIMIT {
                return Err(Error::TraceDrift { time: t, drift: tr - tr0 });
            }
            check_tail(&y, t, opts)?;
            let due = opts.sample_interval.is_none_or(|dt| t - last_sample >= dt);
            if due || t >= t_end {
                points.push(point(t, &y, tr0, opts));
                last_sample = t;
            }
        } else {
            rejected += 1;
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    debug!("evolve: {accepted} accepted, {rejected} rejected steps to t = {t:.3e}");
    Ok(Trajectory {
        points,
        final_state: CavityState::from_matrix(y)?,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}

fn point(t: f64, y: &DMatrix<C64>, tr0: f64, opts: &EvolveOptions) -> TrajectoryPoint {
    let d = y.nrows();
    let n_mean = (0..d).map(|k| k as f64 * y[(k, k)].re).sum();
    let a_mean = (0..d - 1).map(|k| y[(k + 1, k)] * ((k + 1) as f64).sqrt()).sum();
    TrajectoryPoint {
        t,
        n_mean,
        a_mean,
        trace_err: (trace(y).re - tr0).abs(),
        min_eig: if opts.track_min_eigenvalue { min_eigenvalue(y) } else { f64::NAN },
        tail_mass: tail_mass_of(y),
    }
}

fn check_tail(y: &DMatrix<C64>, _t: f64, opts: &EvolveOptions) -> Result<()> {
    if let Some(tol) = opts.tail_tolerance {
        let tail = tail_mass_of(y);
        if tail > tol {
            return Err(Error::TruncationTooSmall { dim: y.nrows(), tail_mass: tail, tolerance: tol });
        }
    }
    Ok(())
}
