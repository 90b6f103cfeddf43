use log::{debug, warn};
use nalgebra::{DMatrix, DVector};

use super::evolve::{evolve, EvolveOptions};
use super::lindblad::{liouvillian_matrix, Generator};
use super::state::{CavityState, DEFAULT_TAIL_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, max_abs};
use crate::reservoir::ReservoirCoefficients;
use crate::C64;

/// Largest Fock dimension [`auto_fock_dim`] will propose.
pub const MAX_AUTO_DIM: usize = 200;

/// Largest dimension for which [`SteadyMethod::Auto`] picks the dense
/// null-space solve (`d² × d²` LU).
pub const NULL_SPACE_MAX_DIM: usize = 32;

/// Closed-form steady-state moments of the linear master equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyMoments {
    /// `⟨a†a⟩ = n̄_th + |Ω|²/γ²`.
    pub n_ss: f64,
    /// Incoherent part `p₁/γ`.
    pub n_th: f64,
    /// `⟨a⟩ = −iΩ/γ`.
    pub a_ss: C64,
    /// `⟨a²⟩ = ⟨a⟩² − μ*/γ`.
    pub a2_ss: C64,
    pub gamma: f64,
}

/// Steady-state moments, exact for the untruncated generator without the
/// frequency-pulling term. Fails above threshold.
pub fn steady_state_moments(coeffs: &ReservoirCoefficients) -> Result<SteadyMoments> {
    let gamma = coeffs.gamma;
    if gamma <= 0.0 {
        return Err(Error::AboveThreshold { margin: gamma });
    }
    let n_th = coeffs.p1 / gamma;
    let a_ss = C64::new(0.0, -1.0) * coeffs.drive_strength / gamma;
    Ok(SteadyMoments {
        n_ss: n_th + a_ss.norm_sqr(),
        n_th,
        a_ss,
        a2_ss: a_ss * a_ss - coeffs.mu.conj() / gamma,
        gamma,
    })
}

/// Fock dimension large enough for the steady state:
/// `⌈n + 8√n + 12⌉`, failing when it exceeds [`MAX_AUTO_DIM`].
pub fn auto_fock_dim(moments: &SteadyMoments) -> Result<usize> {
    let n = moments.n_ss.max(0.0);
    let d = (n + 8.0 * n.sqrt() + 12.0).ceil();
    if !d.is_finite() || d > MAX_AUTO_DIM as f64 {
        return Err(Error::DimensionBudget { required: d.min(usize::MAX as f64) as usize, budget: MAX_AUTO_DIM });
    }
    Ok(d as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyMethod {
    /// Null-space solve for `d ≤ 32`, long-time integration otherwise.
    Auto,
    /// Solve `L vec(ρ) = 0` with one equation replaced by `Tr ρ = 1`.
    NullSpace,
    /// Integrate until the generator residual falls below tolerance.
    LongTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyOptions {
    /// Required `max|L ρ| / rate_scale`.
    pub tol: f64,
    pub method: SteadyMethod,
    pub include_heff: bool,
    /// Reject results whose tail population exceeds this; `None` accepts any.
    pub tail_tolerance: Option<f64>,
    /// Integration budget for [`SteadyMethod::LongTime`], in units of `1/γ`.
    pub max_time_constants: usize,
}

impl Default for SteadyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            method: SteadyMethod::Auto,
            include_heff: false,
            tail_tolerance: Some(DEFAULT_TAIL_TOLERANCE),
            max_time_constants: 400,
        }
    }
}

/// Numerical steady state of the master equation on `dim` Fock levels.
pub fn steady_state_numeric(
    coeffs: &ReservoirCoefficients,
    dim: usize,
    opts: &SteadyOptions,
) -> Result<CavityState> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if coeffs.gamma <= 0.0 {
        return Err(Error::AboveThreshold { margin: coeffs.gamma });
    }
    let gen = Generator::new(coeffs, dim, opts.include_heff);
    let scale = coeffs.rate_scale().max(f64::MIN_POSITIVE);
    let method = match opts.method {
        SteadyMethod::Auto if dim <= NULL_SPACE_MAX_DIM => SteadyMethod::NullSpace,
        SteadyMethod::Auto => SteadyMethod::LongTime,
        m => m,
    };
    let state = match method {
        SteadyMethod::NullSpace => null_space(&gen, scale, opts.tol)?,
        _ => long_time(coeffs, &gen, scale, opts)?,
    };
    if let Some(tol) = opts.tail_tolerance {
        if state.tail_mass() > tol {
            return Err(Error::TruncationTooSmall { dim, tail_mass: state.tail_mass(), tolerance: tol });
        }
    }
    Ok(state)
}

fn null_space(gen: &Generator, scale: f64, tol: f64) -> Result<CavityState> {
    let d = gen.dim();
    let mut l = liouvillian_matrix(gen);
    // The trace functional is a left null vector, so the (0,0) equation is
    // redundant and can carry the normalisation instead.
    for c in 0..d * d {
        l[(0, c)] = C64::new(0.0, 0.0);
    }
    for k in 0..d {
        l[(0, k + k * d)] = C64::new(1.0, 0.0);
    }
    let mut b = DVector::zeros(d * d);
    b[0] = C64::new(1.0, 0.0);
    let x = l
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Singular("Liouvillian with trace row is singular".into()))?;
    let rho = hermitian_part(&DMatrix::from_column_slice(d, d, x.as_slice()));
    let residual = max_abs(&gen.apply(&rho)) / scale;
    debug!("null-space steady state: d = {d}, residual {residual:.3e}");
    if residual > tol {
        return Err(Error::NoConvergence { residual, steps: 1, gap_estimate: f64::NAN });
    }
    CavityState::from_matrix(rho)
}

fn long_time(
    coeffs: &ReservoirCoefficients,
    gen: &Generator,
    scale: f64,
    opts: &SteadyOptions,
) -> Result<CavityState> {
    let d = gen.dim();
    let chunk = 1.0 / coeffs.gamma;
    let mut state = CavityState::thermal(d, coeffs.n_th.max(0.0))?;
    let evolve_opts = EvolveOptions {
        tol: (opts.tol * 1e-2).max(1e-13),
        tail_tolerance: None,
        include_heff: opts.include_heff,
        sample_interval: Some(chunk),
        track_min_eigenvalue: false,
        ..Default::default()
    };
    let mut previous = f64::NAN;
    let mut gap = f64::NAN;
    let mut residual = f64::INFINITY;
    for step in 0..opts.max_time_constants {
        state = evolve(&state, coeffs, chunk, &evolve_opts)?.final_state;
        residual = max_abs(&gen.apply(state.matrix())) / scale;
        if previous.is_finite() && residual > 0.0 && residual < previous {
            gap = (previous / residual).ln() / chunk;
        }
        if residual <= opts.tol {
            debug!("long-time steady state after {} time constants, residual {residual:.3e}", step + 1);
            return Ok(state);
        }
        previous = residual;
    }
    warn!("steady state not reached: residual {residual:.3e}, gap estimate {gap:.3e}");
    Err(Error::NoConvergence { residual, steps: opts.max_time_constants, gap_estimate: gap })
}
