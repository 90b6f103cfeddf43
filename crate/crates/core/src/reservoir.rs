//! Effective reservoir seen by the cavity mode: the atom-pair beam plus the
//! vacuum bath, reduced to the coefficients of a single-mode master equation.

use log::warn;

use crate::atoms::{AtomPairState, EE, EG, GE, GG};
use crate::error::{Error, Result};
use crate::units::{quantum_temperature, wavelength_to_rad, DEFAULT_WAVELENGTH};
use crate::C64;

/// Above this value of `gτ` the second-order expansion is not trustworthy.
pub const MARKOV_LIMIT: f64 = 0.2;

/// Below this `|δτ|` the dispersive envelope `b₁` is evaluated from its
/// Taylor series, avoiding the cancellation in `cos − sinc`.
const SERIES_SWITCH: f64 = 0.05;

/// Physical parameters of one atom-pair/cavity collision.
///
/// Frequencies are angular (rad/s), times in seconds. Both atoms share the
/// same detuning `δ = ω_a − ω_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionParams {
    /// Atom–field coupling `g`.
    pub g: f64,
    /// Interaction time `τ`.
    pub tau: f64,
    /// Cavity field decay rate `κ`.
    pub kappa: f64,
    /// Detuning `δ`.
    pub delta: f64,
    /// Mean number of pairs in the cavity, `N_pair = r_a τ`.
    pub n_pair: f64,
    /// Mean atomic transition frequency `(ω₁+ω₂)/2`.
    pub omega_a: f64,
}

impl InteractionParams {
    pub fn new(g: f64, tau: f64, kappa: f64, delta: f64, n_pair: f64, omega_a: f64) -> Result<Self> {
        let p = Self { g, tau, kappa, delta, n_pair, omega_a };
        p.validate()?;
        Ok(p)
    }

    /// Parameters specified through the dimensionless product `gτ`, with the
    /// atomic frequency of the 791 nm transition.
    pub fn with_g_tau(g: f64, g_tau: f64, kappa: f64, delta: f64, n_pair: f64) -> Result<Self> {
        if g.is_nan() || g <= 0.0 {
            return Err(Error::InvalidParameter("g must be positive to fix τ from gτ".into()));
        }
        Self::new(g, g_tau / g, kappa, delta, n_pair, wavelength_to_rad(DEFAULT_WAVELENGTH))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_owned()));
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return bad("g must be non-negative");
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return bad("tau must be non-negative");
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return bad("kappa must be non-negative");
        }
        if !(self.n_pair > 0.0 && self.n_pair.is_finite()) {
            return bad("n_pair must be positive");
        }
        if !self.delta.is_finite() {
            return bad("delta must be finite");
        }
        if !(self.omega_a >= 0.0 && self.omega_a.is_finite()) {
            return bad("omega_a must be non-negative");
        }
        Ok(())
    }

    pub fn g_tau(&self) -> f64 {
        self.g * self.tau
    }

    /// Pair injection rate `r_a = N_pair / τ`.
    pub fn pump_rate(&self) -> f64 {
        self.n_pair / self.tau
    }

    /// Whether `gτ` is inside the regime where the second-order map holds.
    pub fn is_markovian(&self) -> bool {
        self.g_tau() < MARKOV_LIMIT
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        Self { delta, ..*self }
    }

    pub fn with_n_pair(&self, n_pair: f64) -> Self {
        Self { n_pair, ..*self }
    }
}

/// `sin(x)/x`, continuous at zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Detuning-dependent envelopes of the second-order collision map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningEnvelope {
    pub r: C64,
    pub d: C64,
    pub e: C64,
    pub a1: f64,
    pub b1: f64,
}

/// `a₁ = ½ sinc(δτ/2)`, `b₁ = (cos(δτ/2) − sinc(δτ/2))/(δτ)`,
/// `D = E = (a₁ + i b₁) e^{iδτ/2}` and `R = D + E`.
pub fn detuning_envelope(delta: f64, tau: f64) -> DetuningEnvelope {
    let x = delta * tau;
    let h = 0.5 * x;
    let a1 = 0.5 * sinc(h);
    let b1 = if x.abs() < SERIES_SWITCH {
        // (cos h − sinc h)/x = −x/12 + x³/480 − x⁵/53760 + x⁷/11612160 + …
        let x2 = x * x;
        x * (-1.0 / 12.0 + x2 * (1.0 / 480.0 + x2 * (-1.0 / 53760.0 + x2 / 11_612_160.0)))
    } else {
        (h.cos() - sinc(h)) / x
    };
    let phase = C64::from_polar(1.0, h);
    let d = C64::new(a1, b1) * phase;
    DetuningEnvelope { r: d + d, d, e: d, a1, b1 }
}

/// Coefficients of the cavity master equation.
///
/// Rates are in 1/s; `alpha` is dimensionless. `n_th` is NaN when the
/// record was built above threshold (see [`ReservoirCoefficients::evaluate`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirCoefficients {
    /// Incoherent excitation rate.
    pub p1: f64,
    /// Incoherent de-excitation rate contributed by the atoms.
    pub p2: f64,
    /// Two-photon (squeezing) coefficient.
    pub mu: C64,
    /// Coherent drive parameter.
    pub alpha: C64,
    /// Effective decay `κ/2 + p₂ − p₁`.
    pub gamma: f64,
    /// Thermal photon number `p₁/γ`.
    pub n_th: f64,
    /// `g N_pair α`, the amplitude of the drive Hamiltonian.
    pub drive_strength: C64,
    /// Coefficient of `a a†` in the effective Hamiltonian (frequency pulling).
    pub push_pull: f64,
    /// Constant energy shift in the effective Hamiltonian.
    pub const_shift: f64,
    /// Cavity decay rate used to build the record.
    pub kappa: f64,
}

impl ReservoirCoefficients {
    /// Builds the record without the threshold check.
    ///
    /// The gain and loss brackets are the expectation values
    /// `⟨J₊J₋⟩/2` and `⟨J₋J₊⟩/2` of the collective pair operators, so the
    /// single-excitation coherence enters as `(ρ₂₃+ρ₃₂)/2`.
    pub fn evaluate(state: &AtomPairState, params: &InteractionParams) -> Self {
        let env = detuning_envelope(params.delta, params.tau);
        let x = params.delta * params.tau;
        let k = params.g * params.g * params.tau * params.n_pair;
        let re_r = env.r.re;
        let im_r = env.r.im;

        let rho = |i, j| state.get(i, j);
        let singles = 0.5 * (rho(EG, EG).re + rho(GE, GE).re);
        let exchange = 0.5 * (rho(EG, GE) + rho(GE, EG)).re;

        let p1 = k * re_r * (rho(EE, EE).re + singles + exchange);
        let p2 = k * re_r * (rho(GG, GG).re + singles + exchange);
        let mu = rho(GG, EE) * (k * re_r) * C64::from_polar(1.0, x);
        let alpha = (rho(EE, GE) + rho(EG, GG) + rho(EE, EG) + rho(GE, GG))
            * (sinc(0.5 * x) * C64::from_polar(1.0, -0.5 * x));

        let gamma = 0.5 * params.kappa + (p2 - p1);
        let n_th = if gamma > 0.0 { p1 / gamma } else { f64::NAN };

        let push_pull = -k * (rho(GG, GG).re - rho(EE, EE).re) * im_r;
        let const_shift = -0.5 * k * (rho(EG, EG).re - rho(GE, GE).re) * im_r;

        Self {
            p1,
            p2,
            mu,
            alpha,
            gamma,
            n_th,
            drive_strength: alpha * (params.g * params.n_pair),
            push_pull,
            const_shift,
            kappa: params.kappa,
        }
    }

    /// Total rate of photon loss, `p₂ + κ/2 = γ(n̄_th + 1)`.
    pub fn loss_rate(&self) -> f64 {
        self.p2 + 0.5 * self.kappa
    }

    /// Total rate of incoherent photon gain, `p₁ = γ n̄_th`.
    pub fn gain_rate(&self) -> f64 {
        self.p1
    }

    pub fn is_below_threshold(&self) -> bool {
        self.gamma > 0.0
    }

    /// Sum of the magnitudes of all generator coefficients; the natural
    /// scale against which residuals of the master equation are judged.
    pub fn rate_scale(&self) -> f64 {
        self.p1.abs()
            + self.loss_rate().abs()
            + 2.0 * self.mu.norm()
            + self.drive_strength.norm()
            + self.push_pull.abs()
    }

    /// Copy with the drive switched off (α = 0), i.e. the cold reservoir.
    pub fn without_drive(&self) -> Self {
        Self { alpha: C64::new(0.0, 0.0), drive_strength: C64::new(0.0, 0.0), ..*self }
    }
}

/// Coefficients of the cavity master equation for one atom-pair state.
///
/// Fails with [`Error::AboveThreshold`] when `γ ≤ 0`.
pub fn reservoir_coefficients(
    state: &AtomPairState,
    params: &InteractionParams,
) -> Result<ReservoirCoefficients> {
    params.validate()?;
    if !params.is_markovian() {
        warn!("gτ = {:.3} is outside the Markovian regime (< {MARKOV_LIMIT})", params.g_tau());
    }
    let c = ReservoirCoefficients::evaluate(state, params);
    if c.is_below_threshold() {
        Ok(c)
    } else {
        Err(Error::AboveThreshold { margin: c.p1 - c.loss_rate() })
    }
}

/// Distance from the lasing threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingRegime {
    /// `(p₂ + κ/2) − p₁`, equal to γ.
    pub margin: f64,
    pub below_threshold: bool,
}

pub fn operating_regime(coeffs: &ReservoirCoefficients) -> OperatingRegime {
    let margin = coeffs.loss_rate() - coeffs.p1;
    OperatingRegime { margin, below_threshold: margin > 0.0 }
}

/// Temperature `ħω_a / (k_B ln(1 + 1/n̄_th))` of the effective reservoir, in K.
pub fn reservoir_temperature(coeffs: &ReservoirCoefficients, omega_a: f64) -> Result<f64> {
    if !coeffs.is_below_threshold() || coeffs.n_th.is_nan() {
        return Err(Error::AboveThreshold { margin: coeffs.p1 - coeffs.loss_rate() });
    }
    if coeffs.n_th < 0.0 {
        return Err(Error::Domain(format!("negative thermal number {}", coeffs.n_th)));
    }
    if coeffs.n_th == 0.0 {
        return Ok(0.0);
    }
    Ok(quantum_temperature(omega_a) / (1.0 / coeffs.n_th).ln_1p())
}
