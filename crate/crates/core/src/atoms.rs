//! Two-qubit density matrices for one injected atom pair.
//!
//! Basis order is fixed everywhere in the crate as
//! `{|e₁e₂⟩, |e₁g₂⟩, |g₁e₂⟩, |g₁g₂⟩}` (indices 0..4).

use nalgebra::{Matrix2, Matrix4, Vector4};

use crate::error::{Error, Result};
use crate::C64;

/// Index of `|e₁e₂⟩`.
pub const EE: usize = 0;
/// Index of `|e₁g₂⟩`.
pub const EG: usize = 1;
/// Index of `|g₁e₂⟩`.
pub const GE: usize = 2;
/// Index of `|g₁g₂⟩`.
pub const GG: usize = 3;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-NEGATIVE_TOL, 0)` are treated as rounding noise.
const NEGATIVE_TOL: f64 = 1e-12;
/// Eigenvalues of ρ below this are dropped before forming `√ρ`; keeps the
/// square root from amplifying round-off in rank-deficient states.
const RANK_CUTOFF: f64 = 1e-14;

/// Density matrix of one atom pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomPairState {
    rho: Matrix4<C64>,
}

impl AtomPairState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rho: Matrix4<C64>) -> Result<Self> {
        let mut herm = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                herm = herm.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
            }
        }
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (error {herm:.3e})")));
        }
        let tr = rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min_ev = hermitian_eigen(&rho).0.min();
        if min_ev < -NEGATIVE_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (smallest eigenvalue {min_ev:.3e})"
            )));
        }
        Ok(Self { rho })
    }

    /// Pure state `|ψ⟩⟨ψ|` from (unnormalised) amplitudes in the fixed basis.
    pub fn from_amplitudes(psi: Vector4<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Unnormalizable);
        }
        let psi = psi.unscale(norm);
        Ok(Self { rho: psi * psi.adjoint() })
    }

    /// `ρ₁ ⊗ ρ₂` for single-atom density matrices in the `(e, g)` basis.
    pub fn product(rho1: &Matrix2<C64>, rho2: &Matrix2<C64>) -> Result<Self> {
        Self::new(rho1.kronecker(rho2))
    }

    /// `I/4`.
    pub fn maximally_mixed() -> Self {
        Self { rho: Matrix4::identity().scale(0.25) }
    }

    /// Projector onto one of the four basis states.
    pub fn basis(index: usize) -> Self {
        assert!(index < 4, "basis index out of range");
        let mut rho = Matrix4::zeros();
        rho[(index, index)] = C64::new(1.0, 0.0);
        Self { rho }
    }

    /// The four Bell states, in the order
    /// `(|gg⟩+|ee⟩)/√2, (|gg⟩−|ee⟩)/√2, (|eg⟩+|ge⟩)/√2, (|eg⟩−|ge⟩)/√2`.
    pub fn bell_states() -> [Self; 4] {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let mk = |v: [C64; 4]| Self::from_amplitudes(Vector4::from(v)).expect("nonzero");
        [
            mk([one, zero, zero, one]),
            mk([-one, zero, zero, one]),
            mk([zero, one, one, zero]),
            mk([zero, one, -one, zero]),
        ]
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.rho
    }

    /// Matrix element with the 0-based basis indices [`EE`], [`EG`], [`GE`], [`GG`].
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.rho[(i, j)]
    }

    /// Swap the labels of the two atoms.
    pub fn swap_atoms(&self) -> Self {
        let perm = [EE, GE, EG, GG];
        let rho = Matrix4::from_fn(|i, j| self.rho[(perm[i], perm[j])]);
        Self { rho }
    }
}

/// Amplitudes of `N(a|e₁e₂⟩ + b(|g₁e₂⟩ + e^{iφ}|e₁g₂⟩) + c|g₁g₂⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureFamilyParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub phi: f64,
}

impl PureFamilyParams {
    pub fn new(a: f64, b: f64, c: f64, phi: f64) -> Self {
        Self { a, b, c, phi }
    }

    /// Normalised amplitude vector in the fixed basis.
    pub fn amplitudes(&self) -> Result<Vector4<C64>> {
        let norm_sq = self.a * self.a + 2.0 * self.b * self.b + self.c * self.c;
        if norm_sq == 0.0 || !norm_sq.is_finite() {
            return Err(Error::Unnormalizable);
        }
        let n = norm_sq.sqrt().recip();
        Ok(Vector4::new(
            C64::new(self.a * n, 0.0),
            C64::from_polar(self.b * n, self.phi),
            C64::new(self.b * n, 0.0),
            C64::new(self.c * n, 0.0),
        ))
    }
}

/// Pure state of the `(a, b, c, φ)` family.
pub fn build_pure_family(params: PureFamilyParams) -> Result<AtomPairState> {
    let psi = params.amplitudes()?;
    Ok(AtomPairState { rho: psi * psi.adjoint() })
}

/// `σ_y ⊗ σ_y` in the fixed basis. Real and anti-diagonal.
fn sigma_yy() -> Matrix4<C64> {
    let mut m = Matrix4::zeros();
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}

/// `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn spin_flip(state: &AtomPairState) -> Matrix4<C64> {
    let yy = sigma_yy();
    yy * state.rho.conjugate() * yy
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`, where `λᵢ` are the
/// eigenvalues of `√(√ρ ρ̃ √ρ)` in decreasing order.
///
/// With `ρ = W W†` and `W = V diag(√μ)` from the eigendecomposition of ρ,
/// the `λᵢ` are the singular values of `W† (σ_y⊗σ_y) W*`. Working with
/// singular values avoids taking a square root of round-off-sized
/// eigenvalues, which matters for nearly separable states.
pub fn concurrence(state: &AtomPairState) -> Result<f64> {
    let (mut mu, vecs) = hermitian_eigen(&state.rho);
    for m in mu.iter_mut() {
        if *m < -NEGATIVE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {m:.3e} in concurrence"
            )));
        }
        if *m < RANK_CUTOFF {
            *m = 0.0;
        }
    }
    let mut w = vecs;
    for (k, m) in mu.iter().enumerate() {
        let s = m.sqrt();
        w.column_mut(k).scale_mut(s);
    }
    let w_tilde = sigma_yy() * w.conjugate();
    let t = w.adjoint() * w_tilde;
    let mut lambda: Vec<f64> = t.singular_values().iter().copied().collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    let c = lambda[0] - lambda[1] - lambda[2] - lambda[3];
    Ok(c.clamp(0.0, 1.0))
}

/// Eigenvalues and eigenvectors of the Hermitian part of `m`.
fn hermitian_eigen(m: &Matrix4<C64>) -> (nalgebra::Vector4<f64>, Matrix4<C64>) {
    let h = (m + m.adjoint()).unscale(2.0);
    let eig = h.symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}
