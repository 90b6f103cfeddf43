use nalgebra::DMatrix;

use super::fock::{a_left, a_right, aadag_diag, adag_left, adag_right, diag_left, diag_right, number_diag};
use super::state::CavityState;
use crate::reservoir::ReservoirCoefficients;
use crate::C64;

/// Lindblad generator of the cavity mode on a fixed truncation.
///
/// `dρ/dt = −i[H, ρ] + p₁ D[a†]ρ + (p₂ + κ/2) D[a]ρ
///          + μ (2aρa − a²ρ − ρa²) + μ* (2a†ρa† − a†²ρ − ρa†²)`
///
/// with `D[L]ρ = 2LρL† − L†Lρ − ρL†L` and `H = Ω a† + Ω* a`, `Ω = g N α`.
/// When `include_heff` is set, the frequency-pulling term `χ a a†` is added
/// to `H` (the constant shift never affects the dynamics).
#[derive(Debug, Clone)]
pub struct Generator {
    dim: usize,
    p1: f64,
    loss: f64,
    mu: C64,
    drive: C64,
    pull: f64,
    aad: Vec<f64>,
    num: Vec<f64>,
}

impl Generator {
    pub fn new(coeffs: &ReservoirCoefficients, dim: usize, include_heff: bool) -> Self {
        Self {
            dim,
            p1: coeffs.p1,
            loss: coeffs.loss_rate(),
            mu: coeffs.mu,
            drive: coeffs.drive_strength,
            pull: if include_heff { coeffs.push_pull } else { 0.0 },
            aad: aadag_diag(dim),
            num: number_diag(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `dρ/dt` for an arbitrary (not necessarily Hermitian) operator `ρ`.
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let i = C64::new(0.0, 1.0);
        let ar = a_left(rho);
        let adr = adag_left(rho);
        let ra = a_right(rho);
        let rad = adag_right(rho);

        // Non-Hermitian part G = K + iH with K = p₁aa† + (p₂+κ/2)a†a + μa² + μ*a†².
        let diag_k: Vec<f64> =
            self.aad.iter().zip(&self.num).map(|(x, n)| self.p1 * x + self.loss * n).collect();
        let diag_h: Vec<f64> = self.aad.iter().map(|x| self.pull * x).collect();

        let k_rho = diag_left(&diag_k, rho) + a_left(&ar) * self.mu + adag_left(&adr) * self.mu.conj();
        let rho_k = diag_right(rho, &diag_k) + a_right(&ra) * self.mu + adag_right(&rad) * self.mu.conj();
        let h_rho = &adr * self.drive + &ar * self.drive.conj() + diag_left(&diag_h, rho);
        let rho_h = &rad * self.drive + &ra * self.drive.conj() + diag_right(rho, &diag_h);

        let jumps = adag_left(&ra) * C64::from(self.p1)
            + a_left(&rad) * C64::from(self.loss)
            + a_left(&ra) * self.mu
            + adag_left(&rad) * self.mu.conj();

        jumps * C64::from(2.0) - k_rho - rho_k - (h_rho - rho_h) * i
    }
}

/// `dρ/dt` of the cavity master equation.
pub fn lindblad_rhs(
    state: &CavityState,
    coeffs: &ReservoirCoefficients,
    include_heff: bool,
) -> DMatrix<C64> {
    Generator::new(coeffs, state.dim(), include_heff).apply(state.matrix())
}

/// Matrix of the generator acting on column-stacked density matrices
/// (`vec(ρ)[i + j·d] = ρᵢⱼ`), of size `d² × d²`.
pub fn liouvillian_matrix(generator: &Generator) -> DMatrix<C64> {
    let d = generator.dim();
    let mut l = DMatrix::zeros(d * d, d * d);
    let mut basis = DMatrix::zeros(d, d);
    for j in 0..d {
        for i in 0..d {
            basis[(i, j)] = C64::new(1.0, 0.0);
            let col = generator.apply(&basis);
            l.column_mut(i + j * d).copy_from_slice(col.as_slice());
            basis[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    l
}
