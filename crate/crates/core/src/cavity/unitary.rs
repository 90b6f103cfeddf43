use log::warn;
use nalgebra::{DMatrix, SymmetricEigen};

use super::fock::FockSpace;
use super::state::CavityState;
use crate::atoms::{AtomPairState, EE, EG, GE, GG};
use crate::error::{Error, Result};
use crate::linalg::{kron, to_dynamic, trace};
use crate::reservoir::{sinc, InteractionParams};
use crate::C64;

/// Propagator of one atom pair crossing the cavity, on the joint space
/// `atoms ⊗ Fock(d)` with joint index `atom · d + n`.
///
/// The interaction-picture Hamiltonian is
/// `H = Σᵢ (δ/2) σᵢᶻ + g Σᵢ (σᵢ⁺ a + σᵢ⁻ a†)`; it conserves the excitation
/// number (atomic excitations plus photons), so the propagator is assembled
/// exactly from 4×4 blocks, one per excitation manifold.
#[derive(Debug, Clone)]
pub struct JointUnitary {
    matrix: DMatrix<C64>,
    dim: usize,
    column_leakage: Vec<f64>,
}

impl JointUnitary {
    /// Exact propagator `exp(−iHτ)` restricted to the truncated space.
    ///
    /// The manifolds touching the top Fock levels are built on a space
    /// padded by two levels, so every matrix element between retained states
    /// is exact; probability carried above the truncation is reported by
    /// [`JointUnitary::column_leakage`].
    pub fn new(params: &InteractionParams, dim: usize) -> Result<Self> {
        params.validate()?;
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let padded = dim + 2;
        let mut full = DMatrix::<C64>::zeros(4 * padded, 4 * padded);
        let (g, delta, tau) = (params.g, params.delta, params.tau);

        // Manifold m holds |ee,m−2⟩, |eg,m−1⟩, |ge,m−1⟩, |gg,m⟩.
        for m in 0..padded + 2 {
            let members: Vec<(usize, usize)> = [(EE, 2usize), (EG, 1), (GE, 1), (GG, 0)]
                .into_iter()
                .filter(|&(_, shift)| m >= shift && m - shift < padded)
                .map(|(atom, shift)| (atom, m - shift))
                .collect();
            let k = members.len();
            let h = DMatrix::<f64>::from_fn(k, k, |r, c| {
                let (ar, nr) = members[r];
                let (ac, nc) = members[c];
                if r == c {
                    return match ar {
                        EE => delta,
                        GG => -delta,
                        _ => 0.0,
                    };
                }
                // Coupling lowers one atom and adds one photon (or reverse).
                let (hi, lo, n_hi) = if nr > nc { (ar, ac, nr) } else { (ac, ar, nc) };
                let coupled = matches!((lo, hi), (EE, EG) | (EE, GE) | (EG, GG) | (GE, GG));
                if coupled {
                    g * (n_hi as f64).sqrt()
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(h);
            let v = eig.eigenvectors.map(|x| C64::new(x, 0.0));
            let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, -l * tau)));
            let block = &v * phases * v.transpose();
            for (r, &(ar, nr)) in members.iter().enumerate() {
                for (c, &(ac, nc)) in members.iter().enumerate() {
                    full[(ar * padded + nr, ac * padded + nc)] = block[(r, c)];
                }
            }
        }

        let matrix = DMatrix::from_fn(4 * dim, 4 * dim, |r, c| {
            full[((r / dim) * padded + r % dim, (c / dim) * padded + c % dim)]
        });
        Ok(Self::from_matrix(matrix, dim))
    }

    /// Propagator assembled literally from the closed-form product table of
    /// dressed-state operators (`cos`/`sinc` functions of the Rabi frequency
    /// `Ωₙ = √(δ² + 4g²n)` sandwiched with ladder operators). It treats the
    /// two atoms as crossing one after the other and so is only unitary to
    /// second order in `gτ`; it is kept for comparison.
    pub fn from_product_table(params: &InteractionParams, dim: usize) -> Result<Self> {
        params.validate()?;
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let (g, delta, tau) = (params.g, params.delta, params.tau);
        let half = 0.5 * delta * tau;
        let rabi = |k: usize| (delta * delta + 4.0 * g * g * k as f64).sqrt();
        let diag = |f: &dyn Fn(usize) -> C64| {
            DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |n, _| f(n)))
        };
        // Functions of n (argument n+1) and of n−1 (argument n).
        let s_n = diag(&|n| C64::new(sinc(0.5 * rabi(n + 1) * tau), 0.0));
        let s_m = diag(&|n| C64::new(sinc(0.5 * rabi(n) * tau), 0.0));
        let a_n = diag(&|n| {
            let th = 0.5 * rabi(n + 1) * tau;
            C64::new(th.cos(), -half * sinc(th))
        });
        let b_m = diag(&|n| {
            let th = 0.5 * rabi(n) * tau;
            C64::new(th.cos(), half * sinc(th))
        });
        let a = DMatrix::from_fn(dim, dim, |i, j| {
            if j == i + 1 {
                C64::new((j as f64).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let ad = a.adjoint();
        let mi = C64::new(0.0, -g * tau);
        let m2 = C64::new(-(g * tau) * (g * tau), 0.0);

        let u = [
            [
                &a_n * &a_n,
                &a_n * &s_n * &a * mi,
                &s_n * &a * &a_n * mi,
                &s_n * &a * &s_n * &a * m2,
            ],
            [
                &a_n * &ad * &s_m * mi,
                &a_n * &b_m,
                &s_n * &a * &ad * &s_m * m2,
                &s_n * &a * &b_m * mi,
            ],
            [
                &ad * &s_m * &a_n * mi,
                &ad * &s_m * &s_n * &a * m2,
                &b_m * &a_n,
                &b_m * &s_n * &a * mi,
            ],
            [
                &ad * &s_m * &ad * &s_m * m2,
                &ad * &s_m * &b_m * mi,
                &b_m * &ad * &s_m * mi,
                &b_m * &b_m,
            ],
        ];
        let mut matrix = DMatrix::zeros(4 * dim, 4 * dim);
        for (i, row) in u.iter().enumerate() {
            for (j, blk) in row.iter().enumerate() {
                matrix.view_mut((i * dim, j * dim), (dim, dim)).copy_from(blk);
            }
        }
        Ok(Self::from_matrix(matrix, dim))
    }

    fn from_matrix(matrix: DMatrix<C64>, dim: usize) -> Self {
        let column_leakage =
            matrix.column_iter().map(|c| 1.0 - c.norm_squared()).collect();
        Self { matrix, dim, column_leakage }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Operator block `u_ij = ⟨i|U|j⟩` acting on the field.
    pub fn block(&self, i: usize, j: usize) -> DMatrix<C64> {
        self.matrix.view((i * self.dim, j * self.dim), (self.dim, self.dim)).into_owned()
    }

    /// Probability lost above the truncation for each joint basis input.
    pub fn column_leakage(&self) -> &[f64] {
        &self.column_leakage
    }

    /// Deviation from unitarity, `max |U†U − 1|`, over inputs with at most
    /// `max_photon` photons.
    pub fn unitarity_error(&self, max_photon: usize) -> f64 {
        let utu = self.matrix.adjoint() * &self.matrix;
        let n = self.matrix.ncols();
        let keep = |k: usize| k % self.dim <= max_photon;
        let mut err: f64 = 0.0;
        for r in (0..n).filter(|&r| keep(r)) {
            for c in (0..n).filter(|&c| keep(c)) {
                let want = if r == c { 1.0 } else { 0.0 };
                err = err.max((utu[(r, c)] - C64::new(want, 0.0)).norm());
            }
        }
        err
    }
}

/// Exact joint propagator on the given Fock space.
pub fn joint_unitary(params: &InteractionParams, space: &FockSpace) -> Result<JointUnitary> {
    JointUnitary::new(params, space.dim())
}

/// Result of applying the exact collision map.
#[derive(Debug, Clone)]
pub struct MapOutput {
    pub state: CavityState,
    /// Probability carried above the truncation, `1 − Tr ρ'`.
    pub leakage: f64,
}

/// One collision: `ρ' = Tr_atoms[U (ρ_atoms ⊗ ρ) U†]`.
pub fn exact_map(
    cavity: &CavityState,
    atoms: &AtomPairState,
    unitary: &JointUnitary,
) -> Result<MapOutput> {
    let d = unitary.dim();
    if cavity.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: cavity.dim() });
    }
    let joint = kron(&to_dynamic(atoms.matrix()), cavity.matrix());
    let u = unitary.matrix();
    let out = u * joint * u.adjoint();
    let mut rho = DMatrix::zeros(d, d);
    for k in 0..4 {
        rho += out.view((k * d, k * d), (d, d));
    }
    let leakage = 1.0 - trace(&rho).re;
    if leakage > 1e-6 {
        warn!("collision map leaks {leakage:.3e} above Fock dimension {d}");
    }
    Ok(MapOutput { state: CavityState::from_matrix(rho)?, leakage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::{build_pure_family, PureFamilyParams};
    use crate::linalg::max_abs;

    fn params(g_tau: f64, delta_tau: f64) -> InteractionParams {
        let g = 1.0e5;
        let tau = g_tau / g;
        InteractionParams::new(g, tau, 1.0e3, delta_tau / tau, 1.0, 0.0).unwrap()
    }

    #[test]
    fn exact_propagator_is_unitary_away_from_the_edge() {
        let u = JointUnitary::new(&params(0.3, 0.7), 10).unwrap();
        assert!(u.unitarity_error(7) < 1e-12);
        for (k, &l) in u.column_leakage().iter().enumerate() {
            if k % 10 <= 7 {
                assert!(l.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_excitation_rabi_oscillation() {
        // |eg,0⟩ couples to |gg,1⟩ only through atom 1; with the |ge,0⟩ path
        // the bright state (|eg⟩+|ge⟩)/√2 oscillates at √2·g.
        let p = params(0.9, 0.0);
        let d = 4;
        let u = JointUnitary::new(&p, d).unwrap();
        let gt = p.g_tau();
        let amp_gg1 = u.matrix()[(GG * d + 1, EG * d)];
        let want = C64::new(0.0, -(2f64.sqrt() * gt).sin() / 2f64.sqrt());
        assert!((amp_gg1 - want).norm() < 1e-12, "{amp_gg1} vs {want}");
    }

    #[test]
    fn ground_pair_in_vacuum_is_stationary() {
        let p = params(0.1, 0.4);
        let u = JointUnitary::new(&p, 6).unwrap();
        let out = exact_map(
            &CavityState::vacuum(6).unwrap(),
            &AtomPairState::basis(GG),
            &u,
        )
        .unwrap();
        assert!((out.state.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_table_agrees_at_low_order() {
        let d = 8;
        for gt in [0.02, 0.04] {
            let p = params(gt, 0.5);
            let exact = JointUnitary::new(&p, d).unwrap();
            let table = JointUnitary::from_product_table(&p, d).unwrap();
            let mut diff = exact.matrix() - table.matrix();
            // Compare on inputs away from the truncation edge.
            for c in 0..4 * d {
                if c % d > d - 3 {
                    diff.column_mut(c).fill(C64::new(0.0, 0.0));
                }
            }
            assert!(max_abs(&diff) < 5.0 * gt * gt, "gτ={gt}: {}", max_abs(&diff));
        }
    }

    #[test]
    fn map_preserves_trace_without_leakage() {
        let atoms = build_pure_family(PureFamilyParams::new(1.0, 0.7, 0.4, 0.3)).unwrap();
        let p = params(0.2, 1.0);
        let u = JointUnitary::new(&p, 12).unwrap();
        let out = exact_map(&CavityState::thermal(12, 0.2).unwrap(), &atoms, &u).unwrap();
        assert!(out.leakage.abs() < 1e-8);
        assert!(out.state.min_eigenvalue() > -1e-12);
    }
}
