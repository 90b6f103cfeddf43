use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_error, min_eigenvalue, trace};
use crate::C64;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-8;
const NEGATIVE_TOL: f64 = 1e-8;

/// Default bound on [`CavityState::tail_mass`] for a result to be trusted.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-6;

/// Density matrix of the cavity mode on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityState {
    rho: DMatrix<C64>,
    tail_mass: f64,
}

impl CavityState {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(rho: DMatrix<C64>) -> Result<Self> {
        let s = Self::from_matrix(rho)?;
        let herm = hermiticity_error(&s.rho);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidCavityState(format!("not Hermitian (error {herm:.3e})")));
        }
        let tr = trace(&s.rho);
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidCavityState(format!("trace is {tr}")));
        }
        let min_ev = min_eigenvalue(&s.rho);
        if min_ev < -NEGATIVE_TOL {
            return Err(Error::InvalidCavityState(format!("smallest eigenvalue {min_ev:.3e}")));
        }
        Ok(s)
    }

    /// Wraps a square matrix without checking the density-matrix invariants.
    /// Used for map outputs whose trace or positivity is reported separately.
    pub fn from_matrix(rho: DMatrix<C64>) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::DimensionMismatch { expected: rho.nrows(), found: rho.ncols() });
        }
        if rho.nrows() < 2 {
            return Err(Error::InvalidDimension(rho.nrows()));
        }
        let tail_mass = tail_mass_of(&rho);
        Ok(Self { rho, tail_mass })
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::fock(dim, 0)
    }

    pub fn fock(dim: usize, k: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if k >= dim {
            return Err(Error::InvalidParameter(format!("Fock level {k} outside dimension {dim}")));
        }
        let mut p = vec![0.0; dim];
        p[k] = 1.0;
        Self::diagonal(&p)
    }

    /// Diagonal state from (unnormalised) level populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let total: f64 = populations.iter().sum();
        if populations.iter().any(|&p| p < 0.0 || !p.is_finite()) || total <= 0.0 {
            return Err(Error::InvalidCavityState("populations must be non-negative".into()));
        }
        let v = DVector::from_iterator(
            populations.len(),
            populations.iter().map(|&p| C64::new(p / total, 0.0)),
        );
        Self::from_matrix(DMatrix::from_diagonal(&v))
    }

    /// Thermal state with mean occupation `n_mean`, renormalised after truncation.
    pub fn thermal(dim: usize, n_mean: f64) -> Result<Self> {
        if n_mean < 0.0 {
            return Err(Error::Domain(format!("negative occupation {n_mean}")));
        }
        if n_mean == 0.0 {
            return Self::vacuum(dim);
        }
        let q = n_mean / (n_mean + 1.0);
        let p: Vec<f64> = (0..dim).map(|k| q.powi(k as i32)).collect();
        Self::diagonal(&p)
    }

    /// Coherent state `|β⟩`, renormalised after truncation.
    pub fn coherent(dim: usize, beta: C64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let mut amp = Vec::with_capacity(dim);
        let mut c = C64::new(1.0, 0.0);
        for k in 0..dim {
            if k > 0 {
                c = c * beta / (k as f64).sqrt();
            }
            amp.push(c);
        }
        let psi = DVector::from_vec(amp);
        let psi = psi.unscale(psi.norm());
        Self::from_matrix(&psi * psi.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.rho
    }

    /// Population in the top 10% of Fock levels (at least one level).
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn is_trusted(&self, tolerance: f64) -> bool {
        self.tail_mass < tolerance
    }

    pub fn trace(&self) -> f64 {
        trace(&self.rho).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.rho)
    }

    /// `⟨a†a⟩`
    pub fn mean_photon(&self) -> f64 {
        (0..self.dim()).map(|k| k as f64 * self.rho[(k, k)].re).sum()
    }

    /// `⟨a⟩ = Σ √(k+1) ρ_{k+1,k}`
    pub fn mean_a(&self) -> C64 {
        (0..self.dim() - 1).map(|k| self.rho[(k + 1, k)] * ((k + 1) as f64).sqrt()).sum()
    }

    /// `⟨a²⟩ = Σ √((k+1)(k+2)) ρ_{k+2,k}`
    pub fn mean_a2(&self) -> C64 {
        (0..self.dim().saturating_sub(2))
            .map(|k| self.rho[(k + 2, k)] * (((k + 1) * (k + 2)) as f64).sqrt())
            .sum()
    }

    /// Embeds the state into a larger truncation (zero padding).
    pub fn embed(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: dim });
        }
        let mut m = DMatrix::zeros(dim, dim);
        m.view_mut((0, 0), (self.dim(), self.dim())).copy_from(&self.rho);
        Self::from_matrix(m)
    }
}

pub(crate) fn tail_levels(dim: usize) -> usize {
    dim.div_ceil(10).max(1)
}

pub(crate) fn tail_mass_of(rho: &DMatrix<C64>) -> f64 {
    let d = rho.nrows();
    (d - tail_levels(d)..d).map(|k| rho[(k, k)].re).sum::<f64>().max(0.0)
}
