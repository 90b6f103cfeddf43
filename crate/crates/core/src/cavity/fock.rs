use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

/// Cavity mode truncated to the lowest `dim` number states.
#[derive(Debug, Clone)]
pub struct FockSpace {
    dim: usize,
    a: DMatrix<C64>,
    adag: DMatrix<C64>,
    n: DMatrix<C64>,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let a = DMatrix::from_fn(dim, dim, |i, j| {
            if j == i + 1 {
                C64::new((j as f64).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let adag = a.adjoint();
        let n = &adag * &a;
        Ok(Self { dim, a, adag, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lowering operator `a|k⟩ = √k|k−1⟩`.
    pub fn a(&self) -> &DMatrix<C64> {
        &self.a
    }

    pub fn adag(&self) -> &DMatrix<C64> {
        &self.adag
    }

    /// Number operator `a†a`.
    pub fn number(&self) -> &DMatrix<C64> {
        &self.n
    }

    /// `[a, a†]`, which is the identity except for `1 − d` in the last entry.
    pub fn commutator(&self) -> DMatrix<C64> {
        &self.a * &self.adag - &self.adag * &self.a
    }
}

/// `build_fock(dim)`.
pub fn build_fock(dim: usize) -> Result<FockSpace> {
    FockSpace::new(dim)
}

// Sparse actions of the ladder operators on a d×d matrix, O(d²) each.

/// `a · m`
pub(crate) fn a_left(m: &DMatrix<C64>) -> DMatrix<C64> {
    let d = m.nrows();
    DMatrix::from_fn(d, m.ncols(), |i, j| {
        if i + 1 < d {
            m[(i + 1, j)] * ((i + 1) as f64).sqrt()
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `a† · m`
pub(crate) fn adag_left(m: &DMatrix<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        if i > 0 {
            m[(i - 1, j)] * (i as f64).sqrt()
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `m · a`
pub(crate) fn a_right(m: &DMatrix<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        if j > 0 {
            m[(i, j - 1)] * (j as f64).sqrt()
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `m · a†`
pub(crate) fn adag_right(m: &DMatrix<C64>) -> DMatrix<C64> {
    let d = m.ncols();
    DMatrix::from_fn(m.nrows(), d, |i, j| {
        if j + 1 < d {
            m[(i, j + 1)] * ((j + 1) as f64).sqrt()
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Diagonal of `a a†` in the truncated space: `(1, 2, …, d−1, 0)`.
pub(crate) fn aadag_diag(d: usize) -> Vec<f64> {
    (0..d).map(|k| if k + 1 < d { (k + 1) as f64 } else { 0.0 }).collect()
}

/// Diagonal of `a†a`: `(0, 1, …, d−1)`.
pub(crate) fn number_diag(d: usize) -> Vec<f64> {
    (0..d).map(|k| k as f64).collect()
}

/// `diag(v) · m`
pub(crate) fn diag_left(v: &[f64], m: &DMatrix<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * v[i])
}

/// `m · diag(v)`
pub(crate) fn diag_right(m: &DMatrix<C64>, v: &[f64]) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * v[j])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn qubit_truncation() {
        let f = FockSpace::new(2).unwrap();
        assert_eq!(f.a()[(0, 1)], c(1.0));
        assert_eq!(f.a()[(0, 0)], c(0.0));
        assert_eq!(f.a()[(1, 0)], c(0.0));
        assert_eq!(f.a()[(1, 1)], c(0.0));
    }

    #[test]
    fn number_operator_dim3() {
        let f = FockSpace::new(3).unwrap();
        for k in 0..3 {
            assert!((f.number()[(k, k)] - c(k as f64)).norm() < 1e-15);
        }
        assert_eq!(f.number()[(0, 1)], c(0.0));
    }

    #[test]
    fn truncated_commutator() {
        for d in [2, 3, 7, 16] {
            let f = FockSpace::new(d).unwrap();
            let comm = f.commutator();
            for i in 0..d {
                for j in 0..d {
                    let want = if i != j {
                        0.0
                    } else if i + 1 < d {
                        1.0
                    } else {
                        1.0 - d as f64
                    };
                    assert!((comm[(i, j)] - c(want)).norm() < 1e-12, "d={d} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn rejects_small_dims() {
        assert!(matches!(FockSpace::new(1), Err(Error::InvalidDimension(1))));
        assert!(FockSpace::new(0).is_err());
    }

    #[test]
    fn sparse_actions_match_dense() {
        let d = 6;
        let f = FockSpace::new(d).unwrap();
        let m = DMatrix::from_fn(d, d, |i, j| C64::new(i as f64 + 0.3 * j as f64, (i * j) as f64 - 1.0));
        assert!((a_left(&m) - f.a() * &m).norm() < 1e-12);
        assert!((adag_left(&m) - f.adag() * &m).norm() < 1e-12);
        assert!((a_right(&m) - &m * f.a()).norm() < 1e-12);
        assert!((adag_right(&m) - &m * f.adag()).norm() < 1e-12);
        let aad = f.a() * f.adag();
        assert!((diag_left(&aadag_diag(d), &m) - &aad * &m).norm() < 1e-12);
        assert!((diag_right(&m, &number_diag(d)) - &m * f.number()).norm() < 1e-12);
    }
}
