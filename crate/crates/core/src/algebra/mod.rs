//! Dense complex matrices standing in for the operator algebra B(E) with
//! E = C^n, together with the spectral norm, the involution and the
//! exponential map.

mod expm;
mod state;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use expm::matrix_exp;
pub use state::StateVector;

pub type C64 = Complex64;

/// Relative hermiticity tolerance: max-entry deviation from the adjoint,
/// scaled by the operator norm.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Operator-norm bound on `U*U - I`.
pub const UNITARITY_TOL: f64 = 1e-10;

pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexMatrix")
            .field("dim", &self.dim())
            .field("rows", &self.to_rows())
            .finish()
    }
}

impl ComplexMatrix {
    pub fn new(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::NotSquare {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        if inner.nrows() == 0 {
            return Err(Error::Empty);
        }
        for col in 0..inner.ncols() {
            for row in 0..inner.nrows() {
                let z = inner[(row, col)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row, col });
                }
            }
        }
        Ok(Self { inner })
    }

    /// Wraps a matrix produced by arithmetic on already-validated operands.
    pub(crate) fn from_inner(inner: DMatrix<C64>) -> Self {
        debug_assert_eq!(inner.nrows(), inner.ncols());
        Self { inner }
    }

    /// Builds a matrix from row-major nested rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self::from_inner(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self::from_inner(DMatrix::zeros(n, n))
    }

    pub fn from_diagonal(diag: &[C64]) -> Result<Self> {
        let n = diag.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.inner[(row, col)]
    }

    pub fn as_inner(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.inner
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.inner[(i, j)]).collect())
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_inner(self.inner.adjoint())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_inner(&self.inner * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        operator_norm_of(&self.inner)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        one_norm_of(&self.inner)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Operator norm of `self - other`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(operator_norm_of(&(&self.inner - &other.inner)))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(self * other)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(self - other)
    }

    pub fn is_finite(&self) -> bool {
        self.inner
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn exp(&self) -> Result<Self> {
        matrix_exp(self)
    }

    /// Operator-norm deviation of `self* self` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let gram = self.inner.adjoint() * &self.inner - DMatrix::<C64>::identity(n, n);
        operator_norm_of(&gram)
    }
}

pub(crate) fn check_dims(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

pub(crate) fn operator_norm_of(m: &DMatrix<C64>) -> f64 {
    match (m.nrows(), m.ncols()) {
        (0, _) | (_, 0) => 0.0,
        (1, 1) => m[(0, 0)].norm(),
        _ => m
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .fold(0.0, f64::max),
    }
}

pub(crate) fn one_norm_of(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Conjugate transpose of `a`.
pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

/// `ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(a.dim(), b.dim())?;
    Ok(ComplexMatrix::from_inner(
        &a.inner * &b.inner - &b.inner * &a.inner,
    ))
}

/// Spectral norm: sup over unit vectors v of |av|.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    a.operator_norm()
}

/// Relative defect of the C*-identity `|a*a| = |a|^2`.
pub fn check_cstar_identity(a: &ComplexMatrix) -> f64 {
    let norm = a.operator_norm();
    let gram = ComplexMatrix::from_inner(a.inner.adjoint() * &a.inner).operator_norm();
    (gram - norm * norm).abs() / f64::max(1.0, norm * norm)
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_inner(&self.inner + &rhs.inner)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_inner(&self.inner - &rhs.inner)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_inner(&self.inner * &rhs.inner)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::from_inner(-&self.inner)
    }
}

/// A self-adjoint matrix, validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    /// Accepts `a` if every entry deviates from the matching adjoint entry
    /// by at most `HERMITICITY_TOL * |a|`. The first offending entry is
    /// reported scanning the lower triangle row by row.
    pub fn new(a: ComplexMatrix) -> Result<Self> {
        let n = a.dim();
        let tol = HERMITICITY_TOL * a.operator_norm();
        for row in 0..n {
            for col in 0..=row {
                let deviation = (a.get(row, col) - a.get(col, row).conj()).norm();
                if deviation > tol {
                    return Err(Error::NotHermitian {
                        row,
                        col,
                        deviation,
                    });
                }
            }
        }
        Ok(Self { inner: a })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(n),
        }
    }

    /// Real linear combination of Hermitian matrices; Hermitian by
    /// construction, so no re-validation.
    pub(crate) fn real_combination(terms: &[(f64, &HermitianMatrix)], n: usize) -> Self {
        let mut acc = DMatrix::<C64>::zeros(n, n);
        for (c, h) in terms {
            acc += h.inner.as_inner() * C64::new(*c, 0.0);
        }
        Self {
            inner: ComplexMatrix::from_inner(acc),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn operator_norm(&self) -> f64 {
        self.inner.operator_norm()
    }
}

/// A unitary matrix, validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    inner: ComplexMatrix,
}

impl UnitaryMatrix {
    pub fn new(u: ComplexMatrix) -> Result<Self> {
        let defect = u.unitarity_defect();
        if defect <= UNITARITY_TOL {
            Ok(Self { inner: u })
        } else {
            Err(Error::NotUnitary { defect })
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn defect(&self) -> f64 {
        self.inner.unitarity_defect()
    }

    /// The inverse, which is the adjoint.
    pub fn inverse(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    /// Product of two unitaries, re-validated.
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Self::new(&self.inner * &other.inner)
    }

    /// `U a U*`.
    pub fn conjugate(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dims(self.dim(), a.dim())?;
        Ok(&(&self.inner * a) * &self.inner.adjoint())
    }

    pub fn apply(&self, y: &StateVector) -> Result<StateVector> {
        check_dims(self.dim(), y.dim())?;
        Ok(StateVector::from_inner(self.inner.as_inner() * y.as_inner()))
    }
}

/// Pauli matrices.
pub mod pauli {
    use super::{ComplexMatrix, HermitianMatrix, C64};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]])
            .expect("2x2")
    }

    pub fn sigma_y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]])
            .expect("2x2")
    }

    pub fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![c(1., 0.), c(0., 0.)], vec![c(0., 0.), c(-1., 0.)]])
            .expect("2x2")
    }

    pub fn hermitian(m: ComplexMatrix) -> HermitianMatrix {
        HermitianMatrix::new(m).expect("Pauli matrices are Hermitian")
    }
}
