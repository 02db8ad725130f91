//! Inner derivations `δ_H(a) = i[H, a]` of the matrix algebra, their
//! superoperator form and the automorphism groups they generate.
//!
//! Matrices are vectorized by stacking columns, so `vec(a)[j*n + i] = a[i][j]`
//! and `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{check_dims, commutator, matrix_exp, ComplexMatrix, HermitianMatrix, C64, I};
use crate::error::{Error, Result};

/// The derivation `a ↦ i[H, a]` for a Hermitian generator `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerDerivation {
    generator: HermitianMatrix,
}

impl InnerDerivation {
    pub fn new(generator: HermitianMatrix) -> Self {
        Self { generator }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(HermitianMatrix::zeros(n))
    }

    pub fn generator(&self) -> &HermitianMatrix {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(commutator(self.generator.matrix(), a)?.scale(I))
    }

    pub fn superoperator(&self) -> Superoperator {
        derivation_superoperator(self)
    }

    /// `e^{irH}`.
    pub fn group_unitary(&self, r: f64) -> Result<ComplexMatrix> {
        if !r.is_finite() {
            return Err(Error::InvalidStep(r));
        }
        matrix_exp(&self.generator.matrix().scale(C64::new(0.0, r)))
    }
}

/// A linear map on n×n matrices stored as an n²×n² matrix acting on
/// column-stacked operands.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        check_dims(matrix.dim(), dim * dim)?;
        Ok(Self { dim, matrix })
    }

    /// Operand dimension n (the matrix itself is n²×n²).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dims(self.dim, a.dim())?;
        let v = self.matrix.as_inner() * vectorize(a);
        Ok(unvectorize(&v, self.dim))
    }

    pub fn operator_norm(&self) -> f64 {
        self.matrix.operator_norm()
    }

    /// `exp(r S)`.
    pub fn exp(&self, r: f64) -> Result<Superoperator> {
        Ok(Self {
            dim: self.dim,
            matrix: matrix_exp(&self.matrix.scale_real(r))?,
        })
    }

    pub fn compose(&self, other: &Superoperator) -> Result<Superoperator> {
        check_dims(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        })
    }
}

/// Column-stacking `vec(a)`.
pub fn vectorize(a: &ComplexMatrix) -> DVector<C64> {
    DVector::from_column_slice(a.as_inner().as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &DVector<C64>, n: usize) -> ComplexMatrix {
    assert_eq!(v.len(), n * n, "vector length must be n^2");
    ComplexMatrix::from_inner(DMatrix::from_column_slice(n, n, v.as_slice()))
}

/// `i[H, a]`.
pub fn apply_derivation(d: &InnerDerivation, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    d.apply(a)
}

/// `|δ(ab) - δ(a)b - aδ(b)| / max(1, |a||b|)`.
pub fn check_leibniz(d: &InnerDerivation, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let lhs = d.apply(&(a * b))?;
    let rhs = &(&d.apply(a)? * b) + &(a * &d.apply(b)?);
    let scale = f64::max(1.0, a.operator_norm() * b.operator_norm());
    Ok(lhs.distance(&rhs)? / scale)
}

/// `|δ(a*) - δ(a)*| / max(1, |a|)`.
pub fn check_star_compatibility(d: &InnerDerivation, a: &ComplexMatrix) -> Result<f64> {
    let lhs = d.apply(&a.adjoint())?;
    let rhs = d.apply(a)?.adjoint();
    Ok(lhs.distance(&rhs)? / f64::max(1.0, a.operator_norm()))
}

/// The n²×n² matrix `S = i(I ⊗ H - Hᵀ ⊗ I)` with `S vec(a) = vec(i[H, a])`.
pub fn derivation_superoperator(d: &InnerDerivation) -> Superoperator {
    let n = d.dim();
    let h = d.generator.matrix().as_inner();
    let ident = DMatrix::<C64>::identity(n, n);
    let left = ident.kronecker(h);
    let right = h.transpose().kronecker(&ident);
    Superoperator {
        dim: n,
        matrix: ComplexMatrix::from_inner((left - right) * I),
    }
}

/// `g_r(a) = e^{irH} a e^{-irH}`.
pub fn one_parameter_group(d: &InnerDerivation, r: f64, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(d.dim(), a.dim())?;
    let u = d.group_unitary(r)?;
    Ok(&(&u * a) * &u.adjoint())
}

/// Relative gap between `exp(rS) vec(a)` and `vec(g_r(a))`.
pub fn check_group_vs_superoperator(
    d: &InnerDerivation,
    r: f64,
    a: &ComplexMatrix,
) -> Result<f64> {
    check_dims(d.dim(), a.dim())?;
    let via_superoperator = derivation_superoperator(d).exp(r)?.apply(a)?;
    let via_group = one_parameter_group(d, r, a)?;
    Ok(via_superoperator.distance(&via_group)? / f64::max(1.0, a.operator_norm()))
}
