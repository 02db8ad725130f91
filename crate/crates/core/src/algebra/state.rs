use nalgebra::DVector;

use super::{check_dims, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// A state column ψ in E = C^n.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    inner: DVector<C64>,
}

impl StateVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(row) = entries
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite { row, col: 0 });
        }
        Ok(Self {
            inner: DVector::from_vec(entries),
        })
    }

    pub(crate) fn from_inner(inner: DVector<C64>) -> Self {
        Self { inner }
    }

    /// The k-th standard basis vector of C^n.
    pub fn basis(n: usize, k: usize) -> Self {
        assert!(k < n, "basis index out of range");
        let mut inner = DVector::zeros(n);
        inner[k] = C64::new(1.0, 0.0);
        Self { inner }
    }

    pub fn dim(&self) -> usize {
        self.inner.len()
    }

    pub fn get(&self, k: usize) -> C64 {
        self.inner[k]
    }

    pub fn entries(&self) -> Vec<C64> {
        self.inner.iter().copied().collect()
    }

    pub fn as_inner(&self) -> &DVector<C64> {
        &self.inner
    }

    pub fn norm(&self) -> f64 {
        self.inner.norm()
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<C64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.inner.dotc(&other.inner))
    }

    pub fn apply(a: &ComplexMatrix, y: &StateVector) -> Result<StateVector> {
        check_dims(a.dim(), y.dim())?;
        Ok(Self::from_inner(a.as_inner() * &y.inner))
    }

    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok((&self.inner - &other.inner).norm())
    }
}
