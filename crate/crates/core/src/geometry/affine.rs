use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Invertible affine map `x -> L x + t`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    linear: DMatrix<f64>,
    shift: DVector<f64>,
}

impl AffineMap {
    pub fn new(linear: DMatrix<f64>, shift: DVector<f64>) -> Result<Self> {
        let n = linear.nrows();
        if linear.ncols() != n {
            return Err(Error::InvalidInput("linear part must be square".into()));
        }
        if shift.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: shift.len(),
            });
        }
        let det = linear.determinant();
        let scale = linear.norm().max(f64::MIN_POSITIVE).powi(n as i32);
        if !det.is_finite() || det.abs() <= 1e-14 * scale {
            return Err(Error::Singular);
        }
        Ok(Self { linear, shift })
    }

    pub fn linear_only(linear: DMatrix<f64>) -> Result<Self> {
        let n = linear.nrows();
        Self::new(linear, DVector::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            linear: DMatrix::identity(n, n),
            shift: DVector::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn shift(&self) -> &DVector<f64> {
        &self.shift
    }

    pub fn determinant(&self) -> f64 {
        self.linear.determinant()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.linear * x + &self.shift
    }

    /// `self ∘ inner`, i.e. `x -> self(inner(x))`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &self.linear * &inner.linear,
            shift: &self.linear * &inner.shift + &self.shift,
        }
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let inv = self.linear.clone().try_inverse().ok_or(Error::Singular)?;
        let shift = -(&inv * &self.shift);
        Ok(AffineMap { linear: inv, shift })
    }
}
