use nalgebra::{DMatrix, DVector};

use super::AffineMap;
use crate::error::{Error, Result};
use crate::linalg::unit_ball_volume;

/// The body `{B y + d : |y| <= 1}` for a symmetric positive-definite `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ellipsoid {
    center: DVector<f64>,
    shape: DMatrix<f64>,
}

impl Ellipsoid {
    pub fn new(center: DVector<f64>, shape: DMatrix<f64>) -> Result<Self> {
        let n = center.len();
        if shape.nrows() != n || shape.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: shape.nrows(),
            });
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > 1e-12 * shape.amax().max(1.0) {
            return Err(Error::InvalidInput(format!("shape matrix not symmetric ({asym:e})")));
        }
        let shape = (&shape + shape.transpose()) * 0.5;
        let min_eig = shape.clone().symmetric_eigen().eigenvalues.min();
        if min_eig <= 0.0 {
            return Err(Error::InvalidInput("shape matrix not positive definite".into()));
        }
        Ok(Self { center, shape })
    }

    pub fn unit_ball(n: usize) -> Self {
        Self {
            center: DVector::zeros(n),
            shape: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.shape.determinant()
    }

    /// The map `y -> B y + d` carrying the unit ball onto this ellipsoid.
    pub fn as_map(&self) -> AffineMap {
        AffineMap::new(self.shape.clone(), self.center.clone()).expect("positive-definite shape is invertible")
    }

    pub fn contains(&self, x: &DVector<f64>, slack: f64) -> bool {
        match self.shape.clone().lu().solve(&(x - &self.center)) {
            Some(y) => y.norm() <= 1.0 + slack,
            None => false,
        }
    }
}
