use nalgebra::{DMatrix, DVector};

use super::polytope::BOUNDARY_TOL;
use crate::error::{Error, Result};

/// `{x : (x − c)ᵀ Q (x − c) < 1}` with `Q` symmetric positive definite.
#[derive(Debug, Clone)]
pub struct EllipsoidBody {
    center: DVector<f64>,
    q: DMatrix<f64>,
    q_inv: DMatrix<f64>,
    /// Lower Cholesky factor, `Q = L Lᵀ`.
    chol_l: DMatrix<f64>,
}

impl EllipsoidBody {
    pub fn new(center: DVector<f64>, q: DMatrix<f64>) -> Result<Self> {
        let d = center.len();
        if q.shape() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d, got: q.nrows() });
        }
        if (&q - q.transpose()).amax() > 1e-12 * (1.0 + q.amax()) {
            return Err(Error::InvalidBody("Q is not symmetric".into()));
        }
        let eig = q.clone().symmetric_eigen();
        if eig.eigenvalues.min() <= 0.0 {
            return Err(Error::InvalidBody("Q is not positive definite".into()));
        }
        let chol = q.clone().cholesky().ok_or_else(|| Error::InvalidBody("Q is not positive definite".into()))?;
        let q_inv = chol.inverse();
        Ok(Self { center, chol_l: chol.l(), q, q_inv })
    }

    pub fn ball(center: DVector<f64>, radius: f64) -> Result<Self> {
        let d = center.len();
        Self::new(center, DMatrix::identity(d, d) / (radius * radius))
    }

    pub fn unit_ball(d: usize) -> Self {
        Self::ball(DVector::zeros(d), 1.0).expect("identity is positive definite")
    }

    /// Axis-aligned ellipsoid with the given semi-axes.
    pub fn axis_aligned(center: DVector<f64>, semi_axes: &[f64]) -> Result<Self> {
        let q = DMatrix::from_diagonal(&DVector::from_iterator(semi_axes.len(), semi_axes.iter().map(|a| 1.0 / (a * a))));
        Self::new(center, q)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// `Lᵀ`, so that `x ↦ Lᵀ(x − c)` maps the ellipsoid onto the unit ball.
    pub fn normalizing_linear(&self) -> DMatrix<f64> {
        self.chol_l.transpose()
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        let y = x - &self.center;
        y.dot(&(&self.q * &y)) - 1.0
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (&self.q * (x - &self.center)) * 2.0
    }

    pub fn hessian(&self) -> DMatrix<f64> {
        &self.q * 2.0
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.value(x) < -BOUNDARY_TOL
    }

    /// Roots of `(p − c + λX)ᵀQ(p − c + λX) = 1`, if the line meets the body.
    pub fn line_interval(&self, p: &DVector<f64>, x: &DVector<f64>) -> Option<(f64, f64)> {
        let y = p - &self.center;
        let qx = &self.q * x;
        let a = x.dot(&qx);
        let b = y.dot(&qx);
        let c = y.dot(&(&self.q * &y)) - 1.0;
        if a <= 0.0 {
            return None;
        }
        let disc = b * b - a * c;
        if disc <= 0.0 {
            return None;
        }
        let s = disc.sqrt();
        // stable pairing of the two roots
        let (lo, hi) = if b >= 0.0 {
            let r1 = -(b + s) / a;
            (r1, if r1 != 0.0 { c / (a * r1) } else { (s - b) / a })
        } else {
            let r2 = (s - b) / a;
            (if r2 != 0.0 { c / (a * r2) } else { -(b + s) / a }, r2)
        };
        Some((lo.min(hi), lo.max(hi)))
    }

    pub fn ray_exit(&self, p: &DVector<f64>, x: &DVector<f64>) -> f64 {
        match self.line_interval(p, x) {
            Some((_, hi)) => hi.max(0.0),
            None => 0.0,
        }
    }

    pub fn support(&self, u: &DVector<f64>) -> f64 {
        self.center.dot(u) + u.dot(&(&self.q_inv * u)).max(0.0).sqrt()
    }
}
