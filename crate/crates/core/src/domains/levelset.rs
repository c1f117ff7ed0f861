use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::polytope::BOUNDARY_TOL;
use crate::directions::unit_directions;
use crate::error::{Error, Result};

/// A smooth convex defining function `g`; the body is `{g < 0}`.
pub trait DefiningFunction: Debug + Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64>;
    fn name(&self) -> String;
}

/// `x₁² + x₂² + x₂⁴ − 1`: a bounded, everywhere strictly convex planar body
/// that is not projectively a disk.
#[derive(Debug, Clone, Copy, Default)]
pub struct Quartic;

impl DefiningFunction for Quartic {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        let y2 = x[1] * x[1];
        x[0] * x[0] + y2 + y2 * y2 - 1.0
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(vec![2.0 * x[0], 2.0 * x[1] + 4.0 * x[1] * x[1] * x[1]])
    }
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0 + 12.0 * x[1] * x[1]])
    }
    fn name(&self) -> String {
        "quartic".into()
    }
}

/// Graph-form body `x₁ + f(x′) < 0` for a convex `f` with `f(0) = 0`,
/// `∇f(0) = 0`.
pub trait GraphProfile: Debug + Send + Sync {
    fn value(&self, xp: &DVector<f64>) -> f64;
    fn gradient(&self, xp: &DVector<f64>) -> DVector<f64>;
    fn hessian(&self, xp: &DVector<f64>) -> DMatrix<f64>;
    fn name(&self) -> String;
}

#[derive(Debug, Clone)]
pub struct GraphFunction<P> {
    pub dim: usize,
    pub profile: P,
}

impl<P: GraphProfile> DefiningFunction for GraphFunction<P> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        x[0] + self.profile.value(&x.rows(1, self.dim - 1).into_owned())
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.dim);
        g[0] = 1.0;
        g.rows_mut(1, self.dim - 1).copy_from(&self.profile.gradient(&x.rows(1, self.dim - 1).into_owned()));
        g
    }
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.dim, self.dim);
        let d = self.dim - 1;
        h.view_mut((1, 1), (d, d)).copy_from(&self.profile.hessian(&x.rows(1, d).into_owned()));
        h
    }
    fn name(&self) -> String {
        self.profile.name()
    }
}

/// `f(x′) = ‖x′‖²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParaboloidProfile;

impl GraphProfile for ParaboloidProfile {
    fn value(&self, xp: &DVector<f64>) -> f64 {
        xp.norm_squared()
    }
    fn gradient(&self, xp: &DVector<f64>) -> DVector<f64> {
        xp * 2.0
    }
    fn hessian(&self, xp: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(xp.len(), xp.len()) * 2.0
    }
    fn name(&self) -> String {
        "paraboloid".into()
    }
}

/// `f(x′) = ‖x′‖² + ‖x′‖⁴`.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuarticProfile;

impl GraphProfile for QuarticProfile {
    fn value(&self, xp: &DVector<f64>) -> f64 {
        let r2 = xp.norm_squared();
        r2 + r2 * r2
    }
    fn gradient(&self, xp: &DVector<f64>) -> DVector<f64> {
        xp * (2.0 + 4.0 * xp.norm_squared())
    }
    fn hessian(&self, xp: &DVector<f64>) -> DMatrix<f64> {
        let n = xp.len();
        DMatrix::identity(n, n) * (2.0 + 4.0 * xp.norm_squared()) + xp * xp.transpose() * 8.0
    }
    fn name(&self) -> String {
        "quartic-graph".into()
    }
}

/// Open convex body `{g < 0}`.
#[derive(Debug, Clone)]
pub struct LevelSetBody {
    g: Arc<dyn DefiningFunction>,
    witness: DVector<f64>,
    bbox: Option<(DVector<f64>, DVector<f64>)>,
}

/// Directions used for the sampled convexity certificate.
const CERT_DIRECTIONS: usize = 256;

impl LevelSetBody {
    /// Validates the witness, nonvanishing gradient on sampled boundary points
    /// and a sampled PSD-Hessian convexity certificate.
    pub fn new(
        g: Arc<dyn DefiningFunction>,
        witness: DVector<f64>,
        bbox: Option<(DVector<f64>, DVector<f64>)>,
    ) -> Result<Self> {
        let d = g.dim();
        if witness.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: witness.len() });
        }
        if g.value(&witness) >= 0.0 {
            return Err(Error::InvalidBody("witness is not inside the level set".into()));
        }
        if let Some((lo, hi)) = &bbox {
            if lo.len() != d || hi.len() != d || (0..d).any(|i| !(lo[i] < witness[i] && witness[i] < hi[i])) {
                return Err(Error::InvalidBody("bounding box must contain the witness".into()));
            }
        }
        let body = Self { g, witness, bbox };
        for u in unit_directions(d, CERT_DIRECTIONS) {
            let lam = body.ray_exit(&body.witness, &u);
            if !lam.is_finite() {
                continue;
            }
            let x = &body.witness + &u * lam;
            if body.g.gradient(&x).norm() < 1e-12 {
                return Err(Error::InvalidBody("gradient vanishes on the boundary".into()));
            }
            let mid = &body.witness + &u * (0.5 * lam);
            for pt in [x, mid] {
                let min_eig = body.g.hessian(&pt).symmetric_eigen().eigenvalues.min();
                if min_eig < -1e-9 {
                    return Err(Error::InvalidBody(format!("Hessian not PSD (eigenvalue {min_eig})")));
                }
            }
        }
        Ok(body)
    }

    pub fn quartic() -> Self {
        let bbox = (DVector::from_element(2, -1.5), DVector::from_element(2, 1.5));
        Self::new(Arc::new(Quartic), DVector::zeros(2), Some(bbox)).expect("quartic is valid")
    }

    pub fn paraboloid(d: usize) -> Self {
        let mut w = DVector::zeros(d);
        w[0] = -0.5;
        Self::new(Arc::new(GraphFunction { dim: d, profile: ParaboloidProfile }), w, None).expect("valid")
    }

    pub fn quartic_graph() -> Self {
        Self::new(Arc::new(GraphFunction { dim: 2, profile: QuarticProfile }), DVector::from_vec(vec![-0.5, 0.0]), None)
            .expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn function(&self) -> &Arc<dyn DefiningFunction> {
        &self.g
    }

    pub fn witness(&self) -> &DVector<f64> {
        &self.witness
    }

    pub fn bbox(&self) -> Option<&(DVector<f64>, DVector<f64>)> {
        self.bbox.as_ref()
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        self.g.value(x)
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.g.value(x) < -BOUNDARY_TOL
    }

    /// Parameter range `(lo, hi)` of the line `p + λX` inside the bounding box.
    fn box_range(&self, p: &DVector<f64>, x: &DVector<f64>) -> (f64, f64) {
        let Some((lo, hi)) = &self.bbox else {
            return (f64::NEG_INFINITY, f64::INFINITY);
        };
        let (mut a, mut b) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..p.len() {
            if x[i] != 0.0 {
                let t1 = (lo[i] - p[i]) / x[i];
                let t2 = (hi[i] - p[i]) / x[i];
                a = a.max(t1.min(t2));
                b = b.min(t1.max(t2));
            }
        }
        (a, b)
    }

    /// Smallest positive root of `λ ↦ g(p + λX)`: doubling bracket, bisection,
    /// then Newton from the outside (monotone for convex `g`).
    pub fn ray_exit(&self, p: &DVector<f64>, x: &DVector<f64>) -> f64 {
        let phi = |lam: f64| self.g.value(&(p + x * lam));
        let xn = x.norm();
        if xn == 0.0 {
            return f64::INFINITY;
        }
        let (_, box_hi) = self.box_range(p, x);
        let mut lo = 0.0;
        let mut hi;
        if box_hi.is_finite() {
            hi = box_hi;
            if phi(hi) < 0.0 {
                return hi;
            }
            // shrink a coarse bracket before refining
            let mut step = (1e-3 / xn).min(hi);
            while step < hi {
                if phi(step) >= 0.0 {
                    hi = step;
                    break;
                }
                lo = step;
                step *= 2.0;
            }
        } else {
            let mut step = 1e-3 / xn;
            loop {
                if phi(step) >= 0.0 {
                    hi = step;
                    break;
                }
                lo = step;
                step *= 2.0;
                if step * xn > 1e12 {
                    return f64::INFINITY;
                }
            }
        }
        while hi - lo > 1e-3 * hi {
            let mid = 0.5 * (lo + hi);
            if phi(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut lam = hi;
        for _ in 0..60 {
            let pt = p + x * lam;
            let val = self.g.value(&pt);
            let slope = self.g.gradient(&pt).dot(x);
            if val == 0.0 || !(slope > 0.0) {
                break;
            }
            let next = lam - val / slope;
            if !(next > lo && next <= lam) {
                // bisect on the bracket if Newton misbehaves
                let mid = 0.5 * (lo + lam);
                if phi(mid) >= 0.0 {
                    lam = mid;
                } else {
                    lo = mid;
                }
                if lam - lo <= 1e-13 * lam {
                    break;
                }
                continue;
            }
            let converged = lam - next <= 1e-14 * lam;
            lam = next;
            if converged {
                break;
            }
        }
        lam
    }

    /// Minimizes `g` along the line (golden section) and brackets both roots.
    pub fn line_interval(&self, p: &DVector<f64>, x: &DVector<f64>) -> Option<(f64, f64)> {
        let (mut a, mut b) = self.box_range(p, x);
        if !a.is_finite() || !b.is_finite() {
            let span = 1e6 / x.norm().max(1e-300);
            a = a.max(-span);
            b = b.min(span);
        }
        if !(a < b) {
            return None;
        }
        let phi = |lam: f64| self.g.value(&(p + x * lam));
        let invphi = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - invphi * (b - a);
        let mut d = a + invphi * (b - a);
        let (mut fc, mut fd) = (phi(c), phi(d));
        for _ in 0..200 {
            if fc < 0.0 || fd < 0.0 {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = phi(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = phi(d);
            }
            if (b - a).abs() < 1e-15 * (1.0 + a.abs().max(b.abs())) {
                break;
            }
        }
        let m = if fc < fd { c } else { d };
        if phi(m) >= -BOUNDARY_TOL {
            return None;
        }
        let pm = p + x * m;
        let fwd = self.ray_exit(&pm, x);
        let bwd = self.ray_exit(&pm, &(-x));
        Some((m - bwd, m + fwd))
    }

    pub fn is_bounded(&self) -> bool {
        self.bbox.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn quartic_axis_exits() {
        let q = LevelSetBody::quartic();
        let lam = q.ray_exit(&dvector![0.0, 0.0], &dvector![1.0, 0.0]);
        assert!((lam - 1.0).abs() < 1e-14);
        // y + y^2 = 1 along the x₂ axis in terms of y = x₂²
        let y2 = (5f64.sqrt() - 1.0) / 2.0;
        let lam = q.ray_exit(&dvector![0.0, 0.0], &dvector![0.0, 1.0]);
        assert!((lam - y2.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn near_boundary_exit_is_relative_accurate() {
        let q = LevelSetBody::quartic();
        let p = dvector![1.0 - 1e-7, 0.0];
        let lam = q.ray_exit(&p, &dvector![1.0, 0.0]);
        assert!((lam - 1e-7).abs() < 1e-15);
    }

    #[test]
    fn paraboloid_unbounded_direction() {
        let b = LevelSetBody::paraboloid(2);
        assert!(b.ray_exit(&dvector![-0.5, 0.0], &dvector![-1.0, 0.0]).is_infinite());
        let lam = b.ray_exit(&dvector![-0.5, 0.0], &dvector![1.0, 0.0]);
        assert!((lam - 0.5).abs() < 1e-14);
    }

    #[test]
    fn line_interval_from_outside() {
        let q = LevelSetBody::quartic();
        let (lo, hi) = q.line_interval(&dvector![-3.0, 0.0], &dvector![1.0, 0.0]).unwrap();
        assert!((lo - 2.0).abs() < 1e-12 && (hi - 4.0).abs() < 1e-12);
        assert!(q.line_interval(&dvector![-3.0, 2.0], &dvector![1.0, 0.0]).is_none());
    }

    #[derive(Debug)]
    struct Saddle;
    impl DefiningFunction for Saddle {
        fn dim(&self) -> usize {
            2
        }
        fn value(&self, x: &DVector<f64>) -> f64 {
            x[0] * x[0] - 0.5 * x[1] * x[1] + 0.1 * x[1].powi(4) - 1.0
        }
        fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
            dvector![2.0 * x[0], -x[1] + 0.4 * x[1].powi(3)]
        }
        fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -1.0 + 1.2 * x[1] * x[1]])
        }
        fn name(&self) -> String {
            "saddle".into()
        }
    }

    #[test]
    fn non_convex_function_rejected() {
        let bbox = (dvector![-5.0, -5.0], dvector![5.0, 5.0]);
        let r = LevelSetBody::new(Arc::new(Saddle), dvector![0.0, 0.0], Some(bbox));
        assert!(matches!(r, Err(Error::InvalidBody(_))));
    }
}
