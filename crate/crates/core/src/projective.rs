//! Homogeneous coordinates and projective maps of the affine chart
//! `x ↦ (1 : x₁ : … : x_d)`.
//!
//! A [`ProjectiveMap`] is stored as a Frobenius-normalized `(d+1)×(d+1)`
//! matrix with a canonical sign, so two matrices describing the same map
//! compare equal up to rounding.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A point of the affine chart ℝ^d.
pub type AffinePoint = DVector<f64>;

/// A tangent vector at a point of ℝ^d.
pub type TangentVector = DVector<f64>;

/// Images whose homogeneous weight is below this fraction of the vector
/// norm are treated as lying at infinity.
pub const AT_INFINITY_TOL: f64 = 1e-12;

/// Determinant floor for Frobenius-normalized matrices.
pub const SINGULAR_DET_TOL: f64 = 1e-12;

/// Embeds `x` as `(1, x₁, …, x_d)`.
pub fn homogenize(x: &AffinePoint) -> DVector<f64> {
    let mut h = DVector::zeros(x.len() + 1);
    h[0] = 1.0;
    h.rows_mut(1, x.len()).copy_from(x);
    h
}

/// A point of ℝP^d, kept as a representative vector.
#[derive(Debug, Clone)]
pub struct HomogeneousPoint {
    coords: DVector<f64>,
}

impl HomogeneousPoint {
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if coords.len() < 2 || coords.iter().all(|c| *c == 0.0) {
            return Err(Error::InvalidBody("homogeneous point must be nonzero".into()));
        }
        Ok(Self { coords })
    }

    pub fn from_affine(x: &AffinePoint) -> Self {
        Self { coords: homogenize(x) }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Dehomogenizes; fails for points on the hyperplane at infinity.
    pub fn to_affine(&self) -> Result<AffinePoint> {
        let w = self.coords[0];
        if w.abs() < AT_INFINITY_TOL * self.coords.norm() {
            return Err(Error::ImageAtInfinity);
        }
        Ok(self.coords.rows(1, self.dim()).into_owned() / w)
    }

    /// Unit-norm representative with first nonzero coordinate positive.
    pub fn normalized(&self) -> DVector<f64> {
        let mut v = self.coords.normalize();
        if let Some(first) = v.iter().find(|c| c.abs() > 1e-14) {
            if *first < 0.0 {
                v.neg_mut();
            }
        }
        v
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.coords.len() == other.coords.len()
            && (self.normalized() - other.normalized()).amax() <= tol
    }
}

/// A projective transformation of ℝP^d acting on the affine chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMap {
    m: DMatrix<f64>,
}

fn canonicalize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let norm = m.norm();
    if norm > 0.0 {
        m /= norm;
    }
    // row-major scan
    if let Some(first) = m.transpose().iter().find(|c| c.abs() > 1e-12) {
        if *first < 0.0 {
            m.neg_mut();
        }
    }
    m
}

impl ProjectiveMap {
    /// Builds a map from a square matrix, rejecting (numerically) singular ones.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() < 2 {
            return Err(Error::SingularMap);
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularMap);
        }
        let m = canonicalize(m);
        if m.determinant().abs() < SINGULAR_DET_TOL {
            return Err(Error::SingularMap);
        }
        Ok(Self { m })
    }

    /// Wraps a matrix known to be invertible (products of valid maps).
    pub(crate) fn from_matrix_unchecked(m: DMatrix<f64>) -> Self {
        Self { m: canonicalize(m) }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_matrix_unchecked(DMatrix::identity(d + 1, d + 1))
    }

    /// `x ↦ x + v`.
    pub fn translation(v: &DVector<f64>) -> Self {
        let d = v.len();
        let mut m = DMatrix::identity(d + 1, d + 1);
        m.view_mut((1, 0), (d, 1)).copy_from(v);
        Self::from_matrix_unchecked(m)
    }

    /// `x ↦ s·x`.
    pub fn scaling(s: f64, d: usize) -> Result<Self> {
        let mut m = DMatrix::identity(d + 1, d + 1) * s;
        m[(0, 0)] = 1.0;
        Self::new(m)
    }

    /// `x ↦ Lx + c`.
    pub fn affine(linear: &DMatrix<f64>, offset: &DVector<f64>) -> Result<Self> {
        let d = offset.len();
        if linear.nrows() != d || linear.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: linear.nrows() });
        }
        let mut m = DMatrix::zeros(d + 1, d + 1);
        m[(0, 0)] = 1.0;
        m.view_mut((1, 1), (d, d)).copy_from(linear);
        m.view_mut((1, 0), (d, 1)).copy_from(offset);
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// True when the last `d` entries of the first row vanish.
    pub fn is_affine(&self) -> bool {
        self.m.row(0).columns(1, self.dim()).amax() <= 1e-14 * self.m.amax()
    }

    pub fn apply_homogeneous(&self, h: &DVector<f64>) -> DVector<f64> {
        &self.m * h
    }

    /// Fractional-linear action on the affine chart.
    pub fn apply(&self, p: &AffinePoint) -> Result<AffinePoint> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.len() });
        }
        HomogeneousPoint { coords: self.apply_homogeneous(&homogenize(p)) }.to_affine()
    }

    /// Homogeneous weight `(M·(1,p))₀` divided by `‖M·(1,p)‖`; its sign tells
    /// which side of the singular hyperplane `p` lies on.
    pub fn relative_weight(&self, p: &AffinePoint) -> f64 {
        let h = self.apply_homogeneous(&homogenize(p));
        h[0] / h.norm()
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &ProjectiveMap) -> ProjectiveMap {
        Self::from_matrix_unchecked(&self.m * &g.m)
    }

    pub fn inverse(&self) -> Result<ProjectiveMap> {
        let inv = self.m.clone().try_inverse().ok_or(Error::SingularMap)?;
        if inv.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularMap);
        }
        Ok(Self::from_matrix_unchecked(inv))
    }

    /// Jacobian of the fractional-linear map at `p`.
    pub fn differential(&self, p: &AffinePoint) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let h = self.apply_homogeneous(&homogenize(p));
        let w = h[0];
        if w.abs() < AT_INFINITY_TOL * h.norm() {
            return Err(Error::ImageAtInfinity);
        }
        let image = h.rows(1, d) / w;
        let lin = self.m.view((1, 1), (d, d));
        let grad_w = self.m.view((0, 1), (1, d));
        Ok((lin - &image * grad_w) / w)
    }

    /// Pushes a tangent vector forward: `Df(p)·X`.
    pub fn push_vector(&self, p: &AffinePoint, x: &TangentVector) -> Result<TangentVector> {
        Ok(self.differential(p)? * x)
    }

    pub fn approx_eq(&self, other: &ProjectiveMap, tol: f64) -> bool {
        self.m.shape() == other.m.shape() && (&self.m - &other.m).amax() <= tol
    }
}

/// Cross-ratio in affine line parameters:
/// `(t_q − t_a)(t_p − t_b) / ((t_p − t_a)(t_q − t_b))`.
pub fn cross_ratio_params(ta: f64, tp: f64, tq: f64, tb: f64) -> Result<f64> {
    let den = (tp - ta) * (tq - tb);
    let scale = (tb - ta).abs().max((tq - tp).abs()).max(f64::MIN_POSITIVE);
    if (tp - ta).abs() < 1e-300 || (tq - tb).abs() < 1e-300 || den.abs() < 1e-300 * scale {
        return Err(Error::CoincidentPoints);
    }
    Ok((tq - ta) * (tp - tb) / den)
}

/// Cross-ratio `(ab;pq)` of four collinear points. With this convention the
/// Hilbert distance `|log(ab;pq)|` is the integral of `1/P₊ + 1/P₋` along
/// `[p, q]`.
pub fn cross_ratio(a: &AffinePoint, p: &AffinePoint, q: &AffinePoint, b: &AffinePoint) -> Result<f64> {
    let pts = [a, p, q, b];
    let mut diameter: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            diameter = diameter.max((pts[i] - pts[j]).norm());
        }
    }
    let dir = b - a;
    let len2 = dir.norm_squared();
    if len2 == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let param = |x: &AffinePoint| (x - a).dot(&dir) / len2;
    for x in [p, q] {
        let t = param(x);
        let off = (x - a - &dir * t).norm();
        if off > 1e-9 * diameter {
            return Err(Error::NotCollinear);
        }
    }
    cross_ratio_params(0.0, param(p), param(q), 1.0)
}

/// Projective automorphism of the unit ball sending `a` to the origin: the
/// Lorentz boost of `O(d,1)` along `a` with rapidity `artanh‖a‖`, acting on
/// Klein-model homogeneous coordinates.
pub fn ball_automorphism(a: &AffinePoint) -> Result<ProjectiveMap> {
    let d = a.len();
    let beta = a.norm();
    if beta >= 1.0 - 1e-12 {
        return Err(Error::OutsideBall);
    }
    if beta == 0.0 {
        return Ok(ProjectiveMap::identity(d));
    }
    let gamma = 1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt();
    let n = a / beta;
    let mut m = DMatrix::zeros(d + 1, d + 1);
    m[(0, 0)] = gamma;
    for i in 0..d {
        m[(0, i + 1)] = -gamma * beta * n[i];
        m[(i + 1, 0)] = -gamma * beta * n[i];
        for j in 0..d {
            let delta = if i == j { 1.0 } else { 0.0 };
            m[(i + 1, j + 1)] = delta + (gamma - 1.0) * n[i] * n[j];
        }
    }
    Ok(ProjectiveMap::from_matrix_unchecked(m))
}

/// `x ↦ x / (√d · (d + 1 + Σxᵢ))`: sends the orthant-shifted cone
/// `(−1, ∞)^d` into the unit ball with `0 ↦ 0`.
pub fn frankel_phi(d: usize) -> ProjectiveMap {
    assert!(d >= 1, "dimension must be positive");
    let sd = (d as f64).sqrt();
    let mut m = DMatrix::zeros(d + 1, d + 1);
    m[(0, 0)] = sd * (d as f64 + 1.0);
    for i in 0..d {
        m[(0, i + 1)] = sd;
        m[(i + 1, i + 1)] = 1.0;
    }
    ProjectiveMap::from_matrix_unchecked(m)
}

/// `y ↦ (δ(y₁ − 1), √δ·y′) / (1 + y₁)`: sends the unit ball onto the
/// paraboloid `{x₁ < −‖x′‖²}` and the origin to `(−δ, 0, …, 0)`.
pub fn phi_delta(delta: f64, d: usize) -> Result<ProjectiveMap> {
    if !(delta > 0.0) || d == 0 {
        return Err(Error::InvalidBody(format!("phi_delta needs delta > 0 and d >= 1, got {delta}")));
    }
    let mut m = DMatrix::zeros(d + 1, d + 1);
    m[(0, 0)] = 1.0;
    m[(0, 1)] = 1.0;
    m[(1, 0)] = -delta;
    m[(1, 1)] = delta;
    let sq = delta.sqrt();
    for i in 2..=d {
        m[(i, i)] = sq;
    }
    ProjectiveMap::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn identity_apply() {
        let id = ProjectiveMap::identity(2);
        let p = dvector![0.3, -0.4];
        assert!((id.apply(&p).unwrap() - p).norm() < 1e-15);
    }

    #[test]
    fn frankel_phi_fixes_origin() {
        for d in 1..=5 {
            let phi = frankel_phi(d);
            assert!(phi.apply(&DVector::zeros(d)).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn phi_delta_sends_origin_to_minus_delta() {
        let phi = phi_delta(0.1, 2).unwrap();
        let img = phi.apply(&dvector![0.0, 0.0]).unwrap();
        assert!((img - dvector![-0.1, 0.0]).norm() < 1e-15);
    }

    #[test]
    fn phi_delta_printed_formula() {
        let phi = phi_delta(0.01, 2).unwrap();
        let img = phi.apply(&dvector![0.5, 0.1]).unwrap();
        assert!((img[0] + 1.0 / 300.0).abs() < 1e-15);
        assert!((img[1] - 1.0 / 150.0).abs() < 1e-15);
    }

    #[test]
    fn scale_after_translate() {
        let v = dvector![0.25, -1.5];
        let f = ProjectiveMap::scaling(2.0, 2).unwrap().compose(&ProjectiveMap::translation(&v));
        let img = f.apply(&dvector![0.0, 0.0]).unwrap();
        assert!((img - 2.0 * v).norm() < 1e-14);
    }

    #[test]
    fn inverse_of_identity() {
        let id = ProjectiveMap::identity(3);
        assert!(id.inverse().unwrap().approx_eq(&id, 1e-15));
    }

    #[test]
    fn frankel_inverse_closed_form() {
        let phi = frankel_phi(2);
        let x = dvector![0.5, 0.5];
        let y = phi.apply(&x).unwrap();
        let back = phi.inverse().unwrap().apply(&y).unwrap();
        assert!((back - &x).norm() < 1e-14);
        // Φ⁻¹(y) = √d(d+1) y / (1 − √d Σy)
        let sd = 2f64.sqrt();
        let closed = &y * (sd * 3.0 / (1.0 - sd * y.sum()));
        assert!((closed - x).norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(ProjectiveMap::new(m), Err(Error::SingularMap));
    }

    #[test]
    fn image_at_infinity() {
        // x ↦ x / (1 - x): x = 1 goes to infinity
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 0.0, 1.0]);
        let f = ProjectiveMap::new(m).unwrap();
        assert_eq!(f.apply(&dvector![1.0]), Err(Error::ImageAtInfinity));
    }

    #[test]
    fn affine_differential_is_linear_part() {
        let lin = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, -0.5, 3.0]);
        let f = ProjectiveMap::affine(&lin, &dvector![1.0, -2.0]).unwrap();
        for p in [dvector![0.0, 0.0], dvector![3.0, -7.0]] {
            assert!((f.differential(&p).unwrap() - &lin).amax() < 1e-12);
        }
    }

    #[test]
    fn cross_ratio_half_interval() {
        let cr = cross_ratio(&dvector![-1.0, 0.0], &dvector![0.0, 0.0], &dvector![0.5, 0.0], &dvector![1.0, 0.0])
            .unwrap();
        assert!((cr - 3.0).abs() < 1e-14);
        assert!((cr.ln() - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn cross_ratio_coincident_middle() {
        let p = dvector![0.2, 0.1];
        let cr = cross_ratio(&dvector![-1.0, 0.1], &p, &p, &dvector![1.0, 0.1]).unwrap();
        assert!((cr - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cross_ratio_rejects_non_collinear() {
        let r = cross_ratio(&dvector![-1.0, 0.0], &dvector![0.0, 0.1], &dvector![0.5, 0.0], &dvector![1.0, 0.0]);
        assert_eq!(r, Err(Error::NotCollinear));
    }

    #[test]
    fn ball_automorphism_at_origin_is_identity() {
        let t = ball_automorphism(&dvector![0.0, 0.0, 0.0]).unwrap();
        assert!(t.approx_eq(&ProjectiveMap::identity(3), 1e-15));
    }

    #[test]
    fn ball_automorphism_rejects_boundary() {
        assert_eq!(ball_automorphism(&dvector![1.0, 0.0]), Err(Error::OutsideBall));
    }

    #[test]
    fn homogeneous_equality_up_to_scale() {
        let a = HomogeneousPoint::new(dvector![1.0, 2.0, -3.0]).unwrap();
        let b = HomogeneousPoint::new(dvector![-2.0, -4.0, 6.0]).unwrap();
        assert!(a.approx_eq(&b, 1e-15));
        assert!(HomogeneousPoint::new(dvector![0.0, 0.0]).is_err());
    }
}
