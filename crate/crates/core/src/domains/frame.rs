//! Normalized coordinates at a boundary point: the point goes to 0, the
//! outward normal to `e₁`, the body lies in `{x₁ > −1}` and the boundary is the
//! graph `x₁ = −‖x′‖² + o(‖x′‖²)`.

use nalgebra::{DMatrix, DVector};

use super::Body;
use crate::directions::unit_directions;
use crate::error::{Error, Result};
use crate::projective::{AffinePoint, ProjectiveMap};

/// Smallest tangential curvature accepted as strictly convex.
const STRICT_CONVEXITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct BoundaryFrame {
    /// Affine map `N` into normalized coordinates.
    pub map: ProjectiveMap,
    /// `N(q) = (−δ, 0, …, 0)`.
    pub delta: f64,
    /// Nearest boundary point `p_q`.
    pub boundary_point: AffinePoint,
    /// Outward unit normal at `p_q`.
    pub normal: DVector<f64>,
    /// Width of the body along `−normal` (∞ for unbounded bodies, in which
    /// case `x₁` is not rescaled).
    pub depth: f64,
}

/// Gradient and Hessian of the defining function of a smooth body.
fn derivatives(body: &Body, x: &DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    match body {
        Body::Ellipsoid(e) => Ok((e.gradient(x), e.hessian())),
        Body::LevelSet(l) => Ok((l.function().gradient(x), l.function().hessian(x))),
        _ => Err(Error::UnsupportedBody("boundary frames need a smooth defining function")),
    }
}

/// Orthonormal basis of the complement of a unit vector.
fn tangent_basis(n: &DVector<f64>) -> DMatrix<f64> {
    let d = n.len();
    let mut full = DMatrix::identity(d, d);
    full.set_column(0, n);
    let q = full.qr().q();
    q.columns(1, d - 1).into_owned()
}

/// Nearest boundary point to `q` by the fixed point `x = q + exit(q, ν̂(x))ν̂(x)`.
fn nearest_boundary_point(body: &Body, q: &AffinePoint) -> Result<(AffinePoint, DVector<f64>, f64)> {
    let (mut n, _) = derivatives(body, q)?;
    if n.norm() == 0.0 {
        // q at a critical point of g: start from the closest sampled boundary point
        let dirs = unit_directions(body.dim(), 256);
        n = dirs
            .into_iter()
            .min_by(|a, b| body.exit_time(q, a).total_cmp(&body.exit_time(q, b)))
            .expect("nonempty");
    }
    n = n.normalize();
    for _ in 0..500 {
        let s = body.exit_time(q, &n);
        if !s.is_finite() {
            return Err(Error::NoUniqueProjection);
        }
        let x = q + &n * s;
        let (g, _) = derivatives(body, &x)?;
        let next = g.normalize();
        if (&next - &n).norm() < 1e-13 {
            return Ok((x, next, s));
        }
        n = next;
    }
    Err(Error::NoUniqueProjection)
}

/// Affine map into normalized coordinates at the boundary point nearest `q`.
pub fn normalize_boundary_frame(body: &Body, q: &AffinePoint) -> Result<BoundaryFrame> {
    let d = body.dim();
    if d < 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    if !body.contains(q) {
        return Err(Error::PointNotInterior);
    }
    let (p, nu, s) = nearest_boundary_point(body, q)?;
    // any other boundary point strictly closer rules out the projection
    for u in unit_directions(d, 1024) {
        if body.exit_time(q, &u) < s * (1.0 - 1e-9) {
            return Err(Error::NoUniqueProjection);
        }
    }
    let (g, h) = derivatives(body, &p)?;
    let t = tangent_basis(&nu);
    // second fundamental form: the boundary is x₁ = −½ x′ᵀKx′ + …
    let k = t.transpose() * &h * &t / g.norm();
    let k = (&k + k.transpose()) * 0.5;
    let eig = k.clone().symmetric_eigen();
    if eig.eigenvalues.min() <= STRICT_CONVEXITY_TOL {
        return Err(Error::NotStrictlyConvex);
    }
    let depth = support(body, &(-&nu)) + nu.dot(&p);
    let alpha = if depth.is_finite() { depth } else { 1.0 };
    // x₁ ↦ x₁/α, x′ ↦ (K/2α)^{1/2} x′ turns the boundary into x₁ = −‖x′‖² + …
    let root = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (l / (2.0 * alpha)).sqrt()))
        * eig.eigenvectors.transpose();
    let mut linear = DMatrix::zeros(d, d);
    linear.row_mut(0).copy_from(&(nu.transpose() / alpha));
    linear.view_mut((1, 0), (d - 1, d)).copy_from(&(&root * t.transpose()));
    let offset = -(&linear * &p);
    let map = ProjectiveMap::affine(&linear, &offset)?;
    Ok(BoundaryFrame { map, delta: s / alpha, boundary_point: p, normal: nu, depth })
}

/// `sup{u·x : x ∈ D}`: exact for ellipsoids and polytopes, otherwise the best
/// sampled boundary point refined by the normal fixed point.
fn support(body: &Body, u: &DVector<f64>) -> f64 {
    match body {
        Body::Ellipsoid(e) => return e.support(u),
        Body::Polytope(p) => return p.support(u),
        _ => {}
    }
    let w = body.interior_point();
    let dirs = unit_directions(body.dim(), 4096);
    let mut best = f64::NEG_INFINITY;
    let mut best_dir = dirs[0].clone();
    for v in &dirs {
        let t = body.exit_time(&w, v);
        if t.is_infinite() {
            if v.dot(u) > 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        let val = u.dot(&(&w + v * t));
        if val > best {
            best = val;
            best_dir = v.clone();
        }
    }
    // refine: the maximizer is where the outward normal equals u
    let mut dir = best_dir;
    for _ in 0..100 {
        let t = body.exit_time(&w, &dir);
        let x = &w + &dir * t;
        best = best.max(u.dot(&x));
        let Ok((g, h)) = derivatives(body, &x) else { break };
        // Newton step on the boundary toward the point with normal u
        let gn = g.norm();
        let nrm = &g / gn;
        let resid = u - &nrm * nrm.dot(u);
        if resid.norm() < 1e-14 {
            break;
        }
        let curv = h.symmetric_eigen().eigenvalues.max() / gn;
        let target = &x + resid / curv.max(1e-12);
        let next = (&target - &w).normalize();
        if (&next - &dir).norm() < 1e-15 {
            break;
        }
        dir = next;
    }
    best
}

/// Convex minorant of the normalized boundary: `(1−ε)‖x′‖²` inside radius `r`, continued by
/// its tangent cone `(1−ε)r(2‖x′‖ − r)` outside.
pub fn minorant_f_tilde(eps: f64, r: f64, xprime: &DVector<f64>) -> f64 {
    let n = xprime.norm();
    if n <= r {
        (1.0 - eps) * n * n
    } else {
        (1.0 - eps) * r * (2.0 * n - r)
    }
}

/// Largest `r` in `{r₀, r₀/2, …}` with `f ≥ f̃_{ε,r}` on a radial grid of
/// `{‖x′‖ ≤ extent}`; `None` if none down to `r₀·2⁻⁴⁰` works.
pub fn minorant_radius(f: impl Fn(&DVector<f64>) -> f64, dim: usize, eps: f64, r0: f64, extent: f64) -> Option<f64> {
    let dirs = unit_directions(dim, if dim == 1 { 2 } else { 64 });
    let radii: Vec<f64> = (1..=200).map(|k| extent * k as f64 / 200.0).collect();
    let mut r = r0;
    for _ in 0..40 {
        let ok = dirs.iter().all(|u| {
            radii.iter().chain(std::iter::once(&r)).all(|&t| {
                let x = u * t.min(extent);
                f(&x) >= minorant_f_tilde(eps, r, &x) - 1e-15
            })
        });
        if ok {
            return Some(r);
        }
        r *= 0.5;
    }
    None
}

/// Graph function of the normalized body near 0: `f(y′) = −sup{y₁ : (y₁, y′) ∈ N(D)}`.
pub fn frame_profile(body: &Body, frame: &BoundaryFrame) -> Result<impl Fn(&DVector<f64>) -> f64> {
    let image = body.clone().transformed(frame.map.clone())?;
    let d = body.dim();
    let mut e1 = DVector::zeros(d);
    e1[0] = 1.0;
    Ok(move |yp: &DVector<f64>| {
        let mut y = DVector::zeros(d);
        y.rows_mut(1, d - 1).copy_from(yp);
        match image.line_interval(&y, &e1) {
            Some((_, hi)) => -hi,
            None => f64::INFINITY,
        }
    })
}
