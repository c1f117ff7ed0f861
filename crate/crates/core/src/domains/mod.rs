//! Open bodies in ℝ^d with membership and ray-exit oracles.

mod ellipsoid;
mod frame;
mod hull;
mod levelset;
mod polytope;
pub mod spec;

use nalgebra::DVector;

use crate::directions::unit_directions;
use crate::error::{Error, Result};
use crate::projective::{homogenize, AffinePoint, ProjectiveMap, TangentVector};

pub use ellipsoid::EllipsoidBody;
pub use frame::{frame_profile, minorant_f_tilde, minorant_radius, normalize_boundary_frame, BoundaryFrame};
pub use hull::{monotone_chain, polygon_area_centroid, polygon_second_moment, polygon_to_polytope, polygon_vertices};
pub use levelset::{
    DefiningFunction, GraphFunction, GraphProfile, LevelSetBody, ParaboloidProfile, Quartic, QuarticProfile,
};
pub use polytope::HalfspacePolytope;

/// Directions used by sampled (non-exact) body queries.
const SAMPLED_DIRECTIONS: usize = 512;
/// Minimum relative weight of boundary points under a transforming map.
const HYPERPLANE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum Body {
    Polytope(HalfspacePolytope),
    Ellipsoid(EllipsoidBody),
    LevelSet(LevelSetBody),
    Union(UnionBody),
    Intersection(IntersectionBody),
    Transformed(TransformedBody),
}

impl From<HalfspacePolytope> for Body {
    fn from(p: HalfspacePolytope) -> Self {
        Body::Polytope(p)
    }
}

impl From<EllipsoidBody> for Body {
    fn from(e: EllipsoidBody) -> Self {
        Body::Ellipsoid(e)
    }
}

impl From<LevelSetBody> for Body {
    fn from(l: LevelSetBody) -> Self {
        Body::LevelSet(l)
    }
}

impl Body {
    pub fn dim(&self) -> usize {
        match self {
            Body::Polytope(p) => p.dim(),
            Body::Ellipsoid(e) => e.dim(),
            Body::LevelSet(l) => l.dim(),
            Body::Union(u) => u.parts[0].dim(),
            Body::Intersection(i) => i.parts[0].dim(),
            Body::Transformed(t) => t.base.dim(),
        }
    }

    /// Strict membership.
    pub fn contains(&self, x: &AffinePoint) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            Body::Polytope(p) => p.contains(x),
            Body::Ellipsoid(e) => e.contains(x),
            Body::LevelSet(l) => l.contains(x),
            Body::Union(u) => u.parts.iter().any(|b| b.contains(x)),
            Body::Intersection(i) => i.parts.iter().all(|b| b.contains(x)),
            Body::Transformed(t) => t.inverse.apply(x).map(|y| t.base.contains(&y)).unwrap_or(false),
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Body::Union(_) => false,
            Body::Transformed(t) => t.base.is_convex(),
            _ => true,
        }
    }

    /// A point known to lie inside.
    pub fn interior_point(&self) -> AffinePoint {
        match self {
            Body::Polytope(p) => p.witness().clone(),
            Body::Ellipsoid(e) => e.center().clone(),
            Body::LevelSet(l) => l.witness().clone(),
            Body::Union(u) => u.parts[0].interior_point(),
            Body::Intersection(i) => i.witness.clone(),
            Body::Transformed(t) => t.map.apply(&t.base.interior_point()).expect("validated at construction"),
        }
    }

    /// `inf{λ > 0 : p + λX ∉ D}`, or `+∞`.
    pub fn ray_exit(&self, p: &AffinePoint, x: &TangentVector) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        if !self.contains(p) {
            return Err(Error::PointNotInterior);
        }
        Ok(self.exit_time(p, x))
    }

    /// Ray exit without the membership check; `p` is assumed interior.
    pub fn exit_time(&self, p: &AffinePoint, x: &TangentVector) -> f64 {
        match self {
            Body::Polytope(b) => b.ray_exit(p, x),
            Body::Ellipsoid(b) => b.ray_exit(p, x),
            Body::LevelSet(b) => b.ray_exit(p, x),
            Body::Intersection(b) => b.parts.iter().map(|q| q.exit_time(p, x)).fold(f64::INFINITY, f64::min),
            Body::Union(b) => b.exit_time(p, x),
            Body::Transformed(b) => b.exit_time(p, x),
        }
    }

    /// Open parameter interval `{λ : p + λX ∈ D}` for convex bodies.
    pub fn line_interval(&self, p: &AffinePoint, x: &TangentVector) -> Option<(f64, f64)> {
        match self {
            Body::Polytope(b) => b.line_interval(p, x),
            Body::Ellipsoid(b) => b.line_interval(p, x),
            Body::LevelSet(b) => b.line_interval(p, x),
            Body::Intersection(b) => {
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for part in &b.parts {
                    let (l, h) = part.line_interval(p, x)?;
                    lo = lo.max(l);
                    hi = hi.min(h);
                }
                (lo < hi).then_some((lo, hi))
            }
            Body::Transformed(b) => b.line_interval(p, x),
            Body::Union(_) => None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            Body::Polytope(p) => p.is_bounded(),
            Body::Ellipsoid(_) => true,
            Body::LevelSet(l) => l.is_bounded() || sampled_exits(self, l.witness()).iter().all(|t| t.is_finite()),
            Body::Union(u) => u.parts.iter().all(Body::is_bounded),
            Body::Intersection(i) => {
                i.parts.iter().any(Body::is_bounded) || sampled_exits(self, &i.witness).iter().all(|t| t.is_finite())
            }
            // the singular hyperplane misses the projective closure of the base
            Body::Transformed(t) => !t.map.is_affine() || t.base.is_bounded(),
        }
    }

    /// No affine line is contained. Exact for polytopes; sampled (opposite
    /// infinite exits from the witness) for unbounded smooth bodies.
    pub fn is_proper(&self) -> bool {
        if let Body::Polytope(p) = self {
            return p.is_proper();
        }
        if self.is_bounded() {
            return true;
        }
        match self {
            Body::Transformed(t) => t.base.is_proper(),
            Body::Union(u) => match u.convex_hull() {
                Ok(h) => h.is_proper(),
                Err(_) => u.parts.iter().all(Body::is_proper),
            },
            Body::Intersection(i) if i.parts.iter().any(Body::is_proper) => true,
            _ => {
                let w = self.interior_point();
                let dirs = unit_directions(self.dim(), SAMPLED_DIRECTIONS);
                !dirs.iter().any(|u| self.exit_time(&w, u).is_infinite() && self.exit_time(&w, &(-u)).is_infinite())
            }
        }
    }

    /// The open convex hull: the body itself when convex, exact for planar
    /// unions of polygons.
    pub fn convex_hull(&self) -> Result<Body> {
        match self {
            Body::Union(u) => u.convex_hull().map(Body::Polytope),
            _ => Ok(self.clone()),
        }
    }

    /// Exact half-space form if the body is (a projective image of) a polytope.
    pub fn as_polytope(&self) -> Option<HalfspacePolytope> {
        match self {
            Body::Polytope(p) => Some(p.clone()),
            Body::Transformed(t) => t.base.as_polytope().and_then(|p| p.pushforward(&t.map).ok()),
            _ => None,
        }
    }

    pub fn transformed(self, map: ProjectiveMap) -> Result<Body> {
        TransformedBody::new(self, map).map(Body::Transformed)
    }

    /// Outward normal (not normalized) at a boundary point; `None` for unions.
    pub fn outward_normal(&self, x: &AffinePoint) -> Option<DVector<f64>> {
        match self {
            Body::Polytope(p) => {
                let (i, _) = p.slack(x).argmin();
                Some(p.a().row(i).transpose())
            }
            Body::Ellipsoid(e) => Some(e.gradient(x)),
            Body::LevelSet(l) => Some(l.function().gradient(x)),
            Body::Intersection(i) => {
                let part = i.parts.iter().max_by(|a, b| a.boundary_gap(x).total_cmp(&b.boundary_gap(x)))?;
                part.outward_normal(x)
            }
            Body::Transformed(t) => {
                let y = t.inverse.apply(x).ok()?;
                let n = t.base.outward_normal(&y)?;
                Some(t.inverse.differential(x).ok()?.transpose() * n)
            }
            Body::Union(_) => None,
        }
    }

    /// First-order signed distance to the boundary (positive outside).
    fn boundary_gap(&self, x: &AffinePoint) -> f64 {
        match self {
            Body::Polytope(p) => -p.slack(x).min(),
            Body::Ellipsoid(e) => e.value(x) / e.gradient(x).norm().max(1e-300),
            Body::LevelSet(l) => l.value(x) / l.function().gradient(x).norm().max(1e-300),
            Body::Intersection(i) => i.parts.iter().map(|p| p.boundary_gap(x)).fold(f64::NEG_INFINITY, f64::max),
            Body::Transformed(t) => t.inverse.apply(x).map(|y| t.base.boundary_gap(&y)).unwrap_or(f64::INFINITY),
            Body::Union(u) => u.parts.iter().map(|p| p.boundary_gap(x)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Boundary points hit from `p` along each direction (∞ rays skipped).
    pub fn boundary_from(&self, p: &AffinePoint, dirs: &[DVector<f64>]) -> Vec<AffinePoint> {
        dirs.iter()
            .filter_map(|u| {
                let t = self.exit_time(p, u);
                t.is_finite().then(|| p + u * t)
            })
            .collect()
    }
}

fn sampled_exits(body: &Body, p: &AffinePoint) -> Vec<f64> {
    unit_directions(body.dim(), SAMPLED_DIRECTIONS).iter().map(|u| body.exit_time(p, u)).collect()
}

/// Union of convex parts; membership is "any part contains".
#[derive(Debug, Clone)]
pub struct UnionBody {
    parts: Vec<Body>,
}

impl UnionBody {
    pub fn new(parts: Vec<Body>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidBody("union needs at least one part".into()));
        };
        let d = first.dim();
        for p in &parts {
            if p.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
            }
            if !p.is_convex() {
                return Err(Error::InvalidBody("union parts must be convex".into()));
            }
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[Body] {
        &self.parts
    }

    /// End of the connected component of `{λ ≥ 0 : p + λX ∈ D}` containing 0.
    fn exit_time(&self, p: &AffinePoint, x: &TangentVector) -> f64 {
        let intervals: Vec<(f64, f64)> = self.parts.iter().filter_map(|b| b.line_interval(p, x)).collect();
        let mut reach = 0.0;
        loop {
            let mut grown = false;
            for &(lo, hi) in &intervals {
                if lo < reach && hi > reach {
                    reach = hi;
                    grown = true;
                }
            }
            if !grown || reach.is_infinite() {
                return reach;
            }
        }
    }

    /// Exact hull of a planar union of polygons.
    pub fn convex_hull(&self) -> Result<HalfspacePolytope> {
        let d = self.parts[0].dim();
        if d != 2 {
            return Err(Error::UnsupportedDimension(d));
        }
        let mut pts = Vec::new();
        for part in &self.parts {
            match part.as_polytope() {
                Some(p) if p.is_bounded() => pts.extend(p.vertices().iter().cloned()),
                Some(_) => return Err(Error::Unbounded),
                None => return Err(Error::UnsupportedBody("hull of a smooth union")),
            }
        }
        HalfspacePolytope::from_points_2d(&pts)
    }
}

/// Intersection of convex parts.
#[derive(Debug, Clone)]
pub struct IntersectionBody {
    parts: Vec<Body>,
    witness: AffinePoint,
}

impl IntersectionBody {
    /// Uses the first part witness lying in every part unless one is given.
    pub fn new(parts: Vec<Body>, witness: Option<AffinePoint>) -> Result<Self> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidBody("intersection needs at least one part".into()));
        };
        let d = first.dim();
        if parts.iter().any(|p| p.dim() != d) {
            return Err(Error::InvalidBody("intersection parts differ in dimension".into()));
        }
        if parts.iter().any(|p| !p.is_convex()) {
            return Err(Error::InvalidBody("intersection parts must be convex".into()));
        }
        let inside = |x: &AffinePoint| parts.iter().all(|p| p.contains(x));
        let witness = match witness {
            Some(w) if inside(&w) => w,
            Some(_) => return Err(Error::InvalidBody("witness is not inside every part".into())),
            None => {
                let mut candidates: Vec<AffinePoint> = parts.iter().map(Body::interior_point).collect();
                let mean = candidates.iter().fold(DVector::zeros(d), |acc, w| acc + w) / candidates.len() as f64;
                candidates.push(mean);
                candidates
                    .into_iter()
                    .find(|w| inside(w))
                    .ok_or_else(|| Error::InvalidBody("no part witness lies in the intersection".into()))?
            }
        };
        Ok(Self { parts, witness })
    }

    pub fn parts(&self) -> &[Body] {
        &self.parts
    }
}

/// The image `Φ(base)` of a body whose closure misses the singular hyperplane
/// of `Φ`.
#[derive(Debug, Clone)]
pub struct TransformedBody {
    base: Box<Body>,
    map: ProjectiveMap,
    inverse: ProjectiveMap,
}

impl TransformedBody {
    pub fn new(base: Body, map: ProjectiveMap) -> Result<Self> {
        if map.dim() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), got: map.dim() });
        }
        let inverse = map.inverse()?;
        if !map.is_affine() {
            check_hyperplane(&base, &map)?;
        }
        Ok(Self { base: Box::new(base), map, inverse })
    }

    pub fn base(&self) -> &Body {
        &self.base
    }

    pub fn map(&self) -> &ProjectiveMap {
        &self.map
    }

    pub fn inverse(&self) -> &ProjectiveMap {
        &self.inverse
    }

    /// Pulls the ray back to the base: `Φ⁻¹(p + λX) = q + μ(λ)Y` with
    /// `μ = λ/(1 + kλ)`.
    fn pullback(&self, p: &AffinePoint, x: &TangentVector) -> Option<(AffinePoint, TangentVector, f64)> {
        let m = self.inverse.matrix();
        let u = m * homogenize(p);
        let mut hx = DVector::zeros(x.len() + 1);
        hx.rows_mut(1, x.len()).copy_from(x);
        let v = m * hx;
        let u0 = u[0];
        if u0.abs() < 1e-300 {
            return None;
        }
        let d = x.len();
        let up = u.rows(1, d);
        let vp = v.rows(1, d);
        let q = up / u0;
        let y = (vp * u0 - up * v[0]) / (u0 * u0);
        Some((q, y, v[0] / u0))
    }

    fn exit_time(&self, p: &AffinePoint, x: &TangentVector) -> f64 {
        let Some((q, y, k)) = self.pullback(p, x) else {
            return 0.0;
        };
        let mu = self.base.exit_time(&q, &y);
        lambda_of_mu(mu, k).unwrap_or(f64::INFINITY)
    }

    fn line_interval(&self, p: &AffinePoint, x: &TangentVector) -> Option<(f64, f64)> {
        let (q, y, k) = self.pullback(p, x)?;
        let (lo, hi) = self.base.line_interval(&q, &y)?;
        Some((lambda_of_mu(lo, k)?, lambda_of_mu(hi, k)?))
    }
}

/// Inverse of `μ = λ/(1 + kλ)` on the branch through 0.
fn lambda_of_mu(mu: f64, k: f64) -> Option<f64> {
    if mu.is_infinite() {
        if k == 0.0 {
            return Some(mu);
        }
        // the base point at infinity maps to a finite point
        let l = -1.0 / k;
        return (l.signum() == mu.signum()).then_some(l);
    }
    let den = 1.0 - mu * k;
    (den > 0.0).then(|| mu / den)
}

/// Rejects maps whose singular hyperplane meets the closure of `base`
/// (checked on vertices/recession rays of polytopes, sampled boundary
/// points and ideal points otherwise).
fn check_hyperplane(base: &Body, map: &ProjectiveMap) -> Result<()> {
    let m = map.matrix();
    let d = base.dim();
    let row0 = m.row(0).transpose();
    let weight = |p: &AffinePoint| {
        let h = homogenize(p);
        row0.dot(&h) / (m * &h).norm()
    };
    let ideal_weight = |u: &DVector<f64>| {
        let w = row0.rows(1, d).dot(u);
        let img = m.columns(1, d) * u;
        w / img.norm()
    };
    let sign = weight(&base.interior_point()).signum();
    let ok = |w: f64| w * sign > HYPERPLANE_MARGIN;
    if let Body::Union(u) = base {
        return u.parts.iter().try_for_each(|p| check_hyperplane(p, map));
    }
    if let Some(poly) = base.as_polytope() {
        if poly.vertices().iter().all(|v| ok(weight(v)))
            && poly.recession_rays().iter().all(|r| ok(ideal_weight(r)))
            && poly.is_proper()
        {
            return Ok(());
        }
        return Err(Error::SingularHyperplaneCrossing);
    }
    let w = base.interior_point();
    let n = if d <= 3 { 4 * SAMPLED_DIRECTIONS } else { SAMPLED_DIRECTIONS };
    for u in unit_directions(d, n) {
        let t = base.exit_time(&w, &u);
        let good = if t.is_finite() { ok(weight(&(&w + &u * t))) } else { ok(ideal_weight(&u)) };
        if !good {
            return Err(Error::SingularHyperplaneCrossing);
        }
    }
    Ok(())
}
