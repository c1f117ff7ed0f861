//! Explicit witness maps: affine recentering, ball automorphisms, the
//! boundary-frame construction for strictly convex points, and a polar-centroid
//! normalization used to seed the optimizer.

use nalgebra::{DMatrix, DVector};

use super::radii::{certify, circumradius_at_origin, SqueezeWitness, CERT_DIRECTIONS};
use crate::directions::unit_directions;
use crate::domains::{
    monotone_chain, normalize_boundary_frame, polygon_area_centroid, polygon_second_moment, Body, EllipsoidBody,
};
use crate::error::{Error, Result};
use crate::projective::{ball_automorphism, phi_delta, AffinePoint, ProjectiveMap};

/// `Φ = scale(1/R) ∘ translate(−z)`, `R` the circumradius at `z`.
pub fn witness_recenter_scale(body: &Body, z: &AffinePoint) -> Result<SqueezeWitness> {
    if !body.contains(z) {
        return Err(Error::PointNotInterior);
    }
    let shift = ProjectiveMap::translation(&(-z));
    let r = circumradius_at_origin(&body.clone().transformed(shift.clone())?, CERT_DIRECTIONS)?;
    let map = ProjectiveMap::scaling(1.0 / r.value, z.len())?.compose(&shift);
    certify(body, z, &map, CERT_DIRECTIONS, 0)
}

/// The ball automorphism moving `z` to the centre, certified with `samples`
/// directions.
pub fn witness_ball_point(z: &AffinePoint, samples: usize) -> Result<SqueezeWitness> {
    let map = ball_automorphism(z)?;
    certify(&EllipsoidBody::unit_ball(z.len()).into(), z, &map, samples, 0)
}

/// Affine normalization of the ellipsoid to the unit ball, then the ball
/// automorphism at the image of `z`.
pub fn witness_ellipsoid_point(e: &EllipsoidBody, z: &AffinePoint, samples: usize) -> Result<SqueezeWitness> {
    let body: Body = e.clone().into();
    if !body.contains(z) {
        return Err(Error::PointNotInterior);
    }
    let l = e.normalizing_linear();
    let normalize = ProjectiveMap::affine(&l, &(-(&l * e.center())))?;
    let w = normalize.apply(z)?;
    let map = ball_automorphism(&w)?.compose(&normalize);
    certify(&body, z, &map, samples, 0)
}

/// `Φ = φ_δ⁻¹ ∘ N` with `N` the normalized frame at the boundary point
/// nearest `q`; sends `q` to 0 and the osculating paraboloid to the unit ball.
pub fn witness_strictly_convex(body: &Body, q: &AffinePoint) -> Result<SqueezeWitness> {
    let frame = normalize_boundary_frame(body, q)?;
    let map = phi_delta(frame.delta, body.dim())?.inverse()?.compose(&frame.map);
    // cleanup: the image of q is 0 up to rounding; translate it back exactly
    let y = map.apply(q)?;
    let map = ProjectiveMap::translation(&(-y)).compose(&map);
    let w = certify(body, q, &map, CERT_DIRECTIONS, 0)?;
    let scale = ProjectiveMap::scaling(1.0 / w.r_out, body.dim())?;
    certify(body, q, &scale.compose(&map), CERT_DIRECTIONS, 0)
}

/// Points of the polar body `(D − z)° = {y : y·x < 1 ∀x ∈ D − z}` used for the
/// seed: exact vertices for polytopes (the origin joins them when `D` is
/// unbounded), otherwise the polar of the hull of sampled boundary points.
pub(crate) fn polar_vertices(body: &Body) -> Option<Vec<DVector<f64>>> {
    let d = body.dim();
    if let Some(p) = body.as_polytope() {
        let mut v: Vec<DVector<f64>> = (0..p.a().nrows())
            .map(|i| p.a().row(i).transpose() / p.b()[i])
            .collect();
        if !p.is_bounded() {
            v.push(DVector::zeros(d));
        }
        return Some(if d == 2 { monotone_chain(&v) } else { v });
    }
    let origin = DVector::zeros(d);
    let pts = body.boundary_from(&origin, &unit_directions(d, 1024));
    if pts.len() < d + 1 {
        return None;
    }
    if d != 2 {
        // not a vertex set: sampled polar boundary points `u/h(u)` with h
        // the sampled support function
        return Some(
            unit_directions(d, 1024)
                .into_iter()
                .filter_map(|u| {
                    let h = pts.iter().map(|x| u.dot(x)).fold(f64::NEG_INFINITY, f64::max);
                    (h > 0.0).then(|| u / h)
                })
                .collect(),
        );
    }
    // vertices of the polar polygon are the duals of consecutive hull edges
    let hull = monotone_chain(&pts);
    let m = hull.len();
    if m < 3 {
        return None;
    }
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let (x, y) = (&hull[k], &hull[(k + 1) % m]);
        let det = x[0] * y[1] - x[1] * y[0];
        if det.abs() < 1e-300 {
            continue;
        }
        out.push(DVector::from_vec(vec![(y[1] - x[1]) / det, (x[0] - y[0]) / det]));
    }
    Some(monotone_chain(&out))
}

/// One normalization step on a body containing 0: `a = −centroid(D°)` moves
/// the polar centroid to the origin, then the linear part puts the polar body
/// in isotropic position. Returns the block map `y ↦ By/(1 + a·y)`.
fn polar_step(body: &Body) -> Option<ProjectiveMap> {
    let d = body.dim();
    let v = polar_vertices(body)?;
    let (centroid, moment) = if d == 2 {
        let (area, c) = polygon_area_centroid(&v);
        if !(area > 0.0) {
            return None;
        }
        let shifted: Vec<DVector<f64>> = v.iter().map(|x| x - &c).collect();
        (c, polygon_second_moment(&shifted) / area)
    } else {
        let n = v.len() as f64;
        let c = v.iter().fold(DVector::zeros(d), |s, x| s + x) / n;
        let m = v.iter().fold(DMatrix::zeros(d, d), |s, x| {
            let y = x - &c;
            s + &y * y.transpose()
        }) / n;
        (c, m)
    };
    // (B D)° = B⁻ᵀ D°, whose second moment B⁻ᵀ M B⁻¹ is the identity for B = M^{1/2}
    let eig = moment.symmetric_eigen();
    if eig.eigenvalues.min() <= 0.0 {
        return None;
    }
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * eig.eigenvectors.transpose();
    let a = -centroid;
    ProjectiveMap::new(super::chart::block(&a, &root)).ok()
}

/// Projectively canonical seed at `z`: repeated polar-centroid steps (one for
/// polytopes, where the polar is exact), scaled to circumradius 1.
pub fn polar_centroid_seed(body: &Body, z: &AffinePoint) -> Result<SqueezeWitness> {
    if !body.contains(z) {
        return Err(Error::PointNotInterior);
    }
    let d = body.dim();
    let mut map = ProjectiveMap::translation(&(-z));
    let steps = if body.as_polytope().is_some() { 1 } else { 3 };
    for _ in 0..steps {
        let image = body.clone().transformed(map.clone())?;
        let Some(step) = polar_step(&image) else { break };
        // reject steps whose singular hyperplane meets the body
        let Ok(next_image) = image.transformed(step.clone()) else { break };
        if !next_image.is_bounded() {
            break;
        }
        map = step.compose(&map);
    }
    let image = body.clone().transformed(map.clone())?;
    let r = circumradius_at_origin(&image, CERT_DIRECTIONS)?;
    let map = ProjectiveMap::scaling(1.0 / r.value, d)?.compose(&map);
    certify(body, z, &map, CERT_DIRECTIONS, 0)
}
