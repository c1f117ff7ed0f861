//! Radii at the origin and witness certification.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::directions::unit_directions;
use crate::domains::{polygon_vertices, Body};
use crate::error::{Error, Result};
use crate::projective::{homogenize, AffinePoint, ProjectiveMap, AT_INFINITY_TOL};

/// Default certification sample count.
pub const CERT_DIRECTIONS: usize = 1 << 12;

/// A radius with the way it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusBound {
    pub value: f64,
    pub exact: bool,
    /// Direction samples used (0 when exact).
    pub samples: usize,
}

/// `sup{r : B(0,r) ⊂ D}`: exact facet distance for polytopes, otherwise the
/// minimum exit over `samples` directions (an upper bound).
pub fn inradius_at_origin(body: &Body, samples: usize) -> Result<RadiusBound> {
    let origin = DVector::zeros(body.dim());
    if !body.contains(&origin) {
        return Err(Error::OriginNotInterior);
    }
    if let Some(poly) = body.as_polytope() {
        return Ok(RadiusBound { value: poly.b().min(), exact: true, samples: 0 });
    }
    let value = unit_directions(body.dim(), samples)
        .iter()
        .map(|u| body.exit_time(&origin, u))
        .fold(f64::INFINITY, f64::min);
    Ok(RadiusBound { value, exact: false, samples })
}

/// `sup{‖x‖ : x ∈ D}`: exact vertex norm for polytopes (and unions of them),
/// otherwise the maximum over sampled boundary points (a lower bound).
pub fn circumradius_at_origin(body: &Body, samples: usize) -> Result<RadiusBound> {
    let origin = DVector::zeros(body.dim());
    if !body.contains(&origin) {
        return Err(Error::OriginNotInterior);
    }
    max_norm(body, samples)
}

fn max_norm(body: &Body, samples: usize) -> Result<RadiusBound> {
    if let Some(poly) = body.as_polytope() {
        if !poly.is_bounded() {
            return Err(Error::Unbounded);
        }
        let value = poly.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
        return Ok(RadiusBound { value, exact: true, samples: 0 });
    }
    if let Body::Union(u) = body {
        let mut out = RadiusBound { value: 0.0, exact: true, samples: 0 };
        for part in u.parts() {
            let r = max_norm(part, samples)?;
            out.value = out.value.max(r.value);
            out.exact &= r.exact;
            out.samples += r.samples;
        }
        return Ok(out);
    }
    let w = body.interior_point();
    let mut value: f64 = 0.0;
    for u in unit_directions(body.dim(), samples) {
        let t = body.exit_time(&w, &u);
        if !t.is_finite() {
            return Err(Error::Unbounded);
        }
        value = value.max((&w + &u * t).norm());
    }
    Ok(RadiusBound { value, exact: false, samples })
}

/// Sampling report behind a witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub z: AffinePoint,
    /// Boundary points examined (0 when exact).
    pub directions: usize,
    pub r_in: f64,
    pub r_out: f64,
    pub exact: bool,
    /// Rigorous ratio from inscribed/circumscribed polygons (planar convex
    /// images), or the exact ratio.
    pub conservative: Option<f64>,
    pub seed: u64,
}

/// A map `Φ` with `Φ(z) = 0` and radii `B(0, r_in) ⊂ Φ(D) ⊂ B(0, r_out)`
/// (sampled unless `certificate.exact`).
#[derive(Debug, Clone)]
pub struct SqueezeWitness {
    pub map: ProjectiveMap,
    pub r_in: f64,
    pub r_out: f64,
    pub certificate: Certificate,
}

impl SqueezeWitness {
    pub fn ratio(&self) -> f64 {
        self.r_in / self.r_out
    }
}

/// Certifies `map` at `z` with `n` image-uniform plus `n` base-uniform
/// directions (exact routes for polytopes).
pub fn certify(body: &Body, z: &AffinePoint, map: &ProjectiveMap, n: usize, seed: u64) -> Result<SqueezeWitness> {
    if !body.contains(z) {
        return Err(Error::PointNotInterior);
    }
    let d = body.dim();
    let origin = DVector::zeros(d);
    let fz = map.apply(z)?;
    if fz.norm() > 1e-10 {
        return Err(Error::InvalidBody(format!("witness map sends z to {fz:?}, not 0")));
    }
    let image = body.clone().transformed(map.clone())?;
    let witness = |r_in: f64, r_out: f64, directions: usize, exact: bool, conservative: Option<f64>| SqueezeWitness {
        map: map.clone(),
        r_in,
        r_out,
        certificate: Certificate { z: z.clone(), directions, r_in, r_out, exact, conservative, seed },
    };
    if let Some(poly) = image.as_polytope() {
        if !poly.is_bounded() {
            return Err(Error::Unbounded);
        }
        let r_in = poly.b().min();
        let r_out = poly.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
        return Ok(witness(r_in, r_out, 0, true, Some(r_in / r_out)));
    }
    // boundary points of the image, with their image angles in 2D
    let mut pts: Vec<DVector<f64>> = Vec::with_capacity(2 * n);
    for u in unit_directions(d, n) {
        let t = image.exit_time(&origin, &u);
        if !t.is_finite() {
            return Err(Error::Unbounded);
        }
        pts.push(u * t);
    }
    for theta in unit_directions(d, n) {
        let rho = body.exit_time(z, &theta);
        let h = if rho.is_finite() {
            homogenize(&(z + &theta * rho))
        } else {
            // ideal boundary point
            theta.clone().insert_row(0, 0.0)
        };
        let img = map.apply_homogeneous(&h);
        if img[0].abs() > AT_INFINITY_TOL * img.norm() {
            pts.push(img.rows(1, d) / img[0]);
        }
    }
    let mut directions = pts.len();
    let mut r_in = pts.iter().map(|y| y.norm()).fold(f64::INFINITY, f64::min);
    let mut r_out = pts.iter().map(|y| y.norm()).fold(0.0, f64::max);
    if d == 2 {
        let mut angles: Vec<f64> = pts.iter().map(|y| y[1].atan2(y[0])).collect();
        angles.sort_by(f64::total_cmp);
        let radius = |psi: f64| image.exit_time(&origin, &DVector::from_vec(vec![psi.cos(), psi.sin()]));
        let (lo, hi) = refine_extremes(&pts, &angles, radius);
        directions += lo.1 + hi.1;
        r_in = r_in.min(lo.0);
        r_out = r_out.max(hi.0);
    }
    if let Body::Union(u) = body {
        // first exits only see the star-shaped part; the hull of all parts bounds r_out
        for part in u.parts() {
            let img = part.clone().transformed(map.clone())?;
            let r = max_norm(&img, n)?;
            r_out = r_out.max(r.value);
            directions += r.samples;
        }
    }
    let conservative = if d == 2 && image.is_convex() { conservative_ratio_2d(&image, &pts) } else { None };
    Ok(witness(r_in, r_out, directions, false, conservative))
}

/// Golden-section refinement of the smallest and largest radius in the angular
/// gaps around the best samples. Returns `((min, evals), (max, evals))`.
fn refine_extremes(pts: &[DVector<f64>], sorted: &[f64], radius: impl Fn(f64) -> f64) -> ((f64, usize), (f64, usize)) {
    let angle = |y: &DVector<f64>| y[1].atan2(y[0]);
    let bracket = |psi: f64| {
        let i = sorted.partition_point(|a| *a < psi);
        let m = sorted.len();
        let prev = if i == 0 { sorted[m - 1] - 2.0 * PI } else { sorted[i - 1] };
        let next = if i + 1 >= m { sorted[(i + 1) % m] + 2.0 * PI } else { sorted[i + 1] };
        let prev = if (prev - psi).abs() < 1e-15 && i >= 2 { sorted[i - 2] } else { prev };
        (prev.min(psi), next.max(psi))
    };
    let golden = |lo: f64, hi: f64, sign: f64| -> (f64, usize) {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut c = b - g * (b - a);
        let mut e = a + g * (b - a);
        let (mut fc, mut fe) = (sign * radius(c), sign * radius(e));
        let mut best = fc.min(fe);
        let mut evals = 2;
        for _ in 0..60 {
            if fc < fe {
                b = e;
                e = c;
                fe = fc;
                c = b - g * (b - a);
                fc = sign * radius(c);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + g * (b - a);
                fe = sign * radius(e);
            }
            evals += 1;
            best = best.min(fc.min(fe));
            if b - a < 1e-14 {
                break;
            }
        }
        (sign * best, evals)
    };
    let norms: Vec<f64> = pts.iter().map(|y| y.norm()).collect();
    let imin = (0..pts.len()).min_by(|&i, &j| norms[i].total_cmp(&norms[j])).expect("nonempty");
    let imax = (0..pts.len()).max_by(|&i, &j| norms[i].total_cmp(&norms[j])).expect("nonempty");
    let (lo_a, lo_b) = bracket(angle(&pts[imin]));
    let (hi_a, hi_b) = bracket(angle(&pts[imax]));
    let lo = golden(lo_a, lo_b, 1.0);
    let hi = golden(hi_a, hi_b, -1.0);
    ((lo.0.min(norms[imin]), lo.1), (hi.0.max(norms[imax]), hi.1))
}

/// Planar convex image: the polygon through the boundary samples is inside
/// (distance to its edges bounds `r_in` below) and the polygon cut out by the
/// tangent lines is outside (its vertex norms bound `r_out` above).
fn conservative_ratio_2d(image: &Body, pts: &[DVector<f64>]) -> Option<f64> {
    let mut samples: Vec<(f64, DVector<f64>, DVector<f64>)> = pts
        .iter()
        .filter_map(|y| {
            let n = image.outward_normal(y)?;
            (n.norm() > 0.0).then(|| (y[1].atan2(y[0]), y.clone(), n.normalize()))
        })
        .collect();
    if samples.len() < 3 {
        return None;
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    samples.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15);
    let m = samples.len();
    let mut r_in = f64::INFINITY;
    for k in 0..m {
        let (a0, p, _) = &samples[k];
        let (a1, q, _) = &samples[(k + 1) % m];
        let gap = if k + 1 == m { a1 + 2.0 * PI - a0 } else { a1 - a0 };
        if gap >= PI {
            return None;
        }
        let e = q - p;
        let cross = p[0] * e[1] - p[1] * e[0];
        let len = e.norm();
        r_in = r_in.min(if len > 0.0 { cross.abs() / len } else { p.norm() });
    }
    // tangent polygon: consecutive distinct tangent lines meet at its vertices
    let mut lines: Vec<(DVector<f64>, f64)> = Vec::with_capacity(m);
    for (_, y, n) in &samples {
        let c = n.dot(y);
        if let Some((last, _)) = lines.last() {
            let cross = last[0] * n[1] - last[1] * n[0];
            if cross.abs() < 1e-12 {
                continue;
            }
        }
        lines.push((n.clone(), c));
    }
    let k = lines.len();
    if k < 3 {
        return None;
    }
    let mut r_out: f64 = 0.0;
    for i in 0..k {
        let (n1, c1) = &lines[i];
        let (n2, c2) = &lines[(i + 1) % k];
        let det = n1[0] * n2[1] - n1[1] * n2[0];
        if det <= 0.0 {
            // consecutive normals must turn counter-clockwise by less than π
            return None;
        }
        let x = (c1 * n2[1] - c2 * n1[1]) / det;
        let y = (n1[0] * c2 - n2[0] * c1) / det;
        r_out = r_out.max((x * x + y * y).sqrt());
    }
    Some(r_in / r_out)
}

/// Exact planar polygon radii of an image polygon (vertex list, ccw).
pub fn polygon_radii(vertices: &[DVector<f64>]) -> (f64, f64) {
    let m = vertices.len();
    let mut r_in = f64::INFINITY;
    let mut r_out: f64 = 0.0;
    for k in 0..m {
        let p = &vertices[k];
        let q = &vertices[(k + 1) % m];
        let e = q - p;
        r_in = r_in.min((p[0] * e[1] - p[1] * e[0]).abs() / e.norm());
        r_out = r_out.max(p.norm());
    }
    (r_in, r_out)
}

/// Vertex list of a bounded planar polytope body, if it is one.
pub fn planar_vertices(body: &Body) -> Option<Vec<DVector<f64>>> {
    body.as_polytope().and_then(|p| polygon_vertices(&p).ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{EllipsoidBody, HalfspacePolytope};
    use crate::projective::frankel_phi;
    use nalgebra::dvector;

    #[test]
    fn radii_of_builtins() {
        let ball: Body = EllipsoidBody::unit_ball(2).into();
        assert!((inradius_at_origin(&ball, 1024).unwrap().value - 1.0).abs() < 1e-15);
        assert!((circumradius_at_origin(&ball, 1024).unwrap().value - 1.0).abs() < 1e-15);
        let sq: Body = HalfspacePolytope::cuboid(&[-1.0, -1.0], &[1.0, 1.0]).unwrap().into();
        let r = inradius_at_origin(&sq, 0).unwrap();
        assert!(r.exact && (r.value - 1.0).abs() < 1e-15);
        assert!((circumradius_at_origin(&sq, 0).unwrap().value - 2f64.sqrt()).abs() < 1e-15);
        let el: Body = EllipsoidBody::axis_aligned(dvector![0.0, 0.0], &[2.0, 1.0]).unwrap().into();
        assert!((circumradius_at_origin(&el, 4096).unwrap().value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn frankel_image_inradius() {
        let ball: Body = EllipsoidBody::unit_ball(2).into();
        let img = ball.transformed(frankel_phi(2)).unwrap();
        let r = inradius_at_origin(&img, 4096).unwrap();
        assert!(r.value >= 1.0 / (2.0 + 3.0 * 2f64.sqrt()) - 1e-6);
    }

    #[test]
    fn certify_ball_identity() {
        let ball: Body = EllipsoidBody::unit_ball(2).into();
        let w = certify(&ball, &dvector![0.0, 0.0], &ProjectiveMap::identity(2), 256, 0).unwrap();
        assert!((w.ratio() - 1.0).abs() < 1e-14);
        let c = w.certificate.conservative.unwrap();
        assert!(c <= w.ratio() && c > 0.999);
    }

    #[test]
    fn certify_rejects_maps_moving_z() {
        let ball: Body = EllipsoidBody::unit_ball(2).into();
        let t = ProjectiveMap::translation(&dvector![0.1, 0.0]);
        assert!(certify(&ball, &dvector![0.0, 0.0], &t, 64, 0).is_err());
    }
}
