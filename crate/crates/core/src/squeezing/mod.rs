//! Lower bounds on the projective squeezing function from certified witness
//! maps, upper bounds from the metric comparison `s·F ≤ C`, and a seeded
//! optimizer over projective maps fixing the base point.

pub mod chart;
pub mod nelder_mead;
mod oracle;
mod radii;
mod witness;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

pub use oracle::oracle_squeeze_2d;
pub use radii::{
    certify, circumradius_at_origin, inradius_at_origin, planar_vertices, polygon_radii, Certificate, RadiusBound,
    SqueezeWitness, CERT_DIRECTIONS,
};
pub use witness::{
    polar_centroid_seed, witness_ball_point, witness_ellipsoid_point, witness_recenter_scale, witness_strictly_convex,
};

use crate::directions::unit_directions;
use crate::domains::{Body, HalfspacePolytope};
use crate::error::{Error, Result};
use crate::metrics::finsler_f;
use crate::projective::{AffinePoint, ProjectiveMap};
use crate::rng::stream;
use chart::RadialData;

/// Optimizer restarts.
pub const RESTARTS: usize = 8;
/// Boundary samples behind the optimizer's objective for non-polytopes.
const OBJECTIVE_SAMPLES: usize = 1024;

pub const NOT_BOUNDED_DIAGNOSTIC: &str = "not projectively bounded witness found";

/// Where the reported witness came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    PolarCentroid,
    RecenterScale,
    Ellipsoid,
    BoundaryFrame,
    NelderMead,
    /// No witness: the body is not projectively bounded as far as we can tell.
    None,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::PolarCentroid => "polar-centroid",
            Method::RecenterScale => "recenter-scale",
            Method::Ellipsoid => "ellipsoid",
            Method::BoundaryFrame => "boundary-frame",
            Method::NelderMead => "nelder-mead",
            Method::None => "none",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SqueezeEstimate {
    /// `witness.r_in / witness.r_out`, or 0 without a witness.
    pub lower: f64,
    pub upper: Option<f64>,
    pub witness: Option<SqueezeWitness>,
    pub method: Method,
    pub budget: usize,
    /// Objective evaluations actually spent by the optimizer.
    pub evaluations: usize,
    pub diagnostic: Option<String>,
}

/// Exact image of a polytope; see [`HalfspacePolytope::pushforward`].
pub fn pushforward_polytope(poly: &HalfspacePolytope, map: &ProjectiveMap) -> Result<HalfspacePolytope> {
    poly.pushforward(map)
}

/// `min_X C(z;X)/F(z;X)` over `direction_samples` unit directions; 1 for
/// convex bodies.
pub fn upper_bound_squeeze(body: &Body, z: &AffinePoint, direction_samples: usize) -> Result<f64> {
    if !body.contains(z) {
        return Err(Error::PointNotInterior);
    }
    if body.is_convex() {
        return Ok(1.0);
    }
    let hull = body.convex_hull()?;
    let mut best: f64 = 1.0;
    for x in unit_directions(body.dim(), direction_samples) {
        let f = finsler_f(body, z, &x)?.f;
        let c = finsler_f(&hull, z, &x)?.f;
        if f > 0.0 {
            best = best.min(c / f);
        }
    }
    Ok(best)
}

/// Explicit witnesses available for this body, each certified.
fn seeds(body: &Body, z: &AffinePoint) -> Vec<(Method, SqueezeWitness)> {
    let mut out = Vec::new();
    if let Ok(w) = polar_centroid_seed(body, z) {
        out.push((Method::PolarCentroid, w));
    }
    if body.is_bounded() {
        if let Ok(w) = witness_recenter_scale(body, z) {
            out.push((Method::RecenterScale, w));
        }
    }
    if let Body::Ellipsoid(e) = body {
        if let Ok(w) = witness_ellipsoid_point(e, z, CERT_DIRECTIONS) {
            out.push((Method::Ellipsoid, w));
        }
    }
    if matches!(body, Body::Ellipsoid(_) | Body::LevelSet(_)) {
        if let Ok(w) = witness_strictly_convex(body, z) {
            out.push((Method::BoundaryFrame, w));
        }
    }
    out
}

/// Objective data of a bounded image containing 0.
fn radial_data(image: &Body, base: &Body, z: &AffinePoint, map: &ProjectiveMap) -> Result<RadialData> {
    let d = image.dim();
    let origin = DVector::zeros(d);
    if let Some(p) = image.as_polytope() {
        let normals = (0..p.a().nrows()).map(|i| p.a().row(i).transpose()).collect();
        let offsets = p.b().iter().copied().collect();
        return Ok(RadialData {
            d,
            outer: p.vertices().to_vec(),
            inner: Vec::new(),
            facets: Some((normals, offsets)),
            ideal: Vec::new(),
            ideal_inner: false,
        });
    }
    let mut pts = image.boundary_from(&origin, &unit_directions(d, OBJECTIVE_SAMPLES));
    if let Body::Union(u) = base {
        // first exits bound the inradius; the parts' far points bound the circumradius
        let mut outer = Vec::new();
        for part in u.parts() {
            let img = part.clone().transformed(map.clone())?;
            match img.as_polytope() {
                Some(p) => outer.extend(p.vertices().iter().cloned()),
                None => outer.extend(img.boundary_from(&img.interior_point(), &unit_directions(d, OBJECTIVE_SAMPLES))),
            }
        }
        outer.extend(pts.iter().cloned());
        return Ok(RadialData { d, outer, inner: pts, facets: None, ideal: Vec::new(), ideal_inner: false });
    }
    for y in base.boundary_from(z, &unit_directions(d, OBJECTIVE_SAMPLES)) {
        if let Ok(v) = map.apply(&y) {
            pts.push(v);
        }
    }
    Ok(RadialData { d, outer: pts.clone(), inner: pts, facets: None, ideal: Vec::new(), ideal_inner: false })
}

/// Maximizes `inradius₀/circumradius₀` of `Φ(D)` over maps with `Φ(z) = 0`.
///
/// The explicit witnesses are evaluated first and the best one becomes the
/// reference frame; [`RESTARTS`] Nelder–Mead runs (restart 0 from the
/// reference, the others from seeded perturbations) then split `budget`
/// evaluations over the chart of maps fixing the origin. Every restart's best
/// point is certified and the best certified witness is returned, so the
/// result is never below the best explicit witness.
pub fn optimize_squeeze(body: &Body, z: &AffinePoint, budget: usize, seed: u64) -> Result<SqueezeEstimate> {
    if !body.contains(z) {
        return Err(Error::PointNotInterior);
    }
    let upper = upper_bound_squeeze(body, z, OBJECTIVE_SAMPLES).ok();
    let none = |diagnostic: &str| SqueezeEstimate {
        lower: 0.0,
        upper,
        witness: None,
        method: Method::None,
        budget,
        evaluations: 0,
        diagnostic: Some(diagnostic.to_string()),
    };
    if !body.is_proper() {
        return Ok(none(NOT_BOUNDED_DIAGNOSTIC));
    }
    let mut candidates = seeds(body, z);
    let Some((_, reference)) = candidates.iter().max_by(|a, b| a.1.ratio().total_cmp(&b.1.ratio())).cloned() else {
        return Ok(none(NOT_BOUNDED_DIAGNOSTIC));
    };
    let image = body.clone().transformed(reference.map.clone())?;
    let data = radial_data(&image, body, z, &reference.map)?;
    let d = body.dim();
    let n = chart::n_params(d);
    let objective = |p: &[f64]| {
        let (a, r) = chart::unpack(d, p);
        -data.ratio(&a, &r)
    };
    let per_restart = budget / RESTARTS;
    let runs: Vec<nelder_mead::Minimum> = (0..RESTARTS)
        .into_par_iter()
        .map(|i| {
            let mut x0 = vec![0.0; n];
            if i > 0 {
                let mut rng = stream(seed, i as u64);
                // a few deterministic draws until the start point is valid
                for _ in 0..16 {
                    let trial: Vec<f64> = (0..n).map(|_| 0.3 * rng.sample::<f64, _>(StandardNormal)).collect();
                    if objective(&trial) < 0.0 {
                        x0 = trial;
                        break;
                    }
                }
            }
            let step = vec![0.1; n];
            nelder_mead::minimize(objective, &x0, &step, per_restart)
        })
        .collect();
    let evaluations = runs.iter().map(|m| m.evaluations).sum();
    let certified: Vec<Option<SqueezeWitness>> = runs
        .par_iter()
        .map(|m| {
            let (a, r) = chart::unpack(d, &m.x);
            let step = ProjectiveMap::new(chart::block(&a, &r)).ok()?;
            let map = step.compose(&reference.map);
            let w = certify(body, z, &map, CERT_DIRECTIONS, seed).ok()?;
            let scale = ProjectiveMap::scaling(1.0 / w.r_out, d).ok()?;
            certify(body, z, &scale.compose(&map), CERT_DIRECTIONS, seed).ok()
        })
        .collect();
    candidates.extend(certified.into_iter().flatten().map(|w| (Method::NelderMead, w)));
    let (method, mut witness) = candidates
        .into_iter()
        .reduce(|best, c| if c.1.ratio() > best.1.ratio() { c } else { best })
        .expect("reference exists");
    witness.certificate.seed = seed;
    Ok(SqueezeEstimate {
        lower: witness.ratio(),
        upper,
        witness: Some(witness),
        method,
        budget,
        evaluations,
        diagnostic: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::spec::{builtin, triangle};
    use nalgebra::dvector;

    #[test]
    fn ball_estimates_are_one() {
        let ball = builtin("ball2").unwrap().unwrap();
        for z in [dvector![0.0, 0.0], dvector![0.9, 0.3]] {
            let e = optimize_squeeze(&ball, &z, 400, 1).unwrap();
            assert!(e.lower >= 1.0 - 1e-4, "{}", e.lower);
        }
    }

    #[test]
    fn square_center_between_affine_floor_and_one() {
        let sq = builtin("square").unwrap().unwrap();
        let e = optimize_squeeze(&sq, &dvector![0.0, 0.0], 800, 3).unwrap();
        assert!(e.lower >= 0.5f64.sqrt() - 1e-12 && e.lower <= 1.0);
        assert!(e.witness.unwrap().certificate.exact);
    }

    #[test]
    fn triangle_is_half_everywhere() {
        let tri: Body = triangle().into();
        let e = optimize_squeeze(&tri, &dvector![0.4, -0.3], 400, 0).unwrap();
        assert!((e.lower - 0.5).abs() < 1e-6, "{}", e.lower);
    }

    #[test]
    fn slab_has_no_witness() {
        let slab = builtin("slab").unwrap().unwrap();
        let e = optimize_squeeze(&slab, &dvector![0.0, 0.0], 100, 0).unwrap();
        assert_eq!(e.lower, 0.0);
        assert_eq!(e.diagnostic.as_deref(), Some(NOT_BOUNDED_DIAGNOSTIC));
    }

    #[test]
    fn upper_bounds() {
        let ball = builtin("ball2").unwrap().unwrap();
        assert_eq!(upper_bound_squeeze(&ball, &dvector![0.2, 0.0], 64).unwrap(), 1.0);
        let l = builtin("lshape").unwrap().unwrap();
        let t = 1e-2;
        let u = upper_bound_squeeze(&l, &dvector![-t, -t], 256).unwrap();
        assert!(u < 20.0 * t, "{u}");
    }

    #[test]
    fn estimate_is_deterministic_across_thread_counts() {
        let sq = builtin("square").unwrap().unwrap();
        let z = dvector![0.5, -0.2];
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| optimize_squeeze(&sq, &z, 800, 9).unwrap().lower)
        };
        assert_eq!(run(1).to_bits(), run(4).to_bits());
    }
}
