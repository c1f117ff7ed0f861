//! Brute-force planar oracle: low-discrepancy global sampling of maps fixing
//! `z ↦ 0`, interleaved with random local perturbations of the incumbent.
//! Shares nothing with the optimizer beyond the geometry kernel.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::radii::{planar_vertices, polygon_radii};
use super::witness::polar_vertices;
use crate::directions::{halton, unit_directions};
use crate::domains::{polygon_area_centroid, polygon_second_moment, Body};
use crate::error::{Error, Result};
use crate::projective::AffinePoint;
use crate::rng::stream;

/// Boundary samples for non-polygonal bodies.
const ORACLE_BOUNDARY_SAMPLES: usize = 2048;
/// Range of the shear and log-aspect parameters in the global phase.
const SHAPE_RANGE: f64 = 2.0;
/// Incumbents refined by the local phase.
const POOL: usize = 8;

enum Shape {
    Polygon(Vec<DVector<f64>>),
    Sampled(Vec<DVector<f64>>),
}

impl Shape {
    /// Ratio of the image under `y ↦ By/(1 + a·y)`, 0 when invalid.
    fn ratio(&self, a: &DVector<f64>, b: &DMatrix<f64>) -> f64 {
        let pts = match self {
            Shape::Polygon(v) | Shape::Sampled(v) => v,
        };
        let mut img = Vec::with_capacity(pts.len());
        for y in pts {
            let w = 1.0 + a.dot(y);
            if !(w > 1e-12) {
                return 0.0;
            }
            img.push(b * y / w);
        }
        match self {
            Shape::Polygon(_) => {
                let (r_in, r_out) = polygon_radii(&img);
                r_in / r_out
            }
            Shape::Sampled(_) => {
                let norms = img.iter().map(|y| y.norm());
                let (lo, hi) = norms.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
                lo / hi
            }
        }
    }
}

/// Uniform point of a convex polygon from a point of the unit square (fan
/// triangulation from the centroid, area weighted).
fn polygon_point(v: &[DVector<f64>], c: &DVector<f64>, areas: &[f64], u: f64, w: f64) -> DVector<f64> {
    let total: f64 = areas.iter().sum();
    let mut acc = 0.0;
    let mut k = areas.len() - 1;
    let mut s = u * total;
    for (i, ai) in areas.iter().enumerate() {
        if s < acc + ai {
            k = i;
            s = (s - acc) / ai;
            break;
        }
        acc += ai;
    }
    let s = s.clamp(0.0, 1.0);
    let r = s.sqrt();
    let p = &v[k];
    let q = &v[(k + 1) % v.len()];
    c * (1.0 - r) + p * (r * (1.0 - w)) + q * (r * w)
}

/// Best ratio `inradius₀/circumradius₀` found over `samples` candidate maps
/// `Φ = [[1, aᵀ], [0, T(l,s)·M^{1/2}]] ∘ translate(−z)`, with `−a` uniform in
/// the polar body, `T(l,s) = [[1, l], [0, eˢ]]` and `M` the second moment of
/// the polar body. Every second sample perturbs one of a pool of
/// incumbents (kept in distinct basins) instead. The
/// value is a running maximum, so a longer run with the same seed never
/// reports less.
pub fn oracle_squeeze_2d(body: &Body, z: &AffinePoint, samples: usize, seed: u64) -> Result<f64> {
    if body.dim() != 2 {
        return Err(Error::UnsupportedDimension(body.dim()));
    }
    if !body.contains(z) {
        return Err(Error::PointNotInterior);
    }
    let shifted = body.clone().transformed(crate::projective::ProjectiveMap::translation(&(-z)))?;
    let origin = DVector::zeros(2);
    let shape = match planar_vertices(&shifted) {
        Some(v) if shifted.as_polytope().is_some_and(|p| p.is_bounded()) => Shape::Polygon(v),
        _ => Shape::Sampled(shifted.boundary_from(&origin, &unit_directions(2, ORACLE_BOUNDARY_SAMPLES))),
    };
    let polar = polar_vertices(&shifted).ok_or(Error::UnsupportedBody("polar body could not be formed"))?;
    let (area, centroid) = polygon_area_centroid(&polar);
    if !(area > 0.0) {
        return Err(Error::UnsupportedBody("degenerate polar body"));
    }
    let m = polygon_second_moment(&polar.iter().map(|x| x - &centroid).collect::<Vec<_>>()) / area;
    let eig = m.symmetric_eigen();
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt())) * eig.eigenvectors.transpose();
    let areas: Vec<f64> = (0..polar.len())
        .map(|k| {
            let p = &polar[k] - &centroid;
            let q = &polar[(k + 1) % polar.len()] - &centroid;
            0.5 * (p[0] * q[1] - p[1] * q[0]).abs()
        })
        .collect();
    let diam = polar.iter().map(|x| (x - &centroid).norm()).fold(0.0, f64::max);
    let eval = |theta: &[f64; 4]| -> f64 {
        let a = -DVector::from_vec(vec![theta[0], theta[1]]);
        let t = DMatrix::from_row_slice(2, 2, &[1.0, theta[2], 0.0, theta[3].exp()]);
        shape.ratio(&a, &(t * &root))
    };
    let offset = stream(seed, u64::MAX).random_range(0..1u64 << 20);
    // a pool of incumbents in distinct basins, refined in turn
    let mut pool: Vec<([f64; 4], f64)> = Vec::with_capacity(POOL);
    let mut best: f64 = 0.0;
    let dist = |x: &[f64; 4], y: &[f64; 4]| {
        ((x[0] - y[0]).hypot(x[1] - y[1]) / diam).max((x[2] - y[2]).abs()).max((x[3] - y[3]).abs())
    };
    for i in 0..samples as u64 {
        if i % 2 == 1 && !pool.is_empty() {
            let slot = (i / 2) as usize % pool.len();
            let mut rng = stream(seed, i);
            let scale = 0.3 * 10f64.powf(-6.0 * rng.random::<f64>());
            let mut theta = pool[slot].0;
            for (k, x) in theta.iter_mut().enumerate() {
                let unit = if k < 2 { diam } else { 1.0 };
                let g: f64 = rng.sample(StandardNormal);
                *x += scale * unit * g;
            }
            let r = eval(&theta);
            best = best.max(r);
            if r > pool[slot].1 {
                pool[slot] = (theta, r);
            }
            continue;
        }
        let h = halton(offset + i + 1, 4);
        let a = polygon_point(&polar, &centroid, &areas, h[0], h[1]);
        let theta = [a[0], a[1], SHAPE_RANGE * (2.0 * h[2] - 1.0), SHAPE_RANGE * (2.0 * h[3] - 1.0)];
        let r = eval(&theta);
        best = best.max(r);
        if !(r > 0.0) {
            continue;
        }
        if let Some(k) = (0..pool.len()).find(|&k| dist(&pool[k].0, &theta) < 0.05) {
            if r > pool[k].1 {
                pool[k] = (theta, r);
            }
        } else if pool.len() < POOL {
            pool.push((theta, r));
        } else {
            let worst = (0..POOL).min_by(|&j, &k| pool[j].1.total_cmp(&pool[k].1)).expect("nonempty");
            if r > pool[worst].1 {
                pool[worst] = (theta, r);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::spec::{builtin, triangle};
    use nalgebra::dvector;

    #[test]
    fn triangle_oracle_approaches_half() {
        let tri: Body = triangle().into();
        let v = oracle_squeeze_2d(&tri, &dvector![0.0, 0.0], 20_000, 1).unwrap();
        assert!(v <= 0.5 + 1e-12 && v > 0.49, "{v}");
    }

    #[test]
    fn oracle_is_a_running_maximum() {
        let sq = builtin("square").unwrap().unwrap();
        let z = dvector![0.3, 0.1];
        let short = oracle_squeeze_2d(&sq, &z, 2_000, 5).unwrap();
        let long = oracle_squeeze_2d(&sq, &z, 8_000, 5).unwrap();
        assert!(long >= short);
    }

    #[test]
    fn oracle_rejects_exterior_points() {
        let sq = builtin("square").unwrap().unwrap();
        assert_eq!(oracle_squeeze_2d(&sq, &dvector![2.0, 0.0], 10, 0), Err(Error::PointNotInterior));
    }
}
