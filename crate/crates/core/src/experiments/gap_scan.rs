//! Squeezing lower bounds over random convex polygons, including points close
//! to the boundary, with the running empirical floor.

use nalgebra::DVector;
use rand::Rng;

use super::{fmt_f64, Experiment};
use crate::directions::halton;
use crate::domains::spec::spec_hash;
use crate::domains::{monotone_chain, polygon_area_centroid, polygon_to_polytope, Body, HalfspacePolytope};
use crate::error::Result;
use crate::rng::stream;
use crate::squeezing::optimize_squeeze;

/// Interior points drawn from a low-discrepancy sequence; the rest of each
/// body's points sit at these boundary distances (relative to the diameter).
const INTERIOR_POINTS: usize = 16;
const NEAR_DISTANCES: [f64; 3] = [1e-1, 1e-2, 1e-3];

pub struct GapScan {
    pub n_bodies: usize,
    pub n_points: usize,
    pub budget: usize,
    pub seed: u64,
}

impl GapScan {
    pub fn new(n_bodies: usize, n_points: usize, budget: usize, seed: u64) -> Self {
        GapScan { n_bodies, n_points, budget, seed }
    }

    /// Convex hull of 5–12 uniform points of the unit square, resampled until
    /// it has at least three vertices.
    pub fn polygon(&self, b: usize) -> Vec<DVector<f64>> {
        let mut rng = stream(self.seed, b as u64);
        loop {
            let n = rng.random_range(5..=12);
            let pts: Vec<DVector<f64>> =
                (0..n).map(|_| DVector::from_vec(vec![rng.random::<f64>(), rng.random::<f64>()])).collect();
            let hull = monotone_chain(&pts);
            if hull.len() >= 3 && polygon_area_centroid(&hull).0 > 1e-6 {
                return hull;
            }
        }
    }

    /// Point `j` of polygon `v` and its distance to the boundary.
    fn point(&self, v: &[DVector<f64>], poly: &HalfspacePolytope, j: usize) -> (DVector<f64>, f64) {
        let (_, c) = polygon_area_centroid(v);
        let m = v.len();
        let dist = |x: &DVector<f64>| poly.slack(x).min();
        if j < INTERIOR_POINTS {
            // uniform in the fan triangulation from the centroid
            let h = halton(j as u64 + 1, 2);
            let k = ((h[0] * m as f64) as usize).min(m - 1);
            let s = (h[0] * m as f64 - k as f64).sqrt();
            let x = &c * (1.0 - s) + &v[k] * (s * (1.0 - h[1])) + &v[(k + 1) % m] * (s * h[1]);
            // keep off the boundary at the coarsest near-boundary level
            let x = if dist(&x) > 0.0 { x } else { (&x + &c) * 0.5 };
            let d = dist(&x);
            return (x, d);
        }
        let k = j - INTERIOR_POINTS;
        let diam = v.iter().flat_map(|p| v.iter().map(move |q| (p - q).norm())).fold(0.0, f64::max);
        let target = NEAR_DISTANCES[k % NEAR_DISTANCES.len()] * diam;
        let edge = (k * 7) % m;
        let (p, q) = (&v[edge], &v[(edge + 1) % m]);
        let s = 0.25 + 0.5 * halton(k as u64 + 1, 1)[0];
        let e = q - p;
        // vertices are counter-clockwise, so the inward normal is e rotated left
        let inward = DVector::from_vec(vec![-e[1], e[0]]).normalize();
        let mut x = p + &e * s + inward * target;
        // short edges: pull toward the centroid until the point is interior
        while dist(&x) <= 0.0 {
            x = (&x + &c) * 0.5;
        }
        let d = dist(&x);
        (x, d)
    }
}

impl Experiment for GapScan {
    fn id(&self) -> &'static str {
        "gap-scan"
    }

    fn spec_hash(&self) -> String {
        spec_hash(&format!("gap-scan:polygons={},points={},budget={}", self.n_bodies, self.n_points, self.budget))
    }

    fn seed(&self) -> u64 {
        self.seed
    }

    fn columns(&self) -> Vec<String> {
        ["body", "vertices", "point", "x", "y", "dist", "rel_dist", "lower", "method", "exact", "floor"]
            .map(String::from)
            .to_vec()
    }

    fn summary_columns(&self) -> usize {
        1
    }

    fn len(&self) -> usize {
        self.n_bodies * self.n_points
    }

    fn row(&self, i: usize) -> Result<Vec<String>> {
        let (b, j) = (i / self.n_points, i % self.n_points);
        let v = self.polygon(b);
        let poly = polygon_to_polytope(&v)?;
        let diam = v.iter().flat_map(|p| v.iter().map(move |q| (p - q).norm())).fold(0.0, f64::max);
        let (x, dist) = self.point(&v, &poly, j);
        let body: Body = poly.into();
        let est = optimize_squeeze(&body, &x, self.budget, self.seed ^ i as u64)?;
        let exact = est.witness.as_ref().is_some_and(|w| w.certificate.exact);
        Ok(vec![
            b.to_string(),
            v.len().to_string(),
            j.to_string(),
            fmt_f64(x[0]),
            fmt_f64(x[1]),
            fmt_f64(dist),
            fmt_f64(dist / diam),
            fmt_f64(est.lower),
            est.method.tag().to_string(),
            exact.to_string(),
        ])
    }

    fn finish(&self, rows: &mut [Vec<String>]) -> Result<()> {
        let col = 4 + 7;
        let mut floor = f64::INFINITY;
        for r in rows.iter_mut() {
            floor = floor.min(r[col].parse::<f64>().unwrap_or(f64::NAN));
            r.push(fmt_f64(floor));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygons_are_reproducible_and_convex() {
        let g = GapScan::new(4, 25, 100, 11);
        for b in 0..4 {
            let v = g.polygon(b);
            assert_eq!(v, g.polygon(b));
            assert!(v.len() >= 3 && v.len() <= 12);
        }
    }

    #[test]
    fn points_cover_requested_boundary_distances() {
        let g = GapScan::new(1, 25, 100, 3);
        let v = g.polygon(0);
        let poly = polygon_to_polytope(&v).unwrap();
        let diam = v.iter().flat_map(|p| v.iter().map(move |q| (p - q).norm())).fold(0.0, f64::max);
        let dists: Vec<f64> = (0..25).map(|j| g.point(&v, &poly, j).1 / diam).collect();
        assert!(dists.iter().all(|&d| d > 0.0));
        assert!(dists.iter().any(|&d| (d - 1e-3).abs() < 1e-9));
    }
}
