//! Planar convex hulls (Andrew's monotone chain) and polygon helpers.

use nalgebra::{DMatrix, DVector};

use super::polytope::HalfspacePolytope;
use crate::error::{Error, Result};

fn cross(o: &DVector<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Strict convex hull in counter-clockwise order; collinear points dropped.
pub fn monotone_chain(points: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut pts: Vec<DVector<f64>> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() <= 1e-14 && (a[1] - b[1]).abs() <= 1e-14);
    if pts.len() < 3 {
        return pts;
    }
    let scale = pts.iter().map(|p| p.amax()).fold(1.0, f64::max);
    let eps = 1e-13 * scale * scale;
    let mut lower: Vec<DVector<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<DVector<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Half-space form of a strictly convex counter-clockwise polygon.
pub fn polygon_to_polytope(vertices: &[DVector<f64>]) -> Result<HalfspacePolytope> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::InvalidBody("polygon needs at least three vertices".into()));
    }
    let mut a = DMatrix::zeros(n, 2);
    let mut b = DVector::zeros(n);
    for i in 0..n {
        let p = &vertices[i];
        let q = &vertices[(i + 1) % n];
        // outward normal of a ccw edge
        let nx = q[1] - p[1];
        let ny = -(q[0] - p[0]);
        a[(i, 0)] = nx;
        a[(i, 1)] = ny;
        b[i] = nx * p[0] + ny * p[1];
    }
    let centroid = vertices.iter().fold(DVector::zeros(2), |acc, v| acc + v) / n as f64;
    HalfspacePolytope::new(a, b, centroid)
}

/// Vertices of a bounded planar polytope in counter-clockwise order.
pub fn polygon_vertices(poly: &HalfspacePolytope) -> Result<Vec<DVector<f64>>> {
    if poly.dim() != 2 {
        return Err(Error::UnsupportedDimension(poly.dim()));
    }
    if !poly.is_bounded() {
        return Err(Error::Unbounded);
    }
    Ok(monotone_chain(poly.vertices()))
}

/// Signed area and centroid of a simple ccw polygon.
pub fn polygon_area_centroid(vertices: &[DVector<f64>]) -> (f64, DVector<f64>) {
    let n = vertices.len();
    let mut area = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let p = &vertices[i];
        let q = &vertices[(i + 1) % n];
        let c = p[0] * q[1] - q[0] * p[1];
        area += c;
        cx += (p[0] + q[0]) * c;
        cy += (p[1] + q[1]) * c;
    }
    area *= 0.5;
    if area.abs() < 1e-300 {
        return (0.0, vertices.iter().fold(DVector::zeros(2), |acc, v| acc + v) / n.max(1) as f64);
    }
    (area, DVector::from_vec(vec![cx / (6.0 * area), cy / (6.0 * area)]))
}

/// Second moment `∫ x xᵀ dA` of a ccw polygon about the origin.
pub fn polygon_second_moment(vertices: &[DVector<f64>]) -> DMatrix<f64> {
    let n = vertices.len();
    let (mut ixx, mut iyy, mut ixy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p = &vertices[i];
        let q = &vertices[(i + 1) % n];
        let c = p[0] * q[1] - q[0] * p[1];
        ixx += c * (p[0] * p[0] + p[0] * q[0] + q[0] * q[0]);
        iyy += c * (p[1] * p[1] + p[1] * q[1] + q[1] * q[1]);
        ixy += c * (p[0] * q[1] + 2.0 * p[0] * p[1] + 2.0 * q[0] * q[1] + q[0] * p[1]);
    }
    DMatrix::from_row_slice(2, 2, &[ixx / 12.0, ixy / 24.0, ixy / 24.0, iyy / 12.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn hull_drops_interior_and_collinear() {
        let pts = vec![
            dvector![0.0, 0.0],
            dvector![1.0, 0.0],
            dvector![2.0, 0.0],
            dvector![2.0, 2.0],
            dvector![0.0, 2.0],
            dvector![1.0, 1.0],
        ];
        let h = monotone_chain(&pts);
        assert_eq!(h.len(), 4);
        let (area, c) = polygon_area_centroid(&h);
        assert!((area - 4.0).abs() < 1e-14);
        assert!((c - dvector![1.0, 1.0]).norm() < 1e-14);
    }

    #[test]
    fn unit_square_moment() {
        let sq = vec![dvector![-1.0, -1.0], dvector![1.0, -1.0], dvector![1.0, 1.0], dvector![-1.0, 1.0]];
        let m = polygon_second_moment(&sq);
        // ∫∫ x² over [-1,1]² = 4/3
        assert!((m[(0, 0)] - 4.0 / 3.0).abs() < 1e-14);
        assert!((m[(1, 1)] - 4.0 / 3.0).abs() < 1e-14);
        assert!(m[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn skew_moment_matches_quadrature() {
        let tri = vec![dvector![0.0, 0.0], dvector![2.0, 0.0], dvector![0.0, 1.0]];
        let m = polygon_second_moment(&tri);
        // brute-force midpoint rule
        let n = 1000;
        let mut acc = [0.0; 3];
        for i in 0..n {
            for j in 0..n {
                let x = 2.0 * (i as f64 + 0.5) / n as f64;
                let y = (j as f64 + 0.5) / n as f64;
                if x / 2.0 + y < 1.0 {
                    let w = 2.0 / (n * n) as f64;
                    acc[0] += x * x * w;
                    acc[1] += y * y * w;
                    acc[2] += x * y * w;
                }
            }
        }
        assert!((m[(0, 0)] - acc[0]).abs() < 5e-3);
        assert!((m[(1, 1)] - acc[1]).abs() < 5e-3);
        assert!((m[(0, 1)] - acc[2]).abs() < 5e-3);
    }
}
