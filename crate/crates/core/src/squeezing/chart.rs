//! Projective maps fixing the origin, up to post-rotation and scaling (neither
//! changes the ratio of radii at 0):
//!
//! ```text
//! M = [ 1  aᵀ ]     y ↦ R y / (1 + a·y)
//!     [ 0  R  ]     R upper triangular, R₀₀ = 1, positive diagonal
//! ```
//!
//! `d` parameters for `a`, `d − 1` log-diagonal entries and `d(d−1)/2`
//! off-diagonal entries.

use nalgebra::{DMatrix, DVector};

use crate::projective::{AffinePoint, ProjectiveMap};

pub fn n_params(d: usize) -> usize {
    d + (d - 1) + d * (d - 1) / 2
}

/// `(a, R)` of a chart parameter vector.
pub fn unpack(d: usize, p: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let a = DVector::from_column_slice(&p[..d]);
    let mut r = DMatrix::zeros(d, d);
    r[(0, 0)] = 1.0;
    let mut k = d;
    for i in 1..d {
        r[(i, i)] = p[k].exp();
        k += 1;
    }
    for i in 0..d {
        for j in (i + 1)..d {
            r[(i, j)] = p[k];
            k += 1;
        }
    }
    (a, r)
}

/// Block matrix `[[1, aᵀ], [0, B]]`.
pub fn block(a: &DVector<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let d = a.len();
    let mut m = DMatrix::zeros(d + 1, d + 1);
    m[(0, 0)] = 1.0;
    m.view_mut((0, 1), (1, d)).copy_from(&a.transpose());
    m.view_mut((1, 1), (d, d)).copy_from(b);
    m
}

/// Chart coordinates of `(a, B)`, discarding the rotation and scale of `B`.
pub fn pack(a: &DVector<f64>, b: &DMatrix<f64>) -> Option<Vec<f64>> {
    let d = a.len();
    let qr = b.clone().qr();
    let mut r = qr.r();
    for i in 0..d {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
        }
        if !(r[(i, i)] > 0.0) {
            return None;
        }
    }
    let r = &r / r[(0, 0)];
    let mut p: Vec<f64> = a.iter().copied().collect();
    for i in 1..d {
        p.push(r[(i, i)].ln());
    }
    for i in 0..d {
        for j in (i + 1)..d {
            p.push(r[(i, j)]);
        }
    }
    Some(p)
}

/// Splits a map with `Φ(z) = 0` as `[[1, aᵀ], [0, B]] ∘ translate(−z)`.
pub fn split_at(map: &ProjectiveMap, z: &AffinePoint) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let d = z.len();
    let m = map.matrix() * ProjectiveMap::translation(z).matrix();
    let m00 = m[(0, 0)];
    if m00.abs() < 1e-300 {
        return None;
    }
    let m = m / m00;
    let col = m.view((1, 0), (d, 1));
    if col.amax() > 1e-9 * m.amax() {
        return None;
    }
    Some((DVector::from_iterator(d, m.row(0).iter().skip(1).copied()), m.view((1, 1), (d, d)).into_owned()))
}

/// Radial data of a body seen from the origin, sufficient to evaluate
/// `inradius₀/circumradius₀` of its images under chart maps.
#[derive(Debug, Clone)]
pub struct RadialData {
    pub d: usize,
    /// Points whose image norms bound the circumradius (max).
    pub outer: Vec<DVector<f64>>,
    /// Boundary points hit first along rays from 0 (min), when no facets.
    pub inner: Vec<DVector<f64>>,
    /// Exact facets `n·y < c` (`c > 0`), replacing `inner` when present.
    pub facets: Option<(Vec<DVector<f64>>, Vec<f64>)>,
    /// Ideal boundary directions (unbounded bodies); need `a·u > 0`.
    pub ideal: Vec<DVector<f64>>,
    /// Whether ideal points also count as first-exit points.
    pub ideal_inner: bool,
}

impl RadialData {
    /// `inradius/circumradius` of the image under `y ↦ By/(1 + a·y)`, or 0 if
    /// the singular hyperplane meets the closure.
    pub fn ratio(&self, a: &DVector<f64>, b: &DMatrix<f64>) -> f64 {
        match self.radii(a, b) {
            Some((rin, rout)) if rout > 0.0 => rin / rout,
            _ => 0.0,
        }
    }

    pub fn radii(&self, a: &DVector<f64>, b: &DMatrix<f64>) -> Option<(f64, f64)> {
        let d = self.d;
        let mut rin = f64::INFINITY;
        let mut rout: f64 = 0.0;
        let mut by = vec![0.0; d];
        let mut image_norm = |y: &DVector<f64>, w: f64| -> f64 {
            for i in 0..d {
                let mut s = 0.0;
                for j in 0..d {
                    s += b[(i, j)] * y[j];
                }
                by[i] = s;
            }
            by.iter().map(|v| v * v).sum::<f64>().sqrt() / w
        };
        for u in &self.ideal {
            let w = a.dot(u);
            if !(w > 1e-12 * u.norm() * (1.0 + a.norm())) {
                return None;
            }
            let r = image_norm(u, w);
            rout = rout.max(r);
            if self.ideal_inner {
                rin = rin.min(r);
            }
        }
        for y in &self.outer {
            let w = 1.0 + a.dot(y);
            if !(w > 1e-12) {
                return None;
            }
            rout = rout.max(image_norm(y, w));
        }
        match &self.facets {
            Some((normals, offsets)) => {
                let binv_t = b.clone().try_inverse()?.transpose();
                for (n, c) in normals.iter().zip(offsets) {
                    let m = &binv_t * (n + a * *c);
                    rin = rin.min(c / m.norm());
                }
            }
            None => {
                for y in &self.inner {
                    let w = 1.0 + a.dot(y);
                    if !(w > 1e-12) {
                        return None;
                    }
                    rin = rin.min(image_norm(y, w));
                }
            }
        }
        (rin.is_finite() && rout > 0.0).then_some((rin, rout))
    }

    /// The same data after applying `y ↦ By/(1 + a·y)`.
    pub fn pushed(&self, a: &DVector<f64>, b: &DMatrix<f64>) -> Option<RadialData> {
        let map_pt = |y: &DVector<f64>| -> Option<DVector<f64>> {
            let w = 1.0 + a.dot(y);
            (w > 1e-12).then(|| b * y / w)
        };
        let mut outer: Vec<DVector<f64>> = self.outer.iter().map(map_pt).collect::<Option<_>>()?;
        let mut inner: Vec<DVector<f64>> = self.inner.iter().map(map_pt).collect::<Option<_>>()?;
        let mut ideal = Vec::new();
        for u in &self.ideal {
            let w = a.dot(u);
            if w.abs() <= 1e-14 * u.norm() * (1.0 + a.norm()) && a.norm() > 0.0 {
                return None;
            }
            if a.norm() == 0.0 {
                ideal.push(b * u);
            } else if w > 0.0 {
                let y = b * u / w;
                if self.ideal_inner {
                    inner.push(y.clone());
                }
                outer.push(y);
            } else {
                return None;
            }
        }
        let facets = match &self.facets {
            Some((normals, offsets)) => {
                let binv_t = b.clone().try_inverse()?.transpose();
                Some((normals.iter().zip(offsets).map(|(n, c)| &binv_t * (n + a * *c)).collect(), offsets.clone()))
            }
            None => None,
        };
        Some(RadialData { d: self.d, outer, inner, facets, ideal, ideal_inner: self.ideal_inner })
    }
}
