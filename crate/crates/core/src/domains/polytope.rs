use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::projective::{homogenize, ProjectiveMap};

/// Slack required of the interior witness.
const WITNESS_SLACK: f64 = 1e-10;
/// Strict-membership margin.
pub(crate) const BOUNDARY_TOL: f64 = 1e-12;

/// Open polyhedron `{x : Ax < b}` with unit-norm rows.
#[derive(Debug, Clone)]
pub struct HalfspacePolytope {
    a: DMatrix<f64>,
    b: DVector<f64>,
    witness: DVector<f64>,
    vertices: Vec<DVector<f64>>,
    recession_rays: Vec<DVector<f64>>,
    rank: usize,
}

impl HalfspacePolytope {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, witness: DVector<f64>) -> Result<Self> {
        let (m, d) = a.shape();
        if d == 0 || m == 0 {
            return Err(Error::InvalidBody("polytope needs at least one row and column".into()));
        }
        if b.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: b.len() });
        }
        if witness.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: witness.len() });
        }
        let mut a = a;
        let mut b = b;
        for i in 0..m {
            let n = a.row(i).norm();
            if !(n > 1e-14) || !n.is_finite() || !b[i].is_finite() {
                return Err(Error::InvalidBody(format!("row {i} of A is zero or non-finite")));
            }
            a.row_mut(i).scale_mut(1.0 / n);
            b[i] /= n;
        }
        let slack = &b - &a * &witness;
        if let Some(i) = slack.iter().position(|s| *s <= WITNESS_SLACK) {
            return Err(Error::InvalidBody(format!("witness violates row {i} (slack {})", slack[i])));
        }
        let rank = a.clone().svd(false, false).rank(1e-10);
        let vertices = enumerate_vertices(&a, &b);
        let recession_rays = if rank < d { Vec::new() } else { extreme_rays(&a) };
        Ok(Self { a, b, witness, vertices, recession_rays, rank })
    }

    /// Axis-aligned box `∏(lo_i, hi_i)`.
    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let d = lo.len();
        let mut a = DMatrix::zeros(2 * d, d);
        let mut b = DVector::zeros(2 * d);
        for i in 0..d {
            a[(2 * i, i)] = 1.0;
            b[2 * i] = hi[i];
            a[(2 * i + 1, i)] = -1.0;
            b[2 * i + 1] = -lo[i];
        }
        let witness = DVector::from_iterator(d, lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)));
        Self::new(a, b, witness)
    }

    /// Interior of the convex hull of planar points.
    pub fn from_points_2d(points: &[DVector<f64>]) -> Result<Self> {
        let hull = super::hull::monotone_chain(points);
        if hull.len() < 3 {
            return Err(Error::InvalidBody("degenerate hull".into()));
        }
        super::hull::polygon_to_polytope(&hull)
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn witness(&self) -> &DVector<f64> {
        &self.witness
    }

    /// Vertices of the closure (empty if the polyhedron has a lineality space).
    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn is_bounded(&self) -> bool {
        self.rank == self.dim() && self.recession_rays.is_empty()
    }

    /// No line is contained iff the recession cone `{v : Av ≤ 0}` is pointed,
    /// i.e. `ker A = 0`.
    pub fn is_proper(&self) -> bool {
        self.rank == self.dim()
    }

    /// Extreme rays of the recession cone (empty when bounded or not pointed).
    pub fn recession_rays(&self) -> &[DVector<f64>] {
        &self.recession_rays
    }

    pub fn slack(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.b - &self.a * x
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.slack(x).iter().all(|s| *s > BOUNDARY_TOL)
    }

    pub fn ray_exit(&self, p: &DVector<f64>, x: &DVector<f64>) -> f64 {
        let ax = &self.a * x;
        let s = self.slack(p);
        let mut best = f64::INFINITY;
        for i in 0..ax.len() {
            if ax[i] > 0.0 {
                best = best.min(s[i].max(0.0) / ax[i]);
            }
        }
        best
    }

    pub fn line_interval(&self, p: &DVector<f64>, x: &DVector<f64>) -> Option<(f64, f64)> {
        let ax = &self.a * x;
        let s = self.slack(p);
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..ax.len() {
            if ax[i] > 0.0 {
                hi = hi.min(s[i] / ax[i]);
            } else if ax[i] < 0.0 {
                lo = lo.max(s[i] / ax[i]);
            } else if s[i] <= 0.0 {
                return None;
            }
        }
        (lo < hi).then_some((lo, hi))
    }

    /// `sup{u·x : x in the body}`.
    pub fn support(&self, u: &DVector<f64>) -> f64 {
        let d = self.dim();
        if self.rank == d {
            if self.recession_rays.iter().any(|r| r.dot(u) > 1e-12) {
                return f64::INFINITY;
            }
            return self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max);
        }
        // split off the lineality space ker A and work in the row space
        let eig = (self.a.transpose() * &self.a).symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let basis = DMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
        let ker = basis.columns(self.rank, d - self.rank);
        if (ker.transpose() * u).amax() > 1e-12 {
            return f64::INFINITY;
        }
        let rows = basis.columns(0, self.rank).into_owned();
        let reduced = &self.a * &rows;
        let ur = rows.transpose() * u;
        if extreme_rays(&reduced).iter().any(|r| r.dot(&ur) > 1e-12) {
            return f64::INFINITY;
        }
        enumerate_vertices(&reduced, &self.b).iter().map(|v| v.dot(&ur)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Image under `x ↦ Lx + c`: `A' = A L⁻¹`, `b' = b + A' c`.
    pub fn affine_image(&self, linear: &DMatrix<f64>, offset: &DVector<f64>) -> Result<Self> {
        let inv = linear.clone().try_inverse().ok_or(Error::SingularMap)?;
        let a = &self.a * inv;
        let b = &self.b + &a * offset;
        Self::new(a, b, linear * &self.witness + offset)
    }

    pub fn translated(&self, v: &DVector<f64>) -> Self {
        let b = &self.b + &self.a * v;
        Self {
            a: self.a.clone(),
            b,
            witness: &self.witness + v,
            vertices: self.vertices.iter().map(|x| x + v).collect(),
            recession_rays: self.recession_rays.clone(),
            rank: self.rank,
        }
    }

    /// Image under a projective map: each `c_iᵀh > 0` with `c_i = (b_i, −a_i)`
    /// becomes `σ c_iᵀM⁻¹h > 0`, with `σ` fixed by the mapped witness.
    pub fn pushforward(&self, map: &ProjectiveMap) -> Result<Self> {
        let d = self.dim();
        if map.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: map.dim() });
        }
        if !map.is_affine() {
            let m = map.matrix();
            let row0 = m.row(0).transpose();
            let weight = |h: DVector<f64>| row0.dot(&h) / (m * &h).norm();
            let sign = weight(homogenize(&self.witness)).signum();
            let ideal = |r: &DVector<f64>| {
                let mut h = DVector::zeros(d + 1);
                h.rows_mut(1, d).copy_from(r);
                h
            };
            let bad = !self.is_proper()
                || self.vertices.iter().any(|v| weight(homogenize(v)) * sign <= 1e-12)
                || self.recession_rays.iter().any(|r| weight(ideal(r)) * sign <= 1e-12);
            if bad {
                return Err(Error::SingularHyperplaneCrossing);
            }
        }
        let inv = map.inverse()?;
        let witness = map.apply(&self.witness)?;
        let m = self.a.nrows();
        let mut c = DMatrix::zeros(m, d + 1);
        for i in 0..m {
            c[(i, 0)] = self.b[i];
            for j in 0..d {
                c[(i, j + 1)] = -self.a[(i, j)];
            }
        }
        let r = c * inv.matrix();
        let sigma = (inv.matrix() * homogenize(&witness))[0].signum();
        let a = -r.columns(1, d) * sigma;
        let b = r.column(0) * sigma;
        Self::new(a, b, witness)
    }
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Brute-force vertex enumeration over all `d`-subsets of rows.
fn enumerate_vertices(a: &DMatrix<f64>, b: &DVector<f64>) -> Vec<DVector<f64>> {
    let (m, d) = a.shape();
    let mut out: Vec<DVector<f64>> = Vec::new();
    for_each_subset(m, d, |rows| {
        let sub = DMatrix::from_fn(d, d, |i, j| a[(rows[i], j)]);
        let rhs = DVector::from_fn(d, |i, _| b[rows[i]]);
        let lu = sub.lu();
        if lu.determinant().abs() < 1e-12 {
            return;
        }
        let Some(x) = lu.solve(&rhs) else { return };
        let scale = 1.0 + x.amax();
        let feasible = (0..m).all(|i| a.row(i).transpose().dot(&x) <= b[i] + 1e-9 * scale);
        if feasible && !out.iter().any(|v| (v - &x).amax() <= 1e-9 * scale) {
            out.push(x);
        }
    });
    out
}

/// Extreme rays of a pointed cone `{v : Av ≤ 0}`: each is cut out by `d − 1`
/// independent active rows.
fn extreme_rays(a: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let (m, d) = a.shape();
    let mut out: Vec<DVector<f64>> = Vec::new();
    let mut consider = |v: DVector<f64>| {
        for cand in [v.clone(), -v] {
            let ok = (0..m).all(|i| a.row(i).transpose().dot(&cand) <= 1e-10);
            if ok && !out.iter().any(|r| (r - &cand).amax() < 1e-9) {
                out.push(cand);
            }
        }
    };
    if d == 1 {
        consider(DVector::from_element(1, 1.0));
        return out;
    }
    let mut candidates = Vec::new();
    for_each_subset(m, d - 1, |rows| {
        let mut sub = DMatrix::zeros(d, d);
        for (i, r) in rows.iter().enumerate() {
            sub.row_mut(i).copy_from(&a.row(*r));
        }
        let svd = sub.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let sv = &svd.singular_values;
        let (kmin, _) = sv.argmin();
        // nullity must be exactly one among the d-1 rows
        let small = sv.iter().filter(|s| **s < 1e-10).count();
        if small != 1 {
            return;
        }
        candidates.push(vt.row(kmin).transpose().normalize());
    });
    for c in candidates {
        consider(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn subsets_enumerated() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
        let mut n = 0;
        for_each_subset(3, 0, |_| n += 1);
        assert_eq!(n, 1);
    }

    #[test]
    fn square_vertices_and_exits() {
        let sq = HalfspacePolytope::cuboid(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(sq.vertices().len(), 4);
        assert!(sq.is_bounded());
        let d = dvector![1.0, 1.0] / 2f64.sqrt();
        assert!((sq.ray_exit(&dvector![0.0, 0.0], &d) - 2f64.sqrt()).abs() < 1e-15);
        assert!(!sq.contains(&dvector![1.0, 0.0]));
        assert!(sq.contains(&dvector![0.999, 0.0]));
    }

    #[test]
    fn slab_is_not_proper() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 0.0]);
        let slab = HalfspacePolytope::new(a, dvector![1.0, 1.0], dvector![0.0, 0.0]).unwrap();
        assert!(!slab.is_proper());
        assert!(!slab.is_bounded());
        assert!(slab.ray_exit(&dvector![0.0, 0.0], &dvector![0.0, 1.0]).is_infinite());
        assert!(slab.support(&dvector![0.0, 1.0]).is_infinite());
        assert!((slab.support(&dvector![1.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthant_is_proper_unbounded() {
        let d = 3;
        let a = -DMatrix::identity(d, d);
        let v = HalfspacePolytope::new(a, DVector::from_element(d, 1.0), DVector::zeros(d)).unwrap();
        assert!(v.is_proper());
        assert!(!v.is_bounded());
        assert_eq!(v.recession_rays().len(), 3);
        assert_eq!(v.vertices().len(), 1);
        assert!(v.support(&dvector![1.0, 0.0, 0.0]).is_infinite());
        assert!((v.support(&dvector![-1.0, 0.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn witness_must_be_strictly_inside() {
        let r = HalfspacePolytope::new(DMatrix::from_row_slice(1, 1, &[1.0]), dvector![1.0], dvector![1.0]);
        assert!(r.is_err());
    }
}
