//! Orbit of a point under ball automorphisms accumulating at `e₁`: the ball
//! stays perfectly squeezed at the moving point, the localized domain
//! `D ∩ U` approaches 1 there, and the pulled-back domains exhaust the ball.

use nalgebra::DVector;

use super::{fmt_f64, Experiment};
use crate::domains::spec::spec_hash;
use crate::domains::{Body, EllipsoidBody, HalfspacePolytope, IntersectionBody};
use crate::error::Result;
use crate::projective::{ball_automorphism, ProjectiveMap};
use crate::squeezing::{optimize_squeeze, witness_ball_point, CERT_DIRECTIONS};

/// `U = {x₁ > 1/2}`.
pub const CAP_LEVEL: f64 = 0.5;
/// Radii of the nested compact grids `K`.
pub const GRID_RADII: [f64; 3] = [0.3, 0.6, 0.9];

pub struct Orbit {
    pub steps: std::ops::RangeInclusive<u32>,
    pub budget: usize,
    pub seed: u64,
    cap: Body,
}

impl Orbit {
    pub fn new(steps: std::ops::RangeInclusive<u32>, budget: usize, seed: u64) -> Result<Self> {
        Ok(Orbit { steps, budget, seed, cap: cap()? })
    }

    fn point(j: u32) -> DVector<f64> {
        DVector::from_vec(vec![1.0 - 0.5f64.powi(j as i32), 0.0])
    }

    /// `φ_j`, sending 0 to `q_j`.
    fn phi(j: u32) -> Result<ProjectiveMap> {
        ball_automorphism(&Self::point(j))?.inverse()
    }
}

/// The unit disk cut by `{x₁ > 1/2}`.
pub fn cap() -> Result<Body> {
    let ball: Body = EllipsoidBody::unit_ball(2).into();
    let half = HalfspacePolytope::new(
        nalgebra::DMatrix::from_row_slice(1, 2, &[-1.0, 0.0]),
        DVector::from_vec(vec![-CAP_LEVEL]),
        DVector::from_vec(vec![0.75, 0.0]),
    )?;
    Ok(Body::Intersection(IntersectionBody::new(vec![ball, half.into()], Some(DVector::from_vec(vec![0.75, 0.0])))?))
}

/// Closed disk of radius `r`: a square grid plus 64 points on the circle.
pub fn grid(r: f64) -> Vec<DVector<f64>> {
    let n = 8;
    let mut pts = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            let p = DVector::from_vec(vec![i as f64, j as f64]) * (r / n as f64);
            if p.norm() <= r {
                pts.push(p);
            }
        }
    }
    for k in 0..64 {
        let t = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
        pts.push(DVector::from_vec(vec![t.cos(), t.sin()]) * r);
    }
    pts
}

impl Experiment for Orbit {
    fn id(&self) -> &'static str {
        "orbit"
    }

    fn spec_hash(&self) -> String {
        spec_hash(&format!("orbit:ball2,cap x1>{CAP_LEVEL}"))
    }

    fn seed(&self) -> u64 {
        self.seed
    }

    fn columns(&self) -> Vec<String> {
        let mut c: Vec<String> = ["j", "q_x", "s_ball", "s_cap", "cap_method"].map(String::from).to_vec();
        c.extend(GRID_RADII.iter().map(|r| format!("covers_r{r}")));
        c
    }

    fn len(&self) -> usize {
        self.steps.clone().count()
    }

    fn row(&self, i: usize) -> Result<Vec<String>> {
        let j = self.steps.start() + i as u32;
        let q = Self::point(j);
        let ball = witness_ball_point(&q, CERT_DIRECTIONS)?;
        let est = optimize_squeeze(&self.cap, &q, self.budget, self.seed ^ i as u64)?;
        let phi = Self::phi(j)?;
        let mut cells = vec![
            j.to_string(),
            fmt_f64(q[0]),
            fmt_f64(ball.ratio()),
            fmt_f64(est.lower),
            est.method.tag().to_string(),
        ];
        for r in GRID_RADII {
            let covered = grid(r).iter().all(|x| phi.apply(x).is_ok_and(|y| self.cap.contains(&y)));
            cells.push(covered.to_string());
        }
        Ok(cells)
    }
}
