//! Squeezing near a strictly convex boundary point, along the inward normal.

use nalgebra::DVector;

use super::{fmt_f64, Experiment};
use crate::domains::{normalize_boundary_frame, spec::BodySpec, Body};
use crate::error::{Error, Result};
use crate::squeezing::{optimize_squeeze, witness_strictly_convex};

pub const DEFAULT_DISTS: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];

pub struct StrictLimit {
    pub spec: BodySpec,
    pub dists: Vec<f64>,
    pub budget: usize,
    pub seed: u64,
    boundary_point: DVector<f64>,
    normal: DVector<f64>,
}

impl StrictLimit {
    /// The boundary point is where the ray from the body's interior point
    /// along `+e₁` leaves it.
    pub fn new(spec: BodySpec, dists: Vec<f64>, budget: usize, seed: u64) -> Result<Self> {
        let body = &spec.body;
        let w = body.interior_point();
        let mut e1 = DVector::zeros(body.dim());
        e1[0] = 1.0;
        let s = body.exit_time(&w, &e1);
        if !s.is_finite() {
            return Err(Error::Unbounded);
        }
        let boundary_point = &w + e1 * s;
        let normal = body.outward_normal(&boundary_point).ok_or(Error::NotStrictlyConvex)?.normalize();
        // the frame at a nearby interior point must exist
        let probe = &boundary_point - &normal * 1e-3 * s;
        normalize_boundary_frame(body, &probe)?;
        Ok(StrictLimit { spec, dists, budget, seed, boundary_point, normal })
    }

    pub fn body(&self) -> &Body {
        &self.spec.body
    }
}

impl Experiment for StrictLimit {
    fn id(&self) -> &'static str {
        "strict-limit"
    }

    fn spec_hash(&self) -> String {
        self.spec.hash()
    }

    fn seed(&self) -> u64 {
        self.seed
    }

    fn columns(&self) -> Vec<String> {
        ["t", "x", "y", "delta", "witness_ratio", "lower", "one_minus_lower", "conservative", "method"]
            .map(String::from)
            .to_vec()
    }

    fn len(&self) -> usize {
        self.dists.len()
    }

    fn row(&self, i: usize) -> Result<Vec<String>> {
        let t = self.dists[i];
        let q = &self.boundary_point - &self.normal * t;
        let body = self.body();
        let frame = normalize_boundary_frame(body, &q)?;
        let w = witness_strictly_convex(body, &q)?;
        let est = optimize_squeeze(body, &q, self.budget, self.seed ^ i as u64)?;
        let conservative = est.witness.as_ref().and_then(|w| w.certificate.conservative);
        Ok(vec![
            fmt_f64(t),
            fmt_f64(q[0]),
            fmt_f64(q.get(1).copied().unwrap_or(0.0)),
            fmt_f64(frame.delta),
            fmt_f64(w.ratio()),
            fmt_f64(est.lower),
            fmt_f64(1.0 - est.lower),
            conservative.map(fmt_f64).unwrap_or_default(),
            est.method.tag().to_string(),
        ])
    }
}
