//! Decay of the comparison upper bound `min C/F` approaching the reflex
//! vertex of the L-shape.

use nalgebra::DVector;

use super::{fit_slope, fmt_f64, Experiment};
use crate::domains::spec::{lshape, spec_hash};
use crate::domains::Body;
use crate::error::Result;
use crate::metrics::{finsler_f, metric_sample};
use crate::squeezing::upper_bound_squeeze;

/// `t_k = 2^{−k}` for these `k`.
pub const DECAY_STEPS: std::ops::RangeInclusive<u32> = 2..=12;
/// Rows dropped from each end before fitting the slope.
const FIT_DROP: (usize, usize) = (2, 1);

pub struct NonconvexDecay {
    pub samples: usize,
    pub seed: u64,
    body: Body,
    hull: Body,
}

impl NonconvexDecay {
    pub fn new(samples: usize, seed: u64) -> Result<Self> {
        let body = lshape();
        let hull = body.convex_hull()?;
        Ok(NonconvexDecay { samples, seed, body, hull })
    }

    /// Reflex vertex, unit direction from it into the body, and `X_k`.
    fn geometry() -> (DVector<f64>, DVector<f64>) {
        let p = DVector::zeros(2);
        let into_body = DVector::from_vec(vec![-1.0, -1.0]).normalize();
        (p, into_body)
    }
}

impl Experiment for NonconvexDecay {
    fn id(&self) -> &'static str {
        "nonconvex-decay"
    }

    fn spec_hash(&self) -> String {
        spec_hash("builtin:lshape")
    }

    fn seed(&self) -> u64 {
        self.seed
    }

    fn columns(&self) -> Vec<String> {
        ["k", "t", "x", "y", "upper", "F", "C", "C_over_F", "slope"].map(String::from).to_vec()
    }

    fn summary_columns(&self) -> usize {
        1
    }

    fn len(&self) -> usize {
        DECAY_STEPS.count()
    }

    fn row(&self, i: usize) -> Result<Vec<String>> {
        let k = DECAY_STEPS.start() + i as u32;
        let t = 0.5f64.powi(k as i32);
        let (p, into_body) = Self::geometry();
        let pk = &p + &into_body * t;
        let xk = (&p - &pk).normalize();
        let upper = upper_bound_squeeze(&self.body, &pk, self.samples)?;
        let s = metric_sample(&self.body, &self.hull, &pk, &xk)?;
        let f = finsler_f(&self.body, &pk, &xk)?.f;
        let c = s.c.expect("computed against the hull");
        Ok(vec![
            k.to_string(),
            fmt_f64(t),
            fmt_f64(pk[0]),
            fmt_f64(pk[1]),
            fmt_f64(upper),
            fmt_f64(f),
            fmt_f64(c),
            fmt_f64(c / f),
        ])
    }

    /// Least squares of `log upper` on `log t` over the middle rows.
    fn finish(&self, rows: &mut [Vec<String>]) -> Result<()> {
        let n = rows.len();
        let (lo, hi) = (FIT_DROP.0.min(n), n.saturating_sub(FIT_DROP.1));
        let col = |r: &Vec<String>, c: usize| r[c].parse::<f64>().unwrap_or(f64::NAN).ln();
        let (xs, ys): (Vec<f64>, Vec<f64>) = rows[lo..hi].iter().map(|r| (col(r, 5), col(r, 8))).unzip();
        let slope = if xs.len() >= 2 { fit_slope(&xs, &ys) } else { f64::NAN };
        rows.iter_mut().for_each(|r| r.push(fmt_f64(slope)));
        Ok(())
    }
}
