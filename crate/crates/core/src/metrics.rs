//! Projective Finsler metrics, the Hilbert distance and its integrated form.

use crate::domains::Body;
use crate::error::{Error, Result};
use crate::projective::{AffinePoint, TangentVector};

/// Exit data and metric values at `(p, X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSample {
    pub p: AffinePoint,
    pub x: TangentVector,
    pub p_plus: f64,
    pub p_minus: f64,
    /// `1/P₊ + 1/P₋`.
    pub f: f64,
    /// `F` of the convex hull, when computed.
    pub c: Option<f64>,
}

fn recip(t: f64) -> f64 {
    if t.is_infinite() {
        0.0
    } else {
        1.0 / t
    }
}

/// `F_D(p; X) = 1/P₊ + 1/P₋` with `P± = inf{λ > 0 : p ± λX ∉ D}`; `X` is not
/// normalized, so `F` is 1-homogeneous in `X`.
pub fn finsler_f(body: &Body, p: &AffinePoint, x: &TangentVector) -> Result<MetricSample> {
    let p_plus = body.ray_exit(p, x)?;
    let p_minus = body.exit_time(p, &(-x));
    Ok(MetricSample { p: p.clone(), x: x.clone(), p_plus, p_minus, f: recip(p_plus) + recip(p_minus), c: None })
}

/// `C_D = F` of the open convex hull.
pub fn caratheodory_c(body: &Body, p: &AffinePoint, x: &TangentVector) -> Result<f64> {
    if !body.contains(p) {
        return Err(Error::PointNotInterior);
    }
    if body.is_convex() {
        return finsler_f(body, p, x).map(|s| s.f);
    }
    let hull = body.convex_hull()?;
    finsler_f(&hull, p, x).map(|s| s.f)
}

/// `F` and `C` together; `C` is computed against a precomputed hull.
pub fn metric_sample(body: &Body, hull: &Body, p: &AffinePoint, x: &TangentVector) -> Result<MetricSample> {
    let mut s = finsler_f(body, p, x)?;
    s.c = Some(if body.is_convex() { s.f } else { finsler_f(hull, p, x)?.f });
    Ok(s)
}

/// `|log(ab; pq)|` with `a`, `b` the exits of the line through `p`, `q`;
/// an exit at infinity drops its factors.
pub fn hilbert_distance(body: &Body, p: &AffinePoint, q: &AffinePoint) -> Result<f64> {
    if !body.is_convex() {
        return Err(Error::UnsupportedBody("Hilbert distance needs a convex body"));
    }
    if !body.contains(p) || !body.contains(q) {
        return Err(Error::PointNotInterior);
    }
    let v = q - p;
    if v.norm() == 0.0 {
        return Ok(0.0);
    }
    // with p at t = 0, q at t = 1: a at −α, b at β
    let beta = body.exit_time(p, &v);
    let alpha = body.exit_time(p, &(-&v));
    if beta <= 1.0 {
        return Err(Error::SegmentExits);
    }
    // log((1+α)β / (α(β−1))) = log1p(1/α) − log1p(−1/β)
    Ok((recip(alpha).ln_1p() - (-recip(beta)).ln_1p()).abs())
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const MAX_PANELS: usize = 4096;

/// `∫₀¹ F(p + t(q−p); q−p) dt` by adaptive composite Gauss–Legendre with
/// `nodes` points per panel.
pub fn integrated_distance(body: &Body, p: &AffinePoint, q: &AffinePoint, nodes: usize) -> Result<f64> {
    if !body.contains(p) || !body.contains(q) {
        return Err(Error::PointNotInterior);
    }
    let v = q - p;
    if v.norm() == 0.0 {
        return Ok(0.0);
    }
    let (gx, gw) = gauss_legendre(nodes.max(1));
    let f = |t: f64| -> Result<f64> {
        let pt = p + &v * t;
        if !body.contains(&pt) {
            return Err(Error::SegmentExits);
        }
        Ok(recip(body.exit_time(&pt, &v)) + recip(body.exit_time(&pt, &(-&v))))
    };
    let panel = |a: f64, b: f64| -> Result<f64> {
        let (h, m) = (0.5 * (b - a), 0.5 * (a + b));
        let mut s = 0.0;
        for (xi, wi) in gx.iter().zip(&gw) {
            s += wi * f(m + h * xi)?;
        }
        Ok(s * h)
    };
    let mut total = 0.0;
    let first = panel(0.0, 1.0)?;
    // exit times near the boundary carry ~1e-12 relative rounding noise, so
    // tighter tolerances only bisect noise; the panel cap bounds the worst case
    let tol = 1e-12 * first.abs();
    let mut stack = vec![(0.0, 1.0, first, 0u32)];
    let mut panels = 0usize;
    while let Some((a, b, whole, depth)) = stack.pop() {
        panels += 1;
        let m = 0.5 * (a + b);
        let (left, right) = (panel(a, m)?, panel(m, b)?);
        let refined = left + right;
        if (refined - whole).abs() <= (1e-12 * refined.abs()).max(tol) || depth >= 40 || panels > MAX_PANELS {
            total += refined;
        } else {
            stack.push((a, m, left, depth + 1));
            stack.push((m, b, right, depth + 1));
        }
    }
    Ok(total)
}
