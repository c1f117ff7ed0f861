//! Deterministic direction sets on the unit sphere.

use std::f64::consts::PI;

use nalgebra::DVector;

/// `n` unit directions in ℝ^d, reproducible without any RNG state.
///
/// * `d = 1`: `±1`
/// * `d = 2`: equispaced angles `2πk/n`, so axis and diagonal directions are
///   hit exactly whenever `n` is a multiple of 8
/// * `d = 3`: Fibonacci lattice
/// * `d ≥ 4`: Halton points pushed through Box–Muller and normalized
pub fn unit_directions(d: usize, n: usize) -> Vec<DVector<f64>> {
    match d {
        0 => Vec::new(),
        1 => vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)],
        2 => (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                DVector::from_vec(vec![t.cos(), t.sin()])
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let t = golden * k as f64;
                    DVector::from_vec(vec![r * t.cos(), r * t.sin(), z])
                })
                .collect()
        }
        _ => (0..n).map(|k| halton_gaussian_direction(d, k + 1)).collect(),
    }
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in base `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut result = 0.0;
    let mut f = inv;
    while index > 0 {
        result += (index % base) as f64 * f;
        index /= base;
        f *= inv;
    }
    result
}

/// The `index`-th Halton point in `[0,1)^dim` (dim ≤ 16).
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    (0..dim).map(|i| radical_inverse(index, PRIMES[i])).collect()
}

fn halton_gaussian_direction(d: usize, index: usize) -> DVector<f64> {
    let pairs = d.div_ceil(2);
    let u = halton(index as u64, 2 * pairs);
    let mut g = Vec::with_capacity(2 * pairs);
    for k in 0..pairs {
        let u1 = u[2 * k].max(1e-12);
        let u2 = u[2 * k + 1];
        let r = (-2.0 * u1.ln()).sqrt();
        g.push(r * (2.0 * PI * u2).cos());
        g.push(r * (2.0 * PI * u2).sin());
    }
    g.truncate(d);
    let v = DVector::from_vec(g);
    let n = v.norm();
    if n > 0.0 {
        v / n
    } else {
        let mut e = DVector::zeros(d);
        e[0] = 1.0;
        e
    }
}
