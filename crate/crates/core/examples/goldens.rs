//! Regenerates `goldens.toml`: seed-pinned oracle and experiment values that
//! the test suites treat as regression anchors (not ground truth).
//!
//!     cargo run --release -p projsqueeze --example goldens > crates/core/goldens.toml

use projsqueeze::domains::spec::{builtin, triangle};
use projsqueeze::experiments::{run, GapScan};
use projsqueeze::squeezing::oracle_squeeze_2d;
use projsqueeze::{AffinePoint, Body};

const SEED: u64 = 20240611;
const SAMPLES: usize = 100_000;

fn main() {
    let tri: Body = triangle().into();
    let v_tri = oracle_squeeze_2d(&tri, &AffinePoint::zeros(2), SAMPLES, SEED).expect("interior");
    let quartic = builtin("quartic").expect("builtin").expect("known");
    let t = 1e-4;
    let z = AffinePoint::from_vec(vec![1.0 - t, 0.0]);
    let v_quartic = oracle_squeeze_2d(&quartic, &z, SAMPLES, SEED).expect("interior");
    let floor = run(&GapScan::new(100, 25, 2000, 0), false)
        .expect("gap scan")
        .floats("lower")
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    println!("# seed-pinned regression anchors; regenerate with the goldens example");
    println!("[oracle]");
    println!("seed = {SEED}");
    println!("samples = {SAMPLES}");
    println!("triangle_barycenter = {v_tri:?}");
    println!("quartic_dist = {t:?}");
    println!("quartic = {v_quartic:?}");
    println!();
    println!("[gap_scan]");
    println!("bodies = 100");
    println!("points = 25");
    println!("budget = 2000");
    println!("seed = 0");
    println!("floor = {floor:?}");
}
