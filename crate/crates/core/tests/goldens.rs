//! Seed-pinned values recorded in `goldens.toml`. They guard against silent
//! behavioural drift; correctness is checked elsewhere against exact values.

use projsqueeze::domains::spec::{builtin, triangle};
use projsqueeze::experiments::{run, GapScan};
use projsqueeze::squeezing::oracle_squeeze_2d;
use projsqueeze::{AffinePoint, Body};
use toml::Table;

fn goldens() -> Table {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/goldens.toml")).unwrap();
    text.parse().unwrap()
}

fn float(t: &Table, section: &str, key: &str) -> f64 {
    let v = &t[section][key];
    v.as_float().or_else(|| v.as_integer().map(|i| i as f64)).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

#[test]
fn oracle_values_reproduce() {
    let g = goldens();
    let seed = float(&g, "oracle", "seed") as u64;
    let samples = float(&g, "oracle", "samples") as usize;
    let tri: Body = triangle().into();
    let v = oracle_squeeze_2d(&tri, &AffinePoint::zeros(2), samples, seed).unwrap();
    assert!(close(v, float(&g, "oracle", "triangle_barycenter")), "{v}");
    let t = float(&g, "oracle", "quartic_dist");
    let quartic = builtin("quartic").unwrap().unwrap();
    let v = oracle_squeeze_2d(&quartic, &AffinePoint::from_vec(vec![1.0 - t, 0.0]), samples, seed).unwrap();
    assert!(close(v, float(&g, "oracle", "quartic")), "{v}");
}

#[test]
fn gap_scan_floor_reproduces() {
    let g = goldens();
    let exp = GapScan::new(
        float(&g, "gap_scan", "bodies") as usize,
        float(&g, "gap_scan", "points") as usize,
        float(&g, "gap_scan", "budget") as usize,
        float(&g, "gap_scan", "seed") as u64,
    );
    let floor = run(&exp, false).unwrap().floats("lower").into_iter().fold(f64::INFINITY, f64::min);
    assert!(close(floor, float(&g, "gap_scan", "floor")), "{floor}");
}
