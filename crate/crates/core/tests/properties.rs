use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use projsqueeze::domains::spec::{builtin, triangle};
use projsqueeze::domains::{polygon_to_polytope, HalfspacePolytope};
use projsqueeze::metrics::{finsler_f, hilbert_distance, integrated_distance};
use projsqueeze::projective::{ball_automorphism, cross_ratio, frankel_phi};
use projsqueeze::squeezing::{certify, optimize_squeeze, upper_bound_squeeze, witness_strictly_convex};
use projsqueeze::{Body, ProjectiveMap};

fn near_identity(d: usize) -> impl Strategy<Value = ProjectiveMap> {
    prop::collection::vec(-0.3f64..0.3, (d + 1) * (d + 1)).prop_filter_map("singular", move |e| {
        let m = DMatrix::identity(d + 1, d + 1) + DMatrix::from_row_slice(d + 1, d + 1, &e);
        ProjectiveMap::new(m).ok()
    })
}

fn point2(r: f64) -> impl Strategy<Value = DVector<f64>> {
    (-r..r, -r..r).prop_map(|(x, y)| DVector::from_vec(vec![x, y]))
}

/// Positive barycentric combinations of the triangle's vertices.
fn in_triangle() -> impl Strategy<Value = DVector<f64>> {
    prop::array::uniform3(0.01f64..1.0).prop_map(|w| {
        let s: f64 = w.iter().sum();
        (0..3).fold(DVector::zeros(2), |acc, k| {
            let t = std::f64::consts::TAU * k as f64 / 3.0;
            acc + DVector::from_vec(vec![t.cos(), t.sin()]) * (w[k] / s)
        })
    })
}

/// Square `(−1,1)²` and a map whose singular line misses its closure.
fn square_and_map() -> impl Strategy<Value = (HalfspacePolytope, ProjectiveMap)> {
    near_identity(2).prop_filter_map("crosses the square", |g| {
        let sq = HalfspacePolytope::cuboid(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        let img = sq.pushforward(&g).ok()?;
        Some((img, g))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn inverse_undoes_map(g in near_identity(3), x in prop::collection::vec(-0.5f64..0.5, 3)) {
        let x = DVector::from_vec(x);
        if let Ok(y) = g.apply(&x) {
            let back = g.inverse().unwrap().apply(&y).unwrap();
            prop_assert!((back - &x).norm() < 1e-9 * (1.0 + y.norm()));
        }
    }

    #[test]
    fn composition_is_sequential_application(f in near_identity(2), g in near_identity(2), x in point2(0.5)) {
        if let Ok(gx) = g.apply(&x) {
            if let (Ok(a), Ok(b)) = (f.apply(&gx), f.compose(&g).apply(&x)) {
                prop_assert!((&a - &b).norm() < 1e-9 * (1.0 + a.norm()));
            }
        }
    }

    #[test]
    fn cross_ratio_is_invariant(g in near_identity(2), t in prop::array::uniform4(-0.5f64..0.5)) {
        let mut t = t;
        t.sort_by(f64::total_cmp);
        prop_assume!(t.windows(2).all(|w| w[1] - w[0] > 1e-3));
        let base = DVector::from_vec(vec![0.1, -0.2]);
        let dir = DVector::from_vec(vec![0.6, 0.8]);
        let pts: Vec<DVector<f64>> = t.iter().map(|s| &base + &dir * *s).collect();
        let imgs: Vec<DVector<f64>> = pts.iter().filter_map(|p| g.apply(p).ok()).collect();
        prop_assume!(imgs.len() == 4 && imgs.iter().all(|p| p.norm() < 1e3));
        let before = cross_ratio(&pts[0], &pts[1], &pts[2], &pts[3]).unwrap();
        let after = cross_ratio(&imgs[0], &imgs[1], &imgs[2], &imgs[3]).unwrap();
        prop_assert!((before - after).abs() < 1e-7 * before.abs().max(1.0));
    }

    #[test]
    fn hilbert_and_finsler_are_invariant((img, g) in square_and_map(), p in point2(0.9), q in point2(0.9), x in point2(1.0)) {
        prop_assume!(x.norm() > 1e-3);
        let sq: Body = HalfspacePolytope::cuboid(&[-1.0, -1.0], &[1.0, 1.0]).unwrap().into();
        let img: Body = img.into();
        let (gp, gq) = (g.apply(&p).unwrap(), g.apply(&q).unwrap());
        let d0 = hilbert_distance(&sq, &p, &q).unwrap();
        let d1 = hilbert_distance(&img, &gp, &gq).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-8 * (1.0 + d0), "{d0} vs {d1}");
        let f0 = finsler_f(&sq, &p, &x).unwrap().f;
        let f1 = finsler_f(&img, &gp, &g.push_vector(&p, &x).unwrap()).unwrap().f;
        prop_assert!((f0 - f1).abs() < 1e-8 * (1.0 + f0), "{f0} vs {f1}");
    }

    #[test]
    fn hilbert_triangle_inequality(a in in_triangle(), b in in_triangle(), c in in_triangle()) {
        let tri: Body = triangle().into();
        let d = |u: &DVector<f64>, v: &DVector<f64>| hilbert_distance(&tri, u, v).unwrap();
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-10);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() < 1e-12);
    }

    #[test]
    fn finsler_is_the_derivative_of_the_distance(p in point2(0.8), x in point2(1.0)) {
        prop_assume!(x.norm() > 0.1);
        let ball = builtin("ball2").unwrap().unwrap();
        prop_assume!(ball.contains(&p));
        let h = 1e-6;
        let q = &p + &x * h;
        prop_assume!(ball.contains(&q));
        let fd = hilbert_distance(&ball, &p, &q).unwrap() / h;
        let f = finsler_f(&ball, &p, &x).unwrap().f;
        // d(p, p + hX) = hF + O(h²F²)
        prop_assert!((fd - f).abs() < 1e-6 * f + 2.0 * h * f * f, "{fd} vs {f}");
    }

    #[test]
    fn ball_automorphisms_preserve_the_sphere(a in point2(0.7), theta in 0.0f64..std::f64::consts::TAU) {
        prop_assume!(a.norm() < 0.99);
        let g = ball_automorphism(&a).unwrap();
        prop_assert!(g.apply(&a).unwrap().norm() < 1e-12);
        let s = DVector::from_vec(vec![theta.cos(), theta.sin()]);
        prop_assert!((g.apply(&s).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frankel_image_of_the_orthant_is_in_the_ball(x in prop::collection::vec(-1.0f64..1e3, 3)) {
        let x = DVector::from_vec(x);
        prop_assume!(x.iter().all(|v| *v > -1.0));
        prop_assert!(frankel_phi(3).apply(&x).unwrap().norm() < 1.0);
    }

    #[test]
    fn integrated_distance_matches_hilbert(p in point2(0.6), q in point2(0.6)) {
        let v: Vec<DVector<f64>> = [[0.9, -0.7], [0.8, 0.9], [-0.6, 0.75], [-0.95, -0.2], [0.1, -0.9]]
            .iter()
            .map(|c| DVector::from_vec(c.to_vec()))
            .collect();
        let poly: Body = polygon_to_polytope(&v).unwrap().into();
        prop_assume!(poly.contains(&p) && poly.contains(&q));
        let d = hilbert_distance(&poly, &p, &q).unwrap();
        let i = integrated_distance(&poly, &p, &q, 64).unwrap();
        prop_assert!((d - i).abs() < 1e-6, "{d} vs {i}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn squeezing_bounds_are_ordered(z in point2(0.9), seed in 0u64..1000) {
        for name in ["square", "lshape", "triangle"] {
            let body = builtin(name).unwrap().unwrap();
            if !body.contains(&z) {
                continue;
            }
            let est = optimize_squeeze(&body, &z, 400, seed).unwrap();
            let upper = upper_bound_squeeze(&body, &z, 512).unwrap();
            prop_assert!(est.lower > 0.0 && est.lower <= upper + 1e-9, "{name}: {} > {upper}", est.lower);
        }
    }

    #[test]
    fn recertification_with_more_samples_is_consistent(t in 1e-4f64..0.3) {
        let quartic = builtin("quartic").unwrap().unwrap();
        let q = DVector::from_vec(vec![1.0 - t, 0.0]);
        let w = witness_strictly_convex(&quartic, &q).unwrap();
        let n = 1024;
        let coarse = certify(&quartic, &q, &w.map, n, 0).unwrap();
        let fine = certify(&quartic, &q, &w.map, 4 * n, 0).unwrap();
        let tol = 1e-9;
        prop_assert!(fine.r_in <= coarse.r_in * (1.0 + tol));
        prop_assert!(fine.r_out >= coarse.r_out * (1.0 - tol));
    }
}
