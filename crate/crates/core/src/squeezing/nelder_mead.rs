//! Nelder–Mead with dimension-adaptive coefficients and in-place restarts.

/// Result of a minimization run.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Minimizes `f` from `x0` with initial simplex steps `step`, using at most
/// `max_evals` evaluations. On collapse the simplex is rebuilt around the best
/// point with half the previous steps, until the budget is spent or the steps
/// fall below `1e-12`.
pub fn minimize(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], step: &[f64], max_evals: usize) -> Minimum {
    let n = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        if *evals >= max_evals {
            return f64::INFINITY;
        }
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best = Minimum { x: x0.to_vec(), value: eval(x0, &mut evals), evaluations: 0 };
    if n == 0 {
        best.evaluations = evals;
        return best;
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let mut scale = 1.0;
    'restart: while evals < max_evals && scale > 1e-12 {
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(best.x.clone(), best.value)];
        for i in 0..n {
            if evals >= max_evals {
                break 'restart;
            }
            let mut x = best.x.clone();
            x[i] += step[i] * scale;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[0].1 < best.value {
                best.x = simplex[0].0.clone();
                best.value = simplex[0].1;
            }
            let spread = simplex[n].1 - simplex[0].1;
            let size = simplex
                .iter()
                .skip(1)
                .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if evals >= max_evals {
                break 'restart;
            }
            if size < 1e-13 || (spread.abs() <= 1e-15 * simplex[0].1.abs().max(1e-300) && size < 1e-9) {
                scale *= 0.5;
                continue 'restart;
            }
            let centroid: Vec<f64> =
                (0..n).map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / nf).collect();
            let along = |t: f64| -> Vec<f64> {
                centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect()
            };
            let xr = along(alpha);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = along(gamma);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let (xc, fc) = if fr < simplex[n].1 {
                    let xc = along(alpha * rho);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                } else {
                    let xc = along(-rho);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                };
                if fc < simplex[n].1.min(fr) {
                    simplex[n] = (xc, fc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for (x, v) in simplex.iter_mut().skip(1) {
                        for j in 0..n {
                            x[j] = x0[j] + sigma * (x[j] - x0[j]);
                        }
                        *v = eval(x, &mut evals);
                    }
                }
            }
        }
    }
    best.evaluations = evals;
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = minimize(f, &[-1.2, 1.0], &[0.5, 0.5], 4000);
        assert!(m.value < 1e-12, "{m:?}");
        assert!(m.evaluations <= 4000);
    }

    #[test]
    fn respects_budget_and_is_monotone() {
        let f = |x: &[f64]| x.iter().map(|v| (v - 0.3).abs()).sum::<f64>();
        let mut last = f64::INFINITY;
        for budget in [10, 50, 200, 800] {
            let m = minimize(f, &[1.0, -1.0, 2.0], &[0.1, 0.1, 0.1], budget);
            assert!(m.evaluations <= budget);
            assert!(m.value <= last);
            last = m.value;
        }
        assert!(last < 1e-6);
    }
}
