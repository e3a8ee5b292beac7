//! Derivative-free local minimizers: a Nelder-Mead simplex and a golden
//! section line search. Both are deterministic in their inputs.

/// Result of a local minimization.
#[derive(Debug, Clone)]
pub struct MinResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

/// Nelder-Mead simplex descent from `x0`.
///
/// The objective may return `f64::INFINITY` to mark infeasible points
/// (evaluation errors, excluded regions); the simplex then moves away from
/// them.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    initial_step: f64,
    max_iter: usize,
) -> MinResult {
    let n = x0.len();
    assert!(n > 0, "need at least one coordinate");
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        let step = if v[i].abs() > 1e-8 {
            initial_step * v[i].abs()
        } else {
            initial_step
        };
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evals = n + 1;

    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = (values[n] - values[0]).abs();
        let diameter = (1..=n)
            .map(|i| {
                simplex[0]
                    .iter()
                    .zip(&simplex[i])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0f64, f64::max);
        if spread < 1e-14 * (1.0 + values[0].abs()) && diameter < 1e-12 {
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0f64; n];
        for v in simplex.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }

        let worst = simplex[n].clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst)
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let f_reflect = f(&reflect);
        evals += 1;

        if f_reflect < values[0] {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + gamma * (c - w))
                .collect();
            let f_expand = f(&expand);
            evals += 1;
            if f_expand < f_reflect {
                simplex[n] = expand;
                values[n] = f_expand;
            } else {
                simplex[n] = reflect;
                values[n] = f_reflect;
            }
        } else if f_reflect < values[n - 1] {
            simplex[n] = reflect;
            values[n] = f_reflect;
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + rho * (w - c))
                .collect();
            let f_contract = f(&contract);
            evals += 1;
            if f_contract < values[n] {
                simplex[n] = contract;
                values[n] = f_contract;
            } else {
                // Shrink towards the best vertex.
                let best = simplex[0].clone();
                for i in 1..=n {
                    for (x, b) in simplex[i].iter_mut().zip(&best) {
                        *x = b + sigma * (*x - b);
                    }
                    values[i] = f(&simplex[i]);
                    evals += 1;
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    MinResult {
        x: simplex[best].clone(),
        value: values[best],
        evals,
    }
}

/// Golden section minimization of a univariate function on `[a, b]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, a: f64, b: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + (x[1] + 2.0).powi(2) + 3.0;
        let res = nelder_mead(f, &[0.0, 0.0], 0.5, 500);
        assert!((res.x[0] - 1.5).abs() < 1e-6);
        assert!((res.x[1] + 2.0).abs() < 1e-6);
        assert!((res.value - 3.0).abs() < 1e-10);
    }

    #[test]
    fn walks_away_from_infeasible_region() {
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::INFINITY
            } else {
                (x[0] - 2.0).powi(2)
            }
        };
        let res = nelder_mead(f, &[0.5, 0.0], 0.25, 500);
        assert!((res.x[0] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn golden_section_on_cosine() {
        let (x, v) = golden_section_min(|t: f64| t.cos(), 2.0, 4.5, 80);
        assert!((x - std::f64::consts::PI).abs() < 1e-9);
        assert!((v + 1.0).abs() < 1e-12);
    }
}
