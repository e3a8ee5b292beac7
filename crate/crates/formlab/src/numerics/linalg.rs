//! Dense complex matrix helpers.
//!
//! Multiplication and norms run their inner sums in ascending index order,
//! which keeps every result bit-reproducible regardless of thread count.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn identity(n: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

/// Plain triple-loop product with a fixed inner summation order.
pub fn mat_mul(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (n, k) = (a.nrows(), a.ncols());
    let m = b.ncols();
    assert_eq!(k, b.nrows(), "inner dimensions must agree");
    let mut out = Array2::from_elem((n, m), Complex64::ZERO);
    for i in 0..n {
        for j in 0..m {
            let mut acc = Complex64::ZERO;
            for l in 0..k {
                acc += a[[i, l]] * b[[l, j]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// Maximum absolute column sum.
pub fn one_norm(a: &Array2<Complex64>) -> f64 {
    let mut max = 0.0f64;
    for j in 0..a.ncols() {
        let mut sum = 0.0;
        for i in 0..a.nrows() {
            sum += a[[i, j]].norm();
        }
        max = max.max(sum);
    }
    max
}

/// Maximum absolute row sum.
pub fn inf_norm(a: &Array2<Complex64>) -> f64 {
    let mut max = 0.0f64;
    for i in 0..a.nrows() {
        let mut sum = 0.0;
        for j in 0..a.ncols() {
            sum += a[[i, j]].norm();
        }
        max = max.max(sum);
    }
    max
}

pub fn max_abs(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "coefficient matrix must be square");
    assert_eq!(n, b.nrows(), "right-hand side has wrong row count");
    let m = b.ncols();

    let mut lu = a.clone();
    let mut rhs = b.clone();

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = lu[[col, col]].norm();
        for row in (col + 1)..n {
            let mag = lu[[row, col]].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag == 0.0 {
            return Err(Error::numeric("singular matrix in linear solve"));
        }
        if pivot_row != col {
            for j in 0..n {
                lu.swap([col, j], [pivot_row, j]);
            }
            for j in 0..m {
                rhs.swap([col, j], [pivot_row, j]);
            }
        }
        let pivot = lu[[col, col]];
        for row in (col + 1)..n {
            let factor = lu[[row, col]] / pivot;
            if factor == Complex64::ZERO {
                continue;
            }
            for j in col..n {
                let v = lu[[col, j]];
                lu[[row, j]] -= factor * v;
            }
            for j in 0..m {
                let v = rhs[[col, j]];
                rhs[[row, j]] -= factor * v;
            }
        }
    }

    let mut x = Array2::from_elem((n, m), Complex64::ZERO);
    for col in (0..n).rev() {
        for j in 0..m {
            let mut sum = rhs[[col, j]];
            for k in (col + 1)..n {
                sum -= lu[[col, k]] * x[[k, j]];
            }
            x[[col, j]] = sum / lu[[col, col]];
        }
    }
    Ok(x)
}

/// Estimates the spectral norm by power iteration on `A* A`.
///
/// The start vector mixes all coordinates so the iteration cannot begin
/// orthogonal to the dominant singular vector for generic matrices.
pub fn spectral_norm_estimate(a: &Array2<Complex64>, iters: usize) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + (i as f64) * 1e-3, 0.5 - (i as f64) * 7e-4))
        .collect();
    let mut sigma = 0.0f64;
    for _ in 0..iters.max(1) {
        // w = A v
        let mut w = vec![Complex64::ZERO; a.nrows()];
        for i in 0..a.nrows() {
            let mut acc = Complex64::ZERO;
            for j in 0..n {
                acc += a[[i, j]] * v[j];
            }
            w[i] = acc;
        }
        // u = A* w
        let mut u = vec![Complex64::ZERO; n];
        for j in 0..n {
            let mut acc = Complex64::ZERO;
            for i in 0..a.nrows() {
                acc += a[[i, j]].conj() * w[i];
            }
            u[j] = acc;
        }
        let norm_v: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let norm_w: f64 = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm_v == 0.0 || norm_w == 0.0 {
            return 0.0;
        }
        sigma = norm_w / norm_v;
        let norm_u: f64 = u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm_u == 0.0 {
            break;
        }
        for x in u.iter_mut() {
            *x /= norm_u;
        }
        v = u;
    }
    sigma
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mat_mul_against_hand_value() {
        let a = Array2::from_shape_vec((2, 2), vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let b = Array2::from_shape_vec((2, 2), vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, -1.0)])
            .unwrap();
        let p = mat_mul(&a, &b);
        assert_eq!(p[[0, 0]], c(0.0, 1.0));
        assert_eq!(p[[0, 1]], c(2.0, 0.0)); // 1*1 + i*(-i) = 1 + 1
        assert_eq!(p[[1, 0]], c(0.0, 0.0));
        assert_eq!(p[[1, 1]], c(2.0, 0.0));
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = Array2::from_shape_vec(
            (2, 2),
            vec![c(2.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)],
        )
        .unwrap();
        let x_true =
            Array2::from_shape_vec((2, 1), vec![c(2.0 / 3.0, 0.0), c(1.0 / 3.0, 0.0)]).unwrap();
        let b = mat_mul(&a, &x_true);
        let x = solve(&a, &b).unwrap();
        for i in 0..2 {
            assert!((x[[i, 0]] - x_true[[i, 0]]).norm() < 1e-14);
        }
    }

    #[test]
    fn solve_rejects_singular() {
        let a = Array2::from_elem((2, 2), c(1.0, 0.0));
        let b = Array2::from_elem((2, 1), c(1.0, 0.0));
        assert!(solve(&a, &b).is_err());
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let a = Array2::from_shape_vec(
            (2, 2),
            vec![c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        )
        .unwrap();
        let s = spectral_norm_estimate(&a, 50);
        assert!((s - 3.0).abs() < 1e-10, "estimate {s}");
    }

    #[test]
    fn norms_max_row_and_column_sums() {
        let a = Array2::from_shape_vec(
            (2, 2),
            vec![c(1.0, 0.0), c(0.0, -2.0), c(0.5, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert_eq!(inf_norm(&a), 3.0);
        assert_eq!(one_norm(&a), 2.0);
        assert_eq!(max_abs(&a), 2.0);
    }
}
