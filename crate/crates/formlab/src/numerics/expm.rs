//! Matrix exponential by scaling-and-squaring with a degree-13 Padé core.

use ndarray::Array2;
use num_complex::Complex64;

use super::linalg::{identity, mat_mul, one_norm, solve};
use crate::error::Result;

/// Degree-13 Padé numerator coefficients (denominator uses alternating signs).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the degree-13 approximant reaches full double
/// precision without scaling.
const THETA13: f64 = 5.371920351148152;

/// Computes `exp(A)` for a square complex matrix.
pub fn expm(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return Ok(Array2::from_elem((0, 0), Complex64::ZERO));
    }
    if n == 1 {
        let mut out = Array2::from_elem((1, 1), Complex64::ZERO);
        out[[0, 0]] = a[[0, 0]].exp();
        return Ok(out);
    }

    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new((0.5f64).powi(squarings as i32), 0.0);
    let a_scaled = a.mapv(|v| v * scale);

    let mut result = pade13(&a_scaled)?;
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    Ok(result)
}

fn pade13(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    let eye = identity(n);
    let a2 = mat_mul(a, a);
    let a4 = mat_mul(&a2, &a2);
    let a6 = mat_mul(&a2, &a4);

    let b = |k: usize| Complex64::new(PADE13[k], 0.0);

    let w1 = a6.mapv(|v| v * b(13)) + a4.mapv(|v| v * b(11)) + a2.mapv(|v| v * b(9));
    let w2 = mat_mul(&w1, &a6)
        + a6.mapv(|v| v * b(7))
        + a4.mapv(|v| v * b(5))
        + a2.mapv(|v| v * b(3))
        + eye.mapv(|v| v * b(1));
    let u = mat_mul(a, &w2);

    let v1 = a6.mapv(|v| v * b(12)) + a4.mapv(|v| v * b(10)) + a2.mapv(|v| v * b(8));
    let v = mat_mul(&v1, &a6)
        + a6.mapv(|v| v * b(6))
        + a4.mapv(|v| v * b(4))
        + a2.mapv(|v| v * b(2))
        + eye.mapv(|v| v * b(0));

    let num = &v + &u;
    let den = &v - &u;
    solve(&den, &num)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::max_abs;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = Array2::from_elem((3, 3), Complex64::ZERO);
        let e = expm(&z).unwrap();
        let diff = &e - &identity(3);
        assert!(max_abs(&diff) < 1e-15);
    }

    #[test]
    fn exp_of_diagonal() {
        let mut a = Array2::from_elem((2, 2), Complex64::ZERO);
        a[[0, 0]] = c(1.0, 0.0);
        a[[1, 1]] = c(-2.0, 0.5);
        let e = expm(&a).unwrap();
        assert!((e[[0, 0]] - c(1.0, 0.0).exp()).norm() < 1e-14);
        assert!((e[[1, 1]] - c(-2.0, 0.5).exp()).norm() < 1e-14);
        assert!(e[[0, 1]].norm() < 1e-15);
        assert!(e[[1, 0]].norm() < 1e-15);
    }

    #[test]
    fn exp_of_involution_matches_closed_form() {
        // For the swap matrix J, exp(tJ) = cosh(t) I + sinh(t) J.
        let t = 0.37;
        let mut a = Array2::from_elem((2, 2), Complex64::ZERO);
        a[[0, 1]] = c(t, 0.0);
        a[[1, 0]] = c(t, 0.0);
        let e = expm(&a).unwrap();
        assert!((e[[0, 0]].re - t.cosh()).abs() < 1e-14);
        assert!((e[[0, 1]].re - t.sinh()).abs() < 1e-14);
    }

    #[test]
    fn exp_handles_large_norm_via_scaling() {
        let mut a = Array2::from_elem((2, 2), Complex64::ZERO);
        a[[0, 0]] = c(30.0, 0.0);
        a[[1, 1]] = c(-30.0, 0.0);
        let e = expm(&a).unwrap();
        let big = 30.0f64.exp();
        assert!((e[[0, 0]].re - big).abs() / big < 1e-12);
        assert!((e[[1, 1]].re - (-30.0f64).exp()).abs() < 1e-20);
    }

    #[test]
    fn additivity_in_commuting_arguments() {
        // exp((s+t)A) = exp(sA) exp(tA) for any A.
        let a = Array2::from_shape_vec(
            (2, 2),
            vec![c(0.3, 0.1), c(-0.2, 0.4), c(0.5, -0.1), c(-0.3, 0.0)],
        )
        .unwrap();
        let s = 0.7;
        let t = 1.9;
        let whole = expm(&a.mapv(|v| v * c(s + t, 0.0))).unwrap();
        let parts = mat_mul(
            &expm(&a.mapv(|v| v * c(s, 0.0))).unwrap(),
            &expm(&a.mapv(|v| v * c(t, 0.0))).unwrap(),
        );
        let diff = &whole - &parts;
        assert!(max_abs(&diff) < 1e-13);
    }
}
