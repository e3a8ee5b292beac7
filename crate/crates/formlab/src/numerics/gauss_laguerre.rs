//! Gauss-Laguerre quadrature nodes and weights for the weight `e^{-x}` on
//! `[0, inf)`.
//!
//! Nodes are the roots of the Laguerre polynomial `L_n`, located by Newton
//! iteration from the classical initial guesses; a rule with `n` nodes
//! integrates `e^{-x} p(x)` exactly for polynomials up to degree `2n - 1`.

use crate::error::{Error, Result};

/// Returns `(nodes, weights)` of the n-point rule so that
/// `integral_0^inf e^{-x} f(x) dx ~= sum_k w_k f(x_k)`.
pub fn gauss_laguerre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::invalid("quadrature needs at least one node"));
    }
    let nf = n as f64;
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let mut z = 0.0f64;

    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - nodes[i - 2])
            }
        };

        let mut converged = false;
        let mut deriv = 0.0;
        let mut prev = 0.0;
        for _ in 0..200 {
            // Evaluate L_n and L_{n-1} by the three-term recurrence.
            let mut p1 = 1.0f64;
            let mut p2 = 0.0f64;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = (((2 * j - 1) as f64 - z) * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            deriv = nf * (p1 - p2) / z;
            prev = p2;
            let z_old = z;
            z -= p1 / deriv;
            if (z - z_old).abs() <= 1e-14 * z.abs().max(1.0) {
                converged = true;
            }
            if converged {
                break;
            }
        }
        if !converged {
            return Err(Error::numeric(format!(
                "Laguerre root {i} of degree {n} did not converge"
            )));
        }
        nodes[i] = z;
        weights[i] = -1.0 / (deriv * nf * prev);
    }
    Ok((nodes, weights))
}
