//! Families of expression pairs `(F_j, G_j)` defining bilinear form checks,
//! and the catalog family behind the angle-of-analyticity application.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, EvalError, Result};
use crate::forms::expr::Expr;

/// Sign of the rotation `e^{+i phi}` / `e^{-i phi}` in the analyticity
/// family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `m` pairs of scalar functions `C^d -> C` given as expressions, with an
/// optional catalog tag and named real parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FormFamily {
    d: usize,
    pairs: Vec<(Expr, Expr)>,
    pub name: Option<String>,
    pub params: BTreeMap<String, f64>,
}

impl FormFamily {
    pub fn new(d: usize, pairs: Vec<(Expr, Expr)>) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("a form family needs arity d >= 1"));
        }
        if pairs.is_empty() {
            return Err(Error::invalid("a form family needs at least one pair"));
        }
        for (j, (f, g)) in pairs.iter().enumerate() {
            let used = f.arity().max(g.arity());
            if used > d {
                return Err(Error::invalid(format!(
                    "pair {j} uses {used} variables but the family declares d = {d}"
                )));
            }
        }
        Ok(FormFamily {
            d,
            pairs,
            name: None,
            params: BTreeMap::new(),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(Expr, Expr)] {
        &self.pairs
    }

    /// The scalar form `s(x) = Re sum_j F_j(x) G_j(x)`.
    pub fn scalar_value(&self, x: &[Complex64]) -> Result<f64, EvalError> {
        let mut acc = Complex64::ZERO;
        for (f, g) in &self.pairs {
            acc += f.eval(x)? * g.eval(x)?;
        }
        Ok(acc.re)
    }

    /// Magnitude yardstick `1 + sum_j |F_j(x)| |G_j(x)|` used to normalize
    /// verdict values: roundoff in the scalar form is proportional to it.
    pub fn scalar_scale(&self, x: &[Complex64]) -> Result<f64, EvalError> {
        let mut acc = 1.0f64;
        for (f, g) in &self.pairs {
            acc += f.eval(x)?.norm() * g.eval(x)?.norm();
        }
        Ok(acc)
    }
}

/// The analyticity family: `F(x) = x`, `G(x) = e^{sign * i phi} conj(x) |x|^{p-2}`
/// with `G(0) = 0` (for `p < 2` the product extends continuously by zero at
/// the origin, realized by the vanishing-at-zero power node).
pub fn family_analyticity(p: f64, phi: f64, sign: Sign) -> Result<FormFamily> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::invalid(format!("analyticity family needs p > 1, got {p}")));
    }
    if !phi.is_finite() {
        return Err(Error::invalid("phi must be finite"));
    }
    let f = Expr::Var(0);
    let g = Expr::Mul(
        Box::new(Expr::Mul(
            Box::new(Expr::Phase(sign.factor() * phi)),
            Box::new(Expr::Conj(Box::new(Expr::Var(0)))),
        )),
        Box::new(Expr::AbsPow {
            base: Box::new(Expr::Var(0)),
            exponent: p - 2.0,
            vanishing: true,
        }),
    );
    let mut family = FormFamily::new(1, vec![(f, g)])?;
    family.name = Some("analyticity".to_string());
    family.params.insert("p".to_string(), p);
    family.params.insert("phi".to_string(), phi);
    family
        .params
        .insert("sign".to_string(), sign.factor());
    Ok(family)
}
