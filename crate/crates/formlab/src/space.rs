//! Finite discrete measure spaces, complex functions on them, integration
//! and L^p norms.
//!
//! A space is a list of strictly positive point masses. Every null set is
//! empty, so "almost everywhere" statements become exact pointwise
//! identities. All summations run in ascending point order so results are
//! bit-reproducible across runs and parallelism levels.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, PartialEq)]
struct SpaceData {
    weights: Vec<f64>,
}

/// A finite measure space: points `0..n` with strictly positive weights.
///
/// Cloning is cheap (shared storage); two spaces are compatible when they
/// hold bit-identical weight vectors.
#[derive(Debug, Clone)]
pub struct FiniteMeasureSpace {
    inner: Arc<SpaceData>,
}

impl PartialEq for FiniteMeasureSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner == other.inner
    }
}

impl FiniteMeasureSpace {
    /// Builds a space from point weights.
    ///
    /// Zero or negative weights are rejected rather than silently carried:
    /// with strictly positive masses the essential supremum is the plain
    /// maximum and no representative-choice issues arise.
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("a measure space needs at least one point"));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::invalid(format!("weight {i} is not finite: {w}")));
            }
            if w <= 0.0 {
                return Err(Error::invalid(format!(
                    "weight {i} must be strictly positive, got {w}"
                )));
            }
        }
        Ok(FiniteMeasureSpace {
            inner: Arc::new(SpaceData {
                weights: weights.to_vec(),
            }),
        })
    }

    /// The two-point probability space with equal masses 1/2.
    pub fn z2() -> Self {
        FiniteMeasureSpace::new(&[0.5, 0.5]).expect("static weights are valid")
    }

    pub fn n(&self) -> usize {
        self.inner.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.inner.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.inner.weights[i]
    }

    pub fn total_mass(&self) -> f64 {
        self.inner.weights.iter().sum()
    }

    fn check_compatible(&self, f: &CFunction) -> Result<()> {
        if *self != *f.space() {
            return Err(Error::invalid(
                "function does not live on the given measure space",
            ));
        }
        Ok(())
    }

    /// Integral of `f`: the weighted sum of values in ascending point order.
    pub fn integrate(&self, f: &CFunction) -> Result<Complex64> {
        self.check_compatible(f)?;
        let mut acc = Complex64::ZERO;
        for (w, v) in self.weights().iter().zip(f.values()) {
            acc += *w * v;
        }
        Ok(acc)
    }

    /// The bilinear (non-conjugating) pairing of `f` and `g`.
    ///
    /// No conjugation is applied; callers build the sesquilinear pairing by
    /// conjugating `g` themselves.
    pub fn duality_pair(&self, f: &CFunction, g: &CFunction) -> Result<Complex64> {
        self.check_compatible(f)?;
        self.check_compatible(g)?;
        let mut acc = Complex64::ZERO;
        for ((w, a), b) in self.weights().iter().zip(f.values()).zip(g.values()) {
            acc += *w * a * b;
        }
        Ok(acc)
    }

    /// Weighted L^p norm of `f`; for `p = inf` the maximum modulus (all
    /// weights are positive, so the essential sup is the max).
    pub fn lp_norm(&self, f: &CFunction, p: Exponent) -> Result<f64> {
        self.check_compatible(f)?;
        if p.is_infinite() {
            return Ok(f
                .values()
                .iter()
                .map(|v| v.norm())
                .fold(0.0f64, f64::max));
        }
        let p = p.get();
        let mut acc = 0.0f64;
        for (w, v) in self.weights().iter().zip(f.values()) {
            acc += w * v.norm().powf(p);
        }
        Ok(acc.powf(1.0 / p))
    }
}

/// An integrability exponent `p` with `1 <= p <= inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INF: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::invalid(format!("exponent must satisfy p >= 1, got {p}")));
        }
        Ok(Exponent(p))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// The dual exponent `q` with `1/p + 1/q = 1`, using the conventions
    /// `1 <-> inf`.
    pub fn dual(self) -> Exponent {
        if self.0 == 1.0 {
            Exponent::INF
        } else if self.0.is_infinite() {
            Exponent::ONE
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }
}

/// A complex-valued function on a finite measure space: one value per point.
#[derive(Debug, Clone, PartialEq)]
pub struct CFunction {
    space: FiniteMeasureSpace,
    values: Vec<Complex64>,
}

impl CFunction {
    pub fn new(space: FiniteMeasureSpace, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != space.n() {
            return Err(Error::invalid(format!(
                "function has {} values but the space has {} points",
                values.len(),
                space.n()
            )));
        }
        Ok(CFunction { space, values })
    }

    pub fn constant(space: FiniteMeasureSpace, c: Complex64) -> Self {
        let values = vec![c; space.n()];
        CFunction { space, values }
    }

    /// The constant one function.
    pub fn one(space: FiniteMeasureSpace) -> Self {
        CFunction::constant(space, Complex64::ONE)
    }

    pub fn zero(space: FiniteMeasureSpace) -> Self {
        CFunction::constant(space, Complex64::ZERO)
    }

    /// The indicator of a single point.
    pub fn indicator(space: FiniteMeasureSpace, i: usize) -> Result<Self> {
        if i >= space.n() {
            return Err(Error::invalid(format!(
                "indicator point {i} out of range for a {}-point space",
                space.n()
            )));
        }
        let mut values = vec![Complex64::ZERO; space.n()];
        values[i] = Complex64::ONE;
        Ok(CFunction { space, values })
    }

    pub fn space(&self) -> &FiniteMeasureSpace {
        &self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> Complex64 {
        self.values[i]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> CFunction {
        CFunction {
            space: self.space.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn conj(&self) -> CFunction {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: Complex64) -> CFunction {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &CFunction) -> Result<CFunction> {
        if self.space != other.space {
            return Err(Error::invalid("cannot add functions on different spaces"));
        }
        Ok(CFunction {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &CFunction) -> Result<CFunction> {
        self.add(&other.scale(-Complex64::ONE))
    }
}
