//! Representing measures on product spaces and the disintegration of
//! `Id - T` into a diagonal part plus two-point blocks.
//!
//! The bilinear form `(f, g) -> pair(Tf, g)` of a kernel operator is a
//! complex measure on the product of two copies of the space, with mass
//! `m(x, y) = mu_y t_yx` at the cell `(x, y)`. Its entrywise absolute value
//! is the representing measure of `|T|`, and the quotient of the two is a
//! unimodular phase field `lambda(x, y)`, hermitian for symmetric kernels.
//! Feeding those into the two-point blocks `Id - E_lambda` decomposes the
//! form `pair((Id - T) f, g)` exactly.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::complex_pair;
use crate::operator::{KernelOperator, DEFAULT_TOL};
use crate::space::{CFunction, Exponent, FiniteMeasureSpace};

/// The complex masses representing the form `(f, g) -> pair(Tf, g)` on the
/// product space: `pair(Tf, g) = sum_{x,y} m(x, y) f(x) g(y)`.
#[derive(Debug, Clone)]
pub struct RepresentingMeasure {
    source: FiniteMeasureSpace,
    target: FiniteMeasureSpace,
    masses: Array2<Complex64>,
}

impl RepresentingMeasure {
    pub fn source(&self) -> &FiniteMeasureSpace {
        &self.source
    }

    pub fn target(&self) -> &FiniteMeasureSpace {
        &self.target
    }

    /// Mass at the cell `(x, y)`.
    pub fn mass(&self, x: usize, y: usize) -> Complex64 {
        self.masses[[x, y]]
    }

    pub fn masses(&self) -> &Array2<Complex64> {
        &self.masses
    }

    /// Evaluates `sum_{x,y} m(x, y) f(x) g(y)` by a direct double sum in
    /// ascending cell order. This path never touches the operator, so it can
    /// cross-check operator-side evaluations.
    pub fn pair(&self, f: &CFunction, g: &CFunction) -> Result<Complex64> {
        if f.space() != &self.source {
            return Err(Error::invalid("f does not live on the source space"));
        }
        if g.space() != &self.target {
            return Err(Error::invalid("g does not live on the target space"));
        }
        let mut acc = Complex64::ZERO;
        for x in 0..self.source.n() {
            for y in 0..self.target.n() {
                acc += self.masses[[x, y]] * f.value(x) * g.value(y);
            }
        }
        Ok(acc)
    }

    /// Entrywise absolute value of the masses.
    pub fn abs(&self) -> RepresentingMeasure {
        RepresentingMeasure {
            source: self.source.clone(),
            target: self.target.clone(),
            masses: self.masses.mapv(|m| Complex64::new(m.norm(), 0.0)),
        }
    }

    pub fn total_mass(&self) -> Complex64 {
        self.masses.iter().sum()
    }
}

/// Builds the representing measure of `T`: `m(x, y) = mu_y t_yx`.
///
/// The defining identity is probed on a fixed random pair at construction;
/// uniqueness is automatic in finite dimension (one mass per product cell).
pub fn representing_measure(t: &KernelOperator) -> Result<RepresentingMeasure> {
    let space = t.space().clone();
    let n = space.n();
    let mu = space.weights();
    let masses = Array2::from_shape_fn((n, n), |(x, y)| mu[y] * t.entry(y, x));
    let rep = RepresentingMeasure {
        source: space.clone(),
        target: space.clone(),
        masses,
    };

    // Fixed-seed probe so construction stays deterministic.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_f00d ^ n as u64);
    let mut draw = || {
        let values: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        CFunction::new(space.clone(), values)
    };
    let f = draw()?;
    let g = draw()?;
    let direct = space.duality_pair(&t.apply(&f)?, &g)?;
    let via_measure = rep.pair(&f, &g)?;
    let scale = 1.0 + direct.norm() + via_measure.norm();
    if (direct - via_measure).norm() > 1e-10 * scale {
        return Err(Error::numeric(format!(
            "representing measure failed its construction probe: {} vs {}",
            direct, via_measure
        )));
    }
    Ok(rep)
}

/// Checks entrywise that `|m_T| = m_{|T|}` within `tol`.
pub fn modulus_measure_check(t: &KernelOperator, tol: f64) -> Result<bool> {
    let lhs = representing_measure(t)?.abs();
    let rhs = representing_measure(&t.modulus())?;
    Ok(lhs
        .masses()
        .iter()
        .zip(rhs.masses().iter())
        .all(|(a, b)| (a - b).norm() <= tol))
}

/// Cross-checks the two evaluation paths of the form on an `(f, g)` pair
/// drawn from `L^p x L^q`: the operator side `pair(Tf, g)` against the
/// measure side `sum m(x,y) f(x) g(y)`, within `tol` relative to the
/// product of the norms.
pub fn holder_extension_check(
    t: &KernelOperator,
    p: Exponent,
    f: &CFunction,
    g: &CFunction,
    tol: f64,
) -> Result<bool> {
    let q = p.dual();
    let space = t.space();
    let direct = space.duality_pair(&t.apply(f)?, g)?;
    let rep = representing_measure(t)?;
    let via_measure = rep.pair(f, g)?;
    let scale = 1.0 + space.lp_norm(f, p)? * space.lp_norm(g, q)?;
    Ok((direct - via_measure).norm() <= tol * scale)
}

/// Two sides of the L^1 sup inequality
/// `integral sup_j |T f_j| <= ||T||_{1->1} integral sup_j |f_j|`.
#[derive(Debug, Clone, Serialize)]
pub struct SupInequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Evaluates both sides of the sup inequality for a finite family of
/// functions.
pub fn grothendieck_sup_check(
    t: &KernelOperator,
    fs: &[CFunction],
    tol: f64,
) -> Result<SupInequalityCheck> {
    if fs.is_empty() {
        return Err(Error::invalid("the function family must be nonempty"));
    }
    let space = t.space();
    for f in fs {
        if f.space() != space {
            return Err(Error::invalid("family member on a different space"));
        }
    }
    let images: Vec<CFunction> = fs.iter().map(|f| t.apply(f)).collect::<Result<_>>()?;
    let mut lhs = 0.0f64;
    let mut sup_input = 0.0f64;
    for i in 0..space.n() {
        let sup_tf = images.iter().map(|h| h.value(i).norm()).fold(0.0, f64::max);
        let sup_f = fs.iter().map(|h| h.value(i).norm()).fold(0.0, f64::max);
        lhs += space.weight(i) * sup_tf;
        sup_input += space.weight(i) * sup_f;
    }
    let rhs = t.l1_operator_norm() * sup_input;
    Ok(SupInequalityCheck {
        lhs,
        rhs,
        ok: lhs <= rhs + tol,
    })
}

/// Polar decomposition of the representing measure: `m = |m| * lambda` with
/// `lambda = 1` on zero-mass cells.
#[derive(Debug, Clone)]
pub struct PhaseField {
    masses: Array2<f64>,
    phases: Array2<Complex64>,
}

impl PhaseField {
    pub fn mass(&self, x: usize, y: usize) -> f64 {
        self.masses[[x, y]]
    }

    pub fn phase(&self, x: usize, y: usize) -> Complex64 {
        self.phases[[x, y]]
    }

    pub fn masses(&self) -> &Array2<f64> {
        &self.masses
    }

    pub fn phases(&self) -> &Array2<Complex64> {
        &self.phases
    }
}

/// Splits the representing measure of `T` into nonnegative masses and
/// unimodular phases.
///
/// For symmetric `T` the phases must be hermitian,
/// `lambda(x, y) = conj(lambda(y, x))` on every positive-mass cell; this is
/// asserted within `1e-12` and a violation is reported as a numeric failure.
pub fn phase_field(t: &KernelOperator) -> Result<PhaseField> {
    let rep = representing_measure(t)?;
    let n = t.n();
    let mut masses = Array2::from_elem((n, n), 0.0f64);
    let mut phases = Array2::from_elem((n, n), Complex64::ONE);
    for x in 0..n {
        for y in 0..n {
            let m = rep.mass(x, y);
            let r = m.norm();
            masses[[x, y]] = r;
            if r > 0.0 {
                phases[[x, y]] = m / r;
            }
        }
    }
    if t.classify(DEFAULT_TOL).symmetric {
        for x in 0..n {
            for y in 0..n {
                if masses[[x, y]] > 0.0 && masses[[y, x]] > 0.0 {
                    let defect = (phases[[x, y]] - phases[[y, x]].conj()).norm();
                    if defect > 1e-12 {
                        return Err(Error::numeric(format!(
                            "phase field lost hermitian symmetry at ({x}, {y}): defect {defect}"
                        )));
                    }
                }
            }
        }
    }
    Ok(PhaseField { masses, phases })
}

/// Which special structure the disintegration should certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisintegrationMode {
    General,
    SubMarkovian,
    Markovian,
}

impl std::fmt::Display for DisintegrationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DisintegrationMode::General => write!(f, "general"),
            DisintegrationMode::SubMarkovian => write!(f, "sub_markovian"),
            DisintegrationMode::Markovian => write!(f, "markovian"),
        }
    }
}

/// One two-point block: mass of `|m|` at `(x, y)` and the phase driving the
/// block `Id - E_phase`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairTerm {
    pub x: usize,
    pub y: usize,
    pub mass: f64,
    #[serde(with = "complex_pair")]
    pub phase: Complex64,
}

/// Decomposition of the form `pair((Id - T) f, g)` into a diagonal term and
/// two-point blocks.
///
/// Pairs are stored for every cell of mass above the cutoff, including the
/// diagonal, without folding the hermitian partners `(x, y)` and `(y, x)`
/// into one record. Dropping sub-cutoff masses bounds the identity error by
/// `(dropped mass) * (largest block value)`.
#[derive(Debug, Clone, Serialize)]
pub struct Disintegration {
    #[serde(skip)]
    space: FiniteMeasureSpace,
    pub diagonal: Vec<f64>,
    pub pairs: Vec<PairTerm>,
    pub mode: DisintegrationMode,
    pub mass_cutoff: f64,
    pub warnings: Vec<String>,
}

impl Disintegration {
    pub fn space(&self) -> &FiniteMeasureSpace {
        &self.space
    }
}

/// Disintegrates a symmetric kernel: diagonal `d_i = mu_i (1 - sum_j |t_ij|)`
/// plus one pair term per positive-mass cell of the representing measure.
///
/// * any mode requires `T` symmetric within `tol`;
/// * a kernel that is not an absolute contraction is decomposed anyway but
///   the sign argument downstream needs `d_i >= 0`, so a warning is
///   recorded;
/// * `SubMarkovian` additionally requires entrywise nonnegativity and pins
///   all phases to `1`;
/// * `Markovian` additionally requires the full Markov classification and
///   stores the (vanishing) diagonal as exact zeros.
///
/// `tol` doubles as the mass cutoff for pair inclusion.
pub fn disintegrate(
    t: &KernelOperator,
    mode: DisintegrationMode,
    tol: f64,
) -> Result<Disintegration> {
    let cls = t.classify(tol);
    if !cls.symmetric {
        let defect = cls
            .symmetry_defect
            .as_ref()
            .map(|d| format!(" (defect {} at ({}, {}))", d.magnitude, d.row, d.col))
            .unwrap_or_default();
        return Err(Error::invalid(format!(
            "disintegration needs a symmetric kernel{defect}"
        )));
    }
    let mut warnings = Vec::new();
    if !cls.dunford_schwartz {
        warnings.push(
            "kernel is not an absolute contraction: diagonal weights may be negative, \
             so nonnegativity of the two-point blocks no longer bounds the form"
                .to_string(),
        );
    }
    match mode {
        DisintegrationMode::General => {}
        DisintegrationMode::SubMarkovian => {
            if cls.positivity_defect.is_some() {
                return Err(Error::invalid(
                    "sub-Markovian mode needs an entrywise nonnegative kernel",
                ));
            }
        }
        DisintegrationMode::Markovian => {
            if !cls.markovian {
                return Err(Error::invalid(
                    "markovian mode needs a Markovian kernel (positive, rows summing to one)",
                ));
            }
        }
    }

    let space = t.space().clone();
    let n = space.n();
    let mu = space.weights();

    let mut diagonal = Vec::with_capacity(n);
    for i in 0..n {
        let row_abs: f64 = (0..n).map(|j| t.entry(i, j).norm()).sum();
        diagonal.push(mu[i] * (1.0 - row_abs));
    }

    let field = phase_field(t)?;
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in x..n {
            let m_xy = field.mass(x, y);
            let m_yx = field.mass(y, x);
            if m_xy.max(m_yx) <= tol {
                continue;
            }
            // Take the phase from the better-conditioned cell; the partner
            // cell gets the exact conjugate so the stored field is hermitian
            // by construction.
            let mut phase = if m_xy >= m_yx {
                field.phase(x, y)
            } else {
                field.phase(y, x).conj()
            };
            if mode != DisintegrationMode::General {
                if (phase - Complex64::ONE).norm() > tol.max(1e-12) {
                    return Err(Error::invalid(format!(
                        "positive kernel produced a non-unit phase at ({x}, {y}): {phase}"
                    )));
                }
                phase = Complex64::ONE;
            }
            pairs.push(PairTerm {
                x,
                y,
                mass: m_xy,
                phase,
            });
            if y != x {
                pairs.push(PairTerm {
                    x: y,
                    y: x,
                    mass: m_yx,
                    phase: phase.conj(),
                });
            }
        }
    }

    if mode == DisintegrationMode::Markovian {
        for (i, d) in diagonal.iter_mut().enumerate() {
            if d.abs() > tol {
                return Err(Error::invalid(format!(
                    "markovian mode expects a vanishing diagonal, got {d} at point {i}"
                )));
            }
            *d = 0.0;
        }
    }

    Ok(Disintegration {
        space,
        diagonal,
        pairs,
        mode,
        mass_cutoff: tol,
        warnings,
    })
}

/// Evaluates the decomposed form
/// `sum_i d_i f_i g_i + sum_pairs mass * block(lambda; f(x), f(y); g(x), g(y))`
/// where the block is the two-point form of `Id - E_lambda`:
/// `((f(x) - conj(lambda) f(y)) g(x) + (f(y) - lambda f(x)) g(y)) / 2`.
///
/// Pair terms are summed in storage order, independent of thread count.
pub fn evaluate_disintegration(
    d: &Disintegration,
    f: &CFunction,
    g: &CFunction,
) -> Result<Complex64> {
    if f.space() != &d.space || g.space() != &d.space {
        return Err(Error::invalid(
            "functions do not live on the disintegrated space",
        ));
    }
    let mut acc = Complex64::ZERO;
    for (i, &di) in d.diagonal.iter().enumerate() {
        acc += di * f.value(i) * g.value(i);
    }
    for term in &d.pairs {
        let fx = f.value(term.x);
        let fy = f.value(term.y);
        let gx = g.value(term.x);
        let gy = g.value(term.y);
        let block = 0.5 * ((fx - term.phase.conj() * fy) * gx + (fy - term.phase * fx) * gy);
        acc += term.mass * block;
    }
    Ok(acc)
}
