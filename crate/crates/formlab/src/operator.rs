//! Kernel operators on finite measure spaces.
//!
//! An operator is an `n x n` complex matrix acting on value vectors by
//! `(Tf)_i = sum_j t_ij f_j`; the measure enters only through pairings.
//! With that convention the classification criteria are explicit row and
//! column inequalities:
//!
//! * symmetric:          `mu_i t_ij = mu_j conj(t_ji)` for all `i, j`;
//! * L^inf contraction:  every absolute row sum `<= 1`;
//! * L^1 contraction:    `sum_i mu_i |t_ij| / mu_j <= 1` for every column;
//! * sub-Markovian:      additionally all entries real and `>= 0`;
//! * Markovian:          additionally every row sums to `1`.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{CFunction, FiniteMeasureSpace};

/// Default classification tolerance. Random generators and file round-trips
/// introduce last-bit noise; a matrix failing a criterion by less than this
/// is accepted and the defect recorded.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A kernel operator: a square complex matrix over a fixed measure space.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelOperator {
    space: FiniteMeasureSpace,
    entries: Array2<Complex64>,
}

/// Location and size of the first violation of a classification criterion.
/// For row-level criteria (row sums) `col == row`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Defect {
    pub row: usize,
    pub col: usize,
    pub magnitude: f64,
}

/// Outcome of [`KernelOperator::classify`].
///
/// The flags satisfy `markovian => sub_markovian => dunford_schwartz` by
/// construction. Each optional defect is the first violated scalar condition
/// of the corresponding criterion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorClass {
    pub symmetric: bool,
    pub dunford_schwartz: bool,
    pub sub_markovian: bool,
    pub markovian: bool,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry_defect: Option<Defect>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linf_defect: Option<Defect>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1_defect: Option<Defect>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positivity_defect: Option<Defect>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub row_sum_defect: Option<Defect>,
}

/// Requested class for [`random_symmetric_contraction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomClass {
    General,
    SubMarkovian,
    Markovian,
}

impl KernelOperator {
    pub fn new(space: FiniteMeasureSpace, entries: Array2<Complex64>) -> Result<Self> {
        if entries.nrows() != space.n() || entries.ncols() != space.n() {
            return Err(Error::invalid(format!(
                "matrix is {}x{} but the space has {} points",
                entries.nrows(),
                entries.ncols(),
                space.n()
            )));
        }
        if let Some(bad) = entries.iter().find(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid(format!("non-finite matrix entry: {bad}")));
        }
        Ok(KernelOperator { space, entries })
    }

    pub fn from_rows(space: FiniteMeasureSpace, rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = space.n();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("row list does not form a square matrix"));
        }
        let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
        let entries = Array2::from_shape_vec((n, n), flat)
            .map_err(|e| Error::invalid(e.to_string()))?;
        KernelOperator::new(space, entries)
    }

    pub fn identity(space: FiniteMeasureSpace) -> Self {
        let entries = crate::numerics::identity(space.n());
        KernelOperator { space, entries }
    }

    pub fn zero(space: FiniteMeasureSpace) -> Self {
        let n = space.n();
        KernelOperator {
            space,
            entries: Array2::from_elem((n, n), Complex64::ZERO),
        }
    }

    pub fn space(&self) -> &FiniteMeasureSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[[i, j]]
    }

    /// Applies the kernel: `(Tf)_i = sum_j t_ij f_j`, ascending `j`.
    pub fn apply(&self, f: &CFunction) -> Result<CFunction> {
        if *f.space() != self.space {
            return Err(Error::invalid("function lives on a different space"));
        }
        let n = self.n();
        let mut out = vec![Complex64::ZERO; n];
        for i in 0..n {
            let mut acc = Complex64::ZERO;
            for j in 0..n {
                acc += self.entries[[i, j]] * f.value(j);
            }
            out[i] = acc;
        }
        CFunction::new(self.space.clone(), out)
    }

    /// Classifies the operator within `tol`.
    pub fn classify(&self, tol: f64) -> OperatorClass {
        let n = self.n();
        let mu = self.space.weights();
        let t = &self.entries;

        let mut symmetry_defect = None;
        'sym: for i in 0..n {
            for j in 0..n {
                let d = (mu[i] * t[[i, j]] - mu[j] * t[[j, i]].conj()).norm();
                if d > tol {
                    symmetry_defect = Some(Defect {
                        row: i,
                        col: j,
                        magnitude: d,
                    });
                    break 'sym;
                }
            }
        }

        let mut linf_defect = None;
        for i in 0..n {
            let row_sum: f64 = (0..n).map(|j| t[[i, j]].norm()).sum();
            if row_sum > 1.0 + tol {
                linf_defect = Some(Defect {
                    row: i,
                    col: i,
                    magnitude: row_sum - 1.0,
                });
                break;
            }
        }

        let mut l1_defect = None;
        for j in 0..n {
            let col_sum: f64 = (0..n).map(|i| mu[i] * t[[i, j]].norm()).sum::<f64>() / mu[j];
            if col_sum > 1.0 + tol {
                l1_defect = Some(Defect {
                    row: j,
                    col: j,
                    magnitude: col_sum - 1.0,
                });
                break;
            }
        }

        let mut positivity_defect = None;
        'pos: for i in 0..n {
            for j in 0..n {
                let v = t[[i, j]];
                let d = v.im.abs().max(-v.re);
                if d > tol {
                    positivity_defect = Some(Defect {
                        row: i,
                        col: j,
                        magnitude: d,
                    });
                    break 'pos;
                }
            }
        }

        let mut row_sum_defect = None;
        for i in 0..n {
            let sum: Complex64 = (0..n).map(|j| t[[i, j]]).sum();
            let d = (sum - Complex64::ONE).norm();
            if d > tol {
                row_sum_defect = Some(Defect {
                    row: i,
                    col: i,
                    magnitude: d,
                });
                break;
            }
        }

        let symmetric = symmetry_defect.is_none();
        let dunford_schwartz = linf_defect.is_none() && l1_defect.is_none();
        let sub_markovian = dunford_schwartz && positivity_defect.is_none();
        let markovian = sub_markovian && row_sum_defect.is_none();
        OperatorClass {
            symmetric,
            dunford_schwartz,
            sub_markovian,
            markovian,
            tolerance: tol,
            symmetry_defect,
            linf_defect,
            l1_defect,
            positivity_defect,
            row_sum_defect,
        }
    }

    /// The linear modulus `|T|`: entrywise absolute value of the kernel.
    ///
    /// On a finite discrete space the lattice supremum
    /// `|T|f = sup { |Tg| : |g| <= f }` is attained: aligning the phase of
    /// each coordinate of `g` against `t_ij` row by row realizes
    /// `sum_j |t_ij| f_j` exactly, so the abstract modulus reduces to the
    /// entrywise absolute value. Tests check this against the supremum over
    /// explicit admissible functions.
    pub fn modulus(&self) -> KernelOperator {
        KernelOperator {
            space: self.space.clone(),
            entries: self.entries.mapv(|v| Complex64::new(v.norm(), 0.0)),
        }
    }

    /// The adjoint with respect to the bilinear pairing:
    /// `pair(Tf, g) = pair(f, adjoint(T) g)`, realized by
    /// `s_ji = mu_i t_ij / mu_j`.
    pub fn adjoint(&self) -> KernelOperator {
        let n = self.n();
        let mu = self.space.weights();
        let mut out = Array2::from_elem((n, n), Complex64::ZERO);
        for i in 0..n {
            for j in 0..n {
                out[[j, i]] = self.entries[[i, j]] * (mu[i] / mu[j]);
            }
        }
        KernelOperator {
            space: self.space.clone(),
            entries: out,
        }
    }

    /// Entrywise complex conjugate (the conjugate operator).
    pub fn conj_entrywise(&self) -> KernelOperator {
        KernelOperator {
            space: self.space.clone(),
            entries: self.entries.mapv(|v| v.conj()),
        }
    }

    /// Real part as an operator: `(T + conj T) / 2`, i.e. entrywise `Re`.
    pub fn real_part(&self) -> KernelOperator {
        KernelOperator {
            space: self.space.clone(),
            entries: self.entries.mapv(|v| Complex64::new(v.re, 0.0)),
        }
    }

    /// Imaginary part as an operator: `(T - conj T) / 2i`, i.e. entrywise `Im`.
    pub fn imag_part(&self) -> KernelOperator {
        KernelOperator {
            space: self.space.clone(),
            entries: self.entries.mapv(|v| Complex64::new(v.im, 0.0)),
        }
    }

    pub fn scale(&self, c: Complex64) -> KernelOperator {
        KernelOperator {
            space: self.space.clone(),
            entries: self.entries.mapv(|v| c * v),
        }
    }

    pub fn add(&self, other: &KernelOperator) -> Result<KernelOperator> {
        if self.space != other.space {
            return Err(Error::invalid("cannot add operators on different spaces"));
        }
        Ok(KernelOperator {
            space: self.space.clone(),
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &KernelOperator) -> Result<KernelOperator> {
        if self.space != other.space {
            return Err(Error::invalid(
                "cannot subtract operators on different spaces",
            ));
        }
        Ok(KernelOperator {
            space: self.space.clone(),
            entries: &self.entries - &other.entries,
        })
    }

    pub fn compose(&self, other: &KernelOperator) -> Result<KernelOperator> {
        if self.space != other.space {
            return Err(Error::invalid(
                "cannot compose operators on different spaces",
            ));
        }
        Ok(KernelOperator {
            space: self.space.clone(),
            entries: crate::numerics::mat_mul(&self.entries, &other.entries),
        })
    }

    /// Operator norm on L^1: `max_j sum_i mu_i |t_ij| / mu_j`.
    pub fn l1_operator_norm(&self) -> f64 {
        let n = self.n();
        let mu = self.space.weights();
        let mut max = 0.0f64;
        for j in 0..n {
            let col: f64 = (0..n).map(|i| mu[i] * self.entries[[i, j]].norm()).sum();
            max = max.max(col / mu[j]);
        }
        max
    }

    /// Operator norm on L^inf: the maximum absolute row sum.
    pub fn linf_operator_norm(&self) -> f64 {
        crate::numerics::inf_norm(&self.entries)
    }

    /// Restriction to a subset `B` of points: the subspace with weights
    /// `(mu_i)_{i in B}` and the submatrix `(t_ij)_{i,j in B}`.
    ///
    /// Indices are sorted and deduplicated; the restricted bilinear identity
    /// `pair((Id - T) M_B f, M_B g) = pair_B((Id - T_B) f|_B, g|_B)` then
    /// holds with bit-identical arithmetic because both sides sum the same
    /// nonzero terms in the same order.
    pub fn restrict(&self, b: &[usize]) -> Result<(FiniteMeasureSpace, KernelOperator)> {
        if b.is_empty() {
            return Err(Error::invalid("restriction set must be nonempty"));
        }
        let mut idx = b.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if *idx.last().unwrap() >= self.n() {
            return Err(Error::invalid(format!(
                "restriction index {} out of range for a {}-point space",
                idx.last().unwrap(),
                self.n()
            )));
        }
        let weights: Vec<f64> = idx.iter().map(|&i| self.space.weight(i)).collect();
        let sub_space = FiniteMeasureSpace::new(&weights)?;
        let m = idx.len();
        let entries = Array2::from_shape_fn((m, m), |(r, c)| self.entries[[idx[r], idx[c]]]);
        Ok((sub_space.clone(), KernelOperator {
            space: sub_space,
            entries,
        }))
    }
}

/// The two-point kernel `E_lambda` on the Z2 space: zero diagonal,
/// `t_12 = conj(lambda)`, `t_21 = lambda`, for unimodular `lambda`.
pub fn e_lambda(lambda: Complex64) -> Result<KernelOperator> {
    if (lambda.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "lambda must be unimodular, got |lambda| = {}",
            lambda.norm()
        )));
    }
    let space = FiniteMeasureSpace::z2();
    let mut entries = Array2::from_elem((2, 2), Complex64::ZERO);
    entries[[0, 1]] = lambda.conj();
    entries[[1, 0]] = lambda;
    Ok(KernelOperator { space, entries })
}

/// Membership in the set of symmetric absolute contractions on Z2:
/// the matrix `(a, conj w; w, b)` is one exactly when
/// `max(|a|, |b|) <= 1 - |w|`.
pub fn c2_membership(a: f64, b: f64, w: Complex64) -> bool {
    a.abs().max(b.abs()) <= 1.0 - w.norm()
}

/// Checks that `phi` is a measure-preserving surjection from `big` onto
/// `small`: every point of `small` is hit and its preimage carries the same
/// mass within `tol`.
fn validate_point_map(
    phi: &[usize],
    big: &FiniteMeasureSpace,
    small: &FiniteMeasureSpace,
    tol: f64,
) -> Result<()> {
    if phi.len() != big.n() {
        return Err(Error::invalid(format!(
            "point map has {} entries but the source space has {} points",
            phi.len(),
            big.n()
        )));
    }
    let mut fiber_mass = vec![0.0f64; small.n()];
    for (y, &x) in phi.iter().enumerate() {
        if x >= small.n() {
            return Err(Error::invalid(format!(
                "point map sends {y} to {x}, outside the {}-point target",
                small.n()
            )));
        }
        fiber_mass[x] += big.weight(y);
    }
    for (x, &mass) in fiber_mass.iter().enumerate() {
        if mass == 0.0 {
            return Err(Error::invalid(format!("point map misses target point {x}")));
        }
        if (mass - small.weight(x)).abs() > tol {
            return Err(Error::invalid(format!(
                "point map is not measure-preserving at target point {x}: fiber mass {mass} vs weight {}",
                small.weight(x)
            )));
        }
    }
    Ok(())
}

/// Composition with a measure-preserving point map: the embedding
/// `f -> f o phi` of functions on `small` into functions on `big`. It is a
/// one-preserving multiplicative isometry of every L^p space.
pub fn pushforward(
    phi: &[usize],
    big: &FiniteMeasureSpace,
    small: &FiniteMeasureSpace,
    f: &CFunction,
    tol: f64,
) -> Result<CFunction> {
    validate_point_map(phi, big, small, tol)?;
    if f.space() != small {
        return Err(Error::invalid("function does not live on the target space"));
    }
    let values: Vec<Complex64> = phi.iter().map(|&x| f.value(x)).collect();
    CFunction::new(big.clone(), values)
}

/// Functional-calculus check for the embedding: composition with a point map
/// commutes with applying a scalar function `F` pointwise, and preserves the
/// integral. Returns `true` when both identities hold within `tol`.
pub fn pushforward_check(
    phi: &[usize],
    big: &FiniteMeasureSpace,
    small: &FiniteMeasureSpace,
    catalog: impl Fn(Complex64) -> Complex64,
    f: &CFunction,
    tol: f64,
) -> Result<bool> {
    let embedded = pushforward(phi, big, small, f, tol)?;
    let f_then_embed = pushforward(phi, big, small, &f.map(&catalog), tol)?;
    let embed_then_f = embedded.map(&catalog);
    let pointwise_ok = f_then_embed
        .values()
        .iter()
        .zip(embed_then_f.values())
        .all(|(a, b)| (a - b).norm() <= tol);

    let int_small = small.integrate(f)?;
    let int_big = big.integrate(&embedded)?;
    let integral_ok = (int_small - int_big).norm() <= tol * (1.0 + int_small.norm());
    Ok(pointwise_ok && integral_ok)
}

/// Draws a random symmetric contraction of the requested class,
/// deterministically in `(n, seed, class)`.
///
/// * `General`: a random complex matrix is symmetrized with respect to the
///   weights and scaled until both contraction conditions hold.
/// * `SubMarkovian`: the same with nonnegative entries.
/// * `Markovian`: a Metropolis kernel; the acceptance rule applied to a
///   symmetric row-stochastic proposal yields a reversible stochastic
///   matrix, so the result is symmetric and Markovian by construction.
///
/// When no space is given, weights are drawn from the seed first.
pub fn random_symmetric_contraction(
    n: usize,
    seed: u64,
    class: RandomClass,
    space: Option<&FiniteMeasureSpace>,
) -> Result<KernelOperator> {
    if n == 0 {
        return Err(Error::invalid("operator size must be at least 1"));
    }
    if let Some(s) = space {
        if s.n() != n {
            return Err(Error::invalid(format!(
                "requested size {n} but the space has {} points",
                s.n()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = match space {
        Some(s) => s.clone(),
        None => {
            let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.5)).collect();
            FiniteMeasureSpace::new(&weights)?
        }
    };
    let mu = space.weights().to_vec();

    let entries = match class {
        RandomClass::General => {
            let mut t = Array2::from_shape_fn((n, n), |_| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            symmetrize(&mut t, &mu);
            rescale_to_contraction(&mut t, &mu);
            t
        }
        RandomClass::SubMarkovian => {
            let mut t =
                Array2::from_shape_fn((n, n), |_| Complex64::new(rng.random_range(0.0..1.0), 0.0));
            symmetrize(&mut t, &mu);
            rescale_to_contraction(&mut t, &mu);
            t
        }
        RandomClass::Markovian => metropolis_kernel(n, &mu, &mut rng)?,
    };

    let op = KernelOperator::new(space, entries)?;
    let cls = op.classify(DEFAULT_TOL);
    let confirmed = match class {
        RandomClass::General => cls.symmetric && cls.dunford_schwartz,
        RandomClass::SubMarkovian => cls.symmetric && cls.sub_markovian,
        RandomClass::Markovian => cls.symmetric && cls.markovian,
    };
    if !confirmed {
        return Err(Error::numeric(format!(
            "generated operator failed to certify the requested class: {cls:?}"
        )));
    }
    Ok(op)
}

fn symmetrize(t: &mut Array2<Complex64>, mu: &[f64]) {
    let n = mu.len();
    for i in 0..n {
        for j in i..n {
            let a = t[[i, j]];
            let b = t[[j, i]];
            let sym_ij = 0.5 * (a + (mu[j] / mu[i]) * b.conj());
            t[[i, j]] = sym_ij;
            t[[j, i]] = (mu[i] / mu[j]) * sym_ij.conj();
        }
    }
}

fn rescale_to_contraction(t: &mut Array2<Complex64>, mu: &[f64]) {
    let n = mu.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        let row: f64 = (0..n).map(|j| t[[i, j]].norm()).sum();
        worst = worst.max(row);
    }
    for j in 0..n {
        let col: f64 = (0..n).map(|i| mu[i] * t[[i, j]].norm()).sum::<f64>() / mu[j];
        worst = worst.max(col);
    }
    if worst > 1.0 {
        let c = Complex64::new(1.0 / worst, 0.0);
        t.mapv_inplace(|v| c * v);
    }
}

/// Metropolis acceptance applied to a random symmetric row-stochastic
/// proposal: off-diagonal `t_ij = q_ij min(1, mu_j / mu_i)`, diagonal filled
/// to make rows sum to one. Reversibility `mu_i t_ij = mu_j t_ji` holds by
/// the `min(mu_i, mu_j)` symmetry.
fn metropolis_kernel(n: usize, mu: &[f64], rng: &mut ChaCha8Rng) -> Result<Array2<Complex64>> {
    let mut t = Array2::from_elem((n, n), Complex64::ZERO);
    if n == 1 {
        t[[0, 0]] = Complex64::ONE;
        return Ok(t);
    }
    let mut proposal = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let s = rng.random_range(0.05..1.0);
            proposal[i][j] = s;
            proposal[j][i] = s;
        }
    }
    let max_row: f64 = proposal
        .iter()
        .map(|row| row.iter().sum::<f64>())
        .fold(0.0, f64::max);
    if max_row <= 0.0 {
        return Err(Error::numeric("degenerate proposal kernel"));
    }
    for i in 0..n {
        let mut off_diagonal = 0.0f64;
        for j in 0..n {
            if i == j {
                continue;
            }
            let q = proposal[i][j] / max_row;
            let accept = (mu[j] / mu[i]).min(1.0);
            let tij = q * accept;
            t[[i, j]] = Complex64::new(tij, 0.0);
            off_diagonal += tij;
        }
        t[[i, i]] = Complex64::new(1.0 - off_diagonal, 0.0);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Exponent;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn uniform(n: usize) -> FiniteMeasureSpace {
        FiniteMeasureSpace::new(&vec![1.0 / n as f64; n]).unwrap()
    }

    fn random_function(space: &FiniteMeasureSpace, rng: &mut ChaCha8Rng) -> CFunction {
        let values: Vec<Complex64> = (0..space.n())
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        CFunction::new(space.clone(), values).unwrap()
    }

    #[test]
    fn apply_examples() {
        let z2 = FiniteMeasureSpace::z2();
        let f = CFunction::new(z2.clone(), vec![c(1.5, 0.5), c(-2.0, 1.0)]).unwrap();

        let id = KernelOperator::identity(z2.clone());
        assert_eq!(id.apply(&f).unwrap(), f);

        let swap = e_lambda(Complex64::ONE).unwrap();
        let g = swap.apply(&f).unwrap();
        assert_eq!(g.value(0), f.value(1));
        assert_eq!(g.value(1), f.value(0));

        let zero = KernelOperator::zero(z2.clone());
        assert_eq!(zero.apply(&f).unwrap(), CFunction::zero(z2));
    }

    #[test]
    fn classify_all_ones_kernel() {
        let n = 4;
        let space = uniform(n);
        let entries = Array2::from_elem((n, n), c(1.0 / n as f64, 0.0));
        let t = KernelOperator::new(space, entries).unwrap();
        let cls = t.classify(DEFAULT_TOL);
        assert!(cls.symmetric);
        assert!(cls.markovian);
    }

    #[test]
    fn classify_e_lambda() {
        let t = e_lambda(c(0.0, 1.0)).unwrap();
        let cls = t.classify(DEFAULT_TOL);
        assert!(cls.symmetric);
        assert!(cls.dunford_schwartz);
        assert!(!cls.sub_markovian, "imaginary entries are not positive");

        let cls1 = e_lambda(Complex64::ONE).unwrap().classify(DEFAULT_TOL);
        assert!(cls1.markovian, "the swap kernel is doubly stochastic");
    }

    #[test]
    fn classify_detects_row_sum_violation() {
        let t = KernelOperator::from_rows(
            uniform(2),
            &[
                vec![c(0.6, 0.0), c(0.5, 0.0)],
                vec![c(0.5, 0.0), c(0.6, 0.0)],
            ],
        )
        .unwrap();
        let cls = t.classify(DEFAULT_TOL);
        assert!(cls.symmetric);
        assert!(!cls.dunford_schwartz);
        let defect = cls.linf_defect.unwrap();
        assert!((defect.magnitude - 0.1).abs() < 1e-12);
    }

    #[test]
    fn modulus_is_entrywise() {
        let space = uniform(2);
        let t = KernelOperator::from_rows(
            space,
            &[
                vec![c(0.5, 0.0), c(-0.3, 0.0)],
                vec![c(-0.3, 0.0), c(0.5, 0.0)],
            ],
        )
        .unwrap();
        let m = t.modulus();
        assert_eq!(m.entry(0, 1), c(0.3, 0.0));
        assert_eq!(m.entry(0, 0), c(0.5, 0.0));
        // idempotent on entrywise-nonnegative kernels
        assert_eq!(m.modulus(), m);

        let e = e_lambda(c(0.0, 1.0)).unwrap().modulus();
        let e1 = e_lambda(Complex64::ONE).unwrap();
        assert!((e.entry(0, 1) - e1.entry(0, 1)).norm() < 1e-15);
        assert!((e.entry(1, 0) - e1.entry(1, 0)).norm() < 1e-15);
    }

    #[test]
    fn modulus_matches_lattice_supremum() {
        // |T| f is the pointwise supremum of |Tg| over |g| <= f. On a finite
        // space the supremum is attained by aligning phases row by row, so
        // the max over those n aligned choices must reproduce (|T| f) exactly.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let t = random_symmetric_contraction(5, 100 + trial, RandomClass::General, None)
                .unwrap();
            let space = t.space().clone();
            let f_values: Vec<Complex64> = (0..5)
                .map(|_| c(rng.random_range(0.0..2.0), 0.0))
                .collect();
            let f = CFunction::new(space.clone(), f_values).unwrap();
            let target = t.modulus().apply(&f).unwrap();

            let mut sup = vec![0.0f64; 5];
            for row in 0..5 {
                let aligned: Vec<Complex64> = (0..5)
                    .map(|j| {
                        let tij = t.entry(row, j);
                        if tij.norm() == 0.0 {
                            f.value(j)
                        } else {
                            f.value(j) * (tij.conj() / tij.norm())
                        }
                    })
                    .collect();
                let g = CFunction::new(space.clone(), aligned).unwrap();
                let tg = t.apply(&g).unwrap();
                for (s, v) in sup.iter_mut().zip(tg.values()) {
                    *s = s.max(v.norm());
                }
            }
            for (s, v) in sup.iter().zip(target.values()) {
                assert!((s - v.re).abs() <= 1e-12, "sup {s} vs modulus {}", v.re);
            }
        }
    }

    #[test]
    fn modulus_dominates_pointwise() {
        for seed in 0..30 {
            let t = random_symmetric_contraction(6, seed, RandomClass::General, None).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            let f = random_function(t.space(), &mut rng);
            let tf = t.apply(&f).unwrap();
            let dom = t.modulus().apply(&f.map(|v| c(v.norm(), 0.0))).unwrap();
            for (a, b) in tf.values().iter().zip(dom.values()) {
                assert!(a.norm() <= b.re + 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_transpose_and_involution() {
        let space = uniform(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let entries = Array2::from_shape_fn((3, 3), |_| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let t = KernelOperator::new(space, entries).unwrap();

        // Uniform weights: plain transpose.
        let s = t.adjoint();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s.entry(i, j), t.entry(j, i));
            }
        }

        let weights = FiniteMeasureSpace::new(&[0.2, 1.0, 3.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let entries = Array2::from_shape_fn((3, 3), |_| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let t = KernelOperator::new(weights.clone(), entries).unwrap();
        let back = t.adjoint().adjoint();
        for i in 0..3 {
            for j in 0..3 {
                assert!((back.entry(i, j) - t.entry(i, j)).norm() < 1e-13);
            }
        }

        // Bilinear adjoint relation.
        let f = random_function(&weights, &mut rng);
        let g = random_function(&weights, &mut rng);
        let lhs = weights.duality_pair(&t.apply(&f).unwrap(), &g).unwrap();
        let rhs = weights
            .duality_pair(&f, &t.adjoint().apply(&g).unwrap())
            .unwrap();
        assert!((lhs - rhs).norm() < 1e-13);

        // modulus and adjoint commute
        let a = t.adjoint().modulus();
        let b = t.modulus().adjoint();
        for i in 0..3 {
            for j in 0..3 {
                assert!((a.entry(i, j) - b.entry(i, j)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn symmetric_operator_adjoint_is_conjugate() {
        let t = random_symmetric_contraction(4, 11, RandomClass::General, None).unwrap();
        let adj = t.adjoint();
        let conj = t.conj_entrywise();
        for i in 0..4 {
            for j in 0..4 {
                assert!((adj.entry(i, j) - conj.entry(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetry_flag_matches_sesquilinear_identity() {
        for seed in 0..10 {
            let t = random_symmetric_contraction(5, seed, RandomClass::General, None).unwrap();
            assert!(t.classify(DEFAULT_TOL).symmetric);
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(99));
            for _ in 0..50 {
                let f = random_function(t.space(), &mut rng);
                let g = random_function(t.space(), &mut rng);
                let lhs = t
                    .space()
                    .duality_pair(&t.apply(&f).unwrap(), &g.conj())
                    .unwrap();
                let rhs = t
                    .space()
                    .duality_pair(&f, &t.apply(&g).unwrap().conj())
                    .unwrap();
                let scale = 1.0 + lhs.norm().max(rhs.norm());
                assert!((lhs - rhs).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn l1_and_linf_norms_agree_for_symmetric_kernels() {
        for seed in 0..20 {
            let t = random_symmetric_contraction(7, seed, RandomClass::General, None).unwrap();
            let a = t.l1_operator_norm();
            let b = t.linf_operator_norm();
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.max(b)), "{a} vs {b}");
        }
    }

    #[test]
    fn modulus_preserves_dunford_schwartz() {
        for seed in 0..10 {
            let t = random_symmetric_contraction(6, seed, RandomClass::General, None).unwrap();
            let cls = t.modulus().classify(DEFAULT_TOL);
            assert!(cls.dunford_schwartz);
        }
    }

    #[test]
    fn restrict_keeps_everything_on_full_set() {
        let t = random_symmetric_contraction(4, 5, RandomClass::General, None).unwrap();
        let (space, tb) = t.restrict(&[0, 1, 2, 3]).unwrap();
        assert_eq!(space, *t.space());
        assert_eq!(tb.entries(), t.entries());
    }

    #[test]
    fn restrict_preserves_symmetry_and_positivity() {
        for seed in 0..10 {
            let t = random_symmetric_contraction(6, seed, RandomClass::SubMarkovian, None)
                .unwrap();
            let (_, tb) = t.restrict(&[0, 2, 5]).unwrap();
            let cls = tb.classify(DEFAULT_TOL);
            assert!(cls.symmetric);
            assert!(cls.sub_markovian);
        }
    }

    #[test]
    fn restricting_a_markov_chain_loses_mass() {
        // Nearest-neighbour chain on three uniform points: dropping a point
        // leaves a strictly sub-Markovian restriction.
        let space = uniform(3);
        let t = KernelOperator::from_rows(
            space,
            &[
                vec![c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)],
                vec![c(0.5, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
                vec![c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0)],
            ],
        )
        .unwrap();
        assert!(t.classify(DEFAULT_TOL).markovian);
        let (_, tb) = t.restrict(&[0, 1]).unwrap();
        let cls = tb.classify(DEFAULT_TOL);
        assert!(cls.sub_markovian);
        assert!(!cls.markovian, "row sums drop below one");
    }

    #[test]
    fn restriction_identity_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for seed in 0..20 {
            let n = 8;
            let t = random_symmetric_contraction(n, seed, RandomClass::General, None).unwrap();
            let space = t.space().clone();
            let b: Vec<usize> = (0..n).filter(|_| rng.random_range(0.0..1.0) < 0.6).collect();
            if b.is_empty() {
                continue;
            }
            let (sub_space, tb) = t.restrict(&b).unwrap();
            let f = random_function(&space, &mut rng);
            let g = random_function(&space, &mut rng);

            // M_B f: zero outside B.
            let mask = |h: &CFunction| {
                let vals: Vec<Complex64> = (0..n)
                    .map(|i| if b.contains(&i) { h.value(i) } else { Complex64::ZERO })
                    .collect();
                CFunction::new(space.clone(), vals).unwrap()
            };
            let mf = mask(&f);
            let mg = mask(&g);
            let id = KernelOperator::identity(space.clone());
            let lhs = space
                .duality_pair(&id.sub(&t).unwrap().apply(&mf).unwrap(), &mg)
                .unwrap();

            let restrict_fn = |h: &CFunction| {
                let vals: Vec<Complex64> = b.iter().map(|&i| h.value(i)).collect();
                CFunction::new(sub_space.clone(), vals).unwrap()
            };
            let idb = KernelOperator::identity(sub_space.clone());
            let rhs = sub_space
                .duality_pair(
                    &idb.sub(&tb).unwrap().apply(&restrict_fn(&f)).unwrap(),
                    &restrict_fn(&g),
                )
                .unwrap();
            assert_eq!(lhs, rhs, "restriction identity must be bit-exact");
        }
    }

    #[test]
    fn pushforward_examples() {
        let small = FiniteMeasureSpace::z2();
        let big = FiniteMeasureSpace::new(&[0.25; 4]).unwrap();
        let phi = [0usize, 0, 1, 1];
        let f = CFunction::new(small.clone(), vec![c(1.0, 2.0), c(-0.5, 0.0)]).unwrap();

        assert!(pushforward_check(&phi, &big, &small, |z| z * z.conj(), &f, 1e-14).unwrap());
        assert!(pushforward_check(&phi, &big, &small, |z| z.conj(), &f, 1e-14).unwrap());

        // identity map
        let id_phi = [0usize, 1];
        assert!(pushforward_check(&id_phi, &small, &small, |z| z, &f, 1e-14).unwrap());

        // non-measure-preserving map
        let bad = FiniteMeasureSpace::new(&[0.3, 0.2, 0.25, 0.25]).unwrap();
        assert!(pushforward_check(&phi, &bad, &small, |z| z, &f, 1e-14).is_err());

        // non-surjective map
        let phi_missing = [0usize, 0, 0, 0];
        assert!(pushforward(&phi_missing, &big, &small, &f, 1e-14).is_err());
    }

    #[test]
    fn pushforward_is_multiplicative_and_isometric() {
        let small = FiniteMeasureSpace::new(&[0.5, 0.25, 0.25]).unwrap();
        let big = FiniteMeasureSpace::new(&[0.25, 0.25, 0.25, 0.125, 0.125]).unwrap();
        let phi = [0usize, 0, 1, 2, 2];
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let f = random_function(&small, &mut rng);
            let g = random_function(&small, &mut rng);
            let pf = pushforward(&phi, &big, &small, &f, 1e-14).unwrap();
            let pg = pushforward(&phi, &big, &small, &g, 1e-14).unwrap();

            let product = CFunction::new(
                small.clone(),
                f.values().iter().zip(g.values()).map(|(a, b)| a * b).collect(),
            )
            .unwrap();
            let p_product = pushforward(&phi, &big, &small, &product, 1e-14).unwrap();
            let product_p = CFunction::new(
                big.clone(),
                pf.values().iter().zip(pg.values()).map(|(a, b)| a * b).collect(),
            )
            .unwrap();
            assert_eq!(p_product, product_p);

            for p in [1.0, 2.0, 3.5, f64::INFINITY] {
                let p = Exponent::new(p).unwrap();
                let a = small.lp_norm(&f, p).unwrap();
                let b = big.lp_norm(&pf, p).unwrap();
                assert!((a - b).abs() <= 1e-13 * (1.0 + a));
            }
        }
    }

    #[test]
    fn e_lambda_examples() {
        let e1 = e_lambda(Complex64::ONE).unwrap();
        assert_eq!(e1.entry(0, 0), Complex64::ZERO);
        assert_eq!(e1.entry(0, 1), Complex64::ONE);
        assert_eq!(e1.entry(1, 0), Complex64::ONE);

        let ei = e_lambda(c(0.0, 1.0)).unwrap();
        assert_eq!(ei.entry(0, 1), c(0.0, -1.0));
        assert_eq!(ei.entry(1, 0), c(0.0, 1.0));
        let cls = ei.classify(DEFAULT_TOL);
        assert!(cls.symmetric && cls.dunford_schwartz);

        assert!(e_lambda(c(0.9, 0.0)).is_err());

        // E_lambda squares to the identity for every unimodular lambda.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            let lambda = Complex64::from_polar(1.0, theta);
            let e = e_lambda(lambda).unwrap();
            let sq = e.compose(&e).unwrap();
            let id = KernelOperator::identity(e.space().clone());
            for i in 0..2 {
                for j in 0..2 {
                    assert!((sq.entry(i, j) - id.entry(i, j)).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn c2_membership_examples() {
        assert!(c2_membership(0.0, 0.0, c(0.0, 1.0)));
        assert!(c2_membership(0.5, -0.5, c(0.5, 0.0)));
        assert!(!c2_membership(0.9, 0.0, c(0.2, 0.0)));
    }

    #[test]
    fn c2_membership_matches_classification() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let z2 = FiniteMeasureSpace::z2();
        for _ in 0..200 {
            let a = rng.random_range(-1.2..1.2);
            let b = rng.random_range(-1.2..1.2);
            let w = c(rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8));
            // Stay away from the boundary so the tolerance cannot flip the verdict.
            let margin = a.abs().max(b.abs()) - (1.0 - w.norm());
            if margin.abs() < 1e-6 {
                continue;
            }
            let t = KernelOperator::from_rows(
                z2.clone(),
                &[vec![c(a, 0.0), w.conj()], vec![w, c(b, 0.0)]],
            )
            .unwrap();
            let cls = t.classify(DEFAULT_TOL);
            assert!(cls.symmetric);
            assert_eq!(cls.dunford_schwartz, c2_membership(a, b, w));
        }
    }

    #[test]
    fn generator_is_deterministic_and_certified() {
        for class in [
            RandomClass::General,
            RandomClass::SubMarkovian,
            RandomClass::Markovian,
        ] {
            let a = random_symmetric_contraction(6, 42, class, None).unwrap();
            let b = random_symmetric_contraction(6, 42, class, None).unwrap();
            assert_eq!(a.entries(), b.entries());
            assert_eq!(a.space(), b.space());
        }
    }

    #[test]
    fn markovian_generator_sweep() {
        for seed in 0..100 {
            let n = 1 + (seed as usize % 9);
            let t = random_symmetric_contraction(n, seed, RandomClass::Markovian, None).unwrap();
            let cls = t.classify(DEFAULT_TOL);
            assert!(cls.symmetric && cls.markovian, "seed {seed}");
        }
    }

    #[test]
    fn one_point_markov_kernel_is_trivial() {
        let t = random_symmetric_contraction(1, 9, RandomClass::Markovian, None).unwrap();
        assert_eq!(t.entry(0, 0), Complex64::ONE);
    }
}
