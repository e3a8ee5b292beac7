//! Sampling strategies over `C^d` for the form checkers.
//!
//! The checkers quantify over all of `C^d` but can only sample, so the
//! strategy is explicit and reproducible: a polar grid per complex
//! coordinate (geometric radii, equispaced angles, origin included) or a
//! seeded random cloud with log-uniform radii.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Polar grid specification applied to every complex coordinate.
#[derive(Debug, Clone, Serialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub radial: usize,
    pub angular: usize,
    pub include_origin: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            r_min: 1e-3,
            r_max: 1e3,
            radial: 25,
            angular: 24,
            include_origin: true,
        }
    }
}

impl GridSpec {
    fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_max >= self.r_min) {
            return Err(Error::invalid("grid radii must satisfy 0 < r_min <= r_max"));
        }
        if self.radial == 0 || self.angular == 0 {
            return Err(Error::invalid("grid needs at least one radius and one angle"));
        }
        Ok(())
    }

    /// Grid points for one complex coordinate.
    fn axis_points(&self) -> Vec<Complex64> {
        let mut pts = Vec::with_capacity(self.radial * self.angular + 1);
        if self.include_origin {
            pts.push(Complex64::ZERO);
        }
        for k in 0..self.radial {
            let r = if self.radial == 1 {
                self.r_min
            } else {
                let t = k as f64 / (self.radial - 1) as f64;
                self.r_min * (self.r_max / self.r_min).powf(t)
            };
            for a in 0..self.angular {
                let theta = std::f64::consts::TAU * a as f64 / self.angular as f64;
                pts.push(Complex64::from_polar(r, theta));
            }
        }
        pts
    }
}

/// Seeded random cloud specification.
#[derive(Debug, Clone, Serialize)]
pub struct RandomSpec {
    pub count: usize,
    pub seed: u64,
    pub r_min: f64,
    pub r_max: f64,
}

impl RandomSpec {
    pub fn new(count: usize, seed: u64) -> Self {
        RandomSpec {
            count,
            seed,
            r_min: 1e-3,
            r_max: 1e3,
        }
    }
}

/// Point source for check sweeps over `C^d`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    Grid(GridSpec),
    Random(RandomSpec),
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler::Grid(GridSpec::default())
    }
}

impl Sampler {
    pub fn seed(&self) -> u64 {
        match self {
            Sampler::Grid(_) => 0,
            Sampler::Random(spec) => spec.seed,
        }
    }

    /// Materializes the sample points of `C^d` in a deterministic order.
    pub fn points(&self, d: usize) -> Result<Vec<Vec<Complex64>>> {
        if d == 0 {
            return Err(Error::invalid("sampling needs d >= 1"));
        }
        match self {
            Sampler::Grid(spec) => {
                spec.validate()?;
                let axis = spec.axis_points();
                let mut points: Vec<Vec<Complex64>> = vec![Vec::new()];
                for _ in 0..d {
                    let mut next = Vec::with_capacity(points.len() * axis.len());
                    for partial in &points {
                        for &z in &axis {
                            let mut p = partial.clone();
                            p.push(z);
                            next.push(p);
                        }
                    }
                    points = next;
                }
                Ok(points)
            }
            Sampler::Random(spec) => {
                if !(spec.r_min > 0.0 && spec.r_max >= spec.r_min) {
                    return Err(Error::invalid("random radii must satisfy 0 < r_min <= r_max"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                let log_lo = spec.r_min.ln();
                let log_hi = spec.r_max.ln();
                let mut points = Vec::with_capacity(spec.count);
                for _ in 0..spec.count {
                    let point: Vec<Complex64> = (0..d)
                        .map(|_| {
                            let r = rng.random_range(log_lo..=log_hi).exp();
                            let theta = rng.random_range(0.0..std::f64::consts::TAU);
                            Complex64::from_polar(r, theta)
                        })
                        .collect();
                    points.push(point);
                }
                Ok(points)
            }
        }
    }
}
