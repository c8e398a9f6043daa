//! Stick-breaking sampler for the Dirichlet-Ferguson process and its
//! finite-dimensional marginal laws.
//!
//! Sticks are `t_k ~ Beta(1, beta)` drawn by inverse CDF
//! (`t = 1 - (1-u)^(1/beta)`, exact, one uniform per draw); weights are
//! `lambda_k = t_k prod_{i<k} (1 - t_i)`. For every measurable partition the
//! vector of block masses is Dirichlet(`beta m(M_1), ..., beta m(M_N)`).

use crate::domain::{DomainKind, Grid, Point};
use crate::measure::Measure;
use crate::special::ln_gamma;
use crate::transport::reference_cdf;
use crate::{Error, Result};
use rand::{Rng, RngExt};

/// Stick-breaking truncation rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Truncation {
    /// Stop once the unassigned remainder drops below the threshold.
    RemainderBelow(f64),
    /// Stop after a fixed number of sticks.
    MaxTerms(usize),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::RemainderBelow(1e-10)
    }
}

/// Hard cap on the number of sticks regardless of the rule.
pub const MAX_STICKS: usize = 1_000_000;

/// A truncated stick-breaking draw.
#[derive(Clone, Debug)]
pub struct StickBreakingSample {
    pub beta: f64,
    /// The Beta(1, beta) sticks `t_k`.
    pub sticks: Vec<f64>,
    /// Weights `lambda_k = t_k prod_{i<k}(1 - t_i)`.
    pub weights: Vec<f64>,
    /// Unassigned mass `prod_k (1 - t_k)`; never silently dropped.
    pub remainder: f64,
}

/// Draws sticks until the truncation rule fires.
pub fn sample_stick_breaking(
    beta: f64,
    rng: &mut impl Rng,
    truncation: Truncation,
) -> Result<StickBreakingSample> {
    if !(beta > 0.0) {
        return Err(Error::input(format!("beta must be positive, got {beta}")));
    }
    let (threshold, cap) = match truncation {
        Truncation::RemainderBelow(r) => {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::input("remainder threshold must be in (0,1)"));
            }
            (r, MAX_STICKS)
        }
        Truncation::MaxTerms(k) => {
            if k == 0 {
                return Err(Error::input("max_terms must be positive"));
            }
            (0.0, k.min(MAX_STICKS))
        }
    };
    let mut sticks = Vec::new();
    let mut weights = Vec::new();
    let mut remainder = 1.0_f64;
    while sticks.len() < cap && remainder > threshold {
        let u: f64 = rng.random();
        let t = 1.0 - (1.0 - u).powf(1.0 / beta);
        let w = t * remainder;
        sticks.push(t);
        weights.push(w);
        remainder -= w;
    }
    Ok(StickBreakingSample {
        beta,
        sticks,
        weights,
        remainder,
    })
}

/// Draws one point from the reference measure of a 1D grid.
fn sample_reference_1d(grid: &Grid, rng: &mut impl Rng) -> Result<f64> {
    let u: f64 = rng.random();
    if grid.domain.sigma.is_uniform() {
        Ok(u)
    } else {
        let q = reference_cdf(grid)?.reflect();
        Ok(q.eval(u))
    }
}

/// Draws a Dirichlet-Ferguson sample `nu = sum_k lambda_k delta_{x_k}` with
/// atoms iid from the reference measure. The truncated weights are
/// renormalized by `1/(1 - remainder)` so they sum to 1 (bias
/// `O(remainder)`).
pub fn sample_dirichlet_ferguson(
    beta: f64,
    grid: &Grid,
    rng: &mut impl Rng,
    truncation: Truncation,
) -> Result<Measure> {
    let sticks = sample_stick_breaking(beta, rng, truncation)?;
    let assigned = 1.0 - sticks.remainder;
    if assigned <= 0.0 {
        return Err(Error::DegenerateMeasure("stick sample carries no mass".into()));
    }
    let mut atoms = Vec::with_capacity(sticks.weights.len());
    for &w in &sticks.weights {
        let p = match grid.domain.kind {
            DomainKind::Interval | DomainKind::Circle => {
                Point::One(sample_reference_1d(grid, rng)?)
            }
            DomainKind::Polygon => {
                Point::Two(crate::semidiscrete::sample_reference(
                    &grid.domain,
                    Some(grid),
                    rng,
                )?)
            }
        };
        atoms.push((p, w / assigned));
    }
    Measure::discrete(&grid.domain, atoms)
}

/// Log-density of the Dirichlet(`beta m(M_1), ..., beta m(M_N)`) law on the
/// simplex, at an interior point `x`. Boundary points return infinite
/// sentinels (`+inf` where an exponent is below 1, `-inf` otherwise).
pub fn dirichlet_marginal_logdensity(block_masses: &[f64], beta: f64, x: &[f64]) -> Result<f64> {
    if block_masses.len() != x.len() {
        return Err(Error::input("marginal/parameter length mismatch"));
    }
    if !(beta > 0.0) {
        return Err(Error::input("beta must be positive"));
    }
    let params: Vec<f64> = block_masses.iter().map(|m| beta * m).collect();
    if params.iter().any(|&a| a <= 0.0) {
        return Err(Error::input("every beta * m(M_i) must be positive"));
    }
    let sx: f64 = x.iter().sum();
    if x.iter().any(|&v| v < 0.0) || (sx - 1.0).abs() > 1e-8 {
        return Err(Error::input("x must lie in the simplex"));
    }
    let mut acc = ln_gamma(beta);
    for (&a, &xi) in params.iter().zip(x) {
        acc -= ln_gamma(a);
        if xi == 0.0 {
            return Ok(if a < 1.0 {
                f64::INFINITY
            } else if a > 1.0 {
                f64::NEG_INFINITY
            } else {
                acc
            });
        }
        acc += (a - 1.0) * xi.ln();
    }
    Ok(acc)
}

/// Weights reordered by size, largest first (the Dirichlet-Poisson order).
pub fn order_sizes(sample: &StickBreakingSample) -> Vec<f64> {
    let mut out = sample.weights.clone();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Expected stick size `E lambda_k = (1/beta) (beta/(1+beta))^k`, `k >= 1`.
pub fn expected_stick(beta: f64, k: usize) -> f64 {
    (1.0 / beta) * (beta / (1.0 + beta)).powi(k as i32)
}
