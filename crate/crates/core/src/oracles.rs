//! Formula-free checks: finite-difference quotients of `φ` and `𝔣`, growth
//! exponent fits, and a seeded regular-subgradient inequality suite.
//!
//! Fixed-direction quotients are only upper evidence for a subderivative
//! (the liminf also varies the direction), so equality is claimed only at
//! simple active roots.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::complex_poly::{raw_roots, Poly, RootCluster, C64};
use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::linalg::{self, CMatrix};
use crate::matrix_jordan::{active_factor, JordanSpec};
use crate::spec_subdiff::spectral_max;

/// Default step sizes.
pub const T_GRID: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

/// Additive floor in every inequality check.
pub const ABS_SLACK: f64 = 1e-8;

/// How a formula value is compared with the quotients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// The extrapolated quotient equals the formula within a relative tolerance.
    Equal,
    /// The formula is at most every quotient plus the slack.
    Upper,
}

#[derive(Debug, Clone, Serialize)]
pub struct FDReport {
    pub steps: Vec<f64>,
    pub quotients: Vec<f64>,
    /// Linear extrapolation of the last two quotients to `t = 0`.
    pub extrapolated: f64,
    /// Slope of `log|q|` against `log t` (needs at least three points).
    pub exponent: Option<f64>,
    /// Quotients growing like `t^{1/k−1}` for some `k ≥ 2`.
    pub holder_growth: bool,
    pub formula: Option<f64>,
    /// `c` in the slack model `c·t^{1/m}`.
    pub slack_c: f64,
    pub verdict: Option<bool>,
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 2 {
        return Err(Error::Argument("need at least two step sizes".into()));
    }
    if t_grid.iter().any(|&t| !(t > 0.0 && t <= 0.1)) {
        return Err(Error::Argument("step sizes must lie in (0, 0.1]".into()));
    }
    if t_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Argument("step sizes must strictly decrease".into()));
    }
    Ok(())
}

/// Slope of `log|q|` against `log t` between the two smallest steps, the
/// part of the grid closest to the asymptotic regime. Needs at least three
/// steps so that a trend across the grid can be checked separately.
pub fn growth_exponent(steps: &[f64], quotients: &[f64]) -> Option<f64> {
    if steps.len() < 3 || quotients.iter().any(|q| *q == 0.0 || !q.is_finite()) {
        return None;
    }
    let k = steps.len();
    let dy = quotients[k - 1].abs().ln() - quotients[k - 2].abs().ln();
    Some(dy / (steps[k - 1].ln() - steps[k - 2].ln()))
}

/// `c = 10·max_i |q_i − q_{i+1}| / |t_i^{1/m} − t_{i+1}^{1/m}|`.
pub fn slack_constant(steps: &[f64], quotients: &[f64], m: usize) -> f64 {
    let e = 1.0 / m.max(1) as f64;
    steps
        .windows(2)
        .zip(quotients.windows(2))
        .map(|(t, q)| 10.0 * (q[0] - q[1]).abs() / (t[0].powf(e) - t[1].powf(e)).abs())
        .fold(0.0, f64::max)
}

fn build_report(steps: &[f64], quotients: Vec<f64>) -> FDReport {
    let k = quotients.len();
    let (t1, t0) = (steps[k - 1], steps[k - 2]);
    let (q1, q0) = (quotients[k - 1], quotients[k - 2]);
    let extrapolated = q1 + (q1 - q0) * t1 / (t0 - t1);
    let exponent = growth_exponent(steps, &quotients);
    let increasing = quotients.windows(2).all(|w| w[1].abs() > w[0].abs());
    let holder_growth = increasing && exponent.is_some_and(|e| e <= -0.25);
    FDReport {
        steps: steps.to_vec(),
        quotients,
        extrapolated,
        exponent,
        holder_growth,
        formula: None,
        slack_c: 0.0,
        verdict: None,
    }
}

impl FDReport {
    /// Compares with a formula value. A `+∞` formula is confirmed by growth
    /// with exponent at most `−0.4`.
    pub fn with_formula(mut self, formula: f64, cmp: Comparison, m: usize, rel_tol: f64) -> Self {
        self.formula = Some(formula);
        self.slack_c = slack_constant(&self.steps, &self.quotients, m);
        let ok = if formula == f64::INFINITY {
            self.exponent.is_some_and(|e| e <= -0.4) && self.holder_growth
        } else {
            match cmp {
                Comparison::Equal => {
                    (self.extrapolated - formula).abs() <= rel_tol * formula.abs().max(1.0)
                }
                Comparison::Upper => self.steps.iter().zip(&self.quotients).all(|(t, q)| {
                    formula <= q + self.slack_c * t.powf(1.0 / m.max(1) as f64) + ABS_SLACK
                }),
            }
        };
        self.verdict = Some(ok);
        self
    }
}

/// Quotients `(φ(X + tZ) − φ(X))/t`.
pub fn fd_phi_quotient(x: &CMatrix, f: &dyn Generator, z: &CMatrix, t_grid: &[f64]) -> Result<FDReport> {
    check_grid(t_grid)?;
    let base = spectral_max(x, f)?;
    let q = t_grid
        .iter()
        .map(|&t| Ok((spectral_max(&(x + z * C64::new(t, 0.0)), f)? - base) / t))
        .collect::<Result<Vec<_>>>()?;
    Ok(build_report(t_grid, q))
}

fn max_over(eigs: &[C64], f: &dyn Generator) -> f64 {
    eigs.iter().map(|&l| f.value(l)).fold(f64::NEG_INFINITY, f64::max)
}

/// `φ(X̃ + tZ)` computed as the eigenvalues of `J + tP̃ZP̃⁻¹`, which avoids
/// mixing the Jordan structure through `P̃`.
pub fn phi_perturbed(spec: &JordanSpec, f: &dyn Generator, v: &CMatrix, t: f64) -> Result<f64> {
    let m = spec.jordan() + v * C64::new(t, 0.0);
    Ok(max_over(&linalg::eigenvalues(&m)?, f))
}

/// Quotients of `φ` at a declared matrix, with the exact base value.
pub fn fd_phi_quotient_spec(spec: &JordanSpec, f: &dyn Generator, z: &CMatrix, t_grid: &[f64]) -> Result<FDReport> {
    check_grid(t_grid)?;
    let base = active_factor(spec, f, crate::complex_poly::DEFAULT_ACTIVE_TOL)?.value;
    let v = spec.p() * z * spec.p_inv();
    let q = t_grid
        .iter()
        .map(|&t| Ok((phi_perturbed(spec, f, &v, t)? - base) / t))
        .collect::<Result<Vec<_>>>()?;
    Ok(build_report(t_grid, q))
}

/// Quotients `(𝔣(p̃ + tv) − 𝔣(p̃))/t` by recomputing roots.
pub fn fd_poly_quotient(base: &RootCluster, f: &dyn Generator, v: &Poly, t_grid: &[f64]) -> Result<FDReport> {
    check_grid(t_grid)?;
    let p = base.to_poly();
    if v.degree().is_some_and(|d| d >= p.degree_bound()) {
        return Err(Error::Argument("direction must have degree below that of p̃".into()));
    }
    let f0 = max_over(base.roots(), f);
    let q = t_grid
        .iter()
        .map(|&t| {
            let pt = p.add(&v.scale(C64::new(t, 0.0)));
            Ok((max_over(&raw_roots(&pt)?, f) - f0) / t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(build_report(t_grid, q))
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub samples: usize,
    pub radii: Vec<f64>,
    /// Directions where some radius exceeded the slack.
    pub violations: usize,
    /// Largest `Re⟨Y,Z⟩ − q(t) − c·t^{1/m} − 1e-8` (≤ 0 means no violation).
    pub max_violation: f64,
    pub worst_sample: Option<usize>,
    pub seed: u64,
}

/// Unit-Frobenius Gaussian direction number `index` of the stream `seed`.
pub fn gaussian_direction(n: usize, seed: u64, index: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let z = CMatrix::from_fn(n, n, |_, _| {
        C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    });
    let nz = linalg::frobenius(&z);
    z / C64::new(nz, 0.0)
}

/// Checks `Re⟨Y, Z⟩ ≤ (φ(X̃ + tZ) − φ(X̃))/t + c·t^{1/m} + 1e-8` for each
/// radius `t`, over the directions `±I/√n` followed by `n_samples` seeded
/// Gaussian directions. `m` is the largest active Jordan block and `c` is
/// calibrated per direction from the spread of its quotients.
pub fn subgradient_inequality_suite(
    spec: &JordanSpec,
    f: &dyn Generator,
    y: &CMatrix,
    n_samples: usize,
    radii: &[f64],
    seed: u64,
) -> Result<SuiteReport> {
    check_grid(radii)?;
    let n = spec.n();
    let af = active_factor(spec, f, crate::complex_poly::DEFAULT_ACTIVE_TOL)?;
    let m = af.active.iter().map(|&j| spec.eig(j).m()).max().unwrap_or(1);
    let e = 1.0 / m as f64;
    let id = linalg::identity(n) / C64::new((n as f64).sqrt(), 0.0);
    let mut report = SuiteReport {
        samples: n_samples + 2,
        radii: radii.to_vec(),
        violations: 0,
        max_violation: f64::NEG_INFINITY,
        worst_sample: None,
        seed,
    };
    for i in 0..n_samples + 2 {
        let z = match i {
            0 => id.clone(),
            1 => -id.clone(),
            _ => gaussian_direction(n, seed, (i - 2) as u64),
        };
        let v = spec.p() * &z * spec.p_inv();
        let lhs = linalg::real_inner(y, &z);
        let q = radii
            .iter()
            .map(|&t| Ok((phi_perturbed(spec, f, &v, t)? - af.value) / t))
            .collect::<Result<Vec<_>>>()?;
        let c = slack_constant(radii, &q, m);
        let worst = radii
            .iter()
            .zip(&q)
            .map(|(t, q)| lhs - q - c * t.powf(e) - ABS_SLACK)
            .fold(f64::NEG_INFINITY, f64::max);
        if worst > 0.0 {
            report.violations += 1;
        }
        if worst > report.max_violation {
            report.max_violation = worst;
            report.worst_sample = Some(i);
        }
    }
    Ok(report)
}

/// `max_Δ (Re⟨Y,Δ⟩ − (φ(X̃+Δ) − φ(X̃)))₊ / ‖Δ‖` over seeded directions of
/// norm `r`, for each `r` in `radii`.
pub fn definition_gap(
    spec: &JordanSpec,
    f: &dyn Generator,
    y: &CMatrix,
    n_samples: usize,
    radii: &[f64],
    seed: u64,
) -> Result<Vec<f64>> {
    let af = active_factor(spec, f, crate::complex_poly::DEFAULT_ACTIVE_TOL)?;
    let dirs: Vec<CMatrix> = (0..n_samples as u64)
        .map(|i| gaussian_direction(spec.n(), seed, i))
        .collect();
    radii
        .iter()
        .map(|&r| {
            let mut gap = 0.0f64;
            for z in &dirs {
                let v = spec.p() * z * spec.p_inv();
                let diff = phi_perturbed(spec, f, &v, r)? - af.value;
                gap = gap.max((r * linalg::real_inner(y, z) - diff) / r);
            }
            Ok(gap)
        })
        .collect()
}
