//! Subgradient descent on `θ ↦ φ(A₀ + Σ_k θ_k A_k)` over real parameters.
//!
//! Iterates are generic, so their eigenvalues are treated as simple: the
//! subgradient comes from [`rsd_sample`] at the diagonalizable spec, or, when
//! eigenvalues are too close to separate, from left/right eigenvectors of the
//! top eigenvalue. This is a heuristic demo, not a convergent method for
//! nonsmooth problems in general.

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex_poly::C64;
use crate::error::{Error, Result};
use crate::generators::{Builtin, Generator};
use crate::json::{matrix_from_rows, MatrixRows};
use crate::linalg::{self, CMatrix};
use crate::matrix_jordan::{active_factor, from_diagonalizable};
use crate::spec_subdiff::{radius_rsd_sample, rsd_sample, SampleConvention};

/// JSON form: `{"A0": [[…]], "A": [[[…]], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    #[serde(rename = "A0")]
    pub a0: MatrixRows,
    #[serde(rename = "A", default)]
    pub a: Vec<MatrixRows>,
}

/// `X(θ) = A₀ + Σ_k θ_k A_k`.
#[derive(Debug, Clone)]
pub struct AffineFamily {
    pub a0: CMatrix,
    pub dirs: Vec<CMatrix>,
}

impl AffineFamily {
    pub fn new(a0: CMatrix, dirs: Vec<CMatrix>) -> Result<Self> {
        let n = a0.nrows();
        if a0.ncols() != n || n == 0 {
            return Err(Error::Argument("A0 must be square and nonempty".into()));
        }
        if let Some(d) = dirs.iter().find(|d| d.nrows() != n || d.ncols() != n) {
            return Err(Error::Dimension {
                expected: n,
                actual: d.nrows(),
            });
        }
        Ok(AffineFamily { a0, dirs })
    }

    pub fn from_json(js: &FamilyJson) -> Result<Self> {
        let dirs = js.a.iter().map(matrix_from_rows).collect::<Result<Vec<_>>>()?;
        Self::new(matrix_from_rows(&js.a0)?, dirs)
    }

    pub fn at(&self, theta: &[f64]) -> CMatrix {
        let mut x = self.a0.clone();
        for (t, d) in theta.iter().zip(&self.dirs) {
            x += d * C64::new(*t, 0.0);
        }
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepRule {
    /// `α` at every step.
    Constant,
    /// `α/√(k+1)`.
    Diminishing,
}

impl FromStr for StepRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(StepRule::Constant),
            "diminishing" => Ok(StepRule::Diminishing),
            _ => Err(Error::Argument(format!(
                "unknown step rule '{s}' (expected constant or diminishing)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Step {
    pub iter: usize,
    pub value: f64,
    pub best: f64,
    pub theta: Vec<f64>,
}

fn eigen_gradient(x: &CMatrix, f: &dyn Generator) -> Result<CMatrix> {
    let eigs = linalg::eigenvalues(x)?;
    let lam = eigs
        .iter()
        .copied()
        .max_by(|a, b| f.value(*a).total_cmp(&f.value(*b)))
        .ok_or_else(|| Error::Argument("empty matrix".into()))?;
    let g = f
        .grad(lam)
        .ok_or_else(|| Error::Precondition(format!("{} not differentiable at {lam}", f.name())))?;
    let r = linalg::eigenvector(x, lam)?;
    let l = linalg::eigenvector(&x.adjoint(), lam.conj())?;
    let n = x.nrows();
    let denom: C64 = (0..n).map(|i| l[i].conj() * r[i]).sum();
    if denom.norm() < 1e-14 {
        return Err(Error::Numerical("left and right eigenvectors are orthogonal".into()));
    }
    // dλ = tr(G Z) with G = r l^*/(l^* r), so Y = ∇f·G^*
    let gm = CMatrix::from_fn(n, n, |i, j| r[i] * l[j].conj()) / denom;
    Ok(gm.adjoint() * g)
}

/// A regular subgradient of `φ` at a generic matrix.
pub fn subgradient(x: &CMatrix, f: &dyn Generator, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    let Ok(spec) = from_diagonalizable(x) else {
        return eigen_gradient(x, f);
    };
    let k = active_factor(&spec, f, 1e-12)?.active.len();
    let gamma = vec![1.0 / k as f64; k];
    let y = if f.builtin() == Some(Builtin::Radius) {
        radius_rsd_sample(&spec, &gamma, rng, 1.0)
    } else {
        rsd_sample(&spec, f, &gamma, rng, 1.0, SampleConvention::Reconciled)
    };
    y.or_else(|_| eigen_gradient(x, f))
}

/// Runs `iters` normalized subgradient steps from `theta0`.
pub fn run(
    family: &AffineFamily,
    f: &dyn Generator,
    theta0: &[f64],
    iters: usize,
    rule: StepRule,
    alpha: f64,
    seed: u64,
) -> Result<Vec<Step>> {
    if theta0.len() != family.dirs.len() {
        return Err(Error::Dimension {
            expected: family.dirs.len(),
            actual: theta0.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = theta0.to_vec();
    let mut best = f64::INFINITY;
    let mut out = Vec::with_capacity(iters + 1);
    for k in 0..=iters {
        let x = family.at(&theta);
        let eigs = linalg::eigenvalues(&x)?;
        let value = eigs.iter().map(|&l| f.value(l)).fold(f64::NEG_INFINITY, f64::max);
        best = best.min(value);
        out.push(Step {
            iter: k,
            value,
            best,
            theta: theta.clone(),
        });
        if k == iters {
            break;
        }
        let y = subgradient(&x, f, &mut rng)?;
        let g: Vec<f64> = family.dirs.iter().map(|d| linalg::real_inner(&y, d)).collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let a = match rule {
            StepRule::Constant => alpha,
            StepRule::Diminishing => alpha / ((k + 1) as f64).sqrt(),
        };
        for (t, gi) in theta.iter_mut().zip(&g) {
            *t -= a * gi / norm;
        }
    }
    Ok(out)
}

/// `iter,value,best,theta_1,…` rows.
pub fn to_csv(steps: &[Step]) -> String {
    let k = steps.first().map_or(0, |s| s.theta.len());
    let mut s = String::from("iter,value,best");
    for i in 1..=k {
        s.push_str(&format!(",theta_{i}"));
    }
    s.push('\n');
    for st in steps {
        s.push_str(&format!("{},{},{}", st.iter, st.value, st.best));
        for t in &st.theta {
            s.push_str(&format!(",{t}"));
        }
        s.push('\n');
    }
    s
}
