//! Complex polynomials, root clusters, Taylor maps, and polynomial root max
//! functions.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::Generator;

pub type C64 = Complex64;

/// Default absolute tolerance on generator values when deciding activity.
pub const DEFAULT_ACTIVE_TOL: f64 = 1e-8;
/// Default cluster diameter used when only values (not multiplicities) matter.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Lexicographic order on ℂ: real part first, then imaginary part.
pub fn lex_leq(a: C64, b: C64) -> bool {
    a.re < b.re || (a.re == b.re && a.im <= b.im)
}

pub fn lex_cmp(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// A polynomial with complex coefficients, `coeffs[k]` multiplying `λ^k`.
///
/// The length of the coefficient vector is the degree bound plus one; the
/// actual degree may be lower.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        if coeffs.is_empty() {
            return Self { coeffs: vec![ZERO] };
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// Zero polynomial with degree bound `n`.
    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![ZERO; n + 1] }
    }

    pub fn constant(c: C64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// Monic polynomial with the given roots (repeated by multiplicity).
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut p = Self::constant(ONE);
        for &r in roots {
            p = p.mul(&Self::new(vec![-r, ONE]));
        }
        p
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Index of the highest nonzero coefficient, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn is_monic(&self) -> bool {
        self.degree().map(|d| self.coeffs[d] == ONE).unwrap_or(false)
    }

    /// Same polynomial padded (or trimmed of zero tail) to degree bound `n`.
    pub fn with_bound(&self, n: usize) -> Result<Self> {
        if let Some(d) = self.degree() {
            if d > n {
                return Err(Error::Argument(format!(
                    "polynomial of degree {d} exceeds bound {n}"
                )));
            }
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n + 1, ZERO);
        Ok(Self { coeffs })
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::zero(0);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Max-norm of the coefficient vector.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficients of `self` in the basis `(λ − λ0)^k`, i.e. all Taylor
    /// coefficients at `λ0` (repeated synthetic division).
    pub fn taylor_shift(&self, lambda0: C64) -> Vec<C64> {
        let mut work = self.coeffs.clone();
        let n = work.len();
        for k in 0..n {
            for i in (k..n - 1).rev() {
                let upper = work[i + 1];
                work[i] += lambda0 * upper;
            }
        }
        work
    }
}

/// `(λ − λ0)^ℓ` expanded into coefficients.
pub fn elementary(ell: i64, lambda0: C64) -> Result<Poly> {
    if ell < 0 {
        return Err(Error::Argument(format!("negative monomial power {ell}")));
    }
    let ell = ell as usize;
    // binomial expansion: coefficient of λ^k is C(ℓ,k)(−λ0)^{ℓ−k}
    let mut coeffs = vec![ZERO; ell + 1];
    let mut binom = 1.0f64;
    for (k, slot) in coeffs.iter_mut().enumerate() {
        *slot = (-lambda0).powu((ell - k) as u32) * binom;
        binom = binom * (ell - k) as f64 / (k + 1) as f64;
    }
    Ok(Poly::new(coeffs))
}

/// `p^{(k)}(λ0)/k!`.
pub fn taylor_coeff(p: &Poly, k: usize, lambda0: C64) -> C64 {
    if k > p.degree_bound() {
        return ZERO;
    }
    let mut acc = ZERO;
    let mut zpow = ONE;
    let mut binom = 1.0f64; // C(i, k) starting at i = k
    for i in k..p.coeffs.len() {
        acc += p.coeffs[i] * binom * zpow;
        zpow *= lambda0;
        binom = binom * (i + 1) as f64 / (i + 1 - k) as f64;
    }
    acc
}

/// Distinct roots in lexicographic order with their multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootCluster {
    roots: Vec<C64>,
    multiplicities: Vec<usize>,
}

impl RootCluster {
    /// Builds a cluster from `(root, multiplicity)` pairs, sorting them
    /// lexicographically. Roots must be pairwise distinct.
    pub fn new(pairs: Vec<(C64, usize)>) -> Result<Self> {
        let mut pairs = pairs;
        pairs.sort_by(|a, b| lex_cmp(&a.0, &b.0));
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Argument(format!("repeated root {}", w[0].0)));
            }
        }
        if pairs.iter().any(|&(_, m)| m == 0) {
            return Err(Error::Argument("zero multiplicity".into()));
        }
        if pairs.iter().any(|(r, _)| !r.re.is_finite() || !r.im.is_finite()) {
            return Err(Error::Argument("non-finite root".into()));
        }
        let (roots, multiplicities) = pairs.into_iter().unzip();
        Ok(Self {
            roots,
            multiplicities,
        })
    }

    pub fn roots(&self) -> &[C64] {
        &self.roots
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Offset of block `j` inside a Taylor coordinate vector in `ℂ^{ñ+1}`.
    pub fn block_offset(&self, j: usize) -> usize {
        1 + self.multiplicities[..j].iter().sum::<usize>()
    }

    /// Index of the root equal to `z` (within `tol`).
    pub fn index_of(&self, z: C64, tol: f64) -> Option<usize> {
        self.roots.iter().position(|r| (r - z).norm() <= tol)
    }

    /// `Π_j (λ − λ_j)^{n_j}`.
    pub fn to_poly(&self) -> Poly {
        let mut p = Poly::constant(ONE);
        for (&r, &m) in self.roots.iter().zip(&self.multiplicities) {
            for _ in 0..m {
                p = p.mul(&Poly::new(vec![-r, ONE]));
            }
        }
        p
    }
}

/// Eigenvalues of the (balanced) companion matrix of `p`.
pub fn raw_roots(p: &Poly) -> Result<Vec<C64>> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::Argument("zero polynomial has no root set".into()))?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = p.coeffs[deg];
    if deg == 1 {
        return Ok(vec![-p.coeffs[0] / lead]);
    }
    let mut comp = DMatrix::<C64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = ONE;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -p.coeffs[i] / lead;
    }
    crate::linalg::balance(&mut comp);
    let dp = p.derivative();
    Ok(crate::linalg::eigenvalues(&comp)?
        .into_iter()
        .map(|z| polish(p, &dp, z))
        .collect())
}

/// Newton steps on `p` from an eigenvalue estimate. Steps must be small and
/// reduce `|p|`, so the iterate never jumps to a neighbouring root; at a
/// multiple root this drives the estimate down to the `√ε` floor.
fn polish(p: &Poly, dp: &Poly, mut z: C64) -> C64 {
    let mut pz = p.eval(z).norm();
    for _ in 0..60 {
        let d = dp.eval(z);
        if pz == 0.0 || d == ZERO {
            break;
        }
        let step = p.eval(z) / d;
        if step.norm() > 1e-4 * (1.0 + z.norm()) {
            break;
        }
        let next = z - step;
        let pn = p.eval(next).norm();
        if !(pn < pz) {
            break;
        }
        z = next;
        pz = pn;
    }
    z
}

/// All roots of `p`, greedily merged into clusters of diameter at most
/// `cluster_tol` and represented by their centroids.
pub fn roots(p: &Poly, cluster_tol: f64) -> Result<RootCluster> {
    let mut raw = raw_roots(p)?;
    raw.sort_by(lex_cmp);
    Ok(cluster_roots(&raw, cluster_tol))
}

pub fn cluster_roots(raw: &[C64], cluster_tol: f64) -> RootCluster {
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    'outer: for &z in raw {
        for c in clusters.iter_mut() {
            if c.iter().all(|w| (w - z).norm() <= cluster_tol) {
                c.push(z);
                continue 'outer;
            }
        }
        clusters.push(vec![z]);
    }
    let mut pairs: Vec<(C64, usize)> = clusters
        .into_iter()
        .map(|c| {
            let m = c.len();
            let centroid = c.iter().sum::<C64>() / m as f64;
            (centroid, m)
        })
        .collect();
    pairs.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    // centroids of distinct clusters can coincide only in degenerate input
    let mut merged: Vec<(C64, usize)> = Vec::with_capacity(pairs.len());
    for (z, m) in pairs {
        match merged.last_mut() {
            Some(last) if last.0 == z => last.1 += m,
            _ => merged.push((z, m)),
        }
    }
    let (roots, multiplicities) = merged.into_iter().unzip();
    RootCluster {
        roots,
        multiplicities,
    }
}

/// Result of evaluating a polynomial root max function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActiveSet {
    /// `max_j f(λ_j)`; `+∞` when some root lies outside `dom f`.
    pub value: f64,
    /// Indices into `roots` of the active roots.
    pub indices: Vec<usize>,
    pub roots: RootCluster,
}

impl ActiveSet {
    pub fn active_roots(&self) -> Vec<C64> {
        self.indices.iter().map(|&j| self.roots.roots[j]).collect()
    }

    pub fn in_domain(&self) -> bool {
        self.value.is_finite()
    }
}

pub fn active_set(p: &Poly, f: &dyn Generator, active_tol: f64) -> Result<ActiveSet> {
    active_set_with(p, f, active_tol, DEFAULT_CLUSTER_TOL)
}

pub fn active_set_with(
    p: &Poly,
    f: &dyn Generator,
    active_tol: f64,
    cluster_tol: f64,
) -> Result<ActiveSet> {
    let deg = p.degree().unwrap_or(0);
    if deg == 0 {
        return Err(Error::Argument(
            "root max function needs a nonconstant polynomial".into(),
        ));
    }
    let cluster = roots(p, cluster_tol)?;
    Ok(active_set_of_cluster(cluster, f, active_tol))
}

pub fn active_set_of_cluster(cluster: RootCluster, f: &dyn Generator, active_tol: f64) -> ActiveSet {
    let values: Vec<f64> = cluster.roots.iter().map(|&z| f.value(z)).collect();
    let value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let indices = if value.is_finite() {
        values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= value - active_tol)
            .map(|(j, _)| j)
            .collect()
    } else {
        values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == f64::INFINITY)
            .map(|(j, _)| j)
            .collect()
    };
    ActiveSet {
        value,
        indices,
        roots: cluster,
    }
}

/// `max { f(λ) : p(λ) = 0 }`.
pub fn poly_root_max(p: &Poly, f: &dyn Generator) -> Result<f64> {
    Ok(active_set(p, f, DEFAULT_ACTIVE_TOL)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Builtin;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lex_examples() {
        assert!(lex_leq(c(0.0, 0.0), c(1.0, 1.0)));
        assert!(!lex_leq(c(1.0, 0.0), c(1.0, -1.0)));
        assert!(lex_leq(c(2.0, 3.0), c(2.0, 3.0)));
    }

    #[test]
    fn elementary_examples() {
        assert_eq!(elementary(0, c(3.0, 4.0)).unwrap().coeffs(), &[ONE]);
        assert_eq!(
            elementary(2, ONE).unwrap(),
            Poly::from_real(&[1.0, -2.0, 1.0])
        );
        // repeated convolution oracle
        let i = c(0.0, 1.0);
        let mut slow = Poly::constant(ONE);
        for _ in 0..3 {
            slow = slow.mul(&Poly::new(vec![-i, ONE]));
        }
        let fast = elementary(3, i).unwrap();
        for k in 0..4 {
            assert!((fast.coeff(k) - slow.coeff(k)).norm() < 1e-15);
        }
        assert!(elementary(-1, ONE).is_err());
    }

    #[test]
    fn taylor_examples() {
        let l0 = c(0.3, -1.2);
        let e = elementary(4, l0).unwrap();
        assert!((taylor_coeff(&e, 4, l0) - ONE).norm() < 1e-12);
        for k in 0..4 {
            assert!(taylor_coeff(&e, k, l0).norm() < 1e-12);
        }
        let p = Poly::from_real(&[1.0, 0.0, 1.0]);
        assert!((taylor_coeff(&p, 1, ONE) - c(2.0, 0.0)).norm() < 1e-15);
        let shift = p.taylor_shift(ONE);
        for (k, s) in shift.iter().enumerate() {
            assert!((s - taylor_coeff(&p, k, ONE)).norm() < 1e-14);
        }
    }

    #[test]
    fn root_examples() {
        let sq = Poly::from_real(&[1.0, -2.0, 1.0]);
        let r = roots(&sq, 1e-6).unwrap();
        assert_eq!(r.multiplicities(), &[2]);
        assert!((r.roots()[0] - ONE).norm() < 1e-12);

        let p = Poly::from_real(&[0.0, 1.0, 1.0]);
        let r = roots(&p, 1e-6).unwrap();
        assert_eq!(r.multiplicities(), &[1, 1]);
        assert!((r.roots()[0] + ONE).norm() < 1e-12);
        assert!(r.roots()[1].norm() < 1e-12);

        // (λ−1)²(λ+1) = λ³ − λ² − λ + 1, perturbed
        let pert = Poly::from_real(&[1.0 + 1e-12, -1.0 - 1e-12, -1.0 + 1e-12, 1.0]);
        let r = roots(&pert, 1e-5).unwrap();
        assert_eq!(r.multiplicities(), &[1, 2]);
        assert!((r.roots()[0] + ONE).norm() < 1e-9);
        assert!((r.roots()[1] - ONE).norm() < 1e-9);

        assert!(roots(&Poly::zero(3), 1e-6).is_err());
    }

    #[test]
    fn active_set_examples() {
        let p = Poly::from_real(&[-1.0, 0.0, 1.0]);
        let a = active_set(&p, &Builtin::Abscissa, 1e-8).unwrap();
        assert!((a.value - 1.0).abs() < 1e-12);
        assert_eq!(a.indices, vec![1]);
        let a = active_set(&p, &Builtin::Radius, 1e-8).unwrap();
        assert_eq!(a.indices, vec![0, 1]);

        // λ²(λ − ½) with |·|²/2
        let p = Poly::from_real(&[0.0, 0.0, -0.5, 1.0]);
        let a = active_set(&p, &Builtin::Radius2, 1e-8).unwrap();
        assert!((a.value - 0.125).abs() < 1e-12);
        assert_eq!(a.active_roots().len(), 1);
        assert!((a.active_roots()[0] - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn root_max_examples() {
        let p = elementary(5, ZERO).unwrap();
        assert!(poly_root_max(&p, &Builtin::Abscissa).unwrap().abs() < 1e-6);
        let a = Poly::from_real(&[1.0, -1.0, -1.0, 1.0]);
        assert!((poly_root_max(&a, &Builtin::Radius).unwrap() - 1.0).abs() < 1e-9);
        let p = Poly::from_roots(&[c(0.0, 2.0), c(-1.0, 0.0)]);
        assert!((poly_root_max(&p, &Builtin::Radius).unwrap() - 2.0).abs() < 1e-12);
        assert!(active_set(&Poly::constant(ONE), &Builtin::Abscissa, 1e-8).is_err());
    }
}
