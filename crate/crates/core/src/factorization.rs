//! Local factorization of a monic polynomial around its distinct roots.
//!
//! For `p̃ = Π_j (λ − λ̃_j)^{n_j}`, perturbations are parameterized by a
//! scalar `μ₀` and one factor `u_j` of degree `< n_j` per root:
//! `F(u) = (1 + μ₀)·Π_j (e_{n_j} + u_j)`. Coordinates of `u_j` are its Taylor
//! coefficients at `λ̃_j`, highest first: `μ_{js} = τ_{n_j−s}(u_j)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::complex_poly::{elementary, taylor_coeff, Poly, RootCluster, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Residual bound for the inverse of `F′(0)`.
pub const INVERSE_RESIDUAL_TOL: f64 = 1e-10;

/// The coordinate space attached to a base polynomial, with `F′(0)` factored
/// once.
#[derive(Debug, Clone)]
pub struct FactorSpace {
    base: Arc<RootCluster>,
    base_poly: Poly,
    /// `r_j = p̃ / e_{n_j}^{λ̃_j}`
    cofactors: Vec<Poly>,
    /// `e_{n_j−s}^{λ̃_j}` for every coordinate `(j, s)`, in coordinate order.
    monomials: Vec<Poly>,
    lu: LU<C64, Dyn, Dyn>,
}

/// A point `(μ₀, u₁, …, u_m)` of the factorization space.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSpaceElem {
    pub mu0: C64,
    pub factors: Vec<Poly>,
    pub base: Arc<RootCluster>,
}

impl FactorSpaceElem {
    pub fn zero(base: &Arc<RootCluster>) -> Self {
        FactorSpaceElem {
            mu0: ZERO,
            factors: base
                .multiplicities()
                .iter()
                .map(|&n| Poly::zero(n - 1))
                .collect(),
            base: base.clone(),
        }
    }

    fn check(&self, base: &RootCluster) -> Result<()> {
        if *self.base != *base {
            return Err(Error::Argument("element belongs to another base polynomial".into()));
        }
        if self.factors.len() != base.len() {
            return Err(Error::Dimension {
                expected: base.len(),
                actual: self.factors.len(),
            });
        }
        for (u, &n) in self.factors.iter().zip(base.multiplicities()) {
            if let Some(d) = u.degree() {
                if d >= n {
                    return Err(Error::Dimension {
                        expected: n - 1,
                        actual: d,
                    });
                }
            }
        }
        Ok(())
    }
}

impl FactorSpace {
    pub fn new(base: RootCluster) -> Result<Self> {
        Self::from_arc(Arc::new(base))
    }

    pub fn from_arc(base: Arc<RootCluster>) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::Argument("base polynomial has no roots".into()));
        }
        let base_poly = base.to_poly();
        let mut cofactors = Vec::with_capacity(base.len());
        let mut monomials = Vec::with_capacity(base.degree());
        for (j, (&lam, &n)) in base.roots().iter().zip(base.multiplicities()).enumerate() {
            let mut r = Poly::constant(ONE);
            for (k, (&mu, &m)) in base.roots().iter().zip(base.multiplicities()).enumerate() {
                if k != j {
                    r = r.mul(&elementary(m as i64, mu)?);
                }
            }
            cofactors.push(r);
            for s in 1..=n {
                monomials.push(elementary((n - s) as i64, lam)?);
            }
        }
        let dim = base.degree() + 1;
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for i in 0..dim {
            m[(i, 0)] = base_poly.coeff(i);
        }
        let mut col = 1;
        for (j, &n) in base.multiplicities().iter().enumerate() {
            for _ in 0..n {
                let image = cofactors[j].mul(&monomials[col - 1]);
                for i in 0..dim {
                    m[(i, col)] = image.coeff(i);
                }
                col += 1;
            }
        }
        let lu = m.lu();
        if !lu.is_invertible() {
            return Err(Error::Singular("F′(0) is singular".into()));
        }
        Ok(FactorSpace {
            base,
            base_poly,
            cofactors,
            monomials,
            lu,
        })
    }

    pub fn base(&self) -> &Arc<RootCluster> {
        &self.base
    }

    pub fn base_poly(&self) -> &Poly {
        &self.base_poly
    }

    /// `ñ + 1`.
    pub fn dim(&self) -> usize {
        self.base.degree() + 1
    }

    /// `F(u) = (1 + μ₀)·Π_j (e_{n_j}^{λ̃_j} + u_j)`.
    pub fn apply(&self, u: &FactorSpaceElem) -> Result<Poly> {
        u.check(&self.base)?;
        let mut p = Poly::constant(ONE + u.mu0);
        for ((&lam, &n), q) in self
            .base
            .roots()
            .iter()
            .zip(self.base.multiplicities())
            .zip(&u.factors)
        {
            p = p.mul(&elementary(n as i64, lam)?.add(q));
        }
        p.with_bound(self.base.degree())
    }

    /// `F′(0)w = ω₀·p̃ + Σ_j r_j·w_j`.
    pub fn deriv0(&self, w: &FactorSpaceElem) -> Result<Poly> {
        w.check(&self.base)?;
        let mut p = self.base_poly.scale(w.mu0);
        for (r, q) in self.cofactors.iter().zip(&w.factors) {
            p = p.add(&r.mul(q));
        }
        p.with_bound(self.base.degree())
    }

    /// Taylor coordinates `[μ₀, (μ_{11} … μ_{1n₁}), …]`.
    pub fn t_apply(&self, u: &FactorSpaceElem) -> Result<Vec<C64>> {
        u.check(&self.base)?;
        let mut out = Vec::with_capacity(self.dim());
        out.push(u.mu0);
        for ((&lam, &n), q) in self
            .base
            .roots()
            .iter()
            .zip(self.base.multiplicities())
            .zip(&u.factors)
        {
            for s in 1..=n {
                out.push(taylor_coeff(q, n - s, lam));
            }
        }
        Ok(out)
    }

    pub fn t_inverse(&self, mu: &[C64]) -> Result<FactorSpaceElem> {
        if mu.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                actual: mu.len(),
            });
        }
        let mut factors = Vec::with_capacity(self.base.len());
        let mut k = 1;
        for &n in self.base.multiplicities() {
            let mut q = Poly::zero(n - 1);
            for _ in 0..n {
                q = q.add(&self.monomials[k - 1].scale(mu[k]));
                k += 1;
            }
            factors.push(q.with_bound(n - 1)?);
        }
        Ok(FactorSpaceElem {
            mu0: mu[0],
            factors,
            base: self.base.clone(),
        })
    }

    /// `T(F′(0)⁻¹ v)`: the Taylor coordinates of the unique preimage.
    pub fn coords(&self, v: &Poly) -> Result<Vec<C64>> {
        let n = self.base.degree();
        let v = v
            .with_bound(n)
            .map_err(|_| Error::Argument(format!("polynomial degree exceeds {n}")))?;
        let rhs = DVector::from_column_slice(v.coeffs());
        let x = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("F′(0) is singular".into()))?;
        let x: Vec<C64> = x.iter().copied().collect();
        let back = self.coords_to_poly(&x)?;
        let resid = back.sub(&v).norm_inf();
        if resid > INVERSE_RESIDUAL_TOL * v.norm_inf().max(1.0) {
            return Err(Error::Numerical(format!(
                "F′(0) inverse residual {resid:.2e}"
            )));
        }
        Ok(x)
    }

    /// `F′(0) T⁻¹ μ`.
    pub fn coords_to_poly(&self, mu: &[C64]) -> Result<Poly> {
        self.deriv0(&self.t_inverse(mu)?)
    }

    pub fn deriv0_inv(&self, v: &Poly) -> Result<FactorSpaceElem> {
        self.t_inverse(&self.coords(v)?)
    }

    /// `⟨z, v⟩` on polynomials of degree ≤ ñ induced by the Taylor
    /// coordinates.
    pub fn pn_inner(&self, z: &Poly, v: &Poly) -> Result<C64> {
        let a = self.coords(z)?;
        let b = self.coords(v)?;
        Ok(a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum())
    }

    /// `⟨w, w′⟩` on the factorization space.
    pub fn s_inner(&self, w: &FactorSpaceElem, w2: &FactorSpaceElem) -> Result<C64> {
        let a = self.t_apply(w)?;
        let b = self.t_apply(w2)?;
        Ok(a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum())
    }

    /// Range of coordinate indices belonging to root `j`.
    pub fn block(&self, j: usize) -> std::ops::Range<usize> {
        let start = self.base.block_offset(j);
        start..start + self.base.multiplicities()[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn lam2() -> FactorSpace {
        FactorSpace::new(RootCluster::new(vec![(ZERO, 2)]).unwrap()).unwrap()
    }

    fn lam_lam1() -> FactorSpace {
        FactorSpace::new(RootCluster::new(vec![(ZERO, 1), (ONE, 1)]).unwrap()).unwrap()
    }

    #[test]
    fn apply_examples() {
        let s = lam2();
        let z = FactorSpaceElem::zero(s.base());
        assert_eq!(s.apply(&z).unwrap(), Poly::from_real(&[0.0, 0.0, 1.0]));
        let mut u = z.clone();
        u.mu0 = c(0.25, 0.0);
        assert_eq!(s.apply(&u).unwrap(), Poly::from_real(&[0.0, 0.0, 1.25]));

        let s = lam_lam1();
        let eps = 1e-3;
        let mut u = FactorSpaceElem::zero(s.base());
        u.factors[0] = Poly::from_real(&[eps]);
        // (λ + ε)(λ − 1)
        let want = Poly::from_real(&[-eps, eps - 1.0, 1.0]);
        assert!(s.apply(&u).unwrap().sub(&want).norm_inf() < 1e-15);
    }

    #[test]
    fn deriv_examples() {
        let s = lam2();
        assert!(s.deriv0(&FactorSpaceElem::zero(s.base())).unwrap().is_zero());
        let mut w = FactorSpaceElem::zero(s.base());
        w.factors[0] = Poly::from_real(&[1.0]);
        assert_eq!(s.deriv0(&w).unwrap(), Poly::from_real(&[1.0, 0.0, 0.0]));

        let s = lam_lam1();
        let mut w = FactorSpaceElem::zero(s.base());
        w.factors[0] = Poly::from_real(&[1.0]);
        assert_eq!(s.deriv0(&w).unwrap(), Poly::from_real(&[-1.0, 1.0, 0.0]));
    }

    #[test]
    fn inverse_examples() {
        let s = lam2();
        let w = s.deriv0_inv(s.base_poly()).unwrap();
        assert!((w.mu0 - ONE).norm() < 1e-14);
        assert!(w.factors[0].norm_inf() < 1e-14);
        assert!(s.coords(&Poly::zero(2)).unwrap().iter().all(|z| z.norm() == 0.0));
        let mu = s.coords(&Poly::from_real(&[0.0, 1.0])).unwrap();
        assert!((mu[0]).norm() < 1e-14 && (mu[1] - ONE).norm() < 1e-14 && mu[2].norm() < 1e-14);
        assert!(s.coords(&Poly::from_real(&[0.0, 0.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn taylor_examples() {
        let s = lam2();
        let mut u = FactorSpaceElem::zero(s.base());
        assert!(s.t_apply(&u).unwrap().iter().all(|z| *z == ZERO));
        u.factors[0] = Poly::from_real(&[3.0, 2.0]);
        let t = s.t_apply(&u).unwrap();
        assert_eq!(t, vec![ZERO, c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(s.t_inverse(&t).unwrap(), u);
    }

    #[test]
    fn inner_examples() {
        let s = lam2();
        let p = s.base_poly().clone();
        assert!((s.pn_inner(&p, &p).unwrap() - ONE).norm() < 1e-14);
        let a = Poly::from_real(&[0.0, 1.0]);
        let b = Poly::from_real(&[1.0]);
        assert!(s.pn_inner(&a, &b).unwrap().norm() < 1e-14);
    }
}
