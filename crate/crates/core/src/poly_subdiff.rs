//! Regular subdifferential and subderivative of polynomial root max functions
//! at a monic base polynomial `p̃`, in Taylor coordinates.

use rand::Rng;
use rand::RngCore;

use crate::complex_poly::{active_set_of_cluster, Poly, RootCluster, C64, DEFAULT_ACTIVE_TOL};
use crate::error::{Error, Result};
use crate::factorization::FactorSpace;
use crate::generators::{condition_check, gamma_set, rdot, Condition, GammaSet, Generator};

/// A convex set described by a membership predicate, a sampler and the
/// membership predicate of its horizon cone.
pub trait SetDescriptor {
    fn dim(&self) -> usize;

    fn contains(&self, x: &[C64], tol: f64) -> bool;

    /// A point of the set; `contains(sample(..))` always holds.
    fn sample(&self, rng: &mut dyn RngCore) -> Vec<C64>;

    fn horizon_contains(&self, d: &[C64], tol: f64) -> bool;
}

/// `D_p̃ ⊂ ℂ^{ñ+1}`: convex combinations across the active roots of their
/// `Γ` blocks, with a zero leading coordinate and zero inactive blocks.
#[derive(Debug, Clone)]
pub struct DpSet {
    space: FactorSpace,
    blocks: Vec<GammaSet>,
}

impl DpSet {
    /// Active roots are those within `active_tol` of the max of `f`.
    pub fn new(base: RootCluster, f: &dyn Generator, active_tol: f64) -> Result<Self> {
        let act = active_set_of_cluster(base.clone(), f, active_tol);
        if !act.in_domain() {
            return Err(Error::Precondition("a root lies outside dom f".into()));
        }
        let mut flags = vec![false; base.len()];
        for &j in &act.indices {
            flags[j] = true;
        }
        Self::with_active(FactorSpace::new(base)?, f, &flags)
    }

    pub fn with_active(space: FactorSpace, f: &dyn Generator, active: &[bool]) -> Result<Self> {
        let base = space.base().clone();
        if active.len() != base.len() {
            return Err(Error::Dimension {
                expected: base.len(),
                actual: active.len(),
            });
        }
        if !active.iter().any(|&a| a) {
            return Err(Error::Argument("no active root".into()));
        }
        let mut blocks = Vec::with_capacity(base.len());
        for (j, (&lam, &n)) in base.roots().iter().zip(base.multiplicities()).enumerate() {
            if active[j] && f.subdiff(lam)?.is_singleton() == Some(C64::new(0.0, 0.0)) {
                return Err(Error::Precondition(format!(
                    "∂{}({lam}) = {{0}} at an active root",
                    f.name()
                )));
            }
            blocks.push(gamma_set(f, n, lam, active[j])?);
        }
        Ok(DpSet { space, blocks })
    }

    pub fn space(&self) -> &FactorSpace {
        &self.space
    }

    pub fn blocks(&self) -> &[GammaSet] {
        &self.blocks
    }

    pub fn active_indices(&self) -> Vec<usize> {
        (0..self.blocks.len()).filter(|&j| self.blocks[j].active).collect()
    }

    /// Convex weights `γ` (indexed like the roots, zero on inactive ones)
    /// certifying `c ∈ D_p̃`, or `None`.
    pub fn feasible_weights(&self, c: &[C64], tol: f64) -> Result<Option<Vec<f64>>> {
        if c.len() != self.space.dim() {
            return Err(Error::Dimension {
                expected: self.space.dim(),
                actual: c.len(),
            });
        }
        if c[0].norm() > tol {
            return Ok(None);
        }
        let mut intervals = Vec::with_capacity(self.blocks.len());
        for (j, g) in self.blocks.iter().enumerate() {
            let x = &c[self.space.block(j)];
            match g.scaling_interval(x, tol)? {
                None => return Ok(None),
                Some(iv) => intervals.push(if g.active { iv } else { (0.0, 0.0) }),
            }
        }
        let lo: f64 = intervals.iter().map(|iv| iv.0).sum();
        let hi: f64 = intervals.iter().map(|iv| iv.1).sum();
        let slack = 1e-12 + tol;
        if lo > 1.0 + slack || hi < 1.0 - slack {
            return Ok(None);
        }
        // lift from the lower ends until the weights sum to one
        let mut gamma: Vec<f64> = intervals.iter().map(|iv| iv.0).collect();
        let mut rest = 1.0 - lo;
        for (j, iv) in intervals.iter().enumerate() {
            if rest <= 0.0 {
                break;
            }
            let room = (iv.1 - iv.0).min(rest);
            gamma[j] += room;
            rest -= room;
        }
        Ok(Some(gamma))
    }

    /// Sample with explicit weights over the active roots.
    pub fn sample_with_weights(&self, gamma: &[f64], rng: &mut dyn RngCore, scale: f64) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.space.dim()];
        for (j, g) in self.blocks.iter().enumerate() {
            if !g.active {
                continue;
            }
            let block = g.sample_scaled(gamma[j], rng, scale);
            out[self.space.block(j)].copy_from_slice(&block);
        }
        out
    }

    /// Uniform weights on the simplex over the active roots.
    pub fn random_weights(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let mut w: Vec<f64> = self
            .blocks
            .iter()
            .map(|g| {
                if g.active {
                    -rng.gen::<f64>().max(1e-300).ln()
                } else {
                    0.0
                }
            })
            .collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        w
    }
}

impl SetDescriptor for DpSet {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn contains(&self, x: &[C64], tol: f64) -> bool {
        matches!(self.feasible_weights(x, tol), Ok(Some(_)))
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<C64> {
        let w = self.random_weights(rng);
        self.sample_with_weights(&w, rng, 4.0)
    }

    fn horizon_contains(&self, d: &[C64], tol: f64) -> bool {
        if d.len() != self.space.dim() || d[0].norm() > tol {
            return false;
        }
        self.blocks
            .iter()
            .enumerate()
            .all(|(j, g)| g.horizon_contains(&d[self.space.block(j)], tol))
    }
}

/// Membership of a coordinate vector in `D_p̃`.
pub fn dp_membership(base: &RootCluster, f: &dyn Generator, c: &[C64], tol: f64) -> Result<bool> {
    let dp = DpSet::new(base.clone(), f, DEFAULT_ACTIVE_TOL)?;
    Ok(dp.feasible_weights(c, tol)?.is_some())
}

/// `v ∈ ∂̂𝔣(p̃)` with respect to the `p̃`-inner product.
pub fn rsd_f_membership(base: &RootCluster, f: &dyn Generator, v: &Poly, tol: f64) -> Result<bool> {
    let dp = DpSet::new(base.clone(), f, DEFAULT_ACTIVE_TOL)?;
    let c = dp.space().coords(v)?;
    Ok(dp.feasible_weights(&c, tol)?.is_some())
}

/// `v ∈ ∂̂𝔣(p̃)^∞`.
pub fn rsd_f_horizon_membership(
    base: &RootCluster,
    f: &dyn Generator,
    v: &Poly,
    tol: f64,
) -> Result<bool> {
    let dp = DpSet::new(base.clone(), f, DEFAULT_ACTIVE_TOL)?;
    let c = dp.space().coords(v)?;
    Ok(dp.horizon_contains(&c, tol))
}

/// The subderivative evaluated from Taylor coordinates `ω` of the direction.
///
/// Finite only if, at every active root, `Re(conj(g)·√(−ω_{j2})) = 0` for all
/// `g ∈ ∂f(λ̃_j)` and `ω_{js} = 0` for `s ≥ 3`; then it is
/// `max_j (f′(λ̃_j; −ω_{j1}) + κ_j)/n_j` with `κ_j = f″(λ̃_j; r, r)`,
/// `r = √(−ω_{j2})`, in the smooth case and `κ_j = 0` in the full-span case.
pub fn subderivative_coords(
    base: &RootCluster,
    f: &dyn Generator,
    active: &[usize],
    omega: &[C64],
    tol: f64,
) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for &j in active {
        let lam = base.roots()[j];
        let n = base.multiplicities()[j];
        let off = base.block_offset(j);
        let w = &omega[off..off + n];
        if w.iter().skip(2).any(|z| z.norm() > tol) {
            return Ok(f64::INFINITY);
        }
        let cond = condition_check(f, lam);
        let sd = f.subdiff(lam)?;
        let mut kappa = 0.0;
        if n >= 2 {
            let r = (-w[1]).sqrt();
            // Re(conj(g) r) over g ∈ ∂f ranges over [−σ(−r), σ(r)]
            let hi = sd.support(r);
            let lo = -sd.support(-r);
            let scale = tol * (1.0 + r.norm());
            if hi > scale || lo < -scale {
                return Ok(f64::INFINITY);
            }
            kappa = match cond {
                Condition::Smooth => f.second_deriv(lam, r)?,
                Condition::FullSpan => 0.0,
                Condition::Neither => {
                    return Err(Error::Unsupported(format!(
                        "{} satisfies neither generator hypothesis at {lam}",
                        f.name()
                    )))
                }
            };
        } else if cond == Condition::Neither {
            return Err(Error::Unsupported(format!(
                "{} satisfies neither generator hypothesis at {lam}",
                f.name()
            )));
        }
        let value = (f.dir_deriv(lam, -w[0])? + kappa) / n as f64;
        best = best.max(value);
    }
    Ok(best)
}

fn zero_tol(omega: &[C64]) -> f64 {
    1e-9 * omega.iter().map(|z| z.norm()).fold(1.0, f64::max)
}

/// `d𝔣(p̃)(v)`, `+∞` when the direction leaves the finite region.
pub fn subderivative_f(base: &RootCluster, f: &dyn Generator, v: &Poly) -> Result<f64> {
    let space = FactorSpace::new(base.clone())?;
    let act = active_set_of_cluster(base.clone(), f, DEFAULT_ACTIVE_TOL);
    if !act.in_domain() {
        return Err(Error::Precondition("a root lies outside dom f".into()));
    }
    for &j in &act.indices {
        let lam = base.roots()[j];
        if f.subdiff(lam)?.is_singleton() == Some(C64::new(0.0, 0.0)) {
            return Err(Error::Precondition(format!("∂{}({lam}) = {{0}}", f.name())));
        }
    }
    let omega = space.coords(v)?;
    subderivative_coords(base, f, &act.indices, &omega, zero_tol(&omega))
}

/// Subderivative of the polynomial radius at a monic `p̃` with `𝔯(p̃) > 0`:
/// `max_j (|ω_{j2}| − Re(conj(λ̃_j) ω_{j1}))/(|λ̃_j| n_j)`, finite only when
/// `ω_{j2} ∈ cone(λ̃_j²)` and `ω_{js} = 0` for `s ≥ 3`.
pub fn subderivative_radius(base: &RootCluster, v: &Poly) -> Result<f64> {
    let radius = crate::generators::Builtin::Radius;
    let act = active_set_of_cluster(base.clone(), &radius, DEFAULT_ACTIVE_TOL);
    if act.value <= 0.0 {
        return Err(Error::Unsupported(
            "radius subderivative formula needs a positive radius; use radius2 at a nilpotent matrix"
                .into(),
        ));
    }
    let space = FactorSpace::new(base.clone())?;
    let omega = space.coords(v)?;
    let tol = zero_tol(&omega);
    let mut best = f64::NEG_INFINITY;
    for &j in &act.indices {
        let lam = base.roots()[j];
        let n = base.multiplicities()[j];
        let off = base.block_offset(j);
        let w = &omega[off..off + n];
        if w.iter().skip(2).any(|z| z.norm() > tol) {
            return Ok(f64::INFINITY);
        }
        let mut w2 = C64::new(0.0, 0.0);
        if n >= 2 {
            w2 = w[1];
            let l2 = lam * lam;
            let along = rdot(l2, w2) / l2.norm();
            let across = (l2.conj() * w2).im / l2.norm();
            if across.abs() > tol || along < -tol {
                return Ok(f64::INFINITY);
            }
        }
        let value = (w2.norm() - rdot(lam, w[0])) / (lam.norm() * n as f64);
        best = best.max(value);
    }
    Ok(best)
}
