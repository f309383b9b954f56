//! Convex generators `f: ℂ → ℝ ∪ {+∞}` and the planar convex sets built from
//! their subdifferentials.
//!
//! Complex numbers are paired through `⟨ξ, ζ⟩ = Re(conj(ξ)·ζ)`; every
//! inequality between complex inner products is read on the real part.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::complex_poly::{C64, ZERO};
use crate::error::{Error, Result};
use crate::poly_subdiff::SetDescriptor;

/// Real 2×2 symmetric form in the `(Re, Im)` basis.
pub type RealForm = [[f64; 2]; 2];

/// `[a.re a.im] H [b.re b.im]ᵀ`.
pub fn form_apply(h: &RealForm, a: C64, b: C64) -> f64 {
    let av = [a.re, a.im];
    let bv = [b.re, b.im];
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s += av[i] * h[i][j] * bv[j];
        }
    }
    s
}

/// `Re(conj(a)·b)`.
#[inline]
pub fn rdot(a: C64, b: C64) -> f64 {
    a.re * b.re + a.im * b.im
}

/// Local smoothness class of a generator at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothness {
    /// Hessian constant in ζ on all of ℂ.
    Quadratic,
    C2PositiveDefinite,
    /// Not differentiable and the subdifferential meets every real line.
    NonsmoothFullspan,
    Other,
}

/// Which of the two generator hypotheses holds at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    /// Quadratic, or C² with a positive definite Hessian.
    Smooth,
    /// `rspan(∂f(λ)) = ℂ`.
    FullSpan,
    Neither,
}

/// A proper, convex, lsc function on ℂ with first- and second-order access.
pub trait Generator: Send + Sync {
    fn name(&self) -> String;

    /// `+∞` outside the domain.
    fn value(&self, z: C64) -> f64;

    /// Gradient as a complex number `∂f/∂x + i ∂f/∂y`, where it exists.
    fn grad(&self, z: C64) -> Option<C64>;

    fn hess(&self, z: C64) -> Option<RealForm>;

    fn subdiff(&self, z: C64) -> Result<ConvexSet2D>;

    fn smoothness(&self, z: C64) -> Smoothness;

    fn builtin(&self) -> Option<Builtin> {
        None
    }

    /// Directional derivative `f′(ζ; δ) = sup { ⟨g, δ⟩ : g ∈ ∂f(ζ) }`.
    fn dir_deriv(&self, z: C64, d: C64) -> Result<f64> {
        if let Some(g) = self.grad(z) {
            return Ok(rdot(g, d));
        }
        Ok(self.subdiff(z)?.support(d))
    }

    /// `f″(ζ; δ, δ) = ⟨δ, ∇²f(ζ) δ⟩`.
    fn second_deriv(&self, z: C64, d: C64) -> Result<f64> {
        let h = self
            .hess(z)
            .ok_or_else(|| Error::Unsupported(format!("{} has no Hessian at {z}", self.name())))?;
        Ok(form_apply(&h, d, d))
    }
}

/// The built-in generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    /// `Re ζ`
    Abscissa,
    /// `|ζ|`
    Radius,
    /// `|ζ|²/2`
    Radius2,
    /// `|Re ζ| + |Im ζ|`
    Ell1,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [
        Builtin::Abscissa,
        Builtin::Radius,
        Builtin::Radius2,
        Builtin::Ell1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Builtin::Abscissa => "abscissa",
            Builtin::Radius => "radius",
            Builtin::Radius2 => "radius2",
            Builtin::Ell1 => "ell1",
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "abscissa" | "re" => Ok(Builtin::Abscissa),
            "radius" | "abs" => Ok(Builtin::Radius),
            "radius2" => Ok(Builtin::Radius2),
            "ell1" | "l1" => Ok(Builtin::Ell1),
            other => Err(Error::Argument(format!("unknown generator '{other}'"))),
        }
    }
}

pub fn builtin(name: &str) -> Result<Builtin> {
    name.parse()
}

fn sign_or_none(x: f64) -> Option<f64> {
    if x > 0.0 {
        Some(1.0)
    } else if x < 0.0 {
        Some(-1.0)
    } else {
        None
    }
}

impl Generator for Builtin {
    fn name(&self) -> String {
        self.as_str().to_string()
    }

    fn value(&self, z: C64) -> f64 {
        match self {
            Builtin::Abscissa => z.re,
            Builtin::Radius => z.norm(),
            Builtin::Radius2 => 0.5 * z.norm_sqr(),
            Builtin::Ell1 => z.re.abs() + z.im.abs(),
        }
    }

    fn grad(&self, z: C64) -> Option<C64> {
        match self {
            Builtin::Abscissa => Some(C64::new(1.0, 0.0)),
            Builtin::Radius => {
                let r = z.norm();
                (r > 0.0).then(|| z / r)
            }
            Builtin::Radius2 => Some(z),
            Builtin::Ell1 => Some(C64::new(sign_or_none(z.re)?, sign_or_none(z.im)?)),
        }
    }

    fn hess(&self, z: C64) -> Option<RealForm> {
        match self {
            Builtin::Abscissa => Some([[0.0; 2]; 2]),
            Builtin::Radius2 => Some([[1.0, 0.0], [0.0, 1.0]]),
            Builtin::Radius => {
                let r = z.norm();
                if r == 0.0 {
                    return None;
                }
                let (ux, uy) = (z.re / r, z.im / r);
                Some([
                    [(1.0 - ux * ux) / r, -ux * uy / r],
                    [-ux * uy / r, (1.0 - uy * uy) / r],
                ])
            }
            Builtin::Ell1 => self.grad(z).map(|_| [[0.0; 2]; 2]),
        }
    }

    fn subdiff(&self, z: C64) -> Result<ConvexSet2D> {
        Ok(match self {
            Builtin::Abscissa | Builtin::Radius2 => ConvexSet2D::Point(self.grad(z).unwrap()),
            Builtin::Radius => match self.grad(z) {
                Some(g) => ConvexSet2D::Point(g),
                None => ConvexSet2D::Disk {
                    center: ZERO,
                    radius: 1.0,
                },
            },
            Builtin::Ell1 => {
                let xs = match sign_or_none(z.re) {
                    Some(s) => (s, s),
                    None => (-1.0, 1.0),
                };
                let ys = match sign_or_none(z.im) {
                    Some(s) => (s, s),
                    None => (-1.0, 1.0),
                };
                match (xs.0 == xs.1, ys.0 == ys.1) {
                    (true, true) => ConvexSet2D::Point(C64::new(xs.0, ys.0)),
                    (true, false) => {
                        ConvexSet2D::Segment(C64::new(xs.0, -1.0), C64::new(xs.0, 1.0))
                    }
                    (false, true) => {
                        ConvexSet2D::Segment(C64::new(-1.0, ys.0), C64::new(1.0, ys.0))
                    }
                    (false, false) => ConvexSet2D::polygon(vec![
                        C64::new(1.0, -1.0),
                        C64::new(1.0, 1.0),
                        C64::new(-1.0, 1.0),
                        C64::new(-1.0, -1.0),
                    ])?,
                }
            }
        })
    }

    fn smoothness(&self, z: C64) -> Smoothness {
        match self {
            Builtin::Abscissa | Builtin::Radius2 => Smoothness::Quadratic,
            // The Hessian of |·| is singular along the radial direction.
            Builtin::Radius if z != ZERO => Smoothness::Other,
            Builtin::Radius => Smoothness::NonsmoothFullspan,
            Builtin::Ell1 if z == ZERO => Smoothness::NonsmoothFullspan,
            Builtin::Ell1 => Smoothness::Other,
        }
    }

    fn builtin(&self) -> Option<Builtin> {
        Some(*self)
    }
}

/// A closed convex subset of ℂ ≅ ℝ².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum ConvexSet2D {
    Point(C64),
    Segment(C64, C64),
    /// Vertices in counter-clockwise order.
    Polygon(Vec<C64>),
    Disk { center: C64, radius: f64 },
    /// `{ z : Re(conj(normal)·z) ≤ offset }`
    HalfPlane { normal: C64, offset: f64 },
    /// `{ point + t·dir : t ∈ ℝ }`
    Line { point: C64, dir: C64 },
    Plane,
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

impl ConvexSet2D {
    /// Polygon from vertices in any order; they are sorted counter-clockwise
    /// around their centroid. Convexity is the caller's responsibility.
    pub fn polygon(mut vertices: Vec<C64>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Argument("polygon needs at least three vertices".into()));
        }
        let c = vertices.iter().sum::<C64>() / vertices.len() as f64;
        vertices.sort_by(|a, b| (a - c).arg().total_cmp(&(b - c).arg()));
        Ok(ConvexSet2D::Polygon(vertices))
    }

    /// Outward unit normals and offsets of a polygon's edges.
    fn edges(v: &[C64]) -> Vec<(C64, f64)> {
        (0..v.len())
            .filter_map(|k| {
                let e = v[(k + 1) % v.len()] - v[k];
                let len = e.norm();
                (len > 0.0).then(|| {
                    let n = C64::new(0.0, -1.0) * e / len;
                    (n, rdot(n, v[k]))
                })
            })
            .collect()
    }

    pub fn contains(&self, z: C64, tol: f64) -> bool {
        match self {
            ConvexSet2D::Point(p) => (z - p).norm() <= tol,
            ConvexSet2D::Segment(a, b) => {
                let e = b - a;
                let l2 = e.norm_sqr();
                if l2 == 0.0 {
                    return (z - a).norm() <= tol;
                }
                let s = (rdot(e, z - a) / l2).clamp(0.0, 1.0);
                (z - (a + e * s)).norm() <= tol
            }
            ConvexSet2D::Polygon(v) => Self::edges(v)
                .iter()
                .all(|(n, b)| rdot(*n, z) <= b + tol),
            ConvexSet2D::Disk { center, radius } => (z - center).norm() <= radius + tol,
            ConvexSet2D::HalfPlane { normal, offset } => {
                rdot(*normal, z) <= offset + tol * normal.norm()
            }
            ConvexSet2D::Line { point, dir } => {
                let d = dir.norm();
                d == 0.0 && (z - point).norm() <= tol
                    || d > 0.0 && cross(*dir / d, z - point).abs() <= tol
            }
            ConvexSet2D::Plane => true,
        }
    }

    /// Support function `σ(d) = sup { Re(conj(s)·d) : s ∈ S }`.
    pub fn support(&self, d: C64) -> f64 {
        match self {
            ConvexSet2D::Point(p) => rdot(*p, d),
            ConvexSet2D::Segment(a, b) => rdot(*a, d).max(rdot(*b, d)),
            ConvexSet2D::Polygon(v) => v
                .iter()
                .map(|p| rdot(*p, d))
                .fold(f64::NEG_INFINITY, f64::max),
            ConvexSet2D::Disk { center, radius } => rdot(*center, d) + radius * d.norm(),
            ConvexSet2D::HalfPlane { normal, offset } => {
                if d == ZERO {
                    return 0.0;
                }
                let t = rdot(*normal, d) / normal.norm_sqr();
                if t >= 0.0 && cross(*normal, d).abs() <= 1e-14 * d.norm() {
                    t * offset
                } else {
                    f64::INFINITY
                }
            }
            ConvexSet2D::Line { point, dir } => {
                if rdot(*dir, d).abs() <= 1e-14 * d.norm() * dir.norm() {
                    rdot(*point, d)
                } else {
                    f64::INFINITY
                }
            }
            ConvexSet2D::Plane => {
                if d == ZERO {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn is_singleton(&self) -> Option<C64> {
        match self {
            ConvexSet2D::Point(p) => Some(*p),
            ConvexSet2D::Segment(a, b) if a == b => Some(*a),
            _ => None,
        }
    }

    /// Whether `{ τζ : τ ∈ ℝ, ζ ∈ S } = ℂ`, i.e. every real line through the
    /// origin meets `S` at a nonzero point.
    pub fn full_rspan(&self) -> bool {
        match self {
            ConvexSet2D::Point(_) | ConvexSet2D::Segment(..) => false,
            ConvexSet2D::Disk { center, radius } => center.norm() < *radius,
            ConvexSet2D::Polygon(v) => {
                let edges = Self::edges(v);
                let slack: Vec<f64> = edges.iter().map(|(n, b)| b - rdot(*n, ZERO)).collect();
                if slack.iter().any(|&s| s < 0.0) {
                    return false;
                }
                let on_boundary = slack.iter().filter(|&&s| s == 0.0).count();
                // interior point, or relative interior of exactly one edge
                on_boundary <= 1
            }
            ConvexSet2D::HalfPlane { offset, .. } => *offset >= 0.0,
            ConvexSet2D::Line { .. } => false,
            ConvexSet2D::Plane => true,
        }
    }

    /// `{ γ ≥ 0 : t ∈ γ·S }` (to within `tol` on `t`) as a closed interval,
    /// `hi` possibly infinite. `None` when empty. For a half-plane the offset
    /// scales with `γ`.
    pub fn scaling_interval(&self, t: C64, tol: f64) -> Result<Option<(f64, f64)>> {
        let mut lo = 0.0f64;
        let mut hi = f64::INFINITY;
        // constraint a·γ ≥ b
        let linear = |a: f64, b: f64, lo: &mut f64, hi: &mut f64| -> bool {
            if a > 0.0 {
                *lo = lo.max(b / a);
            } else if a < 0.0 {
                *hi = hi.min(b / a);
            } else if b > 0.0 {
                return false;
            }
            true
        };
        match self {
            ConvexSet2D::Point(g) => {
                let g2 = g.norm_sqr();
                if g2 == 0.0 {
                    return Ok((t.norm() <= tol).then_some((0.0, f64::INFINITY)));
                }
                let gamma = rdot(*g, t) / g2;
                if (t - g * gamma).norm() > tol || gamma < -tol / g.norm() {
                    return Ok(None);
                }
                let w = tol / g.norm();
                lo = (gamma - w).max(0.0);
                hi = gamma + w;
            }
            ConvexSet2D::Polygon(v) => {
                for (n, b) in Self::edges(v) {
                    // ⟨n, t⟩ ≤ γ b + tol
                    if !linear(b, rdot(n, t) - tol, &mut lo, &mut hi) {
                        return Ok(None);
                    }
                }
            }
            ConvexSet2D::HalfPlane { normal, offset } => {
                let nn = normal.norm();
                if nn == 0.0 {
                    return Err(Error::Argument("half-plane with zero normal".into()));
                }
                if !linear(offset / nn, rdot(*normal, t) / nn - tol, &mut lo, &mut hi) {
                    return Ok(None);
                }
            }
            ConvexSet2D::Disk { center, radius } => {
                // |t − γc| ≤ γr + tol, squared (both sides nonnegative)
                let a = center.norm_sqr() - radius * radius;
                let b = -2.0 * (rdot(*center, t) + radius * tol);
                let c = t.norm_sqr() - tol * tol;
                let (l, h) = quadratic_sublevel(a, b, c);
                lo = lo.max(l);
                hi = hi.min(h);
            }
            ConvexSet2D::Plane => {}
            ConvexSet2D::Segment(..) | ConvexSet2D::Line { .. } => {
                return Err(Error::Unsupported(
                    "scaling a segment or line subdifferential".into(),
                ))
            }
        }
        Ok((lo <= hi).then_some((lo, hi)))
    }

    /// A point of the set drawn from `rng`; unbounded sets are sampled within
    /// a box of half-width `scale`.
    pub fn sample(&self, rng: &mut dyn RngCore, scale: f64) -> C64 {
        let u = |rng: &mut dyn RngCore| rng.gen::<f64>();
        match self {
            ConvexSet2D::Point(p) => *p,
            ConvexSet2D::Segment(a, b) => a + (b - a) * u(rng),
            ConvexSet2D::Polygon(v) => {
                let w: Vec<f64> = v.iter().map(|_| -u(rng).max(1e-300).ln()).collect();
                let s: f64 = w.iter().sum();
                v.iter().zip(&w).map(|(p, wi)| p * (wi / s)).sum()
            }
            ConvexSet2D::Disk { center, radius } => {
                let r = radius * u(rng).sqrt();
                let a = std::f64::consts::TAU * u(rng);
                center + C64::from_polar(r, a)
            }
            ConvexSet2D::HalfPlane { normal, offset } => {
                let n = normal / normal.norm();
                let depth = offset / normal.norm() - scale * u(rng);
                let along = scale * (2.0 * u(rng) - 1.0);
                n * depth + n * C64::new(0.0, 1.0) * along
            }
            ConvexSet2D::Line { point, dir } => point + dir * (scale * (2.0 * u(rng) - 1.0)),
            ConvexSet2D::Plane => C64::new(
                scale * (2.0 * u(rng) - 1.0),
                scale * (2.0 * u(rng) - 1.0),
            ),
        }
    }
}

/// `{ γ ≥ 0 : aγ² + bγ + c ≤ 0 }` for a quadratic whose sublevel set on
/// `[0, ∞)` is known to be an interval.
fn quadratic_sublevel(a: f64, b: f64, c: f64) -> (f64, f64) {
    let eps = 1e-15 * (a.abs() + b.abs() + c.abs()).max(1.0);
    if a.abs() <= eps {
        if b.abs() <= eps {
            return if c <= 0.0 { (0.0, f64::INFINITY) } else { (1.0, 0.0) };
        }
        return if b > 0.0 {
            (0.0, -c / b)
        } else {
            ((-c / b).max(0.0), f64::INFINITY)
        };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return if a > 0.0 { (1.0, 0.0) } else { (0.0, f64::INFINITY) };
    }
    let sq = disc.sqrt();
    let (mut r1, mut r2) = ((-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a));
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }
    if a > 0.0 {
        (r1.max(0.0), r2)
    } else if r1 < 0.0 {
        (r2.max(0.0), f64::INFINITY)
    } else {
        (0.0, f64::INFINITY)
    }
}

/// Which generator hypothesis holds at `λ` (they are mutually exclusive).
pub fn condition_check(f: &dyn Generator, lambda: C64) -> Condition {
    match f.smoothness(lambda) {
        Smoothness::Quadratic | Smoothness::C2PositiveDefinite => Condition::Smooth,
        _ => match f.subdiff(lambda) {
            Ok(s) if s.full_rspan() => Condition::FullSpan,
            _ => Condition::Neither,
        },
    }
}

/// `Q(λ) = −cone(∂f(λ)²) + i·rspan(∂f(λ)²)`.
///
/// Exact for a singleton `{g}` (the half-plane `Re(conj(g²)θ) ≤ 0`) and for
/// subdifferentials meeting every real line (then `∂f²` meets every ray and
/// `Q = ℂ`). Other shapes are rejected.
pub fn q_set(f: &dyn Generator, lambda: C64) -> Result<ConvexSet2D> {
    let s = f.subdiff(lambda)?;
    if let Some(g) = s.is_singleton() {
        if g == ZERO {
            return Err(Error::Precondition(format!(
                "subdifferential of {} at {lambda} is {{0}}",
                f.name()
            )));
        }
        return Ok(ConvexSet2D::HalfPlane {
            normal: g * g,
            offset: 0.0,
        });
    }
    if s.full_rspan() {
        return Ok(ConvexSet2D::Plane);
    }
    Err(Error::Unsupported(format!(
        "Q set for a non-singleton subdifferential without full real span ({} at {lambda})",
        f.name()
    )))
}

/// `η = f″(λ; i∇f(λ), i∇f(λ))`.
pub fn eta(f: &dyn Generator, lambda: C64) -> Result<f64> {
    let g = f
        .grad(lambda)
        .ok_or_else(|| Error::Precondition(format!("{} not differentiable at {lambda}", f.name())))?;
    f.second_deriv(lambda, C64::new(0.0, 1.0) * g)
}

/// `𝒟(n, λ) = { θ : Re(conj(θ)·∇f(λ)²) ≤ η/n }`.
pub fn d_set(f: &dyn Generator, n: usize, lambda: C64) -> Result<ConvexSet2D> {
    if condition_check(f, lambda) != Condition::Smooth {
        return Err(Error::Precondition(format!(
            "{} is not quadratic or C² positive definite at {lambda}",
            f.name()
        )));
    }
    if n == 0 {
        return Err(Error::Argument("multiplicity must be positive".into()));
    }
    let g = f.grad(lambda).unwrap();
    if g == ZERO {
        return Err(Error::Precondition(format!("∇{}({lambda}) = 0", f.name())));
    }
    Ok(ConvexSet2D::HalfPlane {
        normal: g * g,
        offset: eta(f, lambda)? / n as f64,
    })
}

/// The per-root building block of the polynomial regular subdifferential, a
/// subset of ℂ^n:
///
/// * inactive: `{0}`;
/// * active: `(−∂f(λ)/n) × S₂ × ℂ^{n−2}` with `S₂ = 𝒟(n, λ)` in the smooth
///   case and `S₂ = Q(λ)` in the full-span case (truncated for `n < 3`).
///
/// Its horizon cone is `{0} × Q(λ) × ℂ^{n−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    pub n: usize,
    pub lambda: C64,
    pub active: bool,
    /// `∂f(λ)`; only meaningful when active.
    pub subdiff: ConvexSet2D,
    /// `𝒟` or `Q`.
    pub second: ConvexSet2D,
    pub q: ConvexSet2D,
    pub condition: Condition,
}

pub fn gamma_set(f: &dyn Generator, n: usize, lambda: C64, active: bool) -> Result<GammaSet> {
    if n == 0 {
        return Err(Error::Argument("multiplicity must be positive".into()));
    }
    if !active {
        return Ok(GammaSet {
            n,
            lambda,
            active,
            subdiff: ConvexSet2D::Point(ZERO),
            second: ConvexSet2D::Point(ZERO),
            q: ConvexSet2D::Point(ZERO),
            condition: condition_check(f, lambda),
        });
    }
    let condition = condition_check(f, lambda);
    let subdiff = f.subdiff(lambda)?;
    let (second, q) = match condition {
        Condition::Smooth => (d_set(f, n, lambda)?, q_set(f, lambda)?),
        Condition::FullSpan => (ConvexSet2D::Plane, ConvexSet2D::Plane),
        Condition::Neither => {
            return Err(Error::Unsupported(format!(
                "{} satisfies neither generator hypothesis at {lambda}",
                f.name()
            )))
        }
    };
    Ok(GammaSet {
        n,
        lambda,
        active,
        subdiff,
        second,
        q,
        condition,
    })
}

impl GammaSet {
    /// `{ γ ≥ 0 : x ∈ γ·Γ }` where the scaling acts on the first two
    /// coordinates (the trailing ones are free for every γ; at γ = 0 the
    /// second coordinate ranges over the horizon set `Q`).
    pub fn scaling_interval(&self, x: &[C64], tol: f64) -> Result<Option<(f64, f64)>> {
        if x.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: x.len(),
            });
        }
        if !self.active {
            return Ok(x
                .iter()
                .all(|z| z.norm() <= tol)
                .then_some((0.0, 0.0)));
        }
        let nf = self.n as f64;
        let Some((mut lo, mut hi)) = self.subdiff.scaling_interval(-x[0] * nf, tol * nf)? else {
            return Ok(None);
        };
        if self.n >= 2 {
            let Some((l2, h2)) = self.second.scaling_interval(x[1], tol)? else {
                return Ok(None);
            };
            lo = lo.max(l2);
            hi = hi.min(h2);
        }
        Ok((lo <= hi).then_some((lo, hi)))
    }

    /// Sample `γ·x` with `x ∈ Γ` (or a horizon point when γ = 0).
    pub fn sample_scaled(&self, gamma: f64, rng: &mut dyn RngCore, scale: f64) -> Vec<C64> {
        let mut out = vec![ZERO; self.n];
        if !self.active {
            return out;
        }
        let nf = self.n as f64;
        out[0] = -self.subdiff.sample(rng, scale) * (gamma / nf);
        if self.n >= 2 {
            out[1] = if gamma > 0.0 {
                self.second.sample(rng, scale) * gamma
            } else {
                self.q.sample(rng, scale)
            };
        }
        for z in out.iter_mut().skip(2) {
            *z = ConvexSet2D::Plane.sample(rng, scale);
        }
        out
    }
}

impl SetDescriptor for GammaSet {
    fn dim(&self) -> usize {
        self.n
    }

    fn contains(&self, x: &[C64], tol: f64) -> bool {
        matches!(self.scaling_interval(x, tol), Ok(Some((lo, hi))) if lo <= 1.0 + tol && hi >= 1.0 - tol)
            || (!self.active && x.iter().all(|z| z.norm() <= tol))
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<C64> {
        self.sample_scaled(1.0, rng, 4.0)
    }

    fn horizon_contains(&self, d: &[C64], tol: f64) -> bool {
        if d.len() != self.n {
            return false;
        }
        if !self.active {
            return d.iter().all(|z| z.norm() <= tol);
        }
        d[0].norm() <= tol && (self.n < 2 || self.q.contains(d[1], tol))
    }
}
