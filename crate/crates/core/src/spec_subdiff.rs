//! Matrix-side variational objects: evaluation of `φ`, extraction of the
//! structure of `W = P̃^{-*} Y P̃^*`, regular subdifferential and recession
//! cone membership, the nonderogatory chain rule, the spectral radius
//! specializations, and the derogatory witness.
//!
//! Sign convention: the diagonal of an active block of `W` is
//! `θ_{j1} = +γ_j ∇f(λ̃_j)/n_j`, which makes the explicit representation, the
//! regular subdifferential formula and the known spectral abscissa result
//! agree. The literal reading (negated diagonal, `P̃^{-*} Y P̃` instead of
//! `P̃^{-*} Y P̃^*`) is kept as [`SampleConvention::Literal`].

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::complex_poly::{poly_root_max, DEFAULT_ACTIVE_TOL, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::factorization::FactorSpace;
use crate::generators::{condition_check, d_set, eta, rdot, Builtin, Condition, ConvexSet2D, Generator};
use crate::json::{matrix_to_rows, MatrixRows};
use crate::linalg::{self, CMatrix};
use crate::matrix_jordan::{active_factor, char_poly, char_poly_deriv_action, EigenBlocks, JordanSpec};
use crate::poly_subdiff::{subderivative_f, subderivative_radius, DpSet, SetDescriptor};

/// Names of the conditions a membership test can fail.
pub mod cond {
    pub const BLOCK_DIAGONAL: &str = "block-diagonal";
    pub const TOEPLITZ: &str = "lower-triangular-toeplitz";
    pub const OFF_DIAGONAL_SUB_BLOCKS: &str = "off-diagonal-sub-blocks-vanish";
    pub const EQUAL_DIAGONALS: &str = "equal-diagonals";
    pub const INACTIVE_VANISH: &str = "inactive-blocks-vanish";
    pub const WEIGHTS_REAL: &str = "weights-real";
    pub const WEIGHTS_NONNEGATIVE: &str = "weights-nonnegative";
    pub const WEIGHTS_SUM: &str = "weights-sum-to-one";
    pub const SUBDIAGONAL: &str = "subdiagonal-inequality";
    pub const DIAGONAL_VANISHES: &str = "diagonal-vanishes";
    pub const HORIZON_SUBDIAGONAL: &str = "horizon-subdiagonal-inequality";
    pub const DIAGONAL_BOUND: &str = "diagonal-bound";
    pub const RANGE_OF_R: &str = "range-of-R";
    pub const POLYNOMIAL_SET: &str = "polynomial-subdifferential";
}

/// Tolerances for the matrix membership tests. Structural zeros are relative
/// to `max(‖Y‖, ‖W‖)`; the others are absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub structural: f64,
    pub simplex: f64,
    pub inequality: f64,
    pub active: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            structural: 1e-9,
            simplex: 1e-8,
            inequality: 1e-10,
            active: DEFAULT_ACTIVE_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResidual {
    pub condition: String,
    pub residual: f64,
}

/// Outcome of a membership test: `verdict` holds exactly when no condition
/// failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub verdict: bool,
    pub failed_conditions: Vec<ConditionResidual>,
}

impl Default for MembershipReport {
    fn default() -> Self {
        MembershipReport {
            verdict: true,
            failed_conditions: Vec::new(),
        }
    }
}

impl MembershipReport {
    /// Records `name` as failed unless `residual ≤ tol` (NaN fails).
    pub fn check(&mut self, name: &str, residual: f64, tol: f64) {
        if !(residual <= tol) {
            self.verdict = false;
            match self.failed_conditions.iter_mut().find(|c| c.condition == name) {
                Some(c) => c.residual = c.residual.max(residual),
                None => self.failed_conditions.push(ConditionResidual {
                    condition: name.to_string(),
                    residual,
                }),
            }
        }
    }

    pub fn failed(&self, name: &str) -> bool {
        self.failed_conditions.iter().any(|c| c.condition == name)
    }

    pub fn merge(&mut self, other: &MembershipReport) {
        for c in &other.failed_conditions {
            self.check(&c.condition, c.residual, f64::NEG_INFINITY);
        }
    }
}

/// `max { f(λ) : det(λI − X) = 0 }`.
pub fn spectral_max(x: &CMatrix, f: &dyn Generator) -> Result<f64> {
    if x.nrows() != x.ncols() {
        return Err(Error::Dimension {
            expected: x.nrows(),
            actual: x.ncols(),
        });
    }
    if x.nrows() == 0 {
        return Err(Error::Argument("empty matrix".into()));
    }
    poly_root_max(&char_poly(x), f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Limiting,
    Regular,
}

/// Diagonal values of the `W` block of one distinct eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenTheta {
    pub lambda: C64,
    /// `θ_1, …, θ_{m_j}` averaged over the diagonal sub-blocks.
    pub theta: Vec<C64>,
    /// `θ_1/∇f(λ̃_j)` once a generator is attached.
    pub sigma: Option<C64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToeplitzParams {
    #[serde(skip)]
    pub w: CMatrix,
    pub eigs: Vec<EigenTheta>,
    pub block_diagonal: bool,
    pub toeplitz: bool,
    pub sub_blocks_diagonal: bool,
    pub equal_diagonals: bool,
    /// Largest entry of the `B̃` block of `W`.
    pub b_block: f64,
    /// Absolute threshold used for structural zeros.
    pub zero_tol: f64,
    pub report: MembershipReport,
}

impl ToeplitzParams {
    /// Fills `σ_j = θ_{j1}/∇f(λ̃_j)` where the gradient exists and is nonzero.
    pub fn with_sigma(mut self, f: &dyn Generator) -> Self {
        for e in &mut self.eigs {
            e.sigma = f
                .grad(e.lambda)
                .filter(|g| *g != ZERO)
                .map(|g| e.theta[0] / g);
        }
        self
    }

    fn block_norm(&self, spec: &JordanSpec, j: usize) -> f64 {
        let r = spec.range(j);
        max_abs(&self.w.view((r.start, r.start), (r.len(), r.len())).into_owned())
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Forms `W = P̃^{-*} Y P̃^*` and checks its block structure: block diagonal
/// across distinct eigenvalues, every sub-block rectangular lower triangular
/// Toeplitz, and at the regular level also vanishing off-diagonal sub-blocks
/// and equal diagonals across the diagonal sub-blocks.
pub fn w_extract(spec: &JordanSpec, y: &CMatrix, level: Level, tols: &Tolerances) -> Result<ToeplitzParams> {
    let n = spec.n();
    if y.nrows() != n || y.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: y.nrows(),
        });
    }
    let w = spec.to_w(y);
    let zt = tols.structural * linalg::frobenius(&w).max(linalg::frobenius(y));
    let mut report = MembershipReport::default();

    let mut group = vec![0usize; n];
    for j in 0..spec.len() {
        for i in spec.range(j) {
            group[i] = j + 1;
        }
    }
    let mut off = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            if group[a] != group[b] {
                off = off.max(w[(a, b)].norm());
            }
        }
    }
    report.check(cond::BLOCK_DIAGONAL, off, zt);
    let block_diagonal = off <= zt;

    let mut eigs = Vec::with_capacity(spec.len());
    let (mut toep_res, mut offsub_res, mut eqdiag_res) = (0.0f64, 0.0f64, 0.0f64);
    for j in 0..spec.len() {
        let e = spec.eig(j);
        let o = spec.offset(j);
        let subs = spec.sub_offsets(j);
        let sizes = &e.blocks;
        // θ_s: mean of the s-th subdiagonal over all diagonal sub-blocks
        let mut theta = vec![ZERO; e.m()];
        for (s, th) in theta.iter_mut().enumerate() {
            let mut sum = ZERO;
            let mut count = 0usize;
            for (&so, &m) in subs.iter().zip(sizes) {
                for a in s..m {
                    sum += w[(o + so + a, o + so + a - s)];
                    count += 1;
                }
            }
            *th = sum / count as f64;
        }
        for (r, (&ro, &mr)) in subs.iter().zip(sizes).enumerate() {
            for (c, (&co, &mc)) in subs.iter().zip(sizes).enumerate() {
                let blk = |a: usize, b: usize| w[(o + ro + a, o + co + b)];
                let shift = mr.saturating_sub(mc);
                // diagonal d = a − b: zero unless d ≥ shift, constant otherwise
                for d in -(mc as i64 - 1)..=(mr as i64 - 1) {
                    let cells: Vec<(usize, usize)> = (0..mr)
                        .filter_map(|a| {
                            let b = a as i64 - d;
                            (b >= 0 && (b as usize) < mc).then_some((a, b as usize))
                        })
                        .collect();
                    if d < shift as i64 {
                        for &(a, b) in &cells {
                            toep_res = toep_res.max(blk(a, b).norm());
                        }
                    } else {
                        let mean = cells.iter().map(|&(a, b)| blk(a, b)).sum::<C64>() / cells.len() as f64;
                        for &(a, b) in &cells {
                            toep_res = toep_res.max((blk(a, b) - mean).norm());
                        }
                    }
                    if level == Level::Regular {
                        if r != c {
                            for &(a, b) in &cells {
                                offsub_res = offsub_res.max(blk(a, b).norm());
                            }
                        } else if d >= 0 {
                            for &(a, b) in &cells {
                                eqdiag_res = eqdiag_res.max((blk(a, b) - theta[d as usize]).norm());
                            }
                        }
                    }
                }
            }
        }
        eigs.push(EigenTheta {
            lambda: e.lambda,
            theta,
            sigma: None,
        });
    }
    report.check(cond::TOEPLITZ, toep_res, zt);
    if level == Level::Regular {
        report.check(cond::OFF_DIAGONAL_SUB_BLOCKS, offsub_res, zt);
        report.check(cond::EQUAL_DIAGONALS, eqdiag_res, zt);
    }
    let n0 = spec.n0();
    let b_block = max_abs(&w.view((0, 0), (n0, n0)).into_owned());
    Ok(ToeplitzParams {
        w,
        eigs,
        block_diagonal,
        toeplitz: toep_res <= zt,
        sub_blocks_diagonal: offsub_res <= zt,
        equal_diagonals: eqdiag_res <= zt,
        b_block,
        zero_tol: zt,
        report,
    })
}

/// `W` with the given diagonals repeated on every Jordan sub-block
/// (`thetas[j][s]` on the `s`-th subdiagonal of eigenvalue `j`), zero on `B̃`.
pub fn toeplitz_w(spec: &JordanSpec, thetas: &[Vec<C64>]) -> Result<CMatrix> {
    if thetas.len() != spec.len() {
        return Err(Error::Dimension {
            expected: spec.len(),
            actual: thetas.len(),
        });
    }
    let n = spec.n();
    let mut w = CMatrix::zeros(n, n);
    for (j, th) in thetas.iter().enumerate() {
        let o = spec.offset(j);
        for (&so, &m) in spec.sub_offsets(j).iter().zip(&spec.eig(j).blocks) {
            for a in 0..m {
                for b in 0..=a {
                    if let Some(&t) = th.get(a - b) {
                        w[(o + so + a, o + so + b)] = t;
                    }
                }
            }
        }
    }
    Ok(w)
}

/// Active eigenvalues (indices into `spec`) with `∇f` and `η`, checking the
/// smooth generator hypothesis and `∇f ≠ 0` at each.
struct SmoothActive {
    active: Vec<usize>,
    grad: Vec<C64>,
    eta: Vec<f64>,
}

fn smooth_active(spec: &JordanSpec, f: &dyn Generator, tols: &Tolerances) -> Result<SmoothActive> {
    let af = active_factor(spec, f, tols.active)?;
    let mut grad = vec![ZERO; spec.len()];
    let mut et = vec![0.0; spec.len()];
    for &j in &af.active {
        let lam = spec.eig(j).lambda;
        if condition_check(f, lam) != Condition::Smooth {
            return Err(Error::Precondition(format!(
                "{} is not quadratic or C² positive definite at {lam}",
                f.name()
            )));
        }
        let g = f.grad(lam).filter(|g| *g != ZERO).ok_or_else(|| {
            Error::Precondition(format!("∇{} vanishes or is undefined at {lam}", f.name()))
        })?;
        grad[j] = g;
        et[j] = eta(f, lam)?;
    }
    Ok(SmoothActive {
        active: af.active,
        grad,
        eta: et,
    })
}

fn check_inactive(report: &mut MembershipReport, spec: &JordanSpec, tp: &ToeplitzParams, active: &[usize]) {
    let mut res = tp.b_block;
    for j in (0..spec.len()).filter(|j| !active.contains(j)) {
        res = res.max(tp.block_norm(spec, j));
    }
    report.check(cond::INACTIVE_VANISH, res, tp.zero_tol);
}

fn is_radius(f: &dyn Generator) -> bool {
    f.builtin() == Some(Builtin::Radius)
}

fn radius_value(spec: &JordanSpec, tols: &Tolerances) -> Result<f64> {
    Ok(active_factor(spec, &Builtin::Radius, tols.active)?.value)
}

/// `Y ∈ ∂̂φ(X̃)`. The spectral radius is routed to its dedicated formulas.
pub fn rsd_membership(spec: &JordanSpec, f: &dyn Generator, y: &CMatrix, tols: &Tolerances) -> Result<MembershipReport> {
    if is_radius(f) {
        return if radius_value(spec, tols)? > 0.0 {
            radius_rsd_membership(spec, y, tols)
        } else {
            radius_rsd_zero(spec, y, tols)
        };
    }
    let sa = smooth_active(spec, f, tols)?;
    let tp = w_extract(spec, y, Level::Regular, tols)?.with_sigma(f);
    let mut rep = tp.report.clone();
    check_inactive(&mut rep, spec, &tp, &sa.active);
    let (mut imag, mut neg, mut sum) = (0.0f64, 0.0f64, ZERO);
    for &j in &sa.active {
        let sigma = tp.eigs[j].theta[0] / sa.grad[j];
        imag = imag.max(sigma.im.abs());
        neg = neg.max(-sigma.re);
        sum += sigma * spec.eig(j).n() as f64;
    }
    rep.check(cond::WEIGHTS_REAL, imag, tols.simplex);
    rep.check(cond::WEIGHTS_NONNEGATIVE, neg, tols.inequality);
    rep.check(cond::WEIGHTS_SUM, (sum - ONE).norm(), tols.simplex);
    let mut sub = 0.0f64;
    for &j in &sa.active {
        if spec.eig(j).m() >= 2 {
            let g = sa.grad[j];
            let sigma = (tp.eigs[j].theta[0] / g).re;
            let lhs = rdot(tp.eigs[j].theta[1], g * g) + sigma * sa.eta[j];
            sub = sub.max(-lhs);
        }
    }
    rep.check(cond::SUBDIAGONAL, sub, tols.inequality);
    Ok(rep)
}

/// `Y ∈ (∂̂φ(X̃))^∞`.
pub fn rsd_recession_membership(
    spec: &JordanSpec,
    f: &dyn Generator,
    y: &CMatrix,
    tols: &Tolerances,
) -> Result<MembershipReport> {
    if is_radius(f) {
        return if radius_value(spec, tols)? > 0.0 {
            radius_rsd_horizon_membership(spec, y, tols)
        } else {
            radius_rsd_zero_horizon(spec, y, tols)
        };
    }
    let sa = smooth_active(spec, f, tols)?;
    let tp = w_extract(spec, y, Level::Regular, tols)?;
    let mut rep = tp.report.clone();
    check_inactive(&mut rep, spec, &tp, &sa.active);
    let diag = tp.eigs.iter().map(|e| e.theta[0].norm()).fold(0.0, f64::max);
    rep.check(cond::DIAGONAL_VANISHES, diag, tp.zero_tol);
    let mut sub = 0.0f64;
    for &j in &sa.active {
        if spec.eig(j).m() >= 2 {
            let g = sa.grad[j];
            sub = sub.max(-rdot(tp.eigs[j].theta[1], g * g));
        }
    }
    rep.check(cond::HORIZON_SUBDIAGONAL, sub, tols.inequality);
    Ok(rep)
}

fn radius_positive(spec: &JordanSpec, y: &CMatrix, tols: &Tolerances, horizon: bool) -> Result<MembershipReport> {
    let af = active_factor(spec, &Builtin::Radius, tols.active)?;
    if af.value <= 0.0 {
        return Err(Error::Precondition(
            "spectral radius is zero; use the nilpotent formula".into(),
        ));
    }
    let tp = w_extract(spec, y, Level::Regular, tols)?;
    let mut rep = tp.report.clone();
    check_inactive(&mut rep, spec, &tp, &af.active);
    if horizon {
        let diag = tp.eigs.iter().map(|e| e.theta[0].norm()).fold(0.0, f64::max);
        rep.check(cond::DIAGONAL_VANISHES, diag, tp.zero_tol);
    } else {
        let (mut imag, mut neg, mut sum) = (0.0f64, 0.0f64, ZERO);
        for &j in &af.active {
            let lam = spec.eig(j).lambda;
            let ratio = tp.eigs[j].theta[0] / lam;
            imag = imag.max(ratio.im.abs());
            neg = neg.max(-ratio.re);
            sum += ratio * (lam.norm() * spec.eig(j).n() as f64);
        }
        rep.check(cond::WEIGHTS_REAL, imag, tols.simplex);
        rep.check(cond::WEIGHTS_NONNEGATIVE, neg, tols.inequality);
        rep.check(cond::WEIGHTS_SUM, (sum - ONE).norm(), tols.simplex);
    }
    let mut sub = 0.0f64;
    for &j in &af.active {
        if spec.eig(j).m() >= 2 {
            let lam = spec.eig(j).lambda;
            let th = &tp.eigs[j].theta;
            let lhs = rdot(th[1], lam * lam);
            let rhs = if horizon {
                0.0
            } else {
                -(th[0] * lam.norm_sqr() / lam).re
            };
            sub = sub.max(rhs - lhs);
        }
    }
    let name = if horizon {
        cond::HORIZON_SUBDIAGONAL
    } else {
        cond::SUBDIAGONAL
    };
    rep.check(name, sub, tols.inequality);
    Ok(rep)
}

/// `Y ∈ ∂̂ρ(X̃)` for `ρ(X̃) > 0`.
pub fn radius_rsd_membership(spec: &JordanSpec, y: &CMatrix, tols: &Tolerances) -> Result<MembershipReport> {
    radius_positive(spec, y, tols, false)
}

/// `Y ∈ (∂̂ρ(X̃))^∞` for `ρ(X̃) > 0`.
pub fn radius_rsd_horizon_membership(spec: &JordanSpec, y: &CMatrix, tols: &Tolerances) -> Result<MembershipReport> {
    radius_positive(spec, y, tols, true)
}

fn radius_zero(spec: &JordanSpec, y: &CMatrix, tols: &Tolerances, horizon: bool) -> Result<MembershipReport> {
    if spec.n0() > 0 || spec.len() != 1 || spec.eig(0).lambda.norm() > tols.active {
        return Err(Error::Precondition(
            "the nilpotent radius formula needs 0 as the only eigenvalue".into(),
        ));
    }
    let tp = w_extract(spec, y, Level::Regular, tols)?;
    let mut rep = tp.report.clone();
    let t1 = tp.eigs[0].theta[0].norm();
    if horizon {
        rep.check(cond::DIAGONAL_VANISHES, t1, tp.zero_tol);
    } else {
        rep.check(cond::DIAGONAL_BOUND, t1 - 1.0 / spec.n() as f64, tols.inequality);
    }
    Ok(rep)
}

/// `Y ∈ ∂̂ρ(X̃)` when every eigenvalue is 0: `W` lower triangular Toeplitz
/// with `|θ_1| ≤ 1/n`.
pub fn radius_rsd_zero(spec: &JordanSpec, y: &CMatrix, tols: &Tolerances) -> Result<MembershipReport> {
    radius_zero(spec, y, tols, false)
}

/// Horizon variant of [`radius_rsd_zero`]: `θ_1 = 0`.
pub fn radius_rsd_zero_horizon(spec: &JordanSpec, y: &CMatrix, tols: &Tolerances) -> Result<MembershipReport> {
    radius_zero(spec, y, tols, true)
}

/// How [`rsd_sample`] reads the explicit representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleConvention {
    /// `θ_{j1} = +γ_j∇f/n_j`, `Y = P̃^* W P̃^{-*}`.
    #[default]
    Reconciled,
    /// Diagonal `−γ_j∇f/n_j` and `Y = P̃^* U P̃⁻¹`, as literally printed.
    Literal,
}

fn check_weights(gamma: &[f64], k: usize) -> Result<()> {
    if gamma.len() != k {
        return Err(Error::Dimension {
            expected: k,
            actual: gamma.len(),
        });
    }
    if gamma.iter().any(|&g| !(g >= 0.0)) || (gamma.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::Argument("weights must lie on the simplex".into()));
    }
    Ok(())
}

/// A regular subgradient from the explicit representation. `gamma` holds
/// one simplex weight per active eigenvalue (in spec order); subdiagonals
/// are drawn from `γ_j·𝒟`, deeper diagonals freely with half-width `scale`.
/// A zero weight gives a zero block.
pub fn rsd_sample(
    spec: &JordanSpec,
    f: &dyn Generator,
    gamma: &[f64],
    rng: &mut dyn RngCore,
    scale: f64,
    convention: SampleConvention,
) -> Result<CMatrix> {
    let sa = smooth_active(spec, f, tols_default())?;
    check_weights(gamma, sa.active.len())?;
    let mut thetas = vec![Vec::new(); spec.len()];
    for (k, &j) in sa.active.iter().enumerate() {
        let e = spec.eig(j);
        let g = gamma[k];
        if g == 0.0 {
            continue;
        }
        let nj = e.n();
        let mut th = vec![ZERO; nj];
        th[0] = sa.grad[j] * (g / nj as f64);
        if nj >= 2 {
            let d = d_set(f, nj, e.lambda)?.sample(rng, scale);
            th[1] = -d * g;
        }
        for t in th.iter_mut().skip(2) {
            *t = ConvexSet2D::Plane.sample(rng, scale);
        }
        if convention == SampleConvention::Literal {
            th[0] = -th[0];
            if nj >= 2 {
                th[1] = -th[1];
            }
        }
        thetas[j] = th;
    }
    let w = toeplitz_w(spec, &thetas)?;
    Ok(match convention {
        SampleConvention::Reconciled => spec.from_w(&w),
        SampleConvention::Literal => spec.p().adjoint() * w * spec.p_inv(),
    })
}

fn tols_default() -> &'static Tolerances {
    static T: std::sync::OnceLock<Tolerances> = std::sync::OnceLock::new();
    T.get_or_init(Tolerances::default)
}

/// Regular subgradient of the spectral radius at `ρ(X̃) > 0`, via the
/// scaling `∂̂ρ(X̃) = ρ(X̃)⁻¹ ∂̂ρ₂(X̃)` with `ρ₂ = |·|²/2` on the spectrum.
pub fn radius_rsd_sample(
    spec: &JordanSpec,
    gamma: &[f64],
    rng: &mut dyn RngCore,
    scale: f64,
) -> Result<CMatrix> {
    let rho = radius_value(spec, tols_default())?;
    if rho <= 0.0 {
        return Err(Error::Precondition("spectral radius is zero".into()));
    }
    Ok(rsd_sample(spec, &Builtin::Radius2, gamma, rng, scale, SampleConvention::Reconciled)? / C64::new(rho, 0.0))
}

/// Coordinates `v` with `R(v) = (0, Y)` on the active part, by least squares.
struct ChainCoords {
    dp: DpSet,
    coords: Vec<C64>,
    residual: f64,
}

fn chain_coords(spec: &JordanSpec, f: &dyn Generator, y: &CMatrix, tols: &Tolerances) -> Result<ChainCoords> {
    let af = active_factor(spec, f, tols.active)?;
    let rs = &af.spec;
    if !rs.all_nonderogatory() {
        return Err(Error::Precondition("an active eigenvalue is derogatory".into()));
    }
    let n = spec.n();
    if y.nrows() != n || y.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: y.nrows(),
        });
    }
    let cols: Vec<CMatrix> = (0..rs.len())
        .flat_map(|j| (0..rs.eig(j).n()).map(move |s| (j, s)))
        .map(|(j, s)| -rs.from_w(&rs.j_embed(j, s).adjoint()))
        .collect();
    let a = CMatrix::from_fn(n * n, cols.len(), |r, c| cols[c][(r % n, r / n)]);
    let b: Vec<C64> = (0..n * n).map(|r| y[(r % n, r / n)]).collect();
    let (v, residual) = linalg::least_squares(&a, &b)?;
    let mut coords = Vec::with_capacity(v.len() + 1);
    coords.push(ZERO);
    coords.extend(v);
    let space = FactorSpace::new(af.poly.clone())?;
    let dp = DpSet::with_active(space, f, &vec![true; rs.len()])?;
    Ok(ChainCoords { dp, coords, residual })
}

fn chain_report(spec: &JordanSpec, f: &dyn Generator, y: &CMatrix, tols: &Tolerances, horizon: bool) -> Result<MembershipReport> {
    let cc = chain_coords(spec, f, y, tols)?;
    let mut rep = MembershipReport::default();
    let scale = linalg::frobenius(y).max(1e-300);
    rep.check(cond::RANGE_OF_R, cc.residual / scale, tols.structural.max(1e-12));
    if rep.verdict {
        let inside = if horizon {
            cc.dp.horizon_contains(&cc.coords, tols.simplex)
        } else {
            cc.dp.feasible_weights(&cc.coords, tols.simplex)?.is_some()
        };
        rep.check(cond::POLYNOMIAL_SET, if inside { 0.0 } else { f64::INFINITY }, 0.0);
    }
    Ok(rep)
}

/// `Y ∈ ∂φ(X̃) = {Y : (0, Y) ∈ R(D_p̃)}` at a matrix with nonderogatory
/// active eigenvalues.
pub fn chain_rule_membership(spec: &JordanSpec, f: &dyn Generator, y: &CMatrix, tols: &Tolerances) -> Result<MembershipReport> {
    chain_report(spec, f, y, tols, false)
}

/// `Y ∈ ∂^∞φ(X̃) = {Y : (0, Y) ∈ R(D_p̃^∞)}`.
pub fn chain_rule_horizon_membership(
    spec: &JordanSpec,
    f: &dyn Generator,
    y: &CMatrix,
    tols: &Tolerances,
) -> Result<MembershipReport> {
    chain_report(spec, f, y, tols, true)
}

/// `dφ(X̃)(Z) = d𝔣(p)(Φ′(X̃)Z)` at a matrix whose eigenvalues are all
/// declared and nonderogatory (so `Φ′(X̃)` is onto).
pub fn matrix_subderivative(spec: &JordanSpec, f: &dyn Generator, z: &CMatrix) -> Result<f64> {
    if !spec.all_nonderogatory() {
        return Err(Error::Precondition(
            "the matrix subderivative needs nonderogatory eigenvalues".into(),
        ));
    }
    let v = char_poly_deriv_action(spec, z)?;
    let p = spec.cluster()?;
    if is_radius(f) {
        subderivative_radius(&p, &v)
    } else {
        subderivative_f(&p, f, &v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    Regular,
    NotRegular,
}

/// Subdifferential regularity holds exactly when every active eigenvalue is
/// nonderogatory.
pub fn regularity_verdict(spec: &JordanSpec, f: &dyn Generator, tols: &Tolerances) -> Result<Regularity> {
    let af = active_factor(spec, f, tols.active)?;
    Ok(if af.active.iter().all(|&j| spec.eig(j).nonderogatory()) {
        Regularity::Regular
    } else {
        Regularity::NotRegular
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessStep {
    pub nu: usize,
    pub lambda: C64,
    pub member: bool,
    /// `‖M^ν − M‖_F`.
    pub distance: f64,
}

/// A limiting subgradient that is not regular, with its approximating
/// sequence.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub eigenvalue: C64,
    /// Index of the perturbed Jordan sub-block and its size.
    pub sub_block: usize,
    pub size: usize,
    pub m: MatrixRows,
    /// Regular membership of `M` at `X̃` (expected to fail).
    pub base_report: MembershipReport,
    pub steps: Vec<WitnessStep>,
    pub verified: bool,
}

/// Moves Jordan sub-block `k` of eigenvalue `j` to the new eigenvalue
/// `lambda`: the spec of `P̃⁻¹(J + βE)P̃` with `β = lambda − λ̃_j`.
pub fn split_sub_block(spec: &JordanSpec, j: usize, k: usize, lambda: C64) -> Result<JordanSpec> {
    let e = spec.eig(j);
    if k >= e.q() {
        return Err(Error::Argument(format!("sub-block {k} does not exist")));
    }
    let subs = spec.sub_offsets(j);
    let o = spec.offset(j);
    let mut perm: Vec<usize> = (0..spec.n0()).collect();
    let mut eigs = Vec::with_capacity(spec.len() + 1);
    for i in 0..spec.len() {
        if i == j {
            let rest: Vec<usize> = (0..e.q()).filter(|&r| r != k).collect();
            for &r in &rest {
                perm.extend(o + subs[r]..o + subs[r] + e.blocks[r]);
            }
            if !rest.is_empty() {
                eigs.push(EigenBlocks::new(e.lambda, rest.iter().map(|&r| e.blocks[r]).collect()));
            }
        } else {
            perm.extend(spec.range(i));
            eigs.push(spec.eig(i).clone());
        }
    }
    perm.extend(o + subs[k]..o + subs[k] + e.blocks[k]);
    eigs.push(EigenBlocks::new(lambda, vec![e.blocks[k]]));
    let p = CMatrix::from_fn(spec.n(), spec.n(), |a, b| spec.p()[(perm[a], b)]);
    JordanSpec::new(eigs, Some(p), Some(spec.b().clone()))
}

/// The sequence `X^ν = P̃⁻¹(J + β^ν E)P̃ → X̃` splitting one sub-block of a
/// derogatory active eigenvalue off to `λ^ν` with `f(λ^ν) > f(λ̃_j)`, and the
/// limit `M = (∇f(λ̃_j)/m)P̃^* E P̃^{-*}` of the regular subgradients
/// `M^ν = (∇f(λ^ν)/m)P̃^* E P̃^{-*}` at `X^ν`. For the radius at 0 the
/// gradient is replaced by 1 and `λ^ν = 1/ν`.
///
/// `sub_block` defaults to the smallest sub-block of the eigenvalue.
pub fn derogatory_witness(
    spec: &JordanSpec,
    f: &dyn Generator,
    nu_max: usize,
    sub_block: Option<usize>,
    tols: &Tolerances,
) -> Result<WitnessReport> {
    let af = active_factor(spec, f, tols.active)?;
    let j = af
        .active
        .iter()
        .copied()
        .find(|&j| !spec.eig(j).nonderogatory())
        .ok_or_else(|| Error::Precondition("no derogatory active eigenvalue".into()))?;
    let e = spec.eig(j);
    let lam = e.lambda;
    let k = match sub_block {
        Some(k) if k < e.q() => k,
        Some(k) => return Err(Error::Argument(format!("sub-block {k} does not exist"))),
        None => (0..e.q()).min_by_key(|&r| (e.blocks[r], r)).unwrap(),
    };
    let m = e.blocks[k];
    let radius = is_radius(f);
    let grad_at = |z: C64| -> Result<C64> {
        if radius && z == ZERO {
            return Ok(ONE);
        }
        f.grad(z)
            .filter(|g| *g != ZERO)
            .ok_or_else(|| Error::Precondition(format!("∇{} vanishes or is undefined at {z}", f.name())))
    };
    let g0 = grad_at(lam)?;
    // stay clear of the other eigenvalues
    let mut gap = f64::INFINITY;
    for i in (0..spec.len()).filter(|&i| i != j) {
        gap = gap.min((spec.eig(i).lambda - lam).norm());
    }
    if spec.n0() > 0 {
        for mu in linalg::eigenvalues(spec.b())? {
            gap = gap.min((mu - lam).norm());
        }
    }
    let step = (0.5 * gap / g0.norm()).min(1.0);

    let mut e_mat = CMatrix::zeros(spec.n(), spec.n());
    let start = spec.offset(j) + spec.sub_offsets(j)[k];
    for i in start..start + m {
        e_mat[(i, i)] = ONE;
    }
    let pep = spec.from_w(&e_mat);
    let m_base = &pep * (g0 / m as f64);
    let base_report = rsd_membership(spec, f, &m_base, tols)?;

    let mut steps = Vec::with_capacity(nu_max);
    for nu in 1..=nu_max {
        let lam_nu = lam + g0 * (step / nu as f64);
        let spec_nu = split_sub_block(spec, j, k, lam_nu)?;
        let m_nu = &pep * (grad_at(lam_nu)? / m as f64);
        let member = rsd_membership(&spec_nu, f, &m_nu, tols)?.verdict;
        steps.push(WitnessStep {
            nu,
            lambda: lam_nu,
            member,
            distance: linalg::frobenius(&(&m_nu - &m_base)),
        });
    }
    let verified = !base_report.verdict && steps.iter().all(|s| s.member);
    Ok(WitnessReport {
        eigenvalue: lam,
        sub_block: k,
        size: m,
        m: matrix_to_rows(&m_base),
        base_report,
        steps,
        verified,
    })
}
