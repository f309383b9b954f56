//! Matrices with declared Jordan structure, `X̃ = P̃⁻¹ Diag(B̃, J₁, …, J_m) P̃`,
//! and the derivative formulas of the characteristic polynomial map at them.
//!
//! Jordan blocks carry ones on the superdiagonal. Distinct eigenvalues are
//! kept in lexicographic order (the similarity is permuted to match), so the
//! index `j` of an eigenvalue agrees with the root index of its factor.

use serde::{Deserialize, Serialize};

use crate::complex_poly::{
    elementary, lex_cmp, taylor_coeff, Poly, RootCluster, C64, ONE, ZERO,
};
use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::linalg::{self, CMatrix};

/// Minimum separation between declared eigenvalues.
pub const MIN_SEPARATION: f64 = 1e-8;

/// One distinct eigenvalue with the sizes of its Jordan blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenBlocks {
    pub lambda: C64,
    pub blocks: Vec<usize>,
}

impl EigenBlocks {
    pub fn new(lambda: C64, blocks: Vec<usize>) -> Self {
        EigenBlocks { lambda, blocks }
    }

    /// Algebraic multiplicity `n_j`.
    pub fn n(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Geometric multiplicity `q_j`.
    pub fn q(&self) -> usize {
        self.blocks.len()
    }

    /// Largest block `m_j`.
    pub fn m(&self) -> usize {
        self.blocks.iter().copied().max().unwrap_or(0)
    }

    pub fn nonderogatory(&self) -> bool {
        self.blocks.len() == 1
    }
}

/// Declared Jordan data of a base matrix.
#[derive(Debug, Clone)]
pub struct JordanSpec {
    eigs: Vec<EigenBlocks>,
    p: CMatrix,
    p_inv: CMatrix,
    b: CMatrix,
}

impl JordanSpec {
    /// `p` defaults to the identity and `b` to the empty matrix.
    pub fn new(eigs: Vec<EigenBlocks>, p: Option<CMatrix>, b: Option<CMatrix>) -> Result<Self> {
        let b = b.unwrap_or_else(|| CMatrix::zeros(0, 0));
        if b.nrows() != b.ncols() {
            return Err(Error::Structure("B̃ must be square".into()));
        }
        for e in &eigs {
            if e.blocks.is_empty() || e.blocks.contains(&0) {
                return Err(Error::Structure(format!(
                    "eigenvalue {} needs positive block sizes",
                    e.lambda
                )));
            }
            if !(e.lambda.re.is_finite() && e.lambda.im.is_finite()) {
                return Err(Error::Structure("eigenvalues must be finite".into()));
            }
        }
        for (i, a) in eigs.iter().enumerate() {
            for c in &eigs[i + 1..] {
                if (a.lambda - c.lambda).norm() <= MIN_SEPARATION {
                    return Err(Error::Structure(format!(
                        "eigenvalue {} declared twice; list all of its blocks in one entry",
                        a.lambda
                    )));
                }
            }
        }
        if b.nrows() > 0 {
            for mu in linalg::eigenvalues(&b)? {
                if let Some(e) = eigs
                    .iter()
                    .find(|e| (e.lambda - mu).norm() <= MIN_SEPARATION)
                {
                    return Err(Error::Structure(format!(
                        "B̃ has eigenvalue {mu} too close to declared {}",
                        e.lambda
                    )));
                }
            }
        }
        let n0 = b.nrows();
        let n = n0 + eigs.iter().map(EigenBlocks::n).sum::<usize>();
        let p = p.unwrap_or_else(|| linalg::identity(n));
        if p.nrows() != n || p.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: p.nrows(),
            });
        }
        // sort eigenvalues lexicographically, permuting the similarity along
        let mut order: Vec<usize> = (0..eigs.len()).collect();
        order.sort_by(|&a, &c| lex_cmp(&eigs[a].lambda, &eigs[c].lambda));
        let mut offsets = Vec::with_capacity(eigs.len());
        let mut off = n0;
        for e in &eigs {
            offsets.push(off);
            off += e.n();
        }
        let mut perm: Vec<usize> = (0..n0).collect();
        for &k in &order {
            perm.extend(offsets[k]..offsets[k] + eigs[k].n());
        }
        let p = permute_rows(&p, &perm);
        let eigs: Vec<EigenBlocks> = order.iter().map(|&k| eigs[k].clone()).collect();
        let p_inv = linalg::inverse_refined(&p)?;
        Ok(JordanSpec { eigs, p, p_inv, b })
    }

    pub fn eigs(&self) -> &[EigenBlocks] {
        &self.eigs
    }

    pub fn eig(&self, j: usize) -> &EigenBlocks {
        &self.eigs[j]
    }

    pub fn len(&self) -> usize {
        self.eigs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigs.is_empty()
    }

    pub fn p(&self) -> &CMatrix {
        &self.p
    }

    pub fn p_inv(&self) -> &CMatrix {
        &self.p_inv
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    /// Size of the inactive block `B̃`.
    pub fn n0(&self) -> usize {
        self.b.nrows()
    }

    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    /// `ñ = Σ_j n_j`.
    pub fn n_tilde(&self) -> usize {
        self.n() - self.n0()
    }

    /// First row/column of eigenvalue `j` inside `J`.
    pub fn offset(&self, j: usize) -> usize {
        self.n0() + self.eigs[..j].iter().map(EigenBlocks::n).sum::<usize>()
    }

    pub fn range(&self, j: usize) -> std::ops::Range<usize> {
        let o = self.offset(j);
        o..o + self.eigs[j].n()
    }

    /// Start offsets (relative to the eigenvalue block) of its Jordan blocks.
    pub fn sub_offsets(&self, j: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.eigs[j].q());
        let mut o = 0;
        for &m in &self.eigs[j].blocks {
            out.push(o);
            o += m;
        }
        out
    }

    pub fn all_nonderogatory(&self) -> bool {
        self.eigs.iter().all(EigenBlocks::nonderogatory)
    }

    /// `N_[j] = Diag(N_{j1}, …, N_{jq_j})`, of size `n_j`.
    pub fn nilpotent(&self, j: usize) -> CMatrix {
        let n = self.eigs[j].n();
        let mut m = CMatrix::zeros(n, n);
        for (&o, &size) in self.sub_offsets(j).iter().zip(&self.eigs[j].blocks) {
            for i in 0..size.saturating_sub(1) {
                m[(o + i, o + i + 1)] = ONE;
            }
        }
        m
    }

    /// `J = Diag(B̃, J₁, …, J_m)`.
    pub fn jordan(&self) -> CMatrix {
        let n = self.n();
        let mut j = CMatrix::zeros(n, n);
        let n0 = self.n0();
        j.view_mut((0, 0), (n0, n0)).copy_from(&self.b);
        for k in 0..self.eigs.len() {
            let o = self.offset(k);
            let nk = self.eigs[k].n();
            let block = self.nilpotent(k) + linalg::identity(nk) * self.eigs[k].lambda;
            j.view_mut((o, o), (nk, nk)).copy_from(&block);
        }
        j
    }

    /// `X̃ = P̃⁻¹ J P̃`.
    pub fn synth(&self) -> Result<CMatrix> {
        Ok(&self.p_inv * self.jordan() * &self.p)
    }

    /// The declared eigenvalues with their algebraic multiplicities.
    pub fn cluster(&self) -> Result<RootCluster> {
        RootCluster::new(self.eigs.iter().map(|e| (e.lambda, e.n())).collect())
    }

    /// `P̃^{-*} Y P̃^*`.
    pub fn to_w(&self, y: &CMatrix) -> CMatrix {
        self.p_inv.adjoint() * y * self.p.adjoint()
    }

    /// `P̃^* W P̃^{-*}`, the inverse of [`JordanSpec::to_w`].
    pub fn from_w(&self, w: &CMatrix) -> CMatrix {
        self.p.adjoint() * w * self.p_inv.adjoint()
    }

    /// `J_{js}`: `N_[j]^s` embedded in the rows and columns of eigenvalue `j`
    /// (`s = 0` gives the block identity).
    pub fn j_embed(&self, j: usize, s: usize) -> CMatrix {
        let n = self.n();
        let nj = self.eigs[j].n();
        let mut pow = linalg::identity(nj);
        let nil = self.nilpotent(j);
        for _ in 0..s {
            pow = &pow * &nil;
        }
        let mut out = CMatrix::zeros(n, n);
        let o = self.offset(j);
        out.view_mut((o, o), (nj, nj)).copy_from(&pow);
        out
    }

    /// The same matrix with its `J` rows/columns reordered by `perm`
    /// (`J′ = ΠJΠᵀ`, `P̃′ = ΠP̃`), given new Jordan data for the reordered `J′`.
    fn permuted(&self, perm: &[usize], eigs: Vec<EigenBlocks>, n0: usize) -> Result<Self> {
        let j = self.jordan();
        let jp = CMatrix::from_fn(j.nrows(), j.ncols(), |a, b| j[(perm[a], perm[b])]);
        let b = jp.view((0, 0), (n0, n0)).into_owned();
        let p = permute_rows(&self.p, perm);
        let spec = JordanSpec::new(eigs, Some(p), Some(b))?;
        Ok(spec)
    }
}

fn permute_rows(m: &CMatrix, perm: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |a, b| m[(perm[a], b)])
}

/// `det(λI − X)` by the Faddeev–LeVerrier recursion.
pub fn char_poly(x: &CMatrix) -> Poly {
    let n = x.nrows();
    let mut c = vec![ZERO; n + 1];
    c[n] = ONE;
    let eye = linalg::identity(n);
    let mut m = CMatrix::zeros(n, n);
    for k in 1..=n {
        m = x * &m + &eye * c[n - k + 1];
        let xm = x * &m;
        c[n - k] = -linalg::trace(&xm) / k as f64;
    }
    Poly::new(c)
}

/// `Φ′(X̃)Z = −Σ_j (Π_{k≠j} e_{n_k}) Σ_{ℓ=1}^{m_j} tr(N_[j]^{ℓ−1} V_jj) e_{n_j−ℓ}`
/// with `V = P̃ Z P̃⁻¹`. Needs every eigenvalue declared (`B̃` empty).
pub fn char_poly_deriv_action(spec: &JordanSpec, z: &CMatrix) -> Result<Poly> {
    if spec.n0() > 0 {
        return Err(Error::Precondition(
            "the derivative formula needs every eigenvalue declared (B̃ empty)".into(),
        ));
    }
    let n = spec.n();
    if z.nrows() != n || z.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: z.nrows(),
        });
    }
    let v = spec.p() * z * spec.p_inv();
    let mut out = Poly::zero(n);
    for j in 0..spec.len() {
        let e = spec.eig(j);
        let r = spec.range(j);
        let vjj = v.view((r.start, r.start), (e.n(), e.n())).into_owned();
        let nil = spec.nilpotent(j);
        let mut pow = linalg::identity(e.n());
        let mut inner = Poly::zero(e.n());
        for ell in 1..=e.m() {
            let t = linalg::trace(&(&pow * &vjj));
            inner = inner.add(&elementary((e.n() - ell) as i64, e.lambda)?.scale(t));
            pow = &pow * &nil;
        }
        let mut cof = Poly::constant(ONE);
        for k in 0..spec.len() {
            if k != j {
                cof = cof.mul(&elementary(spec.eig(k).n() as i64, spec.eig(k).lambda)?);
            }
        }
        out = out.sub(&cof.mul(&inner));
    }
    out.with_bound(n)
}

/// `det(ξI − J − Σ_s λ_s (J*)^s)` for the `n×n` nilpotent Jordan block,
/// via the first-column expansion `det A_n = a_{n−1} + a_{n−2} det A_1 + … +
/// a_0 det A_{n−1}` with `a_0 = ξ − λ_0`, `a_s = −λ_s`.
pub fn det_expansion(lambda: &[C64], xi: C64) -> C64 {
    let n = lambda.len();
    let a: Vec<C64> = (0..n)
        .map(|s| if s == 0 { xi - lambda[0] } else { -lambda[s] })
        .collect();
    let mut d = vec![ONE; n + 1];
    for k in 1..=n {
        d[k] = (0..k).map(|i| a[k - 1 - i] * d[i]).sum();
    }
    d[n]
}

/// `max_ξ |det − (ξⁿ − Σ_s (n−s) λ_s ξ^{n−s−1})| / ‖λ‖`.
pub fn det_expansion_residual(lambda: &[C64], xi_grid: &[C64]) -> f64 {
    let n = lambda.len();
    let norm = lambda.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    xi_grid
        .iter()
        .map(|&xi| {
            let mut lin = xi.powu(n as u32);
            for (s, &l) in lambda.iter().enumerate() {
                lin -= l * (n - s) as f64 * xi.powu((n - s - 1) as u32);
            }
            (det_expansion(lambda, xi) - lin).norm()
        })
        .fold(0.0, f64::max)
        / norm
}

fn require_nonderogatory(spec: &JordanSpec, j: usize) -> Result<()> {
    if j >= spec.len() {
        return Err(Error::Argument(format!("no eigenvalue with index {j}")));
    }
    if !spec.eig(j).nonderogatory() {
        return Err(Error::Precondition(format!(
            "eigenvalue {} is derogatory",
            spec.eig(j).lambda
        )));
    }
    Ok(())
}

/// `∇λ_{js}(X̃) = (n_j − s)⁻¹ P̃^* J_{js}^* P̃^{-*}`.
pub fn lambda_grad(spec: &JordanSpec, j: usize, s: usize) -> Result<CMatrix> {
    require_nonderogatory(spec, j)?;
    let nj = spec.eig(j).n();
    if s >= nj {
        return Err(Error::Argument(format!("s = {s} must be below n_j = {nj}")));
    }
    let g = spec.p().adjoint() * spec.j_embed(j, s).adjoint() * spec.p_inv().adjoint();
    Ok(g / C64::new((nj - s) as f64, 0.0))
}

/// `g_j′(X̃)Z = −Σ_s tr(J_{js} P̃ Z P̃⁻¹) e_{n_j−s−1}`: the derivative of the
/// monic factor `g_j` of eigenvalue `j`, minus its leading term.
pub fn g_deriv(spec: &JordanSpec, j: usize, z: &CMatrix) -> Result<Poly> {
    require_nonderogatory(spec, j)?;
    let e = spec.eig(j);
    let v = spec.p() * z * spec.p_inv();
    let mut out = Poly::zero(e.n() - 1);
    for s in 0..e.n() {
        let t = linalg::trace(&(spec.j_embed(j, s) * &v));
        out = out.sub(&elementary((e.n() - s - 1) as i64, e.lambda)?.scale(t));
    }
    out.with_bound(e.n() - 1)
}

/// Adjoint of `g_j′(X̃)` for the Taylor inner product at `λ̃_j` on
/// polynomials of degree `< n_j`: `−Σ_s τ_{n_j−s−1}(h) P̃^* J_{js}^* P̃^{-*}`.
pub fn g_adjoint(spec: &JordanSpec, j: usize, h: &Poly) -> Result<CMatrix> {
    require_nonderogatory(spec, j)?;
    let e = spec.eig(j);
    let n = spec.n();
    let mut out = CMatrix::zeros(n, n);
    for s in 0..e.n() {
        let hs = taylor_coeff(h, e.n() - s - 1, e.lambda);
        out -= spec.p().adjoint() * spec.j_embed(j, s).adjoint() * spec.p_inv().adjoint() * hs;
    }
    Ok(out)
}

/// Taylor inner product at `λ0` on polynomials of degree `≤ d`.
pub fn taylor_inner(p: &Poly, q: &Poly, lambda0: C64, d: usize) -> C64 {
    (0..=d)
        .map(|k| taylor_coeff(p, k, lambda0).conj() * taylor_coeff(q, k, lambda0))
        .sum()
}

/// The active part of a declared matrix.
#[derive(Debug, Clone)]
pub struct ActiveFactor {
    /// `φ(X̃)`.
    pub value: f64,
    /// Indices (into the original spec) of the active eigenvalues.
    pub active: Vec<usize>,
    /// `p̃ = Π_{j active} e_{n_j}^{λ̃_j}`.
    pub poly: RootCluster,
    /// The same matrix with the inactive eigenvalues absorbed into `B̃`.
    pub spec: JordanSpec,
}

/// Splits off the active eigenvalues of `spec` for the generator `f`.
pub fn active_factor(spec: &JordanSpec, f: &dyn Generator, tol: f64) -> Result<ActiveFactor> {
    if spec.is_empty() {
        return Err(Error::Precondition("no active eigenvalue declared".into()));
    }
    let values: Vec<f64> = spec.eigs().iter().map(|e| f.value(e.lambda)).collect();
    let mut value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if spec.n0() > 0 {
        let b_max = linalg::eigenvalues(spec.b())?
            .into_iter()
            .map(|mu| f.value(mu))
            .fold(f64::NEG_INFINITY, f64::max);
        if b_max > value + tol {
            return Err(Error::Precondition(
                "an eigenvalue of B̃ attains the maximum; declare it explicitly".into(),
            ));
        }
        value = value.max(b_max);
    }
    if !value.is_finite() {
        return Err(Error::Precondition("an eigenvalue lies outside dom f".into()));
    }
    let active: Vec<usize> = (0..spec.len()).filter(|&j| values[j] >= value - tol).collect();
    if active.is_empty() {
        return Err(Error::Precondition("no active eigenvalue declared".into()));
    }
    let inactive: Vec<usize> = (0..spec.len()).filter(|j| !active.contains(j)).collect();
    let mut perm: Vec<usize> = (0..spec.n0()).collect();
    for &j in inactive.iter().chain(&active) {
        perm.extend(spec.range(j));
    }
    let n0 = spec.n0() + inactive.iter().map(|&j| spec.eig(j).n()).sum::<usize>();
    let eigs: Vec<EigenBlocks> = active.iter().map(|&j| spec.eig(j).clone()).collect();
    let reduced = spec.permuted(&perm, eigs, n0)?;
    let poly = reduced.cluster()?;
    Ok(ActiveFactor {
        value,
        active,
        poly,
        spec: reduced,
    })
}

/// `R(v) = (v₀, −Σ_j Σ_{s<n_j} v_{js} P̃^* J_{js}^* P̃^{-*})` for
/// `v = [v₀, (v_{10}, …, v_{1,n₁−1}), …]`.
pub fn r_apply(spec: &JordanSpec, v: &[C64]) -> Result<(C64, CMatrix)> {
    if !spec.all_nonderogatory() {
        return Err(Error::Precondition("R needs nonderogatory eigenvalues".into()));
    }
    let dim = spec.n_tilde() + 1;
    if v.len() != dim {
        return Err(Error::Dimension {
            expected: dim,
            actual: v.len(),
        });
    }
    let n = spec.n();
    let mut w = CMatrix::zeros(n, n);
    let mut k = 1;
    for j in 0..spec.len() {
        for s in 0..spec.eig(j).n() {
            w -= spec.j_embed(j, s).adjoint() * v[k];
            k += 1;
        }
    }
    Ok((v[0], spec.from_w(&w)))
}

/// Jordan data of a matrix with simple, well separated eigenvalues.
pub fn from_diagonalizable(x: &CMatrix) -> Result<JordanSpec> {
    let n = x.nrows();
    let ev = linalg::eigenvalues(x)?;
    for i in 0..n {
        for k in i + 1..n {
            if (ev[i] - ev[k]).norm() <= 1e-4 {
                return Err(Error::Structure(
                    "eigenvalues are not separated by more than 1e-4".into(),
                ));
            }
        }
    }
    let mut vecs = CMatrix::zeros(n, n);
    for (k, &lam) in ev.iter().enumerate() {
        let v = linalg::eigenvector(x, lam)?;
        for i in 0..n {
            vecs[(i, k)] = v[i];
        }
    }
    // X = V D V⁻¹, so P̃ = V⁻¹
    let p = linalg::inverse_refined(&vecs)?;
    let eigs = ev.iter().map(|&l| EigenBlocks::new(l, vec![1])).collect();
    JordanSpec::new(eigs, Some(p), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Builtin;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real(rows: &[&[f64]]) -> CMatrix {
        let n = rows.len();
        CMatrix::from_fn(n, n, |i, j| c(rows[i][j], 0.0))
    }

    pub(crate) fn spec_a() -> JordanSpec {
        JordanSpec::new(
            vec![EigenBlocks::new(ONE, vec![2]), EigenBlocks::new(-ONE, vec![1])],
            None,
            None,
        )
        .unwrap()
    }

    #[test]
    fn synth_examples() {
        let s = JordanSpec::new(vec![EigenBlocks::new(ZERO, vec![2])], None, None).unwrap();
        assert_eq!(s.synth().unwrap(), real(&[&[0.0, 1.0], &[0.0, 0.0]]));
        let a = real(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, -1.0]]);
        assert!(linalg::frobenius(&(spec_a().synth().unwrap() - a)) < 1e-15);
        // eigenvalues are reordered lexicographically
        assert_eq!(spec_a().eig(0).lambda, -ONE);
        let dup = JordanSpec::new(
            vec![EigenBlocks::new(ONE, vec![2]), EigenBlocks::new(ONE, vec![1])],
            None,
            None,
        );
        assert!(matches!(dup, Err(Error::Structure(_))));
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(char_poly(&CMatrix::zeros(3, 3)), Poly::from_real(&[0.0, 0.0, 0.0, 1.0]));
        let p = char_poly(&spec_a().synth().unwrap());
        assert_eq!(p, Poly::from_real(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn deriv_action_examples() {
        let s = JordanSpec::new(vec![EigenBlocks::new(ZERO, vec![2])], None, None).unwrap();
        assert!(char_poly_deriv_action(&s, &CMatrix::zeros(2, 2)).unwrap().is_zero());
        let d = char_poly_deriv_action(&s, &linalg::identity(2)).unwrap();
        assert_eq!(d, Poly::from_real(&[0.0, -2.0, 0.0]));
    }

    #[test]
    fn det_expansion_examples() {
        let grid = [c(0.3, 0.1), c(-1.0, 0.5), c(2.0, 0.0)];
        assert_eq!(det_expansion_residual(&[ZERO; 4], &grid), 0.0);
        let (l0, l1, xi) = (c(0.1, 0.2), c(-0.3, 0.05), c(0.7, -0.4));
        let want = (xi - l0) * (xi - l0) - l1;
        assert!((det_expansion(&[l0, l1], xi) - want).norm() < 1e-15);
    }

    #[test]
    fn lambda_grad_examples() {
        let s = JordanSpec::new(vec![EigenBlocks::new(ZERO, vec![2])], None, None).unwrap();
        let g0 = lambda_grad(&s, 0, 0).unwrap();
        assert!(linalg::frobenius(&(g0 - linalg::identity(2) * C64::new(0.5, 0.0))) < 1e-15);
        let g1 = lambda_grad(&s, 0, 1).unwrap();
        assert_eq!(g1, real(&[&[0.0, 0.0], &[1.0, 0.0]]));
        let der = JordanSpec::new(vec![EigenBlocks::new(ZERO, vec![1, 1])], None, None).unwrap();
        assert!(lambda_grad(&der, 0, 0).is_err());
    }

    #[test]
    fn active_factor_examples() {
        let af = active_factor(&spec_a(), &Builtin::Radius, 1e-8).unwrap();
        assert_eq!(af.active.len(), 2);
        assert_eq!(af.poly.to_poly(), Poly::from_real(&[1.0, -1.0, -1.0, 1.0]));
        let af = active_factor(&spec_a(), &Builtin::Abscissa, 1e-8).unwrap();
        assert_eq!(af.poly.to_poly(), Poly::from_real(&[1.0, -2.0, 1.0]));
        assert_eq!(af.spec.n0(), 1);
        // the reduced spec describes the same matrix
        let diff = af.spec.synth().unwrap() - spec_a().synth().unwrap();
        assert!(linalg::frobenius(&diff) < 1e-14);
        let only_b = JordanSpec::new(vec![], None, Some(real(&[&[2.0]]))).unwrap();
        assert!(active_factor(&only_b, &Builtin::Abscissa, 1e-8).is_err());
    }

    #[test]
    fn r_apply_examples() {
        let s = JordanSpec::new(vec![EigenBlocks::new(ZERO, vec![2])], None, None).unwrap();
        let (z, y) = r_apply(&s, &[ZERO; 3]).unwrap();
        assert_eq!(z, ZERO);
        assert!(linalg::frobenius(&y) == 0.0);
        let (_, y) = r_apply(&s, &[ZERO, c(2.0, 0.0), c(0.0, 3.0)]).unwrap();
        // −2·I − 3i·Nᵀ (J_{js}^* conjugates nothing here: N is real)
        let want = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => c(-2.0, 0.0),
            (1, 0) => c(0.0, -3.0),
            _ => ZERO,
        });
        assert!(linalg::frobenius(&(y - want)) < 1e-15);
    }

    #[test]
    fn diagonalizable_round_trip() {
        let x = CMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64 * 0.3 - 0.4, (i as f64 - j as f64) * 0.1));
        let s = from_diagonalizable(&x).unwrap();
        assert!(linalg::frobenius(&(s.synth().unwrap() - &x)) < 1e-9);
    }
}
