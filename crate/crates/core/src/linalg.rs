//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;

use crate::complex_poly::{C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Square complex matrix. Serialized as row-major arrays of `[re, im]`.
pub type CMatrix = DMatrix<C64>;

/// Largest condition number accepted for similarity transforms.
pub const MAX_CONDITION: f64 = 1e8;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `⟨X, Y⟩ = tr(X* Y)`.
pub fn inner(x: &CMatrix, y: &CMatrix) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Real part of the trace inner product, the pairing used for subgradients.
pub fn real_inner(x: &CMatrix, y: &CMatrix) -> f64 {
    inner(x, y).re
}

pub fn frobenius(x: &CMatrix) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm1(x: &CMatrix) -> f64 {
    (0..x.ncols())
        .map(|j| x.column(j).iter().map(|a| a.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn trace(x: &CMatrix) -> C64 {
    (0..x.nrows().min(x.ncols())).map(|i| x[(i, i)]).sum()
}

/// Inverse by LU with two rounds of iterative refinement; rejects matrices
/// whose 1-norm condition estimate exceeds [`MAX_CONDITION`].
pub fn inverse_refined(a: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Dimension {
            expected: n,
            actual: a.ncols(),
        });
    }
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let mut x = a
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Singular("matrix is singular".into()))?;
    let eye = identity(n);
    for _ in 0..2 {
        let resid = &eye - a * &x;
        x += &x * resid;
    }
    let cond = norm1(a) * norm1(&x);
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::Singular(format!(
            "condition estimate {cond:.3e} exceeds {MAX_CONDITION:.0e}"
        )));
    }
    Ok(x)
}

/// Solves the square system `a x = b` by LU.
pub fn solve(a: &CMatrix, b: &[C64]) -> Result<Vec<C64>> {
    let rhs = nalgebra::DVector::from_column_slice(b);
    let x = a
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("singular linear system".into()))?;
    Ok(x.iter().copied().collect())
}

/// Minimum-norm least-squares solution of `a x ≈ b` and the residual norm.
pub fn least_squares(a: &CMatrix, b: &[C64]) -> Result<(Vec<C64>, f64)> {
    let rhs = nalgebra::DVector::from_column_slice(b);
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&rhs, 1e-13 * svd.singular_values.max().max(f64::MIN_POSITIVE))
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let resid = (a * &x - &rhs).norm();
    Ok((x.iter().copied().collect(), resid))
}

/// Parlett–Reinsch balancing by powers of two (a diagonal similarity, so the
/// Hessenberg pattern and the spectrum are preserved).
pub fn balance(m: &mut CMatrix) {
    let n = m.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].norm();
                    r += m[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cs = c;
            while cs < r / radix {
                f *= radix;
                cs *= radix * radix;
            }
            while cs > r * radix {
                f /= radix;
                cs /= radix * radix;
            }
            if (cs + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                }
                for j in 0..n {
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Eigenvalues of a general square matrix: Householder reduction to
/// Hessenberg form followed by shifted QR.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let mut h = if is_hessenberg(m) {
        m.clone()
    } else {
        m.clone().hessenberg().h()
    };
    hessenberg_qr(&mut h)
}

fn is_hessenberg(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..i.saturating_sub(1)).all(|j| m[(i, j)] == ZERO))
}

/// Shifted complex QR iteration on an upper Hessenberg matrix (Wilkinson
/// shifts, exceptional shifts every ten stalled iterations).
fn hessenberg_qr(h: &mut CMatrix) -> Result<Vec<C64>> {
    let n = h.nrows();
    let mut eig = vec![ZERO; n];
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut rots: Vec<(C64, C64, f64)> = Vec::with_capacity(n);
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let scale = if scale == 0.0 { 1.0 } else { scale };
            if h[(l, l - 1)].norm() <= eps * scale {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 60 * n + 200 {
            return Err(Error::Numerical("QR iteration did not converge".into()));
        }
        let shift = if iter % 11 == 10 {
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm() * 0.75, h[(hi, hi - 1)].norm() * 0.4)
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let half_tr = (a + d) * 0.5;
            let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
            let e1 = half_tr + disc;
            let e2 = half_tr - disc;
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        for k in l..=hi {
            h[(k, k)] -= shift;
        }
        rots.clear();
        for k in l..hi {
            let a = h[(k, k)];
            let b = h[(k + 1, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if r == 0.0 {
                rots.push((ONE, ZERO, 0.0));
                continue;
            }
            let (ca, cb) = (a / r, b / r);
            for col in l..=hi {
                let x = h[(k, col)];
                let y = h[(k + 1, col)];
                h[(k, col)] = ca.conj() * x + cb.conj() * y;
                h[(k + 1, col)] = -cb * x + ca * y;
            }
            rots.push((ca, cb, r));
        }
        for (idx, k) in (l..hi).enumerate() {
            let (ca, cb, r) = rots[idx];
            if r == 0.0 {
                continue;
            }
            for row in l..=hi {
                let x = h[(row, k)];
                let y = h[(row, k + 1)];
                h[(row, k)] = x * ca + y * cb;
                h[(row, k + 1)] = -x * cb.conj() + y * ca.conj();
            }
        }
        for k in l..=hi {
            h[(k, k)] += shift;
        }
    }
    Ok(eig)
}

/// Right null vector of `a − λI` by inverse iteration, normalized to unit
/// 2-norm.
pub fn eigenvector(a: &CMatrix, lambda: C64) -> Result<Vec<C64>> {
    let n = a.nrows();
    let scale = norm1(a).max(1.0);
    let shifted = a - identity(n) * (lambda + C64::new(scale * 1e-10, scale * 1e-10));
    let lu = shifted.lu();
    let mut x = nalgebra::DVector::from_element(n, C64::new(1.0, 0.37));
    for _ in 0..3 {
        let y = lu
            .solve(&x)
            .ok_or_else(|| Error::Singular("inverse iteration failed".into()))?;
        let nrm = y.norm();
        if !nrm.is_finite() || nrm == 0.0 {
            return Err(Error::Numerical("inverse iteration diverged".into()));
        }
        x = y / C64::new(nrm, 0.0);
    }
    Ok(x.iter().copied().collect())
}
