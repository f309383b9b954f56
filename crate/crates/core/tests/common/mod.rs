//! Random instances shared by the integration tests.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use specmax::{Builtin, CMatrix, EigenBlocks, JordanSpec, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn gauss(rng: &mut ChaCha8Rng) -> C64 {
    c(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

pub fn gauss_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| gauss(rng))
}

/// `I + 0.3·G/√n`: invertible with a small condition number.
pub fn random_p(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let s = 0.3 / (n as f64).sqrt();
    CMatrix::from_fn(n, n, |i, j| {
        let g = gauss(rng) * s;
        if i == j {
            g + c(1.0, 0.0)
        } else {
            g
        }
    })
}

pub fn simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn blocks(rng: &mut ChaCha8Rng, budget: usize, derogatory: bool) -> Vec<usize> {
    let first = rng.gen_range(1..=budget.min(3));
    let mut b = vec![first];
    if derogatory && budget > first {
        b.push(rng.gen_range(1..=(budget - first).min(2)));
    }
    b
}

/// A spec of size at most `max_n` whose active eigenvalues for `f` tie
/// exactly (equal real parts for the abscissa, equal moduli otherwise),
/// plus possibly one inactive eigenvalue. No eigenvalue is zero.
pub fn random_active_spec(rng: &mut ChaCha8Rng, f: Builtin, max_n: usize, derogatory: bool) -> JordanSpec {
    let n_active = rng.gen_range(1..=3usize.min(max_n));
    let mut budget = max_n;
    let mut eigs = Vec::new();
    let level = match f {
        Builtin::Abscissa => rng.gen_range(-1.0..1.0),
        _ => rng.gen_range(0.6..1.6),
    };
    let phase0: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    for k in 0..n_active {
        let left = n_active - k - 1;
        if budget <= left {
            break;
        }
        let b = blocks(rng, budget - left, derogatory && k == 0);
        budget -= b.iter().sum::<usize>();
        let lambda = match f {
            Builtin::Abscissa => c(level, -1.5 + 1.4 * k as f64 + rng.gen_range(-0.2..0.2)),
            _ => C64::from_polar(level, phase0 + std::f64::consts::TAU * k as f64 / n_active as f64),
        };
        eigs.push(EigenBlocks::new(lambda, b));
    }
    if budget > 0 && rng.gen_bool(0.5) {
        let lambda = match f {
            Builtin::Abscissa => c(level - 0.5 - rng.gen::<f64>(), rng.gen_range(-1.0..1.0)),
            _ => C64::from_polar(level * 0.5, rng.gen_range(0.0..std::f64::consts::TAU)),
        };
        let b = vec![rng.gen_range(1..=budget.min(2))];
        eigs.push(EigenBlocks::new(lambda, b));
    }
    let n: usize = eigs.iter().map(|e| e.n()).sum();
    let p = random_p(rng, n);
    JordanSpec::new(eigs, Some(p), None).expect("valid random spec")
}

/// Any spec of size at most `max_n` with well separated eigenvalues.
pub fn random_spec(rng: &mut ChaCha8Rng, max_n: usize, derogatory: bool) -> JordanSpec {
    let k = rng.gen_range(1..=3usize.min(max_n));
    let mut budget = max_n;
    let mut eigs = Vec::new();
    for i in 0..k {
        if budget == 0 {
            break;
        }
        let b = blocks(rng, budget, derogatory && i == 0);
        budget -= b.iter().sum::<usize>();
        let lambda = c(-1.0 + 1.0 * i as f64, 0.0) + gauss(rng) * 0.2;
        eigs.push(EigenBlocks::new(lambda, b));
    }
    let n: usize = eigs.iter().map(|e| e.n()).sum();
    let p = random_p(rng, n);
    JordanSpec::new(eigs, Some(p), None).expect("valid random spec")
}
