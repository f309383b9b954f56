//! Acceptance suite: one pass/fail line per criterion. Runs without the libtest
//! harness so every line is printed; exits nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{c, gauss, random_active_spec, random_spec, simplex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specmax::complex_poly::{ONE, ZERO};
use specmax::factorization::FactorSpace;
use specmax::generators::eta;
use specmax::linalg::identity;
use specmax::matrix_jordan::{active_factor, char_poly, char_poly_deriv_action, det_expansion_residual};
use specmax::oracles::{fd_poly_quotient, subgradient_inequality_suite, Comparison};
use specmax::poly_subdiff::{subderivative_f, subderivative_radius};
use specmax::spec_subdiff::{
    chain_rule_membership, derogatory_witness, radius_rsd_membership, radius_rsd_sample, radius_rsd_zero,
    radius_rsd_zero_horizon, regularity_verdict, rsd_membership, rsd_sample, Regularity, SampleConvention,
};
use specmax::{Builtin, CMatrix, EigenBlocks, Generator, JordanSpec, Poly, RootCluster, Tolerances, C64};

type Outcome = Result<String, String>;

fn tols() -> Tolerances {
    Tolerances::default()
}

fn spec(eigs: &[(C64, &[usize])]) -> JordanSpec {
    JordanSpec::new(
        eigs.iter().map(|(l, b)| EigenBlocks::new(*l, b.to_vec())).collect(),
        None,
        None,
    )
    .unwrap()
}

fn a_spec() -> JordanSpec {
    spec(&[(ONE, &[2]), (-ONE, &[1])])
}

fn b_spec() -> JordanSpec {
    spec(&[(ONE, &[2, 1])])
}

fn diag(d: &[C64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.to_vec()))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: specmax::Error) -> String {
    e.to_string()
}

// A with Y = [[θ11, 0, 0], [θ12, θ11, 0], [0, 0, θ21]]
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let s = a_spec();
    let mut checked = 0;
    for t11 in [0.0, 0.25, 0.5] {
        let t21 = 2.0 * t11 - 1.0;
        for re12 in [-t11 - 0.1, -t11, 0.0, 1.0] {
            for im12 in [0.0, 5.0] {
                let mut y = diag(&[c(t11, 0.0), c(t11, 0.0), c(t21, 0.0)]);
                y[(1, 0)] = c(re12, im12);
                let expected = re12 >= -t11 - 1e-9 && t11 >= 0.0 && t21 <= 0.0 && (2.0 * t11 - t21 - 1.0).abs() <= 1e-9;
                let got = radius_rsd_membership(&s, &y, &tols()).map_err(err)?.verdict;
                ensure(got == expected, || {
                    format!("θ11={t11} θ12={re12}+{im12}i: got {got}, expected {expected}")
                })?;
                checked += 1;
            }
        }
    }
    let el = start.elapsed();
    ensure(el < Duration::from_secs(1), || format!("took {el:?}"))?;
    Ok(format!("{checked} grid points match, {el:.2?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let s = b_spec();
    let f = Builtin::Radius;
    let third = identity(3) * c(1.0 / 3.0, 0.0);
    for re in [-1.0 / 3.0, 0.0, 2.0] {
        for im in [0.0, 1.5] {
            let mut y = third.clone();
            y[(1, 0)] = c(re, im);
            let r = rsd_membership(&s, &f, &y, &tols()).map_err(err)?;
            ensure(r.verdict, || format!("θ = {re}+{im}i rejected: {:?}", r.failed_conditions))?;
        }
    }
    let mut y = third.clone();
    y[(1, 0)] = c(-1.0 / 3.0 - 1e-3, 0.0);
    ensure(!rsd_membership(&s, &f, &y, &tols()).map_err(err)?.verdict, || {
        "Re θ = −1/3 − 1e-3 accepted".into()
    })?;
    let m = diag(&[ZERO, ZERO, ONE]);
    let base = rsd_membership(&s, &f, &m, &tols()).map_err(err)?;
    ensure(!base.verdict, || "M accepted at B".into())?;
    for nu in 1..=100 {
        // B^ν = B + Diag(0, 0, 1/ν): J₂(1) ⊕ (1 + 1/ν)
        let bn = spec(&[(ONE, &[2]), (c(1.0 + 1.0 / nu as f64, 0.0), &[1])]);
        let r = rsd_membership(&bn, &f, &m, &tols()).map_err(err)?;
        ensure(r.verdict, || format!("M rejected at B^{nu}: {:?}", r.failed_conditions))?;
    }
    let w = derogatory_witness(&s, &f, 100, None, &tols()).map_err(err)?;
    ensure(w.verified, || "witness sequence did not verify".into())?;
    let el = start.elapsed();
    ensure(el < Duration::from_secs(5), || format!("took {el:?}"))?;
    Ok(format!("members/non-members as stated, M ∈ ∂̂ρ(B^ν) for ν = 1..100, {el:.2?}"))
}

fn criterion_3() -> Outcome {
    let s = spec(&[(ZERO, &[3])]);
    let n1 = s.nilpotent(0).transpose();
    let n2 = &n1 * &n1;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 0..64 {
        let phase = std::f64::consts::TAU * k as f64 / 64.0;
        let t2 = gauss(&mut rng);
        let t3 = gauss(&mut rng);
        let y = |r: f64| identity(3) * C64::from_polar(r, phase) + &n1 * t2 + &n2 * t3;
        let on = radius_rsd_zero(&s, &y(1.0 / 3.0), &tols()).map_err(err)?;
        ensure(on.verdict, || format!("boundary sample {k} rejected: {:?}", on.failed_conditions))?;
        let out = radius_rsd_zero(&s, &y((1.0 + 1e-9) / 3.0), &tols()).map_err(err)?;
        ensure(!out.verdict, || format!("sample {k} just outside accepted"))?;
        let inside = radius_rsd_zero(&s, &y((1.0 - 1e-9) / 3.0), &tols()).map_err(err)?;
        ensure(inside.verdict, || format!("sample {k} just inside rejected"))?;
        ensure(!radius_rsd_zero_horizon(&s, &y(1.0 / 3.0), &tols()).map_err(err)?.verdict, || {
            format!("horizon accepted θ₁ ≠ 0 at sample {k}")
        })?;
        let h = &n1 * t2 + &n2 * t3;
        ensure(radius_rsd_zero_horizon(&s, &h, &tols()).map_err(err)?.verdict, || {
            format!("horizon rejected θ₁ = 0 at sample {k}")
        })?;
    }
    Ok("64 boundary samples split at |θ₁| = 1/3 ± 1e-9; horizon needs θ₁ = 0".into())
}

/// Perturbation `kind` of a member `y`, chosen to leave the set.
fn perturb(s: &JordanSpec, f: &dyn Generator, y: &CMatrix, kind: usize) -> CMatrix {
    let mut w = s.to_w(y);
    let af = active_factor(s, f, 1e-8).unwrap();
    match kind {
        0 => w *= c(1.05, 0.0),
        1 => {
            // push θ_{j2} past the subdiagonal bound on a block with m ≥ 2
            let j = af.active.iter().copied().find(|&j| s.eig(j).m() >= 2);
            match j {
                Some(j) => {
                    let lam = s.eig(j).lambda;
                    let g = f.grad(lam).unwrap();
                    let o = s.offset(j);
                    let sigma = (w[(o, o)] / g).re;
                    let th2 = -(g * g) * ((sigma * eta(f, lam).unwrap() + 0.5) / g.norm().powi(4));
                    for a in 0..s.eig(j).n() - 1 {
                        w[(o + a + 1, o + a)] = th2;
                    }
                }
                None => return perturb(s, f, y, 2),
            }
        }
        _ => {
            // imaginary part on θ_{j1} along i∇f
            let j = af.active[0];
            let g = f.grad(s.eig(j).lambda).unwrap();
            for i in s.range(j) {
                w[(i, i)] += c(0.0, 0.1) * g;
            }
        }
    }
    s.from_w(&w)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut disagreements = Vec::new();
    let (mut members, mut non) = (0, 0);
    for i in 0..20 {
        let f = if i % 2 == 0 { Builtin::Abscissa } else { Builtin::Radius2 };
        let s = random_active_spec(&mut rng, f, 5, false);
        let k = active_factor(&s, &f, 1e-8).map_err(err)?.active.len();
        for _ in 0..100 {
            let g = simplex(&mut rng, k);
            let y = rsd_sample(&s, &f, &g, &mut rng, 1.0, SampleConvention::Reconciled).map_err(err)?;
            let a = rsd_membership(&s, &f, &y, &tols()).map_err(err)?;
            let b = chain_rule_membership(&s, &f, &y, &tols()).map_err(err)?;
            if !(a.verdict && b.verdict) {
                disagreements.push(format!("spec {i} member: explicit {:?} chain {:?}", a.failed_conditions, b.failed_conditions));
            }
            members += 1;
            let z = perturb(&s, &f, &y, rng.gen_range(0..3));
            let a = rsd_membership(&s, &f, &z, &tols()).map_err(err)?;
            let b = chain_rule_membership(&s, &f, &z, &tols()).map_err(err)?;
            if a.verdict || b.verdict {
                disagreements.push(format!("spec {i} non-member: explicit {} chain {}", a.verdict, b.verdict));
            }
            non += 1;
        }
    }
    ensure(disagreements.is_empty(), || {
        format!("{} disagreements, first: {}", disagreements.len(), disagreements[0])
    })?;
    Ok(format!("{members} members and {non} non-members, zero disagreements"))
}

fn richardson(x: &CMatrix, z: &CMatrix, h: f64) -> Vec<C64> {
    let central = |h: f64| -> Vec<C64> {
        let hp = char_poly(&(x + z * c(h, 0.0)));
        let hm = char_poly(&(x - z * c(h, 0.0)));
        hp.coeffs()
            .iter()
            .zip(hm.coeffs())
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect()
    };
    let d1 = central(h);
    let d2 = central(h / 2.0);
    d1.iter().zip(&d2).map(|(a, b)| (b * 4.0 - a) / 3.0).collect()
}

// relative error per coefficient, with the largest coefficient as the floor
fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut derogatory = 0;
    for i in 0..50 {
        let s = random_spec(&mut rng, 6, i % 2 == 0);
        if !s.all_nonderogatory() {
            derogatory += 1;
        }
        let n = s.n();
        let z = CMatrix::from_fn(n, n, |_, _| gauss(&mut rng));
        let x = s.synth().map_err(err)?;
        let formula = char_poly_deriv_action(&s, &z).map_err(err)?;
        let fd = richardson(&x, &z, 1e-3);
        let scale = formula.norm_inf().max(1e-300);
        for (k, d) in fd.iter().enumerate() {
            let rel = (formula.coeff(k) - d).norm() / formula.coeff(k).norm().max(scale);
            worst = worst.max(rel);
        }
    }
    ensure(worst <= 1e-5, || format!("worst relative error {worst:.3e}"))?;
    Ok(format!("50 pairs ({derogatory} derogatory), worst relative error {worst:.2e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let grid: Vec<C64> = (0..8)
        .map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 8.0 + 0.1))
        .collect();
    let mut worst = f64::INFINITY;
    for n in 2..=6 {
        for _ in 0..5 {
            let dir: Vec<C64> = (0..n).map(|_| gauss(&mut rng)).collect();
            let norm = dir.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let at = |r: f64| -> Vec<C64> { dir.iter().map(|z| z * (r / norm)).collect() };
            let r1 = det_expansion_residual(&at(1e-2), &grid);
            let r2 = det_expansion_residual(&at(1e-3), &grid);
            let ratio = r1 / r2;
            worst = worst.min(ratio);
            ensure(ratio >= 8.0, || format!("n = {n}: ratio {ratio:.3}"))?;
        }
    }
    Ok(format!("n = 2..6, smallest decrease factor {worst:.2}"))
}

fn random_cluster(rng: &mut ChaCha8Rng, f: Builtin, mults: &[usize], ties: usize) -> RootCluster {
    let mut pairs = Vec::new();
    let level = rng.gen_range(0.6..1.4);
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    for (k, &m) in mults.iter().enumerate() {
        let z = if k < ties {
            match f {
                Builtin::Abscissa => c(level, -2.0 + 1.3 * k as f64),
                _ => C64::from_polar(level, phase + std::f64::consts::TAU * k as f64 / ties as f64),
            }
        } else {
            match f {
                Builtin::Abscissa => c(level - 0.7 - 0.5 * k as f64, rng.gen_range(-1.0..1.0)),
                _ => C64::from_polar(0.4 * level, phase + 0.9 * k as f64),
            }
        };
        pairs.push((z, m));
    }
    RootCluster::new(pairs).unwrap()
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize) -> Poly {
    Poly::new((0..n).map(|_| gauss(rng)).collect())
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let fs = [Builtin::Abscissa, Builtin::Radius2, Builtin::Radius];
    let grid = [1e-2, 1e-3, 1e-4, 1e-5];

    // simple active roots: equality
    let mut worst_eq = 0.0f64;
    for i in 0..50 {
        let f = fs[i % 3];
        let k = rng.gen_range(1..=3usize);
        let mults: Vec<usize> = (0..k + rng.gen_range(0..2)).map(|_| 1).collect();
        let base = random_cluster(&mut rng, f, &mults, k);
        let v = random_poly(&mut rng, base.degree());
        // |·| is not C² positive definite, so the radius has its own formula
        let formula = match f {
            Builtin::Radius => subderivative_radius(&base, &v),
            _ => subderivative_f(&base, &f, &v),
        }
        .map_err(err)?;
        let r = fd_poly_quotient(&base, &f, &v, &grid).map_err(err)?.with_formula(formula, Comparison::Equal, 1, 1e-3);
        worst_eq = worst_eq.max((r.extrapolated - formula).abs() / formula.abs().max(1.0));
        ensure(r.verdict == Some(true), || {
            format!("simple instance {i} ({f}): formula {formula}, extrapolated {}", r.extrapolated)
        })?;
    }

    // multiple active roots, directions inside the finite region: upper bound
    for i in 0..50 {
        let f = [Builtin::Abscissa, Builtin::Radius2][i % 2];
        let k = rng.gen_range(1..=2usize);
        let mut mults: Vec<usize> = (0..k).map(|_| rng.gen_range(2..=3)).collect();
        mults.push(1);
        let base = random_cluster(&mut rng, f, &mults, k);
        let space = FactorSpace::new(base.clone()).map_err(err)?;
        let mut omega = vec![ZERO; base.degree() + 1];
        let top = base.roots().iter().map(|&z| f.value(z)).fold(f64::NEG_INFINITY, f64::max);
        for j in 0..base.len() {
            let o = base.block_offset(j);
            omega[o] = gauss(&mut rng);
            if f.value(base.roots()[j]) >= top - 1e-9 {
                let g = f.grad(base.roots()[j]).unwrap();
                let r = c(0.0, rng.gen_range(-1.0..1.0)) * g / g.norm();
                omega[o + 1] = -(r * r);
            } else {
                for s in 1..base.multiplicities()[j] {
                    omega[o + s] = gauss(&mut rng);
                }
            }
        }
        let v = space.coords_to_poly(&omega).map_err(err)?;
        let formula = subderivative_f(&base, &f, &v).map_err(err)?;
        ensure(formula.is_finite(), || format!("multiple instance {i}: formula is {formula}"))?;
        let m = *base.multiplicities().iter().max().unwrap();
        let r = fd_poly_quotient(&base, &f, &v, &grid).map_err(err)?.with_formula(formula, Comparison::Upper, m, 0.0);
        ensure(r.verdict == Some(true), || {
            format!("multiple instance {i} ({f}): formula {formula} above quotients {:?}", r.quotients)
        })?;
    }

    // generic directions at multiple roots: +∞
    let inf_grid = [1e-4, 1e-5, 1e-6, 1e-7];
    let mut worst_exp = f64::NEG_INFINITY;
    let mut infinite = 0;
    for i in 0..50 {
        let f = [Builtin::Abscissa, Builtin::Radius2][i % 2];
        let mults = [rng.gen_range(2..=3), 1];
        let base = random_cluster(&mut rng, f, &mults, 1);
        let v = random_poly(&mut rng, base.degree());
        let formula = subderivative_f(&base, &f, &v).map_err(err)?;
        if formula != f64::INFINITY {
            continue;
        }
        infinite += 1;
        let r = fd_poly_quotient(&base, &f, &v, &inf_grid).map_err(err)?.with_formula(formula, Comparison::Upper, mults[0], 0.0);
        let e = r.exponent.unwrap_or(f64::INFINITY);
        worst_exp = worst_exp.max(e);
        ensure(r.verdict == Some(true), || format!("+∞ instance {i}: exponent {e:.3}, quotients {:?}", r.quotients))?;
    }
    ensure(infinite > 0, || "no +∞ instance generated".into())?;
    Ok(format!(
        "50 simple (worst rel {worst_eq:.1e}), 50 multiple upper-bounded, {infinite} +∞ (largest exponent {worst_exp:.2})"
    ))
}

fn criterion_8() -> Outcome {
    let radii = [1e-2, 1e-3, 1e-4];
    let mut cases: Vec<(String, JordanSpec, Builtin, CMatrix)> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    cases.push(("A".into(), a_spec(), Builtin::Radius, diag(&[c(0.5, 0.0), c(0.5, 0.0), ZERO])));
    let ya = radius_rsd_sample(&a_spec(), &[0.3, 0.7], &mut rng, 1.0).map_err(err)?;
    cases.push(("A sampled".into(), a_spec(), Builtin::Radius, ya));
    for th in [c(-1.0 / 3.0, 0.0), c(0.0, 0.0), c(2.0, 0.7)] {
        let mut y = identity(3) * c(1.0 / 3.0, 0.0);
        y[(1, 0)] = th;
        cases.push((format!("B θ={th}"), b_spec(), Builtin::Radius, y));
    }
    for i in 0..10 {
        let f = [Builtin::Abscissa, Builtin::Radius2][i % 2];
        let s = random_active_spec(&mut rng, f, 4, i % 3 == 0);
        let k = active_factor(&s, &f, 1e-8).map_err(err)?.active.len();
        let g = simplex(&mut rng, k);
        let y = rsd_sample(&s, &f, &g, &mut rng, 1.0, SampleConvention::Reconciled).map_err(err)?;
        cases.push((format!("random {i} ({f})"), s, f, y));
    }
    let mut worst = f64::NEG_INFINITY;
    for (k, (name, s, f, y)) in cases.iter().enumerate() {
        let r = subgradient_inequality_suite(s, f, y, 500, &radii, 800 + k as u64).map_err(err)?;
        worst = worst.max(r.max_violation);
        ensure(r.violations == 0, || {
            format!("{name}: {} violations, max {:.3e}", r.violations, r.max_violation)
        })?;
    }
    Ok(format!("{} members × 502 directions, zero violations (max excess {worst:.2e})", cases.len()))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut specs = vec![a_spec(), b_spec()];
    for _ in 0..4 {
        let derogatory = rng.gen_bool(0.5);
        specs.push(random_active_spec(&mut rng, Builtin::Radius, 5, derogatory));
    }
    let mut checked = 0;
    let mut members = 0;
    for (i, s) in specs.iter().enumerate() {
        let af = active_factor(s, &Builtin::Radius, 1e-8).map_err(err)?;
        let rho = af.value;
        let k = af.active.len();
        for t in 0..100 {
            let g = simplex(&mut rng, k);
            let mut y = radius_rsd_sample(s, &g, &mut rng, 1.0).map_err(err)?;
            if t % 2 == 1 {
                y = perturb_radius(s, &y, &mut rng);
            }
            let a = radius_rsd_membership(s, &y, &tols()).map_err(err)?.verdict;
            let b = rsd_membership(s, &Builtin::Radius2, &(&y * c(rho, 0.0)), &tols()).map_err(err)?.verdict;
            ensure(a == b, || format!("spec {i} sample {t}: radius {a}, radius2 scaled {b}"))?;
            members += a as usize;
            checked += 1;
        }
    }
    Ok(format!("{checked} samples on {} specs ({members} members), zero disagreements", specs.len()))
}

fn perturb_radius(s: &JordanSpec, y: &CMatrix, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut w = s.to_w(y);
    let n = s.n();
    match rng.gen_range(0..3) {
        0 => w *= c(1.1, 0.0),
        1 => {
            let i = rng.gen_range(0..n);
            w[(i, i)] += gauss(rng) * 0.2;
        }
        _ => {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            w[(i, j)] += gauss(rng) * 0.5;
        }
    }
    s.from_w(&w)
}

fn criterion_10() -> Outcome {
    let r = Builtin::Radius;
    let verdicts = [
        ("A", regularity_verdict(&a_spec(), &r, &tols()).map_err(err)?, Regularity::Regular),
        ("B", regularity_verdict(&b_spec(), &r, &tols()).map_err(err)?, Regularity::NotRegular),
        (
            "J₃(0)",
            regularity_verdict(&spec(&[(ZERO, &[3])]), &r, &tols()).map_err(err)?,
            Regularity::Regular,
        ),
    ];
    for (name, got, want) in verdicts {
        ensure(got == want, || format!("{name}: {got:?}, expected {want:?}"))?;
    }
    let witnesses = [
        ("B", b_spec(), Builtin::Radius),
        ("J₂(0) ⊕ 0", spec(&[(ZERO, &[2, 1])]), Builtin::Radius),
        ("abscissa", spec(&[(c(0.5, 1.0), &[1, 2]), (c(-1.0, 0.0), &[1])]), Builtin::Abscissa),
    ];
    for (name, s, f) in witnesses {
        ensure(regularity_verdict(&s, &f, &tols()).map_err(err)? == Regularity::NotRegular, || {
            format!("{name} reported regular")
        })?;
        let w = derogatory_witness(&s, &f, 100, None, &tols()).map_err(err)?;
        ensure(w.verified && w.steps.len() == 100, || {
            format!("{name}: witness not verified (base {:?})", w.base_report.failed_conditions)
        })?;
    }
    Ok("A regular, B not; three witnesses verified for ν = 1..100".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("matrix A characterization grid", criterion_1),
        ("matrix B members and limit subgradient", criterion_2),
        ("zero-radius boundary and horizon", criterion_3),
        ("chain rule vs explicit formula", criterion_4),
        ("characteristic polynomial derivative", criterion_5),
        ("determinant expansion remainder", criterion_6),
        ("subderivative vs root oracle", criterion_7),
        ("regular-subgradient inequality", criterion_8),
        ("radius / radius2 scaling", criterion_9),
        ("regularity verdicts and witnesses", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let el = start.elapsed();
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} [{el:.2?}]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} [{el:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
