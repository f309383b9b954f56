use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use specmax::complex_poly::{
    active_set_of_cluster, roots, DEFAULT_ACTIVE_TOL, DEFAULT_CLUSTER_TOL, ONE, ZERO,
};
use specmax::json::{matrix_from_rows, MatrixRows, SpecJson};
use specmax::linalg::identity;
use specmax::matrix_jordan::{active_factor, char_poly};
use specmax::oracles::{
    definition_gap, fd_phi_quotient_spec, fd_poly_quotient, gaussian_direction,
    subgradient_inequality_suite, Comparison, T_GRID,
};
use specmax::poly_subdiff::{subderivative_f, subderivative_radius};
use specmax::spec_subdiff::{
    chain_rule_membership, derogatory_witness, matrix_subderivative, radius_rsd_sample,
    regularity_verdict, rsd_membership, rsd_recession_membership, rsd_sample, w_extract, Level,
    MembershipReport, Regularity, SampleConvention,
};
use specmax::stabilize::{self, AffineFamily, FamilyJson};
use specmax::{
    Builtin, CMatrix, EigenBlocks, Generator, JordanSpec, Poly, RootCluster, Tolerances, C64,
};

use crate::{Cli, Command, Global, SetKind, SubderivativeKind};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input.
    Input(String),
    /// The library refused the input on mathematical grounds.
    Domain(specmax::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => f.write_str(m),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl From<specmax::Error> for CliError {
    fn from(e: specmax::Error) -> Self {
        CliError::Domain(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Rejected,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::Rejected => 1,
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Ok
        } else {
            Outcome::Rejected
        }
    }
}

type Res<T> = Result<T, CliError>;

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Res<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{what} {}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Res<CMatrix> {
    let rows: MatrixRows = read_json(path, "matrix")?;
    matrix_from_rows(&rows).map_err(|e| CliError::Input(format!("matrix {}: {e}", path.display())))
}

fn read_spec(path: &Path) -> Res<JordanSpec> {
    let js: SpecJson = read_json(path, "spec")?;
    Ok(js.into_spec()?)
}

#[derive(Debug, Deserialize)]
struct ClusterJson {
    roots: Vec<C64>,
    multiplicities: Vec<usize>,
}

fn read_cluster(path: &Path) -> Res<RootCluster> {
    let cj: ClusterJson = read_json(path, "roots")?;
    if cj.roots.len() != cj.multiplicities.len() {
        return Err(CliError::Input(
            "roots and multiplicities differ in length".into(),
        ));
    }
    Ok(RootCluster::new(
        cj.roots.into_iter().zip(cj.multiplicities).collect(),
    )?)
}

pub fn tolerances(g: &Global) -> Res<Tolerances> {
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(CliError::Input(format!(
            "--tol must be positive, got {}",
            g.tol
        )));
    }
    Ok(Tolerances {
        structural: g.tol,
        simplex: 10.0 * g.tol,
        inequality: g.tol / 10.0,
        ..Tolerances::default()
    })
}

fn emit(g: &Global, text: &str) -> Res<()> {
    match &g.out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// `+∞` has no JSON number form.
fn extended(x: f64) -> Value {
    if x == f64::INFINITY {
        json!("+inf")
    } else if x == f64::NEG_INFINITY {
        json!("-inf")
    } else {
        json!(x)
    }
}

pub fn run(cli: &Cli) -> Res<Outcome> {
    let g = &cli.global;
    tolerances(g)?;
    match &cli.command {
        Command::Eval { matrix, f } => eval(g, &read_matrix(matrix)?, *f),
        Command::Membership { spec, y, f, set } => {
            membership(g, &read_spec(spec)?, &read_matrix(y)?, *f, *set)
        }
        Command::Subderivative { kind } => subderivative(g, kind),
        Command::PaperExamples { nu } => reference_examples(g, *nu),
        Command::Verify {
            spec,
            f,
            y,
            samples,
        } => {
            let y = y.as_deref().map(read_matrix).transpose()?;
            verify(g, &read_spec(spec)?, *f, y, *samples)
        }
        Command::Stabilize {
            family,
            f,
            iters,
            step_rule,
            alpha,
            theta0,
        } => {
            let fam = AffineFamily::from_json(&read_json::<FamilyJson>(family, "family")?)?;
            let theta0 = theta0.clone().unwrap_or_else(|| vec![0.0; fam.dirs.len()]);
            let steps = stabilize::run(&fam, f, &theta0, *iters, *step_rule, *alpha, g.seed)?;
            emit(
                g,
                &if g.json {
                    pretty(&steps)
                } else {
                    stabilize::to_csv(&steps)
                },
            )?;
            Ok(Outcome::Ok)
        }
    }
}

#[derive(Serialize)]
struct EigenRecord {
    lambda: C64,
    multiplicity: usize,
    value: Value,
}

fn eval(g: &Global, x: &CMatrix, f: Builtin) -> Res<Outcome> {
    if x.nrows() == 0 {
        return Err(CliError::Input("empty matrix".into()));
    }
    let cluster = roots(&char_poly(x), DEFAULT_CLUSTER_TOL)?;
    let act = active_set_of_cluster(cluster.clone(), &f, DEFAULT_ACTIVE_TOL);
    let eigs: Vec<EigenRecord> = cluster
        .roots()
        .iter()
        .zip(cluster.multiplicities())
        .map(|(&lambda, &multiplicity)| EigenRecord {
            lambda,
            multiplicity,
            value: extended(f.value(lambda)),
        })
        .collect();
    let active: Vec<C64> = act.indices.iter().map(|&j| cluster.roots()[j]).collect();
    let out = json!({
        "generator": f.as_str(),
        "value": extended(act.value),
        "eigenvalues": eigs,
        "active": active,
    });
    emit(g, &pretty(&out))?;
    Ok(Outcome::Ok)
}

fn membership_report(
    spec: &JordanSpec,
    y: &CMatrix,
    f: Builtin,
    set: SetKind,
    t: &Tolerances,
) -> Res<MembershipReport> {
    Ok(match set {
        SetKind::Rsd => rsd_membership(spec, &f, y, t)?,
        SetKind::Recession => rsd_recession_membership(spec, &f, y, t)?,
        SetKind::LimitingStructure => w_extract(spec, y, Level::Limiting, t)?.report,
        SetKind::Chain => chain_rule_membership(spec, &f, y, t)?,
    })
}

fn membership(
    g: &Global,
    spec: &JordanSpec,
    y: &CMatrix,
    f: Builtin,
    set: SetKind,
) -> Res<Outcome> {
    let t = tolerances(g)?;
    let rep = membership_report(spec, y, f, set, &t)?;
    let set_name = match set {
        SetKind::Rsd => "rsd",
        SetKind::Recession => "recession",
        SetKind::LimitingStructure => "limiting-structure",
        SetKind::Chain => "chain",
    };
    let out = json!({
        "generator": f.as_str(),
        "set": set_name,
        "member": rep.verdict,
        "failed_conditions": rep.failed_conditions,
    });
    emit(g, &pretty(&out))?;
    Ok(Outcome::from_bool(rep.verdict))
}

fn subderivative(g: &Global, kind: &SubderivativeKind) -> Res<Outcome> {
    let (value, oracle) = match kind {
        SubderivativeKind::Matrix { spec, z, f, oracle } => {
            let spec = read_spec(spec)?;
            let z = read_matrix(z)?;
            let value = matrix_subderivative(&spec, f, &z)?;
            let report = if *oracle {
                let m = spec.eigs().iter().map(EigenBlocks::m).max().unwrap_or(1);
                Some(fd_phi_quotient_spec(&spec, f, &z, &T_GRID)?.with_formula(
                    value,
                    Comparison::Upper,
                    m,
                    0.0,
                ))
            } else {
                None
            };
            (value, report)
        }
        SubderivativeKind::Poly {
            roots,
            v,
            f,
            oracle,
        } => {
            let base = read_cluster(roots)?;
            let v: Poly = read_json(v, "polynomial")?;
            let value = match f {
                Builtin::Radius => subderivative_radius(&base, &v)?,
                _ => subderivative_f(&base, f, &v)?,
            };
            let report = if *oracle {
                let m = base.multiplicities().iter().copied().max().unwrap_or(1);
                let cmp = if m == 1 {
                    Comparison::Equal
                } else {
                    Comparison::Upper
                };
                Some(fd_poly_quotient(&base, f, &v, &T_GRID)?.with_formula(value, cmp, m, 1e-3))
            } else {
                None
            };
            (value, report)
        }
    };
    let consistent = oracle.as_ref().is_none_or(|r| r.verdict == Some(true));
    let mut out = json!({ "value": extended(value) });
    if let Some(r) = oracle {
        out["oracle"] = serde_json::to_value(r).expect("serializable");
    }
    emit(g, &pretty(&out))?;
    Ok(Outcome::from_bool(consistent))
}

fn fixture(eigs: &[(C64, &[usize])]) -> JordanSpec {
    JordanSpec::new(
        eigs.iter()
            .map(|(l, b)| EigenBlocks::new(*l, b.to_vec()))
            .collect(),
        None,
        None,
    )
    .expect("fixture spec is valid")
}

fn diag(d: &[f64]) -> CMatrix {
    CMatrix::from_fn(d.len(), d.len(), |i, j| {
        if i == j {
            C64::new(d[i], 0.0)
        } else {
            ZERO
        }
    })
}

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    detail: String,
}

/// The 3×3 reference matrices `A = J₂(1) ⊕ (−1)` and `B = J₂(1) ⊕ 1`
/// under the spectral radius.
fn reference_examples(g: &Global, nu: usize) -> Res<Outcome> {
    let t = tolerances(g)?;
    let r = Builtin::Radius;
    let a = fixture(&[(ONE, &[2]), (-ONE, &[1])]);
    let b = fixture(&[(ONE, &[2, 1])]);
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        })
    };

    let am = a.synth()?;
    let cluster = roots(&char_poly(&am), DEFAULT_CLUSTER_TOL)?;
    let act = active_set_of_cluster(cluster.clone(), &r, DEFAULT_ACTIVE_TOL);
    push(
        "A: ρ(A) = 1",
        (act.value - 1.0).abs() < 1e-9,
        format!("ρ = {}", act.value),
    );
    let mut active: Vec<C64> = act.indices.iter().map(|&j| cluster.roots()[j]).collect();
    active.sort_by(|x, y| x.re.total_cmp(&y.re));
    // the double root at 1 is only recoverable to about √ε
    let near = |z: C64, w: C64| (z - w).norm() < DEFAULT_CLUSTER_TOL;
    let both = active.len() == 2 && near(active[0], -ONE) && near(active[1], ONE);
    push("A: active eigenvalues {1, −1}", both, list(&active));
    let cp = char_poly(&am);
    let want = Poly::from_real(&[1.0, -1.0, -1.0, 1.0]);
    push(
        "A: det(λI − A) = λ³ − λ² − λ + 1",
        cp.sub(&want).norm_inf() < 1e-12,
        list(cp.coeffs()),
    );
    let reg = regularity_verdict(&a, &r, &t)?;
    push(
        "A: subdifferentially regular",
        reg == Regularity::Regular,
        format!("{reg:?}"),
    );
    let y = diag(&[0.5, 0.5, 0.0]);
    let rep = rsd_membership(&a, &r, &y, &t)?;
    push("A: Diag(1/2, 1/2, 0) ∈ ∂̂ρ(A)", rep.verdict, failed(&rep));
    let rep = rsd_membership(&a, &r, &identity(3), &t)?;
    push("A: I ∉ ∂̂ρ(A) (θ₂₁ > 0)", !rep.verdict, failed(&rep));
    let mut y = diag(&[0.5, 0.5, 0.0]);
    y[(1, 0)] = C64::new(-1.0, 0.0);
    let rep = rsd_membership(&a, &r, &y, &t)?;
    push("A: Re θ₁₂ < −θ₁₁ rejected", !rep.verdict, failed(&rep));

    let third = identity(3) * C64::new(1.0 / 3.0, 0.0);
    let rep = rsd_membership(&b, &r, &third, &t)?;
    push("B: I/3 ∈ ∂̂ρ(B)", rep.verdict, failed(&rep));
    let mut ok = true;
    let mut detail = String::new();
    for (re, want) in [
        (-1.0 / 3.0, true),
        (0.0, true),
        (2.0, true),
        (-1.0 / 3.0 - 1e-3, false),
    ] {
        let mut y = third.clone();
        y[(1, 0)] = C64::new(re, 0.0);
        let got = rsd_membership(&b, &r, &y, &t)?.verdict;
        ok &= got == want;
        let _ = write!(detail, "Re θ = {re:.4}: {got}; ");
    }
    push(
        "B: I/3 + θE₂₁ member iff Re θ ≥ −1/3",
        ok,
        detail.trim_end_matches("; ").to_string(),
    );
    let m = diag(&[0.0, 0.0, 1.0]);
    let regular = rsd_membership(&b, &r, &m, &t)?;
    let limiting = w_extract(&b, &m, Level::Limiting, &t)?.report;
    push(
        "B: Diag(0, 0, 1) has limiting structure but ∉ ∂̂ρ(B)",
        limiting.verdict && !regular.verdict,
        failed(&regular),
    );
    let mut bad = Vec::new();
    for k in 1..=nu {
        let bk = fixture(&[(ONE, &[2]), (C64::new(1.0 + 1.0 / k as f64, 0.0), &[1])]);
        if !rsd_membership(&bk, &r, &m, &t)?.verdict {
            bad.push(k);
        }
    }
    let w = derogatory_witness(&b, &r, nu, None, &t)?;
    push(
        &format!("B: Diag(0, 0, 1) ∈ ∂̂ρ(B^ν) for ν = 1..{nu}"),
        bad.is_empty() && w.verified,
        if bad.is_empty() {
            format!("witness verified: {}", w.verified)
        } else {
            format!("fails at ν = {bad:?}")
        },
    );
    let reg = regularity_verdict(&b, &r, &t)?;
    push(
        "B: not subdifferentially regular",
        reg == Regularity::NotRegular,
        format!("{reg:?}"),
    );

    let all = checks.iter().all(|c| c.passed);
    let text = if g.json {
        pretty(&json!({ "passed": all, "checks": checks }))
    } else {
        let width = checks
            .iter()
            .map(|c| c.name.chars().count())
            .max()
            .unwrap_or(0);
        let mut s = String::new();
        for (i, c) in checks.iter().enumerate() {
            let pad = width - c.name.chars().count();
            let _ = writeln!(
                s,
                "{:>2}  {}{}  {}  {}",
                i + 1,
                c.name,
                " ".repeat(pad),
                if c.passed { "PASS" } else { "FAIL" },
                c.detail
            );
        }
        let _ = writeln!(
            s,
            "{} of {} checks passed",
            checks.iter().filter(|c| c.passed).count(),
            checks.len()
        );
        s
    };
    emit(g, &text)?;
    Ok(Outcome::from_bool(all))
}

fn list(zs: &[C64]) -> String {
    let parts: Vec<String> = zs
        .iter()
        .map(|z| {
            if z.im == 0.0 {
                format!("{}", z.re)
            } else {
                format!("{}{:+}i", z.re, z.im)
            }
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

fn failed(rep: &MembershipReport) -> String {
    if rep.verdict {
        "member".into()
    } else {
        let names: Vec<&str> = rep
            .failed_conditions
            .iter()
            .map(|c| c.condition.as_str())
            .collect();
        format!("failed: {}", names.join(", "))
    }
}

/// A member of `∂̂φ(X̃)` with uniform weights over the active eigenvalues.
fn sample_member(spec: &JordanSpec, f: Builtin, t: &Tolerances, seed: u64) -> Res<CMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let af = active_factor(spec, &f, t.active)?;
    let k = af.active.len();
    let gamma = vec![1.0 / k as f64; k];
    Ok(match f {
        Builtin::Radius if af.value <= 0.0 => {
            identity(spec.n()) * C64::new(1.0 / spec.n() as f64, 0.0)
        }
        Builtin::Radius => radius_rsd_sample(spec, &gamma, &mut rng, 1.0)?,
        _ => rsd_sample(
            spec,
            &f,
            &gamma,
            &mut rng,
            1.0,
            SampleConvention::Reconciled,
        )?,
    })
}

fn verify(
    g: &Global,
    spec: &JordanSpec,
    f: Builtin,
    y: Option<CMatrix>,
    samples: usize,
) -> Res<Outcome> {
    let t = tolerances(g)?;
    let radii = [1e-2, 1e-3, 1e-4];
    let sampled = y.is_none();
    let y = match y {
        Some(y) => y,
        None => sample_member(spec, f, &t, g.seed)?,
    };
    let member = rsd_membership(spec, &f, &y, &t)?;
    let suite = subgradient_inequality_suite(spec, &f, &y, samples, &radii, g.seed)?;
    let gaps = definition_gap(spec, &f, &y, samples.min(100), &radii, g.seed)?;

    // subderivative formula against quotients along a few seeded directions
    let mut fd = Vec::new();
    let af = active_factor(spec, &f, t.active)?;
    let skipped = if !(spec.all_nonderogatory() && spec.n0() == 0) {
        Some("formula needs nonderogatory eigenvalues and no extra block")
    } else if f == Builtin::Radius && af.value <= 0.0 {
        Some("radius formula needs a positive radius")
    } else {
        None
    };
    if skipped.is_none() {
        let m = spec.eigs().iter().map(EigenBlocks::m).max().unwrap_or(1);
        for k in 0..5 {
            let z = gaussian_direction(spec.n(), g.seed.wrapping_add(1), k);
            let value = matrix_subderivative(spec, &f, &z)?;
            fd.push(fd_phi_quotient_spec(spec, &f, &z, &T_GRID)?.with_formula(
                value,
                Comparison::Upper,
                m,
                0.0,
            ));
        }
    }
    let derogatory = af.active.iter().any(|&j| !spec.eig(j).nonderogatory());
    let witness = if derogatory {
        Some(derogatory_witness(spec, &f, 20, None, &t)?)
    } else {
        None
    };

    let ok = member.verdict
        && suite.violations == 0
        && fd.iter().all(|r| r.verdict == Some(true))
        && witness.as_ref().is_none_or(|w| w.verified);
    let mut out = json!({
        "generator": f.as_str(),
        "y_sampled": sampled,
        "y": specmax::json::matrix_to_rows(&y),
        "membership": member,
        "inequality_suite": suite,
        "definition_gap": { "radii": radii, "gap": gaps },
        "subderivative_checks": fd,
        "subderivative_skipped": skipped,
        "passed": ok,
    });
    if let Some(w) = witness {
        out["witness"] = serde_json::to_value(w).expect("serializable");
    }
    emit(g, &pretty(&out))?;
    Ok(Outcome::from_bool(ok))
}
