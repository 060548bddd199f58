//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use hodge_cli::commands::decompose::analyze;
use hodge_cli::run_args;
use hodge_core::calculus::ExteriorCalculus;
use hodge_core::cohomology::{BasisOptions, DualityFrame};
use hodge_core::decompose::{dual_decompose, hodge_decompose, norm_decompose};
use hodge_core::em::{analyze as em_analyze, lambda_scale, monopole_dipole, EmModel, Units};
use hodge_core::mesh::{random_trig_form, GridSpec, PeriodicGrid};
use hodge_core::taxonomy::{
    admissible_groups, inverse, random_params, solve_group, to_f64_matrix, GroupLabel, GroupParams, Scalar,
};
use hodge_core::Error;
use num::rational::BigRational;
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{name} = {got:.12e}, want {want:.12e} ± {tol:.0e}"))
}

fn below(name: &str, residual: f64, tol: f64) -> Result<(), String> {
    ensure(residual <= tol, || format!("{name} residual {residual:.3e} > {tol:.0e}"))
}

fn matrix_within(name: &str, m: &[Vec<f64>], want: [[f64; 2]; 2], tol: f64) -> Result<(), String> {
    for i in 0..2 {
        for j in 0..2 {
            within(&format!("{name}[{i}][{j}]"), m[i][j], want[i][j], tol)?;
        }
    }
    Ok(())
}

fn in_time(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.1?}, limit {limit:?}"))
}

fn calc(spec: GridSpec) -> ExteriorCalculus {
    ExteriorCalculus::new(PeriodicGrid::new(spec).expect("valid grid"))
}

fn frame(c: &ExteriorCalculus, p: usize) -> Result<DualityFrame, String> {
    DualityFrame::build(c, p, &BasisOptions::default()).map_err(|e| e.to_string())
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn transpose(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    vec![vec![a[0][0], a[1][0]], vec![a[0][1], a[1][1]]]
}

fn rows(m: [[f64; 2]; 2]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.to_vec()).collect()
}

fn two_torus_flat() -> Outcome {
    let start = Instant::now();
    let r = run_args(["hodge", "torus2", "--mode", "flat", "--grid", "128"]).map_err(|e| e.to_string())?;
    in_time(Duration::from_secs(5), start)?;
    let tol = 1e-10;
    let j = [[0.0, 1.0], [-1.0, 0.0]];
    let (e, t, l) = (&r.matrices["E"], &r.matrices["T"], &r.matrices["Lambda"]);
    matrix_within("E", e, j, tol)?;
    matrix_within("T", t, j, tol)?;
    matrix_within("Lambda", l, [[1.0, 0.0], [0.0, 1.0]], tol)?;
    matrix_within("T·T", &rows(mat_mul(t, t)), [[-1.0, 0.0], [0.0, -1.0]], tol)?;
    matrix_within("E·Tᵀ", &rows(mat_mul(e, &transpose(t))), [[1.0, 0.0], [0.0, 1.0]], tol)?;
    for c in r.checks.iter().filter(|c| c.name.starts_with("T2/") && c.tolerance > 0.0) {
        below(&c.name, c.residual, tol.max(c.tolerance.min(tol)))?;
    }
    ensure(r.data["group"] == "S2.1.3", || format!("group {}", r.data["group"]))?;
    Ok(format!("group S2.1.3, {} residuals ≤ 1e-10", r.checks.len()))
}

fn embedded_torus() -> Outcome {
    // independent quadrature of ∫₀^{2π} dv/(R + r cos v); the trapezoid rule is spectrally exact here
    let (big, small) = (2.0f64, 1.0f64);
    let m = 4096;
    let k: f64 =
        (0..m).map(|i| 1.0 / (big + small * (2.0 * PI * i as f64 / m as f64).cos())).sum::<f64>() * 2.0 * PI / m as f64;
    let tau12 = small * k / (2.0 * PI);
    let tau21 = -2.0 * PI / (small * k);

    let start = Instant::now();
    let r = run_args(["hodge", "torus2", "--mode", "embedded", "--R", "2", "--r", "1", "--grid", "256"])
        .map_err(|e| e.to_string())?;
    in_time(Duration::from_secs(30), start)?;
    let tol = 1e-5;
    let t = &r.matrices["T"];
    within("tau12 vs 1/√3", tau12, 1.0 / 3f64.sqrt(), 1e-12)?;
    within("tau12", t[0][1], tau12, tol)?;
    within("tau21", t[1][0], tau21, tol)?;
    matrix_within("Lambda", &r.matrices["Lambda"], [[tau12, 0.0], [0.0, -tau21]], tol)?;
    for name in ["T2/T_product", "T2/E_Tt_equals_Lambda", "T2/Lambda_Einv_Lambda"] {
        let c = r.find(name).ok_or_else(|| format!("missing check {name}"))?;
        below(name, c.residual, tol)?;
    }
    Ok(format!("tau12 = {:.8}, tau21 = {:.8} in {:.1?}", t[0][1], t[1][0], start.elapsed()))
}

fn decomposition_round_trip() -> Outcome {
    let start = Instant::now();
    let c = calc(GridSpec::flat(&[64, 64]));
    let f = frame(&c, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..50 {
        let phi = random_trig_form(c.grid(), 1, 4, 3, &mut rng).map_err(|e| e.to_string())?;
        let m = analyze(&c, &f, &phi).map_err(|e| e.to_string())?.metrics;
        let tag = |s: &str| format!("form {i} {s}");
        below(&tag("reconstruction"), m.reconstruction, 1e-8)?;
        below(&tag("residue"), m.residue, 1e-8)?;
        below(&tag("gauge"), m.gauge, 1e-8)?;
        below(&tag("class of dα"), m.class_exact, 1e-10)?;
        below(&tag("class of δβ"), m.class_coexact, 1e-10)?;
        below(&tag("cycle integral of dα"), m.cycle_exact, 1e-10)?;
    }
    in_time(Duration::from_secs(60), start)?;
    Ok(format!("50 forms in {:.1?}", start.elapsed()))
}

fn quantized_norm() -> Outcome {
    let c = calc(GridSpec::flat(&[64, 64]));
    let f = frame(&c, 1)?;
    let budget = |phi: &hodge_core::mesh::DiscreteForm| -> Result<_, Error> {
        let dec = hodge_decompose(&c, phi, &f, &Default::default())?;
        let v = dual_decompose(&c, phi, &f)?;
        norm_decompose(&c, phi, &dec, &v, &f)
    };
    let phi = f.basis_p.combine(&[3.0, 4.0]).map_err(|e| e.to_string())?;
    let nb = budget(&phi).map_err(|e| e.to_string())?;
    within("topological term", nb.topological_term, 25.0, 1e-10)?;
    within("direct (φ,φ)", nb.direct_norm, 25.0, 1e-10)?;

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut phi = random_trig_form(c.grid(), 1, 4, 3, &mut rng).map_err(|e| e.to_string())?;
        let u = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        phi.axpy(1.0, &f.basis_p.combine(&u).map_err(|e| e.to_string())?);
        let nb = budget(&phi).map_err(|e| e.to_string())?;
        worst = worst.max((nb.total - nb.direct_norm).abs() / nb.direct_norm.abs().max(1.0));
    }
    below("normalized |budget − direct|", worst, 1e-8)?;
    Ok(format!("25 = 25, worst budget gap {worst:.1e} over 50 forms"))
}

fn identity_battery() -> Outcome {
    let cases: [(&str, GridSpec, usize, f64); 5] = [
        ("flat T2", GridSpec::flat(&[64, 64]), 1, 1e-10),
        ("embedded T2", GridSpec::embedded_torus(128, 2.0, 1.0), 1, 1e-5),
        ("T3", GridSpec::flat(&[16, 16, 16]), 1, 1e-10),
        ("T4", GridSpec::flat(&[8, 8, 8, 8]), 1, 1e-10),
        ("T4", GridSpec::flat(&[8, 8, 8, 8]), 2, 1e-10),
    ];
    let mut worst: f64 = 0.0;
    for (label, spec, p, tol) in cases {
        let c = calc(spec);
        let r = frame(&c, p)?.verify().map_err(|e| e.to_string())?;
        let tag = |s: &str| format!("{label} p={p} {s}");
        below(&tag("T·T"), r.product, tol)?;
        below(&tag("E·Tᵀ = Λ"), r.gram, tol)?;
        below(&tag("ΛE⁻¹Λ"), r.constraint, tol)?;
        below(&tag("E transpose"), r.transpose, tol)?;
        worst = worst.max(r.max() / tol);
    }
    Ok(format!("5 frames, worst residual {worst:.1e} of tolerance"))
}

/// Rejects every group outside the admissible set for `(m, s)`.
fn infeasible_rejected(m: usize, s: usize) -> Result<(), String> {
    let one = BigRational::from_int(1);
    for g in GroupLabel::ALL.into_iter().filter(|g| !admissible_groups(m, s).contains(g)) {
        let params = match g {
            GroupLabel::S211 => GroupParams::S211 { e12: one.clone(), l11: one.clone() },
            GroupLabel::S212 => GroupParams::S212 { e12: one.clone(), sign: 1 },
            GroupLabel::S213 => GroupParams::S213 { e12: one.clone(), l11: one.clone(), l12: one.clone() },
            GroupLabel::S221 => GroupParams::S221 { e11: one.clone(), e22: one.clone(), sign1: 1, sign2: 1 },
            GroupLabel::S222 => GroupParams::S222 { e11: one.clone(), e22: -one.clone(), l12: one.clone(), sign: 1 },
        };
        ensure(matches!(solve_group(m, s, &params), Err(Error::Infeasible(_))), || {
            format!("{g} accepted for m = {m}, s = {s}")
        })?;
    }
    Ok(())
}

fn taxonomy_conformance() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut cells = 0;
    for m in [1, 2] {
        for s in [0, 1] {
            for g in admissible_groups(m, s) {
                cells += 1;
                for _ in 0..100 {
                    let params = random_params(g, s, &mut rng);
                    let exact = solve_group(m, s, &params).map_err(|e| e.to_string())?;
                    ensure(exact.residuals.max().is_zero(), || format!("{g} m={m} s={s}: {:?}", exact.residuals))?;
                    let det = exact.det_t.to_f64();
                    match g.expected_det(s) {
                        Some(d) => within(&format!("{g} det T"), det, f64::from(d), 0.0)?,
                        None => within(&format!("{g} |det T|"), det.abs(), 1.0, 0.0)?,
                    }
                    let float = solve_group(m, s, &params.map(Scalar::to_f64)).map_err(|e| e.to_string())?;
                    // relative to the cube of the largest entry, since ΛE⁻¹Λ is a triple product
                    let e_inv = inverse(&float.e).ok_or("singular E")?;
                    let scale = [float.e, float.t, float.lambda, e_inv]
                        .iter()
                        .flatten()
                        .flatten()
                        .fold(1.0f64, |a, b| a.max(b.abs()));
                    below(&format!("{g} float identities"), float.residuals.max() / scale.powi(3), 1e-12)?;
                }
            }
            infeasible_rejected(m, s)?;
        }
    }
    in_time(Duration::from_secs(5), start)?;
    Ok(format!("{cells} cells × 100 draws exact, infeasible cells rejected"))
}

fn em_demo() -> Outcome {
    let start = Instant::now();
    let model = EmModel::new(12, Units::natural()).map_err(|e| e.to_string())?;
    ensure(model.betti() == 6, || format!("β₂ = {}", model.betti()))?;
    let i01 = model.class_index(&[0, 1]).map_err(|e| e.to_string())?;
    let i23 = model.class_index(&[2, 3]).map_err(|e| e.to_string())?;
    let mut q = vec![0.0; 6];
    q[i01] = 1.0;
    let f = model.topological_field(&q).map_err(|e| e.to_string())?;
    let out = em_analyze(&model, &f).map_err(|e| e.to_string())?;
    for a in 0..6 {
        within(&format!("qM[{a}]"), out.charges.qm[a], if a == i01 { 1.0 } else { 0.0 }, 1e-8)?;
        within(&format!("qE[{a}]"), out.charges.qe[a], if a == i23 { -1.0 } else { 0.0 }, 1e-8)?;
    }
    let quad = out.charge_relations.quadrature.ok_or("no quadrature identity for odd D")?;
    below("charge quadrature", quad, 1e-8)?;
    within("S_d", out.action.quantized_term, 1.0, 1e-7)?;
    below("Maxwell d★F", out.maxwell.electric, 1e-7)?;
    below("Maxwell dF", out.maxwell.magnetic, 1e-7)?;
    ensure(out.betti % 2 == 0 && out.reality == hodge_core::taxonomy::Reality::Real, || {
        format!("β₂ = {} with reality {:?}", out.betti, out.reality)
    })?;
    in_time(Duration::from_secs(120), start)?;
    Ok(format!("S_d = {:.12}, β₂ = 6 real, {:.1?}", out.action.quantized_term, start.elapsed()))
}

fn monopole_dipole_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let sol = solve_group(2, 1, &random_params(GroupLabel::S211, 1, &mut rng)).map_err(|e| e.to_string())?;
        let (e12, l1, l2) = (sol.e[0][1].to_f64(), sol.lambda[0][0].to_f64(), sol.lambda[1][1].to_f64());
        let qe = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        // qᴹ = −(1/ε₁₂) antidiag(λ₂, λ₁) qᴱ
        let qm = [-l2 * qe[1] / e12, -l1 * qe[0] / e12];
        let via_t = hodge_core::em::magnetic_from_electric(&to_f64_matrix(&sol.t), qe);
        below("relation through T", (via_t[0] - qm[0]).abs().max((via_t[1] - qm[1]).abs()), 1e-12)?;
        let scale = qe.iter().chain(qm.iter()).fold(1.0f64, |a, b| a.max(b.abs()));
        worst = worst.max(monopole_dipole(qm, qe).residual.abs() / (scale * scale));
    }
    below("(mᴹ)² − (dᴹ)² + (mᴱ)² − (dᴱ)², relative", worst, 1e-12)?;
    Ok(format!("100 draws, worst {worst:.1e}"))
}

fn lambda_scale_arithmetic() -> Outcome {
    let (h, e, mu0, c) = (6.62607015e-34, 1.602176634e-19, 1.25663706212e-6, 2.99792458e8);
    let oracle = h / (mu0 * c * e * e);
    let got = lambda_scale(h, e, mu0, c).map_err(|e| e.to_string())?;
    within("lambda_scale vs direct arithmetic", got, oracle, 1e-12 * oracle)?;
    below("relative distance to 68.518", (got - 68.518).abs() / 68.518, 1e-3)?;
    Ok(format!("lambda = {got:.6}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("2-torus reproduction, flat mode", two_torus_flat),
        ("embedded-torus matrices", embedded_torus),
        ("Hodge decomposition round trip", decomposition_round_trip),
        ("quantized norm", quantized_norm),
        ("matrix-identity battery", identity_battery),
        ("taxonomy conformance", taxonomy_conformance),
        ("EM demo on the Minkowski 4-torus", em_demo),
        ("monopole-dipole identity", monopole_dipole_identity),
        ("lambda-scale arithmetic", lambda_scale_arithmetic),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
