use hodge_core::calculus::{ExteriorCalculus, GreenOptions};
use hodge_core::cohomology::DualityFrame;
use hodge_core::decompose::{
    cross_relation_check, dual_decompose, hodge_decompose, norm_decompose, DecompositionSummary, NormBreakdown,
};
use hodge_core::mesh::{integrate_cycle, random_trig_form, DiscreteForm, GridSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{calculus, frame, relative, torus2_spec};
use crate::{CliResult, Common, DecomposePreset, Report};

/// Worst-case residuals over one or more decomposed forms.
#[derive(Serialize, Clone, Copy, Debug, Default)]
pub struct Metrics {
    pub reconstruction: f64,
    pub residue: f64,
    pub gauge: f64,
    /// Class functional applied to `dα`.
    pub class_exact: f64,
    /// Class functional applied to `δβ`.
    pub class_coexact: f64,
    /// Literal cycle integrals of `dα`.
    pub cycle_exact: f64,
    pub budget: f64,
    pub cross_relation: f64,
    pub middle_variant: f64,
}

impl Metrics {
    fn merge(self, o: Metrics) -> Metrics {
        Metrics {
            reconstruction: self.reconstruction.max(o.reconstruction),
            residue: self.residue.max(o.residue),
            gauge: self.gauge.max(o.gauge),
            class_exact: self.class_exact.max(o.class_exact),
            class_coexact: self.class_coexact.max(o.class_coexact),
            cycle_exact: self.cycle_exact.max(o.cycle_exact),
            budget: self.budget.max(o.budget),
            cross_relation: self.cross_relation.max(o.cross_relation),
            middle_variant: self.middle_variant.max(o.middle_variant),
        }
    }

    fn emit(&self, report: &mut Report, prefix: &str, loose: bool) {
        let (solve, exact) = if loose { (1e-6, 1e-8) } else { (1e-8, 1e-10) };
        report.check(format!("{prefix}/reconstruction"), self.reconstruction, solve);
        report.check(format!("{prefix}/residue"), self.residue, solve);
        report.check(format!("{prefix}/gauge"), self.gauge, solve);
        report.check(format!("{prefix}/class_of_exact"), self.class_exact, exact);
        report.check(format!("{prefix}/class_of_coexact"), self.class_coexact, exact);
        report.check(format!("{prefix}/cycle_of_exact"), self.cycle_exact, exact);
        report.check(format!("{prefix}/norm_budget"), self.budget, solve);
        report.check(format!("{prefix}/cross_relation"), self.cross_relation, solve);
        report.check(format!("{prefix}/middle_variant"), self.middle_variant, solve);
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct Outcome {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub norm: NormBreakdown,
    pub decomposition: DecompositionSummary,
    #[serde(skip)]
    pub metrics: Metrics,
}

pub fn analyze(calc: &ExteriorCalculus, f: &DualityFrame, phi: &DiscreteForm) -> CliResult<Outcome> {
    let dec = hodge_decompose(calc, phi, f, &GreenOptions::default())?;
    let v = dual_decompose(calc, phi, f)?;
    let norm = norm_decompose(calc, phi, &dec, &v, f)?;
    let scale = phi.norm_inf();
    let (basis, _, _) = f.side(phi.degree())?;
    let (triple, other) = if phi.degree() == f.basis_p.degree { (&f.primal, &f.dual) } else { (&f.dual, &f.primal) };
    let signs = calc.signs(phi.degree());
    let middle = 2 * phi.degree() == calc.dim();
    let cross = cross_relation_check(&dec.u, &v, &triple.t, &other.t, signs.d_odd(), middle)?;
    let sup = |xs: Vec<f64>| xs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let cycle_exact =
        sup(basis.cycles.iter().map(|z| integrate_cycle(&dec.exact, z, calc.grid())).collect::<Result<_, _>>()?);
    let metrics = Metrics {
        reconstruction: dec.reconstruction_error,
        residue: dec.residue_norm,
        gauge: dec.gauge_alpha.max(dec.gauge_beta),
        class_exact: relative(sup(f.class_coefficients(calc, &dec.exact)?), scale),
        class_coexact: relative(sup(f.class_coefficients(calc, &dec.coexact)?), scale),
        cycle_exact: relative(cycle_exact, scale),
        budget: norm.closure(),
        cross_relation: relative(cross.max(), scale),
        middle_variant: relative(norm.variant_consistency.unwrap_or(0.0), norm.direct_norm),
    };
    Ok(Outcome { u: dec.u.clone(), v, norm, decomposition: dec.summary(), metrics })
}

/// `3γ₁ + 4γ₂`, optionally with `d cos(x + 2y)` and `δ(sin(2x − y) dx∧dy)` added.
fn three_four(calc: &ExteriorCalculus, f: &DualityFrame, mixed: bool) -> CliResult<DiscreteForm> {
    let mut phi = f.basis_p.combine(&[3.0, 4.0])?;
    if mixed {
        let grid = calc.grid();
        let s = DiscreteForm::scalar(grid, grid.sample(|x| (x[0] + 2.0 * x[1]).cos()))?;
        let w = DiscreteForm::from_fn(grid, 2, |_, x| (2.0 * x[0] - x[1]).sin())?;
        phi.axpy(1.0, &calc.d(&s)?);
        phi.axpy(1.0, &calc.delta(&w)?);
    }
    Ok(phi)
}

fn three_four_checks(report: &mut Report, prefix: &str, out: &Outcome, pure: bool, flat: bool) {
    let tol = if flat { 1e-10 } else { 1e-6 };
    let u_err = (out.u[0] - 3.0).abs().max((out.u[1] - 4.0).abs());
    report.check(format!("{prefix}/u_equals_3_4"), u_err, tol);
    if flat {
        let v_err = (out.v[0] + 4.0).abs().max((out.v[1] - 3.0).abs());
        report.check(format!("{prefix}/v_equals_-4_3"), v_err, tol);
        report.check(format!("{prefix}/topological_term_25"), (out.norm.topological_term - 25.0).abs(), tol);
    }
    if pure {
        let direct = out.norm.direct_norm;
        report.check(
            format!("{prefix}/topological_equals_direct"),
            relative(out.norm.topological_term - direct, direct),
            tol,
        );
    }
}

fn single(
    report: &mut Report,
    prefix: &str,
    calc: &ExteriorCalculus,
    f: &DualityFrame,
    phi: &DiscreteForm,
    loose: bool,
) -> CliResult<Outcome> {
    let out = analyze(calc, f, phi)?;
    out.metrics.emit(report, prefix, loose);
    Ok(out)
}

fn random_batch(
    report: &mut Report,
    prefix: &str,
    calc: &ExteriorCalculus,
    f: &DualityFrame,
    samples: usize,
    seed: u64,
    loose: bool,
) -> CliResult<Vec<Outcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Metrics::default();
    let mut outs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let phi = random_trig_form(calc.grid(), 1, 4, 3, &mut rng)?;
        let out = analyze(calc, f, &phi)?;
        worst = worst.merge(out.metrics);
        outs.push(out);
    }
    worst.emit(report, prefix, loose);
    Ok(outs)
}

pub fn run(c: &Common, preset: DecomposePreset, samples: usize, report: &mut Report) -> CliResult<()> {
    match preset {
        DecomposePreset::HarmonicT2 | DecomposePreset::MixedT2 => {
            let calc = calculus(GridSpec::flat(&[c.grid.unwrap_or(64); 2]))?;
            let f = frame(&calc, 1)?;
            let pure = preset == DecomposePreset::HarmonicT2;
            let out = single(report, "T2", &calc, &f, &three_four(&calc, &f, !pure)?, false)?;
            three_four_checks(report, "T2", &out, pure, true);
            report.data("result", &out);
        }
        DecomposePreset::Embedded => {
            let calc = calculus(torus2_spec(c, c.grid.unwrap_or(64), true))?;
            let f = frame(&calc, 1)?;
            let out = single(report, "embedded", &calc, &f, &three_four(&calc, &f, true)?, true)?;
            three_four_checks(report, "embedded", &out, false, false);
            report.data("result", &out);
        }
        DecomposePreset::RandomT2 => {
            let calc = calculus(torus2_spec(c, c.grid.unwrap_or(64), c.embedded()))?;
            let f = frame(&calc, 1)?;
            let outs = random_batch(report, "T2/random", &calc, &f, samples, c.seed, c.embedded())?;
            report.data("samples", &outs);
        }
        DecomposePreset::T3 => {
            let calc = calculus(GridSpec::flat(&[c.grid.unwrap_or(24); 3]))?;
            let f = frame(&calc, 1)?;
            let outs = random_batch(report, "T3/random", &calc, &f, samples, c.seed, false)?;
            report.data("samples", &outs);
        }
    }
    report.phase("decompose");
    Ok(())
}

/// The `verify decompose` battery.
pub fn battery(c: &Common, report: &mut Report) -> CliResult<()> {
    let n = c.grid.unwrap_or(64);
    let calc = calculus(GridSpec::flat(&[n, n]))?;
    let f = frame(&calc, 1)?;
    let out = single(report, "T2/harmonic", &calc, &f, &three_four(&calc, &f, false)?, false)?;
    three_four_checks(report, "T2/harmonic", &out, true, true);
    let out = single(report, "T2/mixed", &calc, &f, &three_four(&calc, &f, true)?, false)?;
    three_four_checks(report, "T2/mixed", &out, false, true);
    random_batch(report, "T2/random", &calc, &f, 10, c.seed, false)?;
    report.phase("T2");
    let calc = calculus(GridSpec::flat(&[n.min(16); 3]))?;
    let f = frame(&calc, 1)?;
    random_batch(report, "T3/random", &calc, &f, 5, c.seed, false)?;
    report.phase("T3");
    Ok(())
}
