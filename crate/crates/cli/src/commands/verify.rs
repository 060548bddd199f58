use hodge_core::calculus::ExteriorCalculus;
use hodge_core::mesh::{random_trig_form, GridSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{calculus, frame, identity_checks, torus2_spec};
use crate::{CliResult, Common, Report, Suite};

pub fn run(c: &Common, suite: Suite, report: &mut Report) -> CliResult<()> {
    match suite {
        Suite::Core => core(c, report),
        Suite::Cohomology => cohomology(c, report),
        Suite::Decompose => super::decompose::battery(c, report),
        Suite::Em => super::em::battery(c, report),
    }
}

/// ★★ sign, adjointness of d and δ, dd = 0 and δδ = 0 on random forms.
fn core(c: &Common, report: &mut Report) -> CliResult<()> {
    let n = c.grid.unwrap_or(64);
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let cases = [
        ("T2", torus2_spec(c, n, c.embedded())),
        ("T3", GridSpec::flat(&[n.min(16); 3])),
        ("M4", GridSpec::minkowski(n.min(8))),
    ];
    for (label, spec) in cases {
        let calc = calculus(spec)?;
        operator_checks(&calc, label, &mut rng, report)?;
        report.phase(label);
    }
    Ok(())
}

fn operator_checks(calc: &ExteriorCalculus, label: &str, rng: &mut ChaCha8Rng, report: &mut Report) -> CliResult<()> {
    let n = calc.dim();
    let grid = calc.grid();
    for p in 0..=n {
        let phi = random_trig_form(grid, p, 3, 2, rng)?;
        let scale = phi.norm_inf();
        let mut ss = calc.star(&calc.star(&phi)?)?;
        ss.axpy(-calc.signs(p).d_sign(), &phi);
        report.check(format!("{label}/star_star/p={p}"), ss.norm_inf() / scale, 1e-12);
        if p < n {
            let psi = random_trig_form(grid, p + 1, 3, 2, rng)?;
            let lhs = calc.pairing(&calc.d(&phi)?, &psi)?;
            let rhs = calc.pairing(&phi, &calc.delta(&psi)?)?;
            report.check(format!("{label}/adjoint/p={p}"), (lhs - rhs).abs() / lhs.abs().max(1.0), 1e-10);
        }
        if p + 2 <= n {
            report.check(format!("{label}/dd/p={p}"), calc.d(&calc.d(&phi)?)?.norm_inf() / scale, 1e-10);
        }
        if p >= 2 {
            report.check(
                format!("{label}/deltadelta/p={p}"),
                calc.delta(&calc.delta(&phi)?)?.norm_inf() / scale,
                1e-10,
            );
        }
    }
    Ok(())
}

/// Matrix identities on the 2-torus selected by `--metric`, then on flat T³, T⁴
/// and the Minkowski 4-torus.
fn cohomology(c: &Common, report: &mut Report) -> CliResult<()> {
    let n = c.grid.unwrap_or(64);
    super::torus2::torus2_checks(c, n, c.embedded(), report)?;
    report.phase("T2");
    let cases = [
        ("T3", GridSpec::flat(&[n.min(16); 3]), 1),
        ("T4", GridSpec::flat(&[n.min(8); 4]), 1),
        ("T4", GridSpec::flat(&[n.min(8); 4]), 2),
        ("M4", GridSpec::minkowski(n.min(8)), 1),
        ("M4", GridSpec::minkowski(n.min(8)), 2),
    ];
    for (label, spec, p) in cases {
        let calc = calculus(spec)?;
        let f = frame(&calc, p)?;
        identity_checks(report, &format!("{label}/p={p}"), &f.verify()?, 1e-10);
        report.check(format!("{label}/p={p}/normalization"), f.basis_p.normalization_residual, 1e-10);
        report.check(format!("{label}/p={p}/expansion"), f.expansion_residual, 1e-10);
        report.phase(&format!("{label}/p={p}"));
    }
    Ok(())
}
