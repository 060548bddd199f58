use hodge_core::cohomology::orthogonal_corollary_residual;
use hodge_core::taxonomy::{classify, GroupLabel};

use super::{calculus, frame, identity_checks, max_abs_diff, to_mat2, torus2_spec};
use crate::{CliResult, Common, Report, TorusMode};

pub fn run(c: &Common, mode: TorusMode, report: &mut Report) -> CliResult<()> {
    torus2_checks(c, c.grid.unwrap_or(128), mode == TorusMode::Embedded, report)
}

/// Closed-form matrices. For the embedded torus the `dv` class density is
/// `√(R²−r²) / (2π (R + r cos v))`, which gives `τ₁₂ = r/√(R²−r²)`.
fn expected(c: &Common, embedded: bool) -> ([[f64; 2]; 2], [[f64; 2]; 2], [[f64; 2]; 2]) {
    let k = if embedded {
        let (big, small) = c.radii();
        small / (big * big - small * small).sqrt()
    } else {
        1.0
    };
    let e = [[0.0, 1.0], [-1.0, 0.0]];
    let t = [[0.0, k], [-1.0 / k, 0.0]];
    let lambda = [[k, 0.0], [0.0, 1.0 / k]];
    (e, t, lambda)
}

pub(crate) fn torus2_checks(c: &Common, n: usize, embedded: bool, report: &mut Report) -> CliResult<()> {
    let calc = calculus(torus2_spec(c, n, embedded))?;
    let f = frame(&calc, 1)?;
    let tri = &f.primal;
    report.matrix("E", &tri.e);
    report.matrix("T", &tri.t);
    report.matrix("Lambda", &tri.lambda);
    report.data("P", &tri.p);
    report.data("tau12", tri.t[(0, 1)]);
    report.data("tau21", tri.t[(1, 0)]);

    let tol = if embedded { 1e-5 } else { 1e-10 };
    identity_checks(report, "T2", &f.verify()?, tol);
    report.check("T2/normalization", f.basis_p.normalization_residual, 1e-10);
    report.check("T2/closure", f.basis_p.closure_residual, 1e-10);
    report.check("T2/coclosure", f.basis_p.coclosure_residual, 1e-8);
    let (e, t, lambda) = expected(c, embedded);
    report.check("T2/E_closed_form", max_abs_diff(&tri.e, &e), tol);
    report.check("T2/T_closed_form", max_abs_diff(&tri.t, &t), tol);
    report.check("T2/Lambda_closed_form", max_abs_diff(&tri.lambda, &lambda), tol);
    if let Some(r) = orthogonal_corollary_residual(&f, &calc, 1e-8)? {
        report.check("T2/orthogonal_corollary", r, 1e-6);
    }

    let group = match (to_mat2(&tri.e), to_mat2(&tri.t)) {
        (Some(e), Some(t)) => classify(&e, &t, 1, 0, 1e-8),
        _ => None,
    };
    report.data("group", group);
    report.check_flag("T2/group_S2.1.3", group == Some(GroupLabel::S213));
    Ok(())
}
