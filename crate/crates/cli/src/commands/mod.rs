pub mod decompose;
pub mod em;
pub mod taxonomy;
pub mod torus2;
pub mod verify;

use hodge_core::calculus::ExteriorCalculus;
use hodge_core::cohomology::{BasisOptions, DualityFrame, IdentityResiduals};
use hodge_core::mesh::{GridSpec, PeriodicGrid};
use hodge_core::taxonomy::Mat2;
use nalgebra::DMatrix;

use crate::{Common, Report};

pub(crate) fn calculus(spec: GridSpec) -> hodge_core::Result<ExteriorCalculus> {
    Ok(ExteriorCalculus::new(PeriodicGrid::new(spec)?))
}

/// Flat or embedded 2-torus according to `--metric`, `--R`, `--r`.
pub(crate) fn torus2_spec(c: &Common, n: usize, embedded: bool) -> GridSpec {
    if embedded {
        let (big, small) = c.radii();
        GridSpec::embedded_torus(n, big, small)
    } else {
        GridSpec::flat(&[n, n])
    }
}

pub(crate) fn frame(calc: &ExteriorCalculus, p: usize) -> hodge_core::Result<DualityFrame> {
    DualityFrame::build(calc, p, &BasisOptions::default())
}

pub(crate) fn to_mat2(m: &DMatrix<f64>) -> Option<Mat2<f64>> {
    (m.shape() == (2, 2)).then(|| [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]])
}

pub(crate) fn max_abs_diff(m: &DMatrix<f64>, want: &[[f64; 2]; 2]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((m[(i, j)] - want[i][j]).abs());
        }
    }
    worst
}

pub(crate) fn identity_checks(report: &mut Report, prefix: &str, r: &IdentityResiduals, tol: f64) {
    report.check(format!("{prefix}/T_product"), r.product, tol);
    report.check(format!("{prefix}/E_Tt_equals_Lambda"), r.gram, tol);
    report.check(format!("{prefix}/Lambda_Einv_Lambda"), r.constraint, tol);
    report.check(format!("{prefix}/E_transpose"), r.transpose, tol);
    report.check(format!("{prefix}/Lambda_symmetric"), r.symmetry, tol);
    report.check(format!("{prefix}/reality_det"), r.reality, tol);
}

pub(crate) fn relative(x: f64, scale: f64) -> f64 {
    x / scale.abs().max(1.0)
}
