use hodge_core::em::{
    analyze, lambda_scale, magnetic_from_electric, monopole_dipole, rebuild, sample_electric_potential,
    sample_magnetic_potential, EmAnalysis, EmModel, ELEMENTARY_CHARGE, PLANCK, SPEED_OF_LIGHT, VACUUM_PERMEABILITY,
};
use hodge_core::mesh::DiscreteForm;
use hodge_core::taxonomy::{random_params, solve_group, to_f64_matrix, GroupLabel, Reality};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::relative;
use crate::{CliError, CliResult, Common, EmPreset, Report};

/// CODATA 2018 fine-structure constant, used as an outside reference for `1/(2α)`.
const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;

/// `value@axes` entries such as `1@01,-2@23`.
pub fn parse_charges(model: &EmModel, text: &str) -> CliResult<Vec<f64>> {
    let mut q = vec![0.0; model.betti()];
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (value, axes) =
            item.split_once('@').ok_or_else(|| CliError::Usage(format!("charge {item:?} is not value@axes")))?;
        let value: f64 = value.parse().map_err(|_| CliError::Usage(format!("bad charge value in {item:?}")))?;
        let axes: Vec<usize> = axes
            .chars()
            .map(|ch| ch.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| CliError::Usage(format!("bad axes in {item:?}")))?;
        q[model.class_index(&axes)?] += value;
    }
    Ok(q)
}

pub fn field(model: &EmModel, preset: EmPreset, q: &[f64]) -> CliResult<DiscreteForm> {
    let grid = model.calc.grid();
    Ok(match preset {
        EmPreset::Topological => model.topological_field(q)?,
        EmPreset::Exact => model.calc.d(&sample_electric_potential(grid)?)?,
        EmPreset::Mixed => rebuild(model, &sample_electric_potential(grid)?, &sample_magnetic_potential(grid)?, q)?,
    })
}

pub fn em_checks(
    report: &mut Report,
    prefix: &str,
    model: &EmModel,
    preset: EmPreset,
    q: &[f64],
    f: &DiscreteForm,
) -> CliResult<EmAnalysis> {
    let out = analyze(model, f)?;
    let mu0c = model.units.mu0_c();
    report.check_flag(format!("{prefix}betti_2_is_6"), out.betti == 6);
    report.check_flag(format!("{prefix}betti_even_and_real"), out.betti % 2 == 0 && out.reality == Reality::Real);
    // charge errors in units of the field's own charge scale
    let q_scale = (f.norm_inf() / mu0c).max(1.0);
    report.check(format!("{prefix}charge_relations"), out.charge_relations.max() / q_scale, 1e-8);
    let want: Vec<f64> = if preset == EmPreset::Exact { vec![0.0; q.len()] } else { q.to_vec() };
    let q_err = out.charges.qm.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    report.check(format!("{prefix}qM_matches_field"), q_err / q_scale, 1e-8);
    if preset == EmPreset::Exact {
        let qe = out.charges.qe.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        report.check(format!("{prefix}qE_vanishes"), qe / q_scale, 1e-8);
        report.check(format!("{prefix}S_d_vanishes"), out.action.quantized_term.abs() / mu0c, 1e-8);
    }
    // S_d against the direct pairing of the harmonic part: (F_h, F_h) = uᵀΛu
    let fh = model.topological_field(&out.charges.qm)?;
    let direct = -model.calc.pairing(&fh, &fh)? / mu0c;
    report.check(
        format!("{prefix}S_d_vs_harmonic_norm"),
        relative(out.action.quantized_term - direct, out.action.quantized_term),
        1e-8,
    );
    report.check(format!("{prefix}action_budget"), out.action.budget_residual, 1e-7);
    report.check(format!("{prefix}maxwell_electric"), out.maxwell.electric, 1e-7);
    report.check(format!("{prefix}maxwell_magnetic"), out.maxwell.magnetic, 1e-7);
    report.check(format!("{prefix}current_continuity"), out.maxwell.continuity, 1e-8);
    report.check(format!("{prefix}reconstruction"), out.reconstruction_error, 1e-7);
    Ok(out)
}

pub fn run(c: &Common, preset: EmPreset, charges: &str, report: &mut Report) -> CliResult<()> {
    let model = EmModel::new(c.grid.unwrap_or(12), c.units())?;
    report.phase("setup");
    let q = parse_charges(&model, charges)?;
    let f = field(&model, preset, &q)?;
    let out = em_checks(report, "", &model, preset, &q, &f)?;
    report.phase("analysis");
    report.matrix("T2", &model.frame.primal.t);
    report.matrix("E2", &model.frame.primal.e);
    report.data("mu0_c", model.units.mu0_c());
    report.data("analysis", &out);
    Ok(())
}

/// Monopole and dipole moments of charges tied by S2.1.1 triples with `m = 2`, `s = 1`.
pub fn monopole_dipole_worst(seed: u64, draws: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let sol = solve_group(2, 1, &random_params(GroupLabel::S211, 1, &mut rng)).expect("S2.1.1 is admissible");
        let t = to_f64_matrix(&sol.t);
        let qe = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let r = monopole_dipole(magnetic_from_electric(&t, qe), qe);
        let scale = qe.iter().chain(t.iter().flatten()).fold(1.0f64, |a, b| a.max(b.abs()));
        worst = worst.max(r.residual.abs() / (scale * scale).max(1.0));
    }
    worst
}

pub fn lambda_scale_error() -> CliResult<(f64, f64)> {
    let v = lambda_scale(PLANCK, ELEMENTARY_CHARGE, VACUUM_PERMEABILITY, SPEED_OF_LIGHT)?;
    Ok((v, (v - 0.5 / FINE_STRUCTURE).abs() * 2.0 * FINE_STRUCTURE))
}

/// The `verify em` battery.
pub fn battery(c: &Common, report: &mut Report) -> CliResult<()> {
    let model = EmModel::new(c.grid.unwrap_or(12), c.units())?;
    report.phase("setup");
    let mut q = vec![0.0; model.betti()];
    q[model.class_index(&[0, 1])?] = 1.0;
    for (label, preset) in
        [("topological/", EmPreset::Topological), ("exact/", EmPreset::Exact), ("mixed/", EmPreset::Mixed)]
    {
        let f = field(&model, preset, &q)?;
        em_checks(report, label, &model, preset, &q, &f)?;
        report.phase(label.trim_end_matches('/'));
    }
    report.check("monopole_dipole", monopole_dipole_worst(c.seed, 100), 1e-12);
    let (v, rel) = lambda_scale_error()?;
    report.data("lambda_scale", v);
    report.check("lambda_scale_vs_fine_structure", rel, 1e-3);
    Ok(())
}
