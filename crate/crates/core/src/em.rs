//! Electromagnetism on a Minkowskian 4-torus.
//!
//! Axis 0 is time with `η = diag(−1, 1, 1, 1)`. The field 2-form carries
//! `F₀ᵢ = −Eᵢ/c`, `F₁₂ = B₃`, `F₁₃ = −B₂`, `F₂₃ = B₁`. Currents follow
//! `δF = μ₀ Jᴱ` and `δ★F = −μ₀ Jᴹ`, and the field splits as
//! `F = dAᴱ − ★dAᴹ + μ₀c Σ qᴹ_a γ_a`.

use serde::Serialize;

use crate::calculus::{ExteriorCalculus, GreenOptions};
use crate::cohomology::{BasisOptions, DualityFrame};
use crate::decompose::{cross_relation_check, hodge_decompose, middle_potential, CrossRelation, DecompositionSummary};
use crate::error::{Error, Result};
use crate::mesh::{DiscreteForm, GridSpec, PeriodicGrid};
use crate::taxonomy::{reality_rule, Mat2, Reality};

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

#[derive(Serialize, Clone, Copy, Debug, PartialEq)]
pub struct Units {
    pub mu0: f64,
    pub c: f64,
}

impl Units {
    pub fn si() -> Self {
        Self { mu0: VACUUM_PERMEABILITY, c: SPEED_OF_LIGHT }
    }

    /// `μ₀ = c = 1`.
    pub fn natural() -> Self {
        Self { mu0: 1.0, c: 1.0 }
    }

    pub fn mu0_c(&self) -> f64 {
        self.mu0 * self.c
    }

    fn validate(&self) -> Result<()> {
        if self.mu0 > 0.0 && self.c > 0.0 && self.mu0.is_finite() && self.c.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("mu0 and c must be positive, got {} and {}", self.mu0, self.c)))
        }
    }
}

impl Default for Units {
    fn default() -> Self {
        Self::si()
    }
}

fn check_minkowski(grid: &PeriodicGrid) -> Result<()> {
    let ok = grid.dim() == 4
        && grid.signature(0) < 0.0
        && (1..4).all(|a| grid.signature(a) > 0.0)
        && grid.is_constant_metric();
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidGrid("electromagnetism needs a flat 4-torus with signature (-,+,+,+)".into()))
    }
}

/// Places `E` and `B` into the field 2-form.
pub fn assemble_f(grid: &PeriodicGrid, e: [&[f64]; 3], b: [&[f64]; 3], units: &Units) -> Result<DiscreteForm> {
    check_minkowski(grid)?;
    units.validate()?;
    if e.iter().chain(b.iter()).any(|c| c.len() != grid.npts()) {
        return Err(Error::GridMismatch);
    }
    let mut f = DiscreteForm::zeros(grid, 2)?;
    let mut set = |tuple: [usize; 2], src: &[f64], k: f64| {
        let dst = f.component_mut(&tuple).expect("2-form slot");
        dst.iter_mut().zip(src).for_each(|(d, s)| *d = k * s);
    };
    for i in 0..3 {
        set([0, i + 1], e[i], -1.0 / units.c);
    }
    set([1, 2], b[2], 1.0);
    set([1, 3], b[1], -1.0);
    set([2, 3], b[0], 1.0);
    Ok(f)
}

/// Inverse of [`assemble_f`]: `(E, B)` per axis.
pub fn field_components(f: &DiscreteForm, units: &Units) -> Result<([Vec<f64>; 3], [Vec<f64>; 3])> {
    if f.dim() != 4 || f.degree() != 2 {
        return Err(Error::DegreeMismatch { expected: 2, actual: f.degree() });
    }
    let comp = |t: [usize; 2], k: f64| -> Vec<f64> { f.component(&t).unwrap().iter().map(|v| k * v).collect() };
    let e = [comp([0, 1], -units.c), comp([0, 2], -units.c), comp([0, 3], -units.c)];
    let b = [comp([2, 3], 1.0), comp([1, 3], -1.0), comp([1, 2], 1.0)];
    Ok((e, b))
}

/// Grid, calculus and degree-2 duality frame for the field.
pub struct EmModel {
    pub calc: ExteriorCalculus,
    pub frame: DualityFrame,
    pub units: Units,
    pub green: GreenOptions,
}

impl EmModel {
    pub fn new(points: usize, units: Units) -> Result<Self> {
        Self::from_grid(PeriodicGrid::new(GridSpec::minkowski(points))?, units)
    }

    pub fn from_grid(grid: PeriodicGrid, units: Units) -> Result<Self> {
        check_minkowski(&grid)?;
        units.validate()?;
        let calc = ExteriorCalculus::new(grid);
        let frame = DualityFrame::build(&calc, 2, &BasisOptions::default())?;
        Ok(Self { calc, frame, units, green: GreenOptions::default() })
    }

    pub fn betti(&self) -> usize {
        self.frame.basis_p.betti
    }

    /// `μ₀c Σ q_a γ_a` for magnetic charges `q`.
    pub fn topological_field(&self, qm: &[f64]) -> Result<DiscreteForm> {
        let mut f = self.frame.basis_p.combine(qm)?;
        f.scale(self.units.mu0_c());
        Ok(f)
    }

    /// Class index of an axis pair such as `[0, 1]`.
    pub fn class_index(&self, axes: &[usize]) -> Result<usize> {
        self.frame.basis_p.index_of(axes).ok_or_else(|| Error::InvalidInput(format!("no 2-cycle with axes {axes:?}")))
    }
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct ChargeSet {
    /// Axis pair of each class.
    pub labels: Vec<Vec<usize>>,
    #[serde(rename = "qM")]
    pub qm: Vec<f64>,
    #[serde(rename = "qE")]
    pub qe: Vec<f64>,
    /// `∫_{z_a} F / μ₀c` on the coordinate cycles through the origin.
    #[serde(rename = "qM_cycle")]
    pub qm_cycle: Vec<f64>,
    /// `∫_{z_a} ★F / μ₀c` on the coordinate cycles through the origin.
    #[serde(rename = "qE_cycle")]
    pub qe_cycle: Vec<f64>,
}

/// Magnetic and electric charges. The primary values come from the class
/// functional, which agrees with the cycle integrals whenever `F` (resp. `★F`)
/// is closed and ignores the current-carrying parts otherwise.
pub fn charges(model: &EmModel, f: &DiscreteForm) -> Result<ChargeSet> {
    let (calc, frame) = (&model.calc, &model.frame);
    let k = 1.0 / model.units.mu0_c();
    let sf = calc.star(f)?;
    let scaled = |v: Vec<f64>| v.into_iter().map(|x| k * x).collect::<Vec<_>>();
    Ok(ChargeSet {
        labels: frame.basis_p.labels(),
        qm: scaled(frame.class_coefficients(calc, f)?),
        qe: scaled(frame.class_coefficients(calc, &sf)?),
        qm_cycle: scaled(frame.basis_p.cycle_integrals(calc, f)?),
        qe_cycle: scaled(frame.basis_p.cycle_integrals(calc, &sf)?),
    })
}

/// `(Jᴱ, Jᴹ) = (δF/μ₀, −δ★F/μ₀)`.
pub fn currents(model: &EmModel, f: &DiscreteForm) -> Result<(DiscreteForm, DiscreteForm)> {
    let calc = &model.calc;
    let mut je = calc.delta(f)?;
    je.scale(1.0 / model.units.mu0);
    let mut jm = calc.delta(&calc.star(f)?)?;
    jm.scale(-1.0 / model.units.mu0);
    Ok((je, jm))
}

pub struct Potentials {
    pub ae: DiscreteForm,
    pub am: DiscreteForm,
    pub decomposition: DecompositionSummary,
    /// `‖F − (dAᴱ − ★dAᴹ + μ₀c Σ qᴹ γ)‖∞ / max(‖F‖∞, 1)`.
    pub reconstruction_error: f64,
}

/// `Aᴱ = G δF` and `Aᴹ = β′` from `θ = G dF`.
pub fn potentials(model: &EmModel, f: &DiscreteForm, qm: &[f64]) -> Result<Potentials> {
    let calc = &model.calc;
    let dec = hodge_decompose(calc, f, &model.frame, &model.green)?;
    let ae = dec.alpha.clone().expect("2-form has a 1-form potential");
    let am = middle_potential(calc, dec.beta.as_ref().expect("2-form has a 3-form potential"))?;
    let rebuilt = rebuild(model, &ae, &am, qm)?;
    let reconstruction_error = (f - &rebuilt).norm_inf() / f.norm_inf().max(1.0);
    Ok(Potentials { ae, am, decomposition: dec.summary(), reconstruction_error })
}

/// `dAᴱ − ★dAᴹ + μ₀c Σ qᴹ_a γ_a`.
pub fn rebuild(model: &EmModel, ae: &DiscreteForm, am: &DiscreteForm, qm: &[f64]) -> Result<DiscreteForm> {
    let calc = &model.calc;
    let mut f = calc.d(ae)?;
    f.axpy(-1.0, &calc.star(&calc.d(am)?)?);
    f.axpy(1.0, &model.topological_field(qm)?);
    Ok(f)
}

/// `qᴹ_a = −Σ_b τ_ba qᴱ_b`, `qᴱ_b = Σ_a τ_ab qᴹ_a` and `q = i Tᵀ q` for `q = qᴹ + i qᴱ`.
pub fn charge_relations(model: &EmModel, q: &ChargeSet) -> Result<CrossRelation> {
    let t = &model.frame.primal.t;
    let odd = model.calc.signs(2).d_odd();
    cross_relation_check(&q.qm, &q.qe, t, t, odd, true)
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct ActionBreakdown {
    /// `−(2/c)(Aᴱ, Jᴱ)`.
    pub electric_term: f64,
    /// `−(2/c)(Aᴹ, Jᴹ)`.
    pub magnetic_term: f64,
    /// `S_d = −μ₀c Σ ε_{a,P(a)} qᴹ_a qᴱ_{P(a)}`.
    pub quantized_term: f64,
    pub total: f64,
    /// `−(1/μ₀c)(F,F) − (1/c)(Aᴱ,Jᴱ) − (1/c)(Aᴹ,Jᴹ)`.
    pub lagrangian_total: f64,
    /// `|total − lagrangian_total| / max(1, |total|)`.
    pub budget_residual: f64,
}

pub struct ActionInputs<'a> {
    pub f: &'a DiscreteForm,
    pub ae: &'a DiscreteForm,
    pub am: &'a DiscreteForm,
    pub je: &'a DiscreteForm,
    pub jm: &'a DiscreteForm,
    pub charges: &'a ChargeSet,
}

pub fn action(model: &EmModel, x: &ActionInputs<'_>) -> Result<ActionBreakdown> {
    let calc = &model.calc;
    let Units { mu0, c } = model.units;
    let ae_je = calc.pairing(x.ae, x.je)?;
    let am_jm = calc.pairing(x.am, x.jm)?;
    let triple = &model.frame.primal;
    let quantized_term = -mu0
        * c
        * triple
            .p
            .iter()
            .enumerate()
            .map(|(a, &pa)| triple.e[(a, pa)] * x.charges.qm[a] * x.charges.qe[pa])
            .sum::<f64>();
    let electric_term = -2.0 / c * ae_je;
    let magnetic_term = -2.0 / c * am_jm;
    let total = electric_term + magnetic_term + quantized_term;
    let lagrangian_total = -calc.pairing(x.f, x.f)? / (mu0 * c) - ae_je / c - am_jm / c;
    Ok(ActionBreakdown {
        electric_term,
        magnetic_term,
        quantized_term,
        total,
        lagrangian_total,
        budget_residual: (total - lagrangian_total).abs() / total.abs().max(1.0),
    })
}

/// Field equations for the rebuilt field against the input currents.
#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct MaxwellResiduals {
    /// `‖d★F − μ₀★Jᴱ‖∞ / max(‖F‖∞, 1)`.
    pub electric: f64,
    /// `‖dF − μ₀★Jᴹ‖∞ / max(‖F‖∞, 1)`.
    pub magnetic: f64,
    /// `μ₀ max(‖δJᴱ‖∞, ‖δJᴹ‖∞) / max(‖F‖∞, 1)`.
    pub continuity: f64,
}

impl MaxwellResiduals {
    pub fn max(&self) -> f64 {
        self.electric.max(self.magnetic).max(self.continuity)
    }
}

pub fn maxwell_residuals(
    model: &EmModel,
    f: &DiscreteForm,
    je: &DiscreteForm,
    jm: &DiscreteForm,
) -> Result<MaxwellResiduals> {
    let calc = &model.calc;
    let mu0 = model.units.mu0;
    let scale = f.norm_inf().max(1.0);
    let mismatch = |lhs: DiscreteForm, j: &DiscreteForm| -> Result<f64> {
        let mut sj = calc.star(j)?;
        sj.scale(mu0);
        Ok((&lhs - &sj).norm_inf() / scale)
    };
    let continuity = mu0 * calc.delta(je)?.norm_inf().max(calc.delta(jm)?.norm_inf()) / scale;
    Ok(MaxwellResiduals {
        electric: mismatch(calc.d(&calc.star(f)?)?, je)?,
        magnetic: mismatch(calc.d(f)?, jm)?,
        continuity,
    })
}

/// Everything derived from one field.
#[derive(Serialize, Clone, Debug)]
pub struct EmAnalysis {
    pub betti: usize,
    pub reality: Reality,
    pub charges: ChargeSet,
    pub charge_relations: CrossRelation,
    pub action: ActionBreakdown,
    pub maxwell: MaxwellResiduals,
    pub reconstruction_error: f64,
    pub decomposition: DecompositionSummary,
    pub electric_current_norm: f64,
    pub magnetic_current_norm: f64,
    /// Sign in `δ★F = s μ₀ Jᴹ`.
    pub magnetic_current_sign: i8,
}

pub fn analyze(model: &EmModel, f: &DiscreteForm) -> Result<EmAnalysis> {
    let q = charges(model, f)?;
    let (je, jm) = currents(model, f)?;
    let pots = potentials(model, f, &q.qm)?;
    let rebuilt = rebuild(model, &pots.ae, &pots.am, &q.qm)?;
    let act = action(model, &ActionInputs { f, ae: &pots.ae, am: &pots.am, je: &je, jm: &jm, charges: &q })?;
    Ok(EmAnalysis {
        betti: model.betti(),
        reality: reality_rule(model.betti(), model.calc.signs(2).d_odd())?,
        charge_relations: charge_relations(model, &q)?,
        maxwell: maxwell_residuals(model, &rebuilt, &je, &jm)?,
        action: act,
        reconstruction_error: pots.reconstruction_error,
        decomposition: pots.decomposition,
        electric_current_norm: je.norm_inf(),
        magnetic_current_norm: jm.norm_inf(),
        magnetic_current_sign: -1,
        charges: q,
    })
}

/// `qᴹ = −Tᵀ qᴱ` for a two-class triple.
pub fn magnetic_from_electric(t: &Mat2<f64>, qe: [f64; 2]) -> [f64; 2] {
    [-(t[0][0] * qe[0] + t[1][0] * qe[1]), -(t[0][1] * qe[0] + t[1][1] * qe[1])]
}

#[derive(Serialize, Clone, Copy, Debug, PartialEq)]
pub struct MonopoleDipole {
    pub m_magnetic: f64,
    pub d_magnetic: f64,
    pub m_electric: f64,
    pub d_electric: f64,
    /// `(mᴹ)² − (dᴹ)² + (mᴱ)² − (dᴱ)²`.
    pub residual: f64,
}

/// Monopole `m = q₁ + q₂` and dipole `d = q₁ − q₂` moments of two-class charges.
pub fn monopole_dipole(qm: [f64; 2], qe: [f64; 2]) -> MonopoleDipole {
    let (mm, dm) = (qm[0] + qm[1], qm[0] - qm[1]);
    let (me, de) = (qe[0] + qe[1], qe[0] - qe[1]);
    MonopoleDipole {
        m_magnetic: mm,
        d_magnetic: dm,
        m_electric: me,
        d_electric: de,
        residual: mm * mm - dm * dm + me * me - de * de,
    }
}

/// `h / (μ₀ c e²)`, which equals `1/(2α)`.
pub fn lambda_scale(action_quantum: f64, elementary_charge: f64, mu0: f64, c: f64) -> Result<f64> {
    let inputs = [action_quantum, elementary_charge, mu0, c];
    if inputs.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::InvalidInput(format!("lambda_scale needs positive inputs, got {inputs:?}")));
    }
    Ok(action_quantum / (mu0 * c * elementary_charge * elementary_charge))
}

/// Smooth coclosed 1-form off the light cone, used for the exact presets.
pub fn sample_electric_potential(grid: &PeriodicGrid) -> Result<DiscreteForm> {
    DiscreteForm::from_fn(grid, 1, |t, x| match t[0] {
        0 => x[1].sin() + 0.5 * (x[2] + x[3]).cos(),
        2 => 0.7 * (2.0 * x[0] + x[3]).cos(),
        _ => 0.0,
    })
}

/// Smooth coclosed 1-form off the light cone, used for the magnetic potential.
pub fn sample_magnetic_potential(grid: &PeriodicGrid) -> Result<DiscreteForm> {
    DiscreteForm::from_fn(grid, 1, |t, x| match t[0] {
        1 => 0.6 * x[2].cos(),
        3 => 0.4 * (x[0] + 2.0 * x[2]).sin(),
        _ => 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model() -> EmModel {
        EmModel::new(12, Units::natural()).unwrap()
    }

    fn unit(model: &EmModel, axes: &[usize]) -> Vec<f64> {
        let mut q = vec![0.0; model.betti()];
        q[model.class_index(axes).unwrap()] = 1.0;
        q
    }

    #[test]
    fn assembly_places_components() {
        let grid = PeriodicGrid::new(GridSpec::minkowski(6)).unwrap();
        let n = grid.npts();
        let zero = vec![0.0; n];
        let units = Units { mu0: 1.0, c: 2.0 };
        let f = assemble_f(&grid, [&zero, &zero, &zero], [&zero, &zero, &zero], &units).unwrap();
        assert_eq!(f.norm_inf(), 0.0);

        let b1 = vec![3.0; n];
        let f = assemble_f(&grid, [&zero, &zero, &zero], [&b1, &zero, &zero], &units).unwrap();
        assert_eq!(f.component(&[2, 3]).unwrap()[0], 3.0);
        assert_eq!(f.norm_inf(), 3.0);
        assert_eq!(f.components().iter().filter(|c| c[0] != 0.0).count(), 1);

        // E₁ dx¹∧dx⁰ / c = −E₁/c dx⁰∧dx¹
        let e1 = vec![4.0; n];
        let f = assemble_f(&grid, [&e1, &zero, &zero], [&zero, &zero, &zero], &units).unwrap();
        assert_eq!(f.component(&[0, 1]).unwrap()[0], -2.0);

        let vals: Vec<Vec<f64>> = (0..6).map(|k| grid.sample(|x| (x[k % 4] + k as f64).sin())).collect();
        let f = assemble_f(&grid, [&vals[0], &vals[1], &vals[2]], [&vals[3], &vals[4], &vals[5]], &units).unwrap();
        let (e, b) = field_components(&f, &units).unwrap();
        for i in 0..3 {
            assert!(e[i].iter().zip(&vals[i]).all(|(a, b)| (a - b).abs() < 1e-15));
            assert!(b[i].iter().zip(&vals[3 + i]).all(|(a, b)| (a - b).abs() < 1e-15));
        }

        let flat = PeriodicGrid::new(GridSpec::flat(&[6, 6, 6, 6])).unwrap();
        assert!(assemble_f(&flat, [&zero, &zero, &zero], [&zero, &zero, &zero], &units).is_err());
    }

    #[test]
    fn star_maps_electric_to_magnetic_slots() {
        // ★ sends (E/c, B) to (−B, E/c)
        let grid = PeriodicGrid::new(GridSpec::minkowski(6)).unwrap();
        let calc = ExteriorCalculus::new(grid.clone());
        let units = Units::natural();
        let vals: Vec<Vec<f64>> = (0..6).map(|k| grid.sample(|x| (2.0 * x[k % 4]).cos() + k as f64)).collect();
        let f = assemble_f(&grid, [&vals[0], &vals[1], &vals[2]], [&vals[3], &vals[4], &vals[5]], &units).unwrap();
        let (e, b) = field_components(&calc.star(&f).unwrap(), &units).unwrap();
        for i in 0..3 {
            assert!(e[i].iter().zip(&vals[3 + i]).all(|(x, y)| (x + y).abs() < 1e-12));
            assert!(b[i].iter().zip(&vals[i]).all(|(x, y)| (x - y).abs() < 1e-12));
        }
    }

    #[test]
    fn topological_field_charges_and_action() {
        let m = model();
        assert_eq!(m.betti(), 6);
        let f = m.topological_field(&unit(&m, &[0, 1])).unwrap();
        let out = analyze(&m, &f).unwrap();
        let want_qe: Vec<f64> = unit(&m, &[2, 3]).iter().map(|v| -v).collect();
        for a in 0..6 {
            assert!((out.charges.qm[a] - unit(&m, &[0, 1])[a]).abs() < 1e-12);
            assert!((out.charges.qe[a] - want_qe[a]).abs() < 1e-12);
            assert!((out.charges.qm_cycle[a] - out.charges.qm[a]).abs() < 1e-12);
            assert!((out.charges.qe_cycle[a] - out.charges.qe[a]).abs() < 1e-12);
        }
        assert!(out.charge_relations.max() < 1e-12);
        assert!((out.action.quantized_term - 1.0).abs() < 1e-12);
        assert!(out.action.electric_term.abs() < 1e-12 && out.action.magnetic_term.abs() < 1e-12);
        assert!(out.action.budget_residual < 1e-12);
        assert!(out.maxwell.max() < 1e-12);
        assert!(out.electric_current_norm < 1e-12 && out.magnetic_current_norm < 1e-12);
        assert_eq!(out.reality, Reality::Real);
    }

    #[test]
    fn quantized_term_scales_with_units() {
        let m = EmModel::new(8, Units { mu0: 2.0, c: 3.0 }).unwrap();
        let f = m.topological_field(&unit(&m, &[0, 1])).unwrap();
        let out = analyze(&m, &f).unwrap();
        assert!((out.action.quantized_term - 6.0).abs() < 1e-10);
        assert!(out.action.budget_residual < 1e-12);
    }

    #[test]
    fn two_class_field_charges() {
        let m = model();
        let mut q = unit(&m, &[0, 1]);
        q[m.class_index(&[2, 3]).unwrap()] = 2.0;
        let c = charges(&m, &m.topological_field(&q).unwrap()).unwrap();
        assert!((c.qe[m.class_index(&[0, 1]).unwrap()] - 2.0).abs() < 1e-12);
        assert!((c.qe[m.class_index(&[2, 3]).unwrap()] + 1.0).abs() < 1e-12);
        // doubling every charge quadruples S_d
        let s1 = analyze(&m, &m.topological_field(&q).unwrap()).unwrap().action.quantized_term;
        let q2: Vec<f64> = q.iter().map(|v| 2.0 * v).collect();
        let s2 = analyze(&m, &m.topological_field(&q2).unwrap()).unwrap().action.quantized_term;
        assert!((s2 - 4.0 * s1).abs() < 1e-10);
    }

    #[test]
    fn exact_field_recovers_potential() {
        let m = model();
        let a0 = sample_electric_potential(m.calc.grid()).unwrap();
        let f = m.calc.d(&a0).unwrap();
        let q = charges(&m, &f).unwrap();
        assert!(q.qm.iter().chain(&q.qe).all(|v| v.abs() < 1e-8));
        let pots = potentials(&m, &f, &q.qm).unwrap();
        assert!((&pots.ae - &a0).norm_inf() < 1e-10);
        assert!(pots.am.norm_inf() < 1e-10);
        let out = analyze(&m, &f).unwrap();
        assert!(out.action.quantized_term.abs() < 1e-10);
        assert!(out.action.budget_residual < 1e-10);
        assert!(out.maxwell.max() < 1e-10);
        assert!(out.electric_current_norm > 0.1);
    }

    #[test]
    fn mixed_field_splits_into_its_parts() {
        let m = model();
        let a0 = sample_electric_potential(m.calc.grid()).unwrap();
        let b0 = sample_magnetic_potential(m.calc.grid()).unwrap();
        let q = unit(&m, &[0, 1]);
        let f = rebuild(&m, &a0, &b0, &q).unwrap();
        let c = charges(&m, &f).unwrap();
        assert!(c.qm.iter().zip(&q).all(|(a, b)| (a - b).abs() < 1e-10));
        let pots = potentials(&m, &f, &c.qm).unwrap();
        assert!((&pots.ae - &a0).norm_inf() < 1e-10);
        assert!((&pots.am - &b0).norm_inf() < 1e-10);
        assert!(pots.reconstruction_error < 1e-10);
        let out = analyze(&m, &f).unwrap();
        assert!((out.action.quantized_term - 1.0).abs() < 1e-10);
        assert!(out.action.budget_residual < 1e-10);
        assert!(out.maxwell.max() < 1e-10);
        assert!(out.charge_relations.max() < 1e-10);
    }

    #[test]
    fn analytic_electric_current() {
        // A = sin(x¹) dx⁰ is coclosed, so δF = δdA = ΔA = sin(x¹) dx⁰ with Δ = −∂₁² here
        let m = EmModel::new(32, Units::natural()).unwrap();
        let grid = m.calc.grid().clone();
        let a = DiscreteForm::from_fn(&grid, 1, |t, x| if t[0] == 0 { x[1].sin() } else { 0.0 }).unwrap();
        let (je, _) = currents(&m, &m.calc.d(&a).unwrap()).unwrap();
        let want = DiscreteForm::from_fn(&grid, 1, |t, x| if t[0] == 0 { x[1].sin() } else { 0.0 }).unwrap();
        let err = (&je - &want).norm_inf();
        let flipped = (&je + &want).norm_inf();
        assert!(err < 1e-7, "err {err:e}, flipped {flipped:e}");
    }

    #[test]
    fn hand_charge_relation_is_exact() {
        let m = model();
        let qm = unit(&m, &[0, 1]);
        let qe: Vec<f64> = unit(&m, &[2, 3]).iter().map(|v| -v).collect();
        let set = ChargeSet { labels: vec![], qm: qm.clone(), qe: qe.clone(), qm_cycle: qm, qe_cycle: qe };
        assert_eq!(charge_relations(&m, &set).unwrap().max(), 0.0);
        let zero = ChargeSet { labels: vec![], qm: vec![0.0; 6], qe: vec![0.0; 6], qm_cycle: vec![], qe_cycle: vec![] };
        assert_eq!(charge_relations(&m, &zero).unwrap().max(), 0.0);
    }

    #[test]
    fn monopole_dipole_examples() {
        // S2.1.1 with λ₁ = 1, λ₂ = −1, ε₁₂ = 1
        let t = [[0.0, 1.0], [-1.0, 0.0]];
        let qm = magnetic_from_electric(&t, [1.0, 0.0]);
        assert_eq!(qm, [0.0, -1.0]);
        let md = monopole_dipole(qm, [1.0, 0.0]);
        assert_eq!((md.m_magnetic, md.d_magnetic, md.m_electric, md.d_electric), (-1.0, 1.0, 1.0, 1.0));
        assert_eq!(md.residual, 0.0);
        assert_eq!(monopole_dipole([0.0; 2], [0.0; 2]).residual, 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (l1, e12) = (0.75, 1.5);
        let l2 = -e12 * e12 / l1;
        let t = [[0.0, l1 / e12], [l2 / e12, 0.0]];
        for _ in 0..100 {
            let qe = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let qm = magnetic_from_electric(&t, qe);
            // antidiagonal form of the same relation
            assert!((qm[0] + l2 * qe[1] / e12).abs() < 1e-14 && (qm[1] + l1 * qe[0] / e12).abs() < 1e-14);
            assert!(monopole_dipole(qm, qe).residual.abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_scale_values() {
        let v = lambda_scale(PLANCK, ELEMENTARY_CHARGE, VACUUM_PERMEABILITY, SPEED_OF_LIGHT).unwrap();
        assert!((v - 68.518).abs() < 1e-3);
        let e = 0.3f64;
        assert!((lambda_scale(2.0 * e * e, e, 1.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        let doubled = lambda_scale(PLANCK, 2.0 * ELEMENTARY_CHARGE, VACUUM_PERMEABILITY, SPEED_OF_LIGHT).unwrap();
        assert!((doubled * 4.0 - v).abs() < 1e-10);
        assert!(lambda_scale(0.0, 1.0, 1.0, 1.0).is_err());
    }
}
