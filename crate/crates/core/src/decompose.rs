//! Hodge decomposition with a cohomology term and a residue, the dual class
//! coefficients, the norm budget and the even-dimensional compact form.
//!
//! `φ = dα + δβ + Σ_a u_a γ_a + φ₀` with `α = G δφ`, `β = G dφ`. The class
//! coefficients come from the Poincaré-dual functional (see
//! `DualityFrame::class_coefficients`), and `φ₀` is whatever is left over.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::calculus::{parity_sign, ExteriorCalculus, GreenOptions, SignExponents, SolveReport};
use crate::cohomology::DualityFrame;
use crate::error::{Error, Result};
use crate::mesh::DiscreteForm;

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub degree: usize,
    /// `G δφ`, absent for 0-forms.
    pub alpha: Option<DiscreteForm>,
    /// `G dφ`, absent for top-degree forms.
    pub beta: Option<DiscreteForm>,
    /// `dα`.
    pub exact: DiscreteForm,
    /// `δβ`.
    pub coexact: DiscreteForm,
    /// `Σ_a u_a γ_a`.
    pub harmonic: DiscreteForm,
    pub u: Vec<f64>,
    pub residue: DiscreteForm,
    /// `‖φ − (dα + δβ + Σ u γ + φ₀)‖∞ / ‖φ‖∞`.
    pub reconstruction_error: f64,
    /// `‖δα‖∞ / ‖φ‖∞`.
    pub gauge_alpha: f64,
    /// `‖dβ‖∞ / ‖φ‖∞`.
    pub gauge_beta: f64,
    /// `‖φ₀‖∞ / ‖φ‖∞`.
    pub residue_norm: f64,
    pub alpha_solve: Option<SolveReport>,
    pub beta_solve: Option<SolveReport>,
}

/// Scalar summary for reports.
#[derive(Serialize, Clone, Debug)]
pub struct DecompositionSummary {
    pub degree: usize,
    pub u: Vec<f64>,
    pub reconstruction_error: f64,
    pub gauge_alpha: f64,
    pub gauge_beta: f64,
    pub residue_norm: f64,
    pub alpha_solve: Option<SolveReport>,
    pub beta_solve: Option<SolveReport>,
}

impl Decomposition {
    pub fn summary(&self) -> DecompositionSummary {
        DecompositionSummary {
            degree: self.degree,
            u: self.u.clone(),
            reconstruction_error: self.reconstruction_error,
            gauge_alpha: self.gauge_alpha,
            gauge_beta: self.gauge_beta,
            residue_norm: self.residue_norm,
            alpha_solve: self.alpha_solve.clone(),
            beta_solve: self.beta_solve.clone(),
        }
    }

    pub fn reassemble(&self) -> DiscreteForm {
        let mut out = &self.exact + &self.coexact;
        out.axpy(1.0, &self.harmonic);
        out.axpy(1.0, &self.residue);
        out
    }
}

fn relative(x: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        x / scale
    } else {
        x
    }
}

pub fn hodge_decompose(
    calc: &ExteriorCalculus,
    phi: &DiscreteForm,
    frame: &DualityFrame,
    green: &GreenOptions,
) -> Result<Decomposition> {
    let n = calc.dim();
    let p = phi.degree();
    let (basis, _, _) = frame.side(p)?;
    let scale = phi.norm_inf();

    let (alpha, exact, alpha_solve, gauge_alpha) = if p > 0 {
        let (a, report) = calc.green_solve(&calc.delta(phi)?, green)?;
        let gauge = if p > 1 { calc.delta(&a)?.norm_inf() } else { 0.0 };
        let da = calc.d(&a)?;
        (Some(a), da, Some(report), gauge)
    } else {
        (None, phi.zeros_like(), None, 0.0)
    };
    let (beta, coexact, beta_solve, gauge_beta) = if p < n {
        let (b, report) = calc.green_solve(&calc.d(phi)?, green)?;
        let gauge = if p + 1 < n { calc.d(&b)?.norm_inf() } else { 0.0 };
        let db = calc.delta(&b)?;
        (Some(b), db, Some(report), gauge)
    } else {
        (None, phi.zeros_like(), None, 0.0)
    };

    let u = frame.class_coefficients(calc, phi)?;
    let harmonic = basis.combine(&u)?;
    let mut residue = phi - &exact;
    residue.axpy(-1.0, &coexact);
    residue.axpy(-1.0, &harmonic);

    let mut dec = Decomposition {
        degree: p,
        alpha,
        beta,
        exact,
        coexact,
        harmonic,
        u,
        residue,
        reconstruction_error: 0.0,
        gauge_alpha: relative(gauge_alpha, scale),
        gauge_beta: relative(gauge_beta, scale),
        residue_norm: 0.0,
        alpha_solve,
        beta_solve,
    };
    dec.reconstruction_error = relative((phi - &dec.reassemble()).norm_inf(), scale);
    dec.residue_norm = relative(dec.residue.norm_inf(), scale);
    Ok(dec)
}

/// `v` with `Σ_a v_a γ^(n−p)_a` the harmonic part of `★φ`.
pub fn dual_decompose(calc: &ExteriorCalculus, phi: &DiscreteForm, frame: &DualityFrame) -> Result<Vec<f64>> {
    frame.class_coefficients(calc, &calc.star(phi)?)
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct CrossRelation {
    /// `max_b |v_b − Σ_a τ^(n−p)_ab u_a|`.
    pub forward: f64,
    /// `max_a |u_a − (−1)^D Σ_b τ^(p)_ba v_b|`.
    pub backward: f64,
    /// Middle degree with odd `D`: `max |w − i Tᵀ w|` for `w = u + iv`.
    pub quadrature: Option<f64>,
}

impl CrossRelation {
    pub fn max(&self) -> f64 {
        self.forward.max(self.backward).max(self.quadrature.unwrap_or(0.0))
    }
}

/// `t_forward` expands `★γ^(p)` in the complementary set and `t_backward` expands
/// `★γ^(n−p)`; in the middle degree both are the same matrix.
pub fn cross_relation_check(
    u: &[f64],
    v: &[f64],
    t_forward: &DMatrix<f64>,
    t_backward: &DMatrix<f64>,
    d_odd: bool,
    middle: bool,
) -> Result<CrossRelation> {
    let k = u.len();
    if v.len() != k || t_forward.shape() != (k, k) || t_backward.shape() != (k, k) {
        return Err(Error::InvalidInput("coefficient vectors and T must have matching sizes".into()));
    }
    let sd = if d_odd { -1.0 } else { 1.0 };
    let mut forward: f64 = 0.0;
    let mut backward: f64 = 0.0;
    for b in 0..k {
        let pred: f64 = (0..k).map(|a| t_forward[(a, b)] * u[a]).sum();
        forward = forward.max((v[b] - pred).abs());
    }
    for a in 0..k {
        let pred: f64 = (0..k).map(|b| t_backward[(b, a)] * v[b]).sum::<f64>() * sd;
        backward = backward.max((u[a] - pred).abs());
    }
    let quadrature = (middle && d_odd).then(|| {
        (0..k)
            .map(|a| {
                // i Σ_b τ_ba (u_b + i v_b) = −Σ τ_ba v_b + i Σ τ_ba u_b
                let re: f64 = -(0..k).map(|b| t_forward[(b, a)] * v[b]).sum::<f64>();
                let im: f64 = (0..k).map(|b| t_forward[(b, a)] * u[b]).sum();
                (u[a] - re).hypot(v[a] - im)
            })
            .fold(0.0, f64::max)
    });
    Ok(CrossRelation { forward, backward, quadrature })
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct NormBreakdown {
    /// `(α, δφ)`.
    pub exact_term: f64,
    /// `(β, dφ)`, or `(−1)^s (β′, δ★φ)` in the middle degree of an even-dimensional grid.
    pub coexact_term: f64,
    /// `Σ_a ε_{a,P(a)} u_a v_{P(a)}`.
    pub topological_term: f64,
    /// `(φ₀, φ₀)`.
    pub residue_term: f64,
    pub total: f64,
    /// `(φ, φ)` computed directly.
    pub direct_norm: f64,
    /// True when the middle-degree form of the coexact term was used.
    pub middle_variant: bool,
    /// For the middle variant, `|(−1)^s (β′, δ★φ) − (β, dφ)|`.
    pub variant_consistency: Option<f64>,
}

impl NormBreakdown {
    /// `|total − direct| / max(1, |direct|)`.
    pub fn closure(&self) -> f64 {
        (self.total - self.direct_norm).abs() / self.direct_norm.abs().max(1.0)
    }
}

/// `β′ = −(−1)^C(m+1) ★θ`, the (m−1)-form with `δθ = −★dβ′`.
pub fn middle_potential(calc: &ExteriorCalculus, theta: &DiscreteForm) -> Result<DiscreteForm> {
    let mut out = calc.star(theta)?;
    out.scale(-calc.signs(theta.degree()).c_sign());
    Ok(out)
}

pub fn norm_decompose(
    calc: &ExteriorCalculus,
    phi: &DiscreteForm,
    dec: &Decomposition,
    v: &[f64],
    frame: &DualityFrame,
) -> Result<NormBreakdown> {
    let n = calc.dim();
    let p = phi.degree();
    let (_, triple, _) = frame.side(p)?;
    let exact_term = match &dec.alpha {
        Some(a) => calc.pairing(a, &calc.delta(phi)?)?,
        None => 0.0,
    };
    let plain = match &dec.beta {
        Some(b) => calc.pairing(b, &calc.d(phi)?)?,
        None => 0.0,
    };
    let middle = n.is_multiple_of(2) && 2 * p == n && p > 0;
    let (coexact_term, variant_consistency) = match (&dec.beta, middle) {
        (Some(theta), true) => {
            let bp = middle_potential(calc, theta)?;
            let s = calc.grid().negative_count();
            let term = parity_sign(s) * calc.pairing(&bp, &calc.delta(&calc.star(phi)?)?)?;
            (term, Some((term - plain).abs()))
        }
        _ => (plain, None),
    };
    let topological_term: f64 = triple.p.iter().enumerate().map(|(a, &pa)| triple.e[(a, pa)] * dec.u[a] * v[pa]).sum();
    let residue_term = calc.pairing(&dec.residue, &dec.residue)?;
    let total = exact_term + coexact_term + topological_term + residue_term;
    Ok(NormBreakdown {
        exact_term,
        coexact_term,
        topological_term,
        residue_term,
        total,
        direct_norm: calc.pairing(phi, phi)?,
        middle_variant: middle,
        variant_consistency,
    })
}

/// Pairwise normalized pairings among `dα`, `δβ` and the harmonic part.
#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct CrossTerms {
    pub exact_coexact: f64,
    pub exact_harmonic: f64,
    pub coexact_harmonic: f64,
}

impl CrossTerms {
    pub fn max(&self) -> f64 {
        self.exact_coexact.max(self.exact_harmonic).max(self.coexact_harmonic)
    }
}

pub fn cross_terms(calc: &ExteriorCalculus, dec: &Decomposition) -> Result<CrossTerms> {
    let norm = |f: &DiscreteForm| -> Result<f64> { Ok(calc.pairing(f, f)?.abs().sqrt()) };
    let pair = |a: &DiscreteForm, b: &DiscreteForm| -> Result<f64> {
        let scale = norm(a)? * norm(b)?;
        let v = calc.pairing(a, b)?.abs();
        Ok(if scale > 0.0 { v / scale } else { v })
    };
    Ok(CrossTerms {
        exact_coexact: pair(&dec.exact, &dec.coexact)?,
        exact_harmonic: pair(&dec.exact, &dec.harmonic)?,
        coexact_harmonic: pair(&dec.coexact, &dec.harmonic)?,
    })
}

/// `σ₁ = diag(1, (−1)^{D+1})`.
pub fn sigma1(d_odd: bool) -> [[f64; 2]; 2] {
    [[1.0, 0.0], [0.0, if d_odd { 1.0 } else { -1.0 }]]
}

pub fn sigma2() -> [[f64; 2]; 2] {
    [[0.0, -1.0], [1.0, 0.0]]
}

/// `σ₁ cos ξ + σ₂ sin ξ`.
pub fn rotation(xi: f64, d_odd: bool) -> [[f64; 2]; 2] {
    let (s1, s2) = (sigma1(d_odd), sigma2());
    let mut r = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = s1[i][j] * xi.cos() + s2[i][j] * xi.sin();
        }
    }
    r
}

#[derive(Clone, Debug)]
pub struct CompactForm {
    /// `dα − ★dβ′ + Σ u_a γ_a`.
    pub first: DiscreteForm,
    /// `★dα + (−1)^{D+1} dβ′ + Σ v_a γ_a`.
    pub second: DiscreteForm,
    /// `‖second − ★first‖∞ / max(‖first‖∞, 1)`.
    pub star_residual: f64,
}

/// Assembles `[φ, ★φ]` from `(α, β′)` by the block operator `σ₁ d + σ₂ ★d` plus the
/// cohomology sums, for the middle degree `m` of an even-dimensional grid.
/// Pass `None` for a zero potential.
pub fn compact_assemble(
    calc: &ExteriorCalculus,
    alpha: Option<&DiscreteForm>,
    beta_prime: Option<&DiscreteForm>,
    u: &[f64],
    v: &[f64],
    frame: &DualityFrame,
) -> Result<CompactForm> {
    let n = calc.dim();
    if !n.is_multiple_of(2) {
        return Err(Error::Unsupported(format!("compact form needs an even dimension, got {n}")));
    }
    let m = n / 2;
    let (basis, _, _) = frame.side(m)?;
    if basis.degree != m || frame.basis_q.degree != m {
        return Err(Error::DegreeMismatch { expected: m, actual: frame.degree() });
    }
    let d_odd = SignExponents::new(m, n, calc.grid().negative_count()).d_odd();
    let (s1, s2) = (sigma1(d_odd), sigma2());
    let zero = DiscreteForm::zeros(calc.grid(), m)?;
    let d_of = |f: Option<&DiscreteForm>| -> Result<DiscreteForm> {
        match f {
            Some(f) => calc.d(f),
            None => Ok(zero.clone()),
        }
    };
    let da = d_of(alpha)?;
    let db = d_of(beta_prime)?;
    let sda = calc.star(&da)?;
    let sdb = calc.star(&db)?;
    let row = |i: usize| -> DiscreteForm {
        let mut out = &da * s1[i][0];
        out.axpy(s1[i][1], &db);
        out.axpy(s2[i][0], &sda);
        out.axpy(s2[i][1], &sdb);
        out
    };
    let mut first = row(0);
    first.axpy(1.0, &basis.combine(u)?);
    let mut second = row(1);
    second.axpy(1.0, &basis.combine(v)?);
    let star_residual = (&second - &calc.star(&first)?).norm_inf() / first.norm_inf().max(1.0);
    Ok(CompactForm { first, second, star_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::BasisOptions;
    use crate::mesh::{random_trig_form, GridSpec, PeriodicGrid};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(spec: GridSpec, p: usize) -> (ExteriorCalculus, DualityFrame) {
        let c = ExteriorCalculus::new(PeriodicGrid::new(spec).unwrap());
        let f = DualityFrame::build(&c, p, &BasisOptions::default()).unwrap();
        (c, f)
    }

    #[test]
    fn basis_element_decomposes_to_itself() {
        let (c, f) = setup(GridSpec::flat(&[32, 32]), 1);
        let g1 = f.basis_p.gammas[0].clone();
        let dec = hodge_decompose(&c, &g1, &f, &GreenOptions::default()).unwrap();
        assert!(dec.exact.norm_inf() < 1e-14 && dec.coexact.norm_inf() < 1e-14);
        assert_abs_diff_eq!(dec.u[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dec.u[1], 0.0, epsilon = 1e-14);
        assert!(dec.residue.norm_inf() < 1e-14);
    }

    #[test]
    fn constructed_mixed_form_on_flat_torus() {
        let (c, f) = setup(GridSpec::flat(&[64, 64]), 1);
        let s = DiscreteForm::scalar(c.grid(), c.grid().sample(|x| x[0].sin())).unwrap();
        let ds = c.d(&s).unwrap();
        let phi = &ds + &f.basis_p.combine(&[3.0, 4.0]).unwrap();
        let dec = hodge_decompose(&c, &phi, &f, &GreenOptions::default()).unwrap();
        assert_abs_diff_eq!(dec.u[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dec.u[1], 4.0, epsilon = 1e-12);
        assert!(dec.coexact.norm_inf() < 1e-12);
        assert!((&dec.exact - &ds).norm_inf() < 1e-8);
        assert!(dec.reconstruction_error < 1e-12);
        assert!(dec.residue_norm < 1e-10);
        // the literal pullback of dα vanishes on every cycle
        for z in &f.basis_p.cycles {
            assert!(crate::mesh::integrate_cycle(&dec.exact, z, c.grid()).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn flat_norm_budget_is_twenty_five() {
        let (c, f) = setup(GridSpec::flat(&[32, 32]), 1);
        let phi = f.basis_p.combine(&[3.0, 4.0]).unwrap();
        let dec = hodge_decompose(&c, &phi, &f, &GreenOptions::default()).unwrap();
        let v = dual_decompose(&c, &phi, &f).unwrap();
        assert_abs_diff_eq!(v[0], -4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], 3.0, epsilon = 1e-12);
        let nb = norm_decompose(&c, &phi, &dec, &v, &f).unwrap();
        assert_abs_diff_eq!(nb.topological_term, 25.0, epsilon = 1e-10);
        assert_abs_diff_eq!(nb.direct_norm, 25.0, epsilon = 1e-10);
        assert!(nb.closure() < 1e-12);
        let cr = cross_relation_check(&dec.u, &v, &f.primal.t, &f.dual.t, true, true).unwrap();
        assert!(cr.max() < 1e-12, "{cr:?}");
    }

    #[test]
    fn exact_form_budget_is_all_exact() {
        let (c, f) = setup(GridSpec::flat(&[32, 32]), 1);
        let s = DiscreteForm::scalar(c.grid(), c.grid().sample(|x| (x[0] + 2.0 * x[1]).cos())).unwrap();
        let phi = c.d(&s).unwrap();
        let dec = hodge_decompose(&c, &phi, &f, &GreenOptions::default()).unwrap();
        let v = dual_decompose(&c, &phi, &f).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-12));
        assert!(dec.u.iter().all(|x| x.abs() < 1e-12));
        let nb = norm_decompose(&c, &phi, &dec, &v, &f).unwrap();
        assert!(nb.topological_term.abs() < 1e-12);
        assert_abs_diff_eq!(nb.exact_term, nb.direct_norm, epsilon = 1e-8 * nb.direct_norm);
    }

    #[test]
    fn random_forms_close_the_budget_and_cross_terms_vanish() {
        let (c, f) = setup(GridSpec::flat(&[32, 32]), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let phi = random_trig_form(c.grid(), 1, 5, 6, &mut rng).unwrap();
            let dec = hodge_decompose(&c, &phi, &f, &GreenOptions::default()).unwrap();
            let v = dual_decompose(&c, &phi, &f).unwrap();
            let nb = norm_decompose(&c, &phi, &dec, &v, &f).unwrap();
            assert!(nb.closure() < 1e-10, "{nb:?}");
            assert!(nb.variant_consistency.unwrap() < 1e-10);
            assert!(cross_terms(&c, &dec).unwrap().max() < 1e-10);
            assert!(dec.residue_norm < 1e-10);
        }
    }

    #[test]
    fn three_torus_one_forms() {
        let (c, f) = setup(GridSpec::flat(&[16, 16, 16]), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let phi = random_trig_form(c.grid(), 1, 3, 3, &mut rng).unwrap();
        let dec = hodge_decompose(&c, &phi, &f, &GreenOptions::default()).unwrap();
        assert!(dec.gauge_beta < 1e-10);
        assert!(dec.residue_norm < 1e-10);
        let v = dual_decompose(&c, &phi, &f).unwrap();
        let nb = norm_decompose(&c, &phi, &dec, &v, &f).unwrap();
        assert!(!nb.middle_variant);
        assert!(nb.closure() < 1e-10);
        let cr = cross_relation_check(&dec.u, &v, &f.primal.t, &f.dual.t, false, false).unwrap();
        assert!(cr.max() < 1e-12);
    }

    #[test]
    fn embedded_torus_decomposition() {
        let (c, f) = setup(GridSpec::embedded_torus(48, 2.0, 1.0), 1);
        let g = c.grid();
        let s = DiscreteForm::scalar(g, g.sample(|x| (x[0] + x[1]).sin())).unwrap();
        let top = DiscreteForm::from_fn(g, 2, |_, x| x[1].cos() * g_density(x)).unwrap();
        let phi = &(&c.d(&s).unwrap() + &c.delta(&top).unwrap()) + &f.basis_p.combine(&[1.5, -0.5]).unwrap();
        let dec = hodge_decompose(&c, &phi, &f, &GreenOptions::default()).unwrap();
        assert_abs_diff_eq!(dec.u[0], 1.5, epsilon = 1e-9);
        assert_abs_diff_eq!(dec.u[1], -0.5, epsilon = 1e-9);
        assert!(dec.residue_norm < 1e-8, "residue {}", dec.residue_norm);
        let v = dual_decompose(&c, &phi, &f).unwrap();
        let nb = norm_decompose(&c, &phi, &dec, &v, &f).unwrap();
        assert!(nb.closure() < 1e-8, "{nb:?}");
        let cr = cross_relation_check(&dec.u, &v, &f.primal.t, &f.dual.t, true, true).unwrap();
        assert!(cr.max() < 1e-7, "{cr:?}");
    }

    fn g_density(x: &[f64]) -> f64 {
        2.0 + x[1].cos()
    }

    #[test]
    fn compact_form_reproduces_phi_and_its_dual() {
        let (c, f) = setup(GridSpec::flat(&[32, 32]), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let phi = random_trig_form(c.grid(), 1, 4, 4, &mut rng).unwrap();
        let dec = hodge_decompose(&c, &phi, &f, &GreenOptions::default()).unwrap();
        let v = dual_decompose(&c, &phi, &f).unwrap();
        let bp = middle_potential(&c, dec.beta.as_ref().unwrap()).unwrap();
        let cf = compact_assemble(&c, dec.alpha.as_ref(), Some(&bp), &dec.u, &v, &f).unwrap();
        assert!((&cf.first - &phi).norm_inf() < 1e-10 * phi.norm_inf());
        assert!(cf.star_residual < 1e-10);

        let e1 = compact_assemble(&c, None, None, &[1.0, 0.0], &[0.0, 1.0], &f).unwrap();
        assert!((&e1.first - &f.basis_p.gammas[0]).norm_inf() < 1e-15);
        assert!((&e1.second - &f.basis_p.gammas[1]).norm_inf() < 1e-15);
        let z = compact_assemble(&c, None, None, &[0.0, 0.0], &[0.0, 0.0], &f).unwrap();
        assert_eq!(z.first.norm_inf() + z.second.norm_inf(), 0.0);
    }

    #[test]
    fn compact_form_refuses_odd_dimension() {
        let (c, f) = setup(GridSpec::flat(&[8, 8, 8]), 1);
        assert!(compact_assemble(&c, None, None, &[0.0; 3], &[0.0; 3], &f).is_err());
    }

    #[test]
    fn sigma_rotations_are_orthogonal_for_odd_d() {
        let s2 = sigma2();
        let sq = [[s2[0][0] * s2[0][0] + s2[0][1] * s2[1][0], 0.0], [0.0, s2[1][0] * s2[0][1] + s2[1][1] * s2[1][1]]];
        assert_eq!(sq, [[-1.0, 0.0], [0.0, -1.0]]);
        for k in 0..16 {
            let r = rotation(0.4 * k as f64, true);
            let rtr00 = r[0][0] * r[0][0] + r[1][0] * r[1][0];
            let rtr01 = r[0][0] * r[0][1] + r[1][0] * r[1][1];
            let rtr11 = r[0][1] * r[0][1] + r[1][1] * r[1][1];
            assert_abs_diff_eq!(rtr00, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(rtr01, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(rtr11, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn cross_relation_hand_case() {
        let t = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let r = cross_relation_check(&[3.0, 4.0], &[-4.0, 3.0], &t, &t, true, true).unwrap();
        assert_eq!(r.max(), 0.0);
        let r = cross_relation_check(&[0.0, 0.0], &[0.0, 0.0], &t, &t, true, true).unwrap();
        assert_eq!(r.max(), 0.0);
        assert!(cross_relation_check(&[0.0], &[0.0, 0.0], &t, &t, true, true).is_err());
    }
}
