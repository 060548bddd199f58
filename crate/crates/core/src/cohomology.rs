//! Representative strong harmonic forms, the duality matrices E, T and Λ, and the
//! Poincaré pairing permutation P.
//!
//! For a degree `p` and its complement `q = n − p`:
//! - `E^(p)_ab = ∫ γ^(p)_a ∧ γ^(q)_b`,
//! - `T^(q)_ab = ∫_{z^(q)_b} ★γ^(p)_a`, so that `★γ^(p)_a = Σ_b T^(q)_ab γ^(q)_b`,
//! - `Λ^(p)_ab = (γ^(p)_a, γ^(p)_b)`.
//!
//! The identities checked here are `T^(q) T^(p) = (−1)^D I`, `E^(p) (T^(q))ᵀ = Λ^(p)`,
//! `E^(p) = (−1)^{pq} (E^(q))ᵀ` and `Λ^(p) (E^(q))⁻¹ Λ^(q) = (−1)^D E^(p)`, which is
//! `Λ E⁻¹ Λ = (−1)^D E` in the middle degree.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::calculus::{ExteriorCalculus, GreenOptions};
use crate::error::{Error, Result};
use crate::mesh::{binomial, index_tuples, integrate_cycle, integrate_manifold, wedge, CycleSpec, DiscreteForm};

/// Relative threshold deciding which entries of a row of E count as non-null.
pub const PAIR_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct BasisOptions {
    /// Target for `‖δγ‖∞ / ‖γ‖∞` after harmonic projection.
    pub coclosure_tol: f64,
    pub max_projections: usize,
    /// Sup-norm tolerance of the expansion `★γ^(p)_a = Σ_b τ_ab γ^(q)_b`.
    pub expansion_tol: f64,
    pub green: GreenOptions,
}

impl Default for BasisOptions {
    fn default() -> Self {
        Self { coclosure_tol: 1e-8, max_projections: 3, expansion_tol: 1e-6, green: GreenOptions::default() }
    }
}

#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    pub degree: usize,
    pub betti: usize,
    pub gammas: Vec<DiscreteForm>,
    pub cycles: Vec<CycleSpec>,
    /// `max |∫_{z_b} γ_a − δ_ab|`.
    pub normalization_residual: f64,
    /// `max_a ‖dγ_a‖∞ / ‖γ_a‖∞`.
    pub closure_residual: f64,
    /// `max_a ‖δγ_a‖∞ / ‖γ_a‖∞`.
    pub coclosure_residual: f64,
}

impl CohomologyBasis {
    /// Sum `Σ_a c_a γ_a`.
    pub fn combine(&self, coeffs: &[f64]) -> Result<DiscreteForm> {
        if coeffs.len() != self.betti {
            return Err(Error::InvalidInput(format!("{} coefficients for {} classes", coeffs.len(), self.betti)));
        }
        let mut out = self.gammas[0].zeros_like();
        for (g, c) in self.gammas.iter().zip(coeffs) {
            out.axpy(*c, g);
        }
        Ok(out)
    }

    /// Cycle integrals `∫_{z_a} φ`.
    pub fn cycle_integrals(&self, calc: &ExteriorCalculus, phi: &DiscreteForm) -> Result<Vec<f64>> {
        self.cycles.iter().map(|z| integrate_cycle(phi, z, calc.grid())).collect()
    }

    /// Class labels, one index tuple per cycle.
    pub fn labels(&self) -> Vec<Vec<usize>> {
        self.cycles.iter().map(|z| z.axes.clone()).collect()
    }

    pub fn index_of(&self, axes: &[usize]) -> Option<usize> {
        self.cycles.iter().position(|z| z.axes == axes)
    }
}

/// Builds the normalized representatives of degree `p` on a torus grid.
///
/// Seeds are `dx^I / Π_{a∈I} L_a`. On variable metrics each seed is moved within its
/// class by `seed ← seed − d G(δ seed)` until it is co-closed; the top degree uses
/// `★1`, which is co-closed by construction. The set is then renormalized by the
/// inverse of its cycle-integral matrix.
pub fn build_basis(calc: &ExteriorCalculus, p: usize, opts: &BasisOptions) -> Result<CohomologyBasis> {
    let grid = calc.grid();
    let n = grid.dim();
    if p > n {
        return Err(Error::DegreeOutOfRange { degree: p, dim: n });
    }
    let tuples = index_tuples(n, p);
    let cycles: Vec<CycleSpec> = tuples.iter().map(|t| CycleSpec::at_origin(grid, t.clone())).collect::<Result<_>>()?;

    let mut seeds = Vec::with_capacity(tuples.len());
    for tuple in &tuples {
        let length: f64 = tuple.iter().map(|&a| grid.period(a)).product();
        let mut seed = DiscreteForm::monomial(grid, tuple, 1.0 / length)?;
        if !grid.is_constant_metric() {
            if p == n {
                seed = calc.star(&DiscreteForm::monomial(grid, &[], 1.0 / length)?)?;
            } else if p > 0 {
                project_harmonic(calc, &mut seed, opts)?;
            }
        }
        seeds.push(seed);
    }

    let beta = seeds.len();
    let mut m = DMatrix::zeros(beta, beta);
    for (a, seed) in seeds.iter().enumerate() {
        for (b, z) in cycles.iter().enumerate() {
            m[(a, b)] = integrate_cycle(seed, z, grid)?;
        }
    }
    let inv =
        m.clone().try_inverse().ok_or_else(|| Error::Singular("cycle-integral matrix of the seed forms".into()))?;
    let gammas: Vec<DiscreteForm> = (0..beta)
        .map(|a| {
            let mut g = seeds[0].zeros_like();
            for (c, seed) in seeds.iter().enumerate() {
                if inv[(a, c)] != 0.0 {
                    g.axpy(inv[(a, c)], seed);
                }
            }
            g
        })
        .collect();

    let mut basis = CohomologyBasis {
        degree: p,
        betti: beta,
        gammas,
        cycles,
        normalization_residual: 0.0,
        closure_residual: 0.0,
        coclosure_residual: 0.0,
    };
    debug_assert_eq!(beta, binomial(n, p));
    basis.normalization_residual = normalization_residual(calc, &basis)?;
    for g in &basis.gammas {
        let scale = g.norm_inf();
        if p < n {
            basis.closure_residual = basis.closure_residual.max(calc.d(g)?.norm_inf() / scale);
        }
        if p > 0 {
            basis.coclosure_residual = basis.coclosure_residual.max(calc.delta(g)?.norm_inf() / scale);
        }
    }
    Ok(basis)
}

fn project_harmonic(calc: &ExteriorCalculus, seed: &mut DiscreteForm, opts: &BasisOptions) -> Result<()> {
    for _ in 0..opts.max_projections {
        let co = calc.delta(seed)?;
        if co.norm_inf() <= opts.coclosure_tol * seed.norm_inf() {
            return Ok(());
        }
        let (alpha, _) = calc.green_solve(&co, &opts.green)?;
        seed.axpy(-1.0, &calc.d(&alpha)?);
    }
    Ok(())
}

fn normalization_residual(calc: &ExteriorCalculus, basis: &CohomologyBasis) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (a, g) in basis.gammas.iter().enumerate() {
        for (b, v) in basis.cycle_integrals(calc, g)?.into_iter().enumerate() {
            worst = worst.max((v - if a == b { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok(worst)
}

/// `E^(p)` for bases of complementary degrees.
pub fn matrix_e(basis_p: &CohomologyBasis, basis_q: &CohomologyBasis, calc: &ExteriorCalculus) -> Result<DMatrix<f64>> {
    let n = calc.dim();
    if basis_p.degree + basis_q.degree != n {
        return Err(Error::DegreeMismatch { expected: n - basis_p.degree, actual: basis_q.degree });
    }
    let mut e = DMatrix::zeros(basis_p.betti, basis_q.betti);
    for (a, ga) in basis_p.gammas.iter().enumerate() {
        for (b, gb) in basis_q.gammas.iter().enumerate() {
            e[(a, b)] = integrate_manifold(&wedge(ga, gb)?, calc.grid())?;
        }
    }
    Ok(e)
}

/// Pairing permutation: `P(a)` is the column of the single entry of row `a` above
/// `PAIR_TOL` times the row maximum.
pub fn pairing_permutation(e: &DMatrix<f64>) -> Result<Vec<usize>> {
    let mut perm = Vec::with_capacity(e.nrows());
    for a in 0..e.nrows() {
        let row = e.row(a);
        let max = row.amax();
        let hits: Vec<usize> = (0..e.ncols()).filter(|&b| max > 0.0 && row[b].abs() > PAIR_TOL * max).collect();
        if hits.len() != 1 {
            return Err(Error::DualityUnresolved { row: a, count: hits.len() });
        }
        perm.push(hits[0]);
    }
    let mut seen = vec![false; e.ncols()];
    for (a, &b) in perm.iter().enumerate() {
        if std::mem::replace(&mut seen[b], true) {
            return Err(Error::DualityUnresolved { row: a, count: 2 });
        }
    }
    Ok(perm)
}

/// `T^(q)` with `T_ab = ∫_{z^(q)_b} ★γ^(p)_a`. Fails if `★γ^(p)_a` is not reproduced by
/// its expansion in the `γ^(q)` set to within `expansion_tol` (relative sup-norm).
pub fn matrix_t(
    basis_p: &CohomologyBasis,
    basis_q: &CohomologyBasis,
    calc: &ExteriorCalculus,
    expansion_tol: f64,
) -> Result<(DMatrix<f64>, f64)> {
    let mut t = DMatrix::zeros(basis_p.betti, basis_q.betti);
    let mut worst: f64 = 0.0;
    for (a, ga) in basis_p.gammas.iter().enumerate() {
        let sg = calc.star(ga)?;
        let row = basis_q.cycle_integrals(calc, &sg)?;
        let expansion = basis_q.combine(&row)?;
        worst = worst.max((&sg - &expansion).norm_inf() / sg.norm_inf());
        for (b, v) in row.into_iter().enumerate() {
            t[(a, b)] = v;
        }
    }
    if worst > expansion_tol {
        return Err(Error::ExpansionResidual { residual: worst, tolerance: expansion_tol });
    }
    Ok((t, worst))
}

/// Gram matrix `Λ_ab = (γ_a, γ_b)`.
pub fn matrix_lambda(basis: &CohomologyBasis, calc: &ExteriorCalculus) -> Result<DMatrix<f64>> {
    let k = basis.betti;
    let mut l = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            l[(a, b)] = calc.pairing(&basis.gammas[a], &basis.gammas[b])?;
        }
    }
    Ok(l)
}

/// `E`, `T`, `Λ` and `P` attached to one degree.
#[derive(Serialize, Clone, Debug)]
pub struct MatrixTriple {
    pub degree: usize,
    #[serde(serialize_with = "serialize_matrix")]
    pub e: DMatrix<f64>,
    /// Expansion of `★γ` of this degree in the complementary set.
    #[serde(serialize_with = "serialize_matrix")]
    pub t: DMatrix<f64>,
    #[serde(serialize_with = "serialize_matrix")]
    pub lambda: DMatrix<f64>,
    pub p: Vec<usize>,
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn serialize_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&matrix_rows(m), s)
}

/// Bases and matrices for a degree `p` and its complement.
#[derive(Clone, Debug)]
pub struct DualityFrame {
    pub n: usize,
    pub s: usize,
    pub basis_p: CohomologyBasis,
    pub basis_q: CohomologyBasis,
    pub primal: MatrixTriple,
    pub dual: MatrixTriple,
    pub expansion_residual: f64,
}

impl DualityFrame {
    pub fn build(calc: &ExteriorCalculus, p: usize, opts: &BasisOptions) -> Result<Self> {
        let n = calc.dim();
        if p > n {
            return Err(Error::DegreeOutOfRange { degree: p, dim: n });
        }
        let basis_p = build_basis(calc, p, opts)?;
        let basis_q = if 2 * p == n { basis_p.clone() } else { build_basis(calc, n - p, opts)? };
        Self::from_bases(calc, basis_p, basis_q, opts.expansion_tol)
    }

    pub fn from_bases(
        calc: &ExteriorCalculus,
        basis_p: CohomologyBasis,
        basis_q: CohomologyBasis,
        expansion_tol: f64,
    ) -> Result<Self> {
        let triple = |a: &CohomologyBasis, b: &CohomologyBasis| -> Result<(MatrixTriple, f64)> {
            let e = matrix_e(a, b, calc)?;
            let p = pairing_permutation(&e)?;
            let (t, res) = matrix_t(a, b, calc, expansion_tol)?;
            let lambda = matrix_lambda(a, calc)?;
            Ok((MatrixTriple { degree: a.degree, e, t, lambda, p }, res))
        };
        let (primal, r1) = triple(&basis_p, &basis_q)?;
        let (dual, r2) = triple(&basis_q, &basis_p)?;
        Ok(Self {
            n: calc.dim(),
            s: calc.grid().negative_count(),
            basis_p,
            basis_q,
            primal,
            dual,
            expansion_residual: r1.max(r2),
        })
    }

    pub fn degree(&self) -> usize {
        self.basis_p.degree
    }

    pub fn d_sign(&self) -> f64 {
        crate::calculus::SignExponents::new(self.degree(), self.n, self.s).d_sign()
    }

    /// Basis and triple belonging to a degree, which must be `p` or `n − p`.
    pub fn side(&self, degree: usize) -> Result<(&CohomologyBasis, &MatrixTriple, &CohomologyBasis)> {
        if degree == self.basis_p.degree {
            Ok((&self.basis_p, &self.primal, &self.basis_q))
        } else if degree == self.basis_q.degree {
            Ok((&self.basis_q, &self.dual, &self.basis_p))
        } else {
            Err(Error::DegreeMismatch { expected: self.basis_p.degree, actual: degree })
        }
    }

    /// Class coefficients of `φ` through the Poincaré-dual functional:
    /// `u = E^{-T} w` with `w_c = ∫ φ ∧ γ^(n−k)_c`. For closed `φ` this equals the cycle
    /// integrals `∫_{z_a} φ`; it also vanishes identically on `dα` and `δβ`.
    pub fn class_coefficients(&self, calc: &ExteriorCalculus, phi: &DiscreteForm) -> Result<Vec<f64>> {
        let (_, triple, other) = self.side(phi.degree())?;
        let w: Vec<f64> =
            other.gammas.iter().map(|g| integrate_manifold(&wedge(phi, g)?, calc.grid())).collect::<Result<_>>()?;
        let et = triple.e.transpose();
        let u =
            et.lu().solve(&nalgebra::DVector::from_vec(w)).ok_or_else(|| Error::Singular("pairing matrix E".into()))?;
        Ok(u.iter().copied().collect())
    }

    pub fn verify(&self) -> Result<IdentityResiduals> {
        verify_frame(&self.primal, &self.dual, self.n, self.s)
    }
}

/// Max-abs residuals of the matrix identities.
#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct IdentityResiduals {
    /// `T^(q) T^(p) − (−1)^D I`.
    pub product: f64,
    /// `E^(p) (T^(q))ᵀ − Λ^(p)`.
    pub gram: f64,
    /// `Λ^(p) (E^(q))⁻¹ Λ^(q) − (−1)^D E^(p)`.
    pub constraint: f64,
    /// `E^(p) − (−1)^{pq} (E^(q))ᵀ`.
    pub transpose: f64,
    /// `Λ − Λᵀ`.
    pub symmetry: f64,
    /// `det T^(q) · det T^(p) − (−1)^{βD}`; in the middle degree this is the
    /// reality condition `det(T)² = (−1)^{βD}`.
    pub reality: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        [self.product, self.gram, self.constraint, self.transpose, self.symmetry, self.reality]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.amax()
}

pub fn verify_frame(primal: &MatrixTriple, dual: &MatrixTriple, n: usize, s: usize) -> Result<IdentityResiduals> {
    let p = primal.degree;
    let q = dual.degree;
    let beta = primal.e.nrows();
    let signs = crate::calculus::SignExponents::new(p, n, s);
    let sd = signs.d_sign();
    let id = DMatrix::<f64>::identity(beta, beta);
    let e_q_inv = dual.e.clone().try_inverse().ok_or_else(|| Error::Singular("pairing matrix E".into()))?;
    let pq_sign = crate::calculus::parity_sign(p * q);
    let reality_target = crate::calculus::parity_sign(beta * signs.d);
    Ok(IdentityResiduals {
        product: max_abs(&(&primal.t * &dual.t - &id * sd)),
        gram: max_abs(&(&primal.e * primal.t.transpose() - &primal.lambda)),
        constraint: max_abs(&(&primal.lambda * e_q_inv * &dual.lambda - &primal.e * sd)),
        transpose: max_abs(&(&primal.e - dual.e.transpose() * pq_sign)),
        symmetry: max_abs(&(&primal.lambda - primal.lambda.transpose())),
        reality: (primal.t.determinant() * dual.t.determinant() - reality_target).abs(),
    })
}

/// Middle-degree check of one triple on a `2m`-dimensional grid with `s` negative
/// signature entries, where E, T and Λ each serve as their own complement.
pub fn verify_triple(
    e: &DMatrix<f64>,
    t: &DMatrix<f64>,
    lambda: &DMatrix<f64>,
    m: usize,
    s: usize,
) -> Result<IdentityResiduals> {
    if !(e.is_square() && t.shape() == e.shape() && lambda.shape() == e.shape()) {
        return Err(Error::InvalidInput("matrices must be square and of equal size".into()));
    }
    let triple = MatrixTriple { degree: m, e: e.clone(), t: t.clone(), lambda: lambda.clone(), p: Vec::new() };
    verify_frame(&triple, &triple, 2 * m, s)
}

/// When `Λ` is diagonal, `★γ_a = (λ_a / ε_{a,P(a)}) γ_{P(a)}`; returns the worst
/// relative sup-norm deviation, or `None` if `Λ` is not diagonal within `tol`.
pub fn orthogonal_corollary_residual(frame: &DualityFrame, calc: &ExteriorCalculus, tol: f64) -> Result<Option<f64>> {
    let l = &frame.primal.lambda;
    let scale = l.amax();
    for a in 0..l.nrows() {
        for b in 0..l.ncols() {
            if a != b && l[(a, b)].abs() > tol * scale {
                return Ok(None);
            }
        }
    }
    let mut worst: f64 = 0.0;
    for (a, ga) in frame.basis_p.gammas.iter().enumerate() {
        let pa = frame.primal.p[a];
        let coeff = l[(a, a)] / frame.primal.e[(a, pa)];
        let predicted = &frame.basis_q.gammas[pa] * coeff;
        let sg = calc.star(ga)?;
        worst = worst.max((&sg - &predicted).norm_inf() / sg.norm_inf());
    }
    Ok(Some(worst))
}
