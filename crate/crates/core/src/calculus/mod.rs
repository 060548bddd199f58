//! Signature-aware exterior calculus on a `PeriodicGrid`: exterior derivative,
//! Hodge star, coderivative, Laplace–Beltrami operator, the bilinear pairing and
//! a minimum-norm Green solver.
//!
//! Sign conventions: `★★ = (−1)^D(p)` with `D(p) = p(n−p) + s`,
//! `δ = (−1)^C(p) ★d★` with `C(p) = np + n + 1 + s`, and `Δ = δd + dδ`.
//! With these choices `Δ` is non-negative on Riemannian grids, and the discrete
//! `δ` is the exact adjoint of the discrete `d` under the pairing.

mod green;
mod minres;
mod stencil;

use serde::Serialize;

pub use green::{GreenOptions, SolveMethod, SolveReport};
pub use stencil::Stencil;

use crate::error::{Error, Result};
use crate::mesh::{complement, integrate_manifold, permutation_sign, wedge, DiscreteForm, PeriodicGrid};

/// Parities of the two sign exponents for degree `p`.
#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignExponents {
    /// `D(p) = p(n−p) + s`.
    pub d: usize,
    /// `C(p) = np + n + 1 + s`, reduced mod 2.
    pub c: usize,
}

impl SignExponents {
    pub fn new(p: usize, n: usize, s: usize) -> Self {
        assert!(p <= n, "degree {p} exceeds dimension {n}");
        Self { d: p * (n - p) + s, c: (n * p + n + 1 + s) % 2 }
    }

    pub fn d_odd(&self) -> bool {
        self.d % 2 == 1
    }

    /// `(−1)^D(p)`.
    pub fn d_sign(&self) -> f64 {
        parity_sign(self.d)
    }

    /// `(−1)^C(p)`.
    pub fn c_sign(&self) -> f64 {
        parity_sign(self.c)
    }
}

/// `D(p) mod 2`.
pub fn sign_d(p: usize, n: usize, s: usize) -> usize {
    SignExponents::new(p, n, s).d % 2
}

pub fn parity_sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug)]
pub struct ExteriorCalculus {
    grid: PeriodicGrid,
    stencil: Stencil,
}

impl ExteriorCalculus {
    pub fn new(grid: PeriodicGrid) -> Self {
        Self { grid, stencil: Stencil::central(Stencil::DEFAULT_ORDER).expect("default order is valid") }
    }

    pub fn with_order(grid: PeriodicGrid, order: usize) -> Result<Self> {
        Ok(Self { grid, stencil: Stencil::central(order)? })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn stencil(&self) -> &Stencil {
        &self.stencil
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn signs(&self, p: usize) -> SignExponents {
        SignExponents::new(p, self.dim(), self.grid.negative_count())
    }

    /// Discrete `∂_axis` of a nodal array.
    pub fn partial(&self, f: &[f64], axis: usize) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        self.stencil.apply(f, self.grid.shape()[axis], self.grid.strides()[axis], self.grid.step(axis), &mut out);
        out
    }

    /// `(df)_J = Σ_k (−1)^k ∂_{J_k} f_{J∖J_k}`.
    pub fn d(&self, f: &DiscreteForm) -> Result<DiscreteForm> {
        self.grid.check_form(f)?;
        let n = self.dim();
        let p = f.degree();
        if p >= n {
            return Err(Error::DegreeOutOfRange { degree: p + 1, dim: n });
        }
        let mut out = DiscreteForm::zeros(&self.grid, p + 1)?;
        for (slot, tuple) in f.tuples().iter().enumerate() {
            let comp = &f.components()[slot];
            if comp.iter().all(|&c| c == 0.0) {
                continue;
            }
            for axis in complement(n, tuple) {
                let sign = parity_sign(tuple.iter().filter(|&&i| i < axis).count());
                let mut target: Vec<usize> = tuple.clone();
                target.push(axis);
                target.sort_unstable();
                let deriv = self.partial(comp, axis);
                let dst = out.component_mut(&target).expect("target tuple exists");
                dst.iter_mut().zip(deriv).for_each(|(o, v)| *o += sign * v);
            }
        }
        Ok(out)
    }

    /// Pointwise `√|g| · Π_{i∈I} s_i / |g_ii|`, the coefficient of `★dx^I` and the
    /// weight of component `I` in the pairing.
    pub fn star_weight(&self, tuple: &[usize]) -> Vec<f64> {
        let sign: f64 = tuple.iter().map(|&i| self.grid.signature(i)).product();
        let mut w: Vec<f64> = self.grid.sqrt_abs_g().iter().map(|g| sign * g).collect();
        for &i in tuple {
            w.iter_mut().zip(self.grid.metric(i)).for_each(|(w, g)| *w /= g);
        }
        w
    }

    pub fn star(&self, f: &DiscreteForm) -> Result<DiscreteForm> {
        self.grid.check_form(f)?;
        let n = self.dim();
        let mut out = DiscreteForm::zeros(&self.grid, n - f.degree())?;
        for (slot, tuple) in f.tuples().iter().enumerate() {
            let target = complement(n, tuple);
            let sign = permutation_sign(tuple, &target);
            let w = self.star_weight(tuple);
            let dst = out.component_mut(&target).expect("complement tuple exists");
            for ((o, c), w) in dst.iter_mut().zip(&f.components()[slot]).zip(w) {
                *o = sign * w * c;
            }
        }
        Ok(out)
    }

    /// `δ = (−1)^C(p) ★d★`.
    pub fn delta(&self, f: &DiscreteForm) -> Result<DiscreteForm> {
        self.grid.check_form(f)?;
        let p = f.degree();
        if p == 0 {
            return Err(Error::DegreeOutOfRange { degree: 0, dim: self.dim() });
        }
        let mut out = self.star(&self.d(&self.star(f)?)?)?;
        out.scale(self.signs(p).c_sign());
        Ok(out)
    }

    /// `Δ = δd + dδ`, dropping the half whose degree is out of range.
    pub fn laplacian(&self, f: &DiscreteForm) -> Result<DiscreteForm> {
        self.grid.check_form(f)?;
        let p = f.degree();
        let mut out = f.zeros_like();
        if p < self.dim() {
            out.axpy(1.0, &self.delta(&self.d(f)?)?);
        }
        if p > 0 {
            out.axpy(1.0, &self.d(&self.delta(f)?)?);
        }
        Ok(out)
    }

    /// `(a, b) = ∫ a ∧ ★b`, evaluated as the weighted sum `Σ_I Σ_x a_I b_I w_I · cell`.
    pub fn pairing(&self, a: &DiscreteForm, b: &DiscreteForm) -> Result<f64> {
        self.grid.check_form(a)?;
        self.grid.check_form(b)?;
        if a.degree() != b.degree() {
            return Err(Error::DegreeMismatch { expected: a.degree(), actual: b.degree() });
        }
        let mut total = 0.0;
        for (slot, tuple) in a.tuples().iter().enumerate() {
            let w = self.star_weight(tuple);
            let (ca, cb) = (&a.components()[slot], &b.components()[slot]);
            total += ca.iter().zip(cb).zip(&w).map(|((x, y), w)| x * y * w).sum::<f64>();
        }
        Ok(total * self.grid.cell_volume())
    }

    /// The pairing computed literally as the integral of `a ∧ ★b`.
    pub fn pairing_by_wedge(&self, a: &DiscreteForm, b: &DiscreteForm) -> Result<f64> {
        if a.degree() != b.degree() {
            return Err(Error::DegreeMismatch { expected: a.degree(), actual: b.degree() });
        }
        integrate_manifold(&wedge(a, &self.star(b)?)?, &self.grid)
    }

    /// Multiplies each component by its pairing weight, so that the Euclidean dot
    /// product of `weighted(a)` and `b` is the pairing up to the cell volume.
    pub(crate) fn weighted(&self, f: &DiscreteForm) -> DiscreteForm {
        let mut out = f.clone();
        let tuples = f.tuples().to_vec();
        for (slot, tuple) in tuples.iter().enumerate() {
            let w = self.star_weight(tuple);
            out.components_mut()[slot].iter_mut().zip(w).for_each(|(c, w)| *c *= w);
        }
        out
    }
}
