//! Matrix-level solutions `(E, T, Λ)` for a middle-degree Betti number of two.
//!
//! Every solution satisfies `T·T = (−1)^D I`, `E·Tᵀ = Λ` and `Λ E⁻¹ Λ = (−1)^D E`
//! with `D = m² + s`. The arithmetic is generic so the identities can be checked
//! exactly over the rationals as well as in floating point.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar field for the taxonomy: `f64` or `BigRational`.
pub trait Scalar: Clone + fmt::Debug + PartialOrd + Signed {
    fn from_int(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Square root in the field, if it exists there.
    fn sqrt_in_field(&self) -> Option<Self>;
    /// Rounding error to expect in a quantity of size `magnitude`; zero for exact fields.
    fn rounding_slack(magnitude: &Self) -> Self;
}

impl Scalar for f64 {
    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sqrt_in_field(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn rounding_slack(magnitude: &Self) -> Self {
        8.0 * f64::EPSILON * magnitude.abs()
    }
}

impl Scalar for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        let (n, d) = (self.numer().to_f64(), self.denom().to_f64());
        match (n, d) {
            (Some(n), Some(d)) => n / d,
            _ => f64::NAN,
        }
    }

    fn sqrt_in_field(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let root = |x: &BigInt| {
            let r = x.sqrt();
            (&r * &r == *x).then_some(r)
        };
        Some(BigRational::new(root(self.numer())?, root(self.denom())?))
    }

    fn rounding_slack(_: &Self) -> Self {
        num::Zero::zero()
    }
}

pub type Mat2<T> = [[T; 2]; 2];

fn zeros<T: Scalar>() -> Mat2<T> {
    [[T::zero(), T::zero()], [T::zero(), T::zero()]]
}

fn identity<T: Scalar>() -> Mat2<T> {
    [[T::one(), T::zero()], [T::zero(), T::one()]]
}

pub fn mat_mul<T: Scalar>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = zeros();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone();
        }
    }
    out
}

pub fn transpose<T: Scalar>(a: &Mat2<T>) -> Mat2<T> {
    [[a[0][0].clone(), a[1][0].clone()], [a[0][1].clone(), a[1][1].clone()]]
}

pub fn det<T: Scalar>(a: &Mat2<T>) -> T {
    a[0][0].clone() * a[1][1].clone() - a[0][1].clone() * a[1][0].clone()
}

fn scaled<T: Scalar>(a: &Mat2<T>, k: &T) -> Mat2<T> {
    let mut out = a.clone();
    out.iter_mut().flatten().for_each(|v| *v = v.clone() * k.clone());
    out
}

pub fn inverse<T: Scalar>(a: &Mat2<T>) -> Option<Mat2<T>> {
    let d = det(a);
    if d.is_zero() {
        return None;
    }
    let inv = T::one() / d;
    Some(scaled(&[[a[1][1].clone(), -a[0][1].clone()], [-a[1][0].clone(), a[0][0].clone()]], &inv))
}

/// Largest absolute entry of `a − b`.
pub fn max_abs_diff<T: Scalar>(a: &Mat2<T>, b: &Mat2<T>) -> T {
    let mut worst = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            let d = (a[i][j].clone() - b[i][j].clone()).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn to_f64_matrix<T: Scalar>(a: &Mat2<T>) -> [[f64; 2]; 2] {
    [[a[0][0].to_f64(), a[0][1].to_f64()], [a[1][0].to_f64(), a[1][1].to_f64()]]
}

fn sign_of<T: Scalar>(odd: bool) -> T {
    if odd {
        -T::one()
    } else {
        T::one()
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupLabel {
    #[serde(rename = "S2.1.1")]
    S211,
    #[serde(rename = "S2.1.2")]
    S212,
    #[serde(rename = "S2.1.3")]
    S213,
    #[serde(rename = "S2.2.1")]
    S221,
    #[serde(rename = "S2.2.2")]
    S222,
}

impl GroupLabel {
    pub const ALL: [GroupLabel; 5] = [Self::S211, Self::S212, Self::S213, Self::S221, Self::S222];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::S211 => "S2.1.1",
            Self::S212 => "S2.1.2",
            Self::S213 => "S2.1.3",
            Self::S221 => "S2.2.1",
            Self::S222 => "S2.2.2",
        }
    }

    /// Required `det T` for signature parity `s`; `None` means either sign.
    pub fn expected_det(&self, s: usize) -> Option<i8> {
        let plus_one_if = |even: bool| if even { 1 } else { -1 };
        match self {
            Self::S211 | Self::S222 => Some(plus_one_if(s % 2 == 1)),
            Self::S212 => Some(1),
            Self::S213 => Some(plus_one_if(s.is_multiple_of(2))),
            Self::S221 => None,
        }
    }

    /// Condition that admits the group, or `None` if `(m, s)` satisfies it.
    fn violated_condition(&self, m: usize, s: usize) -> Option<&'static str> {
        let (m_even, s_even) = (m.is_multiple_of(2), s.is_multiple_of(2));
        match self {
            Self::S211 | Self::S222 if !m_even => Some("m must be even"),
            Self::S212 if !(m_even && s_even) => Some("m and s must both be even"),
            Self::S213 if m_even => Some("m must be odd"),
            Self::S221 if !m_even => Some("m must be even"),
            Self::S221 if !s_even => Some("T² = (−1)^D I with diagonal T needs even D, so s must be even"),
            _ => None,
        }
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GroupLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|g| g.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown group {s:?}")))
    }
}

pub fn admissible_groups(m: usize, s: usize) -> Vec<GroupLabel> {
    GroupLabel::ALL.into_iter().filter(|g| g.violated_condition(m, s).is_none()).collect()
}

/// Free parameters of each group. Signs are `±1`.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupParams<T> {
    /// `λ₂₂ = (−1)^s E₁₂² / λ₁₁`.
    S211 { e12: T, l11: T },
    /// `λ₁₂ = sign · E₁₂`.
    S212 { e12: T, sign: i8 },
    /// `λ₂₂ = (λ₁₂² − (−1)^{s+1} E₁₂²) / λ₁₁`.
    S213 { e12: T, l11: T, l12: T },
    /// `λ₁₁ = sign1 · E₁₁`, `λ₂₂ = sign2 · E₂₂`.
    S221 { e11: T, e22: T, sign1: i8, sign2: i8 },
    /// `λ₁₁ = sign · E₁₁ · √((−1)^s − λ₁₂²/(E₁₁E₂₂))`, `λ₂₂ = −E₂₂ λ₁₁ / E₁₁`.
    S222 { e11: T, e22: T, l12: T, sign: i8 },
}

impl<T: Scalar> GroupParams<T> {
    pub fn group(&self) -> GroupLabel {
        match self {
            Self::S211 { .. } => GroupLabel::S211,
            Self::S212 { .. } => GroupLabel::S212,
            Self::S213 { .. } => GroupLabel::S213,
            Self::S221 { .. } => GroupLabel::S221,
            Self::S222 { .. } => GroupLabel::S222,
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> GroupParams<U> {
        match self {
            Self::S211 { e12, l11 } => GroupParams::S211 { e12: f(e12), l11: f(l11) },
            Self::S212 { e12, sign } => GroupParams::S212 { e12: f(e12), sign: *sign },
            Self::S213 { e12, l11, l12 } => GroupParams::S213 { e12: f(e12), l11: f(l11), l12: f(l12) },
            Self::S221 { e11, e22, sign1, sign2 } => {
                GroupParams::S221 { e11: f(e11), e22: f(e22), sign1: *sign1, sign2: *sign2 }
            }
            Self::S222 { e11, e22, l12, sign } => {
                GroupParams::S222 { e11: f(e11), e22: f(e22), l12: f(l12), sign: *sign }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaxonomySolution<T> {
    pub group: GroupLabel,
    pub m: usize,
    pub s: usize,
    pub e: Mat2<T>,
    pub t: Mat2<T>,
    pub lambda: Mat2<T>,
    pub det_t: T,
    pub residuals: TaxonomyResiduals<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaxonomyResiduals<T> {
    /// `T·T − (−1)^D I`.
    pub product: T,
    /// `E·Tᵀ − Λ`.
    pub gram: T,
    /// `Λ E⁻¹ Λ − (−1)^D E`.
    pub constraint: T,
    /// `Λ − Λᵀ`.
    pub lambda_symmetry: T,
    /// `E − (−1)^m Eᵀ`.
    pub e_symmetry: T,
}

impl<T: Scalar> TaxonomyResiduals<T> {
    pub fn max(&self) -> T {
        let mut worst = T::zero();
        for v in [&self.product, &self.gram, &self.constraint, &self.lambda_symmetry, &self.e_symmetry] {
            if *v > worst {
                worst = v.clone();
            }
        }
        worst
    }
}

fn sign_param<T: Scalar>(sign: i8) -> Result<T> {
    match sign {
        1 => Ok(T::one()),
        -1 => Ok(-T::one()),
        other => Err(Error::InvalidInput(format!("sign parameter must be ±1, got {other}"))),
    }
}

fn nonzero<T: Scalar>(name: &str, v: &T) -> Result<()> {
    if v.is_zero() {
        Err(Error::Infeasible(format!("{name} must be non-zero")))
    } else {
        Ok(())
    }
}

/// Builds the matrices of a group from its free parameters.
pub fn solve_group<T: Scalar>(m: usize, s: usize, params: &GroupParams<T>) -> Result<TaxonomySolution<T>> {
    let group = params.group();
    if let Some(why) = group.violated_condition(m, s) {
        return Err(Error::Infeasible(format!("{group} is not admissible for m = {m}, s = {s}: {why}")));
    }
    let ps: T = sign_of(s % 2 == 1);
    let z = T::zero;
    let (e, lambda, t) = match params {
        GroupParams::S211 { e12, l11 } => {
            nonzero("E12", e12)?;
            nonzero("lambda11", l11)?;
            let l22 = ps * e12.clone() * e12.clone() / l11.clone();
            let e = [[z(), e12.clone()], [e12.clone(), z()]];
            let t = [[z(), l11.clone() / e12.clone()], [l22.clone() / e12.clone(), z()]];
            (e, [[l11.clone(), z()], [z(), l22]], t)
        }
        GroupParams::S212 { e12, sign } => {
            nonzero("E12", e12)?;
            let l12 = sign_param::<T>(*sign)? * e12.clone();
            let r = l12.clone() / e12.clone();
            let e = [[z(), e12.clone()], [e12.clone(), z()]];
            (e, [[z(), l12.clone()], [l12, z()]], [[r.clone(), z()], [z(), r]])
        }
        GroupParams::S213 { e12, l11, l12 } => {
            nonzero("E12", e12)?;
            nonzero("lambda11", l11)?;
            let e2 = e12.clone() * e12.clone();
            let l22 = (l12.clone() * l12.clone() + ps * e2) / l11.clone();
            let e = [[z(), e12.clone()], [-e12.clone(), z()]];
            let t = [
                [-l12.clone() / e12.clone(), l11.clone() / e12.clone()],
                [-l22.clone() / e12.clone(), l12.clone() / e12.clone()],
            ];
            (e, [[l11.clone(), l12.clone()], [l12.clone(), l22]], t)
        }
        GroupParams::S221 { e11, e22, sign1, sign2 } => {
            nonzero("E11", e11)?;
            nonzero("E22", e22)?;
            let (a, d) = (sign_param::<T>(*sign1)?, sign_param::<T>(*sign2)?);
            let lambda = [[a.clone() * e11.clone(), z()], [z(), d.clone() * e22.clone()]];
            ([[e11.clone(), z()], [z(), e22.clone()]], lambda, [[a, z()], [z(), d]])
        }
        GroupParams::S222 { e11, e22, l12, sign } => {
            nonzero("E11", e11)?;
            nonzero("E22", e22)?;
            let ratio = l12.clone() * l12.clone() / (e11.clone() * e22.clone());
            let slack = T::rounding_slack(&(T::one() + ratio.abs()));
            let mut a2 = ps - ratio;
            if a2.is_negative() && -a2.clone() <= slack {
                a2 = z();
            }
            if a2.is_negative() {
                return Err(Error::Infeasible(format!(
                    "(lambda11/E11)^2 = (-1)^s - lambda12^2/(E11*E22) = {:.6} must be >= 0",
                    a2.to_f64()
                )));
            }
            let a = a2.sqrt_in_field().ok_or_else(|| {
                Error::Infeasible(format!("(lambda11/E11)^2 = {a2:?} has no square root in the chosen field"))
            })? * sign_param::<T>(*sign)?;
            let l11 = a.clone() * e11.clone();
            let l22 = -e22.clone() * a.clone();
            let t = [[a.clone(), l12.clone() / e22.clone()], [l12.clone() / e11.clone(), -a]];
            ([[e11.clone(), z()], [z(), e22.clone()]], [[l11, l12.clone()], [l12.clone(), l22]], t)
        }
    };
    let residuals = triple_residuals(&e, &t, &lambda, m, s)?;
    Ok(TaxonomySolution { group, m, s, det_t: det(&t), e, t, lambda, residuals })
}

/// Identity residuals of a middle-degree triple with `D = m² + s`.
pub fn triple_residuals<T: Scalar>(
    e: &Mat2<T>,
    t: &Mat2<T>,
    lambda: &Mat2<T>,
    m: usize,
    s: usize,
) -> Result<TaxonomyResiduals<T>> {
    let sd: T = sign_of((m * m + s) % 2 == 1);
    let e_inv = inverse(e).ok_or_else(|| Error::Singular("E".into()))?;
    Ok(TaxonomyResiduals {
        product: max_abs_diff(&mat_mul(t, t), &scaled(&identity(), &sd)),
        gram: max_abs_diff(&mat_mul(e, &transpose(t)), lambda),
        constraint: max_abs_diff(&mat_mul(&mat_mul(lambda, &e_inv), lambda), &scaled(e, &sd)),
        lambda_symmetry: max_abs_diff(lambda, &transpose(lambda)),
        e_symmetry: max_abs_diff(e, &scaled(&transpose(e), &sign_of(m % 2 == 1))),
    })
}

/// Group of a numeric triple, judged by its zero pattern with tolerance `tol`
/// relative to the largest entry of each matrix.
pub fn classify<T: Scalar>(e: &Mat2<T>, t: &Mat2<T>, m: usize, s: usize, tol: f64) -> Option<GroupLabel> {
    let small = |a: &Mat2<T>, i: usize, j: usize| {
        let scale = a.iter().flatten().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
        a[i][j].to_f64().abs() <= tol * scale
    };
    let label = if small(e, 0, 0) && small(e, 1, 1) {
        if m % 2 == 1 {
            GroupLabel::S213
        } else if small(t, 0, 0) && small(t, 1, 1) {
            GroupLabel::S211
        } else if small(t, 0, 1) && small(t, 1, 0) {
            GroupLabel::S212
        } else {
            return None;
        }
    } else if small(e, 0, 1) && small(e, 1, 0) {
        if small(t, 0, 1) && small(t, 1, 0) {
            GroupLabel::S221
        } else {
            GroupLabel::S222
        }
    } else {
        return None;
    };
    label.violated_condition(m, s).is_none().then_some(label)
}

/// `[[u, v], [−(1+u²)/v, −u]]`, which squares to `−I`.
pub fn family_t<T: Scalar>(u: T, v: T) -> Result<Mat2<T>> {
    if v.is_zero() {
        return Err(Error::InvalidInput("family parameter v must be non-zero".into()));
    }
    let c = -(T::one() + u.clone() * u.clone()) / v.clone();
    Ok([[u.clone(), v], [c, -u]])
}

#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Reality {
    Real,
    Complex,
}

/// A real `T` with `T·T = (−1)^D I` exists iff `β·D` is even.
pub fn reality_rule(beta: usize, d_odd: bool) -> Result<Reality> {
    if beta == 0 {
        return Err(Error::InvalidInput("Betti number must be at least 1".into()));
    }
    Ok(if d_odd && beta % 2 == 1 { Reality::Complex } else { Reality::Real })
}

/// Refuses Betti numbers the classifier does not cover.
pub fn check_betti(beta: usize) -> Result<()> {
    if beta > 2 {
        return Err(Error::Unsupported(format!("taxonomy covers Betti number 2 only; got {beta}")));
    }
    Ok(())
}

fn random_rational<R: Rng + ?Sized>(rng: &mut R, max: i64) -> BigRational {
    loop {
        let num = rng.random_range(-max..=max);
        let den = rng.random_range(1..=max);
        if num != 0 {
            return BigRational::new(BigInt::from(num), BigInt::from(den));
        }
    }
}

fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> i8 {
    if rng.random_bool(0.5) {
        1
    } else {
        -1
    }
}

/// Random feasible rational parameters for `group` at signature parity `s`.
pub fn random_params<R: Rng + ?Sized>(group: GroupLabel, s: usize, rng: &mut R) -> GroupParams<BigRational> {
    let q = |rng: &mut R| random_rational(rng, 9);
    match group {
        GroupLabel::S211 => GroupParams::S211 { e12: q(rng), l11: q(rng) },
        GroupLabel::S212 => GroupParams::S212 { e12: q(rng), sign: random_sign(rng) },
        GroupLabel::S213 => GroupParams::S213 { e12: q(rng), l11: q(rng), l12: q(rng) },
        GroupLabel::S221 => {
            GroupParams::S221 { e11: q(rng), e22: q(rng), sign1: random_sign(rng), sign2: random_sign(rng) }
        }
        GroupLabel::S222 => {
            // pick A = λ₁₁/E₁₁ first so the square root is exact, then solve for E₂₂
            let ps = BigRational::from_int(if s % 2 == 1 { -1 } else { 1 });
            let (a, l12, e11) = loop {
                let a = if s.is_multiple_of(2) {
                    let den = rng.random_range(2..=9i64);
                    BigRational::new(BigInt::from(rng.random_range(-(den - 1)..den)), BigInt::from(den))
                } else {
                    q(rng)
                };
                if a.clone() * a.clone() != ps {
                    break (a, q(rng), q(rng));
                }
            };
            let e22 = l12.clone() * l12.clone() / (e11.clone() * (ps - a.clone() * a.clone()));
            let sign = if a.is_negative() { -1 } else { 1 };
            GroupParams::S222 { e11, e22, l12, sign }
        }
    }
}

/// Reports-friendly view of a solution.
#[derive(Serialize, Clone, Debug)]
pub struct SolutionView {
    pub group: GroupLabel,
    pub m: usize,
    pub s: usize,
    #[serde(rename = "E")]
    pub e: [[f64; 2]; 2],
    #[serde(rename = "T")]
    pub t: [[f64; 2]; 2],
    #[serde(rename = "Lambda")]
    pub lambda: [[f64; 2]; 2],
    pub det_t: f64,
    pub expected_det: Option<i8>,
    pub constraints_residual: f64,
    pub exact: bool,
}

impl<T: Scalar> TaxonomySolution<T> {
    pub fn view(&self, exact: bool) -> SolutionView {
        SolutionView {
            group: self.group,
            m: self.m,
            s: self.s,
            e: to_f64_matrix(&self.e),
            t: to_f64_matrix(&self.t),
            lambda: to_f64_matrix(&self.lambda),
            det_t: self.det_t.to_f64(),
            expected_det: self.group.expected_det(self.s),
            constraints_residual: self.residuals.max().to_f64(),
            exact,
        }
    }

    /// Whether `det T` matches the table entry for the group.
    pub fn det_matches(&self) -> bool {
        let d = self.det_t.to_f64();
        match self.group.expected_det(self.s) {
            Some(sign) => (d - f64::from(sign)).abs() <= 1e-12,
            None => (d.abs() - 1.0).abs() <= 1e-12,
        }
    }
}
