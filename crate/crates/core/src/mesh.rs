//! Periodic structured grids with diagonal metrics, discrete differential forms
//! sampled at the grid nodes, the wedge product, and rectangle-rule integration
//! over the whole torus and over coordinate sub-tori.
//!
//! Every form component lives on the same collocated node set. Integrals use the
//! periodic rectangle rule everywhere, which is exact for trigonometric
//! polynomials below the Nyquist degree.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PERIOD: f64 = 2.0 * PI;

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MetricPreset {
    Flat,
    /// `ds² = (R + r cos v)² du² + r² dv²` on the 2-torus, u = axis 0, v = axis 1.
    EmbeddedTorus,
}

/// Grid manifest. Serializes to the flat JSON layout
/// `{"dim":2,"n":[..],"period":[..],"signature":[..],"metric":"embedded-torus","R":2.0,"r":1.0}`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    #[serde(rename = "n")]
    pub points: Vec<usize>,
    pub period: Vec<f64>,
    pub signature: Vec<i8>,
    pub metric: MetricPreset,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub major_radius: Option<f64>,
    #[serde(rename = "r", default, skip_serializing_if = "Option::is_none")]
    pub minor_radius: Option<f64>,
}

impl GridSpec {
    /// Flat Riemannian torus with `points[a]` nodes on axis `a` and period 2π.
    pub fn flat(points: &[usize]) -> Self {
        Self {
            dim: points.len(),
            points: points.to_vec(),
            period: vec![DEFAULT_PERIOD; points.len()],
            signature: vec![1; points.len()],
            metric: MetricPreset::Flat,
            major_radius: None,
            minor_radius: None,
        }
    }

    /// Flat 4-torus with signature (−1, 1, 1, 1).
    pub fn minkowski(points: usize) -> Self {
        Self::flat(&[points; 4]).with_signature(&[-1, 1, 1, 1])
    }

    pub fn embedded_torus(points: usize, major: f64, minor: f64) -> Self {
        Self {
            metric: MetricPreset::EmbeddedTorus,
            major_radius: Some(major),
            minor_radius: Some(minor),
            ..Self::flat(&[points, points])
        }
    }

    pub fn with_signature(mut self, signature: &[i8]) -> Self {
        self.signature = signature.to_vec();
        self
    }

    /// Number of negative signature entries.
    pub fn negative_count(&self) -> usize {
        self.signature.iter().filter(|&&s| s < 0).count()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        if !(1..=4).contains(&n) {
            return Err(Error::InvalidGrid(format!("dimension {n} not in 1..=4")));
        }
        if self.points.len() != n || self.period.len() != n || self.signature.len() != n {
            return Err(Error::InvalidGrid("points, period and signature must have one entry per axis".into()));
        }
        for (a, &np) in self.points.iter().enumerate() {
            if np < 4 {
                return Err(Error::InvalidGrid(format!("axis {a}: {np} points, need at least 4")));
            }
            if np % 2 != 0 {
                return Err(Error::InvalidGrid(format!("axis {a}: point count {np} is odd")));
            }
        }
        if let Some(a) = self.period.iter().position(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidGrid(format!("axis {a}: period must be positive")));
        }
        if let Some(a) = self.signature.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidGrid(format!("axis {a}: signature entries must be ±1")));
        }
        if self.metric == MetricPreset::EmbeddedTorus {
            if n != 2 {
                return Err(Error::InvalidGrid("embedded torus requires dim = 2".into()));
            }
            let (big, small) = match (self.major_radius, self.minor_radius) {
                (Some(big), Some(small)) => (big, small),
                _ => return Err(Error::InvalidGrid("embedded torus requires R and r".into())),
            };
            if !(small > 0.0 && big > small && big.is_finite()) {
                return Err(Error::InvalidGrid(format!(
                    "embedded torus needs R > r > 0 (got R = {big}, r = {small}); the metric degenerates"
                )));
            }
        }
        Ok(())
    }
}

/// Sampling lattice on the n-torus with a diagonal, position-dependent metric.
///
/// `metric_diag[a][x]` is the positive scale `|g_aa|` at node `x`; the sign of each
/// axis is carried by the signature.
#[derive(Clone, Debug)]
pub struct PeriodicGrid {
    spec: GridSpec,
    strides: Vec<usize>,
    steps: Vec<f64>,
    npts: usize,
    metric_diag: Vec<Vec<f64>>,
    sqrt_abs_g: Vec<f64>,
    constant_metric: bool,
}

impl PeriodicGrid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let mut grid = Self::skeleton(spec);
        let npts = grid.npts;
        let metric_diag = match grid.spec.metric {
            MetricPreset::Flat => vec![vec![1.0; npts]; grid.dim()],
            MetricPreset::EmbeddedTorus => {
                let big = grid.spec.major_radius.unwrap_or_default();
                let small = grid.spec.minor_radius.unwrap_or_default();
                let guu = grid.sample(|x| (big + small * x[1].cos()).powi(2));
                vec![guu, vec![small * small; npts]]
            }
        };
        grid.install_metric(metric_diag)?;
        Ok(grid)
    }

    /// Grid with an arbitrary sampled diagonal metric (`metric_diag[a]` holds `|g_aa|`
    /// at every node). The preset in `spec` is ignored.
    pub fn with_metric(spec: GridSpec, metric_diag: Vec<Vec<f64>>) -> Result<Self> {
        let mut spec = spec;
        spec.metric = MetricPreset::Flat;
        spec.validate()?;
        let mut grid = Self::skeleton(spec);
        grid.install_metric(metric_diag)?;
        Ok(grid)
    }

    fn skeleton(spec: GridSpec) -> Self {
        let n = spec.dim;
        let mut strides = vec![1; n];
        for a in (0..n.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * spec.points[a + 1];
        }
        let npts = spec.points.iter().product();
        let steps = spec.period.iter().zip(&spec.points).map(|(l, &np)| l / np as f64).collect();
        Self { spec, strides, steps, npts, metric_diag: Vec::new(), sqrt_abs_g: Vec::new(), constant_metric: true }
    }

    fn install_metric(&mut self, metric_diag: Vec<Vec<f64>>) -> Result<()> {
        if metric_diag.len() != self.dim() || metric_diag.iter().any(|m| m.len() != self.npts) {
            return Err(Error::InvalidGrid("metric arrays do not match the grid".into()));
        }
        if metric_diag.iter().flatten().any(|&g| !(g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidGrid("degenerate metric: scale factors must be positive".into()));
        }
        self.sqrt_abs_g = (0..self.npts).map(|x| metric_diag.iter().map(|m| m[x]).product::<f64>().sqrt()).collect();
        self.constant_metric = metric_diag.iter().all(|m| m.iter().all(|&g| g == m[0]));
        self.metric_diag = metric_diag;
        Ok(())
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn shape(&self) -> &[usize] {
        &self.spec.points
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn npts(&self) -> usize {
        self.npts
    }

    pub fn step(&self, axis: usize) -> f64 {
        self.steps[axis]
    }

    pub fn period(&self, axis: usize) -> f64 {
        self.spec.period[axis]
    }

    pub fn cell_volume(&self) -> f64 {
        self.steps.iter().product()
    }

    /// `s`, the number of negative signature entries.
    pub fn negative_count(&self) -> usize {
        self.spec.negative_count()
    }

    pub fn signature(&self, axis: usize) -> f64 {
        f64::from(self.spec.signature[axis])
    }

    pub fn metric(&self, axis: usize) -> &[f64] {
        &self.metric_diag[axis]
    }

    pub fn sqrt_abs_g(&self) -> &[f64] {
        &self.sqrt_abs_g
    }

    /// True when the metric does not vary over the grid.
    pub fn is_constant_metric(&self) -> bool {
        self.constant_metric
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in 0..self.dim() {
            idx[a] = flat / self.strides[a];
            flat %= self.strides[a];
        }
        idx
    }

    pub fn coordinate(&self, axis: usize, flat: usize) -> f64 {
        ((flat / self.strides[axis]) % self.spec.points[axis]) as f64 * self.steps[axis]
    }

    /// Evaluates `f` at every node, passing the node coordinates.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        (0..self.npts)
            .map(|flat| {
                for (a, xa) in x.iter_mut().enumerate() {
                    *xa = self.coordinate(a, flat);
                }
                f(&x)
            })
            .collect()
    }

    fn same_layout(&self, form: &DiscreteForm) -> bool {
        form.dim == self.dim() && form.shape == self.spec.points
    }

    pub(crate) fn check_form(&self, form: &DiscreteForm) -> Result<()> {
        if self.same_layout(form) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Strictly increasing index tuples of length `p` drawn from `0..n`, in lexicographic order.
pub fn index_tuples(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn extend(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            extend(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= n {
        extend(0, n, p, &mut Vec::with_capacity(p), &mut out);
    }
    out
}

pub fn binomial(n: usize, p: usize) -> usize {
    if p > n {
        return 0;
    }
    (0..p.min(n - p)).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Axes of `0..n` not in `tuple`, in increasing order.
pub fn complement(n: usize, tuple: &[usize]) -> Vec<usize> {
    (0..n).filter(|a| !tuple.contains(a)).collect()
}

/// Sign of the permutation that sorts the concatenation `first ++ second`, for two
/// sorted tuples. Zero if they share an index.
///
/// Shared by the wedge product and the Hodge star.
pub fn permutation_sign(first: &[usize], second: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for &i in first {
        for &j in second {
            if i == j {
                return 0.0;
            }
            if j < i {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// A degree-`p` form: one nodal array per strictly increasing index tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteForm {
    dim: usize,
    degree: usize,
    shape: Vec<usize>,
    tuples: Vec<Vec<usize>>,
    components: Vec<Vec<f64>>,
}

impl DiscreteForm {
    pub fn zeros(grid: &PeriodicGrid, degree: usize) -> Result<Self> {
        let n = grid.dim();
        if degree > n {
            return Err(Error::DegreeOutOfRange { degree, dim: n });
        }
        let tuples = index_tuples(n, degree);
        let components = vec![vec![0.0; grid.npts()]; tuples.len()];
        Ok(Self { dim: n, degree, shape: grid.shape().to_vec(), tuples, components })
    }

    /// Form whose component for tuple `I` is `f(I, x)` at coordinates `x`.
    pub fn from_fn(grid: &PeriodicGrid, degree: usize, f: impl Fn(&[usize], &[f64]) -> f64) -> Result<Self> {
        let mut form = Self::zeros(grid, degree)?;
        for k in 0..form.tuples.len() {
            let tuple = form.tuples[k].clone();
            form.components[k] = grid.sample(|x| f(&tuple, x));
        }
        Ok(form)
    }

    /// `value · dx^I` with a constant coefficient.
    pub fn monomial(grid: &PeriodicGrid, tuple: &[usize], value: f64) -> Result<Self> {
        let mut form = Self::zeros(grid, tuple.len())?;
        let slot = form
            .slot(tuple)
            .ok_or_else(|| Error::InvalidInput(format!("{tuple:?} is not a strictly increasing index tuple")))?;
        form.components[slot].iter_mut().for_each(|c| *c = value);
        Ok(form)
    }

    /// A 0-form holding the given nodal values.
    pub fn scalar(grid: &PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        let mut form = Self::zeros(grid, 0)?;
        if values.len() != grid.npts() {
            return Err(Error::GridMismatch);
        }
        form.components[0] = values;
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn npts(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.components
    }

    pub fn slot(&self, tuple: &[usize]) -> Option<usize> {
        self.tuples.iter().position(|t| t == tuple)
    }

    pub fn component(&self, tuple: &[usize]) -> Option<&[f64]> {
        self.slot(tuple).map(|k| self.components[k].as_slice())
    }

    pub fn component_mut(&mut self, tuple: &[usize]) -> Option<&mut Vec<f64>> {
        self.slot(tuple).map(move |k| &mut self.components[k])
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.dim == other.dim && self.degree == other.degree && self.shape == other.shape
    }

    fn assert_layout(&self, other: &Self) {
        assert!(
            self.same_layout(other),
            "form layout mismatch: degree {} vs {} on {:?} vs {:?}",
            self.degree,
            other.degree,
            self.shape,
            other.shape
        );
    }

    pub fn zeros_like(&self) -> Self {
        Self { components: vec![vec![0.0; self.npts()]; self.tuples.len()], ..self.clone() }
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        self.assert_layout(other);
        for (mine, theirs) in self.components.iter_mut().zip(&other.components) {
            for (m, t) in mine.iter_mut().zip(theirs) {
                *m += a * t;
            }
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.components.iter_mut().flatten().for_each(|c| *c *= a);
    }

    pub fn norm_inf(&self) -> f64 {
        self.components.iter().flatten().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Euclidean norm of all nodal values (no metric, no cell volume).
    pub fn norm_l2(&self) -> f64 {
        self.components.iter().flatten().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Euclidean dot product of all nodal values.
    pub fn dot(&self, other: &Self) -> f64 {
        self.assert_layout(other);
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>())
            .sum()
    }
}

impl Add for &DiscreteForm {
    type Output = DiscreteForm;
    fn add(self, rhs: &DiscreteForm) -> DiscreteForm {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &DiscreteForm {
    type Output = DiscreteForm;
    fn sub(self, rhs: &DiscreteForm) -> DiscreteForm {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &DiscreteForm {
    type Output = DiscreteForm;
    fn mul(self, rhs: f64) -> DiscreteForm {
        let mut out = self.clone();
        out.scale(rhs);
        out
    }
}

impl Neg for &DiscreteForm {
    type Output = DiscreteForm;
    fn neg(self) -> DiscreteForm {
        self * -1.0
    }
}

/// Pointwise antisymmetrized product.
pub fn wedge(a: &DiscreteForm, b: &DiscreteForm) -> Result<DiscreteForm> {
    if a.dim != b.dim || a.shape != b.shape {
        return Err(Error::GridMismatch);
    }
    let n = a.dim;
    let degree = a.degree + b.degree;
    if degree > n {
        return Err(Error::DegreeOutOfRange { degree, dim: n });
    }
    let tuples = index_tuples(n, degree);
    let npts = a.npts();
    let mut components = vec![vec![0.0; npts]; tuples.len()];
    for (i, ti) in a.tuples.iter().enumerate() {
        for (j, tj) in b.tuples.iter().enumerate() {
            let sign = permutation_sign(ti, tj);
            if sign == 0.0 {
                continue;
            }
            let mut merged: Vec<usize> = ti.iter().chain(tj).copied().collect();
            merged.sort_unstable();
            let k = tuples.iter().position(|t| *t == merged).expect("merged tuple is sorted");
            for ((out, x), y) in components[k].iter_mut().zip(&a.components[i]).zip(&b.components[j]) {
                *out += sign * x * y;
            }
        }
    }
    Ok(DiscreteForm { dim: n, degree, shape: a.shape.clone(), tuples, components })
}

/// Rectangle-rule integral of a top-degree form. Any `√|g|` factor must already be
/// part of the component.
pub fn integrate_manifold(f: &DiscreteForm, grid: &PeriodicGrid) -> Result<f64> {
    grid.check_form(f)?;
    if f.degree != grid.dim() {
        return Err(Error::DegreeMismatch { expected: grid.dim(), actual: f.degree });
    }
    Ok(f.components[0].iter().sum::<f64>() * grid.cell_volume())
}

/// Coordinate sub-torus spanned by `axes`, sitting at grid index `offset[k]` along
/// the k-th non-spanned axis.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CycleSpec {
    pub axes: Vec<usize>,
    pub offset: Vec<usize>,
}

impl CycleSpec {
    pub fn new(grid: &PeriodicGrid, axes: Vec<usize>, offset: Vec<usize>) -> Result<Self> {
        let n = grid.dim();
        if axes.windows(2).any(|w| w[0] >= w[1]) || axes.iter().any(|&a| a >= n) {
            return Err(Error::InvalidInput(format!("cycle axes {axes:?} must be increasing and below {n}")));
        }
        let others = complement(n, &axes);
        if offset.len() != others.len() {
            return Err(Error::InvalidInput(format!(
                "cycle spanning {axes:?} needs {} offsets, got {}",
                others.len(),
                offset.len()
            )));
        }
        if let Some((&axis, &o)) = others.iter().zip(&offset).find(|(&a, &o)| o >= grid.shape()[a]) {
            return Err(Error::InvalidInput(format!("offset {o} out of range on axis {axis}")));
        }
        Ok(Self { axes, offset })
    }

    /// Cycle through the origin.
    pub fn at_origin(grid: &PeriodicGrid, axes: Vec<usize>) -> Result<Self> {
        let k = grid.dim().saturating_sub(axes.len());
        Self::new(grid, axes, vec![0; k])
    }

    pub fn degree(&self) -> usize {
        self.axes.len()
    }
}

/// Rectangle-rule integral of the pullback of `f` to the coordinate cycle `z`.
pub fn integrate_cycle(f: &DiscreteForm, z: &CycleSpec, grid: &PeriodicGrid) -> Result<f64> {
    grid.check_form(f)?;
    if f.degree != z.degree() {
        return Err(Error::DegreeMismatch { expected: z.degree(), actual: f.degree });
    }
    let values = f.component(&z.axes).ok_or_else(|| Error::InvalidInput(format!("no component {:?}", z.axes)))?;
    let others = complement(grid.dim(), &z.axes);
    let base: usize = others.iter().zip(&z.offset).map(|(&a, &o)| o * grid.strides()[a]).sum();

    // odometer over the spanned axes
    let mut counter = vec![0usize; z.axes.len()];
    let mut sum = 0.0;
    loop {
        let idx = base + z.axes.iter().zip(&counter).map(|(&a, &i)| i * grid.strides()[a]).sum::<usize>();
        sum += values[idx];
        let mut k = 0;
        while k < counter.len() {
            counter[k] += 1;
            if counter[k] < grid.shape()[z.axes[k]] {
                break;
            }
            counter[k] = 0;
            k += 1;
        }
        if k == counter.len() {
            break;
        }
    }
    let measure: f64 = z.axes.iter().map(|&a| grid.step(a)).product();
    Ok(sum * measure)
}

/// Random trigonometric-polynomial form: each component is a sum of `cos`/`sin`
/// modes with integer wavenumbers in `-max_mode..=max_mode` on every axis and
/// coefficients uniform in `[-1, 1]`. Wavenumbers are scaled by `2π / period`.
pub fn random_trig_form<R: Rng + ?Sized>(
    grid: &PeriodicGrid,
    degree: usize,
    max_mode: i32,
    terms: usize,
    rng: &mut R,
) -> Result<DiscreteForm> {
    let mut form = DiscreteForm::zeros(grid, degree)?;
    let n = grid.dim();
    let scale: Vec<f64> = (0..n).map(|a| 2.0 * PI / grid.period(a)).collect();
    for comp in form.components_mut() {
        for _ in 0..terms {
            let k: Vec<f64> = (0..n).map(|a| f64::from(rng.random_range(-max_mode..=max_mode)) * scale[a]).collect();
            let (ca, cb) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            let wave = grid.sample(|x| {
                let phase: f64 = k.iter().zip(x).map(|(k, x)| k * x).sum();
                ca * phase.cos() + cb * phase.sin()
            });
            comp.iter_mut().zip(wave).for_each(|(c, w)| *c += w);
        }
    }
    Ok(form)
}
