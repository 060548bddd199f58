//! Minimum-norm pseudo-inverse of the Laplacian.
//!
//! Constant metrics go through a Fourier multiplier: the composed stencil Laplacian
//! is diagonal in the discrete Fourier basis with symbol `Σ_a (s_a/g_aa) κ_a²`, and
//! every mode with `|symbol| < SYMBOL_CUTOFF` is treated as kernel. That covers the
//! constant mode, the Nyquist modes the central stencil cannot see, and on
//! Lorentzian grids the discrete light cone.
//!
//! Variable metrics use MINRES on the symmetric system `W Δ θ = W b`, where `W`
//! holds the pairing weights. Known kernels (parity modes of 0-forms and their
//! duals, plus any caller-supplied forms) are removed from the source first.

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::minres::minres;
use super::ExteriorCalculus;
use crate::error::{Error, Result};
use crate::mesh::DiscreteForm;

pub const SYMBOL_CUTOFF: f64 = 1e-10;

const MAX_RESTARTS: usize = 6;

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Auto,
    Spectral,
    Minres,
}

#[derive(Clone, Debug)]
pub struct GreenOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub method: SolveMethod,
    /// Extra kernel directions to project out of the source, e.g. a cohomology basis.
    pub kernel: Vec<DiscreteForm>,
}

impl Default for GreenOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 50_000, method: SolveMethod::Auto, kernel: Vec::new() }
    }
}

impl GreenOptions {
    pub fn with_kernel(kernel: Vec<DiscreteForm>) -> Self {
        Self { kernel, ..Self::default() }
    }
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub method: SolveMethod,
    pub iterations: usize,
    pub relative_residual: f64,
    pub deflated_dims: usize,
}

impl ExteriorCalculus {
    /// Returns `θ` with `Δθ = b_proj`, where `b_proj` is `source` with its kernel
    /// content removed, and `θ` carries no kernel content itself.
    pub fn green_solve(&self, source: &DiscreteForm, opts: &GreenOptions) -> Result<(DiscreteForm, SolveReport)> {
        self.grid().check_form(source)?;
        if let Some(k) = opts.kernel.iter().find(|k| k.degree() != source.degree()) {
            return Err(Error::DegreeMismatch { expected: source.degree(), actual: k.degree() });
        }
        let method = match opts.method {
            SolveMethod::Auto if self.grid().is_constant_metric() => SolveMethod::Spectral,
            SolveMethod::Auto => SolveMethod::Minres,
            m => m,
        };
        if method == SolveMethod::Spectral && !self.grid().is_constant_metric() {
            return Err(Error::Unsupported("spectral Green solve needs a constant metric".into()));
        }
        let norm_b = source.norm_l2();
        if norm_b == 0.0 {
            let report = SolveReport { method, iterations: 0, relative_residual: 0.0, deflated_dims: 0 };
            return Ok((source.zeros_like(), report));
        }
        match method {
            SolveMethod::Spectral => self.solve_spectral(source, opts, norm_b),
            _ => self.solve_minres(source, opts, norm_b),
        }
    }

    fn solve_spectral(
        &self,
        source: &DiscreteForm,
        opts: &GreenOptions,
        norm_b: f64,
    ) -> Result<(DiscreteForm, SolveReport)> {
        let projector = KernelProjector::new(self, &opts.kernel)?;
        let mut b = source.clone();
        projector.remove(self, &mut b)?;

        let symbol = self.laplacian_symbol();
        let zero_modes = symbol.iter().filter(|l| l.abs() < SYMBOL_CUTOFF).count();
        let fft = Fft::new(self.grid().shape());
        let mut theta = b.zeros_like();
        let mut b_proj = b.zeros_like();
        for (slot, comp) in b.components().iter().enumerate() {
            let mut spec: Vec<Complex64> = comp.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft.forward(&mut spec, self.grid().strides());
            let mut proj = spec.clone();
            for ((t, pr), &lam) in spec.iter_mut().zip(proj.iter_mut()).zip(&symbol) {
                if lam.abs() < SYMBOL_CUTOFF {
                    *t = Complex64::new(0.0, 0.0);
                    *pr = Complex64::new(0.0, 0.0);
                } else {
                    *t /= lam;
                }
            }
            fft.inverse(&mut spec, self.grid().strides());
            fft.inverse(&mut proj, self.grid().strides());
            theta.components_mut()[slot] = spec.iter().map(|c| c.re).collect();
            b_proj.components_mut()[slot] = proj.iter().map(|c| c.re).collect();
        }
        let residual = (&self.laplacian(&theta)? - &b_proj).norm_l2() / norm_b;
        let report = SolveReport {
            method: SolveMethod::Spectral,
            iterations: 1,
            relative_residual: residual,
            deflated_dims: zero_modes * b.components().len() + projector.len(),
        };
        if residual > opts.tol {
            return Err(Error::NotConverged { iterations: 1, residual });
        }
        Ok((theta, report))
    }

    fn solve_minres(
        &self,
        source: &DiscreteForm,
        opts: &GreenOptions,
        norm_b: f64,
    ) -> Result<(DiscreteForm, SolveReport)> {
        let mut kernel = self.parity_kernel(source.degree())?;
        kernel.extend(opts.kernel.iter().cloned());
        let projector = KernelProjector::new(self, &kernel)?;
        let mut b = source.clone();
        projector.remove(self, &mut b)?;

        let template = source.zeros_like();
        let unflatten = |v: &[f64]| {
            let mut f = template.clone();
            let npts = template.npts();
            for (comp, chunk) in f.components_mut().iter_mut().zip(v.chunks(npts)) {
                comp.copy_from_slice(chunk);
            }
            f
        };
        let flatten = |f: &DiscreteForm| f.components().concat();
        let mut failure = None;
        let mut apply = |v: &[f64]| match self.laplacian(&unflatten(v)) {
            Ok(lv) => flatten(&self.weighted(&lv)),
            Err(e) => {
                failure = Some(e);
                vec![0.0; v.len()]
            }
        };

        let rhs = flatten(&self.weighted(&b));
        let min_weight = b.tuples().iter().flat_map(|t| self.star_weight(t)).fold(f64::INFINITY, |m, w| m.min(w.abs()));
        let target = opts.tol * norm_b;
        let mut inner_tol = 0.5 * target * min_weight;
        let mut x = vec![0.0; rhs.len()];
        let mut iterations = 0;
        let mut residual = f64::INFINITY;
        for _ in 0..MAX_RESTARTS {
            let budget = opts.max_iter.saturating_sub(iterations);
            if budget == 0 {
                break;
            }
            let out = minres(&mut apply, &rhs, x, inner_tol, budget);
            iterations += out.iterations;
            x = out.x;
            let mut theta = unflatten(&x);
            projector.remove(self, &mut theta)?;
            residual = (&self.laplacian(&theta)? - &b).norm_l2() / norm_b;
            if residual <= opts.tol {
                let report = SolveReport {
                    method: SolveMethod::Minres,
                    iterations,
                    relative_residual: residual,
                    deflated_dims: projector.len(),
                };
                return Ok((theta, report));
            }
            inner_tol = inner_tol.min(out.residual_estimate) * 0.1;
        }
        if let Some(e) = failure {
            return Err(e);
        }
        Err(Error::NotConverged { iterations, residual })
    }

    /// Fourier symbol of the Laplacian in C order over the grid's mode indices.
    pub fn laplacian_symbol(&self) -> Vec<f64> {
        let g = self.grid();
        let n = self.dim();
        let per_axis: Vec<Vec<f64>> = (0..n)
            .map(|a| {
                let len = g.shape()[a];
                let h = g.step(a);
                let scale = g.signature(a) / g.metric(a)[0];
                (0..len)
                    .map(|m| {
                        let kappa =
                            self.stencil().modified_wavenumber(2.0 * std::f64::consts::PI * m as f64 / len as f64, h);
                        scale * kappa * kappa
                    })
                    .collect()
            })
            .collect();
        (0..g.npts()).map(|x| g.multi_index(x).iter().enumerate().map(|(a, &m)| per_axis[a][m]).sum()).collect()
    }

    /// Kernel of the Laplacian that the central stencil adds on degree 0 and n:
    /// products of `(−1)^{i_a}` over subsets of axes, and their Hodge duals.
    fn parity_kernel(&self, degree: usize) -> Result<Vec<DiscreteForm>> {
        let n = self.dim();
        if degree != 0 && degree != n {
            return Ok(Vec::new());
        }
        let g = self.grid();
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let values = (0..g.npts())
                .map(|x| {
                    let idx = g.multi_index(x);
                    let flips: usize = (0..n).filter(|a| mask >> a & 1 == 1).map(|a| idx[a]).sum();
                    if flips.is_multiple_of(2) {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect();
            let f = DiscreteForm::scalar(g, values)?;
            out.push(if degree == 0 { f } else { self.star(&f)? });
        }
        Ok(out)
    }
}

/// Removes the pairing-orthogonal projection onto a span of kernel forms.
struct KernelProjector {
    basis: Vec<DiscreteForm>,
    gram_pinv: DMatrix<f64>,
}

impl KernelProjector {
    fn new(calc: &ExteriorCalculus, basis: &[DiscreteForm]) -> Result<Self> {
        let k = basis.len();
        let mut gram = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..=i {
                let v = calc.pairing(&basis[i], &basis[j])?;
                gram[(i, j)] = v;
                gram[(j, i)] = v;
            }
        }
        let eps = 1e-12 * gram.amax().max(f64::MIN_POSITIVE);
        let gram_pinv =
            if k == 0 { gram } else { gram.pseudo_inverse(eps).map_err(|e| Error::Singular(e.to_string()))? };
        Ok(Self { basis: basis.to_vec(), gram_pinv })
    }

    fn len(&self) -> usize {
        self.basis.len()
    }

    fn remove(&self, calc: &ExteriorCalculus, f: &mut DiscreteForm) -> Result<()> {
        if self.basis.is_empty() {
            return Ok(());
        }
        let r: Vec<f64> = self.basis.iter().map(|k| calc.pairing(k, f)).collect::<Result<_>>()?;
        let c = &self.gram_pinv * nalgebra::DVector::from_vec(r);
        for (k, ci) in self.basis.iter().zip(c.iter()) {
            f.axpy(-ci, k);
        }
        Ok(())
    }
}

/// Multi-dimensional complex FFT over a C-ordered array, one axis at a time.
struct Fft {
    shape: Vec<usize>,
    forward: Vec<std::sync::Arc<dyn rustfft::Fft<f64>>>,
    inverse: Vec<std::sync::Arc<dyn rustfft::Fft<f64>>>,
}

impl Fft {
    fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            shape: shape.to_vec(),
            forward: shape.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        }
    }

    fn forward(&self, data: &mut [Complex64], strides: &[usize]) {
        self.run(data, strides, &self.forward);
    }

    /// Normalized inverse.
    fn inverse(&self, data: &mut [Complex64], strides: &[usize]) {
        self.run(data, strides, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    fn run(&self, data: &mut [Complex64], strides: &[usize], plans: &[std::sync::Arc<dyn rustfft::Fft<f64>>]) {
        for (axis, plan) in plans.iter().enumerate() {
            let (len, stride) = (self.shape[axis], strides[axis]);
            let mut line = vec![Complex64::new(0.0, 0.0); len];
            for base in (0..data.len()).step_by(len * stride) {
                for k in 0..stride {
                    for i in 0..len {
                        line[i] = data[base + i * stride + k];
                    }
                    plan.process(&mut line);
                    for i in 0..len {
                        data[base + i * stride + k] = line[i];
                    }
                }
            }
        }
    }
}
