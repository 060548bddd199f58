use crate::error::{Error, Result};

/// Periodic central-difference first-derivative stencil of even order `2M`.
///
/// `(Df)_i = Σ_{j=1..M} a_j (f_{i+j} − f_{i−j}) / h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    order: usize,
    coeffs: Vec<f64>,
}

impl Stencil {
    pub const DEFAULT_ORDER: usize = 8;

    pub fn central(order: usize) -> Result<Self> {
        if order < 2 || !order.is_multiple_of(2) || order > 16 {
            return Err(Error::InvalidInput(format!("stencil order {order} must be even and in 2..=16")));
        }
        let m = order / 2;
        let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        let coeffs = (1..=m)
            .map(|j| {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                sign * fact(m) * fact(m) / (j as f64 * fact(m - j) * fact(m + j))
            })
            .collect();
        Ok(Self { order, coeffs })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn half_width(&self) -> usize {
        self.coeffs.len()
    }

    /// `κ` such that `D e^{iθx/h} = iκ e^{iθx/h}` for a grid step `h`.
    pub fn modified_wavenumber(&self, theta: f64, h: f64) -> f64 {
        2.0 * self.coeffs.iter().enumerate().map(|(j, a)| a * ((j + 1) as f64 * theta).sin()).sum::<f64>() / h
    }

    /// Derivative of `f` along one axis of a C-ordered periodic array. `len` is the
    /// axis length and `stride` its stride.
    pub fn apply(&self, f: &[f64], len: usize, stride: usize, h: f64, out: &mut [f64]) {
        let block = len * stride;
        let inv_h = 1.0 / h;
        for base in (0..f.len()).step_by(block) {
            for i in 0..len {
                let row = base + i * stride;
                let dst = &mut out[row..row + stride];
                dst.iter_mut().for_each(|v| *v = 0.0);
                for (j, a) in self.coeffs.iter().enumerate() {
                    let j = (j + 1) % len;
                    let plus = base + ((i + j) % len) * stride;
                    let minus = base + ((i + len - j) % len) * stride;
                    let c = a * inv_h;
                    for k in 0..stride {
                        dst[k] += c * (f[plus + k] - f[minus + k]);
                    }
                }
            }
        }
    }
}
