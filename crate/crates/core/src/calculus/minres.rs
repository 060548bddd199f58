//! Unpreconditioned MINRES for symmetric, possibly indefinite or singular,
//! operators. Follows the Paige–Saunders recurrences.

pub(crate) struct MinresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Recurrence estimate of `‖b − Ax‖`.
    pub residual_estimate: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` from `x0`, stopping once the residual estimate falls below
/// `abs_tol` or after `max_iter` iterations.
pub(crate) fn minres(
    apply: &mut dyn FnMut(&[f64]) -> Vec<f64>,
    b: &[f64],
    x0: Vec<f64>,
    abs_tol: f64,
    max_iter: usize,
) -> MinresOutcome {
    let n = b.len();
    let mut x = x0;
    let ax = apply(&x);
    let mut r1: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let beta1 = dot(&r1, &r1).sqrt();
    if beta1 <= abs_tol {
        return MinresOutcome { x, iterations: 0, residual_estimate: beta1 };
    }
    let mut y = r1.clone();
    let mut r2 = r1.clone();
    let (mut oldb, mut beta) = (0.0, beta1);
    let (mut dbar, mut epsln, mut phibar) = (0.0, 0.0, beta1);
    let (mut cs, mut sn) = (-1.0f64, 0.0f64);
    let mut w = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut iterations = 0;

    while iterations < max_iter {
        iterations += 1;
        let s = 1.0 / beta;
        v.iter_mut().zip(&y).for_each(|(v, y)| *v = s * y);
        y = apply(&v);
        if iterations >= 2 {
            let c = beta / oldb;
            y.iter_mut().zip(&r1).for_each(|(y, r)| *y -= c * r);
        }
        let alfa = dot(&v, &y);
        let c = alfa / beta;
        y.iter_mut().zip(&r2).for_each(|(y, r)| *y -= c * r);
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        oldb = beta;
        beta = dot(&y, &y).sqrt();

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        let inv = 1.0 / gamma;
        for k in 0..n {
            let w1 = w2[k];
            w2[k] = w[k];
            w[k] = (v[k] - oldeps * w1 - delta * w2[k]) * inv;
            x[k] += phi * w[k];
        }
        if phibar <= abs_tol || beta == 0.0 {
            break;
        }
    }
    MinresOutcome { x, iterations, residual_estimate: phibar }
}
