//! Derivative kernels `d_t^m delta_x^n G_t(x, y)` with `delta_j = d/dx_j + x_j`.
//!
//! First order is analytic. With `S = sinh 2t`, `C = coth 2t` and
//! `r_j = I_{alpha_j + 1}(z_j) / I_{alpha_j}(z_j)`:
//!
//! ```text
//! d/dx_j ln G = -C x_j + r_j y_j / S
//! d/dt   ln G = -2 d C + sum_j [(x_j^2 + y_j^2) / S^2 - 2 C (z_j r_j + alpha_j)]
//! ```
//!
//! Higher orders apply Ridders differences to the first-order kernels.

use super::heat::{check_inputs, exponents, ln_closed_unchecked};
use crate::error::{Error, Result};
use crate::index::{AlphaIndex, MultiIndex, PointRd};
use crate::numdiff::ridders;
use crate::special_fn::bessel_i_scaled_unchecked;

/// Highest supported `|n| + 2m`.
pub const MAX_DERIVATIVE_ORDER: usize = 4;

/// Logarithmic derivatives of `G_t(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGradient {
    pub value: f64,
    pub d_x: Vec<f64>,
    pub d_y: Vec<f64>,
    pub d_t: f64,
}

fn ratio(nu: f64, z: f64) -> f64 {
    bessel_i_scaled_unchecked(nu + 1.0, z) / bessel_i_scaled_unchecked(nu, z)
}

pub(crate) fn log_gradient_unchecked(alpha: &[f64], t: f64, x: &[f64], y: &[f64]) -> LogGradient {
    let d = alpha.len();
    let ex = exponents(t, x, y);
    let c = 1.0 / (2.0 * t).tanh();
    let inv_s = ex.inv_s;
    let mut d_x = Vec::with_capacity(d);
    let mut d_y = Vec::with_capacity(d);
    let mut d_t = -2.0 * d as f64 * c;
    for i in 0..d {
        let r = ratio(alpha[i], ex.z[i]);
        d_x.push(-c * x[i] + r * y[i] * inv_s);
        d_y.push(-c * y[i] + r * x[i] * inv_s);
        d_t += (x[i] * x[i] + y[i] * y[i]) * inv_s * inv_s - 2.0 * c * (ex.z[i] * r + alpha[i]);
    }
    LogGradient {
        value: ln_closed_unchecked(alpha, t, x, y).exp(),
        d_x,
        d_y,
        d_t,
    }
}

/// `G` together with its logarithmic derivatives in `x`, `y` and `t`.
pub fn heat_log_gradient(alpha: &AlphaIndex, t: f64, x: &PointRd, y: &PointRd) -> Result<LogGradient> {
    check_inputs(alpha, t, x, y)?;
    Ok(log_gradient_unchecked(alpha.components(), t, x.coords(), y.coords()))
}

/// Plain partial derivatives `(grad_x G, grad_y G)`.
pub fn heat_kernel_gradient(
    alpha: &AlphaIndex,
    t: f64,
    x: &PointRd,
    y: &PointRd,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = heat_log_gradient(alpha, t, x, y)?;
    Ok((
        g.d_x.iter().map(|v| v * g.value).collect(),
        g.d_y.iter().map(|v| v * g.value).collect(),
    ))
}

enum Step {
    T,
    X(usize),
}

// step sizes follow the scales on which G varies
fn step_t(t: f64, sep2: f64) -> f64 {
    0.1 * t * (4.0 * t / sep2.max(1e-300)).min(1.0)
}

fn step_x(xj: f64, t: f64, sep: f64) -> f64 {
    0.1 * xj.min(t.sqrt()).min(t / sep.max(1e-300))
}

fn apply(
    alpha: &[f64],
    t: f64,
    x: &[f64],
    y: &[f64],
    ops: &[Step],
    base: &dyn Fn(f64, &[f64]) -> f64,
) -> f64 {
    let Some((last, rest)) = ops.split_last() else {
        return base(t, x);
    };
    let sep = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    match *last {
        Step::T => {
            let h = step_t(t, sep * sep);
            ridders(|s| apply(alpha, s, x, y, rest, base), t, h).value
        }
        Step::X(j) => {
            let h = step_x(x[j], t, sep);
            let d = ridders(
                |v| {
                    let mut xs = x.to_vec();
                    xs[j] = v;
                    apply(alpha, t, &xs, y, rest, base)
                },
                x[j],
                h,
            )
            .value;
            d + x[j] * apply(alpha, t, x, y, rest, base)
        }
    }
}

/// `d_t^m delta_x^n G_t^alpha(x, y)` for `|n| + 2m <= 4`.
pub fn kernel_derivative(
    alpha: &AlphaIndex,
    t: f64,
    x: &PointRd,
    y: &PointRd,
    n: &MultiIndex,
    m: usize,
) -> Result<f64> {
    check_inputs(alpha, t, x, y)?;
    alpha.check_dim(n.dim())?;
    let order = n.length() + 2 * m;
    if order > MAX_DERIVATIVE_ORDER {
        return Err(Error::UnsupportedOrder(order));
    }
    let a = alpha.components();
    let (xs, ys) = (x.coords(), y.coords());
    if order == 0 {
        return Ok(ln_closed_unchecked(a, t, xs, ys).exp());
    }
    let mut ops: Vec<Step> = Vec::new();
    for (j, &nj) in n.components().iter().enumerate() {
        ops.extend((0..nj).map(|_| Step::X(j)));
    }
    ops.extend((0..m).map(|_| Step::T));
    // the innermost operator is taken analytically
    let first = ops.remove(0);
    let base: Box<dyn Fn(f64, &[f64]) -> f64> = match first {
        Step::T => Box::new(|s, xv| {
            let g = log_gradient_unchecked(a, s, xv, ys);
            g.value * g.d_t
        }),
        Step::X(j) => Box::new(move |s, xv| {
            let g = log_gradient_unchecked(a, s, xv, ys);
            g.value * (g.d_x[j] + xv[j])
        }),
    };
    Ok(apply(a, t, xs, ys, &ops, &*base))
}
