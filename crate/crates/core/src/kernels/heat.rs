//! The Laguerre heat kernel `G_t^alpha(x, y)` in closed, spectral and
//! Schläfli form, and the Poisson kernel by subordination.
//!
//! Every form is assembled in the log domain. Per coordinate the Gaussian
//! factor `exp(-coth(2t) (x^2 + y^2) / 2)` is merged with `e^{z}`, where
//! `z = x y / sinh 2t`, into
//!
//! ```text
//! E = -((x - y)^2 / sinh 2t + tanh t (x^2 + y^2)) / 2
//! ```
//!
//! and the remaining `e^{-z} I_nu(z)` is bounded.

use serde::Serialize;

use super::time::ln_sinh_2t;
use crate::error::{domain, Error, Result};
use crate::index::{AlphaIndex, PointRd};
use crate::quadrature::{adaptive_integrate_with, pi_measure_rule, AdaptiveOptions, QuadRule};
use crate::special_fn::{bessel_i_scaled_unchecked, laguerre_fn_1d_all};

pub(crate) fn check_inputs(alpha: &AlphaIndex, t: f64, x: &PointRd, y: &PointRd) -> Result<()> {
    alpha.check_dim(x.dim())?;
    alpha.check_dim(y.dim())?;
    if !(t.is_finite() && t > 0.0) {
        return domain(format!("time {t} must be positive and finite"));
    }
    Ok(())
}

/// `E_i` for each coordinate, together with `z_i` and `ln sinh 2t`.
pub(crate) struct Exponents {
    pub ln_s: f64,
    pub inv_s: f64,
    pub e: Vec<f64>,
    pub z: Vec<f64>,
}

pub(crate) fn exponents(t: f64, x: &[f64], y: &[f64]) -> Exponents {
    let ln_s = ln_sinh_2t(t);
    let inv_s = (-ln_s).exp();
    let th = t.tanh();
    let e = x
        .iter()
        .zip(y)
        .map(|(a, b)| -0.5 * ((a - b) * (a - b) * inv_s + th * (a * a + b * b)))
        .collect();
    let z = x.iter().zip(y).map(|(a, b)| a * b * inv_s).collect();
    Exponents { ln_s, inv_s, e, z }
}

pub(crate) fn ln_closed_unchecked(alpha: &[f64], t: f64, x: &[f64], y: &[f64]) -> f64 {
    let ex = exponents(t, x, y);
    let mut l = -(alpha.len() as f64) * ex.ln_s;
    for i in 0..alpha.len() {
        l += ex.e[i] - alpha[i] * (x[i] * y[i]).ln()
            + bessel_i_scaled_unchecked(alpha[i], ex.z[i]).ln();
    }
    l
}

/// `ln G_t^alpha(x, y)`.
pub fn ln_heat_kernel_closed(alpha: &AlphaIndex, t: f64, x: &PointRd, y: &PointRd) -> Result<f64> {
    check_inputs(alpha, t, x, y)?;
    Ok(ln_closed_unchecked(alpha.components(), t, x.coords(), y.coords()))
}

/// `G_t^alpha(x, y)` from the Bessel closed form.
pub fn heat_kernel_closed(alpha: &AlphaIndex, t: f64, x: &PointRd, y: &PointRd) -> Result<f64> {
    ln_heat_kernel_closed(alpha, t, x, y).map(f64::exp)
}

/// A truncated eigen-series with the size of its last shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSum {
    pub value: f64,
    pub last_shell: f64,
    pub k_max: usize,
}

impl SpectralSum {
    /// The value if the last shell is below `tol` (relative to the value),
    /// otherwise a truncation error carrying the partial sum.
    pub fn within(&self, tol: f64) -> Result<f64> {
        if self.last_shell.abs() <= tol * self.value.abs() {
            Ok(self.value)
        } else {
            Err(Error::Truncation {
                partial: self.value,
                last_shell: self.last_shell,
                tol,
            })
        }
    }
}

/// `S_s = sum_{|k| = s} l_k(x) l_k(y)` for `s = 0..=k_max`, by convolving the
/// one-dimensional products coordinate by coordinate.
pub(crate) fn shell_products(
    alpha: &AlphaIndex,
    x: &PointRd,
    y: &PointRd,
    k_max: usize,
) -> Result<Vec<f64>> {
    alpha.check_dim(x.dim())?;
    alpha.check_dim(y.dim())?;
    let mut shells: Vec<f64> = Vec::new();
    for i in 0..alpha.dim() {
        let a = alpha.components()[i];
        let lx = laguerre_fn_1d_all(k_max, a, x.coords()[i])?;
        let ly = laguerre_fn_1d_all(k_max, a, y.coords()[i])?;
        let p: Vec<f64> = lx.iter().zip(&ly).map(|(u, v)| u * v).collect();
        if i == 0 {
            shells = p;
            continue;
        }
        let mut next = vec![0.0; k_max + 1];
        for (s, &a) in shells.iter().enumerate() {
            for (j, &b) in p.iter().take(k_max + 1 - s).enumerate() {
                next[s + j] += a * b;
            }
        }
        shells = next;
    }
    Ok(shells)
}

fn spectral_with(
    alpha: &AlphaIndex,
    x: &PointRd,
    y: &PointRd,
    k_max: usize,
    weight: impl Fn(f64) -> f64,
) -> Result<SpectralSum> {
    let shells = shell_products(alpha, x, y, k_max)?;
    let mut value = 0.0;
    let mut last = 0.0;
    // sum from the smallest terms up
    for (s, p) in shells.iter().enumerate().rev() {
        let term = weight(alpha.eigenvalue(s)) * p;
        if s == k_max {
            last = term;
        }
        value += term;
    }
    Ok(SpectralSum {
        value,
        last_shell: last.abs(),
        k_max,
    })
}

/// `sum_{|k| <= K} e^{-t lambda_k} l_k(x) l_k(y)`.
pub fn heat_kernel_spectral(
    alpha: &AlphaIndex,
    t: f64,
    x: &PointRd,
    y: &PointRd,
    k_max: usize,
) -> Result<SpectralSum> {
    check_inputs(alpha, t, x, y)?;
    spectral_with(alpha, x, y, k_max, |lam| (-t * lam).exp())
}

/// The shell terms `e^{-t lambda_s} sum_{|k| = s} l_k(x) l_k(y)` for
/// `s = 0..=K`.
pub fn heat_kernel_shells(alpha: &AlphaIndex, t: f64, x: &PointRd, y: &PointRd, k_max: usize) -> Result<Vec<f64>> {
    check_inputs(alpha, t, x, y)?;
    Ok(shell_products(alpha, x, y, k_max)?
        .iter()
        .enumerate()
        .map(|(s, p)| (-t * alpha.eigenvalue(s)).exp() * p)
        .collect())
}

/// `sum_{|k| <= K} e^{-t sqrt(lambda_k)} l_k(x) l_k(y)`.
pub fn poisson_kernel_spectral(
    alpha: &AlphaIndex,
    t: f64,
    x: &PointRd,
    y: &PointRd,
    k_max: usize,
) -> Result<SpectralSum> {
    check_inputs(alpha, t, x, y)?;
    spectral_with(alpha, x, y, k_max, |lam| (-t * lam.sqrt()).exp())
}

/// Gauss rules for `Pi_{alpha_i + 1}` and `Pi_{alpha_i + 2}`, one pair per
/// coordinate, covering every `epsilon in {0, 1}^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchlafliRules {
    alpha: AlphaIndex,
    n_nodes: usize,
    shifted: Vec<[QuadRule; 2]>,
}

impl SchlafliRules {
    pub fn new(alpha: &AlphaIndex, n_nodes: usize) -> Result<Self> {
        let shifted = alpha
            .components()
            .iter()
            .map(|&a| Ok([pi_measure_rule(a + 1.0, n_nodes)?, pi_measure_rule(a + 2.0, n_nodes)?]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            alpha: alpha.clone(),
            n_nodes,
            shifted,
        })
    }

    pub fn alpha(&self) -> &AlphaIndex {
        &self.alpha
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// The rule for `Pi_{alpha_i + 1 + eps}`.
    pub fn rule(&self, i: usize, eps: bool) -> &QuadRule {
        &self.shifted[i][eps as usize]
    }
}

/// `ln sum_j w_j e^{-z (1 + s_j)}`, the scaled `int e^{-z s} Pi(ds)`.
pub(crate) fn ln_scaled_exp_integral(rule: &QuadRule, z: f64) -> f64 {
    rule.iter().map(|(s, w)| w * (-z * (1.0 + s)).exp()).sum::<f64>().ln()
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + terms.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
}

/// `G_t^alpha(x, y)` as the `2^d`-term sum over `epsilon in {0, 1}^d` of
///
/// ```text
/// C_{alpha,eps} c^{d + |alpha| + 2|eps|} (x y)^{2 eps} int Exp(zeta, q_+-) Pi_{alpha+1+eps}(ds),
/// ```
///
/// with `c = (1 - zeta^2) / (2 zeta)` and `C_{alpha,eps} = prod [2(alpha_i + 1)]^{1 - eps_i}`.
/// The integrand factorizes over coordinates, so the tensor quadrature is the
/// product of one-dimensional sums.
pub fn heat_kernel_schlafli(
    alpha: &AlphaIndex,
    t: f64,
    x: &PointRd,
    y: &PointRd,
    rules: &SchlafliRules,
) -> Result<f64> {
    check_inputs(alpha, t, x, y)?;
    if rules.alpha != *alpha {
        return Err(Error::RuleMismatch {
            expected: format!("rules for alpha = {alpha}"),
            got: format!("rules for alpha = {}", rules.alpha),
        });
    }
    let d = alpha.dim();
    let a = alpha.components();
    let (xs, ys) = (x.coords(), y.coords());
    let ex = exponents(t, xs, ys);
    // per coordinate and eps_i: log of the eps-dependent factor
    let mut per: Vec<[f64; 2]> = Vec::with_capacity(d);
    for i in 0..d {
        let base = ex.e[i] - (a[i] + 1.0) * ex.ln_s;
        let lxy = (xs[i] * ys[i]).ln();
        per.push([
            base + (2.0 * (a[i] + 1.0)).ln() + ln_scaled_exp_integral(rules.rule(i, false), ex.z[i]),
            base - 2.0 * ex.ln_s + 2.0 * lxy + ln_scaled_exp_integral(rules.rule(i, true), ex.z[i]),
        ]);
    }
    let terms: Vec<f64> = (0..1usize << d)
        .map(|mask| (0..d).map(|i| per[i][(mask >> i) & 1]).sum())
        .collect();
    let v = log_sum_exp(&terms).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NoConvergence {
            estimate: v,
            achieved: f64::INFINITY,
            requested: 0.0,
        })
    }
}

/// The single-term form `c^{d + |alpha|} int Exp(zeta, q_+-) Pi_alpha(ds)`,
/// available when every `alpha_i >= -1/2`.
pub fn heat_kernel_schlafli_single(
    alpha: &AlphaIndex,
    t: f64,
    x: &PointRd,
    y: &PointRd,
    n_nodes: usize,
) -> Result<f64> {
    check_inputs(alpha, t, x, y)?;
    if let Some(a) = alpha.components().iter().find(|a| **a < -0.5) {
        return domain(format!(
            "the single-term form needs alpha_i >= -1/2, got component {a}"
        ));
    }
    let ex = exponents(t, x.coords(), y.coords());
    let mut l = 0.0;
    for (i, &a) in alpha.components().iter().enumerate() {
        let rule = pi_measure_rule(a, n_nodes)?;
        l += ex.e[i] - (a + 1.0) * ex.ln_s + ln_scaled_exp_integral(&rule, ex.z[i]);
    }
    Ok(l.exp())
}

/// `P_t(x, y) = int_0^inf G_{t^2 / (4u)}(x, y) e^{-u} / sqrt(pi u) du`.
///
/// The integral is taken in `sigma = ln tau` with `tau = t^2 / (4u)`, where it
/// reads `int G_{e^sigma} e^{-u} sqrt(u / pi) d sigma`.
pub fn poisson_kernel(alpha: &AlphaIndex, t: f64, x: &PointRd, y: &PointRd) -> Result<f64> {
    check_inputs(alpha, t, x, y)?;
    let a = alpha.components();
    let (xs, ys) = (x.coords(), y.coords());
    let sep2 = x.dist(y).powi(2);
    let lam0 = alpha.ground_eigenvalue();
    // u >= 750 or |x - y|^2 / tau >= 320 makes the integrand negligible
    let tau_lo = (t * t / 3000.0).max(sep2 / 320.0);
    let tau_hi = (60.0 / lam0 + 10.0).max(4.0 * tau_lo);
    let f = |sigma: f64| {
        let tau = sigma.exp();
        let u = t * t / (4.0 * tau);
        (ln_closed_unchecked(a, tau, xs, ys) - u + 0.5 * (u / std::f64::consts::PI).ln()).exp()
    };
    let (s0, s1) = (tau_lo.ln(), tau_hi.ln());
    // split so the adaptive rule sees the peak early
    let cuts = 16;
    let mut total = 0.0;
    let mut err = 0.0;
    for k in 0..cuts {
        let a = s0 + (s1 - s0) * k as f64 / cuts as f64;
        let b = s0 + (s1 - s0) * (k + 1) as f64 / cuts as f64;
        let r = adaptive_integrate_with(
            f,
            a,
            b,
            AdaptiveOptions {
                abs_tol: 1e-300,
                rel_tol: 1e-12,
                max_panels: 500,
            },
        )?;
        total += r.value;
        err += r.error;
    }
    if err > 1e-9 * total.abs() {
        return Err(Error::NoConvergence {
            estimate: total,
            achieved: err,
            requested: 1e-9 * total.abs(),
        });
    }
    Ok(total)
}
