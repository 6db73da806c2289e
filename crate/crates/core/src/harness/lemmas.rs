//! Bounded-ratio checks of the quantitative lemmas behind the kernel
//! estimates. Each check evaluates the left side of a bound divided by its
//! right side (constant 1) over a fixed grid and records how the sup moves as
//! the grid is refined toward the degenerate region.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::config::{GridConfig, PairGrid};
use super::ratios::{ball_at, BALL_TOL};
use crate::error::{Error, Result};
use crate::index::{AlphaIndex, PointRd};
use crate::kernels::{golden_max, ln_sinh_2t};
use crate::quadrature::{adaptive_integrate_with, integrate_to_infinity, AdaptiveOptions};
use crate::special_fn::bessel_i_scaled;

const OPTS: AdaptiveOptions = AdaptiveOptions {
    abs_tol: 1e-300,
    rel_tol: 1e-10,
    max_panels: 2000,
};

/// Sup of one ratio over a grid, split by refinement level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub parameters: String,
    pub samples: usize,
    /// `sup_by_level[k]`: sup over levels `0..=k`.
    pub sup_by_level: Vec<f64>,
    pub refinement_deltas: Vec<f64>,
    pub sup: f64,
    /// Sample attaining the sup, flattened.
    pub argmax: Vec<f64>,
    /// Every sup finite and the last refinement delta below the tolerance.
    pub stable: bool,
}

impl LemmaReport {
    fn from_samples(
        lemma: &str,
        parameters: String,
        levels: usize,
        samples: &[(usize, Vec<f64>, f64)],
        tol: f64,
    ) -> Self {
        let mut sup_by_level = vec![0.0f64; levels + 1];
        let mut best = (f64::NEG_INFINITY, vec![]);
        for (level, at, v) in samples {
            for s in sup_by_level.iter_mut().skip(*level) {
                *s = if v.is_nan() || s.is_nan() { f64::NAN } else { s.max(*v) };
            }
            if *v > best.0 || v.is_nan() {
                best = (*v, at.clone());
            }
        }
        let refinement_deltas: Vec<f64> = sup_by_level.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
        let stable = sup_by_level.iter().all(|v| v.is_finite() && *v >= 0.0)
            && refinement_deltas.last().is_none_or(|d| *d < tol);
        Self {
            lemma: lemma.into(),
            parameters,
            samples: samples.len(),
            sup: sup_by_level[levels],
            sup_by_level,
            refinement_deltas,
            argmax: best.1,
            stable,
        }
    }
}

/// `int g(1 + s) Pi_beta(ds)` for `g` peaked at `w = 1 + s = 0` with width
/// `scale`. Power substitutions absorb the endpoint factors of the density.
fn pi_peak_integral(beta: f64, g: impl Fn(f64) -> f64, scale: f64) -> Result<f64> {
    if beta == -0.5 {
        return Ok((g(0.0) + g(2.0)) / (2.0 * std::f64::consts::PI).sqrt());
    }
    let c = (-(0.5 * std::f64::consts::PI.ln()) - beta * std::f64::consts::LN_2 - ln_gamma(beta + 0.5)).exp();
    let m = if beta < 0.5 { 1.0 / (beta + 0.5) } else { 1.0 };
    let jac = |r: f64| {
        let v = r.powf(m);
        let e = m * (beta + 0.5) - 1.0;
        let rp = if e == 0.0 { 1.0 } else { r.powf(e) };
        (v, m * rp * (2.0 - v).powf(beta - 0.5))
    };
    let mut cuts = vec![0.0];
    let mut w = scale.max(1e-300);
    while w < 1.0 {
        cuts.push(w.powf(1.0 / m));
        w *= 10.0;
    }
    cuts.push(1.0);
    let mut total = 0.0;
    for k in cuts.windows(2) {
        total += adaptive_integrate_with(
            |r| {
                let (v, j) = jac(r);
                g(v) * j
            },
            k[0],
            k[1],
            OPTS,
        )?
        .value;
    }
    total += adaptive_integrate_with(
        |r| {
            let (v, j) = jac(r);
            g(2.0 - v) * j
        },
        0.0,
        1.0,
        OPTS,
    )?
    .value;
    Ok(c * total)
}

/// `int (base + sum_i a_i (1 + s_i))^{-e} prod_i Pi_{beta_i}(ds_i)`.
fn nested_q_integral(betas: &[f64], a: &[f64], base: f64, e: f64) -> Result<f64> {
    match betas.split_first() {
        None => Ok(base.powf(-e)),
        Some((&b0, rest)) => {
            let failed = std::cell::Cell::new(None);
            let v = pi_peak_integral(
                b0,
                |w| match nested_q_integral(rest, &a[1..], base + a[0] * w, e) {
                    Ok(v) => v,
                    Err(err) => {
                        failed.set(Some(err));
                        0.0
                    }
                },
                base / a[0],
            )?;
            match failed.into_inner() {
                Some(err) => Err(err),
                None => Ok(v),
            }
        }
    }
}

fn check_same_dim(what: &str, v: &[f64], d: usize) -> Result<()> {
    if v.len() != d {
        return Err(Error::Precondition(format!("{what} has {} entries, expected {d}", v.len())));
    }
    Ok(())
}

/// Parameters of the two integral bounds in terms of `q_+`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma21Params {
    pub xi: Vec<f64>,
    pub kappa: Vec<f64>,
}

impl Lemma21Params {
    fn validate(&self, alpha: &AlphaIndex) -> Result<()> {
        let d = alpha.dim();
        check_same_dim("xi", &self.xi, d)?;
        check_same_dim("kappa", &self.kappa, d)?;
        for i in 0..d {
            let (xi, ka) = (self.xi[i], self.kappa[i]);
            if !(xi >= 0.0 && ka >= 0.0 && xi.is_finite() && ka.is_finite()) {
                return Err(Error::Inadmissible(format!(
                    "xi and kappa must be nonnegative, got xi_{i} = {xi}, kappa_{i} = {ka}"
                )));
            }
            if alpha.components()[i] + xi + ka < -0.5 {
                return Err(Error::Inadmissible(format!(
                    "alpha + xi + kappa must be at least -1/2 in coordinate {i}"
                )));
            }
        }
        Ok(())
    }

    /// Parameter grid used by the default lemma suite: `xi = kappa = 0` when
    /// admissible, `xi = 0, kappa = 1/2`, `xi = kappa = 1/2` and `xi = 1, kappa = 0`.
    pub fn defaults(alpha: &AlphaIndex) -> Vec<Self> {
        let d = alpha.dim();
        let mut out = vec![];
        for (xi, ka) in [(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (1.0, 0.0)] {
            let p = Self {
                xi: vec![xi; d],
                kappa: vec![ka; d],
            };
            if p.validate(alpha).is_ok() {
                out.push(p);
            }
        }
        out
    }
}

/// Both sides of the `q_+` integral bounds at one pair: the first ratio
/// `(x+y)^{2 xi} int q_+^{-(d+|alpha|+|xi|)} dPi mu(B)` and the second, with
/// one more half power of `1/q_+` and the extra factor `|x - y|`.
pub fn lemma21_ratios(alpha: &AlphaIndex, p: &Lemma21Params, x: &PointRd, y: &PointRd) -> Result<(f64, f64)> {
    p.validate(alpha)?;
    x.check_dim(alpha.dim())?;
    y.check_dim(alpha.dim())?;
    let r = x.dist(y);
    if r == 0.0 {
        return Err(Error::Diagonal);
    }
    let (xs, ys) = (x.coords(), y.coords());
    let betas: Vec<f64> = (0..alpha.dim()).map(|i| alpha.components()[i] + p.xi[i] + p.kappa[i]).collect();
    let a: Vec<f64> = xs.iter().zip(ys).map(|(u, v)| 2.0 * u * v).collect();
    let e = alpha.dim() as f64 + alpha.length() + p.xi.iter().sum::<f64>();
    let weight: f64 = xs.iter().zip(ys).zip(&p.xi).map(|((u, v), xi)| (u + v).powf(2.0 * xi)).product();
    let mu = ball_at(alpha, x, y, BALL_TOL)?;
    let first = weight * nested_q_integral(&betas, &a, r * r, e)? * mu;
    let second = weight * nested_q_integral(&betas, &a, r * r, e + 0.5)? * r * mu;
    Ok((first, second))
}

/// Result of [`lemma21_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma21Report {
    pub first: LemmaReport,
    pub second: LemmaReport,
    /// The second ratio never exceeds the first at any grid pair.
    pub dominated: bool,
}

pub fn lemma21_check(alpha: &AlphaIndex, p: &Lemma21Params, grid: &PairGrid, tol: f64) -> Result<Lemma21Report> {
    p.validate(alpha)?;
    let vals = grid
        .pairs
        .par_iter()
        .map(|g| lemma21_ratios(alpha, p, &g.x, &g.y).map(|v| (g, v)))
        .collect::<Result<Vec<_>>>()?;
    let at = |g: &super::config::GridPair| [g.x.coords(), g.y.coords()].concat();
    let first: Vec<_> = vals.iter().map(|(g, v)| (g.level, at(g), v.0)).collect();
    let second: Vec<_> = vals.iter().map(|(g, v)| (g.level, at(g), v.1)).collect();
    let label = format!("alpha={:?} xi={:?} kappa={:?}", alpha.components(), p.xi, p.kappa);
    Ok(Lemma21Report {
        first: LemmaReport::from_samples("q_plus_integral", label.clone(), grid.depth, &first, tol),
        second: LemmaReport::from_samples("q_plus_integral_half", label, grid.depth, &second, tol),
        dominated: vals.iter().all(|(_, v)| v.1 <= v.0 * (1.0 + 1e-9)),
    })
}

/// `[int Pi_{a+b}(ds) / (A - B s)^{a+1/2+lambda}] A^{a+1/2} (A - B)^lambda`,
/// with `A - B` passed directly so that `B / A` can approach 1.
pub fn lemma23_ratio(a: f64, b: f64, lambda: f64, big_a: f64, a_minus_b: f64) -> Result<f64> {
    check_lemma23(a, b, lambda)?;
    if !(big_a > 0.0 && a_minus_b > 0.0 && a_minus_b < big_a) {
        return Err(Error::Domain(format!("need A > B > 0, got A = {big_a}, A - B = {a_minus_b}")));
    }
    let bb = big_a - a_minus_b;
    let gamma = a + 0.5 + lambda;
    let i = pi_peak_integral(a + b, |w| (a_minus_b + bb * w).powf(-gamma), a_minus_b / bb)?;
    Ok(i * big_a.powf(a + 0.5) * a_minus_b.powf(lambda))
}

fn check_lemma23(a: f64, b: f64, lambda: f64) -> Result<()> {
    if !(a >= -0.5 && b >= 0.0 && lambda > 0.0 && a.is_finite() && b.is_finite() && lambda.is_finite()) {
        return Err(Error::Inadmissible(format!(
            "need a >= -1/2, b >= 0, lambda > 0; got a = {a}, b = {b}, lambda = {lambda}"
        )));
    }
    Ok(())
}

/// Sup of [`lemma23_ratio`] over `A` in `{1, 10^{1/2}, 10, 10^{3/2}, 100}`
/// and `B / A` in ten equispaced values on `[0.1, 0.999]` (level 0); level
/// `k >= 1` adds `B / A = 1 - 10^{-(3+k)}`.
pub fn lemma23_check(a: f64, b: f64, lambda: f64, depth: usize, tol: f64) -> Result<LemmaReport> {
    check_lemma23(a, b, lambda)?;
    let mut pts = vec![];
    for i in 0..5 {
        let big_a = 10f64.powf(0.5 * i as f64);
        for j in 0..10 {
            let ratio = 0.1 + 0.899 * j as f64 / 9.0;
            pts.push((0, big_a, big_a * (1.0 - ratio)));
        }
        for k in 1..=depth {
            pts.push((k, big_a, big_a * 10f64.powi(-(3 + k as i32))));
        }
    }
    let samples = pts
        .par_iter()
        .map(|&(k, aa, amb)| lemma23_ratio(a, b, lambda, aa, amb).map(|v| (k, vec![aa, 1.0 - amb / aa], v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaReport::from_samples(
        "pi_integral",
        format!("a={a} b={b} lambda={lambda}"),
        depth,
        &samples,
        tol,
    ))
}

fn check_lemma28(a: f64, b: f64, m: f64) -> Result<()> {
    if !(a > 1.0 && b > 0.0 && a.is_finite() && b.is_finite() && m.is_finite()) {
        return Err(Error::Inadmissible(format!(
            "need a > 1, b > 0, finite M; got a = {a}, b = {b}, M = {m}"
        )));
    }
    Ok(())
}

/// `e^T T^{a-1} int_0^1 (Log z)^M (1 - z^2)^{b-1} z^{-a-M} e^{-T/z} dz` with
/// `Log z = ln((1 + z) / (1 - z))`; the ratio itself is this times `e^{-T}`.
pub fn lemma28_scaled(a: f64, b: f64, m: f64, t: f64) -> Result<f64> {
    check_lemma28(a, b, m)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("T must be positive, got {t}")));
    }
    // v = 1/z - 1, w = T v
    let ln_g = |w: f64| {
        let v = w / t;
        let log_l = (2.0 / v).ln_1p().ln();
        m * log_l + (b - 1.0) * (v * (2.0 + v)).ln() + (a + m - 2.0 * b) * v.ln_1p() - w
    };
    let g = |w: f64| if w == 0.0 { 0.0 } else { ln_g(w).exp() };
    // w = r^k with k b = 1 absorbs w^{b-1} when b < 1
    let k = if b < 1.0 { 1.0 / b } else { 1.0 };
    let head = adaptive_integrate_with(
        |r: f64| {
            if r == 0.0 {
                return 0.0;
            }
            let w = r.powf(k);
            k * (ln_g(w) + (k - 1.0) * r.ln()).exp()
        },
        0.0,
        1.0,
        OPTS,
    )?
    .value;
    let tail = integrate_to_infinity(g, 1.0, OPTS)?.value;
    Ok(t.powf(a - 2.0) * (head + tail))
}

/// `T^{a-1} int_0^1 (Log z)^M (1 - z^2)^{b-1} z^{-a-M} e^{-T/z} dz`.
pub fn lemma28_ratio(a: f64, b: f64, m: f64, t: f64) -> Result<f64> {
    Ok(lemma28_scaled(a, b, m, t)? * (-t).exp())
}

/// Result of [`lemma28_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma28Report {
    pub report: LemmaReport,
    /// The ratio decreases along the grid beyond `T = 10`.
    pub monotone_tail: bool,
}

/// Sup of [`lemma28_ratio`] over `T = 10^{j / 2^{k+1}}` in `[1e-3, 1e3]`;
/// level `k` doubles the number of points per decade.
pub fn lemma28_check(a: f64, b: f64, m: f64, depth: usize, tol: f64) -> Result<Lemma28Report> {
    check_lemma28(a, b, m)?;
    let mut pts = vec![];
    for k in 0..=depth {
        let per = 2usize << k;
        for j in 0..=(6 * per) {
            if k > 0 && j % 2 == 0 {
                continue;
            }
            pts.push((k, 10f64.powf(-3.0 + j as f64 / per as f64)));
        }
    }
    let samples = pts
        .par_iter()
        .map(|&(k, t)| lemma28_ratio(a, b, m, t).map(|v| (k, vec![t], v)))
        .collect::<Result<Vec<_>>>()?;
    let mut tail: Vec<_> = samples.iter().filter(|s| s.1[0] > 10.0).map(|s| (s.1[0], s.2)).collect();
    tail.sort_by(|p, q| p.0.total_cmp(&q.0));
    let monotone_tail = tail.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(Lemma28Report {
        report: LemmaReport::from_samples("zeta_integral", format!("a={a} b={b} M={m}"), depth, &samples, tol),
        monotone_tail,
    })
}

/// Exponent of the `L^p(t^{W-1} dt)` norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpExponent {
    One,
    Two,
    Infinity,
}

/// Parameters of the `p_u` integral estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma29Params {
    pub eps: Vec<u8>,
    pub theta: Vec<u8>,
    pub rho: Vec<u8>,
    pub u: f64,
    pub p: LpExponent,
    pub w: f64,
    pub c: f64,
}

impl Lemma29Params {
    fn validate(&self, alpha: &AlphaIndex) -> Result<()> {
        let d = alpha.dim();
        for (name, v) in [("eps", &self.eps), ("theta", &self.theta), ("rho", &self.rho)] {
            if v.len() != d {
                return Err(Error::Precondition(format!("{name} has {} entries, expected {d}", v.len())));
            }
        }
        for i in 0..d {
            if self.eps[i] > 1 {
                return Err(Error::Inadmissible(format!("eps_{i} must be 0 or 1")));
            }
            if self.theta[i] > 2 * self.eps[i] || self.rho[i] > 2 * self.eps[i] {
                return Err(Error::Inadmissible(format!(
                    "need theta, rho <= 2 eps in coordinate {i}, got theta = {}, rho = {}, eps = {}",
                    self.theta[i], self.rho[i], self.eps[i]
                )));
            }
        }
        if !(self.u >= 0.0 && self.c > 0.0 && self.w.is_finite() && self.u.is_finite() && self.c.is_finite()) {
            return Err(Error::Inadmissible(format!(
                "need u >= 0, C > 0 and finite W; got u = {}, C = {}, W = {}",
                self.u, self.c, self.w
            )));
        }
        Ok(())
    }

    fn w_over_p(&self) -> f64 {
        match self.p {
            LpExponent::One => self.w,
            LpExponent::Two => 0.5 * self.w,
            LpExponent::Infinity => 0.0,
        }
    }

    /// The `(u, p, W, C)` combinations used for the five kernel families,
    /// each with every `eps` in `{0,1}^d`, `theta = eta eps` for uniform
    /// `eta` in `{0, 1, 2}`, and `rho = 0` (plus `rho = e_j` when `u = 1`).
    pub fn defaults(d: usize) -> Vec<Self> {
        let usages = [
            (0.0, LpExponent::Infinity, 1.0, 1.0),
            (1.0, LpExponent::Infinity, 1.0, 1.0 / 64.0),
            (0.0, LpExponent::One, 0.5, 0.5),
            (1.0, LpExponent::One, 0.5, 0.25),
            (0.0, LpExponent::Two, 2.0, 0.5),
            (1.0, LpExponent::Two, 2.0, 1.0 / 64.0),
            (0.0, LpExponent::One, 1.0, 0.5),
            (1.0, LpExponent::One, 1.0, 0.25),
        ];
        let mut out = vec![];
        for (u, p, w, c) in usages {
            for mask in 0..(1u32 << d) {
                let eps: Vec<u8> = (0..d).map(|i| ((mask >> i) & 1) as u8).collect();
                for eta in 0..3u8 {
                    if eta > 0 && mask == 0 {
                        continue;
                    }
                    let theta: Vec<u8> = eps.iter().map(|e| e * eta).collect();
                    let mut rhos = vec![vec![0u8; d]];
                    if u == 1.0 {
                        rhos.extend((0..d).filter(|&j| eps[j] == 1).map(|j| {
                            let mut r = vec![0u8; d];
                            r[j] = 1;
                            r
                        }));
                    }
                    for rho in rhos {
                        out.push(Self {
                            eps: eps.clone(),
                            theta: theta.clone(),
                            rho,
                            u,
                            p,
                            w,
                            c,
                        });
                    }
                }
            }
        }
        out
    }

    /// `ln p_u(x, y, zeta(t))`. The `Pi` integral factorizes over coordinates
    /// and each factor is `exp(-C[(x-y)^2/z + (x+y)^2 z]/4) w^{-nu} e^{-w} I_nu(w)`
    /// with `w = C x y / sinh 2t`, `nu = alpha + 1 + eps`.
    pub fn ln_p(&self, alpha: &AlphaIndex, x: &PointRd, y: &PointRd, t: f64) -> Result<f64> {
        self.validate(alpha)?;
        x.check_dim(alpha.dim())?;
        y.check_dim(alpha.dim())?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("t must be positive, got {t}")));
        }
        Ok(self.ln_p_unchecked(alpha.components(), x.coords(), y.coords(), t))
    }

    fn ln_p_unchecked(&self, alpha: &[f64], x: &[f64], y: &[f64], t: f64) -> f64 {
        let d = alpha.len() as f64;
        let eps_len: f64 = self.eps.iter().map(|&e| e as f64).sum();
        let n = d + alpha.iter().sum::<f64>() + 2.0 * eps_len;
        let half: f64 = self.theta.iter().chain(&self.rho).map(|&v| v as f64).sum::<f64>() / 2.0;
        let e_zeta = -n + half - self.w_over_p() - self.u / 2.0;
        let em = (-2.0 * t).exp();
        let ln_cosh = t + em.ln_1p() - std::f64::consts::LN_2;
        let ln_tanh = (-(-2.0 * t).exp_m1()).ln() - em.ln_1p();
        let zeta = ln_tanh.exp();
        let ln_sinh = ln_sinh_2t(t);
        let mut ln = -2.0 * n * ln_cosh + e_zeta * ln_tanh;
        for i in 0..alpha.len() {
            let (xi, yi) = (x[i], y[i]);
            ln += (2 * self.eps[i] - self.theta[i]) as f64 * xi.ln();
            ln += (2 * self.eps[i] - self.rho[i]) as f64 * yi.ln();
            let nu = alpha[i] + 1.0 + self.eps[i] as f64;
            ln -= self.c * ((xi - yi).powi(2) / zeta + (xi + yi).powi(2) * zeta) / 4.0;
            let ln_w = self.c.ln() + xi.ln() + yi.ln() - ln_sinh;
            ln += ln_scaled_bessel_over_power(nu, ln_w);
        }
        ln
    }
}

/// `ln(w^{-nu} e^{-w} I_nu(w))` from `ln w`.
fn ln_scaled_bessel_over_power(nu: f64, ln_w: f64) -> f64 {
    let w = ln_w.exp();
    if w < 1e-6 {
        -nu * std::f64::consts::LN_2 - ln_gamma(nu + 1.0) - w + w * w / (4.0 * (nu + 1.0))
    } else {
        -nu * ln_w + bessel_i_scaled(nu, w).expect("order above -1").ln()
    }
}

const LN_T_MIN: f64 = -30.0;
const LN_T_MAX: f64 = 10.0;
const SCAN: usize = 800;

/// `ln ||exp(f(t))||_{L^p(t^{W-1} dt)}` for a unimodal-in-`ln t` log density.
fn ln_lp_norm(f: impl Fn(f64) -> f64, p: LpExponent, w: f64) -> Result<f64> {
    let pw = match p {
        LpExponent::One => 1.0,
        LpExponent::Two => 2.0,
        LpExponent::Infinity => 0.0,
    };
    let h = |s: f64| {
        let v = f(s.exp());
        if pw == 0.0 {
            v
        } else {
            pw * v + w * s
        }
    };
    let step = (LN_T_MAX - LN_T_MIN) / SCAN as f64;
    let scan: Vec<f64> = (0..=SCAN).map(|i| h(LN_T_MIN + step * i as f64)).collect();
    let (imax, &lmax) = scan
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Precondition("p_u is not finite anywhere on the t range".into()))?;
    if imax == 0 || imax == SCAN {
        return Err(Error::Precondition(format!(
            "p_u peaks at the edge of t in [e^{LN_T_MIN}, e^{LN_T_MAX}]"
        )));
    }
    let s_at = |i: usize| LN_T_MIN + step * i as f64;
    if pw == 0.0 {
        let best = golden_max(h, s_at(imax - 1), s_at(imax + 1));
        return Ok(best.max(lmax));
    }
    let keep = |v: &f64| *v > lmax - 60.0;
    let lo = scan.iter().position(keep).unwrap_or(0).saturating_sub(1);
    let hi = (scan.iter().rposition(keep).unwrap_or(SCAN) + 1).min(SCAN);
    if lo == 0 || hi == SCAN {
        return Err(Error::Precondition("p_u is not negligible at the edge of the t range".into()));
    }
    let g = |s: f64| (h(s) - lmax).exp();
    let mut total = 0.0;
    for (a, b) in [(s_at(lo), s_at(imax)), (s_at(imax), s_at(hi))] {
        total += adaptive_integrate_with(g, a, b, OPTS)?.value;
    }
    Ok((lmax + total.ln()) / pw)
}

/// `||p_u(x, y, zeta(t))||_{L^p(t^{W-1} dt)} |x - y|^u mu_alpha(B(x, |x - y|))`.
pub fn lemma29_ratio(alpha: &AlphaIndex, p: &Lemma29Params, x: &PointRd, y: &PointRd) -> Result<f64> {
    p.validate(alpha)?;
    x.check_dim(alpha.dim())?;
    y.check_dim(alpha.dim())?;
    let r = x.dist(y);
    if r == 0.0 {
        return Err(Error::Diagonal);
    }
    let ln_norm = ln_lp_norm(
        |t| p.ln_p_unchecked(alpha.components(), x.coords(), y.coords(), t),
        p.p,
        p.w,
    )?;
    Ok((ln_norm + p.u * r.ln()).exp() * ball_at(alpha, x, y, BALL_TOL)?)
}

pub fn lemma29_check(alpha: &AlphaIndex, p: &Lemma29Params, grid: &PairGrid, tol: f64) -> Result<LemmaReport> {
    p.validate(alpha)?;
    let samples = grid
        .pairs
        .par_iter()
        .map(|g| lemma29_ratio(alpha, p, &g.x, &g.y).map(|v| (g.level, [g.x.coords(), g.y.coords()].concat(), v)))
        .collect::<Result<Vec<_>>>()?;
    let label = format!(
        "alpha={:?} eps={:?} theta={:?} rho={:?} u={} p={:?} W={} C={}",
        alpha.components(),
        p.eps,
        p.theta,
        p.rho,
        p.u,
        p.p,
        p.w,
        p.c
    );
    Ok(LemmaReport::from_samples("p_u_norm", label, grid.depth, &samples, tol))
}

/// `G_t(x, y)` rebuilt as `sum_eps C_{alpha,eps} 2^{-(d+|alpha|+2|eps|)} p_0`
/// with `u = 0`, `p = infinity`, `W = C = 1` and `theta = rho = 0`.
pub fn heat_from_p0(alpha: &AlphaIndex, x: &PointRd, y: &PointRd, t: f64) -> Result<f64> {
    let d = alpha.dim();
    let mut terms = vec![];
    for mask in 0..(1u32 << d) {
        let eps: Vec<u8> = (0..d).map(|i| ((mask >> i) & 1) as u8).collect();
        let p = Lemma29Params {
            eps: eps.clone(),
            theta: vec![0; d],
            rho: vec![0; d],
            u: 0.0,
            p: LpExponent::Infinity,
            w: 1.0,
            c: 1.0,
        };
        let n = d as f64 + alpha.length() + 2.0 * eps.iter().map(|&e| e as f64).sum::<f64>();
        let ln_c: f64 = alpha
            .components()
            .iter()
            .zip(&eps)
            .map(|(a, &e)| if e == 0 { (2.0 * (a + 1.0)).ln() } else { 0.0 })
            .sum();
        terms.push(ln_c - n * std::f64::consts::LN_2 + p.ln_p(alpha, x, y, t)?);
    }
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(m.exp() * terms.iter().map(|v| (v - m).exp()).sum::<f64>())
}

/// Sup over the pair grid of `sup_t [sum_eps C_{alpha,eps} 2^{-N} p_0] mu(B)`,
/// the heat maximal growth ratio assembled from `p_0`.
pub fn heat_assembly_check(alpha: &AlphaIndex, grid: &PairGrid, tol: f64) -> Result<LemmaReport> {
    let samples = grid
        .pairs
        .par_iter()
        .map(|g| {
            let ln_sup = ln_lp_norm(
                |t| heat_from_p0(alpha, &g.x, &g.y, t).map_or(f64::NAN, f64::ln),
                LpExponent::Infinity,
                1.0,
            )?;
            let v = ln_sup.exp() * ball_at(alpha, &g.x, &g.y, BALL_TOL)?;
            Ok((g.level, [g.x.coords(), g.y.coords()].concat(), v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaReport::from_samples(
        "heat_from_p0",
        format!("alpha={:?}", alpha.components()),
        grid.depth,
        &samples,
        tol,
    ))
}

/// Grid used by the lemma suite: the sweep grid with four points per axis.
pub fn lemma_grid(d: usize, seed: u64) -> Result<PairGrid> {
    let g = GridConfig {
        points_per_axis: 4,
        ..GridConfig::default()
    };
    PairGrid::build(&g, d, seed)
}
