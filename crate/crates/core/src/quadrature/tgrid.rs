//! Composite rules for `int f(t) t^{W-1} dt` on log-spaced panels.
//!
//! On each panel of `v = ln t` an 8-point Gauss–Legendre rule integrates
//! `f(e^v) e^{W v}`, so the rule weights absorb `t^W`.

use super::gauss::gauss_legendre_rule;
use super::{DomainTag, QuadRule, POINTS_PER_PANEL};
use crate::error::{domain, Error, Result};

/// Rule for `int_{t_min}^{t_max} f(t) t^{W-1} dt` on `n_panels` log-panels.
pub fn t_weighted_grid(w: f64, t_min: f64, t_max: f64, n_panels: usize) -> Result<QuadRule> {
    let (nodes, weights) = panels(w, t_min, t_max, n_panels)?;
    QuadRule::new(nodes, weights, DomainTag::TWeighted(w), false)
}

/// As [`t_weighted_grid`] with one extra node covering `(0, t_min]`: the
/// head `int_0^{t_min} f t^{W-1} dt` is replaced by `f(t*) t_min^W / W` at the
/// weighted mean `t* = t_min W / (W + 1)`. Needs `W > 0`.
pub fn t_weighted_halfline(w: f64, t_min: f64, t_max: f64, n_panels: usize) -> Result<QuadRule> {
    if !(w > 0.0) {
        return domain(format!("the head of t^(W-1) dt is finite only for W > 0, got {w}"));
    }
    let (mut nodes, mut weights) = panels(w, t_min, t_max, n_panels)?;
    nodes.insert(0, t_min * w / (w + 1.0));
    weights.insert(0, t_min.powf(w) / w);
    QuadRule::new(nodes, weights, DomainTag::TWeighted(w), false)
}

fn panels(w: f64, t_min: f64, t_max: f64, n_panels: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(t_min.is_finite() && t_min > 0.0) {
        return domain(format!("t_min = {t_min} must be positive"));
    }
    if !(t_max.is_finite() && t_max > t_min) {
        return domain(format!("t_max = {t_max} must exceed t_min = {t_min}"));
    }
    if n_panels < 8 {
        return Err(Error::Precondition(format!("need at least 8 panels, got {n_panels}")));
    }
    if !w.is_finite() {
        return domain("weight exponent must be finite");
    }
    let base = gauss_legendre_rule(POINTS_PER_PANEL, 0.0, 1.0)?;
    let (v0, v1) = (t_min.ln(), t_max.ln());
    let dv = (v1 - v0) / n_panels as f64;
    let mut nodes = Vec::with_capacity(n_panels * POINTS_PER_PANEL);
    let mut weights = Vec::with_capacity(n_panels * POINTS_PER_PANEL);
    for p in 0..n_panels {
        let left = v0 + p as f64 * dv;
        for (s, ws) in base.iter() {
            let v = left + s * dv;
            nodes.push(v.exp());
            weights.push(ws * dv * (w * v).exp());
        }
    }
    Ok((nodes, weights))
}

/// Value of a `t`-integral with the change under panel doubling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TIntegral {
    pub value: f64,
    pub doubling_delta: f64,
}

/// `int_{t_min}^{t_max} f(t) t^{W-1} dt` at `n_panels` and `2 n_panels`; the
/// finer value is returned.
pub fn t_weighted_integral(
    f: impl Fn(f64) -> f64,
    w: f64,
    t_min: f64,
    t_max: f64,
    n_panels: usize,
) -> Result<TIntegral> {
    let coarse = t_weighted_grid(w, t_min, t_max, n_panels)?.integrate(&f);
    let fine = t_weighted_grid(w, t_min, t_max, 2 * n_panels)?.integrate(&f);
    Ok(TIntegral {
        value: fine,
        doubling_delta: (fine - coarse).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial() {
        let r = t_weighted_grid(2.0, 0.1, 1.0, 8).unwrap();
        assert!((r.integrate(|_| 1.0) - 0.495).abs() < 1e-10);
    }

    #[test]
    fn exponential_against_incomplete_gamma() {
        // int_{1e-6}^{50} e^{-t} dt
        let r = t_weighted_grid(1.0, 1e-6, 50.0, 48).unwrap();
        let exact = (-1e-6f64).exp() - (-50.0f64).exp();
        assert!((r.integrate(|t| (-t).exp()) - exact).abs() < 1e-8);
        let h = t_weighted_halfline(1.0, 1e-6, 50.0, 48).unwrap();
        assert!((h.integrate(|t| (-t).exp()) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gamma_integral() {
        let r = t_weighted_grid(3.0, 1e-6, 50.0, 48).unwrap();
        assert!((r.integrate(|t| (-4.0 * t).exp()) - 2.0 / 64.0).abs() < 1e-8);
    }

    #[test]
    fn doubling_is_self_consistent() {
        let v = t_weighted_integral(|t| (-2.0 * t).exp() * (1.0 + t).ln(), 0.5, 1e-5, 40.0, 48).unwrap();
        assert!(v.doubling_delta < 1e-10, "{v:?}");
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(t_weighted_grid(1.0, 0.0, 1.0, 8).is_err());
        assert!(t_weighted_grid(1.0, 1.0, 0.5, 8).is_err());
        assert!(t_weighted_grid(1.0, 0.1, 1.0, 4).is_err());
        assert!(t_weighted_halfline(0.0, 0.1, 1.0, 8).is_err());
    }
}
