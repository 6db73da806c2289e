//! Quadrature rules: Gauss rules for `Pi_nu` on `[-1, 1]`, composite
//! log-panel rules for `t`-integrals with weight `t^{W-1}`, Gauss rules for
//! the Laguerre weight, and adaptive Gauss–Kronrod integration.

mod adaptive;
mod gauss;
mod tgrid;

use serde::Serialize;

use crate::error::{Error, Result};

pub use adaptive::{
    adaptive_integrate, adaptive_integrate_with, integrate_to_infinity, AdaptiveOptions, Integral,
};
pub use gauss::{
    gauss_laguerre_rule, gauss_legendre_rule, pi_measure_mass, pi_measure_rule, schlafli_bessel,
};
pub use tgrid::{t_weighted_grid, t_weighted_halfline, t_weighted_integral, TIntegral};

/// Panels used by default for `t`-integrals.
pub const DEFAULT_T_PANELS: usize = 48;
/// Gauss points per log-panel.
pub const POINTS_PER_PANEL: usize = 8;
/// Default node count per coordinate for `Pi_nu` integrals.
pub const DEFAULT_PI_NODES: usize = 64;

/// What a [`QuadRule`] integrates against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DomainTag {
    /// `Pi_nu(ds)` on `[-1, 1]`.
    PiMeasure(f64),
    /// `t^{W-1} dt` on a subset of `(0, inf)`.
    TWeighted(f64),
    /// `u^a e^{-u} du` on `(0, inf)`.
    LaguerreWeight(f64),
    /// Lebesgue measure on `[a, b]`.
    Generic(f64, f64),
}

impl std::fmt::Display for DomainTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainTag::PiMeasure(nu) => write!(f, "pi_measure({nu})"),
            DomainTag::TWeighted(w) => write!(f, "t_weighted({w})"),
            DomainTag::LaguerreWeight(a) => write!(f, "laguerre_weight({a})"),
            DomainTag::Generic(a, b) => write!(f, "generic({a}, {b})"),
        }
    }
}

/// Nodes and positive weights for one measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain_tag: DomainTag,
    atomic: bool,
}

impl QuadRule {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, domain_tag: DomainTag, atomic: bool) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::Precondition(format!(
                "rule needs equal nonzero node and weight counts, got {} and {}",
                nodes.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Precondition(format!("rule weight {w} is not positive")));
        }
        Ok(Self {
            nodes,
            weights,
            domain_tag,
            atomic,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain_tag(&self) -> DomainTag {
        self.domain_tag
    }

    pub fn is_atomic(&self) -> bool {
        self.atomic
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_j w_j f(x_j)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Fails unless the rule is for `Pi_nu` with this `nu`.
    pub fn expect_pi_measure(&self, nu: f64) -> Result<()> {
        match self.domain_tag {
            DomainTag::PiMeasure(v) if (v - nu).abs() <= 1e-14 * (1.0 + nu.abs()) => Ok(()),
            other => Err(Error::RuleMismatch {
                expected: DomainTag::PiMeasure(nu).to_string(),
                got: other.to_string(),
            }),
        }
    }

    /// Fails unless the rule is `t`-weighted with this `W`.
    pub fn expect_t_weighted(&self, w: f64) -> Result<()> {
        match self.domain_tag {
            DomainTag::TWeighted(v) if (v - w).abs() <= 1e-14 * (1.0 + w.abs()) => Ok(()),
            other => Err(Error::RuleMismatch {
                expected: DomainTag::TWeighted(w).to_string(),
                got: other.to_string(),
            }),
        }
    }
}

/// Tensor product of one-dimensional rules.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductRule {
    factors: Vec<QuadRule>,
}

impl ProductRule {
    pub fn new(factors: Vec<QuadRule>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Precondition("product rule needs at least one factor".into()));
        }
        Ok(Self { factors })
    }

    /// `Pi_{nu_1} x ... x Pi_{nu_d}` with `n_nodes` per factor.
    pub fn pi_measure(orders: &[f64], n_nodes: usize) -> Result<Self> {
        Self::new(
            orders
                .iter()
                .map(|&nu| pi_measure_rule(nu, n_nodes))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn factors(&self) -> &[QuadRule] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    /// Number of tensor points.
    pub fn len(&self) -> usize {
        self.factors.iter().map(QuadRule::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `sum w_{j_1} ... w_{j_d} f(s_{j_1}, ..., s_{j_d})`.
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        let d = self.dim();
        let mut idx = vec![0usize; d];
        let mut point = vec![0.0; d];
        let mut total = 0.0;
        loop {
            let mut w = 1.0;
            for i in 0..d {
                point[i] = self.factors[i].nodes[idx[i]];
                w *= self.factors[i].weights[idx[i]];
            }
            total += w * f(&point);
            let mut i = 0;
            loop {
                idx[i] += 1;
                if idx[i] < self.factors[i].len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
                if i == d {
                    return total;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_rules() {
        assert!(QuadRule::new(vec![], vec![], DomainTag::Generic(0.0, 1.0), false).is_err());
        assert!(QuadRule::new(vec![0.5], vec![-1.0], DomainTag::Generic(0.0, 1.0), false).is_err());
        assert!(QuadRule::new(vec![0.5, 0.6], vec![1.0], DomainTag::Generic(0.0, 1.0), false).is_err());
    }

    #[test]
    fn product_weights_multiply() {
        let a = gauss_legendre_rule(3, 0.0, 1.0).unwrap();
        let b = pi_measure_rule(0.7, 4).unwrap();
        let p = ProductRule::new(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(p.len(), 12);
        let mass = p.integrate(|_| 1.0);
        assert!((mass - a.total_mass() * b.total_mass()).abs() < 1e-15);
        // separable integrand factorizes
        let v = p.integrate(|s| s[0] * s[0] * (1.0 + s[1] * s[1]));
        let expect = a.integrate(|x| x * x) * b.integrate(|s| 1.0 + s * s);
        assert!((v - expect).abs() < 1e-15);
    }

    #[test]
    fn tag_checks() {
        let r = pi_measure_rule(1.0, 5).unwrap();
        assert!(r.expect_pi_measure(1.0).is_ok());
        assert!(matches!(r.expect_pi_measure(2.0), Err(Error::RuleMismatch { .. })));
        assert!(r.expect_t_weighted(1.0).is_err());
    }
}
