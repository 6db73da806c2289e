//! Gauss rules from the symmetric Jacobi matrix of a three-term recurrence.
//!
//! Nodes are the eigenvalues of the Jacobi matrix, polished by Newton steps on
//! the orthonormal polynomial `p_n`. Weights use the Christoffel form
//! `w_j = M / sum_{k<n} p_k(x_j)^2`, which keeps tiny weights near the ends of
//! the support accurate in relative terms.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::{gamma, ln_gamma};

use super::{DomainTag, QuadRule};
use crate::error::{domain, Error, Result};

const SCALE_LIMIT: f64 = 1e150;

/// Orthonormal recurrence `b_{k+1} p_{k+1} = (x - a_k) p_k - b_k p_{k-1}`.
/// `diag` holds `a_0..a_{n-1}`, `off` holds `b_1..b_n`.
struct Recurrence {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Recurrence {
    /// `(p_n, p_n', sum_{k<n} p_k^2, ln scale)`, with all three values divided
    /// by `exp(ln scale)` (the sum by its square).
    fn eval(&self, x: f64) -> (f64, f64, f64, f64) {
        let n = self.diag.len();
        let (mut p_prev, mut p) = (0.0, 1.0);
        let (mut dp_prev, mut dp) = (0.0, 0.0);
        let mut sum = 0.0;
        let mut log_scale = 0.0;
        for k in 0..n {
            sum += p * p;
            let b_prev = if k == 0 { 0.0 } else { self.off[k - 1] };
            let b_next = self.off[k];
            let p_next = ((x - self.diag[k]) * p - b_prev * p_prev) / b_next;
            let dp_next = ((x - self.diag[k]) * dp + p - b_prev * dp_prev) / b_next;
            p_prev = p;
            p = p_next;
            dp_prev = dp;
            dp = dp_next;
            if p.abs() > SCALE_LIMIT || dp.abs() > SCALE_LIMIT {
                p /= SCALE_LIMIT;
                p_prev /= SCALE_LIMIT;
                dp /= SCALE_LIMIT;
                dp_prev /= SCALE_LIMIT;
                sum /= SCALE_LIMIT * SCALE_LIMIT;
                log_scale += SCALE_LIMIT.ln();
            }
        }
        (p, dp, sum, log_scale)
    }

    fn rule(&self, mass: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.diag.len();
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            jac[(k, k)] = self.diag[k];
            if k + 1 < n {
                jac[(k, k + 1)] = self.off[k];
                jac[(k + 1, k)] = self.off[k];
            }
        }
        let mut nodes: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        let mut weights = Vec::with_capacity(n);
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (p, dp, _, _) = self.eval(*x);
                if dp == 0.0 {
                    break;
                }
                let step = p / dp;
                *x -= step;
                if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
                    break;
                }
            }
            let (_, _, sum, log_scale) = self.eval(*x);
            weights.push(mass * (-2.0 * log_scale).exp() / sum);
        }
        (nodes, weights)
    }
}

/// Total mass `1 / (2^nu Gamma(nu + 1))` of `Pi_nu`.
pub fn pi_measure_mass(nu: f64) -> f64 {
    (-(nu * std::f64::consts::LN_2) - ln_gamma(nu + 1.0)).exp()
}

/// Gauss rule for `Pi_nu(ds) = (1 - s^2)^{nu - 1/2} ds / (sqrt(pi) 2^nu Gamma(nu + 1/2))`.
///
/// At `nu = -1/2` the measure is the pair of atoms `(delta_{-1} + delta_1) / sqrt(2 pi)`
/// and the returned rule is exactly that, whatever `n_nodes` is.
pub fn pi_measure_rule(nu: f64, n_nodes: usize) -> Result<QuadRule> {
    if !(nu.is_finite() && nu >= -0.5) {
        return domain(format!(
            "Pi_nu needs nu >= -1/2, got {nu}; shift the order before building the rule"
        ));
    }
    if n_nodes == 0 {
        return Err(Error::Precondition("n_nodes must be positive".into()));
    }
    if nu == -0.5 {
        let w = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        return QuadRule::new(vec![-1.0, 1.0], vec![w, w], DomainTag::PiMeasure(nu), true);
    }
    // Gegenbauer weight (1-s^2)^{lambda - 1/2} with lambda = nu
    let lambda = nu;
    let n = n_nodes;
    let mut off = Vec::with_capacity(n);
    for k in 1..=n {
        let kf = k as f64;
        let beta = if k == 1 {
            1.0 / (2.0 * (1.0 + lambda))
        } else {
            kf * (kf + 2.0 * lambda - 1.0) / (4.0 * (kf + lambda) * (kf + lambda - 1.0))
        };
        off.push(beta.sqrt());
    }
    let rec = Recurrence {
        diag: vec![0.0; n],
        off,
    };
    let (mut nodes, mut weights) = rec.rule(pi_measure_mass(nu));
    // symmetrize against round-off
    for j in 0..n / 2 {
        let x = 0.5 * (nodes[n - 1 - j] - nodes[j]);
        let w = 0.5 * (weights[j] + weights[n - 1 - j]);
        nodes[j] = -x;
        nodes[n - 1 - j] = x;
        weights[j] = w;
        weights[n - 1 - j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadRule::new(nodes, weights, DomainTag::PiMeasure(nu), false)
}

/// `e^{-z} z^nu int e^{-z s} Pi_nu(ds)`, which equals `e^{-z} I_nu(z)`.
pub fn schlafli_bessel(nu: f64, z: f64, rule: &QuadRule) -> Result<f64> {
    rule.expect_pi_measure(nu)?;
    if !(z.is_finite() && z > 0.0) {
        return domain(format!("argument {z} must be positive"));
    }
    let lz = nu * z.ln();
    Ok(rule.iter().map(|(s, w)| w * (lz - z * (1.0 + s)).exp()).sum())
}

/// Gauss–Legendre rule with `n` nodes on `[a, b]`.
pub fn gauss_legendre_rule(n: usize, a: f64, b: f64) -> Result<QuadRule> {
    if n == 0 || !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::Precondition(format!("bad Gauss-Legendre request n={n} on [{a}, {b}]")));
    }
    let off = (1..=n)
        .map(|k| {
            let kf = k as f64;
            kf / (4.0 * kf * kf - 1.0).sqrt()
        })
        .collect();
    let rec = Recurrence {
        diag: vec![0.0; n],
        off,
    };
    let (nodes, weights) = rec.rule(2.0);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    QuadRule::new(
        nodes.iter().map(|s| c + h * s).collect(),
        weights.iter().map(|w| h * w).collect(),
        DomainTag::Generic(a, b),
        false,
    )
}

/// Generalized Gauss–Laguerre rule for `u^a e^{-u} du` on `(0, inf)`.
pub fn gauss_laguerre_rule(n: usize, a: f64) -> Result<QuadRule> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    if !(a.is_finite() && a > -1.0) {
        return domain(format!("Laguerre weight exponent {a} must exceed -1"));
    }
    let diag = (0..n).map(|k| 2.0 * k as f64 + a + 1.0).collect();
    let off = (1..=n)
        .map(|k| {
            let kf = k as f64;
            (kf * (kf + a)).sqrt()
        })
        .collect();
    let rec = Recurrence { diag, off };
    let (nodes, weights) = rec.rule(gamma(a + 1.0));
    let keep: Vec<usize> = (0..n).filter(|&j| weights[j] > 0.0).collect();
    QuadRule::new(
        keep.iter().map(|&j| nodes[j]).collect(),
        keep.iter().map(|&j| weights[j]).collect(),
        DomainTag::LaguerreWeight(a),
        false,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_integrate;
    use crate::special_fn::bessel_i_scaled;
    use std::f64::consts::PI;

    fn density(nu: f64, s: f64) -> f64 {
        (1.0 - s * s).powf(nu - 0.5) / (PI.sqrt() * 2f64.powf(nu) * gamma(nu + 0.5))
    }

    #[test]
    fn atomic_rule_at_minus_half() {
        let r = pi_measure_rule(-0.5, 17).unwrap();
        assert!(r.is_atomic());
        assert_eq!(r.nodes(), &[-1.0, 1.0]);
        assert!((r.total_mass() - 2.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn total_mass_matches_density_integral() {
        for &nu in &[-0.4, 0.0, 0.5, 1.3, 4.0] {
            let r = pi_measure_rule(nu, 20).unwrap();
            let want = 1.0 / (2f64.powf(nu) * gamma(nu + 1.0));
            assert!((r.total_mass() - want).abs() < 1e-12, "nu={nu}");
            // substitution s = sin(theta) removes the endpoint singularity
            let q = adaptive_integrate(|th: f64| density(nu, th.sin()) * th.cos(), -PI / 2.0, PI / 2.0, 1e-11);
            if nu >= 0.0 {
                assert!((q.unwrap() - want).abs() < 1e-9, "nu={nu}");
            }
        }
    }

    #[test]
    fn odd_moment_vanishes_and_weights_positive() {
        for &nu in &[-0.25, 0.25, 2.0] {
            let r = pi_measure_rule(nu, 31).unwrap();
            assert!(r.integrate(|s| s).abs() < 1e-15);
            assert!(r.integrate(|s| s.powi(7)).abs() < 1e-15);
            assert!(r.weights().iter().all(|&w| w > 0.0));
            assert!(r.nodes().iter().all(|s| s.abs() <= 1.0));
        }
    }

    #[test]
    fn exact_for_polynomials() {
        // second moment of Pi_nu is mass / (2 (nu + 1))
        for &nu in &[-0.3, 0.0, 1.7] {
            let r = pi_measure_rule(nu, 4).unwrap();
            let m2 = r.integrate(|s| s * s);
            assert!((m2 - pi_measure_mass(nu) / (2.0 * (nu + 1.0))).abs() < 1e-14);
            // degree 6 = 2n - 2 moment against a 5-node oracle rule
            let hi = pi_measure_rule(nu, 9).unwrap();
            assert!((r.integrate(|s| s.powi(6)) - hi.integrate(|s| s.powi(6))).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_orders_below_minus_half() {
        assert!(pi_measure_rule(-0.6, 10).is_err());
        assert!(pi_measure_rule(0.0, 0).is_err());
    }

    #[test]
    fn schlafli_examples() {
        let r = pi_measure_rule(-0.5, 2).unwrap();
        let v = schlafli_bessel(-0.5, 1.0, &r).unwrap();
        let want = (-1.0f64).exp() * (2.0 / PI).sqrt() * 1.0f64.cosh();
        assert!((v - want).abs() < 1e-15);
        let r = pi_measure_rule(0.25, 40).unwrap();
        let v = schlafli_bessel(0.25, 3.0, &r).unwrap();
        assert!((v - bessel_i_scaled(0.25, 3.0).unwrap()).abs() < 1e-10);
        let r = pi_measure_rule(2.0, 80).unwrap();
        let v = schlafli_bessel(2.0, 50.0, &r).unwrap();
        assert!((v - bessel_i_scaled(2.0, 50.0).unwrap()).abs() < 1e-9);
        assert!(schlafli_bessel(1.0, 50.0, &r).is_err());
    }

    #[test]
    fn gauss_order_of_convergence() {
        for &nu in &[-0.25, 0.25, 1.0, 5.0] {
            let z = 10.0;
            let exact = bessel_i_scaled(nu, z).unwrap();
            let err = |n| {
                let r = pi_measure_rule(nu, n).unwrap();
                (schlafli_bessel(nu, z, &r).unwrap() / exact - 1.0).abs()
            };
            let (e4, e8) = (err(4), err(8));
            assert!(e8 < e4 / 10.0 || e8 < 1e-14, "nu={nu} {e4} {e8}");
        }
    }

    #[test]
    fn legendre_and_laguerre() {
        let g = gauss_legendre_rule(10, 0.0, PI).unwrap();
        assert!((g.integrate(f64::sin) - 2.0).abs() < 1e-12);
        let l = gauss_laguerre_rule(30, 0.5).unwrap();
        // int u^{0.5} e^{-u} u^3 du = Gamma(4.5)
        assert!((l.integrate(|u| u.powi(3)) / gamma(4.5) - 1.0).abs() < 1e-13);
        let big = gauss_laguerre_rule(150, -0.7).unwrap();
        assert!((big.total_mass() / gamma(0.3) - 1.0).abs() < 1e-12);
    }
}
