//! Generalized Laguerre polynomials and the Laguerre functions of convolution
//! type
//!
//! ```text
//! l_k^a(x) = c_k^a L_k^a(x^2) e^{-x^2/2},   c_k^a = (2 k! / Gamma(k+a+1))^{1/2}
//! ```
//!
//! which form an orthonormal basis of `L^2((0, inf), x^{2a+1} dx)`; the
//! multi-dimensional `l_k^alpha` are tensor products.

use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Result};
use crate::index::{AlphaIndex, MultiIndex, PointRd};

fn check_param(a: f64) -> Result<()> {
    if !(a.is_finite() && a > -1.0) {
        return domain(format!("Laguerre parameter {a} must exceed -1"));
    }
    Ok(())
}

/// `L_k^a(u)` by the three-term recurrence.
pub fn laguerre_poly(k: usize, a: f64, u: f64) -> Result<f64> {
    check_param(a)?;
    Ok(laguerre_poly_unchecked(k, a, u))
}

pub(crate) fn laguerre_poly_unchecked(k: usize, a: f64, u: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - u;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - u) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `c_k^a = (2 k! / Gamma(k+a+1))^{1/2}`.
pub fn laguerre_norm(k: usize, a: f64) -> f64 {
    (0.5 * (std::f64::consts::LN_2 + ln_gamma(k as f64 + 1.0) - ln_gamma(k as f64 + a + 1.0)))
        .exp()
}

/// One-dimensional `l_k^a(x)`.
pub fn laguerre_fn_1d(k: usize, a: f64, x: f64) -> Result<f64> {
    check_param(a)?;
    let u = x * x;
    Ok(laguerre_norm(k, a) * laguerre_poly_unchecked(k, a, u) * (-0.5 * u).exp())
}

/// `[l_0^a(x), ..., l_K^a(x)]` via the orthonormal form of the recurrence,
///
/// ```text
/// sqrt((j+1)(j+a+1)) l_{j+1} = (2j+1+a-x^2) l_j - sqrt(j(j+a)) l_{j-1}.
/// ```
pub fn laguerre_fn_1d_all(k_max: usize, a: f64, x: f64) -> Result<Vec<f64>> {
    check_param(a)?;
    let u = x * x;
    let mut out = Vec::with_capacity(k_max + 1);
    let l0 = (0.5 * (std::f64::consts::LN_2 - ln_gamma(a + 1.0)) - 0.5 * u).exp();
    out.push(l0);
    if k_max == 0 {
        return Ok(out);
    }
    out.push((1.0 + a - u) * l0 / (a + 1.0).sqrt());
    for j in 1..k_max {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - u) * out[j] - (jf * (jf + a)).sqrt() * out[j - 1])
            / ((jf + 1.0) * (jf + a + 1.0)).sqrt();
        out.push(next);
    }
    Ok(out)
}

/// `l_k^alpha(x)` as a product over coordinates.
pub fn laguerre_fn(k: &MultiIndex, alpha: &AlphaIndex, x: &PointRd) -> Result<f64> {
    let d = alpha.dim();
    alpha.check_dim(k.dim())?;
    alpha.check_dim(x.dim())?;
    let mut v = 1.0;
    for i in 0..d {
        v *= laguerre_fn_1d(k.components()[i], alpha.components()[i], x.coords()[i])?;
    }
    Ok(v)
}

/// A term `coef * x^power * L_degree^{a + shift}(x^2) e^{-x^2/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct DeltaTerm {
    coef: f64,
    power: i32,
    degree: usize,
    shift: usize,
}

/// Expansion of `delta^n [L_k^a(x^2) e^{-x^2/2}]` into terms using
///
/// ```text
/// delta [x^j L_m^b(x^2) e^{-x^2/2}] = j x^{j-1} L_m^b e^{-x^2/2} - 2 x^{j+1} L_{m-1}^{b+1} e^{-x^2/2}
/// ```
///
/// (`delta = d/dx + x`, and `d/du L_m^b = -L_{m-1}^{b+1}`).
fn delta_expansion(k: usize, n: usize) -> Vec<DeltaTerm> {
    let mut terms = vec![DeltaTerm {
        coef: 1.0,
        power: 0,
        degree: k,
        shift: 0,
    }];
    for _ in 0..n {
        let mut next: Vec<DeltaTerm> = Vec::with_capacity(2 * terms.len());
        let mut push = |t: DeltaTerm| {
            if let Some(e) = next
                .iter_mut()
                .find(|e| e.power == t.power && e.degree == t.degree && e.shift == t.shift)
            {
                e.coef += t.coef;
            } else {
                next.push(t);
            }
        };
        for t in &terms {
            if t.power != 0 {
                push(DeltaTerm {
                    coef: t.coef * t.power as f64,
                    power: t.power - 1,
                    ..*t
                });
            }
            if t.degree > 0 {
                push(DeltaTerm {
                    coef: -2.0 * t.coef,
                    power: t.power + 1,
                    degree: t.degree - 1,
                    shift: t.shift + 1,
                });
            }
        }
        terms = next;
        terms.retain(|t| t.coef != 0.0);
    }
    terms
}

/// One-dimensional `delta^n l_k^a(x)`.
pub fn delta_laguerre_fn_1d(k: usize, a: f64, x: f64, n: usize) -> Result<f64> {
    check_param(a)?;
    let u = x * x;
    let mut s = 0.0;
    for t in delta_expansion(k, n) {
        s += t.coef
            * x.powi(t.power)
            * laguerre_poly_unchecked(t.degree, a + t.shift as f64, u);
    }
    Ok(laguerre_norm(k, a) * s * (-0.5 * u).exp())
}

/// `delta^n l_k^alpha(x)`; the Laguerre derivatives act coordinatewise.
pub fn delta_laguerre_fn(
    k: &MultiIndex,
    alpha: &AlphaIndex,
    x: &PointRd,
    n: &MultiIndex,
) -> Result<f64> {
    let d = alpha.dim();
    alpha.check_dim(k.dim())?;
    alpha.check_dim(x.dim())?;
    alpha.check_dim(n.dim())?;
    let mut v = 1.0;
    for i in 0..d {
        v *= delta_laguerre_fn_1d(
            k.components()[i],
            alpha.components()[i],
            x.coords()[i],
            n.components()[i],
        )?;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    // binomial C(k+a, k-j) for real upper argument
    fn binom(top: f64, bottom: usize) -> f64 {
        gamma(top + 1.0) / (gamma(bottom as f64 + 1.0) * gamma(top - bottom as f64 + 1.0))
    }

    #[test]
    fn seeds() {
        assert_eq!(laguerre_poly(0, 0.3, 5.0).unwrap(), 1.0);
        assert!((laguerre_poly(1, 0.3, 5.0).unwrap() - (1.0 + 0.3 - 5.0)).abs() < 1e-15);
        assert!(laguerre_poly(2, -1.0, 1.0).is_err());
    }

    #[test]
    fn recurrence_matches_explicit_sum() {
        let (k, a, u) = (5usize, 0.7f64, 2.3f64);
        let mut explicit = 0.0;
        let mut fact = 1.0;
        for j in 0..=k {
            if j > 0 {
                fact *= j as f64;
            }
            explicit += (-1.0f64).powi(j as i32) * binom(k as f64 + a, k - j) * u.powi(j as i32) / fact;
        }
        let v = laguerre_poly(k, a, u).unwrap();
        assert!((v - explicit).abs() < 1e-12 * explicit.abs().max(1.0), "{v} vs {explicit}");
    }

    #[test]
    fn ground_state_normalization() {
        let v = laguerre_fn_1d(0, 0.0, 1.0).unwrap();
        assert!((v - 2f64.sqrt() * (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn batched_recurrence_agrees_with_pointwise() {
        for &a in &[-0.9, -0.5, 0.0, 2.5] {
            for &x in &[0.1, 0.9, 2.2, 4.0] {
                let all = laguerre_fn_1d_all(30, a, x).unwrap();
                for (k, v) in all.iter().enumerate() {
                    let p = laguerre_fn_1d(k, a, x).unwrap();
                    assert!((v - p).abs() < 1e-11 * (1.0 + p.abs()), "a={a} x={x} k={k}");
                }
            }
        }
    }

    #[test]
    fn delta_of_ground_state_vanishes() {
        assert_eq!(delta_laguerre_fn_1d(0, 0.4, 1.3, 1).unwrap(), 0.0);
        assert_eq!(delta_laguerre_fn_1d(0, -0.7, 0.2, 3).unwrap(), 0.0);
    }

    #[test]
    fn single_delta_matches_closed_identity() {
        // delta l_k^a = -2 sqrt(k) x l_{k-1}^{a+1}
        for &(k, a, x) in &[(3usize, 0.5, 1.2), (1, -0.8, 0.4), (7, 2.0, 2.5)] {
            let lhs = delta_laguerre_fn_1d(k, a, x, 1).unwrap();
            let rhs = -2.0 * (k as f64).sqrt() * x * laguerre_fn_1d(k - 1, a + 1.0, x).unwrap();
            assert!((lhs - rhs).abs() < 1e-13 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn expansion_terms_stay_small() {
        // two deltas on degree 4 produce at most three distinct terms
        assert!(delta_expansion(4, 2).len() <= 3);
        assert!(delta_expansion(1, 3).iter().all(|t| t.degree <= 1));
    }
}
