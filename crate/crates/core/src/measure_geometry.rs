//! The measure `mu_alpha(dx) = prod x_i^{2 alpha_i + 1} dx` on `R_+^d` and the
//! measures of its balls `B(x, r) = {y in R_+^d : |x - y| < r}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::index::{AlphaIndex, PointRd};
use crate::quadrature::{adaptive_integrate_with, AdaptiveOptions};

/// Ball `B(center, radius)` intersected with `R_+^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallSpec {
    center: PointRd,
    radius: f64,
}

impl BallSpec {
    pub fn new(center: PointRd, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return domain(format!("ball radius {radius} must be positive"));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &PointRd {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// `prod x_i^{2 alpha_i + 1}`.
pub fn mu_density(alpha: &AlphaIndex, x: &PointRd) -> Result<f64> {
    alpha.check_dim(x.dim())?;
    Ok(alpha
        .components()
        .iter()
        .zip(x.coords())
        .map(|(a, xi)| xi.powf(2.0 * a + 1.0))
        .product())
}

/// Lemma-type comparison quantity `r^d prod (x_i + r)^{2 alpha_i + 1}`.
pub fn ball_measure_comparable(alpha: &AlphaIndex, ball: &BallSpec) -> Result<f64> {
    alpha.check_dim(ball.center.dim())?;
    let r = ball.radius;
    Ok(r.powi(alpha.dim() as i32)
        * alpha
            .components()
            .iter()
            .zip(ball.center.coords())
            .map(|(a, xi)| (xi + r).powf(2.0 * a + 1.0))
            .product::<f64>())
}

/// `mu_alpha(B(x, r))` to relative tolerance `tol` by iterated adaptive
/// quadrature; the innermost coordinate is integrated in closed form.
pub fn ball_measure(alpha: &AlphaIndex, ball: &BallSpec, tol: f64) -> Result<f64> {
    alpha.check_dim(ball.center.dim())?;
    let d = alpha.dim();
    if d > 3 {
        return Err(Error::Precondition(format!(
            "quadrature mode supports d <= 3, got {d}; use the Monte Carlo mode"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let powers: Vec<f64> = alpha.components().iter().map(|a| 2.0 * a + 2.0).collect();
    section(ball.center.coords(), &powers, ball.radius * ball.radius, tol)
}

// measure of {u in R_+^k : |u - c|^2 < r2} for the trailing coordinates
fn section(c: &[f64], powers: &[f64], r2: f64, tol: f64) -> Result<f64> {
    if r2 <= 0.0 {
        return Ok(0.0);
    }
    let h = r2.sqrt();
    let lo = (c[0] - h).max(0.0);
    let hi = c[0] + h;
    let p = powers[0];
    if c.len() == 1 {
        return Ok((hi.powf(p) - lo.powf(p)) / p);
    }
    // kinks where the next section starts touching its coordinate face
    let mut cuts = vec![lo, hi];
    if r2 > c[1] * c[1] {
        let s = (r2 - c[1] * c[1]).sqrt();
        cuts.extend([c[0] - s, c[0] + s].into_iter().filter(|u| *u > lo && *u < hi));
    }
    cuts.sort_by(f64::total_cmp);
    // the bounding box holds the section and has comparable measure
    let box_measure = (hi.powf(p) - lo.powf(p)) / p
        * c[1..]
            .iter()
            .zip(&powers[1..])
            .map(|(ck, pk)| ((ck + h).powf(*pk) - (ck - h).max(0.0).powf(*pk)) / pk)
            .product::<f64>();
    let inner_tol = tol * 0.1;
    let mut total = 0.0;
    let mut err = 0.0;
    for w in cuts.windows(2) {
        let inner = |u: f64| {
            let rest = r2 - (u - c[0]) * (u - c[0]);
            // an inner failure surfaces as a non-finite outer estimate
            section(&c[1..], &powers[1..], rest, inner_tol)
        };
        let opts = AdaptiveOptions {
            abs_tol: 1e-3 * tol * box_measure,
            rel_tol: tol * 0.25,
            max_panels: 2000,
        };
        let piece = if w[0] == 0.0 && p < 1.0 {
            // v = u^p absorbs the singular density at the face
            adaptive_integrate_with(
                |v: f64| inner(v.powf(1.0 / p)).map_or(f64::NAN, |s| s / p),
                0.0,
                w[1].powf(p),
                opts,
            )
        } else {
            adaptive_integrate_with(|u: f64| inner(u).map_or(f64::NAN, |s| u.powf(p - 1.0) * s), w[0], w[1], opts)
        };
        match piece {
            Ok(r) => {
                total += r.value;
                err += r.error;
            }
            Err(Error::NoConvergence { estimate, achieved, .. }) => {
                return Err(Error::NoConvergence {
                    estimate: total + estimate,
                    achieved: err + achieved,
                    requested: tol,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(total)
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// `mu_alpha(B(x, r))` by uniform sampling of the bounding box.
pub fn ball_measure_monte_carlo(
    alpha: &AlphaIndex,
    ball: &BallSpec,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    alpha.check_dim(ball.center.dim())?;
    if samples < 2 {
        return Err(Error::Precondition("need at least two samples".into()));
    }
    let r = ball.radius;
    let c = ball.center.coords();
    let lo: Vec<f64> = c.iter().map(|x| (x - r).max(0.0)).collect();
    let width: Vec<f64> = c.iter().zip(&lo).map(|(x, l)| x + r - l).collect();
    let volume: f64 = width.iter().product();
    let exps: Vec<f64> = alpha.components().iter().map(|a| 2.0 * a + 1.0).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut u = vec![0.0; c.len()];
    for _ in 0..samples {
        let mut dist2 = 0.0;
        for i in 0..c.len() {
            u[i] = lo[i] + width[i] * rng.random::<f64>();
            dist2 += (u[i] - c[i]) * (u[i] - c[i]);
        }
        let v = if dist2 < r * r {
            u.iter().zip(&exps).map(|(x, e)| x.powf(*e)).product::<f64>() * volume
        } else {
            0.0
        };
        s1 += v;
        s2 += v * v;
    }
    let n = samples as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok(MonteCarloEstimate {
        value: mean,
        std_error: (var / n).sqrt(),
        samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> PointRd {
        PointRd::new(v.to_vec()).unwrap()
    }

    fn a(v: &[f64]) -> AlphaIndex {
        AlphaIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn density_examples() {
        assert_eq!(mu_density(&a(&[-0.5]), &p(&[3.7])).unwrap(), 1.0);
        assert_eq!(mu_density(&a(&[0.0]), &p(&[2.0])).unwrap(), 2.0);
        assert!((mu_density(&a(&[0.5, -0.75]), &p(&[2.0, 4.0])).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn one_dimensional_balls() {
        let b = BallSpec::new(p(&[1.0]), 0.5).unwrap();
        assert!((ball_measure(&a(&[0.0]), &b, 1e-10).unwrap() - 1.0).abs() < 1e-14);
        assert!((ball_measure(&a(&[-0.5]), &b, 1e-10).unwrap() - 1.0).abs() < 1e-14);
        assert!(BallSpec::new(p(&[1.0]), 0.0).is_err());
    }

    #[test]
    fn comparable_examples() {
        let b = BallSpec::new(p(&[1.0]), 0.5).unwrap();
        assert!((ball_measure_comparable(&a(&[0.0]), &b).unwrap() - 0.75).abs() < 1e-15);
        let b = BallSpec::new(p(&[7.0]), 0.3).unwrap();
        assert!((ball_measure_comparable(&a(&[-0.5]), &b).unwrap() - 0.3).abs() < 1e-15);
        let b = BallSpec::new(p(&[1.0, 1.0]), 2.0).unwrap();
        let want = 4.0 * 27.0 * 3f64.powf(-0.8);
        assert!((ball_measure_comparable(&a(&[1.0, -0.9]), &b).unwrap() / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn planar_disc_without_weight() {
        // alpha = -1/2 in both coordinates is Lebesgue measure
        let b = BallSpec::new(p(&[2.0, 2.0]), 0.5).unwrap();
        let v = ball_measure(&a(&[-0.5, -0.5]), &b, 1e-9).unwrap();
        assert!((v - std::f64::consts::PI * 0.25).abs() < 1e-8);
        // quarter disc when centred near the corner
        let b = BallSpec::new(p(&[1e-12, 1e-12]), 1.0).unwrap();
        let v = ball_measure(&a(&[-0.5, -0.5]), &b, 1e-9).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_4).abs() < 1e-7, "{v}");
    }

    #[test]
    fn quadrature_agrees_with_monte_carlo() {
        let alpha = a(&[0.0, 0.0]);
        let b = BallSpec::new(p(&[2.0, 2.0]), 0.5).unwrap();
        let q = ball_measure(&alpha, &b, 1e-8).unwrap();
        let mc = ball_measure_monte_carlo(&alpha, &b, 200_000, 7).unwrap();
        assert!((q - mc.value).abs() < 3.0 * mc.std_error, "{q} vs {mc:?}");
        // int u1 u2 over a disc inside the quadrant is pi r^2 x1 x2
        assert!((q - std::f64::consts::PI * 0.25 * 4.0).abs() < 1e-8);
    }

    #[test]
    fn three_dimensional_ball() {
        let alpha = a(&[-0.5, -0.5, -0.5]);
        let b = BallSpec::new(p(&[3.0, 3.0, 3.0]), 1.0).unwrap();
        let v = ball_measure(&alpha, &b, 1e-8).unwrap();
        assert!((v - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-7, "{v}");
    }

    #[test]
    fn singular_face_and_monotonicity() {
        let alpha = a(&[-0.9, 2.0]);
        let mut prev = 0.0;
        for &r in &[0.01, 0.1, 1.0, 10.0] {
            let b = BallSpec::new(p(&[0.05, 0.3]), r).unwrap();
            let v = ball_measure(&alpha, &b, 1e-7).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let alpha = a(&[0.3]);
        let b = BallSpec::new(p(&[1.0]), 0.4).unwrap();
        let x = ball_measure_monte_carlo(&alpha, &b, 1000, 3).unwrap();
        let y = ball_measure_monte_carlo(&alpha, &b, 1000, 3).unwrap();
        assert_eq!(x, y);
    }
}
