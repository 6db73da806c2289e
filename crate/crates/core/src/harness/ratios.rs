//! Ratios of kernel norms to the right-hand sides of the standard estimates.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::index::{AlphaIndex, PointRd};
use crate::kernels::{banach_difference, scalar_kernel_difference, KernelQuadrature, KernelSpec};
use crate::measure_geometry::{ball_measure, BallSpec};

/// Relative tolerance of the ball measures used by the default entry points.
pub const BALL_TOL: f64 = 1e-10;

/// `mu_alpha(B(x, |x - y|))`.
pub fn ball_at(alpha: &AlphaIndex, x: &PointRd, y: &PointRd, tol: f64) -> Result<f64> {
    let r = x.dist(y);
    if r == 0.0 {
        return Err(Error::Diagonal);
    }
    ball_measure(alpha, &BallSpec::new(x.clone(), r)?, tol)
}

/// `||K(x, y)|| mu_alpha(B(x, |x - y|))`.
pub fn growth_ratio(spec: &KernelSpec, alpha: &AlphaIndex, x: &PointRd, y: &PointRd) -> Result<f64> {
    growth_ratio_with(spec, alpha, x, y, &KernelQuadrature::default(), BALL_TOL)
}

pub fn growth_ratio_with(
    spec: &KernelSpec,
    alpha: &AlphaIndex,
    x: &PointRd,
    y: &PointRd,
    q: &KernelQuadrature,
    ball_tol: f64,
) -> Result<f64> {
    let mu = ball_at(alpha, x, y, ball_tol)?;
    Ok(banach_difference(spec, alpha, (x, y), None, q)? * mu)
}

fn check_offset(r: f64, h: f64, side: &str) -> Result<()> {
    if !(r > 2.0 * h) {
        return Err(Error::Precondition(format!(
            "|x - y| = {r:e} must exceed 2|{side}| = {:e}",
            2.0 * h
        )));
    }
    Ok(())
}

/// `||K(x, y) - K(x', y)|| / ((|x - x'| / |x - y|) / mu(B(x, |x - y|)))`,
/// for `|x - y| > 2|x - x'|`.
pub fn smoothness_ratio_x(
    spec: &KernelSpec,
    alpha: &AlphaIndex,
    x: &PointRd,
    x2: &PointRd,
    y: &PointRd,
    q: &KernelQuadrature,
    mu: f64,
) -> Result<f64> {
    let (r, h) = (x.dist(y), x.dist(x2));
    check_offset(r, h, "x - x'")?;
    if h == 0.0 {
        return Ok(0.0);
    }
    Ok(banach_difference(spec, alpha, (x, y), Some((x2, y)), q)? * mu * r / h)
}

/// The `y`-side analogue, with `|x - y| > 2|y - y'|`.
pub fn smoothness_ratio_y(
    spec: &KernelSpec,
    alpha: &AlphaIndex,
    x: &PointRd,
    y: &PointRd,
    y2: &PointRd,
    q: &KernelQuadrature,
    mu: f64,
) -> Result<f64> {
    let (r, h) = (x.dist(y), y.dist(y2));
    check_offset(r, h, "y - y'")?;
    if h == 0.0 {
        return Ok(0.0);
    }
    Ok(banach_difference(spec, alpha, (x, y), Some((x, y2)), q)? * mu * r / h)
}

/// `(grad_x K, grad_y K)` of a scalar family by differences of step
/// `|x - y| / 50` with one Richardson step.
pub fn kernel_gradient_fd(
    spec: &KernelSpec,
    alpha: &AlphaIndex,
    x: &PointRd,
    y: &PointRd,
    q: &KernelQuadrature,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    if !spec.is_scalar() {
        return Err(Error::Precondition(format!(
            "gradients are defined for scalar families, not {}",
            spec.name()
        )));
    }
    let r = x.dist(y);
    if r == 0.0 {
        return Err(Error::Diagonal);
    }
    let d = x.dim();
    // K(p + h2 e_j) - K(p + h1 e_j) on the side selected by `on_x`
    let diff = |on_x: bool, j: usize, h1: f64, h2: f64| -> Result<Complex64> {
        let p = if on_x { x } else { y };
        let a = p.with_coord(j, p.coords()[j] + h2)?;
        let b = p.with_coord(j, p.coords()[j] + h1)?;
        if on_x {
            scalar_kernel_difference(spec, alpha, (&a, y), (&b, y), q)
        } else {
            scalar_kernel_difference(spec, alpha, (x, &a), (x, &b), q)
        }
    };
    // central differences, or second-order forward ones next to the boundary
    let step = |on_x: bool, j: usize, h: f64, base: f64| -> Result<Complex64> {
        if base > 2.5 * h {
            Ok(diff(on_x, j, -h, h)? / (2.0 * h))
        } else {
            Ok((4.0 * diff(on_x, j, 0.0, h)? - diff(on_x, j, 0.0, 2.0 * h)?) / (2.0 * h))
        }
    };
    let mut gx = Vec::with_capacity(d);
    let mut gy = Vec::with_capacity(d);
    for j in 0..d {
        for (on_x, out) in [(true, &mut gx), (false, &mut gy)] {
            let base = if on_x { x.coords()[j] } else { y.coords()[j] };
            let h = 0.02 * r;
            let coarse = step(on_x, j, h, base)?;
            let fine = step(on_x, j, 0.5 * h, base)?;
            out.push((4.0 * fine - coarse) / 3.0);
        }
    }
    Ok((gx, gy))
}

/// `|grad_{x,y} K(x, y)| |x - y| mu(B(x, |x - y|))` for scalar families.
pub fn gradient_ratio(spec: &KernelSpec, alpha: &AlphaIndex, x: &PointRd, y: &PointRd) -> Result<f64> {
    let mu = ball_at(alpha, x, y, BALL_TOL)?;
    gradient_ratio_with(spec, alpha, x, y, &KernelQuadrature::default(), mu)
}

pub fn gradient_ratio_with(
    spec: &KernelSpec,
    alpha: &AlphaIndex,
    x: &PointRd,
    y: &PointRd,
    q: &KernelQuadrature,
    mu: f64,
) -> Result<f64> {
    let (gx, gy) = kernel_gradient_fd(spec, alpha, x, y, q)?;
    let norm = gx.iter().chain(&gy).map(|g| g.norm_sqr()).sum::<f64>().sqrt();
    Ok(norm * x.dist(y) * mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::MultiIndex;
    use crate::kernels::{heat_kernel_gradient, NuMeasure, Psi};

    fn p(v: &[f64]) -> PointRd {
        PointRd::new(v.to_vec()).unwrap()
    }

    fn a(v: &[f64]) -> AlphaIndex {
        AlphaIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn heat_growth_is_resolution_independent() {
        let al = a(&[0.0]);
        let spec = KernelSpec::heat_max();
        let (x, y) = (p(&[1.0]), p(&[2.0]));
        let v = growth_ratio(&spec, &al, &x, &y).unwrap();
        let fine = growth_ratio_with(&spec, &al, &x, &y, &KernelQuadrature::default().refined(4.0), 1e-12).unwrap();
        assert!(v.is_finite() && v > 0.0);
        assert!((v / fine - 1.0).abs() < 0.01);
        assert!(matches!(growth_ratio(&spec, &al, &x, &x), Err(Error::Diagonal)));
    }

    #[test]
    fn far_pairs_sit_below_the_near_diagonal() {
        let al = a(&[-0.5]);
        let spec = KernelSpec::riesz(MultiIndex::unit(0, 1)).unwrap();
        let far = growth_ratio(&spec, &al, &p(&[0.1]), &p(&[10.0])).unwrap();
        let near = growth_ratio(&spec, &al, &p(&[1.0]), &p(&[1.01])).unwrap();
        assert!(far < near, "{far} {near}");
    }

    #[test]
    fn smoothness_precondition_and_trivial_offset() {
        let al = a(&[0.0]);
        let spec = KernelSpec::heat_max();
        let (x, y) = (p(&[1.0]), p(&[1.5]));
        let q = KernelQuadrature::default();
        assert_eq!(smoothness_ratio_x(&spec, &al, &x, &x, &y, &q, 1.0).unwrap(), 0.0);
        let bad = p(&[1.3]);
        assert!(matches!(
            smoothness_ratio_x(&spec, &al, &x, &bad, &y, &q, 1.0),
            Err(Error::Precondition(_))
        ));
        assert!(smoothness_ratio_y(&spec, &al, &x, &y, &p(&[1.2]), &q, 1.0).is_err());
    }

    #[test]
    fn smoothness_matches_the_gradient_at_small_offsets() {
        let al = a(&[-0.7]);
        let spec = KernelSpec::riesz(MultiIndex::unit(0, 1)).unwrap();
        let (x, y) = (p(&[1.0]), p(&[1.4]));
        let q = KernelQuadrature::default();
        let mu = ball_at(&al, &x, &y, BALL_TOL).unwrap();
        let (gx, _) = kernel_gradient_fd(&spec, &al, &x, &y, &q).unwrap();
        let x2 = p(&[1.0 + 1e-3 * 0.4]);
        let s = smoothness_ratio_x(&spec, &al, &x, &x2, &y, &q, mu).unwrap();
        let want = gx[0].norm() * 0.4 * mu;
        assert!((s / want - 1.0).abs() < 0.2, "{s} {want}");
    }

    #[test]
    fn stieltjes_atom_gradient_is_the_heat_gradient() {
        let al = a(&[-0.9, 1.5]);
        let spec = KernelSpec::stieltjes(NuMeasure::dirac(0.3)).unwrap();
        let (x, y) = (p(&[0.8, 1.1]), p(&[1.3, 0.9]));
        let (gx, gy) = kernel_gradient_fd(&spec, &al, &x, &y, &KernelQuadrature::default()).unwrap();
        let (hx, hy) = heat_kernel_gradient(&al, 0.3, &x, &y).unwrap();
        for (f, h) in gx.iter().chain(&gy).zip(hx.iter().chain(&hy)) {
            assert!((f.re / h - 1.0).abs() < 1e-6, "{f} {h}");
        }
    }

    #[test]
    fn identity_multiplier_has_zero_gradient() {
        let al = a(&[0.5]);
        let spec = KernelSpec::laplace(Psi::constant(1.0));
        let g = gradient_ratio(&spec, &al, &p(&[1.0]), &p(&[1.8])).unwrap();
        assert!(g < 1e-7, "{g}");
        assert!(gradient_ratio(&KernelSpec::heat_max(), &al, &p(&[1.0]), &p(&[1.8])).is_err());
    }
}
