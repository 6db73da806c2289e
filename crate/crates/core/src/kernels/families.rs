//! The five Banach-valued kernel families and their norms.
//!
//! | family         | `K(x, y)`                                   | norm                    |
//! |----------------|---------------------------------------------|-------------------------|
//! | heat_max       | `t -> G_t(x, y)`                            | `sup_t`                 |
//! | riesz(n)       | `Gamma(|n|/2)^{-1} int delta^n G_t t^{|n|/2-1} dt` | modulus          |
//! | square_fn(n,m) | `t -> d_t^m delta^n G_t(x, y)`              | `L^2(t^{|n|+2m-1} dt)`  |
//! | laplace(psi)   | `-int psi(t) d_t G_t(x, y) dt`              | modulus                 |
//! | stieltjes(nu)  | `int G_t(x, y) d nu(t)`                     | modulus                 |
//!
//! All `t`-integrals use log-spaced panels from `t_lo = |x - y|^2 / 320`,
//! where `e^{-|x-y|^2/(4t)}` is below `e^{-80}`, to `t_hi = 45 / lambda_0`
//! (at least 20), beyond which `e^{-lambda_0 t}` is negligible.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::derivative::{kernel_derivative, log_gradient_unchecked, MAX_DERIVATIVE_ORDER};
use super::heat::ln_closed_unchecked;
use super::measure::{NuMeasure, Psi};
use crate::error::{Error, Result};
use crate::index::{AlphaIndex, MultiIndex, PointRd};
use crate::quadrature::{adaptive_integrate_with, t_weighted_grid, AdaptiveOptions};

#[derive(Debug, Clone)]
pub enum Family {
    HeatMax,
    Riesz { n: MultiIndex },
    SquareFn { n: MultiIndex, m: usize },
    LaplaceMult(Psi),
    StieltjesMult(NuMeasure),
}

/// The Banach space a family takes values in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "weight", rename_all = "snake_case")]
pub enum BanachTag {
    SupT,
    L2TWeighted(f64),
    Scalar,
}

#[derive(Debug, Clone)]
pub struct KernelSpec {
    family: Family,
    banach_tag: BanachTag,
}

impl KernelSpec {
    pub fn heat_max() -> Self {
        Self {
            family: Family::HeatMax,
            banach_tag: BanachTag::SupT,
        }
    }

    pub fn riesz(n: MultiIndex) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::Precondition("Riesz kernels need |n| > 0".into()));
        }
        if n.length() > MAX_DERIVATIVE_ORDER {
            return Err(Error::UnsupportedOrder(n.length()));
        }
        Ok(Self {
            family: Family::Riesz { n },
            banach_tag: BanachTag::Scalar,
        })
    }

    pub fn square_fn(n: MultiIndex, m: usize) -> Result<Self> {
        if n.length() + m == 0 {
            return Err(Error::Precondition("square functions need |n| + m > 0".into()));
        }
        let w = n.length() + 2 * m;
        if w > MAX_DERIVATIVE_ORDER {
            return Err(Error::UnsupportedOrder(w));
        }
        Ok(Self {
            family: Family::SquareFn { n, m },
            banach_tag: BanachTag::L2TWeighted(w as f64),
        })
    }

    pub fn laplace(psi: Psi) -> Self {
        Self {
            family: Family::LaplaceMult(psi),
            banach_tag: BanachTag::Scalar,
        }
    }

    pub fn stieltjes(nu: NuMeasure) -> Result<Self> {
        nu.validate()?;
        Ok(Self {
            family: Family::StieltjesMult(nu),
            banach_tag: BanachTag::Scalar,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn banach_tag(&self) -> BanachTag {
        self.banach_tag
    }

    pub fn is_scalar(&self) -> bool {
        self.banach_tag == BanachTag::Scalar
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::HeatMax => "heat_max",
            Family::Riesz { .. } => "riesz",
            Family::SquareFn { .. } => "square_fn",
            Family::LaplaceMult(_) => "laplace_mult",
            Family::StieltjesMult(_) => "stieltjes_mult",
        }
    }

    /// Name with parameters, e.g. `riesz(n=[1])`.
    pub fn label(&self) -> String {
        match &self.family {
            Family::HeatMax => "heat_max".into(),
            Family::Riesz { n } => format!("riesz(n={:?})", n.components()),
            Family::SquareFn { n, m } => format!("square_fn(n={:?},m={m})", n.components()),
            Family::LaplaceMult(p) => format!("laplace_mult({})", p.label()),
            Family::StieltjesMult(nu) => format!("stieltjes_mult({} atoms)", nu.atoms.len()),
        }
    }

    fn check(&self, alpha: &AlphaIndex) -> Result<()> {
        match &self.family {
            Family::Riesz { n } | Family::SquareFn { n, .. } => alpha.check_dim(n.dim()),
            Family::StieltjesMult(nu) => nu.check_admissible(alpha).map(|_| ()),
            _ => Ok(()),
        }
    }
}

/// Resolution of the `t`-quadrature behind the norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelQuadrature {
    /// Log-panels per unit of `ln t`.
    pub panels_per_unit: f64,
    /// Grid points for the `sup_t` norm.
    pub sup_points: usize,
}

impl Default for KernelQuadrature {
    fn default() -> Self {
        Self {
            panels_per_unit: 4.0,
            sup_points: 200,
        }
    }
}

impl KernelQuadrature {
    pub fn refined(&self, factor: f64) -> Self {
        Self {
            panels_per_unit: self.panels_per_unit * factor,
            sup_points: (self.sup_points as f64 * factor).ceil() as usize,
        }
    }
}

pub(crate) fn t_range(alpha: &AlphaIndex, sep2: f64) -> (f64, f64) {
    let hi = (45.0 / alpha.ground_eigenvalue()).clamp(20.0, 1e6);
    let lo = (sep2 / 320.0).min(hi * 1e-3);
    (lo, hi)
}

fn panel_count(q: &KernelQuadrature, lo: f64, hi: f64) -> usize {
    ((q.panels_per_unit * (hi / lo).ln()).ceil() as usize).max(8)
}

/// A pair of points `(x, y)`.
type Pair<'a> = (&'a PointRd, &'a PointRd);

fn separation(alpha: &AlphaIndex, pairs: &[Pair]) -> Result<f64> {
    let mut sep2 = f64::INFINITY;
    for (x, y) in pairs {
        alpha.check_dim(x.dim())?;
        alpha.check_dim(y.dim())?;
        let s = x.dist(y);
        if s == 0.0 {
            return Err(Error::Diagonal);
        }
        sep2 = sep2.min(s * s);
    }
    Ok(sep2)
}

fn g(alpha: &AlphaIndex, t: f64, (x, y): Pair) -> f64 {
    ln_closed_unchecked(alpha.components(), t, x.coords(), y.coords()).exp()
}

fn dt_g(alpha: &AlphaIndex, t: f64, (x, y): Pair) -> f64 {
    let l = log_gradient_unchecked(alpha.components(), t, x.coords(), y.coords());
    l.value * l.d_t
}

// first-order Laguerre derivatives are analytic; higher ones go through
// kernel_derivative
fn derivative(alpha: &AlphaIndex, t: f64, (x, y): Pair, n: &MultiIndex, m: usize) -> Result<f64> {
    if m == 0 && n.length() == 1 {
        let j = n.components().iter().position(|v| *v == 1).expect("unit index");
        let l = log_gradient_unchecked(alpha.components(), t, x.coords(), y.coords());
        return Ok(l.value * (l.d_x[j] + x.coords()[j]));
    }
    if n.is_zero() && m == 1 {
        return Ok(dt_g(alpha, t, (x, y)));
    }
    kernel_derivative(alpha, t, x, y, n, m)
}

// K(a) - K(b) for a scalar family; b = None means K(a)
fn scalar_difference(
    spec: &KernelSpec,
    alpha: &AlphaIndex,
    a: Pair,
    b: Option<Pair>,
    q: &KernelQuadrature,
) -> Result<Complex64> {
    let mut pairs = vec![a];
    pairs.extend(b);
    let sep2 = separation(alpha, &pairs)?;
    let (lo, hi) = t_range(alpha, sep2);
    let panels = panel_count(q, lo, hi);
    let diff = |f: &dyn Fn(Pair) -> Result<f64>| -> Result<f64> {
        Ok(f(a)? - b.map_or(Ok(0.0), f)?)
    };
    match &spec.family {
        Family::Riesz { n } => {
            let w = 0.5 * n.length() as f64;
            let rule = t_weighted_grid(w, lo, hi, panels)?;
            let mut s = 0.0;
            for (t, wt) in rule.iter() {
                s += wt * diff(&|p| derivative(alpha, t, p, n, 0))?;
            }
            Ok(Complex64::new(s / gamma(w), 0.0))
        }
        Family::LaplaceMult(psi) => {
            let rule = t_weighted_grid(1.0, lo, hi, panels)?;
            let mut s = Complex64::new(0.0, 0.0);
            for (t, wt) in rule.iter() {
                s -= psi.eval(t) * (wt * diff(&|p| Ok(dt_g(alpha, t, p)))?);
            }
            Ok(s)
        }
        Family::StieltjesMult(nu) => match b {
            None => nu.integrate(|t| g(alpha, t, a)),
            Some(p) => nu.integrate_difference(|t| g(alpha, t, a), |t| g(alpha, t, p)),
        },
        _ => Err(Error::Precondition(format!("{} is not scalar-valued", spec.name()))),
    }
}

pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// `sup_t |h(t)|` on a log grid over `[min(1e-4, |x-y|^2/100), 20]`, refined by
/// golden-section search around the grid maximum.
fn sup_norm(h: impl Fn(f64) -> f64, sep2: f64, points: usize) -> f64 {
    let lo = (sep2 / 100.0).min(1e-4);
    let hi = 20.0f64;
    let n = points.max(3);
    let grid: Vec<f64> = (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect();
    let vals: Vec<f64> = grid.iter().map(|t| h(*t).abs()).collect();
    let (k, &best) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    let a = grid[k.saturating_sub(1)].ln();
    let b = grid[(k + 1).min(n - 1)].ln();
    best.max(golden_max(|v| h(v.exp()).abs(), a, b))
}

/// `|| K(a) - K(b) ||` in the family's Banach space; `b = None` gives `|| K(a) ||`.
pub fn banach_difference(
    spec: &KernelSpec,
    alpha: &AlphaIndex,
    a: Pair,
    b: Option<Pair>,
    q: &KernelQuadrature,
) -> Result<f64> {
    spec.check(alpha)?;
    match &spec.family {
        Family::HeatMax => {
            let mut pairs = vec![a];
            pairs.extend(b);
            let sep2 = separation(alpha, &pairs)?;
            Ok(sup_norm(
                |t| g(alpha, t, a) - b.map_or(0.0, |p| g(alpha, t, p)),
                sep2,
                q.sup_points,
            ))
        }
        Family::SquareFn { n, m } => {
            let mut pairs = vec![a];
            pairs.extend(b);
            let sep2 = separation(alpha, &pairs)?;
            let (lo, hi) = t_range(alpha, sep2);
            let w = (n.length() + 2 * m) as f64;
            let rule = t_weighted_grid(w, lo, hi, panel_count(q, lo, hi))?;
            let mut s = 0.0;
            for (t, wt) in rule.iter() {
                let v = derivative(alpha, t, a, n, *m)?
                    - b.map_or(Ok(0.0), |p| derivative(alpha, t, p, n, *m))?;
                s += wt * v * v;
            }
            Ok(s.sqrt())
        }
        _ => scalar_difference(spec, alpha, a, b, q).map(|z| z.norm()),
    }
}

/// `|| K(x, y) ||` at the default resolution.
pub fn banach_norm(spec: &KernelSpec, alpha: &AlphaIndex, x: &PointRd, y: &PointRd) -> Result<f64> {
    banach_difference(spec, alpha, (x, y), None, &KernelQuadrature::default())
}

pub fn banach_norm_with(
    spec: &KernelSpec,
    alpha: &AlphaIndex,
    x: &PointRd,
    y: &PointRd,
    q: &KernelQuadrature,
) -> Result<f64> {
    banach_difference(spec, alpha, (x, y), None, q)
}

/// `K(x, y)` for the scalar families.
pub fn scalar_kernel(spec: &KernelSpec, alpha: &AlphaIndex, x: &PointRd, y: &PointRd) -> Result<Complex64> {
    scalar_kernel_with(spec, alpha, x, y, &KernelQuadrature::default())
}

pub fn scalar_kernel_with(
    spec: &KernelSpec,
    alpha: &AlphaIndex,
    x: &PointRd,
    y: &PointRd,
    q: &KernelQuadrature,
) -> Result<Complex64> {
    spec.check(alpha)?;
    scalar_difference(spec, alpha, (x, y), None, q)
}

/// `K(a) - K(b)` for a scalar family, both on the grid fixed by the smaller
/// separation, so that the difference carries no grid noise.
pub fn scalar_kernel_difference(
    spec: &KernelSpec,
    alpha: &AlphaIndex,
    a: Pair,
    b: Pair,
    q: &KernelQuadrature,
) -> Result<Complex64> {
    spec.check(alpha)?;
    scalar_difference(spec, alpha, a, Some(b), q)
}

/// Riesz–Laguerre kernel of order `n`.
pub fn riesz_kernel(alpha: &AlphaIndex, n: &MultiIndex, x: &PointRd, y: &PointRd) -> Result<f64> {
    scalar_kernel(&KernelSpec::riesz(n.clone())?, alpha, x, y).map(|z| z.re)
}

/// The Riesz kernel by adaptive quadrature in `u = t^{|n|/2}`, in which the
/// weight `t^{|n|/2 - 1} dt` becomes `(2/|n|) du`.
pub fn riesz_kernel_adaptive(
    alpha: &AlphaIndex,
    n: &MultiIndex,
    x: &PointRd,
    y: &PointRd,
    rel_tol: f64,
) -> Result<f64> {
    let spec = KernelSpec::riesz(n.clone())?;
    spec.check(alpha)?;
    let sep2 = separation(alpha, &[(x, y)])?;
    let (lo, hi) = t_range(alpha, sep2);
    let w = 0.5 * n.length() as f64;
    // breakpoints spread the peak near t ~ |x - y|^2 over several panels
    let mut cuts = vec![0.0];
    let mut t = lo;
    while t < hi {
        cuts.push(t.powf(w));
        t *= 4.0;
    }
    cuts.push(hi.powf(w));
    let f = |u: f64| {
        let t = u.powf(1.0 / w);
        if t <= 0.0 {
            return 0.0;
        }
        derivative(alpha, t, (x, y), n, 0).unwrap_or(f64::NAN)
    };
    let pass = |opts: AdaptiveOptions| -> Result<(f64, f64)> {
        let (mut total, mut err) = (0.0, 0.0);
        for c in cuts.windows(2) {
            let r = match adaptive_integrate_with(f, c[0], c[1], opts) {
                Ok(r) => (r.value, r.error),
                Err(Error::NoConvergence { estimate, achieved, .. }) => (estimate, achieved),
                Err(e) => return Err(e),
            };
            total += r.0;
            err += r.1;
        }
        Ok((total, err))
    };
    // a coarse pass fixes the absolute scale for the segment tolerances
    let (scale, _) = pass(AdaptiveOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-4,
        max_panels: 200,
    })?;
    let (total, err) = pass(AdaptiveOptions {
        abs_tol: rel_tol * scale.abs() / cuts.len() as f64,
        rel_tol: 0.0,
        max_panels: 4000,
    })?;
    if err > rel_tol * total.abs() {
        return Err(Error::NoConvergence {
            estimate: total / (w * gamma(w)),
            achieved: err,
            requested: rel_tol * total.abs(),
        });
    }
    Ok(total / (w * gamma(w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::heat_kernel_closed;

    fn p(v: &[f64]) -> PointRd {
        PointRd::new(v.to_vec()).unwrap()
    }

    fn a(v: &[f64]) -> AlphaIndex {
        AlphaIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn tags_follow_families() {
        assert_eq!(KernelSpec::heat_max().banach_tag(), BanachTag::SupT);
        let s = KernelSpec::square_fn(MultiIndex::new(vec![1, 0]), 1).unwrap();
        assert_eq!(s.banach_tag(), BanachTag::L2TWeighted(3.0));
        assert!(KernelSpec::riesz(MultiIndex::zero(1)).is_err());
        assert!(KernelSpec::square_fn(MultiIndex::zero(1), 0).is_err());
        assert!(KernelSpec::laplace(Psi::constant(1.0)).is_scalar());
    }

    #[test]
    fn heat_max_is_grid_stable() {
        let al = a(&[0.0]);
        let (x, y) = (p(&[1.0]), p(&[2.0]));
        let spec = KernelSpec::heat_max();
        let v = banach_norm(&spec, &al, &x, &y).unwrap();
        let fine = banach_norm_with(&spec, &al, &x, &y, &KernelQuadrature::default().refined(10.0)).unwrap();
        assert!((v / fine - 1.0).abs() < 1e-3, "{v} {fine}");
        // the grid maximum itself is a lower bound
        let g = heat_kernel_closed(&al, 0.25, &x, &y).unwrap();
        assert!(v >= g);
        assert!(matches!(banach_norm(&spec, &al, &x, &x), Err(Error::Diagonal)));
    }

    #[test]
    fn laplace_with_constant_psi_vanishes() {
        let al = a(&[0.5]);
        let spec = KernelSpec::laplace(Psi::constant(1.0));
        let k = scalar_kernel(&spec, &al, &p(&[1.0]), &p(&[1.7])).unwrap();
        assert!(k.norm() < 1e-8, "{k}");
    }

    #[test]
    fn stieltjes_dirac_is_heat_kernel() {
        let al = a(&[0.5, -0.9]);
        let (x, y) = (p(&[1.0, 0.3]), p(&[1.7, 0.5]));
        let spec = KernelSpec::stieltjes(NuMeasure::dirac(0.7)).unwrap();
        let k = scalar_kernel(&spec, &al, &x, &y).unwrap();
        assert_eq!(k.re, heat_kernel_closed(&al, 0.7, &x, &y).unwrap());
    }

    #[test]
    fn riesz_two_quadratures_agree() {
        let al = a(&[0.0]);
        let n = MultiIndex::unit(0, 1);
        for (x, y) in [(1.0, 1.5), (0.4, 2.5), (1.0, 1.001)] {
            let (x, y) = (p(&[x]), p(&[y]));
            let grid = riesz_kernel(&al, &n, &x, &y).unwrap();
            let ad = riesz_kernel_adaptive(&al, &n, &x, &y, 1e-10).unwrap();
            assert!((grid / ad - 1.0).abs() < 1e-7, "{grid} {ad}");
        }
    }

    #[test]
    fn square_function_refines() {
        let al = a(&[-0.5]);
        let spec = KernelSpec::square_fn(MultiIndex::unit(0, 1), 0).unwrap();
        let (x, y) = (p(&[0.8]), p(&[1.3]));
        let v = banach_norm(&spec, &al, &x, &y).unwrap();
        let fine = banach_norm_with(&spec, &al, &x, &y, &KernelQuadrature::default().refined(4.0)).unwrap();
        assert!((v / fine - 1.0).abs() < 1e-8);
    }
}
