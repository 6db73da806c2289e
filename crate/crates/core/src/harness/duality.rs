//! Spectral versus kernel-side application of the Riesz transforms, and the
//! operator norms of their truncations.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::{AlphaIndex, MultiIndex, PointRd};
use crate::kernels::riesz_kernel;
use crate::operators::{interval_projection_rules, project, riesz_apply, riesz_operator_norm};
use crate::quadrature::QuadRule;

/// `exp(-|x - c|^2 / width)`, cut off where it drops below `1e-17`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub width: f64,
}

impl Bump {
    pub fn new(center: Vec<f64>, width: f64) -> Result<Self> {
        let b = Self { center, width };
        if !(width > 0.0) || b.support().iter().any(|&(lo, _)| lo < 0.0) {
            return Err(Error::Precondition(format!("bump {b:?} leaves R_+^d")));
        }
        Ok(b)
    }

    pub fn radius(&self) -> f64 {
        (self.width * 17.0 * std::f64::consts::LN_10).sqrt()
    }

    pub fn support(&self) -> Vec<(f64, f64)> {
        let r = self.radius();
        self.center.iter().map(|c| (c - r, c + r)).collect()
    }

    pub fn eval(&self, x: &PointRd) -> f64 {
        let d2: f64 = x.coords().iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        if d2 > self.radius().powi(2) {
            0.0
        } else {
            (-d2 / self.width).exp()
        }
    }

    /// `d mu_alpha`-weighted tensor nodes on the support.
    fn mu_nodes(&self, alpha: &AlphaIndex, panels: usize) -> Result<Vec<(PointRd, f64)>> {
        let rules = interval_projection_rules(&self.support(), panels, 8)?;
        let per: Vec<Vec<(f64, f64)>> = rules
            .iter()
            .zip(alpha.components())
            .map(|(r, &a): (&QuadRule, &f64)| r.iter().map(|(x, w)| (x, w * x.powf(2.0 * a + 1.0))).collect())
            .collect();
        let mut out = vec![(Vec::new(), 1.0)];
        for axis in &per {
            out = out
                .into_iter()
                .flat_map(|(p, w)| {
                    axis.iter().map(move |&(x, wx)| {
                        let mut q = p.clone();
                        q.push(x);
                        (q, w * wx)
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|(p, w)| Ok((PointRd::new(p)?, w)))
            .collect()
    }

    /// `int R_n(x, y) f(y) d mu_alpha(y)` for `x` off the support, `None`
    /// on it.
    pub fn riesz_kernel_side(&self, alpha: &AlphaIndex, n: &MultiIndex, x: &PointRd, panels: usize) -> Result<Option<f64>> {
        let d2: f64 = x.coords().iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        if d2.sqrt() <= self.radius() {
            return Ok(None);
        }
        let mut s = 0.0;
        for (y, w) in self.mu_nodes(alpha, panels)? {
            let fy = self.eval(&y);
            if fy != 0.0 {
                s += w * fy * riesz_kernel(alpha, n, x, &y)?;
            }
        }
        Ok(Some(s))
    }

    fn separation(&self, other: &Bump) -> f64 {
        let d: f64 = self.center.iter().zip(&other.center).map(|(a, b)| (a - b) * (a - b)).sum();
        d.sqrt() - self.radius() - other.radius()
    }
}

/// `<R_n f, g>` computed spectrally and from the kernel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityCheck {
    pub alpha: Vec<f64>,
    pub n: Vec<usize>,
    pub f: Bump,
    pub g: Bump,
    pub k_max: usize,
    pub spectral: f64,
    pub kernel: f64,
    pub rel_err: f64,
    /// Coefficient mass on the last shell of the projection of `f`.
    pub tail: f64,
    pub passed: bool,
}

/// Quadrature and truncation settings for [`riesz_duality`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualitySettings {
    pub k_max: usize,
    /// Gauss–Legendre panels (8 points each) per support interval.
    pub panels: usize,
    /// Panels per interval for the projection of `f`.
    pub projection_panels: usize,
    pub tol: f64,
}

impl Default for DualitySettings {
    fn default() -> Self {
        Self {
            k_max: 300,
            panels: 8,
            projection_panels: 40,
            tol: 1e-3,
        }
    }
}

/// Compares `<R_n f, g>` from the projection of `f` (synthesized on the
/// nodes of `g`) with the double integral of the Riesz kernel against `f`
/// and `g`.
pub fn riesz_duality(alpha: &AlphaIndex, n: &MultiIndex, f: &Bump, g: &Bump, s: &DualitySettings) -> Result<DualityCheck> {
    alpha.check_dim(f.center.len())?;
    alpha.check_dim(g.center.len())?;
    if f.separation(g) <= 0.0 {
        return Err(Error::Precondition("bump supports overlap".into()));
    }
    let rules = interval_projection_rules(&f.support(), s.projection_panels, 8)?;
    let v = project(|x| f.eval(x), alpha, s.k_max, &rules)?.vector;
    let f_nodes = f.mu_nodes(alpha, s.panels)?;
    let (mut spectral, mut kernel) = (Complex64::new(0.0, 0.0), 0.0);
    for (x, w) in g.mu_nodes(alpha, s.panels)? {
        let gx = w * g.eval(&x);
        if gx == 0.0 {
            continue;
        }
        spectral += gx * riesz_apply(&v, n, &x)?;
        for (y, wy) in &f_nodes {
            kernel += gx * wy * f.eval(y) * riesz_kernel(alpha, n, &x, y)?;
        }
    }
    let rel_err = (spectral.re - kernel).abs() / kernel.abs().max(f64::MIN_POSITIVE);
    Ok(DualityCheck {
        alpha: alpha.components().to_vec(),
        n: n.components().to_vec(),
        f: f.clone(),
        g: g.clone(),
        k_max: s.k_max,
        spectral: spectral.re,
        kernel,
        rel_err,
        tail: v.tail_indicator(),
        passed: rel_err <= s.tol,
    })
}

/// Truncated Riesz operator norms over increasing `K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormSequence {
    pub alpha: Vec<f64>,
    pub n: Vec<usize>,
    pub k_max: Vec<usize>,
    pub norms: Vec<f64>,
    /// `|N_{j+1} - N_j| / N_j`.
    pub successive: Vec<f64>,
    pub passed: bool,
}

pub const NORM_K: [usize; 3] = [8, 16, 32];

pub fn riesz_norm_sequence(alpha: &AlphaIndex, n: &MultiIndex, ks: &[usize], tol: f64) -> Result<NormSequence> {
    let norms = ks.iter().map(|&k| riesz_operator_norm(alpha, n, k)).collect::<Result<Vec<_>>>()?;
    let successive: Vec<f64> = norms.windows(2).map(|w| (w[1] - w[0]).abs() / w[0]).collect();
    let passed = norms.iter().all(|v| v.is_finite()) && successive.iter().all(|d| *d < tol);
    Ok(NormSequence {
        alpha: alpha.components().to_vec(),
        n: n.components().to_vec(),
        k_max: ks.to_vec(),
        norms,
        successive,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub checks: Vec<DualityCheck>,
    pub norms: Vec<NormSequence>,
    pub passed: bool,
}

/// The two bumps of the duality suite, `f` at 2 and `g` at 6.2 on the
/// first axis.
pub fn duality_bumps(d: usize) -> Result<(Bump, Bump)> {
    let f = Bump::new(vec![2.0; d], 0.1)?;
    let g = Bump::new((0..d).map(|i| if i == 0 { 6.2 } else { 2.0 }).collect(), 0.1)?;
    Ok((f, g))
}

/// Riesz duality on separated bumps for every one-dimensional `alpha` in
/// `pairing_alphas` and the norm sequences over [`NORM_K`] for every
/// `alpha` in `norm_alphas`.
pub fn duality_suite(
    pairing_alphas: &[AlphaIndex],
    norm_alphas: &[AlphaIndex],
    s: &DualitySettings,
    norm_tol: f64,
) -> Result<DualityReport> {
    let mut checks = Vec::new();
    for alpha in pairing_alphas {
        let (f, g) = duality_bumps(alpha.dim())?;
        for i in 0..alpha.dim() {
            checks.push(riesz_duality(alpha, &MultiIndex::unit(i, alpha.dim()), &f, &g, s)?);
        }
    }
    let mut norms = Vec::new();
    for alpha in norm_alphas {
        for i in 0..alpha.dim() {
            norms.push(riesz_norm_sequence(alpha, &MultiIndex::unit(i, alpha.dim()), &NORM_K, norm_tol)?);
        }
    }
    let passed = checks.iter().all(|c| c.passed) && norms.iter().all(|n| n.passed);
    Ok(DualityReport { checks, norms, passed })
}
