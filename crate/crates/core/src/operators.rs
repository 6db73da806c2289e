//! Operators acting on truncated Fourier–Laguerre expansions
//! `f = sum_{|k| <= K} c_k l_k^alpha`.
//!
//! Every operator here is diagonal or nearly so in the basis `l_k`, with
//! eigenvalues `lambda_k = 4|k| + 2|alpha| + 2d`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::{AlphaIndex, MultiIndex, PointRd};
use crate::kernels::{NuMeasure, Psi};
use crate::quadrature::{
    adaptive_integrate_with, gauss_laguerre_rule, gauss_legendre_rule, AdaptiveOptions, DomainTag,
    QuadRule,
};
use crate::special_fn::{delta_laguerre_fn_1d, laguerre_fn_1d_all};

/// Coefficients `c_k` for `|k| <= K`, ordered as [`MultiIndex::enumerate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralVector {
    alpha: AlphaIndex,
    k_max: usize,
    indices: Vec<MultiIndex>,
    coeffs: Vec<Complex64>,
}

impl SpectralVector {
    pub fn new(alpha: AlphaIndex, k_max: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let indices = MultiIndex::enumerate(alpha.dim(), k_max);
        if coeffs.len() != indices.len() {
            return Err(Error::DimensionMismatch {
                expected: indices.len(),
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Precondition("coefficients must be finite".into()));
        }
        Ok(Self {
            alpha,
            k_max,
            indices,
            coeffs,
        })
    }

    pub fn zeros(alpha: AlphaIndex, k_max: usize) -> Self {
        let n = MultiIndex::enumerate(alpha.dim(), k_max).len();
        Self::new(alpha, k_max, vec![Complex64::new(0.0, 0.0); n]).expect("sizes agree")
    }

    /// The coefficient vector of `l_k`.
    pub fn unit(alpha: AlphaIndex, k_max: usize, k: &MultiIndex) -> Result<Self> {
        let mut v = Self::zeros(alpha, k_max);
        let pos = v.position(k).ok_or_else(|| {
            Error::Precondition(format!("index {:?} exceeds K = {k_max}", k.components()))
        })?;
        v.coeffs[pos] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn alpha(&self) -> &AlphaIndex {
        &self.alpha
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn position(&self, k: &MultiIndex) -> Option<usize> {
        self.indices.iter().position(|j| j == k)
    }

    pub fn coeff(&self, k: &MultiIndex) -> Option<Complex64> {
        self.position(k).map(|p| self.coeffs[p])
    }

    /// `(sum |c_k|^2)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(sum_{|k| = K} |c_k|^2)^{1/2}`, the size of the last shell.
    pub fn tail_indicator(&self) -> f64 {
        self.indices
            .iter()
            .zip(&self.coeffs)
            .filter(|(k, _)| k.length() == self.k_max)
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.indices.iter().map(|k| self.alpha.eigenvalue(k.length()))
    }

    fn map_shells(&self, mut m: impl FnMut(f64) -> Result<Complex64>) -> Result<Self> {
        let mut cache = vec![None; self.k_max + 1];
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (k, c) in self.indices.iter().zip(&self.coeffs) {
            let s = k.length();
            if cache[s].is_none() {
                cache[s] = Some(m(self.alpha.eigenvalue(s))?);
            }
            coeffs.push(c * cache[s].expect("filled"));
        }
        Self::new(self.alpha.clone(), self.k_max, coeffs)
    }

    /// `sum_k c_k delta^n l_k(x)`.
    pub fn synthesize(&self, x: &PointRd, n: &MultiIndex) -> Result<Complex64> {
        let basis = basis_values(&self.alpha, self.k_max, x, n)?;
        Ok(self.indices.iter().zip(&self.coeffs).map(|(k, c)| c * basis.at(k)).sum())
    }
}

/// Per-coordinate tables `delta^{n_i} l_j^{alpha_i}(x_i)` for `j <= K`.
struct BasisValues(Vec<Vec<f64>>);

impl BasisValues {
    fn at(&self, k: &MultiIndex) -> f64 {
        k.components().iter().enumerate().map(|(i, &j)| self.0[i][j]).product()
    }
}

fn basis_values(alpha: &AlphaIndex, k_max: usize, x: &PointRd, n: &MultiIndex) -> Result<BasisValues> {
    alpha.check_dim(x.dim())?;
    alpha.check_dim(n.dim())?;
    let mut tables = Vec::with_capacity(alpha.dim());
    for i in 0..alpha.dim() {
        let (a, xi, ni) = (alpha.components()[i], x.coords()[i], n.components()[i]);
        tables.push(if ni == 0 {
            laguerre_fn_1d_all(k_max, a, xi)?
        } else {
            (0..=k_max)
                .map(|j| delta_laguerre_fn_1d(j, a, xi, ni))
                .collect::<Result<Vec<_>>>()?
        });
    }
    Ok(BasisValues(tables))
}

/// Projection with the quadrature's Parseval defect
/// `| int |f|^2 d mu - sum |c_k|^2 |`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    pub vector: SpectralVector,
    pub parseval_defect: f64,
}

/// One rule per coordinate for `d mu_alpha` on `R_+`: nodes `x_j` and
/// weights `w_j` with `int g d mu_alpha ~ sum w_j g(x_j)`.
fn mu_rule(a: f64, rule: &QuadRule) -> Result<(Vec<f64>, Vec<f64>)> {
    match rule.domain_tag() {
        // u = x^2 turns x^{2a+1} dx into u^a du / 2
        DomainTag::LaguerreWeight(b) if (b - a).abs() < 1e-14 => Ok(rule
            .iter()
            .map(|(u, w)| (u.sqrt(), 0.5 * (w.ln() + u).exp()))
            .unzip()),
        DomainTag::Generic(lo, _) if lo >= 0.0 => Ok(rule
            .iter()
            .map(|(x, w)| (x, w * x.powf(2.0 * a + 1.0)))
            .unzip()),
        tag => Err(Error::RuleMismatch {
            expected: format!("laguerre_weight({a}) or generic on [0, inf)"),
            got: tag.to_string(),
        }),
    }
}

/// Gauss–Laguerre rules in `u = x^2`, exact for `l_j l_k` with `j + k < 2n`.
pub fn laguerre_projection_rules(alpha: &AlphaIndex, n: usize) -> Result<Vec<QuadRule>> {
    alpha.components().iter().map(|&a| gauss_laguerre_rule(n, a)).collect()
}

/// Composite Gauss–Legendre rules on `[lo_i, hi_i]`, for functions supported
/// there.
pub fn interval_projection_rules(bounds: &[(f64, f64)], panels: usize, points: usize) -> Result<Vec<QuadRule>> {
    bounds
        .iter()
        .map(|&(lo, hi)| {
            let (mut nodes, mut weights) = (Vec::new(), Vec::new());
            let h = (hi - lo) / panels as f64;
            for p in 0..panels {
                let r = gauss_legendre_rule(points, lo + p as f64 * h, lo + (p + 1) as f64 * h)?;
                nodes.extend_from_slice(r.nodes());
                weights.extend_from_slice(r.weights());
            }
            QuadRule::new(nodes, weights, DomainTag::Generic(lo, hi), false)
        })
        .collect()
}

/// Tensor-product nodes and weights for `d mu_alpha`.
fn tensor_mu(alpha: &AlphaIndex, rules: &[QuadRule]) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    alpha.check_dim(rules.len())?;
    let per: Vec<(Vec<f64>, Vec<f64>)> = alpha
        .components()
        .iter()
        .zip(rules)
        .map(|(&a, r)| mu_rule(a, r))
        .collect::<Result<_>>()?;
    Ok(per.into_iter().unzip())
}

/// Calls `f(point, weight, node_index)` on every tensor node.
fn for_each_node(xs: &[Vec<f64>], ws: &[Vec<f64>], mut f: impl FnMut(&[f64], f64, &[usize])) {
    let d = xs.len();
    let mut idx = vec![0usize; d];
    let mut p = vec![0.0; d];
    loop {
        let mut w = 1.0;
        for i in 0..d {
            p[i] = xs[i][idx[i]];
            w *= ws[i][idx[i]];
        }
        f(&p, w, &idx);
        let mut i = 0;
        loop {
            idx[i] += 1;
            if idx[i] < xs[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
            if i == d {
                return;
            }
        }
    }
}

/// `c_k = int f l_k d mu_alpha` for `|k| <= K`.
pub fn project(
    f: impl Fn(&PointRd) -> f64,
    alpha: &AlphaIndex,
    k_max: usize,
    rules: &[QuadRule],
) -> Result<Projection> {
    let (xs, ws) = tensor_mu(alpha, rules)?;
    let d = alpha.dim();
    // l_j(x) at every node, per coordinate
    let tables: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|i| {
            xs[i].iter()
                .map(|&x| laguerre_fn_1d_all(k_max, alpha.components()[i], x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let indices = MultiIndex::enumerate(d, k_max);
    let mut coeffs = vec![0.0; indices.len()];
    let mut norm2 = 0.0;
    let mut failure = None;
    for_each_node(&xs, &ws, |p, w, idx| {
        if w == 0.0 || failure.is_some() {
            return;
        }
        let v = match PointRd::new(p.to_vec()) {
            Ok(pt) => f(&pt),
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        if v == 0.0 {
            return;
        }
        norm2 += w * v * v;
        for (c, k) in coeffs.iter_mut().zip(&indices) {
            let mut b = w * v;
            for (i, &j) in k.components().iter().enumerate() {
                b *= tables[i][idx[i]][j];
            }
            *c += b;
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NoConvergence {
            estimate: f64::NAN,
            achieved: f64::INFINITY,
            requested: 0.0,
        });
    }
    let captured: f64 = coeffs.iter().map(|c| c * c).sum();
    let vector = SpectralVector::new(
        alpha.clone(),
        k_max,
        coeffs.into_iter().map(|c| Complex64::new(c, 0.0)).collect(),
    )?;
    Ok(Projection {
        vector,
        parseval_defect: (norm2 - captured).abs(),
    })
}

/// `T_t f`: multiplies `c_k` by `e^{-t lambda_k}`; `t = 0` is the identity.
pub fn heat_apply(v: &SpectralVector, t: f64) -> Result<SpectralVector> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("time {t} must be nonnegative")));
    }
    v.map_shells(|lam| Ok(Complex64::new((-t * lam).exp(), 0.0)))
}

fn heat_at(v: &SpectralVector, basis: &BasisValues, t: f64) -> Complex64 {
    v.indices
        .iter()
        .zip(&v.coeffs)
        .zip(v.eigenvalues())
        .map(|((k, c), lam)| c * ((-t * lam).exp() * basis.at(k)))
        .sum()
}

/// `sup_t |T_t f(x)|` over the nodes of `t_grid` and the limit `t -> 0`,
/// refined by golden-section search around the best node.
pub fn maximal_apply(v: &SpectralVector, x: &PointRd, t_grid: &QuadRule) -> Result<f64> {
    let basis = basis_values(&v.alpha, v.k_max, x, &MultiIndex::zero(v.alpha.dim()))?;
    let mut ts: Vec<f64> = std::iter::once(0.0).chain(t_grid.nodes().iter().copied()).collect();
    ts.sort_by(f64::total_cmp);
    let vals: Vec<f64> = ts.iter().map(|t| heat_at(v, &basis, *t).norm()).collect();
    let (k, &best) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let (mut a, mut b) = (ts[k.saturating_sub(1)], ts[(k + 1).min(ts.len() - 1)]);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let f = |t: f64| heat_at(v, &basis, t).norm();
    let mut out = best;
    for _ in 0..60 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        let (fc, fd) = (f(c), f(d));
        out = out.max(fc).max(fd);
        if fc > fd {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(out)
}

/// `R_n f(x) = sum_k lambda_k^{-|n|/2} c_k delta^n l_k(x)`.
pub fn riesz_apply(v: &SpectralVector, n: &MultiIndex, x: &PointRd) -> Result<Complex64> {
    if n.is_zero() {
        return Err(Error::Precondition("Riesz transforms need |n| > 0".into()));
    }
    let basis = basis_values(&v.alpha, v.k_max, x, n)?;
    let w = 0.5 * n.length() as f64;
    Ok(v.indices
        .iter()
        .zip(&v.coeffs)
        .zip(v.eigenvalues())
        .map(|((k, c), lam)| c * (lam.powf(-w) * basis.at(k)))
        .sum())
}

/// `g_{n,m} f(x) = || d_t^m delta^n T_t f(x) ||_{L^2(t^{|n|+2m-1} dt)}`.
pub fn gfun_apply(
    v: &SpectralVector,
    n: &MultiIndex,
    m: usize,
    x: &PointRd,
    t_rule: &QuadRule,
) -> Result<f64> {
    if n.length() + m == 0 {
        return Err(Error::Precondition("square functions need |n| + m > 0".into()));
    }
    t_rule.expect_t_weighted((n.length() + 2 * m) as f64)?;
    let basis = basis_values(&v.alpha, v.k_max, x, n)?;
    let terms: Vec<(Complex64, f64)> = v
        .indices
        .iter()
        .zip(&v.coeffs)
        .zip(v.eigenvalues())
        .map(|((k, c), lam)| (c * ((-lam).powi(m as i32) * basis.at(k)), lam))
        .collect();
    let mut s = 0.0;
    for (t, w) in t_rule.iter() {
        let val: Complex64 = terms.iter().map(|(c, lam)| c * (-t * lam).exp()).sum();
        s += w * val.norm_sqr();
    }
    Ok(s.sqrt())
}

type SymbolFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A spectral multiplier `m`, evaluated at the eigenvalues.
#[derive(Clone)]
pub enum MultiplierSymbol {
    /// `m(z) = z int_0^inf e^{-tz} psi(t) dt`.
    Laplace(Psi),
    /// `m(z) = int_0^inf e^{-tz} d nu(t)`.
    Stieltjes(NuMeasure),
    Explicit { label: String, m: SymbolFn },
}

impl fmt::Debug for MultiplierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Laplace(p) => write!(f, "Laplace({p:?})"),
            Self::Stieltjes(nu) => write!(f, "Stieltjes({nu:?})"),
            Self::Explicit { label, .. } => write!(f, "Explicit({label})"),
        }
    }
}

const SYMBOL_OPTS: AdaptiveOptions = AdaptiveOptions {
    abs_tol: 1e-14,
    rel_tol: 1e-13,
    max_panels: 4000,
};

impl MultiplierSymbol {
    pub fn explicit(label: impl Into<String>, m: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self::Explicit {
            label: label.into(),
            m: Arc::new(m),
        }
    }

    /// `m(z)` for `z > 0`. The Laplace integral is taken in `v = ln(tz)`,
    /// where it reads `int e^{-e^v} e^v psi(e^v / z) dv`.
    pub fn eval(&self, z: f64) -> Result<Complex64> {
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::Domain(format!("symbols are evaluated at z > 0, got {z}")));
        }
        match self {
            Self::Laplace(psi) => {
                let part = |im: bool| {
                    adaptive_integrate_with(
                        |v: f64| {
                            let e = v.exp();
                            let p = psi.eval(e / z);
                            (-e).exp() * e * if im { p.im } else { p.re }
                        },
                        -40.0,
                        5.0,
                        SYMBOL_OPTS,
                    )
                };
                Ok(Complex64::new(part(false)?.value, part(true)?.value))
            }
            Self::Stieltjes(nu) => nu.laplace_transform(z),
            Self::Explicit { m, .. } => Ok(m(z)),
        }
    }
}

/// `M_m f = sum m(lambda_k) c_k l_k`.
pub fn multiplier_apply(v: &SpectralVector, sym: &MultiplierSymbol) -> Result<SpectralVector> {
    if let MultiplierSymbol::Stieltjes(nu) = sym {
        nu.check_admissible(&v.alpha)?;
    }
    v.map_shells(|lam| sym.eval(lam))
}

/// Operator norm of `R_n` on `span{l_k : |k| <= K}` in `L^2(d mu_alpha)`,
/// from the Gram matrix of `lambda_k^{-|n|/2} delta^n l_k`.
pub fn riesz_operator_norm(alpha: &AlphaIndex, n: &MultiIndex, k_max: usize) -> Result<f64> {
    alpha.check_dim(n.dim())?;
    if n.is_zero() {
        return Err(Error::Precondition("Riesz transforms need |n| > 0".into()));
    }
    let d = alpha.dim();
    let rules: Vec<QuadRule> = (0..d)
        .map(|i| gauss_laguerre_rule(k_max + n.components()[i] + 2, alpha.components()[i]))
        .collect::<Result<_>>()?;
    let (xs, ws) = tensor_mu(alpha, &rules)?;
    let indices = MultiIndex::enumerate(d, k_max);
    let w = 0.5 * n.length() as f64;
    // delta^{n_i} l_j at each 1-d node
    let tables: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|i| {
            xs[i].iter()
                .map(|&x| {
                    (0..=k_max)
                        .map(|j| delta_laguerre_fn_1d(j, alpha.components()[i], x, n.components()[i]))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let n_nodes: usize = xs.iter().map(Vec::len).product();
    let mut phi = DMatrix::<f64>::zeros(n_nodes, indices.len());
    let mut row = 0;
    for_each_node(&xs, &ws, |_, wt, idx| {
        let sw = wt.sqrt();
        for (col, k) in indices.iter().enumerate() {
            let mut b = sw * alpha.eigenvalue(k.length()).powf(-w);
            for (i, &j) in k.components().iter().enumerate() {
                b *= tables[i][idx[i]][j];
            }
            phi[(row, col)] = b;
        }
        row += 1;
    });
    let gram = phi.transpose() * &phi;
    let eig = SymmetricEigen::new(gram);
    Ok(eig.eigenvalues.iter().copied().fold(0.0, f64::max).sqrt())
}
