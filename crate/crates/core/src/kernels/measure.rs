//! Multiplier data: bounded functions `psi` for Laplace-type multipliers and
//! measures `nu` on `(0, inf)` for Laplace–Stieltjes-type multipliers.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::AlphaIndex;
use crate::quadrature::{adaptive_integrate_with, integrate_to_infinity, AdaptiveOptions};
use crate::special_fn::gamma_complex;

type PsiFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A bounded function of `t > 0` with an a-priori bound on `sup |psi|`.
#[derive(Clone)]
pub struct Psi {
    label: String,
    func: PsiFn,
    sup_bound: f64,
}

impl Psi {
    pub fn new(
        label: impl Into<String>,
        func: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        sup_bound: f64,
    ) -> Result<Self> {
        if !(sup_bound.is_finite() && sup_bound >= 0.0) {
            return Err(Error::Precondition(format!(
                "psi needs a finite sup bound, got {sup_bound}"
            )));
        }
        Ok(Self {
            label: label.into(),
            func: Arc::new(func),
            sup_bound,
        })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            label: format!("const({c})"),
            func: Arc::new(move |_| Complex64::new(c, 0.0)),
            sup_bound: c.abs(),
        }
    }

    /// `t^{-i gamma} / Gamma(1 - i gamma)`, whose multiplier is `z^{i gamma}`.
    pub fn imaginary_power(gamma: f64) -> Self {
        let g = gamma_complex(Complex64::new(1.0, -gamma));
        Self {
            label: format!("imaginary_power({gamma})"),
            func: Arc::new(move |t: f64| Complex64::from_polar(1.0, -gamma * t.ln()) / g),
            sup_bound: 1.0 / g.norm(),
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        (self.func)(t)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }
}

impl fmt::Debug for Psi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Psi")
            .field("label", &self.label)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

/// Point mass `weight * delta_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub t: f64,
    pub weight: Complex64,
}

/// Density sampled on an increasing grid, linear in between and zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedDensity {
    pub t: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// Density `coef * e^{rate t}` on `(start, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpTail {
    pub start: f64,
    pub coef: Complex64,
    pub rate: f64,
}

/// A complex measure on `(0, inf)`: atoms, a tabulated density and an
/// exponential tail.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuMeasure {
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub density: Option<TabulatedDensity>,
    #[serde(default)]
    pub tail: Option<ExpTail>,
}

const SEGMENT_OPTS: AdaptiveOptions = AdaptiveOptions {
    abs_tol: 1e-300,
    rel_tol: 1e-12,
    max_panels: 2000,
};

/// Relative error accepted when the requested one is out of reach, as for
/// integrands that are differences of nearby kernels.
const FALLBACK_REL: f64 = 1e-8;

fn settle(r: Result<crate::quadrature::Integral>) -> Result<f64> {
    match r {
        Ok(v) => Ok(v.value),
        Err(Error::NoConvergence { estimate, achieved, .. }) if achieved <= FALLBACK_REL * estimate.abs() => {
            Ok(estimate)
        }
        Err(e) => Err(e),
    }
}

impl NuMeasure {
    pub fn dirac(t0: f64) -> Self {
        Self {
            atoms: vec![Atom {
                t: t0,
                weight: Complex64::new(1.0, 0.0),
            }],
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Precondition(m));
        for a in &self.atoms {
            if !(a.t.is_finite() && a.t > 0.0) || !(a.weight.re.is_finite() && a.weight.im.is_finite()) {
                return bad(format!("atom at t = {} with weight {} is invalid", a.t, a.weight));
            }
        }
        if let Some(dn) = &self.density {
            if dn.t.len() < 2 || dn.t.len() != dn.values.len() {
                return bad("density needs at least two samples and one value per node".into());
            }
            if !(dn.t[0] > 0.0) || dn.t.windows(2).any(|w| !(w[1] > w[0])) {
                return bad("density nodes must be positive and strictly increasing".into());
            }
        }
        if let Some(tl) = &self.tail {
            if !(tl.start.is_finite() && tl.start > 0.0 && tl.rate.is_finite()) {
                return bad(format!("tail {tl:?} is invalid"));
            }
        }
        if self.atoms.is_empty() && self.density.is_none() && self.tail.is_none() {
            return bad("the measure is empty".into());
        }
        Ok(())
    }

    fn density_at(dn: &TabulatedDensity, t: f64) -> Complex64 {
        let k = dn.t.partition_point(|s| *s <= t);
        if k == 0 || k == dn.t.len() {
            return if t == *dn.t.last().unwrap() { *dn.values.last().unwrap() } else { Complex64::new(0.0, 0.0) };
        }
        let (t0, t1) = (dn.t[k - 1], dn.t[k]);
        let w = (t - t0) / (t1 - t0);
        dn.values[k - 1] * (1.0 - w) + dn.values[k] * w
    }

    /// `int e^{-lambda t} d|nu|(t)`; infinite when the tail grows too fast.
    pub fn weighted_variation(&self, lambda: f64) -> Result<f64> {
        self.validate()?;
        let mut total: f64 = self.atoms.iter().map(|a| a.weight.norm() * (-lambda * a.t).exp()).sum();
        if let Some(dn) = &self.density {
            for w in dn.t.windows(2) {
                total += adaptive_integrate_with(
                    |t| Self::density_at(dn, t).norm() * (-lambda * t).exp(),
                    w[0],
                    w[1],
                    SEGMENT_OPTS,
                )?
                .value;
            }
        }
        if let Some(tl) = &self.tail {
            if tl.coef.norm() > 0.0 {
                if tl.rate >= lambda {
                    return Ok(f64::INFINITY);
                }
                total += tl.coef.norm() * ((tl.rate - lambda) * tl.start).exp() / (lambda - tl.rate);
            }
        }
        Ok(total)
    }

    /// Checks admissibility against `alpha` and returns the weighted variation.
    pub fn check_admissible(&self, alpha: &AlphaIndex) -> Result<f64> {
        let lam = alpha.ground_eigenvalue();
        let v = self.weighted_variation(lam)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Inadmissible(format!(
                "the exponential tail grows at rate {} >= 2d + 2|alpha| = {lam}",
                self.tail.map_or(f64::NAN, |t| t.rate)
            )))
        }
    }

    /// `int f(t) d nu(t)` for a real `f`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> Result<Complex64> {
        self.integrate_opts(f, SEGMENT_OPTS)
    }

    /// `int (f - g) d nu` with an absolute tolerance tied to `int |f| d|nu|`,
    /// so that nearly cancelling `f` and `g` do not ask for the impossible.
    pub fn integrate_difference(&self, f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64) -> Result<Complex64> {
        let scale = self.integrate_opts(|t| f(t).abs(), SEGMENT_OPTS)?.norm();
        self.integrate_opts(
            |t| f(t) - g(t),
            AdaptiveOptions {
                abs_tol: 1e-14 * scale,
                ..SEGMENT_OPTS
            },
        )
    }

    fn integrate_opts(&self, f: impl Fn(f64) -> f64, opts: AdaptiveOptions) -> Result<Complex64> {
        self.validate()?;
        let mut total: Complex64 = self.atoms.iter().map(|a| a.weight * f(a.t)).sum();
        if let Some(dn) = &self.density {
            for w in dn.t.windows(2) {
                let re = settle(adaptive_integrate_with(|t| f(t) * Self::density_at(dn, t).re, w[0], w[1], opts))?;
                let im = settle(adaptive_integrate_with(|t| f(t) * Self::density_at(dn, t).im, w[0], w[1], opts))?;
                total += Complex64::new(re, im);
            }
        }
        if let Some(tl) = &self.tail {
            let r = settle(integrate_to_infinity(|t| f(t) * (tl.rate * t).exp(), tl.start, opts))?;
            total += tl.coef * r;
        }
        Ok(total)
    }

    /// `m(z) = int e^{-t z} d nu(t)`, with the tail in closed form.
    pub fn laplace_transform(&self, z: f64) -> Result<Complex64> {
        let head = Self {
            tail: None,
            ..self.clone()
        };
        let mut total = if head.atoms.is_empty() && head.density.is_none() {
            self.validate()?;
            Complex64::new(0.0, 0.0)
        } else {
            head.integrate(|t| (-z * t).exp())?
        };
        if let Some(tl) = &self.tail {
            if tl.rate >= z {
                return Err(Error::Inadmissible(format!(
                    "the transform diverges at z = {z} for tail rate {}",
                    tl.rate
                )));
            }
            total += tl.coef * ((tl.rate - z) * tl.start).exp() / (z - tl.rate);
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_transform() {
        let nu = NuMeasure::dirac(0.7);
        let m = nu.laplace_transform(3.0).unwrap();
        assert_eq!(m, Complex64::new((-3.0f64 * 0.7).exp(), 0.0));
        assert_eq!(nu.integrate(|t| t * t).unwrap().re, 0.7 * 0.7);
    }

    #[test]
    fn density_and_tail() {
        // density 1 on [1, 2] plus e^{-t} beyond 2
        let nu = NuMeasure {
            atoms: vec![],
            density: Some(TabulatedDensity {
                t: vec![1.0, 2.0],
                values: vec![Complex64::new(1.0, 0.0); 2],
            }),
            tail: Some(ExpTail {
                start: 2.0,
                coef: Complex64::new(1.0, 0.0),
                rate: -1.0,
            }),
        };
        let z = 0.5;
        let want = ((-z) as f64).exp() / z - (-2.0 * z).exp() / z + (-3.0f64).exp() / 1.5;
        assert!((nu.laplace_transform(z).unwrap().re - want).abs() < 1e-12);
        assert!((nu.integrate(|t| (-z * t).exp()).unwrap().re - want).abs() < 1e-9);
        assert!(nu.weighted_variation(0.5).unwrap().is_finite());
    }

    #[test]
    fn admissibility() {
        let alpha = AlphaIndex::new(vec![-0.9]).unwrap();
        let grow = NuMeasure {
            tail: Some(ExpTail {
                start: 1.0,
                coef: Complex64::new(1.0, 0.0),
                rate: 0.3,
            }),
            ..Default::default()
        };
        assert!(matches!(grow.check_admissible(&alpha), Err(Error::Inadmissible(_))));
        let ok = NuMeasure {
            tail: Some(ExpTail { rate: 0.1, ..grow.tail.unwrap() }),
            ..Default::default()
        };
        assert!(ok.check_admissible(&alpha).is_ok());
        assert!(NuMeasure::default().validate().is_err());
    }

    #[test]
    fn psi_bounds() {
        let p = Psi::imaginary_power(0.5);
        for &t in &[1e-3, 1.0, 50.0] {
            assert!((p.eval(t).norm() - p.sup_bound()).abs() < 1e-14);
        }
        assert!(Psi::new("bad", |_| Complex64::new(0.0, 0.0), f64::NAN).is_err());
        assert_eq!(Psi::constant(-2.0).sup_bound(), 2.0);
    }
}
