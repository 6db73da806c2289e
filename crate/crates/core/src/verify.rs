//! Identity suite: representation agreement of the heat kernel, the Schläfli
//! integral for `I_nu`, the Bessel recurrence, orthonormality and the
//! eigenvalue equation of the Laguerre functions, semigroup and subordination
//! identities, multiplier degeneracies, Faà di Bruno and pointwise sampling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::harness::{pointwise_suite, SampleConfig};
use crate::index::{AlphaIndex, MultiIndex, PointRd};
use crate::kernels::{
    heat_kernel_closed, heat_kernel_schlafli, poisson_kernel, poisson_kernel_spectral, shell_products, NuMeasure,
    Psi, SchlafliRules,
};
use crate::numdiff::{ridders, second_derivative};
use crate::operators::{
    heat_apply, laguerre_projection_rules, multiplier_apply, project, MultiplierSymbol, SpectralVector,
};
use crate::quadrature::{adaptive_integrate_with, pi_measure_rule, schlafli_bessel, AdaptiveOptions};
use crate::special_fn::{bessel_i_scaled, compose_derivative, faa_partitions, laguerre_fn};

/// Outcome of one identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst error over the samples, in the unit of `tolerance`.
    pub achieved: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, achieved: f64, tolerance: f64, samples: usize, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: achieved.is_finite() && achieved <= tolerance,
            achieved,
            tolerance,
            samples,
            detail: detail.into(),
        }
    }

    fn failed(name: &str, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: false,
            achieved: f64::INFINITY,
            tolerance,
            samples: 0,
            detail: detail.into(),
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `e^{-z} I_nu(z)` as seen by the recurrence check.
pub type BesselFn<'a> = &'a (dyn Fn(f64, f64) -> Result<f64> + Sync);

/// `e^{-z} I_nu(z)` multiplied by `1 + fault * nu`. A constant factor would
/// pass the recurrence, an order-dependent one cannot.
pub fn faulty_bessel(fault: f64) -> impl Fn(f64, f64) -> Result<f64> + Sync {
    move |nu, z| bessel_i_scaled(nu, z).map(|v| v * (1.0 + fault * nu))
}

// ---------------------------------------------------------------------------
// heat kernel representations

/// Worst pairwise disagreement between closed form, spectral series and
/// Schläfli quadrature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleAgreement {
    pub points: usize,
    pub k_max: usize,
    pub nodes: usize,
    pub closed_vs_schlafli: f64,
    pub closed_vs_spectral: f64,
    pub spectral_vs_schlafli: f64,
    /// Points where the spectral leg was compared (all of them unless
    /// `resolvable_only`).
    pub spectral_compared: usize,
    /// `(alpha, t, x, y)` of the worst spectral disagreement.
    pub worst_spectral_point: Option<(Vec<f64>, f64, Vec<f64>, Vec<f64>)>,
    /// `sum |terms| / |sum|` of the spectral series at that point.
    pub worst_spectral_condition: f64,
}

impl TripleAgreement {
    pub fn worst(&self) -> f64 {
        self.closed_vs_schlafli
            .max(self.closed_vs_spectral)
            .max(self.spectral_vs_schlafli)
    }
}

struct SpectralLeg {
    value: f64,
    condition: f64,
    tail: f64,
}

fn heat_spectral_leg(alpha: &AlphaIndex, t: f64, x: &PointRd, y: &PointRd, k_max: usize) -> Result<SpectralLeg> {
    let shells = shell_products(alpha, x, y, k_max)?;
    let terms: Vec<f64> = shells
        .iter()
        .enumerate()
        .map(|(s, p)| (-t * alpha.eigenvalue(s)).exp() * p)
        .collect();
    let value: f64 = terms.iter().rev().sum();
    let abs: f64 = terms.iter().map(|v| v.abs()).sum();
    Ok(SpectralLeg {
        value,
        condition: abs / value.abs(),
        tail: terms.last().map_or(0.0, |v| v.abs()) / value.abs(),
    })
}

/// Samples `points` triples per `alpha` with `t` log-uniform in `[0.05, 3]`
/// and coordinates uniform in `[0.1, 3]`. With `resolvable_only`, the
/// spectral leg is compared only where its last shell and its cancellation
/// (`condition * 1e-16`) are both below `1e-3 * tol`.
pub fn triple_agreement(
    alphas: &[AlphaIndex],
    points: usize,
    seed: u64,
    k_max: usize,
    nodes: usize,
    resolvable_only: Option<f64>,
) -> Result<TripleAgreement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TripleAgreement {
        points: 0,
        k_max,
        nodes,
        closed_vs_schlafli: 0.0,
        closed_vs_spectral: 0.0,
        spectral_vs_schlafli: 0.0,
        spectral_compared: 0,
        worst_spectral_point: None,
        worst_spectral_condition: 0.0,
    };
    for alpha in alphas {
        let rules = SchlafliRules::new(alpha, nodes)?;
        let d = alpha.dim();
        for _ in 0..points {
            let t = (0.05f64.ln() + rng.random::<f64>() * 60f64.ln()).exp();
            let x = PointRd::new((0..d).map(|_| rng.random_range(0.1..=3.0)).collect())?;
            let y = PointRd::new((0..d).map(|_| rng.random_range(0.1..=3.0)).collect())?;
            let closed = heat_kernel_closed(alpha, t, &x, &y)?;
            let schlafli = heat_kernel_schlafli(alpha, t, &x, &y, &rules)?;
            let spectral = heat_spectral_leg(alpha, t, &x, &y, k_max)?;
            out.points += 1;
            out.closed_vs_schlafli = out.closed_vs_schlafli.max(rel(schlafli, closed));
            if let Some(tol) = resolvable_only {
                if spectral.tail > 1e-3 * tol || spectral.condition * 1e-16 > 1e-3 * tol {
                    continue;
                }
            }
            out.spectral_compared += 1;
            let e = rel(spectral.value, closed).max(rel(spectral.value, schlafli));
            if e >= out.closed_vs_spectral.max(out.spectral_vs_schlafli) {
                out.worst_spectral_point = Some((alpha.components().to_vec(), t, x.coords().to_vec(), y.coords().to_vec()));
                out.worst_spectral_condition = spectral.condition;
            }
            out.closed_vs_spectral = out.closed_vs_spectral.max(rel(spectral.value, closed));
            out.spectral_vs_schlafli = out.spectral_vs_schlafli.max(rel(spectral.value, schlafli));
        }
    }
    Ok(out)
}

/// The `alpha` list of the representation sweep: every component in
/// `{-0.9, -0.5, 0, 2.5}`, in `d = 1` and `d = 2`.
pub fn representation_alphas() -> Vec<AlphaIndex> {
    const C: [f64; 4] = [-0.9, -0.5, 0.0, 2.5];
    let mut out: Vec<AlphaIndex> = C.iter().map(|&a| AlphaIndex::new(vec![a]).unwrap()).collect();
    for &a in &C {
        for &b in &C {
            out.push(AlphaIndex::new(vec![a, b]).unwrap());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Bessel

pub const SCHLAFLI_ORDERS: [f64; 6] = [-0.5, -0.25, 0.25, 1.0, 2.0, 5.0];
pub const SCHLAFLI_ARGS: [f64; 5] = [0.1, 1.0, 10.0, 50.0, 200.0];

/// Schläfli's integral against `e^{-z} I_nu(z)` on the fixed order/argument
/// grid.
pub fn schlafli_identity(nodes: usize, tol: f64) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut at = (0.0, 0.0);
    for &nu in &SCHLAFLI_ORDERS {
        let rule = pi_measure_rule(nu, nodes)?;
        for &z in &SCHLAFLI_ARGS {
            let e = rel(schlafli_bessel(nu, z, &rule)?, bessel_i_scaled(nu, z)?);
            if e >= worst {
                worst = e;
                at = (nu, z);
            }
        }
    }
    Ok(CheckResult::new(
        "schlafli_bessel",
        worst,
        tol,
        SCHLAFLI_ORDERS.len() * SCHLAFLI_ARGS.len(),
        format!("{nodes} nodes, worst at nu = {}, z = {}", at.0, at.1),
    ))
}

/// `I_nu = 2(nu + 1)/z I_{nu+1} + I_{nu+2}` on `samples` random
/// `(nu, z) in (-1, 6] x (0, 200]`, relative to `I_nu`.
pub fn recurrence_check(samples: usize, seed: u64, bessel: BesselFn, tol: f64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut at = (0.0, 0.0);
    for _ in 0..samples {
        let nu = 6.0 - 7.0 * rng.random::<f64>();
        let z = 200.0 * (1.0 - rng.random::<f64>());
        let i0 = bessel(nu, z)?;
        let r = (i0 - 2.0 * (nu + 1.0) / z * bessel(nu + 1.0, z)? - bessel(nu + 2.0, z)?).abs() / i0;
        if !(r <= worst) {
            worst = r;
            at = (nu, z);
        }
    }
    Ok(CheckResult::new(
        "bessel_recurrence",
        worst,
        tol,
        samples,
        format!("worst at nu = {:.6}, z = {:.6}", at.0, at.1),
    ))
}

// ---------------------------------------------------------------------------
// Laguerre functions

/// `max |<l_j, l_k> - delta_jk|` over `|j|, |k| <= k_max`.
pub fn orthonormality(alpha: &AlphaIndex, k_max: usize, tol: f64) -> Result<CheckResult> {
    let rules = laguerre_projection_rules(alpha, k_max + 8)?;
    let indices = MultiIndex::enumerate(alpha.dim(), k_max);
    let mut worst: f64 = 0.0;
    for j in &indices {
        let pr = project(|x| laguerre_fn(j, alpha, x).unwrap_or(f64::NAN), alpha, k_max, &rules)?;
        for (k, c) in pr.vector.indices().iter().zip(pr.vector.coeffs()) {
            let want = if k == j { 1.0 } else { 0.0 };
            worst = worst.max((c.re - want).abs());
        }
    }
    Ok(CheckResult::new(
        "orthonormality",
        worst,
        tol,
        indices.len() * indices.len(),
        format!("Gram matrix for |k| <= {k_max}, alpha = {alpha}"),
    ))
}

/// `L_alpha l_k = (4|k| + 2|alpha| + 2d) l_k` with
/// `L_alpha = sum_i -d_i^2 - (2 alpha_i + 1)/x_i d_i + x_i^2`, by finite
/// differences at a few points; the error is relative to `max |lambda_k l_k|`.
pub fn eigen_equation(alpha: &AlphaIndex, k_max: usize, tol: f64) -> Result<CheckResult> {
    let d = alpha.dim();
    let axis = [0.35, 0.8, 1.4, 2.1];
    let points: Vec<PointRd> = (0..axis.len().pow(d as u32))
        .map(|m| PointRd::new((0..d).map(|i| axis[(m / axis.len().pow(i as u32)) % axis.len()]).collect()))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for k in MultiIndex::enumerate(d, k_max) {
        let lam = alpha.eigenvalue(k.length());
        let (mut err, mut scale): (f64, f64) = (0.0, 0.0);
        for x in &points {
            let mut lf = 0.0;
            for i in 0..d {
                let f = |s: f64| laguerre_fn(&k, alpha, &x.with_coord(i, s).unwrap()).unwrap();
                let xi = x.coords()[i];
                let h = 0.05;
                let d1 = ridders(f, xi, h).value;
                let d2 = second_derivative(f, xi, h);
                lf += -d2 - (2.0 * alpha.components()[i] + 1.0) / xi * d1 + xi * xi * f(xi);
            }
            let v = lam * laguerre_fn(&k, alpha, x)?;
            err = err.max((lf - v).abs());
            scale = scale.max(v.abs());
            count += 1;
        }
        worst = worst.max(err / scale);
    }
    Ok(CheckResult::new(
        "eigen_equation",
        worst,
        tol,
        count,
        format!("finite differences, |k| <= {k_max}, alpha = {alpha}"),
    ))
}

// ---------------------------------------------------------------------------
// semigroup, subordination, multipliers

/// `(t, s, x, y)` for the Chapman–Kolmogorov check.
pub const CK_SAMPLES: [(f64, f64, f64, f64); 5] = [
    (0.1, 0.2, 0.5, 0.7),
    (0.3, 0.3, 1.0, 1.6),
    (0.5, 1.0, 0.2, 2.0),
    (1.0, 0.05, 1.5, 1.3),
    (2.0, 0.7, 0.9, 0.4),
];

/// `int G_t(x, z) G_s(z, y) d mu_a(z) = G_{t+s}(x, y)` in one dimension, by
/// adaptive quadrature in `v = z^{2a+2}` (which absorbs the density) over
/// 32 panels in `z`.
pub fn chapman_kolmogorov(a: f64, tol: f64) -> Result<CheckResult> {
    let alpha = AlphaIndex::new(vec![a])?;
    let p = 2.0 * a + 2.0;
    let mut worst: f64 = 0.0;
    for &(t, s, x, y) in &CK_SAMPLES {
        let (px, py) = (PointRd::new(vec![x])?, PointRd::new(vec![y])?);
        let z_max = x.max(y) + 12.0 * (t.max(s).tanh().sqrt() + 1.0);
        let f = |v: f64| {
            if v <= 0.0 {
                return 0.0;
            }
            let z = PointRd::new(vec![v.powf(1.0 / p)]).unwrap();
            heat_kernel_closed(&alpha, t, &px, &z).unwrap() * heat_kernel_closed(&alpha, s, &z, &py).unwrap() / p
        };
        let want = heat_kernel_closed(&alpha, t + s, &px, &py)?;
        let panels = 32;
        let mut got = 0.0;
        for k in 0..panels {
            let (z0, z1) = (z_max * k as f64 / panels as f64, z_max * (k + 1) as f64 / panels as f64);
            got += adaptive_integrate_with(
                f,
                z0.powf(p),
                z1.powf(p),
                AdaptiveOptions {
                    abs_tol: 1e-15 * want,
                    rel_tol: 1e-13,
                    max_panels: 2000,
                },
            )?
            .value;
        }
        worst = worst.max(rel(got, want));
    }
    Ok(CheckResult::new(
        "chapman_kolmogorov",
        worst,
        tol,
        CK_SAMPLES.len(),
        format!("d = 1, alpha = ({a})"),
    ))
}

/// Subordinated Poisson kernel against its eigen-series (3000 shells) at
/// `t in {0.3, 1, 2}`.
pub fn subordination(alpha: &AlphaIndex, tol: f64) -> Result<CheckResult> {
    let d = alpha.dim();
    let pairs = [(0.9, 1.4), (0.3, 0.5), (2.0, 1.2)];
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for &t in &[0.3, 1.0, 2.0] {
        for &(x, y) in &pairs {
            let (px, py) = (PointRd::new(vec![x; d])?, PointRd::new(vec![y; d])?);
            let pk = poisson_kernel(alpha, t, &px, &py)?;
            let s = poisson_kernel_spectral(alpha, t, &px, &py, 3000)?;
            worst = worst.max(rel(pk, s.value));
            n += 1;
        }
    }
    Ok(CheckResult::new("subordination", worst, tol, n, format!("alpha = {alpha}")))
}

/// Semigroup law and contraction of `heat_apply` on a fixed coefficient
/// vector.
pub fn coefficient_semigroup(alpha: &AlphaIndex, tol: f64) -> Result<CheckResult> {
    let v = test_vector(alpha)?;
    let mut worst: f64 = 0.0;
    let mut contraction = true;
    for &(t, s) in &[(0.1, 0.2), (0.5, 1.5), (2.0, 0.01)] {
        let a = heat_apply(&heat_apply(&v, t)?, s)?;
        let b = heat_apply(&v, t + s)?;
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            worst = worst.max((x - y).norm() / y.norm().max(f64::MIN_POSITIVE));
        }
        contraction &= b.norm() <= v.norm();
    }
    let mut r = CheckResult::new("coefficient_semigroup", worst, tol, 3, "T_s T_t = T_{t+s}, ||T_t v|| <= ||v||");
    r.passed &= contraction;
    Ok(r)
}

fn test_vector(alpha: &AlphaIndex) -> Result<SpectralVector> {
    let k_max = 8;
    let n = MultiIndex::enumerate(alpha.dim(), k_max).len();
    SpectralVector::new(
        alpha.clone(),
        k_max,
        (0..n).map(|i| Complex64::new(1.0 / (1.0 + i as f64), 0.3 - 0.05 * i as f64)).collect(),
    )
}

/// `psi = 1` is the identity, `nu = delta_{t0}` is `T_{t0}` and the
/// imaginary power `t^{-i gamma} / Gamma(1 - i gamma)` has `|m| = 1` on the
/// spectrum. Tolerances are `(identity, modulus)`; the Dirac case must be
/// exact.
pub fn multiplier_degeneracies(alpha: &AlphaIndex, tol: (f64, f64)) -> Result<Vec<CheckResult>> {
    let v = test_vector(alpha)?;
    let n = v.coeffs().len();
    let id = multiplier_apply(&v, &MultiplierSymbol::Laplace(Psi::constant(1.0)))?;
    let e_id = id
        .coeffs()
        .iter()
        .zip(v.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let t0 = 0.4;
    let dirac = multiplier_apply(&v, &MultiplierSymbol::Stieltjes(NuMeasure::dirac(t0)))?;
    let heat = heat_apply(&v, t0)?;
    let e_dirac = dirac
        .coeffs()
        .iter()
        .zip(heat.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let ip = multiplier_apply(&v, &MultiplierSymbol::Laplace(Psi::imaginary_power(0.5)))?;
    let e_ip = ip
        .coeffs()
        .iter()
        .zip(v.coeffs())
        .map(|(x, y)| (x.norm() - y.norm()).abs() / y.norm())
        .fold(0.0, f64::max);
    Ok(vec![
        CheckResult::new("multiplier_identity", e_id, tol.0, n, "psi = 1"),
        CheckResult::new("multiplier_dirac", e_dirac, 0.0, n, format!("nu = delta at t = {t0} against heat_apply")),
        CheckResult::new("multiplier_imaginary_power", e_ip, tol.1, n, "gamma = 0.5, |m(lambda_k)| = 1"),
    ])
}

// ---------------------------------------------------------------------------
// Faà di Bruno

/// Partition counts `p(N)` for `N = 0..=12`.
pub const PARTITION_COUNTS: [usize; 13] = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77];

pub fn partition_counts() -> Result<CheckResult> {
    let mut bad = 0;
    for (n, &want) in PARTITION_COUNTS.iter().enumerate().skip(1) {
        if faa_partitions(n)?.len() != want {
            bad += 1;
        }
    }
    Ok(CheckResult::new("partition_counts", bad as f64, 0.0, 12, "N = 1..=12"))
}

// d^n/dx^n at x from central differences, two Richardson levels
fn nth_difference(f: &impl Fn(f64) -> f64, x: f64, n: usize, h: f64) -> f64 {
    let d = |h: f64| {
        let mut s = 0.0;
        let mut c = 1.0;
        for j in 0..=n {
            s += c * f(x + (0.5 * n as f64 - j as f64) * h);
            c *= -((n - j) as f64) / (j + 1) as f64;
        }
        s / h.powi(n as i32)
    };
    let (a, b, c) = (d(h), d(h / 2.0), d(h / 4.0));
    let ab = (4.0 * b - a) / 3.0;
    let bc = (4.0 * c - b) / 3.0;
    (16.0 * bc - ab) / 15.0
}

/// `compose_derivative` against finite differences of `g(f(x))` for
/// `N = 1..=5`, with `g in {exp, sin}` and `f(x) = a sin(b x) + c x`.
pub fn faa_di_bruno_fd(samples: usize, seed: u64, tol: f64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let (a, b, c): (f64, f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let x: f64 = rng.random_range(-1.0..1.0);
        let f = |s: f64| a * (b * s).sin() + c * s;
        let fd: Vec<f64> = (1..=5)
            .map(|k| a * b.powi(k) * (b * x + k as f64 * std::f64::consts::FRAC_PI_2).sin() + if k == 1 { c } else { 0.0 })
            .collect();
        let u = f(x);
        let use_exp = i % 2 == 0;
        let gd: Vec<f64> = (0..=5)
            .map(|k| if use_exp { u.exp() } else { (u + k as f64 * std::f64::consts::FRAC_PI_2).sin() })
            .collect();
        let comp = |s: f64| if use_exp { f(s).exp() } else { f(s).sin() };
        for n in 1..=5 {
            let exact = compose_derivative(&gd, &fd, n)?;
            let num = nth_difference(&comp, x, n, 0.2);
            // relative to the size of the terms, since the derivative can vanish
            let scale = gd.iter().map(|v| v.abs()).fold(0.0, f64::max)
                * fd.iter().map(|v| v.abs().max(1.0)).fold(1.0, f64::max).powi(n as i32);
            worst = worst.max((exact - num).abs() / exact.abs().max(1e-3 * scale));
        }
    }
    Ok(CheckResult::new(
        "faa_di_bruno_fd",
        worst,
        tol,
        samples * 5,
        "g in {exp, sin}, f = a sin(bx) + cx, N <= 5",
    ))
}

// ---------------------------------------------------------------------------
// suite

/// Settings for [`run_verify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub alpha: AlphaIndex,
    pub seed: u64,
    /// Relative Bessel corruption seen by the recurrence check (0 = none).
    pub bessel_fault: f64,
    pub triple_points: usize,
    pub recurrence_samples: usize,
    pub pointwise: SampleConfig,
    pub ball_samples: usize,
}

impl VerifyOptions {
    pub fn new(alpha: AlphaIndex) -> Self {
        let ball_samples = if alpha.dim() == 1 { 100_000 } else { 10_000 };
        Self {
            alpha,
            seed: 7,
            bessel_fault: 0.0,
            triple_points: 200,
            recurrence_samples: 10_000,
            pointwise: SampleConfig::default(),
            ball_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub alpha: Vec<f64>,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

fn guarded(name: &str, tol: f64, r: Result<CheckResult>) -> CheckResult {
    r.unwrap_or_else(|e| CheckResult::failed(name, tol, e.to_string()))
}

/// Runs the identity suite for `opts.alpha`. Evaluation errors are recorded
/// as failed checks.
pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let alpha = &opts.alpha;
    let mut checks = Vec::new();

    let tol = 1e-6;
    checks.push(guarded(
        "heat_representations",
        tol,
        triple_agreement(std::slice::from_ref(alpha), opts.triple_points, opts.seed, 400, 64, Some(tol)).map(|r| {
            CheckResult::new(
                "heat_representations",
                r.worst(),
                tol,
                r.points,
                format!(
                    "closed/schlafli {:.3e}, closed/spectral {:.3e}, spectral/schlafli {:.3e}; spectral compared at {} of {} points (K = {}, the rest truncated or ill-conditioned)",
                    r.closed_vs_schlafli, r.closed_vs_spectral, r.spectral_vs_schlafli, r.spectral_compared, r.points, r.k_max
                ),
            )
        }),
    ));
    checks.push(guarded("schlafli_bessel", 1e-9, schlafli_identity(80, 1e-9)));
    let bessel = faulty_bessel(opts.bessel_fault);
    checks.push(guarded(
        "bessel_recurrence",
        1e-10,
        recurrence_check(opts.recurrence_samples, opts.seed, &bessel, 1e-10),
    ));
    checks.push(guarded("orthonormality", 1e-7, orthonormality(alpha, 6, 1e-7)));
    checks.push(guarded("eigen_equation", 1e-4, eigen_equation(alpha, 4, 1e-4)));
    for &a in alpha.components() {
        checks.push(guarded("chapman_kolmogorov", 1e-6, chapman_kolmogorov(a, 1e-6)));
    }
    checks.push(guarded("subordination", 1e-6, subordination(alpha, 1e-6)));
    checks.push(guarded("coefficient_semigroup", 1e-12, coefficient_semigroup(alpha, 1e-12)));
    match multiplier_degeneracies(alpha, (1e-10, 1e-8)) {
        Ok(v) => checks.extend(v),
        Err(e) => checks.push(CheckResult::failed("multiplier_degeneracies", 0.0, e.to_string())),
    }
    checks.push(guarded("partition_counts", 0.0, partition_counts()));
    checks.push(guarded("faa_di_bruno_fd", 1e-4, faa_di_bruno_fd(40, opts.seed, 1e-4)));

    match pointwise_suite(&opts.pointwise, std::slice::from_ref(alpha), opts.ball_samples) {
        Ok(p) => {
            for c in &p.exact {
                let mut r = CheckResult::new(
                    &format!("pointwise_{}", c.name),
                    c.violations as f64,
                    0.0,
                    c.samples,
                    format!("violations; worst normalized ratio {:.6}", c.worst),
                );
                r.passed = c.passed();
                checks.push(r);
            }
            for s in &p.sups {
                let mut r = CheckResult::new(
                    &format!("pointwise_sup_{}", s.name),
                    s.growth.max(0.0),
                    opts.pointwise.stability_tol,
                    s.samples_large,
                    format!(
                        "sup {:.6e} at {} samples, {:.6e} at {}{}",
                        s.sup,
                        s.samples,
                        s.sup_large,
                        s.samples_large,
                        s.bound.map(|b| format!(", bound {b:.6e}")).unwrap_or_default()
                    ),
                );
                r.passed = s.stable;
                checks.push(r);
            }
        }
        Err(e) => checks.push(CheckResult::failed("pointwise", 0.0, e.to_string())),
    }
    let passed = checks.iter().all(|c| c.passed);
    VerifyReport {
        alpha: alpha.components().to_vec(),
        seed: opts.seed,
        checks,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_breaks_the_recurrence_only_when_order_dependent() {
        let clean = faulty_bessel(0.0);
        assert!(recurrence_check(500, 1, &clean, 1e-10).unwrap().passed);
        let bad = faulty_bessel(1e-6);
        assert!(!recurrence_check(500, 1, &bad, 1e-10).unwrap().passed);
    }

    #[test]
    fn nth_difference_of_exp() {
        for n in 1..=5 {
            let v = nth_difference(&f64::exp, 0.3, n, 0.2);
            assert!((v / 0.3f64.exp() - 1.0).abs() < 1e-7, "n={n}: {v}");
        }
    }

    #[test]
    fn small_identities() {
        let al = AlphaIndex::new(vec![-0.75]).unwrap();
        assert!(schlafli_identity(80, 1e-9).unwrap().passed);
        assert!(partition_counts().unwrap().passed);
        assert!(orthonormality(&al, 6, 1e-7).unwrap().passed);
        assert!(coefficient_semigroup(&al, 1e-12).unwrap().passed);
        assert!(chapman_kolmogorov(2.5, 1e-6).unwrap().passed);
        for c in multiplier_degeneracies(&al, (1e-10, 1e-8)).unwrap() {
            assert!(c.passed, "{c:?}");
        }
    }
}
