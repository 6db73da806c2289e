//! Random-sample checks of the pointwise inequalities used to bound the
//! kernels: exact inequalities are counted for violations, `≲` bounds are
//! reported as sampled sups at `N` and `10 N` samples.
//!
//! Samples are drawn in fixed-size chunks, each from its own ChaCha stream
//! keyed by `(seed, chunk)`, so the first `N` samples of a `10 N` run are the
//! `N` run and results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::index::{AlphaIndex, PointRd};
use crate::kernels::q_forms;
use crate::measure_geometry::{ball_measure, BallSpec};

const CHUNK: usize = 10_000;
/// Rounding allowance for the exact inequalities, relative to `|x|^2 + |y|^2`.
const ULPS: f64 = 8.0 * f64::EPSILON;

/// Sampling setup shared by all pointwise checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleConfig {
    pub samples: usize,
    /// The stability run uses `samples * growth` samples.
    pub growth: usize,
    pub seed: u64,
    pub coord_min: f64,
    pub coord_max: f64,
    /// Rejected when a sup grows by this fraction in the larger run.
    pub stability_tol: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            samples: 100_000,
            growth: 10,
            seed: 7,
            coord_min: 1e-3,
            coord_max: 1e2,
            stability_tol: 0.1,
        }
    }
}

/// Violation count of an inequality that must hold on every sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityCount {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// Largest `lhs / rhs` seen; at most 1 up to rounding.
    pub worst: f64,
}

impl InequalityCount {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Sampled sup of a bounded ratio at two sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledSup {
    pub name: String,
    pub samples: usize,
    pub sup: f64,
    pub samples_large: usize,
    pub sup_large: f64,
    /// `sup_large / sup - 1`.
    pub growth: f64,
    /// Closed-form bound on the ratio, when one is known.
    pub bound: Option<f64>,
    pub stable: bool,
}

impl SampledSup {
    fn new(name: &str, small: (usize, f64), large: (usize, f64), bound: Option<f64>, tol: f64) -> Self {
        let growth = large.1 / small.1 - 1.0;
        let within = bound.is_none_or(|b| large.1 <= b * (1.0 + 1e-12));
        Self {
            name: name.into(),
            samples: small.0,
            sup: small.1,
            samples_large: large.0,
            sup_large: large.1,
            growth,
            bound,
            stable: small.1.is_finite() && large.1.is_finite() && small.1 > 0.0 && growth < tol && within,
        }
    }
}

/// Draws `n` samples by chunk and maps each; results are in sample order.
fn sampled<T: Send>(cfg: &SampleConfig, stream: u64, n: usize, f: impl Fn(&mut ChaCha8Rng) -> T + Sync) -> Vec<T> {
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(stream);
            rng.set_word_pos((c as u128) << 40);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi / lo).ln()).exp()
}

fn coords(rng: &mut ChaCha8Rng, cfg: &SampleConfig, d: usize) -> Vec<f64> {
    (0..d).map(|_| log_uniform(rng, cfg.coord_min, cfg.coord_max)).collect()
}

// endpoints of [-1, 1] are where the inequalities are tight
fn s_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d)
        .map(|_| match rng.random_range(0..10) {
            0 => -1.0,
            1 => 1.0,
            _ => rng.random_range(-1.0..=1.0),
        })
        .collect()
}

fn zeta(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random::<bool>() {
        log_uniform(rng, 1e-6, 1.0)
    } else {
        1.0 - log_uniform(rng, 1e-6, 1.0)
    }
}

struct Triple {
    x: Vec<f64>,
    y: Vec<f64>,
    s: Vec<f64>,
    j: usize,
    zeta: f64,
    qp: f64,
    qm: f64,
}

fn triple(rng: &mut ChaCha8Rng, cfg: &SampleConfig) -> Triple {
    let d = rng.random_range(1..=3);
    let (x, y, s) = (coords(rng, cfg, d), coords(rng, cfg, d), s_vec(rng, d));
    let q = q_forms(
        &PointRd::new(x.clone()).expect("positive"),
        &PointRd::new(y.clone()).expect("positive"),
        &s,
    )
    .expect("admissible");
    Triple {
        j: rng.random_range(0..d),
        zeta: zeta(rng),
        x,
        y,
        s,
        qp: q.q_plus,
        qm: q.q_minus,
    }
}

fn ln_exp(t: &Triple) -> f64 {
    -t.qp / (4.0 * t.zeta) - t.zeta * t.qm / 4.0
}

fn count(name: &str, n: usize, worst_and_bad: impl Iterator<Item = (f64, bool)>) -> InequalityCount {
    let (mut worst, mut violations) = (0.0f64, 0);
    for (w, bad) in worst_and_bad {
        worst = worst.max(w);
        violations += bad as usize;
    }
    InequalityCount {
        name: name.into(),
        samples: n,
        violations,
        worst,
    }
}

/// `|Psi_+-^j| <= sqrt(q_+-)`, `|Phi_+-^j| <= sqrt(q_+-)` and
/// `(A q)^b e^{-c A q} <= (b / (c e))^b`, on `cfg.samples` samples each.
pub fn lemma27_exact(cfg: &SampleConfig) -> Vec<InequalityCount> {
    let n = cfg.samples;
    let a = sampled(cfg, 1, n, |rng| {
        let t = triple(rng, cfg);
        let (xj, yj, sj) = (t.x[t.j], t.y[t.j], t.s[t.j]);
        let scale: f64 = t.x.iter().chain(&t.y).map(|v| v * v).sum();
        let mut worst = 0.0f64;
        let mut bad = false;
        for (v, q) in [
            (xj + yj * sj, t.qp),
            (xj - yj * sj, t.qm),
            (yj + xj * sj, t.qp),
            (yj - xj * sj, t.qm),
        ] {
            worst = worst.max(v * v / q);
            bad |= v * v > q + ULPS * scale;
        }
        (worst, bad)
    });
    let b = sampled(cfg, 2, n, |rng| {
        let t = triple(rng, cfg);
        let q = if rng.random::<bool>() { t.qp } else { t.qm };
        let b: f64 = rng.random_range(0.0..6.0);
        let c = log_uniform(rng, 1e-2, 4.0);
        // A spread around the maximizer b / (c q)
        let big_a = log_uniform(rng, 1e-3, 1e3) * b.max(1e-3) / (c * q);
        let v = big_a * q;
        let ln_lhs = if b == 0.0 { -c * v } else { b * v.ln() - c * v };
        let ln_rhs = if b == 0.0 { 0.0 } else { b * (b / (c * std::f64::consts::E)).ln() };
        let r = (ln_lhs - ln_rhs).exp();
        (r, ln_lhs > ln_rhs + 1e-12 * (1.0 + ln_rhs.abs()))
    });
    vec![
        count("psi_phi_by_sqrt_q", n, a.into_iter()),
        count("power_times_exponential", n, b.into_iter()),
    ]
}

/// Sampled sups of `lhs / rhs` for the three `Exp` bounds at fixed `(b, c)`:
/// `(|Psi_+| + |Phi_+|)^b Exp^c / zeta^{b/2}`, the same with `Psi_-`, `Phi_-`
/// against `zeta^{-b/2}`, and `x_j^b Exp^c / zeta^{-b/2}`. Closed-form bounds
/// `2^b (2b/(ce))^{b/2}`, `2^b (2b/(ce))^{b/2}` and `(2b/(ce))^{b/2}` are
/// attached.
pub fn lemma27_sups(cfg: &SampleConfig, b: f64, c: f64) -> Vec<SampledSup> {
    let n_large = cfg.samples * cfg.growth;
    let vals = sampled(cfg, 3, n_large, |rng| {
        let t = triple(rng, cfg);
        let (xj, yj, sj) = (t.x[t.j], t.y[t.j], t.s[t.j]);
        let le = c * ln_exp(&t);
        let lz = t.zeta.ln();
        let plus = ((xj + yj * sj).abs() + (yj + xj * sj).abs()).ln();
        let minus = ((xj - yj * sj).abs() + (yj - xj * sj).abs()).ln();
        let pw = |l: f64| if b == 0.0 { 0.0 } else { b * l };
        [
            (pw(plus) + le - 0.5 * b * lz).exp(),
            (pw(minus) + le + 0.5 * b * lz).exp(),
            (pw(xj.ln()) + le + 0.5 * b * lz).exp(),
        ]
    });
    let core = if b == 0.0 {
        1.0
    } else {
        (2.0 * b / (c * std::f64::consts::E)).powf(b / 2.0)
    };
    let bounds = [2f64.powf(b) * core, 2f64.powf(b) * core, core];
    let names = ["psi_phi_plus_exp", "psi_phi_minus_exp", "coordinate_exp"];
    (0..3)
        .map(|k| {
            let small = vals[..cfg.samples].iter().map(|v| v[k]).fold(0.0, f64::max);
            let large = vals.iter().map(|v| v[k]).fold(0.0, f64::max);
            SampledSup::new(
                &format!("{} (b={b}, c={c})", names[k]),
                (cfg.samples, small),
                (n_large, large),
                Some(bounds[k]),
                cfg.stability_tol,
            )
        })
        .collect()
}

/// `q_+-(x,y,s) / 4 <= q_+-(z,y,s) <= 4 q_+-(x,y,s)` when `|x-y| > 2|x-z|`,
/// and the mirrored statement in `y`.
pub fn lemma210_exact(cfg: &SampleConfig) -> Vec<InequalityCount> {
    let n = cfg.samples;
    let vals = sampled(cfg, 4, n, |rng| {
        let d = rng.random_range(1..=3);
        let (x, y, s) = (coords(rng, cfg, d), coords(rng, cfg, d), s_vec(rng, d));
        let on_x = rng.random::<bool>();
        let (base, other) = if on_x { (&x, &y) } else { (&y, &x) };
        let z = near_point(rng, base, other);
        let p = |v: &[f64]| PointRd::new(v.to_vec()).expect("positive");
        let q0 = q_forms(&p(&x), &p(&y), &s).expect("admissible");
        let q1 = if on_x {
            q_forms(&p(&z), &p(&y), &s)
        } else {
            q_forms(&p(&x), &p(&z), &s)
        }
        .expect("admissible");
        let scale: f64 = x.iter().chain(&y).chain(&z).map(|v| v * v).sum::<f64>() * ULPS;
        let mut worst = 0.0f64;
        let mut bad = false;
        for (a, b) in [(q0.q_plus, q1.q_plus), (q0.q_minus, q1.q_minus)] {
            worst = worst.max(a / (4.0 * b)).max(b / (4.0 * a));
            bad |= a > 4.0 * b + scale || b > 4.0 * a + scale;
        }
        (worst, bad)
    });
    vec![count("q_comparable_near_point", n, vals.into_iter())]
}

/// A point `z` in `R_+^d` with `|base - z| < |base - other| / 2`. Half the
/// draws push `z` toward the edge of that ball along the `base`-`other` axis,
/// where the comparison constants are attained.
fn near_point(rng: &mut ChaCha8Rng, base: &[f64], other: &[f64]) -> Vec<f64> {
    let r: f64 = base.iter().zip(other).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let edge = rng.random::<bool>();
    loop {
        let mut dir: Vec<f64> = (0..base.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        if edge {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let spread = log_uniform(rng, 1e-4, 1.0);
            for (k, u) in dir.iter_mut().enumerate() {
                *u = sign * (other[k] - base[k]) / r + spread * *u;
            }
        }
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 1e-3 && (edge || norm <= 1.0)) {
            continue;
        }
        let u = rng.random::<f64>();
        let rho = 0.5 * r * if edge { 1.0 - u * u * u } else { u };
        let z: Vec<f64> = base.iter().zip(&dir).map(|(b, u)| b + rho * u / norm).collect();
        if z.iter().all(|v| *v > 0.0) && 2.0 * rho < r {
            return z;
        }
    }
}

/// `|z-y| mu(B(z,|z-y|)) / (|x-y| mu(B(x,|x-y|)))`.
pub fn lemma211_ratio(alpha: &AlphaIndex, x: &PointRd, y: &PointRd, z: &PointRd) -> Result<f64> {
    let (rx, rz) = (x.dist(y), z.dist(y));
    let mx = ball_measure(alpha, &BallSpec::new(x.clone(), rx)?, 1e-6)?;
    let mz = ball_measure(alpha, &BallSpec::new(z.clone(), rz)?, 1e-6)?;
    Ok(rz * mz / (rx * mx))
}

/// Sampled sups of `|z-y| mu(B(z,|z-y|)) / (|x-y| mu(B(x,|x-y|)))` and of its
/// reciprocal over `|x - y| > 2 |x - z|`; both stay bounded.
// params: ln x, ln y, logit(2 |z - x| / |x - y|), direction of z - x
fn ball_config(p: &[f64], d: usize) -> Option<[Vec<f64>; 3]> {
    let x: Vec<f64> = p[..d].iter().map(|v| v.exp()).collect();
    let y: Vec<f64> = p[d..2 * d].iter().map(|v| v.exp()).collect();
    let r = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let rho = 0.5 * r / (1.0 + (-p[2 * d]).exp());
    let dir = if d == 1 { vec![p[2 * d + 1].signum()] } else { vec![p[2 * d + 1].cos(), p[2 * d + 1].sin()] };
    let z: Vec<f64> = x.iter().zip(&dir).map(|(a, u)| a + rho * u).collect();
    (r > 0.0 && z.iter().all(|v| *v > 0.0)).then_some([x, y, z])
}

fn ball_params(v: &[Vec<f64>; 3]) -> Vec<f64> {
    let [x, y, z] = v;
    let d = x.len();
    let r = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let w: Vec<f64> = z.iter().zip(x).map(|(a, b)| a - b).collect();
    let rho = w.iter().map(|t| t * t).sum::<f64>().sqrt();
    let q = (2.0 * rho / r).clamp(1e-12, 1.0 - 1e-12);
    let mut p: Vec<f64> = x.iter().chain(y).map(|t| t.ln()).collect();
    p.push((q / (1.0 - q)).ln());
    p.push(if d == 1 { w[0].signum() } else { w[1].atan2(w[0]) });
    p
}

// compass search in the ball_config parametrization
fn refine_ball_ratio(alpha: &AlphaIndex, start: &[Vec<f64>; 3], inverse: bool) -> f64 {
    let d = alpha.dim();
    let eval = |p: &[f64]| -> f64 {
        let Some([x, y, z]) = ball_config(p, d) else {
            return f64::NEG_INFINITY;
        };
        match (PointRd::new(x), PointRd::new(y), PointRd::new(z)) {
            (Ok(x), Ok(y), Ok(z)) => match lemma211_ratio(alpha, &x, &y, &z) {
                Ok(r) if r > 0.0 && r.is_finite() => if inverse { -r.ln() } else { r.ln() },
                _ => f64::NEG_INFINITY,
            },
            _ => f64::NEG_INFINITY,
        }
    };
    let mut cur = ball_params(start);
    let mut best = eval(&cur);
    let free = if d == 1 { cur.len() - 1 } else { cur.len() };
    let mut h = 1.0;
    while h > 1e-3 {
        let mut moved = false;
        for j in 0..free {
            for sign in [1.0f64, -1.0] {
                let mut trial = cur.clone();
                trial[j] += sign * h;
                let v = eval(&trial);
                if v > best {
                    best = v;
                    cur = trial;
                    moved = true;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    best.exp()
}

const REFINE_STARTS: usize = 16;

/// Sampled sups of the ball ratio and its inverse with `|x - y| = 1` (the
/// ratio is dilation invariant). Each sup is the larger of the raw sample
/// maximum and a local compass-search refinement of the best `REFINE_STARTS`
/// samples in the same prefix.
pub fn lemma211_sups(alpha: &AlphaIndex, cfg: &SampleConfig) -> Result<Vec<SampledSup>> {
    let d = alpha.dim();
    let n_large = cfg.samples * cfg.growth;
    let vals = sampled(cfg, 5, n_large, |rng| -> Result<(f64, [Vec<f64>; 3])> {
        let (x, y) = loop {
            let x = coords(rng, cfg, d);
            let dir: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > 1e-3 && norm <= 1.0) {
                continue;
            }
            let y: Vec<f64> = x.iter().zip(&dir).map(|(a, u)| a + u / norm).collect();
            if y.iter().all(|v| *v > 0.0) {
                break (x, y);
            }
        };
        let z = near_point(rng, &x, &y);
        let r = lemma211_ratio(alpha, &PointRd::new(x.clone())?, &PointRd::new(y.clone())?, &PointRd::new(z.clone())?)?;
        Ok((r, [x, y, z]))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let sup = |inverse: bool, n: usize| {
        let key = |r: f64| if inverse { 1.0 / r } else { r };
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|a, b| key(vals[*b].0).total_cmp(&key(vals[*a].0)));
        let raw = idx.first().map_or(0.0, |i| key(vals[*i].0));
        idx.iter()
            .take(REFINE_STARTS)
            .map(|i| refine_ball_ratio(alpha, &vals[*i].1, inverse))
            .fold(raw, f64::max)
    };
    Ok(["near_point_ratio", "near_point_ratio_inverse"]
        .iter()
        .enumerate()
        .map(|(k, name)| {
            SampledSup::new(
                &format!("{name} alpha={:?}", alpha.components()),
                (cfg.samples, sup(k == 1, cfg.samples)),
                (n_large, sup(k == 1, n_large)),
                None,
                cfg.stability_tol,
            )
        })
        .collect())
}

/// All pointwise checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointwiseReport {
    pub config: SampleConfig,
    pub exact: Vec<InequalityCount>,
    pub sups: Vec<SampledSup>,
    pub passed: bool,
}

/// `(b, c)` pairs at which the `Exp` bounds are sampled.
pub const EXP_BOUND_PARAMS: [(f64, f64); 3] = [(1.0, 0.25), (2.0, 1.0 / 6.0), (0.5, 1.0 / 64.0)];

/// Lemma-style pointwise suite: exact inequalities on `cfg.samples` samples,
/// bounded ratios on `cfg.samples` and `growth` times as many; the ball ratio
/// uses `ball_samples` for each `alpha`.
pub fn pointwise_suite(cfg: &SampleConfig, alphas: &[AlphaIndex], ball_samples: usize) -> Result<PointwiseReport> {
    let mut exact = lemma27_exact(cfg);
    exact.extend(lemma210_exact(cfg));
    let mut sups = vec![];
    for (b, c) in EXP_BOUND_PARAMS {
        sups.extend(lemma27_sups(cfg, b, c));
    }
    let ball_cfg = SampleConfig {
        samples: ball_samples,
        ..cfg.clone()
    };
    for alpha in alphas {
        sups.extend(lemma211_sups(alpha, &ball_cfg)?);
    }
    let passed = exact.iter().all(InequalityCount::passed) && sups.iter().all(|s| s.stable);
    Ok(PointwiseReport {
        config: cfg.clone(),
        exact,
        sups,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SampleConfig {
        SampleConfig {
            samples: 2_000,
            ..SampleConfig::default()
        }
    }

    #[test]
    fn exact_inequalities_hold() {
        for c in lemma27_exact(&small()) {
            assert!(c.passed(), "{c:?}");
            assert!(c.worst <= 1.0 + 1e-9 && c.worst > 0.5, "{c:?}");
        }
        for c in lemma210_exact(&small()) {
            assert!(c.passed(), "{c:?}");
            assert!(c.worst <= 1.0, "{c:?}");
        }
    }

    #[test]
    fn prefix_property() {
        let cfg = SampleConfig {
            samples: 25_000,
            ..SampleConfig::default()
        };
        let a = sampled(&cfg, 9, 12_000, |rng| rng.random::<u64>());
        let b = sampled(&cfg, 9, 25_000, |rng| rng.random::<u64>());
        assert_eq!(a[..], b[..12_000]);
        assert_ne!(a[0], a[CHUNK]);
    }

    #[test]
    fn exp_bounds_below_closed_form() {
        for s in lemma27_sups(&small(), 1.0, 0.25) {
            assert!(s.sup_large <= s.bound.unwrap(), "{s:?}");
            assert!(s.sup > 0.0);
        }
    }

    #[test]
    fn near_point_is_near() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let z = near_point(&mut rng, &[0.01, 2.0], &[0.3, 2.5]);
            let r = ((0.01f64 - 0.3).powi(2) + 0.25).sqrt();
            let rz = ((0.01 - z[0]).powi(2) + (2.0 - z[1]).powi(2)).sqrt();
            assert!(2.0 * rz < r && z[0] > 0.0);
        }
    }

    #[test]
    fn ball_ratio_is_dilation_invariant() {
        let al = AlphaIndex::new(vec![-0.9, 1.5]).unwrap();
        let p = |v: [f64; 2], k: f64| PointRd::new(vec![v[0] * k, v[1] * k]).unwrap();
        let (x, y, z) = ([0.3, 1.2], [1.1, 0.4], [0.5, 1.0]);
        let a = lemma211_ratio(&al, &p(x, 1.0), &p(y, 1.0), &p(z, 1.0)).unwrap();
        let b = lemma211_ratio(&al, &p(x, 7.5), &p(y, 7.5), &p(z, 7.5)).unwrap();
        approx::assert_relative_eq!(a, b, max_relative = 1e-5);
    }

    #[test]
    fn ball_ratio_finite() {
        let cfg = SampleConfig {
            samples: 200,
            ..SampleConfig::default()
        };
        for s in lemma211_sups(&AlphaIndex::new(vec![-0.9]).unwrap(), &cfg).unwrap() {
            assert!(s.sup.is_finite() && s.sup > 0.0, "{s:?}");
        }
    }
}
