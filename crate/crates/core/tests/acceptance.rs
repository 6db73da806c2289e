//! Acceptance criteria 1–11, one PASS/FAIL line each. Failures are reported,
//! not fatal; set `ACCEPTANCE_STRICT=1` to turn any FAIL into exit code 1.

use std::time::Instant;

use laguerre_cz::harness::{
    duality_suite, heat_assembly_check, lemma21_check, lemma23_check, lemma28_check, lemma28_ratio, lemma29_check,
    lemma_grid, pointwise_suite, run_sweep, DualitySettings, Lemma21Params, Lemma29Params, SampleConfig, SweepConfig,
};
use laguerre_cz::kernels::KernelSpec;
use laguerre_cz::verify::{
    chapman_kolmogorov, eigen_equation, faa_di_bruno_fd, multiplier_degeneracies, orthonormality, partition_counts,
    recurrence_check, representation_alphas, schlafli_identity, subordination, triple_agreement, CheckResult,
};
use laguerre_cz::special_fn::bessel_i_scaled;
use laguerre_cz::{AlphaIndex, Result};

struct Outcome {
    passed: bool,
    detail: String,
}

fn sweep_alphas() -> Vec<AlphaIndex> {
    SweepConfig::default()
        .alpha_list
        .into_iter()
        .map(|a| AlphaIndex::new(a).unwrap())
        .collect()
}

fn all(checks: &[CheckResult]) -> Outcome {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} {:.3e} > {:.1e} ({})", c.name, c.achieved, c.tolerance, c.detail))
        .collect();
    let worst = checks
        .iter()
        .map(|c| c.achieved / c.tolerance.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Outcome {
        passed: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{} checks, worst achieved/tol {:.2e}", checks.len(), worst)
        } else {
            failed.join("; ")
        },
    }
}

fn criterion1() -> Result<Outcome> {
    let alphas = representation_alphas();
    let strict = triple_agreement(&alphas, 32, 1, 100, 64, None)?;
    let resolvable = triple_agreement(&alphas, 32, 1, 100, 64, Some(1e-6))?;
    let passed = strict.points >= 500 && strict.worst() <= 1e-6;
    Ok(Outcome {
        passed,
        detail: format!(
            "{} points, K = 100, 64 nodes: closed/schlafli {:.2e}, closed/spectral {:.2e}, spectral/schlafli {:.2e}; \
             worst spectral point {:?} has condition {:.2e}; on the {} points where the truncated series is \
             resolvable in double precision the worst spectral error is {:.2e}",
            strict.points,
            strict.closed_vs_schlafli,
            strict.closed_vs_spectral,
            strict.spectral_vs_schlafli,
            strict.worst_spectral_point,
            strict.worst_spectral_condition,
            resolvable.spectral_compared,
            resolvable.closed_vs_spectral.max(resolvable.spectral_vs_schlafli),
        ),
    })
}

fn criterion2() -> Result<Outcome> {
    Ok(all(&[schlafli_identity(80, 1e-9)?]))
}

fn criterion3() -> Result<Outcome> {
    Ok(all(&[recurrence_check(10_000, 3, &bessel_i_scaled, 1e-10)?]))
}

fn criterion4() -> Result<Outcome> {
    let mut checks = vec![];
    for a in representation_alphas() {
        checks.push(orthonormality(&a, 6, 1e-7)?);
        checks.push(eigen_equation(&a, 6, 1e-4)?);
    }
    Ok(all(&checks))
}

fn criterion5() -> Result<Outcome> {
    let mut checks = vec![];
    for a in [-0.9, -0.5, 0.0, 2.5] {
        checks.push(chapman_kolmogorov(a, 1e-6)?);
    }
    for a in representation_alphas() {
        checks.push(subordination(&a, 1e-6)?);
    }
    Ok(all(&checks))
}

fn criterion6() -> Result<Outcome> {
    let mut checks = vec![];
    for a in representation_alphas() {
        checks.extend(multiplier_degeneracies(&a, (1e-10, 1e-8))?);
    }
    Ok(all(&checks))
}

fn criterion7() -> Result<Outcome> {
    let start = Instant::now();
    let r = run_sweep(&SweepConfig::default())?;
    let secs = start.elapsed().as_secs_f64();
    let unstable: Vec<String> = r
        .tables
        .iter()
        .filter(|t| !t.stable)
        .map(|t| format!("{} {:?}", t.family, t.alpha))
        .collect();
    let worst = r
        .tables
        .iter()
        .flat_map(|t| t.kinds.iter())
        .filter_map(|k| k.refinement_deltas.last().copied())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Outcome {
        passed: r.all_stable && r.failures.is_empty() && r.tables.len() == 25 && secs < 600.0,
        detail: format!(
            "{} tables, {} point failures, worst last-shell delta {:+.2}%, unstable {:?}, {:.0} s",
            r.tables.len(),
            r.failures.len(),
            100.0 * worst,
            unstable,
            secs
        ),
    })
}

fn criterion8() -> Result<Outcome> {
    let tol = 0.1;
    let mut bad = vec![];
    let mut reports = 0;
    for alpha in sweep_alphas() {
        let grid = lemma_grid(alpha.dim(), 7)?;
        for p in Lemma21Params::defaults(&alpha) {
            let r = lemma21_check(&alpha, &p, &grid, tol)?;
            reports += 2;
            if !(r.first.stable && r.second.stable && r.dominated) {
                bad.push(format!("lemma21 {}", r.first.parameters));
            }
        }
        for p in Lemma29Params::defaults(alpha.dim()) {
            let r = lemma29_check(&alpha, &p, &grid, tol)?;
            reports += 1;
            if !r.stable {
                bad.push(format!("lemma29 {} ({:?})", r.parameters, r.refinement_deltas));
            }
        }
        let assembled = heat_assembly_check(&alpha, &grid, tol)?;
        let heat_max = KernelSpec::heat_max();
        let mut growth: f64 = 0.0;
        for g in &grid.pairs {
            growth = growth.max(laguerre_cz::harness::growth_ratio(&heat_max, &alpha, &g.x, &g.y)?);
        }
        let gap = (assembled.sup / growth - 1.0).abs();
        reports += 1;
        if !(assembled.stable && gap <= 0.2) {
            bad.push(format!("heat assembly {:?}: sup {:.4e} vs growth {:.4e}", alpha.components(), assembled.sup, growth));
        }
    }
    for (a, b, l) in [(-0.5, 0.0, 1.0), (0.5, 0.7, 1.0), (0.0, 0.5, 0.5), (2.5, 1.0, 2.0), (-0.4, 0.0, 0.25)] {
        let r = lemma23_check(a, b, l, 3, tol)?;
        reports += 1;
        if !r.stable {
            bad.push(format!("lemma23 {}", r.parameters));
        }
    }
    for (a, b, m) in [(2.0, 1.0, 0.0), (3.0, 2.0, 2.0), (1.5, 0.5, 1.0), (4.0, 0.3, 3.0)] {
        let r = lemma28_check(a, b, m, 3, tol)?;
        reports += 1;
        if !(r.report.stable && r.monotone_tail) {
            bad.push(format!("lemma28 {}", r.report.parameters));
        }
    }
    let mut closed: f64 = 0.0;
    for j in 0..=48 {
        let t = 10f64.powf(-3.0 + j as f64 / 8.0);
        closed = closed.max((lemma28_ratio(2.0, 1.0, 0.0, t)? / (-t).exp() - 1.0).abs());
    }
    if closed > 1e-8 {
        bad.push(format!("lemma28 closed case off by {closed:.2e}"));
    }
    Ok(Outcome {
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{reports} reports stable; closed case within {closed:.1e} of e^-T")
        } else {
            bad.join("; ")
        },
    })
}

fn criterion9() -> Result<Outcome> {
    let pairing: Vec<AlphaIndex> = [-0.9, -0.5, 0.0, 0.5, 2.5]
        .iter()
        .map(|&a| AlphaIndex::new(vec![a]).unwrap())
        .collect();
    let r = duality_suite(&pairing, &sweep_alphas(), &DualitySettings::default(), 0.05)?;
    let worst_pair = r.checks.iter().map(|c| c.rel_err).fold(0.0, f64::max);
    let worst_step = r.norms.iter().flat_map(|n| n.successive.iter().copied()).fold(0.0, f64::max);
    Ok(Outcome {
        passed: r.passed,
        detail: format!(
            "{} pairings, worst rel err {:.2e} (tol 1e-3); {} norm sequences over K = 8, 16, 32, worst step {:.2}% (tol 5%)",
            r.checks.len(),
            worst_pair,
            r.norms.len(),
            100.0 * worst_step
        ),
    })
}

fn criterion10() -> Result<Outcome> {
    Ok(all(&[partition_counts()?, faa_di_bruno_fd(400, 5, 1e-4)?]))
}

fn criterion11() -> Result<Outcome> {
    let r = pointwise_suite(&SampleConfig::default(), &sweep_alphas(), 100_000)?;
    let violations: usize = r.exact.iter().map(|c| c.violations).sum();
    let unstable: Vec<String> = r.sups.iter().filter(|s| !s.stable).map(|s| s.name.clone()).collect();
    let worst = r.sups.iter().map(|s| s.growth).fold(f64::NEG_INFINITY, f64::max);
    Ok(Outcome {
        passed: r.passed,
        detail: format!(
            "{} exact inequalities x {} samples, {} violations; {} sups, worst growth under 10x samples {:+.2}%, unstable {:?}",
            r.exact.len(),
            r.config.samples,
            violations,
            r.sups.len(),
            100.0 * worst,
            unstable
        ),
    })
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 11] = [
        ("heat kernel representations agree", criterion1),
        ("Schläfli identity", criterion2),
        ("Bessel recurrence", criterion3),
        ("orthonormality and eigen equation", criterion4),
        ("Chapman–Kolmogorov and subordination", criterion5),
        ("multiplier degeneracies", criterion6),
        ("standard-estimate sweep", criterion7),
        ("lemma checks", criterion8),
        ("Riesz duality and norm sequences", criterion9),
        ("Faà di Bruno", criterion10),
        ("pointwise inequality sampling", criterion11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f().unwrap_or_else(|e| Outcome {
            passed: false,
            detail: format!("error: {e}"),
        });
        if !o.passed {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {} [{:.1} s]: {}",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            name,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| v == "1") {
        std::process::exit(1);
    }
}
