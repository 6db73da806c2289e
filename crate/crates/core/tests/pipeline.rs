use laguerre_cz::harness::{run_sweep, Bump, FamilyConfig, GridConfig, PairGrid, SweepConfig};
use laguerre_cz::kernels::heat_kernel_closed;
use laguerre_cz::operators::{heat_apply, interval_projection_rules, project};
use laguerre_cz::verify::{run_verify, VerifyOptions};
use laguerre_cz::{AlphaIndex, MultiIndex, PointRd};

fn pt(v: &[f64]) -> PointRd {
    PointRd::new(v.to_vec()).unwrap()
}

#[test]
fn heat_on_projection_matches_kernel_integral() {
    let alpha = AlphaIndex::new(vec![-0.6]).unwrap();
    let f = Bump::new(vec![3.0], 0.2).unwrap();
    let rules = interval_projection_rules(&f.support(), 40, 8).unwrap();
    let v = project(|x| f.eval(x), &alpha, 200, &rules).unwrap().vector;
    let t = 0.3;
    let w = heat_apply(&v, t).unwrap();
    for x in [0.4, 2.5, 3.3] {
        let x = pt(&[x]);
        let spectral = w.synthesize(&x, &MultiIndex::zero(1)).unwrap().re;
        let mut direct = 0.0;
        for (y, wy) in rules[0].iter() {
            let y1 = pt(&[y]);
            direct += wy * y.powf(2.0 * -0.6 + 1.0) * f.eval(&y1) * heat_kernel_closed(&alpha, t, &x, &y1).unwrap();
        }
        assert!((spectral - direct).abs() < 1e-9 * direct.abs().max(1e-3), "{spectral} vs {direct}");
    }
}

fn tiny_sweep() -> SweepConfig {
    SweepConfig {
        alpha_list: vec![vec![-0.7], vec![0.5, 1.0]],
        grid: GridConfig {
            coord_min: 0.5,
            coord_max: 2.0,
            points_per_axis: 3,
            depth: 2,
        },
        families: vec![FamilyConfig::HeatMax, FamilyConfig::Riesz { n: vec![1] }],
        ..SweepConfig::default()
    }
}

#[test]
fn sweep_is_deterministic_and_complete() {
    let c = tiny_sweep();
    let a = run_sweep(&c).unwrap();
    let b = run_sweep(&c).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.tables.len(), 4);
    assert!(a.failures.is_empty());
    let pairs: usize = [1, 2]
        .iter()
        .map(|&d| PairGrid::build(&c.grid, d, c.seed).unwrap().pairs.len())
        .sum();
    assert_eq!(a.rows.len(), (3 + 4) * pairs);
    assert!(a.tables.iter().all(|t| t.kinds.iter().all(|k| k.sup.is_finite() && k.sup > 0.0)));
}

#[test]
fn sweep_config_round_trips() {
    let c = SweepConfig::default();
    let text = serde_json::to_string(&c).unwrap();
    assert_eq!(SweepConfig::from_json(&text).unwrap(), c);
    let mut empty = c.clone();
    empty.families.clear();
    assert!(SweepConfig::from_json(&serde_json::to_string(&empty).unwrap()).is_err());
}

#[test]
fn verify_suite_passes_in_one_dimension() {
    let mut opts = VerifyOptions::new(AlphaIndex::new(vec![0.5]).unwrap());
    opts.triple_points = 60;
    opts.recurrence_samples = 2000;
    let r = run_verify(&opts);
    let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).collect();
    assert!(r.passed, "{failed:?}");
}
