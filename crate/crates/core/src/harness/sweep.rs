//! Standard-estimate sweeps over families, `alpha` and the pair grid.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{PairGrid, SweepConfig, SCHEMA_VERSION};
use super::ratios::{ball_at, gradient_ratio_with, growth_ratio_with, smoothness_ratio_x, smoothness_ratio_y};
use crate::error::Result;
use crate::index::{AlphaIndex, PointRd};
use crate::kernels::{KernelQuadrature, KernelSpec};

/// Offsets `|x - x'| / |x - y|` at which smoothness is sampled.
pub const SMOOTHNESS_OFFSETS: [f64; 3] = [1e-1, 1e-2, 1e-3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioKind {
    Growth,
    SmoothnessX,
    SmoothnessY,
    Gradient,
}

impl RatioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RatioKind::Growth => "growth",
            RatioKind::SmoothnessX => "smoothness_x",
            RatioKind::SmoothnessY => "smoothness_y",
            RatioKind::Gradient => "gradient",
        }
    }

    /// Kinds reported for a family.
    pub fn for_spec(spec: &KernelSpec) -> Vec<RatioKind> {
        let mut k = vec![RatioKind::Growth, RatioKind::SmoothnessX, RatioKind::SmoothnessY];
        if spec.is_scalar() {
            k.push(RatioKind::Gradient);
        }
        k
    }
}

/// Ratios at one grid pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRatios {
    pub x: PointRd,
    pub y: PointRd,
    pub level: usize,
    /// `(kind, value)`; smoothness values are maxima over the offsets.
    pub values: Vec<(RatioKind, f64)>,
    /// Largest relative increase of a smoothness ratio at the smallest offset
    /// over its maximum at the coarser offsets; zero when the differences
    /// vanish linearly or faster.
    pub linearity_defect: f64,
}

// x' = x + c r e with e = (x - y) / r, or toward y when that leaves R_+^d
fn offset_point(from: &PointRd, away: &PointRd, h: f64) -> Result<PointRd> {
    let r = from.dist(away);
    let e: Vec<f64> = from.coords().iter().zip(away.coords()).map(|(a, b)| (a - b) / r).collect();
    from.offset(&e, h).or_else(|_| from.offset(&e, -h))
}

// growth of the ratio at the smallest offset over the largest one at the
// coarser offsets; bounded difference quotients give zero
fn linearity(values: &[f64]) -> f64 {
    let (last, coarse) = values.split_last().expect("offsets");
    let a = coarse.iter().copied().fold(0.0, f64::max);
    if a.max(*last) < 1e-12 {
        0.0
    } else {
        (last / a - 1.0).max(0.0)
    }
}

/// Growth, smoothness on both sides and (for scalar families) gradient at one
/// pair.
pub fn pair_ratios(
    spec: &KernelSpec,
    alpha: &AlphaIndex,
    x: &PointRd,
    y: &PointRd,
    level: usize,
    q: &KernelQuadrature,
    ball_tol: f64,
) -> Result<PairRatios> {
    let mu = ball_at(alpha, x, y, ball_tol)?;
    let r = x.dist(y);
    let growth = growth_ratio_with(spec, alpha, x, y, q, ball_tol)?;
    let mut sx = Vec::new();
    let mut sy = Vec::new();
    for c in SMOOTHNESS_OFFSETS {
        let x2 = offset_point(x, y, c * r)?;
        sx.push(smoothness_ratio_x(spec, alpha, x, &x2, y, q, mu)?);
        let y2 = offset_point(y, x, c * r)?;
        sy.push(smoothness_ratio_y(spec, alpha, x, y, &y2, q, mu)?);
    }
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let mut values = vec![
        (RatioKind::Growth, growth),
        (RatioKind::SmoothnessX, max(&sx)),
        (RatioKind::SmoothnessY, max(&sy)),
    ];
    if spec.is_scalar() {
        values.push((RatioKind::Gradient, gradient_ratio_with(spec, alpha, x, y, q, mu)?));
    }
    Ok(PairRatios {
        x: x.clone(),
        y: y.clone(),
        level,
        values,
        linearity_defect: linearity(&sx).max(linearity(&sy)),
    })
}

/// Sup of one ratio kind, per refinement depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KindSummary {
    pub kind: RatioKind,
    pub sup: f64,
    /// `sup_by_depth[k]`: sup over the base grid and shells `1..=k`.
    pub sup_by_depth: Vec<f64>,
    /// `sup_by_depth[k] / sup_by_depth[k - 1] - 1`.
    pub refinement_deltas: Vec<f64>,
    pub worst_x: Vec<f64>,
    pub worst_y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupTable {
    pub family: String,
    pub alpha: Vec<f64>,
    pub kinds: Vec<KindSummary>,
    pub linearity_defect: f64,
    pub failures: usize,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub family: String,
    pub alpha: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub message: String,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub family: String,
    pub alpha: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub kind: RatioKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub schema_version: u32,
    pub config: SweepConfig,
    pub tables: Vec<SupTable>,
    pub failures: Vec<PointFailure>,
    pub all_stable: bool,
    /// Wall time, only filled in on request so that reports stay
    /// reproducible byte for byte.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
    #[serde(skip)]
    pub rows: Vec<RatioRow>,
}

fn summarize(kind: RatioKind, results: &[PairRatios], depth: usize) -> KindSummary {
    let mut sup_by_depth = vec![0.0f64; depth + 1];
    let (mut sup, mut worst) = (f64::NEG_INFINITY, None);
    for r in results {
        let v = r.values.iter().find(|(k, _)| *k == kind).map_or(f64::NAN, |(_, v)| *v);
        for s in sup_by_depth.iter_mut().skip(r.level) {
            *s = if v.is_nan() { f64::NAN } else { s.max(v) };
        }
        if v > sup || v.is_nan() {
            sup = v;
            worst = Some(r);
        }
    }
    let refinement_deltas = sup_by_depth.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
    KindSummary {
        kind,
        sup: sup_by_depth[depth],
        sup_by_depth,
        refinement_deltas,
        worst_x: worst.map_or(vec![], |r| r.x.coords().to_vec()),
        worst_y: worst.map_or(vec![], |r| r.y.coords().to_vec()),
    }
}

/// Finite nonnegative sups at every depth, growing by less than `tol` when
/// the deepest shell is added. Earlier deltas are reported only.
fn stable(kinds: &[KindSummary], tol: f64) -> bool {
    kinds.iter().all(|k| {
        k.sup_by_depth.iter().all(|v| v.is_finite() && *v >= 0.0)
            && k.refinement_deltas.last().is_none_or(|d| *d < tol)
    })
}

/// Runs every family over every `alpha` on the configured grid. Evaluation
/// errors are recorded per pair and the sweep carries on.
pub fn run_sweep(config: &SweepConfig) -> Result<EstimateReport> {
    config.validate()?;
    let mut tables = Vec::new();
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    for family in &config.families {
        for alpha in config.alphas()? {
            let d = alpha.dim();
            let a = alpha.components().to_vec();
            let spec = match family.build(d) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(PointFailure {
                        family: format!("{family:?}"),
                        alpha: a.clone(),
                        x: vec![],
                        y: vec![],
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            let label = spec.label();
            let grid = PairGrid::build(&config.grid, d, config.seed)?;
            let outcomes: Vec<Result<PairRatios>> = grid
                .pairs
                .par_iter()
                .map(|p| {
                    pair_ratios(
                        &spec,
                        &alpha,
                        &p.x,
                        &p.y,
                        p.level,
                        &config.quadrature,
                        config.tolerances.ball_tol,
                    )
                })
                .collect();
            let mut ok = Vec::new();
            let mut n_fail = 0;
            for (p, o) in grid.pairs.iter().zip(outcomes) {
                match o {
                    Ok(r) => ok.push(r),
                    Err(e) => {
                        n_fail += 1;
                        failures.push(PointFailure {
                            family: label.clone(),
                            alpha: a.clone(),
                            x: p.x.coords().to_vec(),
                            y: p.y.coords().to_vec(),
                            message: e.to_string(),
                        });
                    }
                }
            }
            for r in &ok {
                for &(kind, value) in &r.values {
                    rows.push(RatioRow {
                        family: label.clone(),
                        alpha: a.clone(),
                        x: r.x.coords().to_vec(),
                        y: r.y.coords().to_vec(),
                        kind,
                        value,
                    });
                }
            }
            let kinds: Vec<KindSummary> = RatioKind::for_spec(&spec)
                .into_iter()
                .map(|k| summarize(k, &ok, grid.depth))
                .collect();
            let linearity_defect = ok.iter().map(|r| r.linearity_defect).fold(0.0, f64::max);
            let is_stable = n_fail == 0 && stable(&kinds, config.tolerances.refinement_growth);
            tables.push(SupTable {
                family: label,
                alpha: a,
                kinds,
                linearity_defect,
                failures: n_fail,
                stable: is_stable,
            });
        }
    }
    let all_stable = failures.is_empty() && tables.iter().all(|t| t.stable);
    Ok(EstimateReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        tables,
        failures,
        all_stable,
        runtime_seconds: None,
        rows,
    })
}

fn join(v: &[f64]) -> String {
    let mut s = String::new();
    for (i, c) in v.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{c:.16e}").expect("write to string");
    }
    s
}

impl EstimateReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per pair and ratio kind: `family,alpha,x,y,kind,value`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["family", "alpha", "x", "y", "kind", "value"])?;
        for r in &self.rows {
            w.write_record([
                r.family.clone(),
                join(&r.alpha),
                join(&r.x),
                join(&r.y),
                r.kind.as_str().to_string(),
                format!("{:.16e}", r.value),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{FamilyConfig, GridConfig};

    fn small() -> SweepConfig {
        SweepConfig {
            alpha_list: vec![vec![-0.9]],
            grid: GridConfig {
                points_per_axis: 3,
                depth: 2,
                ..GridConfig::default()
            },
            families: vec![FamilyConfig::HeatMax, FamilyConfig::Riesz { n: vec![1] }],
            ..SweepConfig::default()
        }
    }

    #[test]
    fn sweep_is_finite_and_rows_add_up() {
        let c = small();
        let rep = run_sweep(&c).unwrap();
        assert!(rep.failures.is_empty());
        assert_eq!(rep.tables.len(), 2);
        let pairs = PairGrid::build(&c.grid, 1, c.seed).unwrap().pairs.len();
        assert_eq!(rep.rows.len(), pairs * (3 + 4));
        for t in &rep.tables {
            for k in &t.kinds {
                assert!(k.sup.is_finite() && k.sup > 0.0, "{t:?}");
                assert_eq!(k.sup_by_depth.len(), 3);
            }
        }
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), rep.rows.len() + 1);
    }

    #[test]
    fn reports_are_reproducible() {
        let c = small();
        let a = run_sweep(&c).unwrap().to_json().unwrap();
        let b = run_sweep(&c).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn smoothness_vanishes_linearly() {
        let al = AlphaIndex::new(vec![0.0]).unwrap();
        let spec = KernelSpec::heat_max();
        let x = PointRd::new(vec![1.0]).unwrap();
        let y = PointRd::new(vec![1.3]).unwrap();
        let r = pair_ratios(&spec, &al, &x, &y, 0, &KernelQuadrature::default(), 1e-10).unwrap();
        assert!(r.linearity_defect < 0.05, "{}", r.linearity_defect);
    }
}
