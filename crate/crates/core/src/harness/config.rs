//! Sweep configuration and the point grids built from it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{AlphaIndex, MultiIndex, PointRd};
use crate::kernels::{Atom, ExpTail, KernelQuadrature, KernelSpec, NuMeasure, Psi};

/// Version of the JSON layout of configs and reports.
pub const SCHEMA_VERSION: u32 = 1;

/// Log-spaced cross-product grid plus near-diagonal shells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub coord_min: f64,
    pub coord_max: f64,
    pub points_per_axis: usize,
    /// Shells `|x - y| = 10^{-k}` for `k = 1..=depth`.
    pub depth: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            coord_min: 0.1,
            coord_max: 3.0,
            points_per_axis: 6,
            depth: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PsiConfig {
    Constant { value: f64 },
    ImaginaryPower { gamma: f64 },
}

impl PsiConfig {
    pub fn build(&self) -> Psi {
        match *self {
            PsiConfig::Constant { value } => Psi::constant(value),
            PsiConfig::ImaginaryPower { gamma } => Psi::imaginary_power(gamma),
        }
    }
}

/// A kernel family as written in a config. Multi-indices shorter than the
/// dimension are padded with zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    HeatMax,
    Riesz { n: Vec<usize> },
    SquareFn { n: Vec<usize>, m: usize },
    LaplaceMult { psi: PsiConfig },
    StieltjesMult { nu: NuMeasure },
}

fn pad(n: &[usize], d: usize) -> Result<MultiIndex> {
    if n.len() > d {
        return Err(Error::Config(format!(
            "multi-index {n:?} is longer than the dimension {d}"
        )));
    }
    let mut v = n.to_vec();
    v.resize(d, 0);
    Ok(MultiIndex::new(v))
}

impl FamilyConfig {
    pub fn build(&self, d: usize) -> Result<KernelSpec> {
        match self {
            FamilyConfig::HeatMax => Ok(KernelSpec::heat_max()),
            FamilyConfig::Riesz { n } => KernelSpec::riesz(pad(n, d)?),
            FamilyConfig::SquareFn { n, m } => KernelSpec::square_fn(pad(n, d)?, *m),
            FamilyConfig::LaplaceMult { psi } => Ok(KernelSpec::laplace(psi.build())),
            FamilyConfig::StieltjesMult { nu } => KernelSpec::stieltjes(nu.clone()),
        }
    }

    /// The five default families.
    pub fn defaults() -> Vec<FamilyConfig> {
        let one = num_complex::Complex64::new(1.0, 0.0);
        vec![
            FamilyConfig::HeatMax,
            FamilyConfig::Riesz { n: vec![1] },
            FamilyConfig::SquareFn { n: vec![], m: 1 },
            FamilyConfig::LaplaceMult {
                psi: PsiConfig::ImaginaryPower { gamma: 1.0 },
            },
            FamilyConfig::StieltjesMult {
                nu: NuMeasure {
                    atoms: vec![Atom { t: 0.05, weight: one * 0.5 }],
                    density: None,
                    tail: Some(ExpTail {
                        start: 0.01,
                        coef: one,
                        rate: -1.0,
                    }),
                },
            },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed relative growth of a sup per refinement level.
    pub refinement_growth: f64,
    /// Allowed relative change of a smoothness ratio between the two
    /// smallest offsets.
    pub linearity: f64,
    /// Relative tolerance of ball measures.
    pub ball_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            refinement_growth: 0.10,
            linearity: 0.20,
            ball_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema_version: u32,
    pub alpha_list: Vec<Vec<f64>>,
    #[serde(default)]
    pub grid: GridConfig,
    pub families: Vec<FamilyConfig>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub quadrature: KernelQuadrature,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            alpha_list: vec![vec![-0.9], vec![-0.5], vec![0.0], vec![2.5], vec![-0.9, 1.5]],
            grid: GridConfig::default(),
            families: FamilyConfig::defaults(),
            seed: 7,
            tolerances: Tolerances::default(),
            quadrature: KernelQuadrature::default(),
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.families.is_empty() {
            return Err(Error::Config("the family list is empty".into()));
        }
        if self.alpha_list.is_empty() {
            return Err(Error::Config("the alpha list is empty".into()));
        }
        for a in &self.alpha_list {
            AlphaIndex::new(a.clone())?;
        }
        let g = &self.grid;
        if !(g.coord_min > 0.0 && g.coord_max > g.coord_min && g.coord_max.is_finite()) {
            return Err(Error::Config(format!(
                "grid range [{}, {}] must satisfy 0 < min < max",
                g.coord_min, g.coord_max
            )));
        }
        if g.points_per_axis < 2 {
            return Err(Error::Config("the grid needs at least two points per axis".into()));
        }
        let q = &self.quadrature;
        if !(q.panels_per_unit > 0.0 && q.sup_points >= 3) {
            return Err(Error::Config(format!("quadrature settings {q:?} are invalid")));
        }
        Ok(())
    }

    pub fn alphas(&self) -> Result<Vec<AlphaIndex>> {
        self.alpha_list.iter().map(|a| AlphaIndex::new(a.clone())).collect()
    }
}

/// One `(x, y)` pair. Level 0 is the base grid, level `k` the shell
/// `|x - y| = 10^{-k}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPair {
    pub x: PointRd,
    pub y: PointRd,
    pub level: usize,
}

/// The base cross-product grid and its near-diagonal shells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairGrid {
    pub pairs: Vec<GridPair>,
    pub depth: usize,
}

fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn cartesian(axis: &[f64], d: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// Unit ray directions: `+-e_1` in one dimension, otherwise three directions
/// spread over the circle in the first two coordinates, rotated by a seeded
/// angle.
pub fn ray_directions(d: usize, seed: u64) -> Vec<Vec<f64>> {
    if d == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    (0..3)
        .map(|k| {
            let th = phase + k as f64 * std::f64::consts::TAU / 3.0;
            let mut v = vec![0.0; d];
            v[0] = th.cos();
            v[1] = th.sin();
            v
        })
        .collect()
}

impl PairGrid {
    /// All ordered pairs `x != y` of the base grid, then for every base point
    /// and ray the shell points `y` whose coordinates all exceed the radius.
    pub fn build(grid: &GridConfig, d: usize, seed: u64) -> Result<Self> {
        let axis = log_points(grid.coord_min, grid.coord_max, grid.points_per_axis);
        let points = cartesian(&axis, d)
            .into_iter()
            .map(PointRd::new)
            .collect::<Result<Vec<_>>>()?;
        let mut pairs = Vec::new();
        for x in &points {
            for y in &points {
                if x != y {
                    pairs.push(GridPair {
                        x: x.clone(),
                        y: y.clone(),
                        level: 0,
                    });
                }
            }
        }
        let rays = ray_directions(d, seed);
        for level in 1..=grid.depth {
            let r = 10f64.powi(-(level as i32));
            for x in &points {
                for e in &rays {
                    let Ok(y) = x.offset(e, r) else { continue };
                    if y.coords().iter().all(|c| *c > r) {
                        pairs.push(GridPair {
                            x: x.clone(),
                            y,
                            level,
                        });
                    }
                }
            }
        }
        Ok(Self {
            pairs,
            depth: grid.depth,
        })
    }
}
