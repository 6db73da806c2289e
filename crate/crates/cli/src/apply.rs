//! `apply`: an operator on a test function, tabulated on a grid.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use laguerre_cz::harness::{Bump, PsiConfig, SCHEMA_VERSION};
use laguerre_cz::kernels::NuMeasure;
use laguerre_cz::operators::{
    gfun_apply, heat_apply, interval_projection_rules, maximal_apply, multiplier_apply, project, riesz_apply,
    MultiplierSymbol, SpectralVector,
};
use laguerre_cz::quadrature::{t_weighted_grid, t_weighted_halfline};
use laguerre_cz::{AlphaIndex, Error, MultiIndex, PointRd};

use crate::{csv_string, emit, join, sci, to_json, Failure, Format, Outcome};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Heat,
    Maximal,
    Riesz,
    Gfun,
    LaplaceMult,
    StieltjesMult,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Input {
    Bump { center: Vec<f64>, width: f64 },
    Laguerre { k: Vec<usize> },
    /// Coefficients in the order of `MultiIndex::enumerate`.
    Coefficients {
        re: Vec<f64>,
        #[serde(default)]
        im: Option<Vec<f64>>,
    },
}

fn default_k_max() -> usize {
    32
}

fn default_panels() -> usize {
    40
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApplyConfig {
    schema_version: u32,
    alpha: Vec<f64>,
    #[serde(default = "default_k_max")]
    k_max: usize,
    input: Input,
    /// Output points.
    grid: Vec<Vec<f64>>,
    #[serde(default)]
    t: Option<f64>,
    #[serde(default)]
    n: Option<Vec<usize>>,
    #[serde(default)]
    m: Option<usize>,
    #[serde(default)]
    psi: Option<PsiConfig>,
    #[serde(default)]
    nu: Option<NuMeasure>,
    /// Gauss–Legendre panels per axis for projecting a bump.
    #[serde(default = "default_panels")]
    projection_panels: usize,
}

#[derive(Debug, Serialize)]
struct Row {
    x: Vec<f64>,
    input: f64,
    re: f64,
    im: f64,
    /// Kernel-side Riesz value, where `x` is off the bump's support.
    kernel_side: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ApplyOutput {
    op: Op,
    alpha: Vec<f64>,
    k_max: usize,
    /// Coefficient mass on the last shell of the input.
    tail: f64,
    rows: Vec<Row>,
}

fn usage(m: impl Into<String>) -> Failure {
    Failure::Usage(m.into())
}

fn pad(n: &[usize], d: usize) -> Result<MultiIndex, Failure> {
    if n.len() > d {
        return Err(usage(format!("multi-index {n:?} is longer than the dimension {d}")));
    }
    let mut v = n.to_vec();
    v.resize(d, 0);
    Ok(MultiIndex::new(v))
}

fn input_vector(c: &ApplyConfig, alpha: &AlphaIndex) -> Result<(SpectralVector, Option<Bump>), Failure> {
    let d = alpha.dim();
    match &c.input {
        Input::Bump { center, width } => {
            let b = Bump::new(center.clone(), *width)?;
            alpha.check_dim(center.len())?;
            let rules = interval_projection_rules(&b.support(), c.projection_panels, 8)?;
            let v = project(|x| b.eval(x), alpha, c.k_max, &rules)?.vector;
            Ok((v, Some(b)))
        }
        Input::Laguerre { k } => {
            let k = pad(k, d)?;
            if k.length() > c.k_max {
                return Err(usage(format!("|k| = {} exceeds k_max = {}", k.length(), c.k_max)));
            }
            Ok((SpectralVector::unit(alpha.clone(), c.k_max, &k)?, None))
        }
        Input::Coefficients { re, im } => {
            let im = im.clone().unwrap_or_else(|| vec![0.0; re.len()]);
            if im.len() != re.len() {
                return Err(usage("re and im coefficient lists differ in length"));
            }
            let coeffs = re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect();
            Ok((SpectralVector::new(alpha.clone(), c.k_max, coeffs)?, None))
        }
    }
}

pub fn cmd_apply(op: Op, path: &Path, out: Option<&Path>, format: Option<Format>) -> Outcome {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let c: ApplyConfig = serde_json::from_str(&text).map_err(|e| usage(e.to_string()))?;
    if c.schema_version != SCHEMA_VERSION {
        return Err(usage(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            c.schema_version
        )));
    }
    let alpha = AlphaIndex::new(c.alpha.clone())?;
    let d = alpha.dim();
    let grid: Vec<PointRd> = c
        .grid
        .iter()
        .map(|p| {
            alpha.check_dim(p.len())?;
            PointRd::new(p.clone())
        })
        .collect::<Result<_, Error>>()?;
    let (v, bump) = input_vector(&c, &alpha)?;
    let zero = MultiIndex::zero(d);
    let need = |name: &str| usage(format!("operator {op:?} needs \"{name}\" in the config"));

    let mut rows = Vec::with_capacity(grid.len());
    let input_at = |x: &PointRd| -> Result<f64, Failure> { Ok(v.synthesize(x, &zero)?.re) };
    match op {
        Op::Heat | Op::LaplaceMult | Op::StieltjesMult => {
            let w = match op {
                Op::Heat => heat_apply(&v, c.t.ok_or_else(|| need("t"))?)?,
                Op::LaplaceMult => {
                    multiplier_apply(&v, &MultiplierSymbol::Laplace(c.psi.as_ref().ok_or_else(|| need("psi"))?.build()))?
                }
                _ => multiplier_apply(&v, &MultiplierSymbol::Stieltjes(c.nu.clone().ok_or_else(|| need("nu"))?))?,
            };
            for x in &grid {
                let z = w.synthesize(x, &zero)?;
                rows.push(Row { x: x.coords().to_vec(), input: input_at(x)?, re: z.re, im: z.im, kernel_side: None });
            }
        }
        Op::Maximal => {
            let tg = t_weighted_grid(1.0, 1e-4, 40.0 / alpha.ground_eigenvalue(), 64)?;
            for x in &grid {
                let m = maximal_apply(&v, x, &tg)?;
                rows.push(Row { x: x.coords().to_vec(), input: input_at(x)?, re: m, im: 0.0, kernel_side: None });
            }
        }
        Op::Riesz => {
            let n = pad(c.n.as_ref().ok_or_else(|| need("n"))?, d)?;
            for x in &grid {
                let z = riesz_apply(&v, &n, x)?;
                let kernel_side = match &bump {
                    Some(b) => b.riesz_kernel_side(&alpha, &n, x, 8)?,
                    None => None,
                };
                rows.push(Row { x: x.coords().to_vec(), input: input_at(x)?, re: z.re, im: z.im, kernel_side });
            }
        }
        Op::Gfun => {
            let n = pad(c.n.as_deref().unwrap_or(&[]), d)?;
            let m = c.m.ok_or_else(|| need("m"))?;
            let w = (n.length() + 2 * m) as f64;
            if w == 0.0 {
                return Err(usage("gfun needs |n| + m > 0"));
            }
            let rule = t_weighted_halfline(w, 1e-8, 60.0 / alpha.ground_eigenvalue(), 200)?;
            for x in &grid {
                let g = gfun_apply(&v, &n, m, x, &rule)?;
                rows.push(Row { x: x.coords().to_vec(), input: input_at(x)?, re: g, im: 0.0, kernel_side: None });
            }
        }
    }
    let output = ApplyOutput {
        op,
        alpha: c.alpha.clone(),
        k_max: c.k_max,
        tail: v.tail_indicator(),
        rows,
    };
    match format {
        Some(Format::Json) => emit(out, &to_json(&output)?)?,
        _ => emit(
            out,
            &csv_string(
                &["x", "input", "re", "im", "kernel_side", "tail"],
                output.rows.iter().map(|r| {
                    vec![
                        join(&r.x),
                        sci(r.input),
                        sci(r.re),
                        sci(r.im),
                        r.kernel_side.map(sci).unwrap_or_default(),
                        sci(output.tail),
                    ]
                }),
            )?,
        )?,
    }
    Ok(true)
}
