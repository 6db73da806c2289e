//! Numerical surrogates for the standard estimates and for the quantitative
//! lemmas behind them: finite sups over fixed grids that stay put when the
//! grid is refined toward the diagonal.

mod config;
mod duality;
mod lemmas;
mod pointwise;
mod ratios;
mod sweep;

pub use config::{
    ray_directions, FamilyConfig, GridConfig, GridPair, PairGrid, PsiConfig, SweepConfig, Tolerances,
    SCHEMA_VERSION,
};
pub use ratios::{
    ball_at, gradient_ratio, gradient_ratio_with, growth_ratio, growth_ratio_with, kernel_gradient_fd,
    smoothness_ratio_x, smoothness_ratio_y, BALL_TOL,
};
pub use sweep::{
    pair_ratios, run_sweep, EstimateReport, KindSummary, PairRatios, PointFailure, RatioKind, RatioRow,
    SupTable, SMOOTHNESS_OFFSETS,
};
pub use lemmas::{
    heat_assembly_check, heat_from_p0, lemma21_check, lemma21_ratios, lemma23_check, lemma23_ratio, lemma28_check,
    lemma28_ratio, lemma28_scaled, lemma29_check, lemma29_ratio, lemma_grid, Lemma21Params, Lemma21Report,
    Lemma28Report, Lemma29Params, LemmaReport, LpExponent,
};
pub use pointwise::{
    lemma210_exact, lemma211_ratio, lemma211_sups, lemma27_exact, lemma27_sups, pointwise_suite, InequalityCount, PointwiseReport,
    SampleConfig, SampledSup, EXP_BOUND_PARAMS,
};
pub use duality::{
    duality_bumps, duality_suite, riesz_duality, riesz_norm_sequence, Bump, DualityCheck, DualityReport, DualitySettings, NormSequence, NORM_K,
};
