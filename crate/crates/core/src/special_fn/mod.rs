//! Scalar special functions: the scaled modified Bessel function, Laguerre
//! polynomials and functions, Laguerre derivatives and Faà di Bruno's
//! composition rule.

mod bessel;
mod faa_di_bruno;
mod gamma;
mod laguerre;

pub use bessel::{bessel_i_ratio, bessel_i_scaled, ln_bessel_i};
pub use faa_di_bruno::{compose_derivative, faa_coefficient, faa_partitions};
pub use gamma::{gamma_complex, ln_gamma_complex};
pub use laguerre::{
    delta_laguerre_fn, delta_laguerre_fn_1d, laguerre_fn, laguerre_fn_1d, laguerre_fn_1d_all,
    laguerre_norm, laguerre_poly,
};

pub(crate) use bessel::scaled_unchecked as bessel_i_scaled_unchecked;

pub use crate::index::{AlphaIndex, MultiIndex, PointRd};
