//! Laguerre semigroup kernels of convolution type and the associated
//! Calderón–Zygmund kernel families.
//!
//! The crate is organised bottom-up:
//!
//! * [`special_fn`]: scaled Bessel `I_nu`, Laguerre polynomials/functions,
//!   Laguerre derivatives, Faà di Bruno.
//! * [`quadrature`]: Gauss rules for the measures `Pi_nu`, log-panel rules in
//!   `t`, adaptive Gauss–Kronrod.
//! * [`measure_geometry`]: the doubling measure `mu_alpha` and its balls.
//! * [`kernels`]: heat kernel in three representations, Poisson kernel,
//!   derivative kernels and the five kernel families with Banach norms.
//! * [`operators`]: the spectral side acting on Fourier–Laguerre coefficients.
//! * [`harness`]: standard-estimate sweeps and quantitative lemma checks.
//! * [`verify`]: the identity suite behind the `verify` command.

pub mod error;
pub mod harness;
pub mod index;
pub mod kernels;
pub mod measure_geometry;
pub mod numdiff;
pub mod operators;
pub mod quadrature;
pub mod special_fn;
pub mod verify;

pub use error::{Error, Result};
pub use index::{AlphaIndex, MultiIndex, PointRd};
