//! Heat and Poisson kernels, derivative kernels and the kernel families.

mod derivative;
mod families;
mod heat;
mod measure;
mod time;

pub use derivative::{
    heat_kernel_gradient, heat_log_gradient, kernel_derivative, LogGradient, MAX_DERIVATIVE_ORDER,
};
pub use families::{
    banach_difference, banach_norm, banach_norm_with, riesz_kernel, riesz_kernel_adaptive,
    scalar_kernel, scalar_kernel_difference, scalar_kernel_with, BanachTag, Family, KernelQuadrature, KernelSpec,
};
pub use heat::{
    heat_kernel_closed, heat_kernel_schlafli, heat_kernel_shells, heat_kernel_schlafli_single, heat_kernel_spectral,
    ln_heat_kernel_closed, poisson_kernel, poisson_kernel_spectral, SchlafliRules, SpectralSum,
};
pub use measure::{Atom, ExpTail, NuMeasure, Psi, TabulatedDensity};
pub use time::{q_forms, t_of_zeta, zeta_of_t, QForms, ZetaTime};

pub(crate) use families::golden_max;
pub(crate) use heat::shell_products;
pub(crate) use time::ln_sinh_2t;
