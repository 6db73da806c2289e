//! The time change `zeta = tanh t` and the quadratic forms `q_+-`.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::index::PointRd;

/// A time `t` together with `zeta = tanh t` and `1 - zeta`, the latter kept
/// separately so that large `t` (where `zeta` rounds to 1) still round-trips.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaTime {
    pub t: f64,
    pub zeta: f64,
    pub one_minus_zeta: f64,
}

impl ZetaTime {
    /// `t = (1/2) log((1 + zeta) / (1 - zeta))`, evaluated from `1 - zeta`.
    pub fn t_from_zeta(&self) -> f64 {
        0.5 * ((2.0 - self.one_minus_zeta) / self.one_minus_zeta).ln()
    }

    /// `Log(zeta) = log((1 + zeta) / (1 - zeta)) = 2 t`.
    pub fn log_ratio(&self) -> f64 {
        2.0 * self.t
    }
}

pub fn zeta_of_t(t: f64) -> Result<ZetaTime> {
    if !(t.is_finite() && t > 0.0) {
        return domain(format!("time {t} must be positive and finite"));
    }
    let e = (-2.0 * t).exp();
    Ok(ZetaTime {
        t,
        zeta: t.tanh(),
        one_minus_zeta: 2.0 * e / (1.0 + e),
    })
}

pub fn t_of_zeta(zeta: f64) -> Result<ZetaTime> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return domain(format!("zeta = {zeta} must lie in (0, 1)"));
    }
    Ok(ZetaTime {
        t: zeta.atanh(),
        zeta,
        one_minus_zeta: 1.0 - zeta,
    })
}

/// `ln sinh(2t)` without overflow.
pub(crate) fn ln_sinh_2t(t: f64) -> f64 {
    if t < 0.5 {
        (2.0 * t).sinh().ln()
    } else {
        2.0 * t + (-(-4.0 * t).exp()).ln_1p() - std::f64::consts::LN_2
    }
}

/// `q_+(x, y, s)` and `q_-(x, y, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QForms {
    pub q_plus: f64,
    pub q_minus: f64,
}

/// `q_+- = |x|^2 + |y|^2 +- 2 sum x_i y_i s_i`, written as sums of squares
/// so that both stay nonnegative in floating point.
pub fn q_forms(x: &PointRd, y: &PointRd, s: &[f64]) -> Result<QForms> {
    x.check_dim(y.dim())?;
    x.check_dim(s.len())?;
    if let Some(v) = s.iter().find(|v| !(v.abs() <= 1.0)) {
        return domain(format!("s component {v} outside [-1, 1]"));
    }
    Ok(q_forms_unchecked(x.coords(), y.coords(), s))
}

pub(crate) fn q_forms_unchecked(x: &[f64], y: &[f64], s: &[f64]) -> QForms {
    let (mut qp, mut qm) = (0.0, 0.0);
    for i in 0..x.len() {
        let (a, b, si) = (x[i], y[i], s[i]);
        // x^2 + y^2 + 2xys = (x + ys)^2 + y^2 (1 - s^2)
        let rest = b * b * (1.0 - si) * (1.0 + si);
        qp += (a + b * si) * (a + b * si) + rest;
        qm += (a - b * si) * (a - b * si) + rest;
    }
    QForms {
        q_plus: qp,
        q_minus: qm,
    }
}
