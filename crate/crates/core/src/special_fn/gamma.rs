//! Complex Gamma function (Lanczos, g = 7), used for imaginary-power symbols.

use num_complex::Complex64;
use std::f64::consts::PI;

const G: f64 = 7.0;
const COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(z)` on the principal branch for complex `z` off the poles.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let s = (Complex64::from(PI) * z).sin();
        return Complex64::from(PI).ln() - s.ln() - ln_gamma_complex(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::from(COEFFS[0]);
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma_complex(z: Complex64) -> Complex64 {
    ln_gamma_complex(z).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_axis_matches_factorial() {
        let g = gamma_complex(Complex64::new(5.0, 0.0));
        assert!((g.re - 24.0).abs() < 1e-11 && g.im.abs() < 1e-12);
        let h = gamma_complex(Complex64::new(0.5, 0.0));
        assert!((h.re - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn frozen_off_axis_value() {
        // mpmath: gamma(1 - 0.5j)
        let g = gamma_complex(Complex64::new(1.0, -0.5));
        assert!((g - Complex64::new(0.801_694_097_069_717_2, 0.199_639_738_164_596_4)).norm() < 1e-13, "{g}");
    }
}
