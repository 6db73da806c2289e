use laguerre_cz::kernels::{heat_kernel_closed, heat_kernel_schlafli, poisson_kernel, SchlafliRules};
use laguerre_cz::measure_geometry::{ball_measure, ball_measure_comparable, BallSpec};
use laguerre_cz::operators::{heat_apply, SpectralVector};
use laguerre_cz::special_fn::{bessel_i_scaled, compose_derivative, laguerre_fn_1d};
use laguerre_cz::{AlphaIndex, PointRd};
use num_complex::Complex64;
use proptest::prelude::*;

fn pt(v: Vec<f64>) -> PointRd {
    PointRd::new(v).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn coord() -> impl Strategy<Value = f64> {
    0.1f64..3.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heat_kernel_is_symmetric_and_positive(a in -0.95f64..3.0, b in -0.95f64..3.0, t in 0.02f64..4.0,
                                             x in (coord(), coord()), y in (coord(), coord())) {
        let alpha = AlphaIndex::new(vec![a, b]).unwrap();
        let (x, y) = (pt(vec![x.0, x.1]), pt(vec![y.0, y.1]));
        let g = heat_kernel_closed(&alpha, t, &x, &y).unwrap();
        prop_assert!(g > 0.0 && g.is_finite());
        prop_assert!(rel(heat_kernel_closed(&alpha, t, &y, &x).unwrap(), g) < 1e-13);
    }

    #[test]
    fn schlafli_matches_closed_form(a in -0.95f64..3.0, t in 0.05f64..3.0, x in coord(), y in coord()) {
        let alpha = AlphaIndex::new(vec![a]).unwrap();
        let rules = SchlafliRules::new(&alpha, 64).unwrap();
        let (x, y) = (pt(vec![x]), pt(vec![y]));
        let s = heat_kernel_schlafli(&alpha, t, &x, &y, &rules).unwrap();
        prop_assert!(rel(s, heat_kernel_closed(&alpha, t, &x, &y).unwrap()) < 1e-10);
    }

    #[test]
    fn bessel_recurrence(nu in 0.01f64..6.0, z in 0.01f64..150.0) {
        // I_{nu-1} - I_{nu+1} = (2 nu / z) I_nu, with the common e^{-z} scaling
        let lhs = bessel_i_scaled(nu - 1.0, z).unwrap() - bessel_i_scaled(nu + 1.0, z).unwrap();
        let rhs = 2.0 * nu / z * bessel_i_scaled(nu, z).unwrap();
        let scale = bessel_i_scaled(nu - 1.0, z).unwrap().abs();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * scale);
    }

    #[test]
    fn laguerre_functions_decay(k in 0usize..30, a in -0.9f64..4.0) {
        let x = 2.0 * (4.0 * k as f64 + 2.0 * a + 2.0).sqrt() + 6.0;
        prop_assert!(laguerre_fn_1d(k, a, x).unwrap().abs() < 1e-6);
    }

    #[test]
    fn faa_di_bruno_on_exponential(c in -2.0f64..2.0, n in 1usize..9) {
        // d^n exp(c x) at 0: every outer derivative is exp(0) = 1
        let g = vec![1.0; n + 1];
        let mut f = vec![0.0; n];
        f[0] = c;
        let got = compose_derivative(&g, &f, n).unwrap();
        prop_assert!((got - c.powi(n as i32)).abs() <= 1e-12 * (1.0 + c.abs().powi(n as i32)));
    }

    #[test]
    fn ball_measure_is_comparable(a in -0.9f64..2.5, x in 0.01f64..5.0, r in 0.01f64..5.0) {
        let alpha = AlphaIndex::new(vec![a]).unwrap();
        let ball = BallSpec::new(pt(vec![x]), r).unwrap();
        let m = ball_measure(&alpha, &ball, 1e-10).unwrap();
        let c = ball_measure_comparable(&alpha, &ball).unwrap();
        let q = m / c;
        prop_assert!(q > 0.05 && q < 20.0, "ratio {}", q);
    }

    #[test]
    fn heat_semigroup_on_coefficients(s in 0.0f64..1.0, t in 0.0f64..1.0,
                                      re in proptest::collection::vec(-1.0f64..1.0, 11)) {
        let alpha = AlphaIndex::new(vec![0.3]).unwrap();
        let v = SpectralVector::new(alpha, 10, re.iter().map(|r| Complex64::new(*r, 0.0)).collect()).unwrap();
        let a = heat_apply(&heat_apply(&v, s).unwrap(), t).unwrap();
        let b = heat_apply(&v, s + t).unwrap();
        for (p, q) in a.coeffs().iter().zip(b.coeffs()) {
            prop_assert!((p - q).norm() < 1e-14);
        }
        prop_assert!(b.norm() <= v.norm() * (1.0 + 1e-15));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn poisson_kernel_is_symmetric(a in -0.5f64..2.0, t in 0.3f64..2.0, x in coord(), y in coord()) {
        let alpha = AlphaIndex::new(vec![a]).unwrap();
        let (x, y) = (pt(vec![x]), pt(vec![y]));
        let p = poisson_kernel(&alpha, t, &x, &y).unwrap();
        prop_assert!(p > 0.0);
        prop_assert!(rel(poisson_kernel(&alpha, t, &y, &x).unwrap(), p) < 1e-9);
    }
}
