//! Central differences with Richardson extrapolation (Ridders' tableau).

/// Derivative estimate with the tableau's error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

const SHRINK: f64 = 1.4;
const TABLE: usize = 10;

/// `f'(x)` starting from step `h`; the step shrinks geometrically and the
/// best entry of the extrapolation tableau is returned.
pub fn ridders(f: impl Fn(f64) -> f64, x: f64, h: f64) -> Derivative {
    let con2 = SHRINK * SHRINK;
    let mut a = [[0.0f64; TABLE]; TABLE];
    let mut hh = h;
    a[0][0] = (f(x + hh) - f(x - hh)) / (2.0 * hh);
    let mut best = Derivative {
        value: a[0][0],
        error: f64::INFINITY,
    };
    for i in 1..TABLE {
        hh /= SHRINK;
        a[0][i] = (f(x + hh) - f(x - hh)) / (2.0 * hh);
        let mut fac = con2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= con2;
            let err = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if err <= best.error {
                best = Derivative {
                    value: a[j][i],
                    error: err,
                };
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * best.error {
            break;
        }
    }
    best
}

/// Second derivative by a fixed two-level Richardson extrapolation of the
/// three-point formula.
pub fn second_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let fx = f(x);
    let d2 = |h: f64| (f(x + h) - 2.0 * fx + f(x - h)) / (h * h);
    let (a, b, c) = (d2(h), d2(h / 2.0), d2(h / 4.0));
    let ab = (4.0 * b - a) / 3.0;
    let bc = (4.0 * c - b) / 3.0;
    (16.0 * bc - ab) / 15.0
}
