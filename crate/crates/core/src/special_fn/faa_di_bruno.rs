//! Faà di Bruno's formula for `d^N/dx^N (g o f)(x)`.

use crate::error::{Error, Result};

/// All tuples `(p_1, ..., p_N)` of nonnegative integers with
/// `p_1 + 2 p_2 + ... + N p_N = N`, one per integer partition of `N`.
pub fn faa_partitions(n: usize) -> Result<Vec<Vec<usize>>> {
    if n == 0 {
        return Err(Error::Domain("derivative order must be at least 1".into()));
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fill(&mut out, &mut cur, n, n);
    Ok(out)
}

// assigns multiplicities to parts of size `part` down to 1
fn fill(out: &mut Vec<Vec<usize>>, cur: &mut [usize], part: usize, remaining: usize) {
    if part == 0 {
        if remaining == 0 {
            out.push(cur.to_vec());
        }
        return;
    }
    for mult in (0..=remaining / part).rev() {
        cur[part - 1] = mult;
        fill(out, cur, part - 1, remaining - mult * part);
    }
    cur[part - 1] = 0;
}

/// Coefficient `N! / (p_1! ... p_N! (1!)^{p_1} ... (N!)^{p_N})`.
pub fn faa_coefficient(p: &[usize]) -> f64 {
    let n: usize = p.iter().enumerate().map(|(i, m)| (i + 1) * m).sum();
    let mut c = factorial(n);
    for (i, &m) in p.iter().enumerate() {
        c /= factorial(m) * factorial(i + 1).powi(m as i32);
    }
    c
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `d^N (g o f)(x)` from the outer derivatives `g_derivs[j] = g^{(j)}(f(x))`
/// for `j = 0..=N` and inner derivatives `f_derivs[j-1] = f^{(j)}(x)` for
/// `j = 1..=N`.
pub fn compose_derivative(g_derivs: &[f64], f_derivs: &[f64], n: usize) -> Result<f64> {
    if g_derivs.len() < n + 1 || f_derivs.len() < n {
        return Err(Error::Precondition(format!(
            "order {n} needs {} outer and {n} inner derivatives, got {} and {}",
            n + 1,
            g_derivs.len(),
            f_derivs.len()
        )));
    }
    let mut total = 0.0;
    for p in faa_partitions(n)? {
        let order: usize = p.iter().sum();
        let mut term = faa_coefficient(&p) * g_derivs[order];
        for (i, &m) in p.iter().enumerate() {
            if m > 0 {
                term *= f_derivs[i].powi(m as i32);
            }
        }
        total += term;
    }
    Ok(total)
}
