//! Independent reference computations for the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

/// erf by its alternating Maclaurin series; good to ~1e-12 on |x| <= 3.
pub fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let x2 = x * x;
    let mut n = 0.0;
    while term.abs() > 1e-18 * sum.abs() {
        n += 1.0;
        term *= -x2 / n;
        sum += term / (2.0 * n + 1.0);
    }
    2.0 / PI.sqrt() * sum
}

/// Root of `f` on `[lo, hi]`: scan `n` equal cells for the first sign
/// change, then bisect that cell to exhaustion.
pub fn scan_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Option<f64> {
    let step = (hi - lo) / n as f64;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=n {
        let b = if i == n { hi } else { lo + step * i as f64 };
        let fb = f(b);
        if fa == 0.0 {
            return Some(a);
        }
        if (fa < 0.0) != (fb < 0.0) {
            let (mut a, mut b) = (a, b);
            let neg_at_a = fa < 0.0;
            while b - a > 0.0 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if (f(m) < 0.0) == neg_at_a {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Some(0.5 * (a + b));
        }
        a = b;
        fa = fb;
    }
    None
}

/// `ξ` of the exact solution; `inv_bi = 0` gives the Dirichlet limit.
pub fn exact_xi(ste: f64, inv_bi: f64) -> f64 {
    let f = |z: f64| z * (z * z).exp() * (erf_series(z) + inv_bi / PI.sqrt()) - ste / PI.sqrt();
    scan_root(f, 0.0, 3.0, 1_000_000).expect("exact root below 3")
}

/// The four ξ-polynomials written out term by term.
pub fn approx_poly(index: usize, ste: f64, inv_bi: f64, z: f64) -> f64 {
    let (s, g) = (ste, inv_bi);
    match index {
        1 => {
            (12.0 + 9.0 * s + 2.0 * s.powi(2)) * z.powi(4) + (21.0 + 6.0 * s) * g * z.powi(3)
                + (12.0 * g.powi(2) - 42.0 * s - 12.0 * s.powi(2) - 18.0) * z.powi(2)
                - (30.0 * s + 9.0) * g * z
                + 9.0 * s * (1.0 + 2.0 * s)
        }
        2 => z.powi(4) + 2.0 * g * z.powi(3) + (6.0 + s) * z.powi(2) + 3.0 * g * z - 3.0 * s,
        3 => g * z.powi(3) + (6.0 + s) * z.powi(2) + 3.0 * g * z - 3.0 * s,
        4 => s * z.powi(4) - g * z.powi(3) - 6.0 * (1.0 + s) * z.powi(2) - 3.0 * g * z + 9.0 * s,
        _ => unreachable!(),
    }
}

/// Literal interval ends `(√Δ − c)/d` for P1/P2.
pub fn literal_bounds(ste: f64, inv_bi: f64) -> (f64, f64) {
    let (s, g) = (ste, inv_bi);
    let dmin = 4.0 * s * s + 8.0 * s + g * g;
    let dmax = 12.0 * s * s + 36.0 * s + 9.0 * g * g;
    ((dmin.sqrt() - g) / (2.0 * (2.0 + s)), (dmax.sqrt() - 3.0 * g) / (2.0 * (3.0 + s)))
}

/// `ξ` of scheme P`index` by scanning its proved interval.
pub fn approx_xi(index: usize, ste: f64, inv_bi: f64) -> f64 {
    let (lo, hi) = match index {
        1 | 2 => {
            // Widened by a hair: the literal bounds lose digits at small Ste.
            let (lo, hi) = literal_bounds(ste, inv_bi);
            let pad = 1e-9 * (hi - lo).max(lo * 1e-6);
            (lo - pad, hi + pad)
        }
        _ => (0.0, 3f64.sqrt()),
    };
    scan_root(|z| approx_poly(index, ste, inv_bi, z), lo, hi, 1_000_000).expect("sign change in interval")
}
