//! Scalar numerics: the error function, a safeguarded bracketing root
//! solver, composite Simpson quadrature and central differences.
//!
//! Everything here is a pure function of its arguments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Switch-over between the power series and the continued fraction.
const ERF_SERIES_LIMIT: f64 = 2.5;

/// Error function.
///
/// Absolute error is below `1e-15` on `|x| <= 6`; beyond that the result is
/// `±1` to working precision. NaN propagates; use [`checked_erf`] to reject
/// non-finite input.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let value = if ax < ERF_SERIES_LIMIT {
        erf_series(ax)
    } else if ax < 27.0 {
        1.0 - erfc_continued_fraction(ax)
    } else {
        1.0
    };
    value.copysign(x)
}

/// [`erf`] with a domain error for non-finite input.
pub fn checked_erf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain {
            what: "erf argument",
            value: x,
        });
    }
    Ok(erf(x))
}

// erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (1*3*...*(2n+1)).
// Every term is positive, so there is no cancellation for x >= 0.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

// erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
// evaluated with the modified Lentz algorithm.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (f * std::f64::consts::PI.sqrt())
}

/// A closed interval `[lo, hi]` with `lo < hi`, both finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Argument(format!(
                "bracket endpoints must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo >= hi {
            return Err(Error::Argument(format!(
                "bracket requires lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Stopping rule for [`solve_bracketed`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveSettings {
    abs_tol: f64,
    rel_tol: f64,
    max_iter: usize,
}

impl SolveSettings {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::Validation {
                field: "abs_tol",
                value: abs_tol,
                reason: "must be positive and finite",
            });
        }
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::Validation {
                field: "rel_tol",
                value: rel_tol,
                reason: "must be positive and finite",
            });
        }
        if max_iter == 0 {
            return Err(Error::Validation {
                field: "max_iter",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_iter,
        })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }

    fn tolerance_at(&self, x: f64) -> f64 {
        self.abs_tol + self.rel_tol * x.abs()
    }
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_iter: 200,
        }
    }
}

/// Finds a root of `f` inside `bracket`.
///
/// Brent's method: inverse quadratic interpolation or secant steps when they
/// stay well inside the current bracket, bisection otherwise. The returned
/// root `r` satisfies `|r - root| <= abs_tol + rel_tol * |r|`, lies in the
/// bracket, and `|f(r)|` never exceeds `|f|` at either original endpoint.
pub fn solve_bracketed<F>(mut f: F, bracket: Bracket, settings: &SolveSettings) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (lo, hi) = (bracket.lo, bracket.hi);
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }

    // b: best estimate, c: counterpoint with f(c) of opposite sign, a: previous b.
    let (mut a, mut fa) = (lo, f_lo);
    let (mut b, mut fb) = (hi, f_hi);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..settings.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol = settings.tolerance_at(b);
        let half = 0.5 * (c - b);
        if fb == 0.0 || (c - b).abs() <= tol {
            return Ok(best_of(b, fb, lo, f_lo, hi, f_hi));
        }

        if e.abs() >= 0.5 * tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half * q - (0.5 * tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }

        a = b;
        fa = fb;
        b += if d.abs() > 0.5 * tol {
            d
        } else {
            (0.5 * tol).copysign(half)
        };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::Domain {
                what: "function value inside bracket",
                value: fb,
            });
        }
    }

    Err(Error::Convergence {
        iterations: settings.max_iter,
        width: (c - b).abs(),
    })
}

fn best_of(b: f64, fb: f64, lo: f64, f_lo: f64, hi: f64, f_hi: f64) -> f64 {
    let mut best = (b, fb.abs());
    for (x, fx) in [(lo, f_lo.abs()), (hi, f_hi.abs())] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best.0
}

/// Composite Simpson rule on `[a, b]` with `n` (even, >= 2) subintervals.
pub fn integrate<F>(mut f: F, a: f64, b: f64, n: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if n < 2 || n % 2 != 0 {
        return Err(Error::Argument(format!(
            "Simpson rule needs an even number of subintervals >= 2, got {n}"
        )));
    }
    if !(a <= b) {
        return Err(Error::Argument(format!(
            "integration limits must satisfy a <= b, got [{a}, {b}]"
        )));
    }
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * f(a + i as f64 * h);
    }
    Ok(sum * h / 3.0)
}

/// Symmetric difference quotient `(f(x+h) - f(x-h)) / 2h`.
pub fn central_diff<F>(mut f: F, x: f64, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Argument(format!("difference step must be positive, got {h}")));
    }
    let value = (f(x + h) - f(x - h)) / (2.0 * h);
    if !value.is_finite() {
        return Err(Error::Domain {
            what: "difference quotient",
            value,
        });
    }
    Ok(value)
}

/// Second symmetric difference `(f(x+h) - 2f(x) + f(x-h)) / h^2`.
pub fn second_central_diff<F>(mut f: F, x: f64, h: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Argument(format!("difference step must be positive, got {h}")));
    }
    let value = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    if !value.is_finite() {
        return Err(Error::Domain {
            what: "second difference quotient",
            value,
        });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 40-digit evaluation.
    #[allow(clippy::excessive_precision)]
    const ERF_TABLE: &[(f64, f64)] = &[
        (1e-10, 1.128_379_167_095_512_6e-10),
        (0.001, 0.001_128_378_790_969_236_4),
        (0.1, 0.112_462_916_018_284_89),
        (0.3, 0.328_626_759_459_127_43),
        (0.5, 0.520_499_877_813_046_54),
        (0.7, 0.677_801_193_837_418_47),
        (1.0, 0.842_700_792_949_714_87),
        (1.5, 0.966_105_146_475_310_73),
        (2.0, 0.995_322_265_018_952_73),
        (2.4, 0.999_311_486_103_354_92),
        (2.5, 0.999_593_047_982_555_04),
        (2.6, 0.999_763_965_583_470_65),
        (3.0, 0.999_977_909_503_001_41),
        (3.5, 0.999_999_256_901_627_66),
        (4.0, 0.999_999_984_582_742_10),
        (4.5, 0.999_999_999_803_383_96),
        (5.0, 0.999_999_999_998_462_54),
        (5.5, 0.999_999_999_999_992_64),
        (6.0, 1.0),
    ];

    fn maclaurin_erf(x: f64, terms: usize) -> f64 {
        let mut sum = 0.0;
        let mut factorial = 1.0;
        for n in 0..terms {
            if n > 0 {
                factorial *= n as f64;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * x.powi(2 * n as i32 + 1) / (factorial * (2 * n + 1) as f64);
        }
        sum * FRAC_2_SQRT_PI
    }

    #[test]
    fn erf_matches_reference_table() {
        for &(x, expected) in ERF_TABLE {
            let got = erf(x);
            assert!((got - expected).abs() <= 1e-15, "erf({x}) = {got}, want {expected}");
            assert!((erf(-x) + expected).abs() <= 1e-15);
        }
    }

    #[test]
    fn erf_basic_values() {
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erf(-0.7), -erf(0.7));
        assert!((erf(1.0) - 0.842700792949715).abs() < 1e-15);
        assert!((erf(1.0) - maclaurin_erf(1.0, 30)).abs() < 1e-15);
        assert_eq!(erf(40.0), 1.0);
        assert_eq!(erf(-40.0), -1.0);
        assert_eq!(erf(f64::INFINITY), 1.0);
        assert!(erf(f64::NAN).is_nan());
    }

    #[test]
    fn checked_erf_rejects_non_finite() {
        assert!(matches!(checked_erf(f64::NAN), Err(Error::Domain { .. })));
        assert!(matches!(checked_erf(f64::NEG_INFINITY), Err(Error::Domain { .. })));
        assert_eq!(checked_erf(0.5).unwrap(), erf(0.5));
    }

    #[test]
    fn erf_is_continuous_at_the_method_switch() {
        let below = erf(ERF_SERIES_LIMIT - 1e-12);
        let above = erf(ERF_SERIES_LIMIT);
        assert!((above - below).abs() < 1e-14);
    }

    #[test]
    fn bracket_validation() {
        assert!(Bracket::new(0.0, 1.0).is_ok());
        assert!(Bracket::new(1.0, 1.0).is_err());
        assert!(Bracket::new(2.0, 1.0).is_err());
        assert!(Bracket::new(f64::NAN, 1.0).is_err());
        assert!(Bracket::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn settings_validation() {
        assert!(SolveSettings::new(0.0, 1e-12, 10).is_err());
        assert!(SolveSettings::new(1e-12, -1.0, 10).is_err());
        assert!(SolveSettings::new(1e-12, 1e-12, 0).is_err());
        let s = SolveSettings::default();
        assert_eq!((s.abs_tol(), s.rel_tol(), s.max_iter()), (1e-12, 1e-12, 200));
    }

    #[test]
    fn solves_simple_roots() {
        let s = SolveSettings::default();
        let r = solve_bracketed(|z| z * z - 2.0, Bracket::new(1.0, 2.0).unwrap(), &s).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
        let r = solve_bracketed(|z| z - 0.5, Bracket::new(0.0, 1.0).unwrap(), &s).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_endpoint_root_is_returned() {
        let s = SolveSettings::default();
        let r = solve_bracketed(|z| z, Bracket::new(0.0, 1.0).unwrap(), &s).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn same_sign_endpoints_report_both_values() {
        let err = solve_bracketed(|z| z * z + 1.0, Bracket::new(-1.0, 2.0).unwrap(), &Default::default())
            .unwrap_err();
        assert_eq!(
            err,
            Error::Bracket {
                lo: -1.0,
                hi: 2.0,
                f_lo: 2.0,
                f_hi: 5.0
            }
        );
    }

    #[test]
    fn iteration_cap_is_reported() {
        let s = SolveSettings::new(1e-300, 1e-300, 3).unwrap();
        let err = solve_bracketed(|z| z.powi(3) - 0.3, Bracket::new(0.0, 1.0).unwrap(), &s).unwrap_err();
        assert!(matches!(err, Error::Convergence { iterations: 3, .. }));
    }

    #[test]
    fn discontinuous_sign_change_is_located() {
        let s = SolveSettings::default();
        let r = solve_bracketed(
            |z| if z < 0.3 { -1.0 } else { 1.0 },
            Bracket::new(0.0, 1.0).unwrap(),
            &s,
        )
        .unwrap();
        assert!((r - 0.3).abs() <= 2e-12);
    }

    #[test]
    fn simpson_is_exact_on_low_degree() {
        assert!((integrate(|_| 1.0, 0.0, 1.0, 10).unwrap() - 1.0).abs() < 1e-15);
        assert!((integrate(|z| z, 0.0, 2.0, 10).unwrap() - 2.0).abs() < 1e-14);
        assert!((integrate(|z| z * z, 0.0, 1.0, 4).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((integrate(|z| z.powi(3), 0.0, 1.0, 2).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn simpson_rejects_bad_arguments() {
        assert!(integrate(|z| z, 0.0, 1.0, 3).is_err());
        assert!(integrate(|z| z, 0.0, 1.0, 0).is_err());
        assert!(integrate(|z| z, 1.0, 0.0, 4).is_err());
    }

    #[test]
    fn central_differences() {
        assert!((central_diff(|z| z * z, 1.0, 1e-5).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(central_diff(|_| 3.0, 1.0, 1e-3).unwrap(), 0.0);
        assert!((central_diff(f64::sqrt, 4.0, 1e-5).unwrap() - 0.25).abs() < 1e-8);
        assert!((second_central_diff(|z| z * z, 3.0, 0.5).unwrap() - 2.0).abs() < 1e-12);
        assert!(central_diff(|z| z, 0.0, 0.0).is_err());
        assert!(central_diff(f64::sqrt, 0.0, 1e-3).is_err());
    }
}
