//! Quadratic-profile approximations of the similarity solution.
//!
//! Each scheme replaces one or two of the exact conditions by an integral or
//! interface substitute:
//!
//! | scheme | balance            | interface condition |
//! |--------|--------------------|---------------------|
//! | P1     | heat balance       | pseudo-Stefan       |
//! | P2     | heat balance       | Stefan              |
//! | P3     | refined balance    | Stefan              |
//! | P4     | refined balance    | pseudo-Stefan       |
//!
//! All four also keep the convective (or, in the limit, Dirichlet) condition
//! at `x = 0` and a vanishing temperature at the free boundary. `ξ` is the
//! root of a cubic or quartic inside a proved sign-change interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, check_time, relative, TemperatureField};
use crate::model::{Biot, Boundary, Case, DimensionlessParams, Diffusivity, MethodId, Scheme, SimilaritySolution};
use crate::numerics::{integrate, solve_bracketed, Bracket, SolveSettings};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Tolerance on the scaled polynomial residual at the computed root.
pub const POLYNOMIAL_RESIDUAL_TOL: f64 = 1e-10;

/// Interval bounds for the P1/P2 roots, from positivity of the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiBounds {
    pub xi_min: f64,
    pub xi_max: f64,
    pub delta_min: f64,
    pub delta_max: f64,
}

/// Bounds for a finite Biot number.
pub fn xi_bounds(params: DimensionlessParams) -> Result<XiBounds> {
    let params = DimensionlessParams::new(params.ste, params.bi)?;
    Ok(bounds_for(params.ste, 1.0 / params.bi))
}

/// Bounds for either boundary variant; the limit drops every `1/Bi` term.
pub fn xi_bounds_case(case: Case) -> XiBounds {
    bounds_for(case.ste(), case.biot().reciprocal())
}

fn bounds_for(ste: f64, g: f64) -> XiBounds {
    let delta_min = 4.0 * ste * ste + 8.0 * ste + g * g;
    let delta_max = 12.0 * ste * ste + 36.0 * ste + 9.0 * g * g;
    // (√Δ − c)/d rewritten as (Δ − c²)/(d(√Δ + c)).
    let xi_min = (4.0 * ste * ste + 8.0 * ste) / (2.0 * (2.0 + ste) * (delta_min.sqrt() + g));
    let xi_max = (12.0 * ste * ste + 36.0 * ste) / (2.0 * (3.0 + ste) * (delta_max.sqrt() + 3.0 * g));
    XiBounds {
        xi_min,
        xi_max,
        delta_min,
        delta_max,
    }
}

/// Real polynomial with coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    /// `Σ |c_k z^k|`, the magnitude the terms cancel down from.
    pub fn term_scale(&self, z: f64) -> f64 {
        let az = z.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * az + c.abs())
    }

    /// `|p(z)| / Σ |c_k z^k|`.
    pub fn scaled_residual(&self, z: f64) -> f64 {
        let scale = self.term_scale(z);
        if scale == 0.0 {
            0.0
        } else {
            self.eval(z).abs() / scale
        }
    }

    fn negate_coefficient(&mut self, degree: usize) {
        if let Some(c) = self.coeffs.get_mut(degree) {
            *c = -*c;
        }
    }
}

/// The `ξ`-polynomial of an approximate scheme for either boundary variant.
pub fn characteristic_polynomial(scheme: Scheme, case: Case) -> Result<Polynomial> {
    let s = case.ste();
    let g = case.biot().reciprocal();
    let coeffs = match scheme {
        Scheme::P1 => vec![
            9.0 * s * (1.0 + 2.0 * s),
            -(30.0 * s + 9.0) * g,
            12.0 * g * g - 42.0 * s - 12.0 * s * s - 18.0,
            (21.0 + 6.0 * s) * g,
            12.0 + 9.0 * s + 2.0 * s * s,
        ],
        Scheme::P2 => vec![-3.0 * s, 3.0 * g, 6.0 + s, 2.0 * g, 1.0],
        Scheme::P3 => {
            let mut c = vec![-3.0 * s, 3.0 * g, 6.0 + s, g];
            if g == 0.0 {
                c.pop();
            }
            c
        }
        Scheme::P4 => vec![9.0 * s, -3.0 * g, -6.0 * (1.0 + s), -g, s],
        Scheme::Exact => return Err(not_approximate(scheme)),
    };
    Ok(Polynomial::new(coeffs))
}

fn not_approximate(scheme: Scheme) -> Error {
    Error::Argument(format!("{scheme} is not an approximate scheme"))
}

/// Root interval and the proved signs of `p` at its ends (`true` = positive).
fn root_interval(scheme: Scheme, case: Case) -> (f64, f64, bool, bool) {
    match scheme {
        Scheme::P1 | Scheme::P2 => {
            let b = xi_bounds_case(case);
            let lo_positive = scheme == Scheme::P1;
            (b.xi_min, b.xi_max, lo_positive, !lo_positive)
        }
        Scheme::P3 => (0.0, SQRT_3, false, true),
        _ => (0.0, SQRT_3, true, false),
    }
}

/// Polynomial values at the ends of a scheme's root interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointSigns {
    pub lo: f64,
    pub hi: f64,
    pub p_lo: f64,
    pub p_hi: f64,
    /// Whether both values carry the signs the existence proof guarantees.
    pub as_proved: bool,
}

fn endpoint_values(poly: &Polynomial, scheme: Scheme, case: Case) -> EndpointSigns {
    let (lo, hi, lo_pos, hi_pos) = root_interval(scheme, case);
    let (p_lo, p_hi) = (poly.eval(lo), poly.eval(hi));
    let sign_ok = |v: f64, positive: bool| if positive { v > 0.0 } else { v < 0.0 };
    EndpointSigns {
        lo,
        hi,
        p_lo,
        p_hi,
        as_proved: sign_ok(p_lo, lo_pos) && sign_ok(p_hi, hi_pos),
    }
}

/// Evaluates the endpoint signs, optionally with one coefficient negated.
pub fn endpoint_signs(scheme: Scheme, case: Case, flipped_degree: Option<usize>) -> Result<EndpointSigns> {
    let mut poly = characteristic_polynomial(scheme, case)?;
    if let Some(d) = flipped_degree {
        poly.negate_coefficient(d);
    }
    Ok(endpoint_values(&poly, scheme, case))
}

/// How the P1/P2 coefficient `A` is assembled from `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CoefficientConvention {
    /// `A = (6Ste − (6+2Ste)ξ² − 6ξ/Bi) / (Ste(ξ² + 2ξ/Bi + 3))`, which
    /// satisfies the convective condition and the heat balance exactly.
    #[default]
    Consistent,
    /// Same with `(6+Ste)ξ²` in the numerator. Reproduces historically
    /// tabulated temperature errors but violates the convective condition.
    PublishedTables,
}

/// `A` and `B` at `ξ`. For P1/P2 the numerators are taken in factored form,
/// `N_B = (ξ − ξ^min)(…)` and `N_A = (ξ^max − ξ)(…)`, with the distances
/// supplied by the caller; the root can sit within a few hundred ulps of
/// `ξ^min` at small Ste·Bi.
fn coefficients(
    scheme: Scheme,
    case: Case,
    xi: f64,
    above_min: f64,
    below_max: f64,
    convention: CoefficientConvention,
) -> (f64, f64) {
    let s = case.ste();
    let g = case.biot().reciprocal();
    let x2 = xi * xi;
    match scheme {
        Scheme::P1 | Scheme::P2 => {
            let b = xi_bounds_case(case);
            let den = s * (x2 + 2.0 * g * xi + 3.0);
            let mut num_a = below_max * ((6.0 + 2.0 * s) * (xi + b.xi_max) + 6.0 * g);
            if convention == CoefficientConvention::PublishedTables {
                num_a += s * x2;
            }
            let num_b = above_min * ((3.0 * s + 6.0) * (xi + b.xi_min) + 3.0 * g);
            (num_a / den, num_b / den)
        }
        _ => {
            let den = g * x2 + 6.0 * xi + 3.0 * g;
            (2.0 * xi * (3.0 - x2) / den, 2.0 * xi * x2 / den)
        }
    }
}

/// P1: `N_A² − 2 N_B D`; P2: `2ξ²D − N_A`, with `D = ξ² + 2ξ/Bi + 3` and the
/// numerators in factored form. Equal to `2p₁` and `2p₂` respectively.
fn factored_condition(scheme: Scheme, case: Case, xi: f64, above_min: f64, below_max: f64) -> f64 {
    let s = case.ste();
    let g = case.biot().reciprocal();
    let b = xi_bounds_case(case);
    let num_a = below_max * ((6.0 + 2.0 * s) * (xi + b.xi_max) + 6.0 * g);
    let num_b = above_min * ((3.0 * s + 6.0) * (xi + b.xi_min) + 3.0 * g);
    let d = xi * xi + 2.0 * g * xi + 3.0;
    match scheme {
        Scheme::P1 => num_a * num_a - 2.0 * num_b * d,
        _ => 2.0 * xi * xi * d - num_a,
    }
}

/// Solves scheme P1–P4 for a finite Biot number.
pub fn solve_approx(scheme: Scheme, params: DimensionlessParams, settings: &SolveSettings) -> Result<SimilaritySolution> {
    solve_approx_with(scheme, params, settings, CoefficientConvention::Consistent)
}

pub fn solve_approx_with(
    scheme: Scheme,
    params: DimensionlessParams,
    settings: &SolveSettings,
    convention: CoefficientConvention,
) -> Result<SimilaritySolution> {
    let params = DimensionlessParams::new(params.ste, params.bi)?;
    solve_polynomial(scheme, Case::Convective(params), settings, convention, None)
}

/// Like [`solve_approx`] with one polynomial coefficient negated before the
/// solve. Exists to exercise the invariant checks.
#[doc(hidden)]
pub fn solve_approx_faulted(
    scheme: Scheme,
    params: DimensionlessParams,
    settings: &SolveSettings,
    flipped_degree: usize,
) -> Result<SimilaritySolution> {
    let params = DimensionlessParams::new(params.ste, params.bi)?;
    solve_polynomial(
        scheme,
        Case::Convective(params),
        settings,
        CoefficientConvention::Consistent,
        Some(flipped_degree),
    )
}

/// Solves by bracketed root finding on the scheme's polynomial. Works for
/// either boundary variant; the Dirichlet limit normally goes through the
/// closed forms of [`solve_approx_limit`] instead.
pub fn solve_polynomial(
    scheme: Scheme,
    case: Case,
    settings: &SolveSettings,
    convention: CoefficientConvention,
    flipped_degree: Option<usize>,
) -> Result<SimilaritySolution> {
    let mut poly = characteristic_polynomial(scheme, case)?;
    if let Some(d) = flipped_degree {
        poly.negate_coefficient(d);
    }
    let method = MethodId::new(scheme, case.boundary());
    let ends = endpoint_values(&poly, scheme, case);
    if !ends.as_proved {
        return Err(Error::EndpointSign {
            method,
            ste: case.ste(),
            bi: case.biot().value(),
            p_lo: ends.p_lo,
            p_hi: ends.p_hi,
        });
    }
    let (lo, hi) = (ends.lo, ends.hi);
    let (xi, above_min, below_max) = match scheme {
        Scheme::P1 | Scheme::P2 => {
            // Solved for ln u with ξ = ξ^min + u(ξ^max − ξ^min), so the
            // distance to ξ^min carries full relative precision. Unless a
            // fault is injected, the root function is the defining condition
            // in factored form (2p₁ or 2p₂ up to rounding), which stays
            // accurate where the expanded polynomial cancels.
            let width = hi - lo;
            let at = |u: f64| if u >= 1.0 { hi } else { lo + u * width };
            let root_fn = |v: f64| {
                let u = v.exp();
                let xi = at(u);
                match flipped_degree {
                    Some(_) => poly.eval(xi),
                    None => factored_condition(scheme, case, xi, u * width, (1.0 - u) * width),
                }
            };
            let v = solve_bracketed(root_fn, Bracket::new(f64::MIN_POSITIVE.ln(), 0.0)?, settings)?;
            let u = v.exp();
            (at(u), u * width, (1.0 - u) * width)
        }
        _ => {
            // Solved in ln ξ so that tolerances are relative to the root.
            let t = solve_bracketed(|t| poly.eval(t.exp()), Bracket::new(f64::MIN_POSITIVE.ln(), hi.ln())?, settings)?;
            let xi = if t >= hi.ln() { hi } else { t.exp() };
            (xi, xi - lo, hi - xi)
        }
    };
    let (coeff_a, coeff_b) = coefficients(scheme, case, xi, above_min, below_max, convention);
    let sol = SimilaritySolution {
        method,
        xi,
        coeff_a,
        coeff_b,
        ste: case.ste(),
        biot: case.biot(),
    };
    let residual = poly.scaled_residual(xi);
    if residual > POLYNOMIAL_RESIDUAL_TOL {
        return Err(invariant(method, format!("polynomial residual {residual:e} at xi = {xi}")));
    }
    check_solution(&sol, convention)?;
    Ok(sol)
}

fn invariant(method: MethodId, detail: String) -> Error {
    Error::Invariant { method, detail }
}

fn check_solution(sol: &SimilaritySolution, convention: CoefficientConvention) -> Result<()> {
    let method = sol.method;
    if !(sol.xi > 0.0) {
        return Err(invariant(method, format!("xi = {} is not positive", sol.xi)));
    }
    if !(sol.coeff_a > 0.0 && sol.coeff_b > 0.0) {
        return Err(invariant(
            method,
            format!("coefficients not positive: A = {}, B = {}", sol.coeff_a, sol.coeff_b),
        ));
    }
    if convention == CoefficientConvention::Consistent
        && matches!(sol.biot, Biot::Finite(_))
        && !(sol.coeff_a + sol.coeff_b < 1.0)
    {
        return Err(invariant(
            method,
            format!("A + B = {} is not below 1", sol.coeff_a + sol.coeff_b),
        ));
    }
    let (lo, hi, _, _) = root_interval(method.scheme, sol.case());
    if !(sol.xi > lo && sol.xi < hi) {
        return Err(invariant(method, format!("xi = {} outside ({lo}, {hi})", sol.xi)));
    }
    Ok(())
}

/// Closed-form solution of scheme P1–P4 in the Dirichlet limit.
pub fn solve_approx_limit(scheme: Scheme, ste: f64) -> Result<SimilaritySolution> {
    crate::model::validate_ste(ste)?;
    let s = ste;
    let r = (2.0 * s + 1.0).sqrt();
    let (xi2, coeff_a, coeff_b) = match scheme {
        Scheme::P1 => {
            let xi2 = 3.0 * r * s / (r * (s + 3.0) + 3.0 + 2.0 * s);
            (xi2, 2.0 / (r + 1.0), 2.0 * s / ((r + 1.0) * (r + 1.0)))
        }
        Scheme::P2 => {
            let q = (s * s + 24.0 * s + 36.0).sqrt();
            let xi2 = 6.0 * s / (q + 6.0 + s);
            let b = 36.0 * s * (2.0 * s + 3.0) / ((q + 6.0 + s) * (q + 5.0 * s + 6.0) * (xi2 + 3.0));
            (xi2, 1.0 - b, b)
        }
        Scheme::P3 => (3.0 * s / (6.0 + s), 6.0 / (6.0 + s), s / (6.0 + s)),
        Scheme::P4 => (3.0 * s / (1.0 + s + r), 2.0 / (r + 1.0), s / (1.0 + s + r)),
        Scheme::Exact => return Err(not_approximate(scheme)),
    };
    let sol = SimilaritySolution {
        method: MethodId::new(scheme, Boundary::DirichletLimit),
        xi: xi2.sqrt(),
        coeff_a,
        coeff_b,
        ste,
        biot: Biot::Infinite,
    };
    let residual = polynomial_residual(&sol)?;
    if residual > POLYNOMIAL_RESIDUAL_TOL {
        return Err(invariant(sol.method, format!("polynomial residual {residual:e} at xi = {}", sol.xi)));
    }
    check_solution(&sol, CoefficientConvention::Consistent)?;
    Ok(sol)
}

/// Scaled residual of the solution's own polynomial at its `ξ`.
pub fn polynomial_residual(sol: &SimilaritySolution) -> Result<f64> {
    Ok(characteristic_polynomial(sol.method.scheme, sol.case())?.scaled_residual(sol.xi))
}

/// Quadratic profile `−AΘ(1 − x/s) − BΘ(1 − x/s)²`, zero beyond `s(t)`.
pub fn approx_temperature(sol: &SimilaritySolution, theta_inf: f64, alpha: Diffusivity, x: f64, t: f64) -> Result<f64> {
    if !sol.method.scheme.is_approximate() {
        return Err(not_approximate(sol.method.scheme));
    }
    TemperatureField::new(*sol, alpha, theta_inf)?.temperature(x, t)
}

/// Relative residuals of the conditions defining a method; conditions that
/// are not part of the method are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub heat_balance: Option<f64>,
    pub refined_balance: Option<f64>,
    /// Convective condition, or `|T(0,t) + Θ∞| / Θ∞` in the Dirichlet limit.
    pub convective: Option<f64>,
    pub stefan: Option<f64>,
    pub pseudo_stefan: Option<f64>,
    pub interface_temp: Option<f64>,
}

impl ResidualReport {
    pub fn entries(&self) -> impl Iterator<Item = (&'static str, f64)> {
        [
            ("heat_balance", self.heat_balance),
            ("refined_balance", self.refined_balance),
            ("convective", self.convective),
            ("stefan", self.stefan),
            ("pseudo_stefan", self.pseudo_stefan),
            ("interface_temp", self.interface_temp),
        ]
        .into_iter()
        .filter_map(|(name, v)| v.map(|v| (name, v)))
    }

    /// Largest present entry, NaN-propagating.
    pub fn max(&self) -> f64 {
        self.entries()
            .map(|(_, v)| v)
            .fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
    }
}

/// Evaluates the method's defining conditions at time `t_probe` by quadrature
/// and finite differences on the closed-form profile.
pub fn residual_suite(
    method: MethodId,
    sol: &SimilaritySolution,
    theta_inf: f64,
    alpha: Diffusivity,
    t_probe: f64,
) -> Result<ResidualReport> {
    if sol.method != method {
        return Err(Error::Argument(format!(
            "solution belongs to {}, not {method}",
            sol.method
        )));
    }
    check_time(t_probe)?;
    let field = TemperatureField::new(*sol, alpha, theta_inf)?;

    if method.scheme == Scheme::Exact {
        let r = exact::exact_residuals(&field, t_probe, 0.5)?;
        return Ok(ResidualReport {
            convective: Some(r.convective),
            stefan: Some(r.stefan),
            interface_temp: Some(r.interface_temp),
            ..ResidualReport::default()
        });
    }

    let t = t_probe;
    let a = alpha.get();
    let theta = theta_inf;
    let s = 2.0 * sol.xi * (a * t).sqrt();
    let s_dot = sol.xi * (a / t).sqrt();
    let latent = theta / sol.ste;
    let profile = |x: f64| field.profile(x, t);
    let grad0 = (sol.coeff_a + 2.0 * sol.coeff_b) * theta / s;
    let grad_s = sol.coeff_a * theta / s;
    let curv_s = -2.0 * sol.coeff_b * theta / (s * s);
    let t0 = field.profile(0.0, t);

    let mut report = ResidualReport {
        interface_temp: Some(field.profile(s, t).abs() / theta),
        convective: Some(match sol.biot {
            Biot::Finite(bi) => relative(grad0, bi / (a * t).sqrt() * (t0 + theta)),
            Biot::Infinite => (t0 + theta).abs() / theta,
        }),
        ..ResidualReport::default()
    };

    match method.scheme {
        Scheme::P1 | Scheme::P2 => {
            // ∫₀^s T dx scales like √t, so its time derivative is I/(2t).
            let integral = integrate(profile, 0.0, s, 16)?;
            let lhs = integral / (2.0 * t);
            let (flux_front, flux_face) = (latent * s_dot, a * grad0);
            let scale = lhs.abs().max(flux_front.abs()).max(flux_face.abs());
            report.heat_balance = Some((lhs - (flux_front - flux_face)).abs() / scale);
        }
        _ => {
            let dt = 1e-4 * t;
            let inner = |x: f64| {
                integrate(
                    |y| (field.profile(y, t + dt) - field.profile(y, t - dt)) / (2.0 * dt),
                    0.0,
                    x,
                    8,
                )
                .unwrap_or(f64::NAN)
            };
            let lhs = integrate(inner, 0.0, s, 8)?;
            let (face_temp, face_flux) = (-a * t0, -a * grad0 * s);
            let scale = lhs.abs().max(face_temp.abs()).max(face_flux.abs());
            report.refined_balance = Some((lhs - (face_temp + face_flux)).abs() / scale);
        }
    }

    match method.scheme {
        Scheme::P2 | Scheme::P3 => {
            report.stefan = Some(relative(grad_s, latent / a * s_dot));
        }
        _ => {
            report.pseudo_stefan = Some(relative(grad_s * grad_s, -latent * curv_s));
        }
    }
    Ok(report)
}
