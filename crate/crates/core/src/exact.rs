//! Exact similarity solution of the convective problem and of its
//! Dirichlet limit, plus temperature and free-boundary evaluation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Biot, Case, DimensionlessParams, Diffusivity, MethodId, Scheme, SimilaritySolution};
use crate::numerics::{central_diff, erf, second_central_diff, solve_bracketed, Bracket, SolveSettings};

const LOWER_ROOT_BOUND: f64 = 1e-12;
const MAX_EXPANSIONS: usize = 64;

/// Left-hand side of the transcendental equation for `ξ`:
/// `z·exp(z²)·(erf z + 1/(Bi√π)) − Ste/√π` (the `1/Bi` term vanishes in the limit).
pub fn exact_equation(z: f64, ste: f64, biot: Biot) -> f64 {
    let sqrt_pi = PI.sqrt();
    z * (z * z).exp() * (erf(z) + biot.reciprocal() / sqrt_pi) - ste / sqrt_pi
}

/// `|f(ξ)|` scaled by the `Ste/√π` term.
pub fn exact_equation_residual(z: f64, ste: f64, biot: Biot) -> f64 {
    exact_equation(z, ste, biot).abs() / (ste / PI.sqrt())
}

pub fn solve_exact(params: DimensionlessParams, settings: &SolveSettings) -> Result<SimilaritySolution> {
    let params = DimensionlessParams::new(params.ste, params.bi)?;
    solve_case(Case::Convective(params), settings)
}

pub fn solve_exact_dirichlet(ste: f64, settings: &SolveSettings) -> Result<SimilaritySolution> {
    solve_case(Case::dirichlet(ste)?, settings)
}

pub(crate) fn solve_case(case: Case, settings: &SolveSettings) -> Result<SimilaritySolution> {
    let ste = case.ste();
    let biot = case.biot();
    let f = |z: f64| exact_equation(z, ste, biot);

    // f(0+) = -Ste/√π < 0 and f grows without bound. The search runs in ln z
    // so that the solver tolerances are relative to the root.
    let g = |t: f64| f(t.exp());
    let mut lo = LOWER_ROOT_BOUND;
    let mut hi = ste.sqrt().max(1.0);
    let mut expansions = 0;
    while f(hi) <= 0.0 || f(lo) >= 0.0 {
        if f(hi) <= 0.0 {
            hi *= 2.0;
        } else {
            lo *= 1e-6;
        }
        expansions += 1;
        if expansions > MAX_EXPANSIONS || !hi.is_finite() || lo == 0.0 {
            return Err(Error::Bracket {
                lo,
                hi,
                f_lo: f(lo),
                f_hi: f(hi),
            });
        }
    }
    let xi = solve_bracketed(g, Bracket::new(lo.ln(), hi.ln())?, settings)?.exp();

    let method = MethodId::new(Scheme::Exact, case.boundary());
    let erf_xi = erf(xi);
    let (coeff_a, coeff_b) = match biot {
        Biot::Finite(bi) => {
            let denom = 1.0 / (bi * PI.sqrt()) + erf_xi;
            (erf_xi / denom, 1.0 / denom)
        }
        Biot::Infinite => (1.0, 1.0 / erf_xi),
    };
    let residual = exact_equation_residual(xi, ste, biot);
    if residual > 1e-10 {
        return Err(Error::Invariant {
            method,
            detail: format!("equation residual {residual:e} at xi = {xi}"),
        });
    }
    Ok(SimilaritySolution {
        method,
        xi,
        coeff_a,
        coeff_b,
        ste,
        biot,
    })
}

/// Free boundary `s(t) = 2ξ√(αt)`.
pub fn free_boundary_position(sol: &SimilaritySolution, alpha: Diffusivity, t: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain { what: "time", value: t });
    }
    Ok(2.0 * sol.xi * (alpha.get() * t).sqrt())
}

/// Temperature field of a solved method: the erf profile for the exact
/// solution, the quadratic profile for the integral approximations. Both are
/// extended by zero beyond the free boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureField {
    pub solution: SimilaritySolution,
    pub alpha: Diffusivity,
    pub theta_inf: f64,
}

impl TemperatureField {
    pub fn new(solution: SimilaritySolution, alpha: Diffusivity, theta_inf: f64) -> Result<Self> {
        if !(theta_inf.is_finite() && theta_inf > 0.0) {
            return Err(Error::Validation {
                field: "theta_inf",
                value: theta_inf,
                reason: "must be positive and finite",
            });
        }
        Ok(Self {
            solution,
            alpha,
            theta_inf,
        })
    }

    pub fn free_boundary(&self, t: f64) -> Result<f64> {
        free_boundary_position(&self.solution, self.alpha, t)
    }

    pub fn temperature(&self, x: f64, t: f64) -> Result<f64> {
        check_time(t)?;
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::Domain { what: "position", value: x });
        }
        if x >= self.free_boundary(t)? {
            return Ok(0.0);
        }
        Ok(self.profile(x, t))
    }

    /// The closed-form profile without the zero extension; smooth in both
    /// variables, which is what the finite-difference residuals need.
    pub(crate) fn profile(&self, x: f64, t: f64) -> f64 {
        let sol = &self.solution;
        let theta = self.theta_inf;
        match sol.method.scheme {
            Scheme::Exact => {
                let eta = x / (2.0 * (self.alpha.get() * t).sqrt());
                -sol.coeff_a * theta + sol.coeff_b * theta * erf(eta)
            }
            _ => {
                let s = 2.0 * sol.xi * (self.alpha.get() * t).sqrt();
                let u = 1.0 - x / s;
                -sol.coeff_a * theta * u - sol.coeff_b * theta * u * u
            }
        }
    }
}

/// Temperature of the exact (or any) solved field; see [`TemperatureField::temperature`].
pub fn temperature(field: &TemperatureField, x: f64, t: f64) -> Result<f64> {
    field.temperature(x, t)
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain { what: "time", value: t });
    }
    Ok(())
}

/// Relative residuals of the exact solution's defining conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactResiduals {
    /// Convective condition at `x = 0` (Dirichlet condition in the limit).
    pub convective: f64,
    /// Stefan condition at the free boundary.
    pub stefan: f64,
    /// Heat equation at the interior probe point.
    pub heat_equation: f64,
    /// Temperature at the free boundary, relative to `Θ∞`.
    pub interface_temp: f64,
}

pub(crate) fn relative(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// Checks the exact solution at time `t` with finite differences; the heat
/// equation is probed at `x = fraction · s(t)`, `0 < fraction < 1`.
pub fn exact_residuals(field: &TemperatureField, t: f64, fraction: f64) -> Result<ExactResiduals> {
    check_time(t)?;
    if field.solution.method.scheme != Scheme::Exact {
        return Err(Error::Argument(format!(
            "exact residuals need an exact solution, got {}",
            field.solution.method
        )));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Argument(format!(
            "probe fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let alpha = field.alpha.get();
    let theta = field.theta_inf;
    let sol = &field.solution;
    let length = 2.0 * (alpha * t).sqrt();
    let s = sol.xi * length;
    let hx = 1e-5 * length;

    let grad_at = |x: f64| central_diff(|y| field.profile(y, t), x, hx);
    let grad0 = grad_at(0.0)?;
    let t0 = field.profile(0.0, t);
    let convective = match sol.biot {
        Biot::Finite(bi) => relative(grad0, bi / (alpha * t).sqrt() * (t0 + theta)),
        Biot::Infinite => (t0 + theta).abs() / theta,
    };

    let s_dot = sol.xi * (alpha / t).sqrt();
    let stefan = relative(grad_at(s)?, theta / (sol.ste * alpha) * s_dot);

    let x = fraction * s;
    let dt = central_diff(|tau| field.profile(x, tau), t, 1e-4 * t)?;
    let dxx = second_central_diff(|y| field.profile(y, t), x, 1e-3 * length)?;
    let heat_equation = relative(dt, alpha * dxx);

    Ok(ExactResiduals {
        convective,
        stefan,
        heat_equation,
        interface_temp: field.profile(s, t).abs() / theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Boundary;

    fn settings() -> SolveSettings {
        SolveSettings::default()
    }

    fn field(sol: SimilaritySolution) -> TemperatureField {
        TemperatureField::new(sol, Diffusivity::new(1.15e-6).unwrap(), 5.0).unwrap()
    }

    #[test]
    fn dirichlet_root_at_unit_stefan_number() {
        let sol = solve_exact_dirichlet(1.0, &settings()).unwrap();
        // 40-digit reference.
        assert!((sol.xi - 0.620_062_633_313_595_5).abs() < 1e-11);
        assert_eq!(sol.coeff_a, 1.0);
        assert!((sol.coeff_b - 1.0 / erf(sol.xi)).abs() < 1e-15);
        assert_eq!(sol.method, MethodId::new(Scheme::Exact, Boundary::DirichletLimit));
    }

    #[test]
    fn dirichlet_root_grows_with_stefan_number() {
        let s = settings();
        let a = solve_exact_dirichlet(1e-6, &s).unwrap().xi;
        let b = solve_exact_dirichlet(1e-3, &s).unwrap().xi;
        let c = solve_exact_dirichlet(1.0, &s).unwrap().xi;
        assert!(a < b && b < c);
        assert!((b - 0.022_356_954_422_938_21).abs() < 1e-13);
        assert!((a - 7.071_066_633_354_625e-4).abs() < 1e-15);
    }

    #[test]
    fn large_biot_approaches_the_dirichlet_root() {
        let s = settings();
        let conv = solve_exact(DimensionlessParams::new(1.0, 1e6).unwrap(), &s).unwrap();
        let lim = solve_exact_dirichlet(1.0, &s).unwrap();
        assert!((conv.xi - lim.xi).abs() < 1e-5);
        assert!(conv.xi < lim.xi);
    }

    #[test]
    fn ice_root_is_below_its_dirichlet_limit() {
        let s = settings();
        let ste = 2097.6 * 5.0 / 3.33e5;
        let conv = solve_exact(DimensionlessParams::new(ste, 80.0).unwrap(), &s).unwrap();
        let lim = solve_exact_dirichlet(ste, &s).unwrap();
        assert!(lim.xi > conv.xi);
    }

    #[test]
    fn coefficient_identities() {
        let s = settings();
        for &(ste, bi) in &[(1e-3, 0.1), (0.5, 2.0), (1.0, 1.0), (10.0, 1e3), (100.0, 1e6)] {
            let sol = solve_exact(DimensionlessParams::new(ste, bi).unwrap(), &s).unwrap();
            let d = 1.0 / (bi * PI.sqrt()) + erf(sol.xi);
            assert!(sol.coeff_b - sol.coeff_a > 0.0);
            assert!(((sol.coeff_b - sol.coeff_a) - (1.0 - erf(sol.xi)) / d).abs() < 1e-12 * sol.coeff_b);
            assert!(sol.coeff_a < 1.0);
            assert!((sol.coeff_a / sol.coeff_b - erf(sol.xi)).abs() < 1e-14);
            assert!(exact_equation_residual(sol.xi, ste, Biot::Finite(bi)) <= 1e-10);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(solve_exact(DimensionlessParams { ste: -1.0, bi: 1.0 }, &settings()).is_err());
        assert!(solve_exact(DimensionlessParams { ste: 1.0, bi: 0.0 }, &settings()).is_err());
        assert!(solve_exact_dirichlet(0.0, &settings()).is_err());
    }

    #[test]
    fn temperature_profile_values() {
        let sol = solve_exact(DimensionlessParams::new(0.5, 3.0).unwrap(), &settings()).unwrap();
        let f = field(sol);
        let t = 10.0;
        let s = f.free_boundary(t).unwrap();
        assert!((f.temperature(0.0, t).unwrap() + sol.coeff_a * 5.0).abs() < 1e-15);
        assert!(f.profile(s, t).abs() < 1e-14);
        assert_eq!(f.temperature(s, t).unwrap(), 0.0);
        assert_eq!(f.temperature(10.0 * s, t).unwrap(), 0.0);
        assert!(f.temperature(0.0, 0.0).is_err());
        assert!(f.temperature(-1.0, 1.0).is_err());

        let lim = field(solve_exact_dirichlet(0.5, &settings()).unwrap());
        assert_eq!(lim.temperature(0.0, t).unwrap(), -5.0);
    }

    #[test]
    fn profile_is_negative_increasing_concave() {
        let sol = solve_exact(DimensionlessParams::new(2.0, 5.0).unwrap(), &settings()).unwrap();
        let f = field(sol);
        let t = 7.0;
        let s = f.free_boundary(t).unwrap();
        let values: Vec<f64> = (1..200).map(|i| f.temperature(s * i as f64 / 200.0, t).unwrap()).collect();
        assert!(values.iter().all(|&v| v < 0.0));
        assert!(values.windows(2).all(|w| w[1] > w[0]));
        assert!(values.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] < 0.0));
    }

    #[test]
    fn free_boundary_scaling() {
        let sol = solve_exact_dirichlet(1.0, &settings()).unwrap();
        let alpha = Diffusivity::new(2e-6).unwrap();
        assert_eq!(free_boundary_position(&sol, alpha, 0.0).unwrap(), 0.0);
        let s1 = free_boundary_position(&sol, alpha, 3.0).unwrap();
        let s4 = free_boundary_position(&sol, alpha, 12.0).unwrap();
        assert!((s4 - 2.0 * s1).abs() < 1e-18);
        assert!(free_boundary_position(&sol, alpha, -1.0).is_err());
    }

    #[test]
    fn ice_free_boundary_at_ten_seconds() {
        let (params, alpha) = crate::model::dimensionless_from_physical(&crate::model::PhysicalParams::ice()).unwrap();
        let sol = solve_exact(params, &settings()).unwrap();
        let s = free_boundary_position(&sol, alpha, 10.0).unwrap();
        // Zero pattern of the published error table puts s(10) in this band.
        assert!(s > 0.000825 && s < 0.000826, "s = {s}");
    }

    #[test]
    fn residuals_of_the_exact_solution() {
        let s = settings();
        for &(ste, bi) in &[(1e-2, 0.1), (0.1, 1.0), (1.0, 10.0), (5.0, 80.0), (50.0, 1e4)] {
            let sol = solve_exact(DimensionlessParams::new(ste, bi).unwrap(), &s).unwrap();
            for &t in &[0.5, 10.0, 1e3] {
                let r = exact_residuals(&field(sol), t, 0.4).unwrap();
                assert!(r.convective <= 1e-8, "{ste} {bi} {t}: {r:?}");
                assert!(r.stefan <= 1e-8, "{ste} {bi} {t}: {r:?}");
                assert!(r.heat_equation <= 1e-5, "{ste} {bi} {t}: {r:?}");
                assert!(r.interface_temp <= 1e-14);
            }
        }
        let lim = solve_exact_dirichlet(1.0, &s).unwrap();
        let r = exact_residuals(&field(lim), 10.0, 0.5).unwrap();
        assert!(r.convective <= 1e-15 && r.stefan <= 1e-8);
    }
}
