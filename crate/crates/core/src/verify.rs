//! Invariant suite over a grid of (Ste, Bi) points.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exact::{exact_residuals, TemperatureField};
use crate::hbim::{
    endpoint_signs, polynomial_residual, residual_suite, solve_approx_faulted, solve_approx_limit, xi_bounds,
    POLYNOMIAL_RESIDUAL_TOL,
};
use crate::model::{Case, DimensionlessParams, Diffusivity, Scheme, SimilaritySolution};
use crate::numerics::SolveSettings;
use crate::par::Execution;
use crate::{solve, Result};

pub const DEFAULT_STE_GRID: [f64; 6] = [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2];
pub const DEFAULT_BI_GRID: [f64; 6] = [1e-1, 1.0, 1e1, 1e2, 1e3, 1e6];
pub const QUICK_STE_GRID: [f64; 3] = [1e-3, 1.0, 1e2];
pub const QUICK_BI_GRID: [f64; 3] = [1e-1, 1e1, 1e6];

pub const RESIDUAL_TOL: f64 = 1e-6;
pub const LIMIT_GAP_TOL: f64 = 1e-4;

const PROBE_TIME: f64 = 10.0;
const PROBE_THETA: f64 = 5.0;
const PROBE_ALPHA: f64 = 1.15e-6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Use the reduced grid.
    pub quick: bool,
    /// Negate the constant term of this scheme's polynomial everywhere.
    pub fault: Option<Scheme>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub evaluated: usize,
    pub failures: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} cases", self.name, self.evaluated)?;
        if !self.passed() {
            write!(f, ", {} failed", self.failures.len())?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ste_grid: Vec<f64>,
    pub bi_grid: Vec<f64>,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

#[derive(Default)]
struct Tally {
    evaluated: usize,
    failures: Vec<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.evaluated += 1;
        if !ok {
            self.failures.push(detail());
        }
    }
}

const CHECKS: [&str; 8] = [
    "endpoint-signs",
    "root-interval",
    "positivity",
    "boundary-bound",
    "polynomial-residual",
    "residual-suite",
    "limit-convergence",
    "exact-residuals",
];

pub fn run(options: VerifyOptions, settings: &SolveSettings) -> Result<VerifyReport> {
    let (ste_grid, bi_grid): (&[f64], &[f64]) = if options.quick {
        (&QUICK_STE_GRID, &QUICK_BI_GRID)
    } else {
        (&DEFAULT_STE_GRID, &DEFAULT_BI_GRID)
    };
    let points: Vec<(f64, f64)> = ste_grid
        .iter()
        .flat_map(|&ste| bi_grid.iter().map(move |&bi| (ste, bi)))
        .collect();
    let alpha = Diffusivity::new(PROBE_ALPHA)?;

    let per_point = Execution::default().map(&points, |&(ste, bi)| check_point(ste, bi, options, alpha, settings));
    let mut tallies: Vec<Tally> = CHECKS.iter().map(|_| Tally::default()).collect();
    for point in per_point {
        for (tally, part) in tallies.iter_mut().zip(point?) {
            tally.evaluated += part.evaluated;
            tally.failures.extend(part.failures);
        }
    }

    let mut convergence = Tally::default();
    for &ste in ste_grid {
        for scheme in Scheme::APPROXIMATE {
            let gap = solve(scheme, Case::convective(ste, 1e6)?, settings)
                .and_then(|conv| Ok((conv.xi - solve_approx_limit(scheme, ste)?.xi).abs()));
            match gap {
                Ok(gap) => convergence.record(gap <= LIMIT_GAP_TOL, || {
                    format!("{scheme} Ste={ste}: |xi(1e6) - xi_inf| = {gap:e}")
                }),
                Err(e) => convergence.record(false, || format!("{scheme} Ste={ste}: {e}")),
            }
        }
    }
    tallies[6] = convergence;

    let checks = CHECKS
        .iter()
        .zip(tallies)
        .map(|(name, t)| CheckResult {
            name: name.to_string(),
            evaluated: t.evaluated,
            failures: t.failures,
        })
        .collect();
    Ok(VerifyReport {
        ste_grid: ste_grid.to_vec(),
        bi_grid: bi_grid.to_vec(),
        checks,
    })
}

fn check_point(
    ste: f64,
    bi: f64,
    options: VerifyOptions,
    alpha: Diffusivity,
    settings: &SolveSettings,
) -> Result<Vec<Tally>> {
    let params = DimensionlessParams::new(ste, bi)?;
    let case = Case::Convective(params);
    let bounds = xi_bounds(params)?;
    let mut t: Vec<Tally> = CHECKS.iter().map(|_| Tally::default()).collect();
    let at = |scheme: Scheme| format!("{scheme} Ste={ste} Bi={bi}");

    for scheme in Scheme::APPROXIMATE {
        let flipped = (options.fault == Some(scheme)).then_some(0);
        let ends = endpoint_signs(scheme, case, flipped)?;
        t[0].record(ends.as_proved, || {
            format!("{}: p({}) = {:e}, p({}) = {:e}", at(scheme), ends.lo, ends.p_lo, ends.hi, ends.p_hi)
        });

        let sol = match flipped {
            Some(d) => solve_approx_faulted(scheme, params, settings, d),
            None => solve(scheme, case, settings),
        };
        let sol: SimilaritySolution = match sol {
            Ok(sol) => sol,
            Err(e) => {
                for tally in &mut t[1..6] {
                    tally.record(false, || format!("{}: {e}", at(scheme)));
                }
                continue;
            }
        };
        let (lo, hi) = match scheme {
            Scheme::P1 | Scheme::P2 => (bounds.xi_min, bounds.xi_max),
            _ => (0.0, 3f64.sqrt()),
        };
        t[1].record(sol.xi > lo && sol.xi < hi, || format!("{}: xi = {} not in ({lo}, {hi})", at(scheme), sol.xi));
        t[2].record(sol.coeff_a > 0.0 && sol.coeff_b > 0.0, || {
            format!("{}: A = {}, B = {}", at(scheme), sol.coeff_a, sol.coeff_b)
        });
        t[3].record(sol.coeff_a + sol.coeff_b < 1.0, || {
            format!("{}: A + B = {}", at(scheme), sol.coeff_a + sol.coeff_b)
        });
        let residual = polynomial_residual(&sol)?;
        t[4].record(residual <= POLYNOMIAL_RESIDUAL_TOL, || format!("{}: residual {residual:e}", at(scheme)));
        match residual_suite(sol.method, &sol, PROBE_THETA, alpha, PROBE_TIME) {
            Ok(report) => t[5].record(report.max() <= RESIDUAL_TOL, || format!("{}: {report:?}", at(scheme))),
            Err(e) => t[5].record(false, || format!("{}: {e}", at(scheme))),
        }
    }

    let exact = solve(Scheme::Exact, case, settings).and_then(|sol| {
        let field = TemperatureField::new(sol, alpha, PROBE_THETA)?;
        exact_residuals(&field, PROBE_TIME, 0.5)
    });
    match exact {
        Ok(r) => t[7].record(r.convective <= 1e-8 && r.stefan <= 1e-8 && r.heat_equation <= 1e-5, || {
            format!("exact Ste={ste} Bi={bi}: {r:?}")
        }),
        Err(e) => t[7].record(false, || format!("exact Ste={ste} Bi={bi}: {e}")),
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let report = run(VerifyOptions::default(), &SolveSettings::default()).unwrap();
        for check in &report.checks {
            assert!(check.passed(), "{check}: {:?}", check.failures);
            assert!(check.evaluated > 0);
        }
        assert_eq!(report.checks[0].evaluated, 36 * 4);
    }

    #[test]
    fn quick_suite_is_smaller() {
        let report = run(VerifyOptions { quick: true, fault: None }, &SolveSettings::default()).unwrap();
        assert!(report.passed());
        assert_eq!(report.checks[0].evaluated, 9 * 4);
    }

    #[test]
    fn injected_fault_fails_the_endpoint_check() {
        let options = VerifyOptions {
            quick: true,
            fault: Some(Scheme::P3),
        };
        let report = run(options, &SolveSettings::default()).unwrap();
        assert!(!report.passed());
        let endpoint = &report.checks[0];
        assert_eq!(endpoint.name, "endpoint-signs");
        assert_eq!(endpoint.failures.len(), 9);
        assert!(endpoint.to_string().starts_with("FAIL endpoint-signs"));
    }
}
