//! Error metrics against the exact solution: free-boundary relative errors
//! over Biot sweeps, temperature absolute-error tables, and convergence gaps
//! towards the Dirichlet limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::TemperatureField;
use crate::model::{dimensionless_from_physical, Biot, Case, MethodId, PhysicalParams, Scheme};
use crate::numerics::SolveSettings;
use crate::par::Execution;
use crate::{hbim::CoefficientConvention, solve, solve_with};

/// Relative error of a method's `ξ` against the exact `ξ` of the same case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelErrorPoint {
    pub method: MethodId,
    pub ste: f64,
    pub bi: Biot,
    pub e_rel: f64,
}

/// `|ξ_method − ξ| / ξ`, both roots taken for the same boundary variant.
/// Since `s(t) = 2ξ√(αt)`, this is the relative error of the free boundary at
/// every time.
pub fn free_boundary_rel_error(scheme: Scheme, case: Case, settings: &SolveSettings) -> Result<RelErrorPoint> {
    let exact = solve(Scheme::Exact, case, settings)?;
    let approx = solve(scheme, case, settings)?;
    Ok(RelErrorPoint {
        method: approx.method,
        ste: case.ste(),
        bi: case.biot(),
        e_rel: (approx.xi - exact.xi).abs() / exact.xi,
    })
}

/// Relative errors of P1–P4 at one case, solving the exact root once.
pub fn rel_errors(case: Case, settings: &SolveSettings) -> Result<[f64; 4]> {
    let exact = solve(Scheme::Exact, case, settings)?.xi;
    let mut out = [0.0; 4];
    for (slot, scheme) in out.iter_mut().zip(Scheme::APPROXIMATE) {
        *slot = (solve(scheme, case, settings)?.xi - exact).abs() / exact;
    }
    Ok(out)
}

/// Relative errors of one method over a Biot grid, plus its limit value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries {
    pub method: MethodId,
    pub ste: f64,
    pub bi_grid: Vec<f64>,
    pub e_rel_values: Vec<f64>,
    pub e_rel_limit: f64,
}

fn check_grid(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Argument(format!("{what} is empty")));
    }
    if let Some(&v) = grid.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Argument(format!("{what} has a non-positive entry {v}")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument(format!("{what} is not strictly increasing")));
    }
    Ok(())
}

pub fn bi_sweep(scheme: Scheme, ste: f64, bi_grid: &[f64], settings: &SolveSettings) -> Result<SweepSeries> {
    bi_sweep_with(Execution::default(), scheme, ste, bi_grid, settings)
}

pub fn bi_sweep_with(
    execution: Execution,
    scheme: Scheme,
    ste: f64,
    bi_grid: &[f64],
    settings: &SolveSettings,
) -> Result<SweepSeries> {
    check_grid(bi_grid, "bi grid")?;
    let limit = free_boundary_rel_error(scheme, Case::dirichlet(ste)?, settings)?;
    let points = execution.map(bi_grid, |&bi| {
        Case::convective(ste, bi).and_then(|case| free_boundary_rel_error(scheme, case, settings))
    });
    let e_rel_values = points.into_iter().map(|p| p.map(|p| p.e_rel)).collect::<Result<_>>()?;
    Ok(SweepSeries {
        method: MethodId::new(scheme, crate::model::Boundary::Convective),
        ste,
        bi_grid: bi_grid.to_vec(),
        e_rel_values,
        e_rel_limit: limit.e_rel,
    })
}

/// All four methods over one grid, in P1..P4 order; each grid point solves
/// the exact root once.
pub fn sweep_all(ste: f64, bi_grid: &[f64], settings: &SolveSettings) -> Result<[SweepSeries; 4]> {
    sweep_all_with(Execution::default(), ste, bi_grid, settings)
}

pub fn sweep_all_with(
    execution: Execution,
    ste: f64,
    bi_grid: &[f64],
    settings: &SolveSettings,
) -> Result<[SweepSeries; 4]> {
    check_grid(bi_grid, "bi grid")?;
    let limits = rel_errors(Case::dirichlet(ste)?, settings)?;
    let rows = execution
        .map(bi_grid, |&bi| Case::convective(ste, bi).and_then(|case| rel_errors(case, settings)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(std::array::from_fn(|i| SweepSeries {
        method: MethodId::new(Scheme::APPROXIMATE[i], crate::model::Boundary::Convective),
        ste,
        bi_grid: bi_grid.to_vec(),
        e_rel_values: rows.iter().map(|r| r[i]).collect(),
        e_rel_limit: limits[i],
    }))
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    check_span(lo, hi, n)?;
    if lo <= 0.0 {
        return Err(Error::Argument(format!("log grid needs a positive start, got {lo}")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { 10f64.powf(a + step * i as f64) })
        .collect())
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    check_span(lo, hi, n)?;
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect())
}

fn check_span(lo: f64, hi: f64, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Argument("grid needs at least one point".into()));
    }
    if !(lo.is_finite() && hi.is_finite()) || (n > 1 && lo >= hi) {
        return Err(Error::Argument(format!("invalid grid span [{lo}, {hi}]")));
    }
    Ok(())
}

/// 60 log-spaced points on `[0.1, 1000]` followed by `1e4, 1e5, 1e6`.
pub fn default_bi_grid() -> Vec<f64> {
    let mut grid = log_grid(0.1, 1e3, 60).expect("static grid");
    grid.extend([1e4, 1e5, 1e6]);
    grid
}

/// Relative errors that differ by less than this are treated as tied.
pub const RANK_TIE_TOLERANCE: f64 = 1e-9;

/// Methods (in P1..P4 order) whose error is within `tie` of the row minimum.
pub fn best_methods(row: &[f64; 4], tie: f64) -> Vec<Scheme> {
    let min = row.iter().copied().fold(f64::INFINITY, f64::min);
    Scheme::APPROXIMATE
        .into_iter()
        .zip(row)
        .filter(|(_, &e)| e - min <= tie)
        .map(|(s, _)| s)
        .collect()
}

/// `(bi, |ξ(bi) − ξ_limit|)` for each entry of `bi_list`.
pub fn convergence_gap(scheme: Scheme, ste: f64, bi_list: &[f64], settings: &SolveSettings) -> Result<Vec<(f64, f64)>> {
    check_grid(bi_list, "bi list")?;
    let limit = solve(scheme, Case::dirichlet(ste)?, settings)?.xi;
    bi_list
        .iter()
        .map(|&bi| Ok((bi, (solve(scheme, Case::convective(ste, bi)?, settings)?.xi - limit).abs())))
        .collect()
}

/// Absolute temperature errors of P1–P4 against the exact solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTable {
    pub t_probe: f64,
    pub positions: Vec<f64>,
    /// `columns[i][j]` is the error of `P(i+1)` at `positions[j]`.
    pub columns: [Vec<f64>; 4],
    pub params: PhysicalParams,
}

impl ErrorTable {
    pub fn rows(&self) -> impl Iterator<Item = (f64, [f64; 4])> + '_ {
        self.positions
            .iter()
            .enumerate()
            .map(|(j, &x)| (x, std::array::from_fn(|i| self.columns[i][j])))
    }
}

pub fn temperature_error_table(
    t_probe: f64,
    positions: &[f64],
    physical: &PhysicalParams,
    settings: &SolveSettings,
) -> Result<ErrorTable> {
    temperature_error_table_with(t_probe, positions, physical, settings, CoefficientConvention::Consistent)
}

pub fn temperature_error_table_with(
    t_probe: f64,
    positions: &[f64],
    physical: &PhysicalParams,
    settings: &SolveSettings,
    convention: CoefficientConvention,
) -> Result<ErrorTable> {
    crate::exact::check_time(t_probe)?;
    if positions.is_empty() {
        return Err(Error::Argument("positions are empty".into()));
    }
    if let Some(&x) = positions.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Domain { what: "position", value: x });
    }
    if positions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("positions are not strictly increasing".into()));
    }
    let (params, alpha) = dimensionless_from_physical(physical)?;
    let case = Case::Convective(params);
    let theta = physical.theta_inf;
    let exact = TemperatureField::new(solve(Scheme::Exact, case, settings)?, alpha, theta)?;
    let exact_values = positions
        .iter()
        .map(|&x| exact.temperature(x, t_probe))
        .collect::<Result<Vec<_>>>()?;

    let mut columns: [Vec<f64>; 4] = Default::default();
    for (column, scheme) in columns.iter_mut().zip(Scheme::APPROXIMATE) {
        let field = TemperatureField::new(solve_with(scheme, case, settings, convention)?, alpha, theta)?;
        *column = positions
            .iter()
            .zip(&exact_values)
            .map(|(&x, &te)| Ok((te - field.temperature(x, t_probe)?).abs()))
            .collect::<Result<_>>()?;
    }
    Ok(ErrorTable {
        t_probe,
        positions: positions.to_vec(),
        columns,
        params: *physical,
    })
}

/// `0, 0.0001, …, 0.001` m.
pub fn table1_positions() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 1e4).collect()
}

/// `0.000820, 0.000821, …, 0.000830` m.
pub fn table2_positions() -> Vec<f64> {
    (820..=830).map(|i| i as f64 / 1e6).collect()
}
