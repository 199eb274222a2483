use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use stefan_hbim::analysis::{ErrorTable, SweepSeries};
use stefan_hbim::verify::VerifyReport;
use stefan_hbim::{Biot, SimilaritySolution};

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// 12-significant-digit text; exponent form outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let r = sig12(x);
    let a = r.abs();
    if r == 0.0 || (1e-4..1e15).contains(&a) {
        r.to_string()
    } else {
        format!("{r:e}")
    }
}

fn dec6(x: f64) -> f64 {
    format!("{x:.6}").parse().unwrap_or(x)
}

fn biot_json(bi: Biot) -> Value {
    match bi {
        Biot::Finite(b) => json!(sig12(b)),
        Biot::Infinite => json!("inf"),
    }
}

pub fn solution_json(sol: &SimilaritySolution, residual: f64) -> Value {
    json!({
        "method": sol.method.to_string(),
        "ste": sig12(sol.ste),
        "bi": biot_json(sol.biot),
        "xi": sig12(sol.xi),
        "A": sig12(sol.coeff_a),
        "B": sig12(sol.coeff_b),
        "polynomial_residual": sig12(residual),
    })
}

pub fn solution_csv(sol: &SimilaritySolution, residual: f64) -> String {
    let bi = match sol.biot {
        Biot::Finite(b) => num(b),
        Biot::Infinite => "inf".into(),
    };
    format!(
        "method,ste,bi,xi,A,B,polynomial_residual\n{},{},{},{},{},{},{}\n",
        sol.method,
        num(sol.ste),
        bi,
        num(sol.xi),
        num(sol.coeff_a),
        num(sol.coeff_b),
        num(residual)
    )
}

const TABLE_COLUMNS: [&str; 4] = ["E_abs_T1", "E_abs_T2", "E_abs_T3", "E_abs_T4"];
const SWEEP_COLUMNS: [&str; 4] = ["e_rel_p1", "e_rel_p2", "e_rel_p3", "e_rel_p4"];

pub fn table_csv(table: &ErrorTable) -> String {
    let mut out = format!("x,{}\n", TABLE_COLUMNS.join(","));
    for (x, row) in table.rows() {
        let _ = writeln!(out, "{x:.6},{:.6},{:.6},{:.6},{:.6}", row[0], row[1], row[2], row[3]);
    }
    out
}

pub fn table_json(table: &ErrorTable) -> Value {
    let rows: Vec<Value> = table
        .rows()
        .map(|(x, row)| {
            let mut obj = Map::new();
            obj.insert("x".into(), json!(dec6(x)));
            for (name, v) in TABLE_COLUMNS.iter().zip(row) {
                obj.insert((*name).into(), json!(dec6(v)));
            }
            Value::Object(obj)
        })
        .collect();
    json!({ "t": table.t_probe, "rows": rows })
}

pub fn sweep_csv(series: &[SweepSeries; 4]) -> String {
    let mut out = format!("bi,{}\n", SWEEP_COLUMNS.join(","));
    for (j, bi) in series[0].bi_grid.iter().enumerate() {
        let _ = write!(out, "{}", num(*bi));
        for s in series {
            let _ = write!(out, ",{}", num(s.e_rel_values[j]));
        }
        out.push('\n');
    }
    let limits: Vec<String> = series.iter().map(|s| num(s.e_rel_limit)).collect();
    let _ = writeln!(out, "# limit: {}", limits.join(","));
    out
}

pub fn sweep_json(series: &[SweepSeries; 4]) -> Value {
    let rows: Vec<Value> = series[0]
        .bi_grid
        .iter()
        .enumerate()
        .map(|(j, bi)| {
            let mut obj = Map::new();
            obj.insert("bi".into(), json!(sig12(*bi)));
            for (name, s) in SWEEP_COLUMNS.iter().zip(series) {
                obj.insert((*name).into(), json!(sig12(s.e_rel_values[j])));
            }
            Value::Object(obj)
        })
        .collect();
    let limit: Map<String, Value> = SWEEP_COLUMNS
        .iter()
        .zip(series)
        .map(|(name, s)| ((*name).to_string(), json!(sig12(s.e_rel_limit))))
        .collect();
    json!({ "ste": sig12(series[0].ste), "rows": rows, "limit": limit })
}

pub fn verify_text(report: &VerifyReport) -> String {
    let mut out = String::new();
    for check in &report.checks {
        let _ = writeln!(out, "{check}");
        for failure in &check.failures {
            let _ = writeln!(out, "  {failure}");
        }
    }
    let _ = writeln!(out, "{}", if report.passed() { "all checks passed" } else { "verification failed" });
    out
}

pub fn verify_json(report: &VerifyReport) -> Value {
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed(), "cases": c.evaluated, "failures": c.failures }))
        .collect();
    json!({ "passed": report.passed(), "checks": checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_to_twelve_digits() {
        assert_eq!(sig12(0.620_062_633_313_595_5), 0.620062633314);
        assert_eq!(sig12(1.0), 1.0);
        assert_eq!(sig12(-2.5e-13), -2.5e-13);
        assert_eq!(sig12(123_456_789_012_345.0), 123_456_789_012_000.0);
    }

    #[test]
    fn number_text() {
        assert_eq!(num(0.0), "0");
        assert_eq!(num(4.0), "4");
        assert_eq!(num(0.000166415342325), "0.000166415342325");
        assert_eq!(num(6.68352955447e-17), "6.68352955447e-17");
        assert_eq!(num(4.16417776383e-5), "4.16417776383e-5");
    }
}
