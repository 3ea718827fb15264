//! Reporting helpers for the acceptance run.

use mzinet::figures::Table;

/// Sub-checks of one criterion; it passes only if all of them hold.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn new() -> Self {
        Self { lines: Vec::new(), pass: true }
    }

    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.pass &= ok;
        self.lines.push(format!("    [{}] {}", if ok { "ok" } else { "miss" }, what.into()));
    }
}

/// Numeric column of a figure table; empty cells become NaN.
pub fn col(t: &Table, name: &str) -> Vec<f64> {
    let k = t.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("{} has no column {name}", t.name));
    t.rows.iter().map(|r| r[k].parse().unwrap_or(f64::NAN)).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
