//! Datasets behind the published figures, as CSV-ready tables.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::network_model::{squeeze_factors, CoefficientVector};
use crate::optimization::{
    analytic_optimum_vave, asymptotic_slack, bounds_emom, gain, gain2_analytic, gain2_vave_exact, gain4_curve,
    minimize_emom, minimize_eqcr, v_three, v_two, Constraint, Objective, OptimizationProblem, SolverOptions,
    SolverStatus, Strategy,
};
use crate::spectra::{
    ensemble_heisenberg_saturation, ensemble_optimal_squeezing, ensemble_optimal_variance, ensemble_s_statistic,
    SpectrumObjective,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Desk,
    Paper,
}

impl Scale {
    pub fn sweep_points(self) -> usize {
        match self {
            Scale::Desk => 25,
            Scale::Paper => 60,
        }
    }

    pub fn samples(self) -> usize {
        match self {
            Scale::Desk => 1_000,
            Scale::Paper => 10_000,
        }
    }

    fn angle_points(self) -> (usize, usize) {
        match self {
            Scale::Desk => (32, 16),
            Scale::Paper => (64, 32),
        }
    }
}

impl FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Scale::Desk),
            "paper" => Ok(Scale::Paper),
            _ => Err(Error::InvalidConfig(format!("unknown scale {s}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureName {
    Fig2a,
    Fig2bc,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl FigureName {
    pub const ALL: [FigureName; 8] = [
        FigureName::Fig2a,
        FigureName::Fig2bc,
        FigureName::Fig3,
        FigureName::Fig4,
        FigureName::Fig5,
        FigureName::Fig6,
        FigureName::Fig7,
        FigureName::Fig8,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureName::Fig2a => "fig2a",
            FigureName::Fig2bc => "fig2bc",
            FigureName::Fig3 => "fig3",
            FigureName::Fig4 => "fig4",
            FigureName::Fig5 => "fig5",
            FigureName::Fig6 => "fig6",
            FigureName::Fig7 => "fig7",
            FigureName::Fig8 => "fig8",
        }
    }
}

impl FromStr for FigureName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FigureName::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown figure {s}")))
    }
}

/// One CSV file's worth of rows; cells are preformatted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Rows whose computation failed or whose invariant check did not hold.
    pub failures: usize,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            failures: 0,
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// A row of empty cells tagged with the error name in the last column.
    fn push_failure(&mut self, lead: Vec<String>, err: &Error) {
        let mut row = lead;
        while row.len() + 1 < self.header.len() {
            row.push(String::new());
        }
        row.push(err.name().to_string());
        self.failures += 1;
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureOutput {
    pub tables: Vec<Table>,
    pub parameters: BTreeMap<String, Value>,
}

impl FigureOutput {
    pub fn failures(&self) -> usize {
        self.tables.iter().map(|t| t.failures).sum()
    }
}

fn f(x: f64) -> String {
    format!("{x}")
}

fn s(x: impl Display) -> String {
    x.to_string()
}

fn status(st: SolverStatus) -> String {
    match st {
        SolverStatus::Converged => "converged",
        SolverStatus::MaxIter => "max_iter",
        SolverStatus::Analytic => "analytic",
    }
    .into()
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
}

/// `n` equally spaced points from `lo` to `hi`; the end point is excluded when `open`.
pub fn lin_grid(lo: f64, hi: f64, n: usize, open: bool) -> Vec<f64> {
    let div = if open { n } else { n.saturating_sub(1).max(1) };
    (0..n).map(|i| lo + (hi - lo) * i as f64 / div as f64).collect()
}

fn point_options(base: &SolverOptions, index: usize) -> SolverOptions {
    SolverOptions { seed: base.seed.wrapping_add(index as u64), ..*base }
}

pub const FIG_NS: f64 = 100.0;
pub const FIG3_NT: f64 = 1e6;
pub const FIG4_NC: f64 = 1e8;
pub const ENSEMBLE_D: usize = 10;

/// Fixed-squeezing optimum for the generalized average, `d = 2`.
pub fn fig2a(scale: Scale, options: &SolverOptions) -> FigureOutput {
    let d = 2;
    let v = CoefficientVector::average(d);
    let (e2r, _) = squeeze_factors(FIG_NS);
    let mut t = Table::new(
        "fig2a",
        &[
            "n_t",
            "emom_min",
            "eqcr_min",
            "emom_closed",
            "eqcr_closed",
            "sn",
            "hl",
            "homodyne",
            "three_halves",
            "transient",
            "emom_valid",
            "sandwich_ok",
            "emom_status",
            "eqcr_status",
            "status",
        ],
    );
    for (i, n_t) in log_grid(1e3, 1e9, scale.sweep_points()).into_iter().enumerate() {
        let o = point_options(options, i);
        let res = (|| -> Result<Vec<String>> {
            let p = OptimizationProblem::new(
                v.clone(),
                n_t,
                Constraint::C3 { squeezed_photons: FIG_NS },
                Strategy::Entangled,
            )?;
            let m = minimize_emom(&p, &o)?;
            let q = minimize_eqcr(&p, &o)?;
            let b = bounds_emom(&v, n_t, FIG_NS);
            let slack = 1e-9 + asymptotic_slack(d, n_t, FIG_NS);
            let sandwich = !b.valid
                || (m.minimum_variance >= b.lower * (1.0 - slack) && m.minimum_variance <= b.upper * (1.0 + slack));
            Ok(vec![
                f(n_t),
                f(m.minimum_variance),
                f(q.minimum_variance),
                f(analytic_optimum_vave(d, n_t, FIG_NS, Objective::Emom).value),
                f(analytic_optimum_vave(d, n_t, FIG_NS, Objective::Eqcr).value),
                f(1.0 / n_t),
                f(1.0 / (n_t * n_t)),
                f(1.0 / (e2r * n_t)),
                f(n_t.powf(-1.5)),
                f(FIG_NS / (n_t * n_t)),
                s(b.valid),
                s(sandwich),
                status(m.solver_status),
                status(q.solver_status),
                if sandwich { "ok".into() } else { "invariant_violation".into() },
            ])
        })();
        match res {
            Ok(row) => {
                if row.last().map(String::as_str) != Some("ok") {
                    t.failures += 1;
                }
                t.push(row)
            }
            Err(e) => t.push_failure(vec![f(n_t)], &e),
        }
    }
    FigureOutput {
        tables: vec![t],
        parameters: params(&[("d", json!(d)), ("n_s", json!(FIG_NS)), ("ns_e2r", json!(FIG_NS * e2r))]),
    }
}

/// Optimum over squeezing as well, `d = 2`.
pub fn fig2bc(scale: Scale, options: &SolverOptions) -> FigureOutput {
    let d = 2;
    let v = CoefficientVector::average(d);
    let mut t = Table::new(
        "fig2bc",
        &[
            "n_t",
            "emom_min",
            "emom_n_s",
            "eqcr_min",
            "eqcr_n_s",
            "three_halves",
            "hl",
            "emom_status",
            "eqcr_status",
            "status",
        ],
    );
    for (i, n_t) in log_grid(1e3, 1e9, scale.sweep_points()).into_iter().enumerate() {
        let o = point_options(options, i);
        let res = (|| -> Result<Vec<String>> {
            let p = OptimizationProblem::new(v.clone(), n_t, Constraint::C1, Strategy::Entangled)?;
            let m = minimize_emom(&p, &o)?;
            let q = minimize_eqcr(&p, &o)?;
            Ok(vec![
                f(n_t),
                f(m.minimum_variance),
                f(m.arg_squeezed_photons[0]),
                f(q.minimum_variance),
                f(q.arg_squeezed_photons[0]),
                f(n_t.powf(-1.5)),
                f(1.0 / (n_t * n_t)),
                status(m.solver_status),
                status(q.solver_status),
                "ok".into(),
            ])
        })();
        match res {
            Ok(row) => t.push(row),
            Err(e) => t.push_failure(vec![f(n_t)], &e),
        }
    }
    FigureOutput { tables: vec![t], parameters: params(&[("d", json!(d))]) }
}

/// Gains under the first three constraints at one `v`.
pub fn gain_row(v: &CoefficientVector, n_t: f64, n_s: f64, options: &SolverOptions) -> Result<[f64; 3]> {
    let g1 = gain(Constraint::C1, v, n_t, options)?.gain;
    let g2 = gain(Constraint::C2 { squeezed_photons: n_s }, v, n_t, options)?.gain;
    let g3 = gain(Constraint::C3 { squeezed_photons: n_s }, v, n_t, options)?.gain;
    Ok([g1, g2, g3])
}

const GAIN_FLOOR: f64 = 1.0 - 1e-6;

/// Gains versus the direction of `v` for `d = 2` and `d = 3`.
pub fn fig3(scale: Scale, options: &SolverOptions) -> FigureOutput {
    let (n2, n3) = scale.angle_points();
    let mut t2 = Table::new("fig3_d2", &["phi_v", "v1", "v2", "g1", "g2", "g3", "g2_analytic", "gain_ok", "status"]);
    for (i, phi) in lin_grid(0.0, std::f64::consts::TAU, n2, true).into_iter().enumerate() {
        let v = v_two(phi);
        match gain_row(&v, FIG3_NT, FIG_NS, &point_options(options, i)) {
            Ok(g) => {
                let ok = g.iter().all(|x| *x >= GAIN_FLOOR);
                if !ok {
                    t2.failures += 1;
                }
                let e = v.entries();
                t2.push(vec![
                    f(phi),
                    f(e[0]),
                    f(e[1]),
                    f(g[0]),
                    f(g[1]),
                    f(g[2]),
                    f(gain2_analytic(&v)),
                    s(ok),
                    if ok { "ok".into() } else { "invariant_violation".into() },
                ]);
            }
            Err(e) => t2.push_failure(vec![f(phi)], &e),
        }
    }
    let mut t3 = Table::new(
        "fig3_d3",
        &["theta_v", "phi_v", "v1", "v2", "v3", "g1", "g2", "g3", "g2_analytic", "gain_ok", "status"],
    );
    let half = std::f64::consts::FRAC_PI_2;
    let mut idx = 0;
    for theta in lin_grid(0.0, half, n3, false) {
        for phi in lin_grid(0.0, half, n3, false) {
            let v = v_three(theta, phi);
            match gain_row(&v, FIG3_NT, FIG_NS, &point_options(options, idx)) {
                Ok(g) => {
                    let ok = g.iter().all(|x| *x >= GAIN_FLOOR);
                    if !ok {
                        t3.failures += 1;
                    }
                    let e = v.entries();
                    t3.push(vec![
                        f(theta),
                        f(phi),
                        f(e[0]),
                        f(e[1]),
                        f(e[2]),
                        f(g[0]),
                        f(g[1]),
                        f(g[2]),
                        f(gain2_analytic(&v)),
                        s(ok),
                        if ok { "ok".into() } else { "invariant_violation".into() },
                    ]);
                }
                Err(e) => t3.push_failure(vec![f(theta), f(phi)], &e),
            }
            idx += 1;
        }
    }
    FigureOutput { tables: vec![t2, t3], parameters: params(&[("n_t", json!(FIG3_NT)), ("n_s", json!(FIG_NS))]) }
}

/// Second-constraint gain at the generalized average versus `d`.
pub fn fig4(scale: Scale) -> FigureOutput {
    let (e2r, _) = squeeze_factors(FIG_NS);
    let mut t = Table::new("fig4", &["d", "g2", "ref_d", "ref_e2r", "approximate"]);
    let mut ds: Vec<usize> = log_grid(1.0, 1e5, scale.sweep_points()).into_iter().map(|x| x.round() as usize).collect();
    ds.dedup();
    for d in ds {
        let g = gain2_vave_exact(d, FIG4_NC, FIG_NS);
        t.push(vec![s(d), f(g.value), s(d), f(e2r), s(g.approximate)]);
    }
    FigureOutput { tables: vec![t], parameters: params(&[("n_c", json!(FIG4_NC)), ("n_s", json!(FIG_NS))]) }
}

fn ensemble_grid(scale: Scale) -> Vec<f64> {
    log_grid(1e3, 1e9, scale.sweep_points())
}

/// Ensemble means of the spectral optima at fixed squeezing.
pub fn fig5(scale: Scale, seed: u64) -> FigureOutput {
    let d = ENSEMBLE_D;
    let samples = scale.samples();
    let (_, em2r) = squeeze_factors(FIG_NS);
    let s_stat = ensemble_s_statistic(d, samples, seed);
    let sm = s_stat.mean;
    let mut t = Table::new(
        "fig5",
        &[
            "n_t",
            "emom_mean",
            "emom_rms",
            "emom_se",
            "eqcr_mean",
            "eqcr_rms",
            "emom_intermediate",
            "homodyne",
            "three_halves",
            "transient",
            "s_mean",
            "samples",
            "seed",
            "status",
        ],
    );
    for n_t in ensemble_grid(scale) {
        let res = (|| -> Result<Vec<String>> {
            let m = ensemble_optimal_variance(d, n_t, FIG_NS, samples, seed, SpectrumObjective::Emom)?;
            let q = ensemble_optimal_variance(d, n_t, FIG_NS, samples, seed, SpectrumObjective::Eqcr)?;
            Ok(vec![
                f(n_t),
                f(m.mean),
                f(m.rms),
                f(m.standard_error()),
                f(q.mean),
                f(q.rms),
                f(em2r / n_t + FIG_NS * sm / (n_t * n_t)),
                f(em2r / n_t),
                f(sm.sqrt() / n_t.powf(1.5)),
                f(FIG_NS * sm / (n_t * n_t)),
                f(sm),
                s(samples),
                s(seed),
                "ok".into(),
            ])
        })();
        match res {
            Ok(row) => t.push(row),
            Err(e) => t.push_failure(vec![f(n_t)], &e),
        }
    }
    FigureOutput {
        tables: vec![t],
        parameters: params(&[("d", json!(d)), ("n_s", json!(FIG_NS)), ("samples", json!(samples))]),
    }
}

/// Ensemble minimum over squeezing of the moment optimum.
pub fn fig6(scale: Scale, seed: u64) -> FigureOutput {
    let samples = scale.samples();
    let header = [
        "n_t",
        "d",
        "min_mean",
        "min_rms",
        "n_s_mean",
        "n_s_rms",
        "min_closed",
        "n_s_pred",
        "s_mean",
        "samples",
        "seed",
        "status",
    ];
    let row = |d: usize, n_t: f64, t: &mut Table| {
        let sm = ensemble_s_statistic(d, samples, seed).mean;
        match ensemble_optimal_squeezing(d, n_t, samples, seed) {
            Ok((m, a)) => t.push(vec![
                f(n_t),
                s(d),
                f(m.mean),
                f(m.rms),
                f(a.mean),
                f(a.rms),
                f(sm.sqrt() / n_t.powf(1.5)),
                f((n_t / (4.0 * sm)).sqrt()),
                f(sm),
                s(samples),
                s(seed),
                "ok".into(),
            ]),
            Err(e) => t.push_failure(vec![f(n_t), s(d)], &e),
        }
    };
    let mut a = Table::new("fig6a", &header);
    for n_t in ensemble_grid(scale) {
        row(ENSEMBLE_D, n_t, &mut a);
    }
    let mut b = Table::new("fig6b", &header);
    let ds: &[usize] = match scale {
        Scale::Desk => &[2, 3, 4, 5, 6, 8, 10, 12, 15, 20],
        Scale::Paper => &[2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 16, 18, 20, 25, 30],
    };
    for &d in ds {
        row(d, 1e6, &mut b);
    }
    FigureOutput { tables: vec![a, b], parameters: params(&[("d", json!(ENSEMBLE_D)), ("samples", json!(samples))]) }
}

/// Ensemble minimum over squeezing of the Cramér–Rao optimum.
pub fn fig7(scale: Scale, seed: u64) -> FigureOutput {
    let samples = scale.samples();
    let mut t = Table::new(
        "fig7",
        &["n_t", "min_mean", "min_rms", "normalized", "n_s_mean", "hl", "samples", "seed", "status"],
    );
    for n_t in ensemble_grid(scale) {
        match ensemble_heisenberg_saturation(ENSEMBLE_D, n_t, samples, seed) {
            Ok((m, a)) => t.push(vec![
                f(n_t),
                f(m.mean),
                f(m.rms),
                f(n_t * n_t * m.mean),
                f(a.mean),
                f(1.0 / (n_t * n_t)),
                s(samples),
                s(seed),
                "ok".into(),
            ]),
            Err(e) => t.push_failure(vec![f(n_t)], &e),
        }
    }
    FigureOutput { tables: vec![t], parameters: params(&[("d", json!(ENSEMBLE_D)), ("samples", json!(samples))]) }
}

/// Sweep for the fourth-constraint gain; starts just above the feasibility edge `n_T = d n_s`.
pub fn fig8_grid(scale: Scale) -> Vec<f64> {
    let d = ENSEMBLE_D as f64;
    log_grid(1.25 * d * FIG_NS, 1e10, scale.sweep_points())
}

/// Fourth-constraint gain and its Cramér–Rao variant, `d = 10`.
pub fn fig8(scale: Scale, options: &SolverOptions) -> FigureOutput {
    let d = ENSEMBLE_D;
    let mut t = Table::new(
        "fig8",
        &["n_t", "g4", "g4_tilde", "g4_analytic", "pole_excluded", "entangled_emom", "tilde_ok", "status"],
    );
    for (i, n_t) in fig8_grid(scale).into_iter().enumerate() {
        match gain4_curve(d, FIG_NS, &[n_t], &point_options(options, i)) {
            Ok(rows) => {
                let r = &rows[0];
                let ok = r.g4_tilde <= 1.0 + 1e-6;
                if !ok {
                    t.failures += 1;
                }
                t.push(vec![
                    f(r.n_t),
                    r.g4.map(f).unwrap_or_default(),
                    f(r.g4_tilde),
                    f(r.analytic),
                    s(r.pole_excluded),
                    f(r.entangled_variance),
                    s(ok),
                    if r.pole_excluded {
                        "pole_excluded".into()
                    } else if ok {
                        "ok".into()
                    } else {
                        "invariant_violation".into()
                    },
                ]);
            }
            Err(e) => t.push_failure(vec![f(n_t)], &e),
        }
    }
    FigureOutput { tables: vec![t], parameters: params(&[("d", json!(d)), ("n_s", json!(FIG_NS))]) }
}

fn params(kv: &[(&str, Value)]) -> BTreeMap<String, Value> {
    kv.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Runs one figure; `options.seed` also seeds the ensembles.
pub fn run_figure(name: FigureName, scale: Scale, options: &SolverOptions) -> FigureOutput {
    let mut out = match name {
        FigureName::Fig2a => fig2a(scale, options),
        FigureName::Fig2bc => fig2bc(scale, options),
        FigureName::Fig3 => fig3(scale, options),
        FigureName::Fig4 => fig4(scale),
        FigureName::Fig5 => fig5(scale, options.seed),
        FigureName::Fig6 => fig6(scale, options.seed),
        FigureName::Fig7 => fig7(scale, options.seed),
        FigureName::Fig8 => fig8(scale, options),
    };
    out.parameters.insert("scale".into(), json!(scale));
    out.parameters.insert("seed".into(), json!(options.seed));
    out
}
