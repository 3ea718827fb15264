//! Resource-constrained minimization of the entangled and separable
//! variances, bounds, closed-form optima and gain factors.

mod bounds;
mod gain;
pub mod nelder_mead;

pub use bounds::*;
pub use gain::*;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{emom_kernel, eqcr_kernel};
use crate::network_model::{squeeze_factors, CircuitVector, CoefficientVector};
use crate::rng::stream_rng;
use nelder_mead::SimplexOptions;

/// Resource constraint shared by both strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "UPPERCASE")]
pub enum Constraint {
    /// Total photons only.
    C1,
    /// Total photons and equal coherent intensities, hence fixed total squeezing.
    C2 { squeezed_photons: f64 },
    /// Total photons and total squeezing, at a fixed squeezed fraction per strategy.
    C3 { squeezed_photons: f64 },
    /// Total photons and a shared squeeze magnitude.
    C4 { squeezed_photons: f64 },
}

impl Constraint {
    pub fn squeezed_photons(&self) -> Option<f64> {
        match *self {
            Constraint::C1 => None,
            Constraint::C2 { squeezed_photons }
            | Constraint::C3 { squeezed_photons }
            | Constraint::C4 { squeezed_photons } => Some(squeezed_photons),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Constraint::C1 => "C1",
            Constraint::C2 { .. } => "C2",
            Constraint::C3 { .. } => "C3",
            Constraint::C4 { .. } => "C4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Entangled,
    Separable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationProblem {
    pub v: CoefficientVector,
    pub total_photons: f64,
    pub constraint: Constraint,
    pub strategy: Strategy,
}

impl OptimizationProblem {
    pub fn new(v: CoefficientVector, total_photons: f64, constraint: Constraint, strategy: Strategy) -> Result<Self> {
        let p = Self { v, total_photons, constraint, strategy };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        let n_t = self.total_photons;
        if !(n_t.is_finite() && n_t > 0.0) {
            return Err(Error::Infeasible(format!("total photons {n_t} must be positive")));
        }
        if let Some(n_s) = self.constraint.squeezed_photons() {
            if !(n_s >= 0.0 && n_s < n_t) {
                return Err(Error::Infeasible(format!("squeezed photons {n_s} must lie in [0, n_T = {n_t})")));
            }
        }
        if let (Constraint::C4 { squeezed_photons }, Strategy::Separable) = (self.constraint, self.strategy) {
            if !(n_t / self.v.dim() as f64 > squeezed_photons) {
                return Err(Error::Infeasible("C4 leaves no coherent photons per arm".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Converged,
    MaxIter,
    /// No free parameters: the value is a direct evaluation.
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub minimum_variance: f64,
    /// Injected row `ũ` (entangled strategy only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arg_circuit: Option<CircuitVector>,
    pub arg_intensities: Vec<f64>,
    /// One entry for the entangled strategy, one per arm for the separable one.
    pub arg_squeezed_photons: Vec<f64>,
    pub solver_status: SolverStatus,
    pub restarts_used: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub restarts: usize,
    pub max_evals: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Search all sign patterns of `ũ` instead of `sign(ũ_j) = sign(v_j)` (d ≤ 12).
    pub exhaustive_signs: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { restarts: 16, max_evals: 20_000, tolerance: 1e-10, seed: 0, exhaustive_signs: false }
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Softmax over `y` with an implicit trailing zero logit.
fn simplex_weights(y: &[f64], out: &mut [f64]) {
    let m = y.iter().copied().fold(0.0f64, f64::max);
    let mut s = 0.0;
    for (o, &yi) in out.iter_mut().zip(y.iter().chain(std::iter::once(&0.0))) {
        *o = (yi - m).exp();
        s += *o;
    }
    out.iter_mut().for_each(|o| *o /= s);
}

fn logits_from_weights(w: &[f64]) -> Vec<f64> {
    let last = w[w.len() - 1].ln();
    w[..w.len() - 1].iter().map(|x| x.ln() - last).collect()
}

fn circuit_from(x: &[f64], signs: &[f64], out: &mut [f64]) -> bool {
    if out.len() == 1 {
        out[0] = signs[0];
        return true;
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return false;
    }
    for ((o, xi), s) in out.iter_mut().zip(x).zip(signs) {
        *o = s * xi.abs() / norm;
    }
    true
}

fn smom_arm(a2: f64, s: f64) -> f64 {
    let (_, em2r) = squeeze_factors(s);
    let g = a2 - s;
    if (a2 - s).abs() <= 1e-9 * a2.max(s) {
        return f64::INFINITY;
    }
    (a2 * em2r + s) / (g * g)
}

fn sqcr_arm(a2: f64, s: f64) -> f64 {
    let (e2r, _) = squeeze_factors(s);
    1.0 / (a2 * e2r + s)
}

/// Decoded point on the active arms.
struct Point {
    u: Vec<f64>,
    a2: Vec<f64>,
    s: Vec<f64>,
}

/// Parameter layout for one (strategy, constraint) pair on `k` active arms.
struct Layout<'a> {
    strategy: Strategy,
    constraint: Constraint,
    n_t: f64,
    v: Vec<f64>,
    signs: &'a [f64],
    k: usize,
    d: usize,
}

impl Layout<'_> {
    fn n_circuit(&self) -> usize {
        if self.k > 1 {
            self.k
        } else {
            0
        }
    }

    fn dim(&self) -> usize {
        let k = self.k;
        match (self.strategy, self.constraint) {
            (Strategy::Entangled, Constraint::C1) => self.n_circuit() + (k - 1) + 1,
            (Strategy::Entangled, Constraint::C3 { .. }) => self.n_circuit() + (k - 1),
            (Strategy::Entangled, _) => self.n_circuit(),
            (Strategy::Separable, Constraint::C1) => (k - 1) + k,
            (Strategy::Separable, Constraint::C4 { .. }) => 0,
            (Strategy::Separable, _) => k - 1,
        }
    }

    fn decode(&self, p: &[f64], pt: &mut Point) -> bool {
        let k = self.k;
        let d = self.d as f64;
        match self.strategy {
            Strategy::Entangled => {
                let nc = self.n_circuit();
                if !circuit_from(&p[..nc], self.signs, &mut pt.u) {
                    return false;
                }
                let rest = &p[nc..];
                let n_s = match self.constraint {
                    Constraint::C1 => self.n_t * logistic(rest[k - 1]),
                    c => c.squeezed_photons().unwrap_or(0.0),
                };
                pt.s[0] = n_s;
                match self.constraint {
                    Constraint::C1 | Constraint::C3 { .. } => {
                        simplex_weights(&rest[..k - 1], &mut pt.a2);
                        pt.a2.iter_mut().for_each(|a| *a *= self.n_t - n_s);
                    }
                    _ => pt.a2.iter_mut().for_each(|a| *a = (self.n_t - n_s) / d),
                }
            }
            Strategy::Separable => match self.constraint {
                Constraint::C1 => {
                    simplex_weights(&p[..k - 1], &mut pt.a2);
                    for j in 0..k {
                        let total = self.n_t * pt.a2[j];
                        let q = logistic(p[k - 1 + j]);
                        pt.s[j] = total * q;
                        pt.a2[j] = total * (1.0 - q);
                    }
                }
                Constraint::C2 { squeezed_photons } => {
                    simplex_weights(p, &mut pt.s);
                    pt.s.iter_mut().for_each(|s| *s *= squeezed_photons);
                    pt.a2.iter_mut().for_each(|a| *a = (self.n_t - squeezed_photons) / d);
                }
                Constraint::C3 { squeezed_photons } => {
                    let rho = squeezed_photons / self.n_t;
                    simplex_weights(p, &mut pt.a2);
                    for j in 0..k {
                        let total = self.n_t * pt.a2[j];
                        pt.s[j] = rho * total;
                        pt.a2[j] = (1.0 - rho) * total;
                    }
                }
                Constraint::C4 { squeezed_photons } => {
                    pt.s.iter_mut().for_each(|s| *s = squeezed_photons);
                    pt.a2.iter_mut().for_each(|a| *a = self.n_t / d - squeezed_photons);
                }
            },
        }
        true
    }

    fn value(&self, pt: &Point, objective: Objective) -> f64 {
        match self.strategy {
            Strategy::Entangled => {
                let r = match objective {
                    Objective::Emom => emom_kernel(&pt.u, &pt.a2, pt.s[0], &self.v),
                    Objective::Eqcr => eqcr_kernel(&pt.u, &pt.a2, pt.s[0], &self.v),
                };
                r.unwrap_or(f64::INFINITY)
            }
            Strategy::Separable => {
                let mut total = 0.0;
                for j in 0..self.k {
                    let t = match objective {
                        Objective::Emom => smom_arm(pt.a2[j], pt.s[j]),
                        Objective::Eqcr => sqcr_arm(pt.a2[j], pt.s[j]),
                    };
                    total += self.v[j] * self.v[j] * t;
                }
                total
            }
        }
    }

    fn new_point(&self) -> Point {
        let ns = if self.strategy == Strategy::Entangled { 1 } else { self.k };
        Point { u: vec![0.0; self.k], a2: vec![0.0; self.k], s: vec![0.0; ns] }
    }

    fn steps(&self) -> Vec<f64> {
        let mut s = vec![1.0; self.dim()];
        if self.strategy == Strategy::Entangled {
            s[..self.n_circuit()].iter_mut().for_each(|x| *x = 0.25);
        }
        s
    }

    fn analytic_seeds(&self, objective: Objective) -> Vec<Vec<f64>> {
        let k = self.k;
        let av: Vec<f64> = self.v.iter().map(|x| x.abs()).collect();
        let weights =
            |pow: f64| -> Vec<f64> { logits_from_weights(&av.iter().map(|a| a.powf(pow)).collect::<Vec<_>>()) };
        let mut seeds = Vec::new();
        match self.strategy {
            Strategy::Entangled => {
                let scale = (k as f64).sqrt();
                let x: Vec<f64> = av.iter().map(|a| a * scale).take(self.n_circuit()).collect();
                let frac = match objective {
                    Objective::Emom => 0.5 / self.n_t.sqrt(),
                    Objective::Eqcr => 0.5,
                };
                let tail = |logits: Vec<f64>| -> Vec<f64> {
                    let mut p = x.clone();
                    match self.constraint {
                        Constraint::C1 => {
                            p.extend(logits);
                            p.push(logit(frac.min(0.5)));
                        }
                        Constraint::C3 { .. } => p.extend(logits),
                        _ => {}
                    }
                    p
                };
                seeds.push(tail(vec![0.0; k - 1]));
                if matches!(self.constraint, Constraint::C1 | Constraint::C3 { .. }) && k > 1 {
                    seeds.push(tail(weights(1.0)));
                }
            }
            Strategy::Separable => match self.constraint {
                Constraint::C1 => {
                    let pow = match objective {
                        Objective::Emom => 0.8,
                        Objective::Eqcr => 2.0 / 3.0,
                    };
                    let share: Vec<f64> = av.iter().map(|a| a.powf(pow)).collect();
                    let sum: f64 = share.iter().sum();
                    let mut p = logits_from_weights(&share);
                    for sh in &share {
                        let t = self.n_t * sh / sum;
                        let q = match objective {
                            Objective::Emom => (0.5 / t.sqrt()).min(0.5),
                            Objective::Eqcr => 0.5,
                        };
                        p.push(logit(q));
                    }
                    seeds.push(p);
                }
                Constraint::C2 { .. } => {
                    seeds.push(vec![0.0; k - 1]);
                    seeds.push(weights(1.0));
                }
                Constraint::C3 { .. } => {
                    seeds.push(vec![0.0; k - 1]);
                    seeds.push(weights(1.0));
                }
                Constraint::C4 { .. } => seeds.push(Vec::new()),
            },
        }
        seeds
    }

    fn random_seed(&self, rng: &mut impl Rng) -> Vec<f64> {
        let k = self.k;
        let mut p = Vec::with_capacity(self.dim());
        match self.strategy {
            Strategy::Entangled => {
                for _ in 0..self.n_circuit() {
                    let z: f64 = rng.sample(StandardNormal);
                    p.push(z.abs() + 0.05);
                }
                if matches!(self.constraint, Constraint::C1 | Constraint::C3 { .. }) {
                    for _ in 0..k - 1 {
                        p.push(rng.sample(StandardNormal));
                    }
                }
                if self.constraint == Constraint::C1 {
                    p.push(random_fraction_logit(rng));
                }
            }
            Strategy::Separable => {
                if !matches!(self.constraint, Constraint::C4 { .. }) {
                    for _ in 0..k - 1 {
                        p.push(rng.sample(StandardNormal));
                    }
                }
                if self.constraint == Constraint::C1 {
                    for _ in 0..k {
                        p.push(random_fraction_logit(rng));
                    }
                }
            }
        }
        p
    }
}

fn random_fraction_logit(rng: &mut impl Rng) -> f64 {
    logit(10f64.powf(rng.random_range(-6.0..-0.3)))
}

struct Run {
    f: f64,
    x: Vec<f64>,
    signs: Vec<f64>,
    evaluations: usize,
    converged: bool,
}

/// Minimizes the chosen variance over the free parameters of `problem`.
pub fn minimize(
    problem: &OptimizationProblem,
    objective: Objective,
    options: &SolverOptions,
) -> Result<OptimizationResult> {
    problem.check()?;
    let d = problem.v.dim();
    let active: Vec<usize> = (0..d).filter(|&j| problem.v.entries()[j] != 0.0).collect();
    let k = active.len();
    let v_act: Vec<f64> = active.iter().map(|&j| problem.v.entries()[j]).collect();

    let canonical: Vec<f64> = v_act.iter().map(|x| if *x < 0.0 { -1.0 } else { 1.0 }).collect();
    let sign_sets: Vec<Vec<f64>> = if options.exhaustive_signs && problem.strategy == Strategy::Entangled {
        if k > 12 {
            return Err(Error::InvalidConfig("exhaustive sign search is limited to d <= 12".into()));
        }
        (0..1u32 << k).map(|m| (0..k).map(|j| if m >> j & 1 == 1 { -1.0 } else { 1.0 }).collect()).collect()
    } else {
        vec![canonical]
    };

    let simplex = SimplexOptions { max_evals: options.max_evals, tolerance: options.tolerance };
    let mut runs: Vec<Run> = Vec::new();
    let mut starts = 0;
    for signs in &sign_sets {
        let layout = Layout {
            strategy: problem.strategy,
            constraint: problem.constraint,
            n_t: problem.total_photons,
            v: v_act.clone(),
            signs,
            k,
            d,
        };
        let mut inits = layout.analytic_seeds(objective);
        let dim = layout.dim();
        if dim > 0 {
            for i in 0..options.restarts {
                let mut rng = stream_rng(options.seed, i as u64);
                inits.push(layout.random_seed(&mut rng));
            }
        } else {
            inits.truncate(1);
        }
        starts += inits.len();
        let steps = layout.steps();
        let batch: Vec<Run> = inits
            .par_iter()
            .map(|x0| {
                let mut pt = layout.new_point();
                let f = |p: &[f64]| {
                    if layout.decode(p, &mut pt) {
                        layout.value(&pt, objective).ln()
                    } else {
                        f64::INFINITY
                    }
                };
                let out = nelder_mead::minimize(f, x0, &steps, simplex);
                Run { f: out.f, x: out.x, signs: signs.clone(), evaluations: out.evaluations, converged: out.converged }
            })
            .collect();
        runs.extend(batch);
    }

    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let any_converged = runs.iter().any(|r| r.converged);
    let best = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.f.total_cmp(&b.f).then(i.cmp(j)))
        .map(|(_, r)| r)
        .ok_or_else(|| Error::Infeasible("no starting point".into()))?;
    if !best.f.is_finite() {
        return Err(Error::Infeasible("no feasible point found".into()));
    }

    let layout = Layout {
        strategy: problem.strategy,
        constraint: problem.constraint,
        n_t: problem.total_photons,
        v: v_act.clone(),
        signs: &best.signs,
        k,
        d,
    };
    let mut pt = layout.new_point();
    layout.decode(&best.x, &mut pt);
    let minimum_variance = layout.value(&pt, objective);

    let mut intensities = vec![0.0; d];
    let mut circuit = vec![0.0; d];
    for (i, &j) in active.iter().enumerate() {
        intensities[j] = pt.a2[i];
        circuit[j] = pt.u[i];
    }
    let fixed_uniform = matches!(
        (problem.strategy, problem.constraint),
        (Strategy::Entangled, Constraint::C2 { .. } | Constraint::C4 { .. })
            | (Strategy::Separable, Constraint::C2 { .. } | Constraint::C4 { .. })
    );
    if fixed_uniform {
        let a = pt.a2.first().copied().unwrap_or(0.0);
        intensities.iter_mut().for_each(|x| *x = a);
    }
    let (arg_circuit, squeezed) = match problem.strategy {
        Strategy::Entangled => (Some(CircuitVector::normalized(circuit)?), vec![pt.s[0]]),
        Strategy::Separable => {
            let mut s = vec![0.0; d];
            for (i, &j) in active.iter().enumerate() {
                s[j] = pt.s[i];
            }
            if let Constraint::C4 { squeezed_photons } = problem.constraint {
                s.iter_mut().for_each(|x| *x = squeezed_photons);
            }
            (None, s)
        }
    };
    let status = if layout.dim() == 0 {
        SolverStatus::Analytic
    } else if any_converged {
        SolverStatus::Converged
    } else {
        SolverStatus::MaxIter
    };
    Ok(OptimizationResult {
        minimum_variance,
        arg_circuit,
        arg_intensities: intensities,
        arg_squeezed_photons: squeezed,
        solver_status: status,
        restarts_used: starts,
        evaluations,
    })
}

/// Minimum method-of-moments variance (entangled or separable per `problem.strategy`).
pub fn minimize_emom(problem: &OptimizationProblem, options: &SolverOptions) -> Result<OptimizationResult> {
    minimize(problem, Objective::Emom, options)
}

/// Minimum Cramér–Rao bound (entangled or separable per `problem.strategy`).
pub fn minimize_eqcr(problem: &OptimizationProblem, options: &SolverOptions) -> Result<OptimizationResult> {
    minimize(problem, Objective::Eqcr, options)
}

/// Outcome of the stationarity test for a candidate circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub residual: f64,
    pub lambda: f64,
    /// `n_c ≥ 100 n_s`.
    pub regime_ok: bool,
}

/// Largest component of the Lagrangian gradient of the large-`n_c` moment
/// variance at `candidate`, with the multiplier fitted by least squares.
pub fn lagrange_stationarity_check(
    v: &CoefficientVector,
    candidate: &CircuitVector,
    n_c: f64,
    n_s: f64,
) -> Result<StationarityReport> {
    if v.dim() != candidate.len() {
        return Err(Error::DimensionMismatch { expected: v.dim(), found: candidate.len() });
    }
    if !(n_c > 0.0) {
        return Err(Error::InvalidConfig("n_c must be positive".into()));
    }
    let (_, em2r) = squeeze_factors(n_s);
    let u = candidate.entries();
    let vv = v.entries();
    let c1 = (em2r - 1.0) / n_c;
    let c2 = n_s / (n_c * n_c);
    let dot: f64 = u.iter().zip(vv).map(|(a, b)| a * b).sum();
    let b: Vec<f64> = u.iter().zip(vv).map(|(ui, vi)| c1 * dot * vi + c2 * ui * vi * vi).collect();
    let uu: f64 = u.iter().map(|x| x * x).sum();
    let lambda = u.iter().zip(&b).map(|(ui, bi)| ui * bi).sum::<f64>() / uu;
    let residual = u.iter().zip(&b).map(|(ui, bi)| (2.0 * (bi - lambda * ui)).abs()).fold(0.0, f64::max);
    Ok(StationarityReport { residual, lambda, regime_ok: n_c >= REGIME_RATIO * n_s })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolverOptions {
        SolverOptions { restarts: 6, ..SolverOptions::default() }
    }

    fn problem(v: CoefficientVector, n_t: f64, c: Constraint, s: Strategy) -> OptimizationProblem {
        OptimizationProblem::new(v, n_t, c, s).unwrap()
    }

    #[test]
    fn vave_c3_matches_closed_forms() {
        let p = problem(
            CoefficientVector::average(2),
            1e6,
            Constraint::C3 { squeezed_photons: 100.0 },
            Strategy::Entangled,
        );
        let m = minimize_emom(&p, &opts()).unwrap();
        assert!((m.minimum_variance / 2.5875775821945956e-9 - 1.0).abs() < 0.01);
        let q = minimize_eqcr(&p, &opts()).unwrap();
        assert!((q.minimum_variance / 2.48782574590323e-9 - 1.0).abs() < 0.01);
        let total: f64 = m.arg_intensities.iter().sum::<f64>() + m.arg_squeezed_photons[0];
        assert!((total / 1e6 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn c1_vave_is_three_halves() {
        let p = problem(CoefficientVector::average(2), 1e6, Constraint::C1, Strategy::Entangled);
        let m = minimize_emom(&p, &opts()).unwrap();
        assert!((m.minimum_variance / 1e-9 - 1.0).abs() < 0.1, "{}", m.minimum_variance);
        assert!((m.arg_squeezed_photons[0] / 500.0 - 1.0).abs() < 0.2);
    }

    #[test]
    fn single_phase_without_squeezing() {
        for d in 1..4 {
            let p = problem(
                CoefficientVector::single_phase(d, 0),
                1e4,
                Constraint::C3 { squeezed_photons: 0.0 },
                Strategy::Entangled,
            );
            let m = minimize_emom(&p, &opts()).unwrap();
            let expected = 1.0 / (d as f64 * 1e4);
            assert!((m.minimum_variance / expected - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn separable_c4_is_analytic() {
        let p =
            problem(CoefficientVector::average(2), 1e4, Constraint::C4 { squeezed_photons: 10.0 }, Strategy::Separable);
        let m = minimize_emom(&p, &opts()).unwrap();
        assert_eq!(m.solver_status, SolverStatus::Analytic);
        let (_, em2r) = squeeze_factors(10.0);
        let nc = 1e4 / 2.0 - 10.0;
        let expected = (nc * em2r + 10.0) / (2.0 * (nc - 10.0) * (nc - 10.0));
        assert!((m.minimum_variance / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_budget() {
        let r = OptimizationProblem::new(
            CoefficientVector::average(2),
            10.0,
            Constraint::C2 { squeezed_photons: 20.0 },
            Strategy::Entangled,
        );
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    #[test]
    fn exhaustive_signs_agree_with_canonical() {
        let v = CoefficientVector::new(vec![0.5, -0.3, 0.2]).unwrap();
        let p = problem(v, 1e5, Constraint::C2 { squeezed_photons: 50.0 }, Strategy::Entangled);
        let a = minimize_emom(&p, &opts()).unwrap();
        let b = minimize_emom(&p, &SolverOptions { exhaustive_signs: true, ..opts() }).unwrap();
        assert!((a.minimum_variance / b.minimum_variance - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lagrange_examples() {
        for d in 2..7 {
            let v = CoefficientVector::average(d);
            let u = CircuitVector::uniform(d);
            assert!(lagrange_stationarity_check(&v, &u, 1e6, 100.0).unwrap().residual < 1e-8);
        }
        let v = CoefficientVector::new(vec![0.8, 0.3]).unwrap();
        let u = CircuitVector::normalized(v.entries().to_vec()).unwrap();
        assert!(lagrange_stationarity_check(&v, &u, 10.0, 100.0).unwrap().residual > 1e-4);
        assert!(lagrange_stationarity_check(&v, &u, 1e3, 0.0).unwrap().residual < 1e-8);
    }
}
