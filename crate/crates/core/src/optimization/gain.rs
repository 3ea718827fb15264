//! Gain factors: optimized separable variance over optimized entangled variance.

use serde::{Deserialize, Serialize};

use super::{
    minimize_emom, Constraint, OptimizationProblem, OptimizationResult, SolverOptions, Strategy, REGIME_RATIO,
};
use crate::error::{Error, Result};
use crate::estimation::variance_sqcr;
use crate::network_model::{squeeze_factors, squeeze_parameter, CoefficientVector, SeparableArm, SeparableConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub constraint: Constraint,
    pub gain: f64,
    pub entangled: OptimizationResult,
    pub separable: OptimizationResult,
}

/// Moment-based gain under `constraint` for total budget `n_t`.
pub fn gain(constraint: Constraint, v: &CoefficientVector, n_t: f64, options: &SolverOptions) -> Result<GainReport> {
    let ent = OptimizationProblem::new(v.clone(), n_t, constraint, Strategy::Entangled)?;
    let sep = OptimizationProblem::new(v.clone(), n_t, constraint, Strategy::Separable)?;
    let entangled = minimize_emom(&ent, options)?;
    let separable = minimize_emom(&sep, options)?;
    Ok(GainReport { constraint, gain: separable.minimum_variance / entangled.minimum_variance, entangled, separable })
}

/// Large-squeezing, large-intensity prediction `d (Σ|v_j|)^2` for the second constraint.
pub fn gain2_analytic(v: &CoefficientVector) -> f64 {
    let l1 = v.l1();
    v.dim() as f64 * l1 * l1
}

/// Second-constraint gain at the generalized average with uniform intensities `n_c`.
///
/// `approximate` is set when `n_c < 100 n_s`.
pub fn gain2_vave_exact(d: usize, n_c: f64, n_s: f64) -> super::Estimate {
    let df = d as f64;
    let (_, em2r) = squeeze_factors(n_s);
    let (_, em2r_sep) = squeeze_factors(n_s / df);
    super::Estimate {
        value: (n_c * em2r_sep + n_s / df) / (n_c * em2r + n_s / df),
        approximate: n_c < REGIME_RATIO * n_s,
    }
}

/// Large-intensity closed form of the fourth-constraint gain at the generalized average.
pub fn gain4_analytic(d: usize, n_t: f64, n_s: f64) -> f64 {
    let (_, em2r) = squeeze_factors(n_s);
    (n_t * em2r + d as f64 * n_s) / (n_t * em2r + n_s)
}

/// One sample of the fourth-constraint gain curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gain4Row {
    pub n_t: f64,
    /// Moment gain; `None` inside the pole window.
    pub g4: Option<f64>,
    /// Separable Cramér–Rao bound over the entangled optimum.
    pub g4_tilde: f64,
    pub analytic: f64,
    pub pole_excluded: bool,
    pub entangled_variance: f64,
}

/// Relative half-width of the excluded window around `n_T = 2 d n_s`.
pub const POLE_WINDOW: f64 = 1e-6;

/// Fourth-constraint gain at the generalized average over a sweep of `n_T`.
pub fn gain4_curve(d: usize, n_s: f64, sweep: &[f64], options: &SolverOptions) -> Result<Vec<Gain4Row>> {
    let v = CoefficientVector::average(d);
    let df = d as f64;
    let pole = 2.0 * df * n_s;
    sweep
        .iter()
        .map(|&n_t| {
            if !(n_t / df > n_s) {
                return Err(Error::Infeasible(format!("n_T = {n_t} leaves no coherent photons per arm")));
            }
            let constraint = Constraint::C4 { squeezed_photons: n_s };
            let ent =
                minimize_emom(&OptimizationProblem::new(v.clone(), n_t, constraint, Strategy::Entangled)?, options)?;
            let n_c_sep = n_t / df - n_s;
            let r = squeeze_parameter(n_s);
            let sep_cfg =
                SeparableConfig::new(vec![SeparableArm { coherent_intensity: n_c_sep, squeeze_magnitude: r }; d])?;
            let sqcr = variance_sqcr(&sep_cfg, &v)?;
            let pole_excluded = ((n_t - pole) / pole).abs() <= POLE_WINDOW;
            let g4 = if pole_excluded {
                None
            } else {
                let sep = minimize_emom(
                    &OptimizationProblem::new(v.clone(), n_t, constraint, Strategy::Separable)?,
                    options,
                )?;
                Some(sep.minimum_variance / ent.minimum_variance)
            };
            Ok(Gain4Row {
                n_t,
                g4,
                g4_tilde: sqcr / ent.minimum_variance,
                analytic: gain4_analytic(d, n_t, n_s),
                pole_excluded,
                entangled_variance: ent.minimum_variance,
            })
        })
        .collect()
}

/// `v = (cos φ, sin φ)/sqrt(2)`.
pub fn v_two(phi: f64) -> CoefficientVector {
    CoefficientVector::new(vec![phi.cos() / 2f64.sqrt(), phi.sin() / 2f64.sqrt()]).expect("unit direction")
}

/// `v = (sin θ cos φ, sin θ sin φ, cos θ)/sqrt(3)`.
pub fn v_three(theta: f64, phi: f64) -> CoefficientVector {
    let s = 3f64.sqrt();
    CoefficientVector::new(vec![theta.sin() * phi.cos() / s, theta.sin() * phi.sin() / s, theta.cos() / s])
        .expect("unit direction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gain2_analytic_examples() {
        assert!((gain2_analytic(&CoefficientVector::average(2)) - 2.0).abs() < 1e-12);
        assert!((gain2_analytic(&CoefficientVector::single_phase(2, 0)) - 1.0).abs() < 1e-12);
        assert!((gain2_analytic(&CoefficientVector::average(3)) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn gain2_vave_limits() {
        let g = gain2_vave_exact(2, 1e8, 100.0);
        assert!((g.value / 2.0 - 1.0).abs() < 0.05);
        assert!(!g.approximate);
        let (e2r, _) = squeeze_factors(100.0);
        let far = gain2_vave_exact(100_000_000, 1e8, 100.0).value;
        assert!((far / e2r - 1.0).abs() < 0.01, "{far}");
    }

    #[test]
    fn gain4_analytic_limits() {
        let (e2r, _) = squeeze_factors(100.0);
        assert!((gain4_analytic(10, 1e4 * 10.0 * e2r * 100.0, 100.0) - 1.0).abs() < 1e-3);
        assert!((gain4_analytic(10, 1e6, 1e4) / 10.0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn parameterizations_are_normalized() {
        let v = v_two(0.3);
        assert!(!v.was_rescaled());
        let v = v_three(0.9553166181245093, std::f64::consts::FRAC_PI_4);
        assert!((v.entries()[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((v.entries()[2] - 1.0 / 3.0).abs() < 1e-12);
    }
}
