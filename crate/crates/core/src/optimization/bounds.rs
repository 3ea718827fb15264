//! Upper and lower bounds on the optimized variances and their scaling regimes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network_model::{squeeze_factors, CoefficientVector};

/// Ratio used to operationalize "much greater than".
pub const REGIME_RATIO: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SnPrefactor,
    OptimalSqueezing,
    TransientHeisenberg,
    QcrGeneral,
    QcrSimplified,
    Heisenberg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub lower: f64,
    pub upper: f64,
    pub regime: Regime,
    pub valid: bool,
}

impl BoundsReport {
    /// The report itself, or `RegimeViolated` when its preconditions fail.
    pub fn require_valid(self) -> Result<Self> {
        if self.valid {
            Ok(self)
        } else {
            Err(Error::RegimeViolated(format!("{:?} preconditions do not hold", self.regime)))
        }
    }
}

fn gg(a: f64, b: f64) -> bool {
    a >= REGIME_RATIO * b
}

/// Relative size of the terms dropped from the moment bounds, `4 (d+1) n_s / n_T`.
///
/// The bounds are leading order in `n_s / n_c`; exact optima may exceed the
/// upper bound by about this fraction.
pub fn asymptotic_slack(d: usize, n_t: f64, n_s: f64) -> f64 {
    4.0 * (d as f64 + 1.0) * n_s / n_t
}

/// Moment bounds for general `n_s`, labelled with the regime the budget falls in.
///
/// `valid` reflects `n_T ≫ (d+1) n_s`, which covers both bounds.
pub fn bounds_emom(v: &CoefficientVector, n_t: f64, n_s: f64) -> BoundsReport {
    let d = v.dim() as f64;
    let w = v.w();
    let (e2r, em2r) = squeeze_factors(n_s);
    let lower = em2r / (d * n_t) + n_s / (d * n_t * n_t);
    let upper = em2r / n_t + n_s * w / (n_t * n_t);
    let ratio = n_t / (n_s * e2r * w);
    let regime = if ratio >= REGIME_RATIO {
        Regime::SnPrefactor
    } else if ratio * REGIME_RATIO <= 1.0 {
        Regime::TransientHeisenberg
    } else {
        Regime::OptimalSqueezing
    };
    BoundsReport { lower, upper, regime, valid: gg(n_t, (d + 1.0) * n_s) }
}

/// Moment bounds in the asymptotic form of one regime.
///
/// For `OptimalSqueezing` the supplied `n_s` is ignored: the bounds are
/// already minimized over it.
pub fn bounds_emom_regime(v: &CoefficientVector, n_t: f64, n_s: f64, regime: Regime) -> Result<BoundsReport> {
    let d = v.dim() as f64;
    let w = v.w();
    let (e2r, em2r) = squeeze_factors(n_s);
    let (lower, upper, valid) = match regime {
        Regime::SnPrefactor => (em2r / (d * n_t), em2r / n_t, gg(n_t, n_s * e2r * w)),
        Regime::OptimalSqueezing => {
            let n_opt = (n_t / (4.0 * w)).sqrt();
            (1.0 / (d * n_t.powf(1.5)), w.sqrt() / n_t.powf(1.5), gg(n_t, (d + 1.0) * n_opt))
        }
        Regime::TransientHeisenberg => {
            (n_s / (d * n_t * n_t), n_s * w / (n_t * n_t), gg(n_t, (d + 1.0) * n_s) && gg(n_s * e2r, n_t))
        }
        other => return Err(Error::InvalidConfig(format!("{other:?} is not a moment regime"))),
    };
    Ok(BoundsReport { lower, upper, regime, valid })
}

/// Cramér–Rao bounds; they hold without preconditions.
pub fn bounds_eqcr(v: &CoefficientVector, n_t: f64, n_s: f64) -> BoundsReport {
    let d = v.dim() as f64;
    let (e2r, em2r) = squeeze_factors(n_s);
    BoundsReport {
        lower: 1.0 / (d * (n_t * e2r - n_s * (e2r - 1.0))),
        upper: em2r / (n_t - n_s),
        regime: Regime::QcrGeneral,
        valid: n_t > n_s,
    }
}

/// Cramér–Rao bounds in the asymptotic form of one regime.
pub fn bounds_eqcr_regime(v: &CoefficientVector, n_t: f64, n_s: f64, regime: Regime) -> Result<BoundsReport> {
    let d = v.dim() as f64;
    let (_, em2r) = squeeze_factors(n_s);
    let (lower, upper, valid) = match regime {
        Regime::QcrGeneral => return Ok(bounds_eqcr(v, n_t, n_s)),
        Regime::QcrSimplified => (em2r / (d * n_t), em2r / n_t, gg(n_t, n_s)),
        Regime::Heisenberg => (
            1.0 / (d * n_t * n_t),
            1.0 / (n_t * n_t),
            n_s >= REGIME_RATIO && (2.0 * n_s / n_t - 1.0).abs() <= 1.0 / REGIME_RATIO,
        ),
        other => return Err(Error::InvalidConfig(format!("{other:?} is not a Cramér–Rao regime"))),
    };
    Ok(BoundsReport { lower, upper, regime, valid })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Method of moments.
    Emom,
    /// Quantum Cramér–Rao bound.
    Eqcr,
}

/// A closed-form value with a flag for use outside its derivation regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub approximate: bool,
}

/// Optimum for the generalized average at `ũ = sqrt(d) v_ave` and uniform intensities.
pub fn analytic_optimum_vave(d: usize, n_t: f64, n_s: f64, objective: Objective) -> Estimate {
    let (e2r, em2r) = squeeze_factors(n_s);
    match objective {
        Objective::Emom => {
            Estimate { value: em2r / n_t + n_s / (n_t * n_t), approximate: !gg(n_t, (d as f64 + 1.0) * n_s) }
        }
        Objective::Eqcr => {
            Estimate { value: 1.0 / (n_t * e2r - n_s * (e2r - 1.0)), approximate: !gg(n_t, (d as f64 + 1.0) * n_s) }
        }
    }
}
