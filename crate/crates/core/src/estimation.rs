//! The four sensitivity figures of merit `Δ²(v·θ)`, per single measurement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network_model::{
    check_slopes, separable_qfi_terms, separable_variance_terms, squeeze_factors, CoefficientVector, ConfigDocument,
    EntangledConfig, SeparableConfig,
};

fn check_dim(expected: usize, v: &CoefficientVector) -> Result<()> {
    if v.dim() != expected {
        return Err(Error::DimensionMismatch { expected, found: v.dim() });
    }
    Ok(())
}

/// `vᵀM⁻¹v` from the expanded scalar form, written as a sum of nonnegative terms.
pub(crate) fn emom_kernel(u: &[f64], a2: &[f64], n_s: f64, v: &[f64]) -> Result<f64> {
    check_slopes(u, a2, n_s)?;
    let (_, em2r) = squeeze_factors(n_s);
    let d = u.len();
    let mut buf = [0.0f64; 16];
    let mut heap;
    let x: &mut [f64] = if d <= buf.len() {
        &mut buf[..d]
    } else {
        heap = vec![0.0; d];
        &mut heap
    };
    let (mut s1, mut sx2, mut su2, mut sq) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..d {
        let g = a2[j] - u[j] * u[j] * n_s;
        x[j] = a2[j].sqrt() * v[j] / g;
        s1 += u[j] * x[j];
        sx2 += x[j] * x[j];
        su2 += u[j] * u[j];
        sq += v[j] * v[j] * u[j] * u[j] / (g * g);
    }
    let mut lagrange = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let t = u[i] * x[j] - u[j] * x[i];
            lagrange += t * t;
        }
    }
    Ok(em2r * s1 * s1 + lagrange + (1.0 - su2) * sx2 + n_s * sq)
}

/// `vᵀF⁻¹v` via Sherman–Morrison, arranged to avoid cancellation.
pub(crate) fn eqcr_kernel(u: &[f64], a2: &[f64], n_s: f64, v: &[f64]) -> Result<f64> {
    let d = u.len();
    let (e2r, _) = squeeze_factors(n_s);
    let c0 = e2r - 1.0;
    let (mut k, mut s2) = (0.0, 0.0);
    for j in 0..d {
        let dj = a2[j] + u[j] * u[j] * n_s;
        if !(dj > 0.0) {
            return Err(Error::SingularInformation { arm: j });
        }
        k += a2[j] * u[j] * u[j] / dj;
        s2 += v[j] * v[j] / dj;
    }
    let mut lagrange = 0.0;
    for i in 0..d {
        let di = a2[i] + u[i] * u[i] * n_s;
        let wi = a2[i].sqrt() * u[i];
        for j in (i + 1)..d {
            let dj = a2[j] + u[j] * u[j] * n_s;
            let wj = a2[j].sqrt() * u[j];
            let t = v[i] * wj - v[j] * wi;
            lagrange += t * t / (di * dj);
        }
    }
    Ok((s2 + c0 * lagrange) / (1.0 + c0 * k))
}

/// Method-of-moments variance of the entangled strategy.
pub fn variance_emom(config: &EntangledConfig, v: &CoefficientVector) -> Result<f64> {
    check_dim(config.d(), v)?;
    if !config.is_phase_matched() {
        return Err(Error::PhaseMismatch);
    }
    emom_kernel(config.circuit.entries(), &config.coherent_intensities, config.squeezed_photons, v.entries())
}

/// Method-of-moments variance of the separable strategy.
pub fn variance_smom(config: &SeparableConfig, v: &CoefficientVector) -> Result<f64> {
    check_dim(config.d(), v)?;
    let terms = separable_variance_terms(config)?;
    Ok(terms.iter().zip(v.entries()).map(|(t, vj)| vj * vj * t).sum())
}

/// Quantum Cramér–Rao bound of the entangled strategy.
pub fn variance_eqcr(config: &EntangledConfig, v: &CoefficientVector) -> Result<f64> {
    check_dim(config.d(), v)?;
    if !config.is_phase_matched() {
        return Err(Error::PhaseMismatch);
    }
    eqcr_kernel(config.circuit.entries(), &config.coherent_intensities, config.squeezed_photons, v.entries())
}

/// Quantum Cramér–Rao bound of the separable strategy.
pub fn variance_sqcr(config: &SeparableConfig, v: &CoefficientVector) -> Result<f64> {
    check_dim(config.d(), v)?;
    let f = separable_qfi_terms(config);
    let mut total = 0.0;
    for (j, (fj, vj)) in f.iter().zip(v.entries()).enumerate() {
        if *vj == 0.0 {
            continue;
        }
        if !(*fj > 0.0) {
            return Err(Error::SingularInformation { arm: j });
        }
        total += vj * vj / fj;
    }
    Ok(total)
}

/// All available variances for the supplied configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emom: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smom: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eqcr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sqcr: Option<f64>,
    pub v: Vec<f64>,
    pub v_rescaled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separable: Option<SeparableConfig>,
}

pub fn sensitivity_report(
    entangled: Option<&EntangledConfig>,
    separable: Option<&SeparableConfig>,
    v: &CoefficientVector,
) -> Result<SensitivityReport> {
    let mut report = SensitivityReport {
        emom: None,
        smom: None,
        eqcr: None,
        sqcr: None,
        v: v.entries().to_vec(),
        v_rescaled: v.was_rescaled(),
        config: entangled.map(ConfigDocument::from_config),
        separable: separable.cloned(),
    };
    if let Some(c) = entangled {
        report.emom = Some(variance_emom(c, v)?);
        report.eqcr = Some(variance_eqcr(c, v)?);
    }
    if let Some(s) = separable {
        report.smom = Some(variance_smom(s, v)?);
        report.sqcr = Some(variance_sqcr(s, v)?);
    }
    Ok(report)
}
