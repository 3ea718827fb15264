//! Network configurations and the closed-form statistics at the optimal
//! working point.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{unitarity_deviation, C64};

const NORM_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;
const POLE_TOL: f64 = 1e-9;

/// `(e^{2r}, e^{-2r})` for a squeezed vacuum with mean photon number `n_s`.
pub fn squeeze_factors(n_s: f64) -> (f64, f64) {
    let r = squeeze_parameter(n_s);
    ((2.0 * r).exp(), (-2.0 * r).exp())
}

/// Squeeze parameter `r = asinh(sqrt(n_s))`.
pub fn squeeze_parameter(n_s: f64) -> f64 {
    n_s.sqrt().asinh()
}

fn check_finite_nonneg(xs: &[f64], what: &str) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidConfig(format!("{what} must be finite and nonnegative")));
    }
    Ok(())
}

/// Signed magnitudes of the injected row of the circuit unitary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CircuitVector {
    entries: Vec<f64>,
}

impl CircuitVector {
    /// Requires unit norm to `1e-12`.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() || entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidCircuitVector("entries must be finite and nonempty".into()));
        }
        let norm2: f64 = entries.iter().map(|x| x * x).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidCircuitVector(format!("squared norm {norm2} != 1")));
        }
        Ok(Self { entries })
    }

    /// Rescales to unit norm.
    pub fn normalized(entries: Vec<f64>) -> Result<Self> {
        let norm = entries.iter().map(|x| x * x).sum::<f64>().sqrt();
        if entries.is_empty() || !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidCircuitVector("cannot normalize".into()));
        }
        Ok(Self { entries: entries.iter().map(|x| x / norm).collect() })
    }

    /// Equal split `1/sqrt(d)`.
    pub fn uniform(d: usize) -> Self {
        Self { entries: vec![1.0 / (d as f64).sqrt(); d] }
    }

    pub fn basis(d: usize, j: usize) -> Self {
        let mut entries = vec![0.0; d];
        entries[j] = 1.0;
        Self { entries }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl TryFrom<Vec<f64>> for CircuitVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CircuitVector> for Vec<f64> {
    fn from(c: CircuitVector) -> Self {
        c.entries
    }
}

/// Target linear combination `v`, kept at `|v|^2 = 1/d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    entries: Vec<f64>,
    #[serde(default)]
    rescaled: bool,
}

impl CoefficientVector {
    /// Rescales to `|v|^2 = 1/d`; `was_rescaled` records whether that changed anything.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        let d = entries.len();
        if d == 0 || entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidCoefficientVector("entries must be finite and nonempty".into()));
        }
        let norm2: f64 = entries.iter().map(|x| x * x).sum();
        if norm2 == 0.0 {
            return Err(Error::InvalidCoefficientVector("zero vector".into()));
        }
        let target = 1.0 / d as f64;
        if (norm2 - target).abs() <= NORM_TOL {
            return Ok(Self { entries, rescaled: false });
        }
        let s = (target / norm2).sqrt();
        Ok(Self { entries: entries.iter().map(|x| x * s).collect(), rescaled: true })
    }

    /// Rescales a direction to `|v|^2 = 1/d` without flagging it.
    pub fn from_direction(entries: Vec<f64>) -> Result<Self> {
        let mut v = Self::new(entries)?;
        v.rescaled = false;
        Ok(v)
    }

    /// The generalized average `(1, ..., 1)/d`.
    pub fn average(d: usize) -> Self {
        Self { entries: vec![1.0 / d as f64; d], rescaled: false }
    }

    /// `(±1, ..., ±1)/d` with the given signs.
    pub fn average_with_signs(signs: &[f64]) -> Self {
        let d = signs.len() as f64;
        Self { entries: signs.iter().map(|s| s.signum() / d).collect(), rescaled: false }
    }

    /// `1/sqrt(d)` on arm `j`, zero elsewhere.
    pub fn single_phase(d: usize, j: usize) -> Self {
        let mut entries = vec![0.0; d];
        entries[j] = 1.0 / (d as f64).sqrt();
        Self { entries, rescaled: false }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn was_rescaled(&self) -> bool {
        self.rescaled
    }

    /// `W = d^3 Σ v_j^4`.
    pub fn w(&self) -> f64 {
        let d = self.dim() as f64;
        d.powi(3) * self.entries.iter().map(|x| x.powi(4)).sum::<f64>()
    }

    /// `Σ |v_j|`.
    pub fn l1(&self) -> f64 {
        self.entries.iter().map(|x| x.abs()).sum()
    }

    /// Canonical circuit signs: `sign(v_j)`, with `+` for zero entries.
    pub fn canonical_signs(&self) -> Vec<f64> {
        self.entries.iter().map(|x| if *x < 0.0 { -1.0 } else { 1.0 }).collect()
    }
}

/// Entangled strategy: one squeezed vacuum split by the circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntangledConfig {
    pub circuit: CircuitVector,
    pub coherent_intensities: Vec<f64>,
    pub squeezed_photons: f64,
    pub phase_mismatch: Vec<f64>,
}

impl EntangledConfig {
    pub fn new(circuit: CircuitVector, coherent_intensities: Vec<f64>, squeezed_photons: f64) -> Result<Self> {
        let d = circuit.len();
        if coherent_intensities.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: coherent_intensities.len() });
        }
        check_finite_nonneg(&coherent_intensities, "coherent intensities")?;
        check_finite_nonneg(&[squeezed_photons], "squeezed photons")?;
        Ok(Self { circuit, coherent_intensities, squeezed_photons, phase_mismatch: vec![0.0; d] })
    }

    /// Equal coherent intensity `n_c` in every arm.
    pub fn uniform(circuit: CircuitVector, n_c: f64, squeezed_photons: f64) -> Result<Self> {
        let d = circuit.len();
        Self::new(circuit, vec![n_c; d], squeezed_photons)
    }

    pub fn with_phase_mismatch(mut self, chi: Vec<f64>) -> Result<Self> {
        if chi.len() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), found: chi.len() });
        }
        if chi.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("phase mismatch must be finite".into()));
        }
        self.phase_mismatch = chi;
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.circuit.len()
    }

    pub fn total_photons(&self) -> f64 {
        self.coherent_intensities.iter().sum::<f64>() + self.squeezed_photons
    }

    pub fn squeeze_parameter(&self) -> f64 {
        squeeze_parameter(self.squeezed_photons)
    }

    pub fn is_phase_matched(&self) -> bool {
        self.phase_mismatch.iter().all(|x| *x == 0.0)
    }

    fn require_matched(&self) -> Result<()> {
        if self.is_phase_matched() {
            Ok(())
        } else {
            Err(Error::PhaseMismatch)
        }
    }
}

/// One arm of the separable strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparableArm {
    pub coherent_intensity: f64,
    pub squeeze_magnitude: f64,
}

impl SeparableArm {
    pub fn from_photons(coherent_intensity: f64, squeezed_photons: f64) -> Self {
        Self { coherent_intensity, squeeze_magnitude: squeeze_parameter(squeezed_photons) }
    }

    pub fn squeezed_photons(&self) -> f64 {
        self.squeeze_magnitude.sinh().powi(2)
    }
}

/// Separable strategy: an independent squeezed vacuum in every interferometer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableConfig {
    pub arms: Vec<SeparableArm>,
}

impl SeparableConfig {
    pub fn new(arms: Vec<SeparableArm>) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::InvalidConfig("no arms".into()));
        }
        for a in &arms {
            check_finite_nonneg(&[a.coherent_intensity, a.squeeze_magnitude], "arm parameters")?;
        }
        Ok(Self { arms })
    }

    pub fn from_photons(coherent: &[f64], squeezed: &[f64]) -> Result<Self> {
        if coherent.len() != squeezed.len() {
            return Err(Error::DimensionMismatch { expected: coherent.len(), found: squeezed.len() });
        }
        check_finite_nonneg(squeezed, "squeezed photons")?;
        Self::new(coherent.iter().zip(squeezed).map(|(&a, &s)| SeparableArm::from_photons(a, s)).collect())
    }

    pub fn d(&self) -> usize {
        self.arms.len()
    }

    pub fn total_photons(&self) -> f64 {
        self.arms.iter().map(|a| a.coherent_intensity + a.squeezed_photons()).sum()
    }
}

fn degenerate(a2: f64, s: f64) -> bool {
    (a2 - s).abs() <= POLE_TOL * a2.max(s)
}

/// Pole guard for the slope of every arm.
pub(crate) fn check_slopes(u: &[f64], a2: &[f64], n_s: f64) -> Result<()> {
    for (j, (&uj, &aj)) in u.iter().zip(a2).enumerate() {
        if degenerate(aj, uj * uj * n_s) {
            return Err(Error::DegenerateSlope { arm: j });
        }
    }
    Ok(())
}

/// Inverse moment matrix at `θ_j = π/2` for a phase-matched network.
pub fn inverse_moment_matrix(config: &EntangledConfig) -> Result<DMatrix<f64>> {
    config.require_matched()?;
    let u = config.circuit.entries();
    let a2 = &config.coherent_intensities;
    let n_s = config.squeezed_photons;
    check_slopes(u, a2, n_s)?;
    let (_, em2r) = squeeze_factors(n_s);
    let d = config.d();
    let g: Vec<f64> = (0..d).map(|j| a2[j] - u[j] * u[j] * n_s).collect();
    let x: Vec<f64> = (0..d).map(|j| a2[j].sqrt() * u[j] / g[j]).collect();
    Ok(DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            let u2 = u[j] * u[j];
            (a2[j] * (1.0 - u2) + a2[j] * u2 * em2r + u2 * n_s) / (g[j] * g[j])
        } else {
            (em2r - 1.0) * x[i] * x[j]
        }
    }))
}

/// Quantum Fisher information matrix of a phase-matched network.
pub fn qfim(config: &EntangledConfig) -> Result<DMatrix<f64>> {
    config.require_matched()?;
    let u = config.circuit.entries();
    let a2 = &config.coherent_intensities;
    let n_s = config.squeezed_photons;
    let (e2r, _) = squeeze_factors(n_s);
    let d = config.d();
    Ok(DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            let u2 = u[j] * u[j];
            a2[j] * (1.0 - u2) + a2[j] * u2 * e2r + u2 * n_s
        } else {
            (a2[i] * a2[j]).sqrt() * (e2r - 1.0) * u[i] * u[j]
        }
    }))
}

/// Inverse QFIM through the Sherman–Morrison rank-one update.
pub fn qfim_inverse(config: &EntangledConfig) -> Result<DMatrix<f64>> {
    config.require_matched()?;
    let u = config.circuit.entries();
    let a2 = &config.coherent_intensities;
    let n_s = config.squeezed_photons;
    let d = config.d();
    let diag: Vec<f64> = (0..d).map(|j| a2[j] + u[j] * u[j] * n_s).collect();
    if let Some(j) = diag.iter().position(|x| *x <= 0.0) {
        return Err(Error::SingularInformation { arm: j });
    }
    let (e2r, _) = squeeze_factors(n_s);
    let k: f64 = (0..d).map(|j| a2[j] * u[j] * u[j] / diag[j]).sum();
    let c = (e2r - 1.0) / (1.0 + k * (e2r - 1.0));
    let y: Vec<f64> = (0..d).map(|j| a2[j].sqrt() * u[j] / diag[j]).collect();
    Ok(DMatrix::from_fn(d, d, |i, j| {
        let mut f = -c * y[i] * y[j];
        if i == j {
            f += 1.0 / diag[j];
        }
        f
    }))
}

/// Per-arm moment variance of the separable strategy.
pub fn separable_variance_terms(config: &SeparableConfig) -> Result<Vec<f64>> {
    config
        .arms
        .iter()
        .enumerate()
        .map(|(j, arm)| {
            let a2 = arm.coherent_intensity;
            let s = arm.squeezed_photons();
            if degenerate(a2, s) {
                return Err(Error::DegenerateSlope { arm: j });
            }
            let em2r = (-2.0 * arm.squeeze_magnitude).exp();
            Ok((a2 * em2r + s) / ((a2 - s) * (a2 - s)))
        })
        .collect()
}

/// Per-arm quantum Fisher information of the separable strategy.
pub fn separable_qfi_terms(config: &SeparableConfig) -> Vec<f64> {
    config
        .arms
        .iter()
        .map(|arm| arm.coherent_intensity * (2.0 * arm.squeeze_magnitude).exp() + arm.squeezed_photons())
        .collect()
}

/// `4Γ` for uniform intensities `n_c` and `ũ_j = 1/sqrt(d)`.
pub fn covariance_c2_structure(d: usize, n_c: f64, n_s: f64) -> DMatrix<f64> {
    let (_, em2r) = squeeze_factors(n_s);
    let df = d as f64;
    DMatrix::from_fn(d, d, |i, j| {
        let mut g = n_c * (em2r - 1.0) / df;
        if i == j {
            g += n_c + n_s / df;
        }
        g
    })
}

/// `ũ_j = signs_j |U_{Dj}|` for the 1-based injection port `D`.
pub fn circuit_vector_from_unitary(u: &DMatrix<C64>, port: usize, signs: &[f64]) -> Result<CircuitVector> {
    if u.nrows() != u.ncols() {
        return Err(Error::DimensionMismatch { expected: u.nrows(), found: u.ncols() });
    }
    let d = u.nrows();
    if signs.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: signs.len() });
    }
    let deviation = unitarity_deviation(u);
    if !(deviation <= UNITARY_TOL) {
        return Err(Error::NonUnitary { deviation });
    }
    if port == 0 || port > d {
        return Err(Error::InvalidConfig(format!("port {port} outside 1..={d}")));
    }
    if signs.iter().any(|s| s.abs() != 1.0) {
        return Err(Error::InvalidConfig("signs must be +1 or -1".into()));
    }
    CircuitVector::normalized((0..d).map(|j| signs[j] * u[(port - 1, j)].norm()).collect())
}

/// JSON form of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDocument {
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_tilde: Option<Vec<f64>>,
    /// Rows of `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub port: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<f64>>,
    pub alpha_sq: Vec<f64>,
    pub n_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<Vec<f64>>,
}

impl ConfigDocument {
    pub fn from_config(config: &EntangledConfig) -> Self {
        Self {
            d: config.d(),
            u_tilde: Some(config.circuit.entries().to_vec()),
            unitary: None,
            port: None,
            signs: None,
            alpha_sq: config.coherent_intensities.clone(),
            n_s: config.squeezed_photons,
            chi: if config.is_phase_matched() { None } else { Some(config.phase_mismatch.clone()) },
        }
    }

    pub fn to_config(&self) -> Result<EntangledConfig> {
        let circuit = match (&self.u_tilde, &self.unitary) {
            (Some(u), None) => CircuitVector::new(u.clone())?,
            (None, Some(rows)) => {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidConfig("unitary must be square".into()));
                }
                let m = DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1]));
                let signs = self.signs.clone().unwrap_or_else(|| vec![1.0; n]);
                circuit_vector_from_unitary(&m, self.port.unwrap_or(1), &signs)?
            }
            _ => return Err(Error::InvalidConfig("give exactly one of u_tilde or unitary".into())),
        };
        if circuit.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: circuit.len() });
        }
        let config = EntangledConfig::new(circuit, self.alpha_sq.clone(), self.n_s)?;
        match &self.chi {
            Some(chi) => config.with_phase_mismatch(chi.clone()),
            None => Ok(config),
        }
    }
}
