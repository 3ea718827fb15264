//! Squeezing and Fisher spectra, and statistics over Haar-random circuits.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian_oracle::oracle_moment_matrix;
use crate::linalg::{mean_and_std, symmetric_eigen_desc, C64};
use crate::network_model::{inverse_moment_matrix, qfim, CircuitVector, CoefficientVector, EntangledConfig};
use crate::rng::stream_rng;

const DEGENERACY_GAP: f64 = 1e-8;
const CONDITION_LIMIT: f64 = 1e12;

/// Eigen-decomposition of the moment matrix or the QFIM.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Descending.
    pub eigenvalues: DVector<f64>,
    /// Orthonormal columns matching `eigenvalues`.
    pub eigenvectors: DMatrix<f64>,
    pub max_eigenvalue: f64,
    /// Top eigenvector rescaled to `|v|^2 = 1/d`.
    pub optimal_v: CoefficientVector,
    pub degeneracy_classes: Vec<Vec<usize>>,
    pub condition_number: f64,
}

impl SpectrumResult {
    fn from_matrix(m: &DMatrix<f64>, condition_number: f64) -> Result<Self> {
        let (eigenvalues, eigenvectors) = symmetric_eigen_desc(m);
        let top = eigenvectors.column(0);
        // fix the overall sign so the largest component is positive
        let k = top.iamax();
        let s = if top[k] < 0.0 { -1.0 } else { 1.0 };
        let optimal_v = CoefficientVector::from_direction(top.iter().map(|x| s * x).collect())?;
        Ok(Self {
            max_eigenvalue: eigenvalues[0],
            degeneracy_classes: degeneracy_classes(eigenvalues.as_slice()),
            eigenvalues,
            eigenvectors,
            optimal_v,
            condition_number,
        })
    }
}

/// Groups descending eigenvalues whose consecutive gap is below `1e-8` of the largest magnitude.
pub fn degeneracy_classes(values: &[f64]) -> Vec<Vec<usize>> {
    let scale = values.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, x) in values.iter().enumerate() {
        match classes.last_mut() {
            Some(class) if (values[*class.last().unwrap()] - x).abs() < DEGENERACY_GAP * scale => class.push(i),
            _ => classes.push(vec![i]),
        }
    }
    classes
}

/// Moment matrix `M` by dense inversion of the closed-form `M⁻¹`, or from the
/// oracle's `G Γ⁻¹ G` when `M⁻¹` is too ill-conditioned.
pub fn moment_matrix(config: &EntangledConfig) -> Result<(DMatrix<f64>, f64)> {
    let minv = inverse_moment_matrix(config)?;
    let (vals, _) = symmetric_eigen_desc(&minv);
    let d = config.d();
    let cond = if vals[d - 1] > 0.0 { vals[0] / vals[d - 1] } else { f64::INFINITY };
    if cond <= CONDITION_LIMIT {
        if let Some(m) = minv.try_inverse() {
            return Ok(((&m + m.transpose()) * 0.5, cond));
        }
    }
    let (gamma, g) = oracle_moment_matrix(config, &vec![FRAC_PI_2; d])?;
    let gamma_inv = gamma.try_inverse().ok_or(Error::SingularInformation { arm: 0 })?;
    let m = DMatrix::from_fn(d, d, |i, j| g[i] * gamma_inv[(i, j)] * g[j]);
    Ok(((&m + m.transpose()) * 0.5, cond))
}

/// Spectrum of the moment matrix; `1/(μ_max d)` is the optimal moment variance.
pub fn squeezing_spectrum(config: &EntangledConfig) -> Result<SpectrumResult> {
    let (m, cond) = moment_matrix(config)?;
    SpectrumResult::from_matrix(&m, cond)
}

/// Spectrum of the QFIM; `1/(f_max d)` is the optimal Cramér–Rao variance.
pub fn fisher_spectrum(config: &EntangledConfig) -> Result<SpectrumResult> {
    let f = qfim(config)?;
    let (vals, _) = symmetric_eigen_desc(&f);
    let d = config.d();
    let cond = if vals[d - 1] > 0.0 { vals[0] / vals[d - 1] } else { f64::INFINITY };
    SpectrumResult::from_matrix(&f, cond)
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn sample_haar_circuit(d: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(s * re, s * im)
    });
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Magnitudes of the first row of the Haar sample for `(seed, index)`.
pub fn haar_circuit_vector(d: usize, seed: u64, index: u64) -> CircuitVector {
    let mut rng = stream_rng(seed, index);
    let u = sample_haar_circuit(d, &mut rng);
    CircuitVector::normalized((0..d).map(|j| u[(0, j)].norm()).collect()).expect("row of a unitary")
}

/// Sample mean and fluctuation over circuits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub sample_count: usize,
    pub mean: f64,
    /// Sample standard deviation.
    pub rms: f64,
    pub master_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl EnsembleStats {
    pub fn from_values(values: Vec<f64>, master_seed: u64, keep: bool) -> Self {
        let (mean, rms) = mean_and_std(&values);
        Self { sample_count: values.len(), mean, rms, master_seed, values: if keep { Some(values) } else { None } }
    }

    pub fn standard_error(&self) -> f64 {
        self.rms / (self.sample_count as f64).sqrt()
    }
}

/// Which spectrum sets the per-circuit optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumObjective {
    /// `1/(μ_max d)`.
    Emom,
    /// `1/(f_max d)`.
    Eqcr,
}

fn uniform_config(u: &CircuitVector, n_t: f64, n_s: f64) -> Result<EntangledConfig> {
    let d = u.len();
    EntangledConfig::uniform(u.clone(), (n_t - n_s) / d as f64, n_s)
}

/// `1/(μ_max d)` or `1/(f_max d)` for one circuit with uniform intensities.
pub fn optimal_variance(u: &CircuitVector, n_t: f64, n_s: f64, objective: SpectrumObjective) -> Result<f64> {
    let config = uniform_config(u, n_t, n_s)?;
    let top = match objective {
        SpectrumObjective::Emom => moment_matrix(&config).map(|(m, _)| symmetric_eigen_desc(&m).0[0])?,
        SpectrumObjective::Eqcr => symmetric_eigen_desc(&qfim(&config)?).0[0],
    };
    Ok(1.0 / (top * u.len() as f64))
}

fn check_budget(n_t: f64, n_s: f64) -> Result<()> {
    if !(n_s < n_t) || n_s < 0.0 {
        return Err(Error::Infeasible(format!("n_s = {n_s} must lie in [0, n_T = {n_t})")));
    }
    Ok(())
}

fn sample_map<F>(samples: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<f64> + Sync + Send,
{
    (0..samples as u64).into_par_iter().map(f).collect()
}

/// Statistics of the per-circuit optimum at fixed `n_s`.
pub fn ensemble_optimal_variance(
    d: usize,
    n_t: f64,
    n_s: f64,
    samples: usize,
    seed: u64,
    objective: SpectrumObjective,
) -> Result<EnsembleStats> {
    check_budget(n_t, n_s)?;
    let values = sample_map(samples, |i| optimal_variance(&haar_circuit_vector(d, seed, i), n_t, n_s, objective))?;
    Ok(EnsembleStats::from_values(values, seed, false))
}

/// Golden-section minimum of `f(ln x)` over `[ln lo, ln hi]`, stopping at a
/// relative bracket width of `tol`.
pub fn golden_section_log<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - inv_phi * (b - a);
    let mut e = a + inv_phi * (b - a);
    let mut fc = f(c.exp())?;
    let mut fe = f(e.exp())?;
    while b - a > tol {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_phi * (b - a);
            fc = f(c.exp())?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_phi * (b - a);
            fe = f(e.exp())?;
        }
    }
    Ok(if fc < fe { (fc, c.exp()) } else { (fe, e.exp()) })
}

fn min_over_squeezing(u: &CircuitVector, n_t: f64, objective: SpectrumObjective) -> Result<(f64, f64)> {
    golden_section_log(|n_s| optimal_variance(u, n_t, n_s, objective), 1e-3, 0.999 * n_t, 1e-6)
}

/// Per-circuit minimum over `n_s` of `1/(μ_max d)`: statistics of the minimum and of the optimal `n_s`.
pub fn ensemble_optimal_squeezing(
    d: usize,
    n_t: f64,
    samples: usize,
    seed: u64,
) -> Result<(EnsembleStats, EnsembleStats)> {
    ensemble_min_over_squeezing(d, n_t, samples, seed, SpectrumObjective::Emom)
}

/// Per-circuit minimum over `n_s` of `1/(f_max d)`: statistics of the minimum and of the optimal `n_s`.
pub fn ensemble_heisenberg_saturation(
    d: usize,
    n_t: f64,
    samples: usize,
    seed: u64,
) -> Result<(EnsembleStats, EnsembleStats)> {
    ensemble_min_over_squeezing(d, n_t, samples, seed, SpectrumObjective::Eqcr)
}

fn ensemble_min_over_squeezing(
    d: usize,
    n_t: f64,
    samples: usize,
    seed: u64,
    objective: SpectrumObjective,
) -> Result<(EnsembleStats, EnsembleStats)> {
    if !(n_t > 1e-3 / 0.999) {
        return Err(Error::Infeasible(format!("n_T = {n_t} too small for the squeezing search")));
    }
    let pairs: Vec<(f64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| min_over_squeezing(&haar_circuit_vector(d, seed, i), n_t, objective))
        .collect::<Result<_>>()?;
    let (mins, args): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok((EnsembleStats::from_values(mins, seed, false), EnsembleStats::from_values(args, seed, false)))
}

/// Statistics of `S = d Σ ũ_j^4`.
pub fn ensemble_s_statistic(d: usize, samples: usize, seed: u64) -> EnsembleStats {
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let u = haar_circuit_vector(d, seed, i);
            d as f64 * u.entries().iter().map(|x| x.powi(4)).sum::<f64>()
        })
        .collect();
    EnsembleStats::from_values(values, seed, false)
}

/// Statistics of `|U_{1j}|^2` pooled over all entries of the injected row.
pub fn ensemble_row_weight(d: usize, samples: usize, seed: u64) -> EnsembleStats {
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .flat_map_iter(|i| {
            let u = haar_circuit_vector(d, seed, i);
            u.entries().iter().map(|x| x * x).collect::<Vec<_>>()
        })
        .collect();
    EnsembleStats::from_values(values, seed, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{variance_emom, variance_eqcr};
    use crate::linalg::unitarity_deviation;
    use crate::network_model::{squeeze_factors, CircuitVector};

    #[test]
    fn worked_spectrum() {
        let c = EntangledConfig::uniform(CircuitVector::uniform(2), 100.0, 1.0).unwrap();
        let s = squeezing_spectrum(&c).unwrap();
        let minv = inverse_moment_matrix(&c).unwrap();
        let top = 1.0 / (minv[(0, 0)] + minv[(0, 1)]);
        let bottom = 1.0 / (minv[(0, 0)] - minv[(0, 1)]);
        assert!((s.eigenvalues[0] - top).abs() / top < 1e-12);
        assert!((s.eigenvalues[1] - bottom).abs() / bottom < 1e-12);
        assert!((s.eigenvalues[0] - 560.69).abs() < 0.01);
        assert!((s.eigenvalues[1] - 98.510).abs() < 0.001);
        assert!((s.optimal_v.entries()[0] - 0.5).abs() < 1e-12);
        let v = variance_emom(&c, &s.optimal_v).unwrap();
        assert!((v - 1.0 / (2.0 * s.max_eigenvalue)).abs() / v < 1e-12);
    }

    #[test]
    fn degenerate_coherent_spectrum() {
        let c = EntangledConfig::uniform(CircuitVector::uniform(3), 40.0, 0.0).unwrap();
        let s = squeezing_spectrum(&c).unwrap();
        assert_eq!(s.degeneracy_classes, vec![vec![0, 1, 2]]);
        assert!(s.eigenvalues.iter().all(|x| (x - 40.0).abs() < 1e-10));
        let f = fisher_spectrum(&c).unwrap();
        assert!(f.eigenvalues.iter().all(|x| (x - 40.0).abs() < 1e-10));
    }

    #[test]
    fn rank_one_fisher_spectrum() {
        let (n_c, n_s) = (1e7, 100.0);
        let u = CircuitVector::uniform(4);
        let c = EntangledConfig::uniform(u.clone(), n_c, n_s).unwrap();
        let f = fisher_spectrum(&c).unwrap();
        let (e2r, _) = squeeze_factors(n_s);
        // f_max = n_c e^{2r} + n_s/d on the ũ direction
        assert!((f.max_eigenvalue / (n_c * e2r) - 1.0).abs() < 1e-4);
        for k in 1..4 {
            assert!((f.eigenvalues[k] - (n_c + n_s / 4.0)).abs() / n_c < 1e-12);
        }
        let m = squeezing_spectrum(&c).unwrap();
        assert!((m.max_eigenvalue / (n_c * e2r) - 1.0).abs() < 5e-3);
        assert!(f.max_eigenvalue >= m.max_eigenvalue);
        let e = variance_eqcr(&c, &f.optimal_v).unwrap();
        assert!((e * 4.0 * f.max_eigenvalue - 1.0).abs() < 1e-9);
    }

    #[test]
    fn haar_sample_is_unitary() {
        let mut rng = stream_rng(3, 0);
        for d in 1..6 {
            let u = sample_haar_circuit(d, &mut rng);
            assert!(unitarity_deviation(&u) < 1e-13);
        }
        let u = sample_haar_circuit(1, &mut rng);
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn golden_section_finds_minimum() {
        let (f, x) = golden_section_log(|x| Ok((x.ln() - 2.0).powi(2)), 1e-3, 1e3, 1e-8).unwrap();
        assert!(f < 1e-14);
        assert!((x - 2f64.exp()).abs() < 1e-6);
    }

    #[test]
    fn shot_noise_without_squeezing() {
        let u = haar_circuit_vector(5, 1, 0);
        let v = optimal_variance(&u, 1e4, 0.0, SpectrumObjective::Eqcr).unwrap();
        assert!((v - 1e-4).abs() < 1e-15);
    }

    #[test]
    fn ensemble_rejects_oversqueezing() {
        assert!(matches!(
            ensemble_optimal_variance(3, 10.0, 10.0, 4, 0, SpectrumObjective::Emom),
            Err(Error::Infeasible(_))
        ));
    }
}
