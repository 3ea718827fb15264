//! Photon-number moments of displaced-squeezed inputs propagated through a
//! passive linear network, used as an independent reference for the closed
//! forms in [`crate::network_model`].

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{householder_completion, max_abs, relative_deviation, unitarity_deviation, C64};
use crate::network_model::{self, circuit_vector_from_unitary, squeeze_parameter, EntangledConfig};
use crate::rng::stream_rng;
use crate::spectra::sample_haar_circuit;

const UNITARY_TOL: f64 = 1e-10;

/// Input state of one mode: coherent amplitude and squeezing `r e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeInput {
    pub displacement: C64,
    pub squeeze_magnitude: f64,
    pub squeeze_phase: f64,
}

impl ModeInput {
    pub fn vacuum() -> Self {
        Self { displacement: C64::new(0.0, 0.0), squeeze_magnitude: 0.0, squeeze_phase: 0.0 }
    }

    pub fn coherent(beta: C64) -> Self {
        Self { displacement: beta, ..Self::vacuum() }
    }

    pub fn squeezed(r: f64, phase: f64) -> Self {
        Self { squeeze_magnitude: r, squeeze_phase: phase, ..Self::vacuum() }
    }
}

/// Passive network `𝒜` acting on a product of single-mode inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianNetwork {
    transform: DMatrix<C64>,
    inputs: Vec<ModeInput>,
}

impl GaussianNetwork {
    pub fn mode_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn transform(&self) -> &DMatrix<C64> {
        &self.transform
    }

    pub fn inputs(&self) -> &[ModeInput] {
        &self.inputs
    }
}

/// Validates unitarity (to `1e-10`) and dimensions.
pub fn build_network(transform: DMatrix<C64>, inputs: Vec<ModeInput>) -> Result<GaussianNetwork> {
    if transform.nrows() != transform.ncols() {
        return Err(Error::DimensionMismatch { expected: transform.nrows(), found: transform.ncols() });
    }
    if transform.nrows() != inputs.len() {
        return Err(Error::DimensionMismatch { expected: transform.nrows(), found: inputs.len() });
    }
    let deviation = unitarity_deviation(&transform);
    if !(deviation <= UNITARY_TOL) {
        return Err(Error::NonUnitary { deviation });
    }
    Ok(GaussianNetwork { transform, inputs })
}

/// First and second photon-number moments at the network output.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTensors {
    pub e: DMatrix<C64>,
    pub en: DMatrix<C64>,
    pub gamma: DVector<C64>,
    /// Photon-number covariance `⟨n_i n_j⟩ - ⟨n_i⟩⟨n_j⟩`.
    pub h: DMatrix<f64>,
    pub mean_photons: DVector<f64>,
    /// Largest non-Hermitian residue removed by symmetrization, relative to the entries.
    pub asymmetry: f64,
}

pub fn compute_moment_tensors(net: &GaussianNetwork) -> Result<MomentTensors> {
    Oracle::exact().moment_tensors(net)
}

fn hermitian_part(x: &DMatrix<C64>) -> (DMatrix<C64>, f64) {
    let herm = (x + x.adjoint()) * C64::new(0.5, 0.0);
    let scale = x.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(1e-300);
    let res = (x - &herm).iter().fold(0.0f64, |a, z| a.max(z.norm())) / scale;
    (herm, res)
}

fn symmetric_part(x: &DMatrix<C64>) -> (DMatrix<C64>, f64) {
    let sym = (x + x.transpose()) * C64::new(0.5, 0.0);
    let scale = x.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(1e-300);
    let res = (x - &sym).iter().fold(0.0f64, |a, z| a.max(z.norm())) / scale;
    (sym, res)
}

/// Oracle evaluator. `e_scale` multiplies `E` after assembly and exists only
/// to check that the equivalence suite detects corrupted moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oracle {
    e_scale: f64,
}

impl Default for Oracle {
    fn default() -> Self {
        Self::exact()
    }
}

impl Oracle {
    pub fn exact() -> Self {
        Self { e_scale: 1.0 }
    }

    /// Corrupts `E` by the relative amount `eps`.
    pub fn perturbed(eps: f64) -> Self {
        Self { e_scale: 1.0 + eps }
    }

    pub fn moment_tensors(&self, net: &GaussianNetwork) -> Result<MomentTensors> {
        let n = net.mode_count();
        let mut displaced = vec![C64::new(0.0, 0.0); n];
        for (k, m) in net.inputs.iter().enumerate() {
            if m.displacement.norm() != 0.0 && m.squeeze_magnitude != 0.0 {
                return Err(Error::MixedModeUnsupported { mode: k });
            }
            displaced[k] = m.displacement;
        }
        let a = net.transform.adjoint();
        let a_dag = a.adjoint();
        let c = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(net.inputs[i].squeeze_magnitude.cosh().powi(2), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let cd = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                let m = &net.inputs[i];
                C64::from_polar(m.squeeze_magnitude.sinh() * m.squeeze_magnitude.cosh(), m.squeeze_phase)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let e_raw = &a_dag * &c * &a;
        let en_raw = &a_dag * &cd * a.conjugate();
        let (mut e, asym_e) = hermitian_part(&e_raw);
        let (en, asym_en) = symmetric_part(&en_raw);
        e *= C64::new(self.e_scale, 0.0);

        let beta = DVector::from_vec(displaced);
        let b = &a_dag * beta;
        let gamma = e.conjugate() * b.conjugate() - en.conjugate() * &b;

        let mut h = DMatrix::<f64>::zeros(n, n);
        let mut h_imag = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let gg = gamma[i] * gamma[j];
                let ggd = gamma[i] * gamma[j].conj();
                let mut z = en[(i, j)] * en[(i, j)].conj() - en[(i, j)] * gg - en[(i, j)].conj() * gg.conj()
                    + e[(i, j)] * e[(i, j)].conj()
                    + e[(i, j)] * ggd
                    + e[(i, j)].conj() * ggd.conj();
                if i == j {
                    z -= e[(i, j)] + ggd;
                }
                h[(i, j)] = z.re;
                h_imag = h_imag.max(z.im.abs());
            }
        }
        let h_sym = (&h + h.transpose()) * 0.5;
        let scale = max_abs(&h).max(1e-300);
        let asym_h = (max_abs(&(&h - &h_sym)).max(h_imag)) / scale;
        let mean_photons = DVector::from_fn(n, |i, _| -1.0 + e[(i, i)].re + gamma[i].norm_sqr());
        Ok(MomentTensors { e, en, gamma, h: h_sym, mean_photons, asymmetry: asym_e.max(asym_en).max(asym_h) })
    }

    /// QFIM from photon-number covariances of the balanced-splitter network.
    pub fn qfim(&self, net: &SensorNetwork) -> Result<DMatrix<f64>> {
        let d = net.d();
        let t = self.moment_tensors(&net.qfim_network()?)?;
        Ok(difference_block(&t.h, d))
    }

    /// Measurement covariance `Γ` and slopes `G_jj` at working point `theta`.
    pub fn moment_matrix(&self, net: &SensorNetwork, theta: &[f64]) -> Result<(DMatrix<f64>, DVector<f64>)> {
        let d = net.d();
        if theta.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: theta.len() });
        }
        let t = self.moment_tensors(&net.moment_network(theta)?)?;
        let gamma = difference_block(&t.h, d) * 0.25;
        // ⟨n_j - n_{j+d}⟩ is a first harmonic in θ_j, so its derivative is its value at θ_j + π/2.
        let mut g = DVector::zeros(d);
        for j in 0..d {
            let mut shifted = theta.to_vec();
            shifted[j] += FRAC_PI_2;
            let ts = self.moment_tensors(&net.moment_network(&shifted)?)?;
            g[j] = 0.5 * (ts.mean_photons[j] - ts.mean_photons[j + d]);
        }
        Ok((gamma, g))
    }

    /// `G⁻¹ Γ G⁻¹` at `θ_j = π/2`.
    pub fn inverse_moment_matrix(&self, net: &SensorNetwork) -> Result<DMatrix<f64>> {
        let d = net.d();
        let (gamma, g) = self.moment_matrix(net, &vec![FRAC_PI_2; d])?;
        if let Some(j) = g.iter().position(|x| *x == 0.0) {
            return Err(Error::DegenerateSlope { arm: j });
        }
        Ok(DMatrix::from_fn(d, d, |i, j| gamma[(i, j)] / (g[i] * g[j])))
    }
}

fn difference_block(h: &DMatrix<f64>, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| h[(i, j)] + h[(i + d, j + d)] - h[(i, j + d)] - h[(i + d, j)])
}

/// Complex description of the interferometer network: circuit unitary,
/// injection port, coherent amplitudes and the single squeezed vacuum.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorNetwork {
    pub unitary: DMatrix<C64>,
    /// 1-based injection port.
    pub port: usize,
    pub amplitudes: Vec<C64>,
    pub squeezed_photons: f64,
    pub squeeze_phase: f64,
}

impl SensorNetwork {
    /// A real orthogonal circuit whose first row is `ũ`, with coherent phases
    /// equal to the configured mismatch angles.
    pub fn from_config(config: &EntangledConfig) -> Self {
        let u = householder_completion(config.circuit.entries());
        let amplitudes = config
            .coherent_intensities
            .iter()
            .zip(&config.phase_mismatch)
            .map(|(a2, chi)| C64::from_polar(a2.sqrt(), *chi))
            .collect();
        Self {
            unitary: u.map(|x| C64::new(x, 0.0)),
            port: 1,
            amplitudes,
            squeezed_photons: config.squeezed_photons,
            squeeze_phase: 0.0,
        }
    }

    /// Chooses coherent phases so that `e^{iχ_j} U_{Dj} = signs_j |U_{Dj}|`.
    pub fn phase_matched(
        unitary: DMatrix<C64>,
        port: usize,
        alpha_sq: &[f64],
        squeezed_photons: f64,
        signs: &[f64],
        squeeze_phase: f64,
    ) -> Result<Self> {
        let d = unitary.nrows();
        if alpha_sq.len() != d || signs.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: alpha_sq.len().min(signs.len()) });
        }
        if port == 0 || port > d {
            return Err(Error::InvalidConfig(format!("port {port} outside 1..={d}")));
        }
        let amplitudes = (0..d)
            .map(|j| {
                let sign_phase = if signs[j] < 0.0 { std::f64::consts::PI } else { 0.0 };
                let phi = 0.5 * squeeze_phase + sign_phase - unitary[(port - 1, j)].arg();
                C64::from_polar(alpha_sq[j].sqrt(), phi)
            })
            .collect();
        Ok(Self { unitary, port, amplitudes, squeezed_photons, squeeze_phase })
    }

    pub fn d(&self) -> usize {
        self.unitary.nrows()
    }

    fn inputs(&self) -> Vec<ModeInput> {
        let d = self.d();
        let mut inputs: Vec<ModeInput> = self.amplitudes.iter().map(|a| ModeInput::coherent(*a)).collect();
        inputs.extend((0..d).map(|_| ModeInput::vacuum()));
        inputs[d + self.port - 1] = ModeInput::squeezed(squeeze_parameter(self.squeezed_photons), self.squeeze_phase);
        inputs
    }

    fn circuit_block(&self) -> DMatrix<C64> {
        let d = self.d();
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        for i in 0..d {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m.view_mut((d, d), (d, d)).copy_from(&self.unitary.adjoint());
        m
    }

    /// Balanced splitters `(1/√2)[[I, -iI], [-iI, I]]` after the circuit.
    pub fn qfim_network(&self) -> Result<GaussianNetwork> {
        let d = self.d();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bs = DMatrix::from_fn(2 * d, 2 * d, |i, j| {
            if i == j {
                C64::new(s, 0.0)
            } else if i % d == j % d {
                C64::new(0.0, -s)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        build_network(bs * self.circuit_block(), self.inputs())
    }

    /// Interferometers at working point `theta` after the circuit.
    pub fn moment_network(&self, theta: &[f64]) -> Result<GaussianNetwork> {
        let d = self.d();
        let rot = DMatrix::from_fn(2 * d, 2 * d, |i, j| {
            let k = i % d;
            if k != j % d {
                return C64::new(0.0, 0.0);
            }
            let (s, c) = (0.5 * theta[k]).sin_cos();
            let x = match (i < d, j < d) {
                (true, true) | (false, false) => c,
                (true, false) => s,
                (false, true) => -s,
            };
            C64::new(x, 0.0)
        });
        build_network(rot * self.circuit_block(), self.inputs())
    }
}

/// QFIM of an entangled configuration computed through the oracle.
pub fn oracle_qfim(config: &EntangledConfig) -> Result<DMatrix<f64>> {
    Oracle::exact().qfim(&SensorNetwork::from_config(config))
}

/// `(Γ, G)` of an entangled configuration computed through the oracle.
pub fn oracle_moment_matrix(config: &EntangledConfig, theta: &[f64]) -> Result<(DMatrix<f64>, DVector<f64>)> {
    Oracle::exact().moment_matrix(&SensorNetwork::from_config(config), theta)
}

/// Inverse moment matrix at `θ_j = π/2` computed through the oracle.
pub fn oracle_inverse_moment_matrix(config: &EntangledConfig) -> Result<DMatrix<f64>> {
    Oracle::exact().inverse_moment_matrix(&SensorNetwork::from_config(config))
}

/// Outcome of the randomized closed-form-versus-oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub trials: usize,
    pub checks: usize,
    pub max_deviation_qfim: f64,
    pub max_deviation_inverse_moment: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// One random phase-matched network: Haar circuit, random port, signs,
/// intensities in `[0.1, 1e3]`, `n_s` in `[0, 1e2]` and squeeze phase.
pub fn random_sensor_network(d: usize, rng: &mut impl Rng) -> (SensorNetwork, EntangledConfig) {
    loop {
        let u = sample_haar_circuit(d, rng);
        let port = rng.random_range(1..=d);
        let signs: Vec<f64> = (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let alpha_sq: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..=1e3)).collect();
        let n_s = rng.random_range(0.0..=1e2);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let circuit = circuit_vector_from_unitary(&u, port, &signs).expect("Haar sample is unitary");
        let config = EntangledConfig::new(circuit, alpha_sq.clone(), n_s).expect("valid ranges");
        if network_model::check_slopes(config.circuit.entries(), &alpha_sq, n_s).is_err() {
            continue;
        }
        let net = SensorNetwork::phase_matched(u, port, &alpha_sq, n_s, &signs, phase).expect("dimensions agree");
        return (net, config);
    }
}

/// Compares the closed forms against `oracle` on `trials` random networks.
pub fn equivalence_check(trials: usize, d_max: usize, seed: u64, oracle: &Oracle) -> Result<EquivalenceReport> {
    const TOL: f64 = 1e-9;
    let mut report = EquivalenceReport {
        trials,
        checks: 0,
        max_deviation_qfim: 0.0,
        max_deviation_inverse_moment: 0.0,
        tolerance: TOL,
        passed: true,
    };
    let d_max = d_max.max(1);
    for t in 0..trials {
        let mut rng = stream_rng(seed, t as u64);
        let d = rng.random_range(1..=d_max);
        let (net, config) = random_sensor_network(d, &mut rng);
        let f_dev = relative_deviation(&oracle.qfim(&net)?, &network_model::qfim(&config)?);
        let m_dev =
            relative_deviation(&oracle.inverse_moment_matrix(&net)?, &network_model::inverse_moment_matrix(&config)?);
        report.checks += 2;
        report.max_deviation_qfim = report.max_deviation_qfim.max(f_dev);
        report.max_deviation_inverse_moment = report.max_deviation_inverse_moment.max(m_dev);
        if !(f_dev <= TOL && m_dev <= TOL) {
            report.passed = false;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network_model::CircuitVector;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn build_network_checks() {
        assert!(build_network(DMatrix::identity(2, 2), vec![ModeInput::vacuum(); 2]).is_ok());
        let bad = DMatrix::from_row_slice(2, 2, &[c(0.9, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(build_network(bad, vec![ModeInput::vacuum(); 2]), Err(Error::NonUnitary { .. })));
        assert!(matches!(
            build_network(DMatrix::identity(2, 2), vec![ModeInput::vacuum(); 3]),
            Err(Error::DimensionMismatch { .. })
        ));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bs = DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, -s), c(0.0, -s), c(s, 0.0)]);
        assert!(build_network(bs, vec![ModeInput::coherent(c(2.0, 0.0)), ModeInput::squeezed(1.0, 0.0)]).is_ok());
    }

    #[test]
    fn vacuum_and_coherent_statistics() {
        let net = build_network(DMatrix::identity(2, 2), vec![ModeInput::vacuum(); 2]).unwrap();
        let t = compute_moment_tensors(&net).unwrap();
        assert!(max_abs(&t.h) < 1e-15);
        assert!(t.mean_photons.iter().all(|x| x.abs() < 1e-15));

        let net = build_network(DMatrix::identity(1, 1), vec![ModeInput::coherent(c(0.0, 2.0))]).unwrap();
        let t = compute_moment_tensors(&net).unwrap();
        assert!((t.mean_photons[0] - 4.0).abs() < 1e-14);
        assert!((t.h[(0, 0)] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn mixed_mode_rejected() {
        let m = ModeInput { displacement: c(1.0, 0.0), squeeze_magnitude: 0.5, squeeze_phase: 0.0 };
        let net = build_network(DMatrix::identity(1, 1), vec![m]).unwrap();
        assert_eq!(compute_moment_tensors(&net), Err(Error::MixedModeUnsupported { mode: 0 }));
    }

    /// Photon statistics of a squeezed vacuum summed directly in the Fock basis.
    fn fock_squeezed_vacuum(r: f64, phase: f64, cutoff: usize) -> (f64, f64, f64) {
        // amplitudes c_{2k+2} = -e^{iφ} tanh r sqrt((2k+1)/(2k+2)) c_{2k}
        let mut amp = C64::new(1.0 / r.cosh().sqrt(), 0.0);
        let step = -C64::from_polar(r.tanh(), phase);
        let (mut norm, mut m1, mut m2) = (0.0, 0.0, 0.0);
        let mut n = 0usize;
        while n <= cutoff {
            let p = amp.norm_sqr();
            norm += p;
            m1 += p * n as f64;
            m2 += p * (n * n) as f64;
            amp *= step * (((n + 1) as f64) / ((n + 2) as f64)).sqrt();
            n += 2;
        }
        (1.0 - norm, m1, m2 - m1 * m1)
    }

    #[test]
    fn squeezed_vacuum_matches_fock_sum() {
        let r: f64 = 1.0;
        let (tail, mean, var) = fock_squeezed_vacuum(r, 0.7, 200);
        assert!(tail.abs() < 1e-12);
        let net = build_network(DMatrix::identity(1, 1), vec![ModeInput::squeezed(r, 0.7)]).unwrap();
        let t = compute_moment_tensors(&net).unwrap();
        assert!((t.mean_photons[0] - mean).abs() < 1e-12);
        assert!((t.h[(0, 0)] - var).abs() < 1e-11);
        assert!((t.mean_photons[0] - 1.3810978455418157).abs() < 1e-12);
        let closed = 2.0 * r.sinh().powi(2) * r.cosh().powi(2);
        assert!((t.h[(0, 0)] - closed).abs() < 1e-12);
    }

    #[test]
    fn qfim_examples() {
        let cfg = EntangledConfig::new(CircuitVector::basis(1, 0), vec![4.0], 1.0).unwrap();
        let f = oracle_qfim(&cfg).unwrap();
        let expected = 4.0 * (2f64.sqrt() + 1.0).powi(2) + 1.0;
        assert!((f[(0, 0)] - expected).abs() / expected < 1e-9);

        let cfg = EntangledConfig::uniform(CircuitVector::uniform(2), 100.0, 1.0).unwrap();
        let f = oracle_qfim(&cfg).unwrap();
        let off = 100.0 * (2.0 + 2.0 * 2f64.sqrt()) * 0.5;
        assert!((f[(0, 1)] - off).abs() / off < 1e-9);

        let cfg = EntangledConfig::new(CircuitVector::new(vec![0.6, 0.8]).unwrap(), vec![0.0, 0.0], 3.0).unwrap();
        let f = oracle_qfim(&cfg).unwrap();
        assert!((f[(0, 0)] - 0.36 * 3.0).abs() < 1e-12);
        assert!((f[(1, 1)] - 0.64 * 3.0).abs() < 1e-12);
        assert!(f[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn moment_matrix_examples() {
        let cfg = EntangledConfig::new(CircuitVector::basis(1, 0), vec![100.0], 0.0).unwrap();
        let (gamma, g) = oracle_moment_matrix(&cfg, &[FRAC_PI_2]).unwrap();
        assert!((gamma[(0, 0)] - 25.0).abs() < 1e-11);
        assert!((g[0] + 50.0).abs() < 1e-11);
        assert!((gamma[(0, 0)] / (g[0] * g[0]) - 0.01).abs() < 1e-15);

        let cfg = EntangledConfig::uniform(CircuitVector::uniform(2), 100.0, 1.0).unwrap();
        let (gamma, _) = oracle_moment_matrix(&cfg, &[FRAC_PI_2; 2]).unwrap();
        let off = 100.0 * (3.0 - 2.0 * 2f64.sqrt() - 1.0) * 0.5;
        assert!((4.0 * gamma[(0, 1)] - off).abs() / off.abs() < 1e-10);

        let (_, g) = oracle_moment_matrix(&cfg, &[0.0, 0.0]).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn general_working_point_slope() {
        let cfg = EntangledConfig::new(CircuitVector::new(vec![0.6, -0.8]).unwrap(), vec![30.0, 50.0], 4.0).unwrap();
        let theta = [0.4, 2.1];
        let (_, g) = oracle_moment_matrix(&cfg, &theta).unwrap();
        for j in 0..2 {
            let u = cfg.circuit.entries()[j];
            let expected = 0.5 * theta[j].sin() * (u * u * 4.0 - cfg.coherent_intensities[j]);
            assert!((g[j] - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn perturbed_oracle_is_detected() {
        let ok = equivalence_check(5, 3, 11, &Oracle::exact()).unwrap();
        assert!(ok.passed);
        let bad = equivalence_check(5, 3, 11, &Oracle::perturbed(1e-6)).unwrap();
        assert!(!bad.passed);
    }
}
