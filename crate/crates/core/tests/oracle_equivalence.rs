use std::time::Instant;

use mzinet::gaussian_oracle::{
    equivalence_check, oracle_inverse_moment_matrix, oracle_qfim, random_sensor_network, Oracle, SensorNetwork,
};
use mzinet::linalg::C64;
use mzinet::network_model::{inverse_moment_matrix, qfim, CircuitVector, EntangledConfig};
use mzinet::rng::stream_rng;
use mzinet::spectra::sample_haar_circuit;
use nalgebra::DMatrix;
use rand::Rng;

/// `e^{iχ_j} U_{Dj}` with `χ_j = φ_j − ϕ/2`.
fn rotated_row(net: &SensorNetwork) -> Vec<C64> {
    let half = C64::from_polar(1.0, -0.5 * net.squeeze_phase);
    (0..net.d())
        .map(|j| {
            let phase = net.amplitudes[j] / net.amplitudes[j].norm();
            phase * half * net.unitary[(net.port - 1, j)]
        })
        .collect()
}

fn general_qfim(net: &SensorNetwork) -> DMatrix<f64> {
    let w = rotated_row(net);
    let s2 = net.squeezed_photons;
    let e2r = (1.0 + 2.0 * s2 + 2.0 * (s2 * (s2 + 1.0)).sqrt()).max(1.0);
    let d = net.d();
    DMatrix::from_fn(d, d, |i, j| {
        let (ai, aj) = (net.amplitudes[i].norm(), net.amplitudes[j].norm());
        let mut f = ai * aj * (w[i].re * w[j].re * (e2r - 1.0) + w[i].im * w[j].im * (1.0 / e2r - 1.0));
        if i == j {
            f += ai * ai + w[i].norm_sqr() * s2;
        }
        f
    })
}

fn general_inverse_moment(net: &SensorNetwork) -> DMatrix<f64> {
    let w = rotated_row(net);
    let s2 = net.squeezed_photons;
    let e2r = (1.0 + 2.0 * s2 + 2.0 * (s2 * (s2 + 1.0)).sqrt()).max(1.0);
    let d = net.d();
    let gap: Vec<f64> = (0..d).map(|j| net.amplitudes[j].norm_sqr() - w[j].norm_sqr() * s2).collect();
    DMatrix::from_fn(d, d, |i, j| {
        let (ai, aj) = (net.amplitudes[i].norm(), net.amplitudes[j].norm());
        let mut m =
            ai * aj / (gap[i] * gap[j]) * (w[i].im * w[j].im * (e2r - 1.0) + w[i].re * w[j].re * (1.0 / e2r - 1.0));
        if i == j {
            m += (ai * ai + w[i].norm_sqr() * s2) / (gap[i] * gap[i]);
        }
        m
    })
}

fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    (a - b).iter().fold(0.0f64, |m, x| m.max(x.abs())) / scale
}

#[test]
fn randomized_suite_passes_within_budget() {
    let start = Instant::now();
    let report = equivalence_check(240, 4, 11, &Oracle::exact()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(report.passed, "{report:?}");
    assert_eq!(report.checks, 480);
    assert!(report.max_deviation_qfim < 1e-9 && report.max_deviation_inverse_moment < 1e-9);
    assert!(elapsed < 30.0, "{elapsed} s");
}

#[test]
fn three_routes_agree_on_matched_networks() {
    for t in 0..200u64 {
        let mut rng = stream_rng(2024, t);
        let d = 1 + (t as usize % 4);
        let (net, config) = random_sensor_network(d, &mut rng);
        let oracle = Oracle::exact();

        let f_closed = qfim(&config).unwrap();
        let f_general = general_qfim(&net);
        let f_oracle = oracle.qfim(&net).unwrap();
        assert!(rel(&f_closed, &f_general) < 1e-12, "trial {t}");
        assert!(rel(&f_oracle, &f_closed) < 1e-9, "trial {t}");

        let m_closed = inverse_moment_matrix(&config).unwrap();
        let m_general = general_inverse_moment(&net);
        let m_oracle = oracle.inverse_moment_matrix(&net).unwrap();
        assert!(rel(&m_closed, &m_general) < 1e-10, "trial {t}");
        assert!(rel(&m_oracle, &m_closed) < 1e-9, "trial {t}");
    }
}

#[test]
fn general_forms_match_oracle_without_phase_matching() {
    let mut checked = 0;
    let mut t = 0u64;
    while checked < 200 {
        let mut rng = stream_rng(77, t);
        t += 1;
        let d = rng.random_range(1..=4usize);
        let unitary = sample_haar_circuit(d, &mut rng);
        let port = rng.random_range(1..=d);
        let amplitudes: Vec<C64> = (0..d)
            .map(|_| {
                C64::from_polar(rng.random_range(0.1f64..=1e3).sqrt(), rng.random_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        let n_s = rng.random_range(0.0..=1e2);
        let squeeze_phase = rng.random_range(0.0..std::f64::consts::TAU);
        let net = SensorNetwork { unitary, port, amplitudes, squeezed_photons: n_s, squeeze_phase };
        let gaps_ok = (0..d).all(|j| {
            let a2 = net.amplitudes[j].norm_sqr();
            let s = net.unitary[(port - 1, j)].norm_sqr() * n_s;
            (a2 - s).abs() > 1e-3 * a2.max(s)
        });
        if !gaps_ok {
            continue;
        }
        let oracle = Oracle::exact();
        assert!(rel(&oracle.qfim(&net).unwrap(), &general_qfim(&net)) < 1e-9, "trial {t}");
        assert!(rel(&oracle.inverse_moment_matrix(&net).unwrap(), &general_inverse_moment(&net)) < 1e-9, "trial {t}");
        checked += 1;
    }
}

#[test]
fn perturbed_oracle_is_detected() {
    let report = equivalence_check(20, 4, 3, &Oracle::perturbed(1e-6)).unwrap();
    assert!(!report.passed);
    assert!(report.max_deviation_inverse_moment > 1e-9 || report.max_deviation_qfim > 1e-9);
    let empty = equivalence_check(0, 4, 3, &Oracle::exact()).unwrap();
    assert!(empty.passed && empty.checks == 0);
}

#[test]
fn worked_configuration_through_the_oracle() {
    let c = EntangledConfig::uniform(CircuitVector::uniform(2), 100.0, 1.0).unwrap();
    let f = oracle_qfim(&c).unwrap();
    assert!((f[(0, 1)] - 241.421_356_237_309_5).abs() < 1e-7);
    let m = oracle_inverse_moment_matrix(&c).unwrap();
    assert!((m[(0, 0)] - 0.00596739).abs() < 5e-9);
    assert!((m[(0, 1)] + 0.00418387).abs() < 5e-9);
    let emom = 0.25 * (m[(0, 0)] + 2.0 * m[(0, 1)] + m[(1, 1)]);
    assert!((emom - 8.9176e-4).abs() < 5e-9);
}
