//! Geometry, path loss, Doppler aging and fading draws against independent
//! oracles.

use approx::assert_relative_eq;
use rv2x::channel::{
    build_large_scale, doppler_coefficient, evolve_small_scale, pathloss_v2i_db,
    pathloss_winner_b1_db, rayleigh_power, ChannelStreams, ErrorDistribution,
};
use rv2x::config::{ErrorLawPreset, SimConfig};
use rv2x::rng::{stream, Purpose};
use rv2x::scenario::{
    build_topology, noise_power_mw, qos_constants_for, V2V_MAX_DISTANCE_M, V2V_MIN_DISTANCE_M,
};

#[test]
fn topology_has_the_configured_shape() {
    let cfg = SimConfig::default();
    let topo = build_topology(&cfg, &mut stream(1, 0, 0, Purpose::Topology));
    assert_eq!(topo.v2v_tx.len(), 10);
    assert_eq!(topo.v2v_rx.len(), 10);
    assert_eq!(topo.v2i_tx.len(), 10);
    assert_eq!((topo.rsu.x, topo.rsu.y), (200.0, 200.0));
    for p in topo.v2v_tx.iter().chain(&topo.v2v_rx).chain(&topo.v2i_tx) {
        assert!(
            (0.0..=400.0).contains(&p.x) && (0.0..=400.0).contains(&p.y),
            "{p:?}"
        );
    }
}

#[test]
fn v2v_distances_stay_in_range_over_many_draws() {
    let cfg = SimConfig::default();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for trial in 0..1000 {
        let topo = build_topology(&cfg, &mut stream(9, trial, 0, Purpose::Topology));
        for m in 0..cfg.num_pairs {
            let d = topo.v2v_distance(m);
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    assert!(lo >= V2V_MIN_DISTANCE_M - 1e-9, "{lo}");
    assert!(hi <= V2V_MAX_DISTANCE_M + 1e-9, "{hi}");
    // Ten thousand draws of a uniform law come close to both ends.
    assert!(lo < 60.5 && hi > 79.5, "{lo} {hi}");
}

#[test]
fn noise_and_delay_constants() {
    let dbm = |mw: f64| 10.0 * mw.log10();
    assert_relative_eq!(dbm(noise_power_mw(-174.0, 2e6)), -110.9897, epsilon = 1e-3);
    assert_relative_eq!(noise_power_mw(-174.0, 2e6), 7.962e-12, max_relative = 1e-3);
    assert_relative_eq!(dbm(noise_power_mw(-174.0, 10e6)), -104.0, epsilon = 1e-9);
    let q = qos_constants_for(3200.0, 2e6, 0.015);
    assert_relative_eq!(q.gamma_v, 0.0767376, max_relative = 1e-6);
    assert_relative_eq!(q.d_v, 5.30729, max_relative = 1e-5);
}

#[test]
fn v2i_pathloss_reference_points() {
    assert_relative_eq!(pathloss_v2i_db(0.1).unwrap(), 90.5, epsilon = 1e-9);
    assert_relative_eq!(pathloss_v2i_db(0.5).unwrap(), 116.7813, epsilon = 1e-4);
    assert!(pathloss_v2i_db(0.0).is_err());
}

/// WINNER+ B1 street-canyon model written out from its coefficient table,
/// with both antennas at 1.5 m and effective heights 0.5 m.
fn winner_b1_reference(d: f64, los: bool, fc: f64) -> f64 {
    let f = fc / 5e9;
    let d_bp = 4.0 * 0.5 * 0.5 * fc / 299_792_458.0;
    match (los, d <= d_bp) {
        (true, true) => 22.7 * d.log10() + 41.0 + 20.0 * f.log10(),
        (true, false) => 40.0 * d.log10() + 9.45 - 2.0 * 17.3 * 0.5f64.log10() + 2.7 * f.log10(),
        (false, _) => {
            (44.9 - 6.55 * 1.5f64.log10()) * d.log10()
                + 34.46
                + 5.83 * 1.5f64.log10()
                + 23.0 * f.log10()
        }
    }
}

#[test]
fn winner_b1_matches_independent_evaluation() {
    let fc = 5.9e9;
    // Hand evaluation past the 19.7 m breakpoint:
    // 40·log10(70) + 9.45 + 34.6·log10(2) + 2.7·log10(1.18).
    assert_relative_eq!(
        pathloss_winner_b1_db(70.0, true, fc),
        93.8636,
        epsilon = 1e-3
    );
    for d in [5.0, 15.0, 19.0, 25.0, 70.0, 150.0, 400.0] {
        for los in [true, false] {
            assert_relative_eq!(
                pathloss_winner_b1_db(d, los, fc),
                winner_b1_reference(d, los, fc),
                epsilon = 1e-9
            );
        }
    }
    for d in [20.0, 50.0, 100.0, 200.0] {
        assert!(pathloss_winner_b1_db(d, false, fc) > pathloss_winner_b1_db(d, true, fc));
    }
}

#[test]
fn doppler_coefficient_reference_points() {
    assert_relative_eq!(
        doppler_coefficient(10.0, 5.9e9, 1e-3),
        0.65275,
        epsilon = 1e-4
    );
    // First zero of J0 at 2.404826: choose Δt so that 2π f_D Δt hits it.
    let fd = 10.0 * 5.9e9 / 299_792_458.0;
    let dt = 2.404_825_557_695_773 / (2.0 * std::f64::consts::PI * fd);
    assert!(doppler_coefficient(10.0, 5.9e9, dt).abs() < 1e-9);
}

#[test]
fn rayleigh_power_has_unit_mean() {
    let mut rng = stream(5, 0, 0, Purpose::Oracle);
    let n = 1_000_000;
    let draws: Vec<f64> = (0..n).map(|_| rayleigh_power(&mut rng)).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    // Exp(1) has unit variance, so the standard error is 1/√n.
    assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt(), "{mean}");
}

#[test]
fn aged_gain_without_correlation_is_a_fresh_draw() {
    // δ = 0 puts the J0 argument at its first zero.
    let base = SimConfig::default();
    let speed = 2.404_825_557_695_773 * 299_792_458.0
        / (2.0 * std::f64::consts::PI * base.carrier_freq_hz * base.feedback_delay_s);
    let cfg0 = SimConfig {
        speed_mps: speed,
        ..base
    };
    let topo = build_topology(&cfg0, &mut stream(2, 0, 0, Purpose::Topology));
    let large = build_large_scale(&cfg0, &topo, 0);
    assert!(large.delta[0].abs() < 1e-9);
    let law = ErrorDistribution::zero();
    let mut streams = ChannelStreams::new(2, 0, cfg0.num_pairs);
    let slots = 100_000;
    let mut sum = 0.0;
    for t in 0..slots {
        let ch = evolve_small_scale(t, &large, &law, &mut streams);
        assert_relative_eq!(ch.g_v[0], ch.e_m[0], max_relative = 1e-6);
        sum += ch.g_v[0];
    }
    let mean = sum / slots as f64;
    assert!((mean - 1.0).abs() < 3.0 / (slots as f64).sqrt(), "{mean}");
}

#[test]
fn mixture_moments_and_sampling() {
    let law = ErrorDistribution::from_triples(&ErrorLawPreset::TypeOne.components()).unwrap();
    assert_relative_eq!(law.mean(), 0.5, epsilon = 1e-12);
    // 0.5·(0.04 + 0.04) + 0.5·(0.02 + 0.64) - 0.25
    assert_relative_eq!(law.variance(), 0.12, epsilon = 1e-12);
    let mut rng = stream(3, 0, 0, Purpose::Oracle);
    let n = 200_000;
    let s: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
    let m = s.iter().sum::<f64>() / n as f64;
    let v = s.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!((m - 0.5).abs() < 3.0 * (0.12 / n as f64).sqrt(), "{m}");
    assert!((v - 0.12).abs() < 0.005, "{v}");
    let below = s.iter().filter(|&&x| x <= 0.3).count() as f64 / n as f64;
    assert!((below - law.cdf(0.3)).abs() < 0.005);
    assert!(ErrorDistribution::from_triples(&[[0.0, 0.1, 0.7]]).is_err());
    assert!(ErrorDistribution::from_triples(&[[0.0, -0.1, 1.0]]).is_err());
}

#[test]
fn characteristic_function_inverts_to_the_density() {
    let law = ErrorDistribution::from_triples(&ErrorLawPreset::TypeTwo.components()).unwrap();
    for e in [0.1, 0.45, 0.8] {
        let value = rv2x::quad::integrate(
            |w: f64| (law.characteristic(w) * num_complex::Complex64::from_polar(1.0, -w * e)).re,
            0.0,
            200.0,
            1e-12,
            32,
            100_000,
        )
        .unwrap()
            / std::f64::consts::PI;
        assert_relative_eq!(value, law.pdf(e), epsilon = 1e-8);
    }
}
