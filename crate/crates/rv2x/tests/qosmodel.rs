//! SINR, delay, outage, hazard rate and satisfaction probabilities against
//! hand evaluation, quadrature and Monte Carlo oracles.

use approx::assert_relative_eq;
use rand::Rng;
use rv2x::channel::{ChannelState, ErrorDistribution, LargeScaleState};
use rv2x::config::ErrorLawPreset;
use rv2x::qos::{
    delay, delay_outage_closed_form, deviation_j, gaussian_satisfaction, hazard_rate,
    hazard_rate_noise_free, sinr_v2i, sinr_v2v, throughput, true_satisfaction_prob,
    true_satisfaction_prob_mc, AllocationDecision, LinkSnapshot, SatisfactionModel, SINR_CAP,
};
use rv2x::quad::integrate;
use rv2x::rng::{stream, Purpose};
use rv2x::scenario::qos_constants_for;
use rv2x::special::normal_pdf;

fn two_pair_state() -> (LargeScaleState, ChannelState) {
    let large = LargeScaleState {
        l_i: vec![2e-9, 3e-9],
        l_v: vec![4e-8, 5e-8],
        l_i_nm: vec![vec![1e-10, 2e-10], vec![3e-10, 4e-10]],
        l_v_mn: vec![vec![6e-11, 7e-11], vec![8e-11, 9e-11]],
        delta: vec![0.65, 0.65],
        epoch: 0,
    };
    let ch = ChannelState {
        slot: 0,
        g_i: vec![1.2, 0.4],
        g_v_mn: vec![vec![0.3, 1.7], vec![0.9, 0.2]],
        g_v_hat: vec![0.8, 1.1],
        g_v: vec![0.7, 1.3],
        e_m: vec![0.6, 1.5],
        g_i_nm_hat: vec![vec![0.5, 0.6], vec![0.7, 0.8]],
        g_i_nm: vec![vec![0.9, -0.2], vec![1.1, 0.3]],
        e_nm: vec![vec![0.4, -0.8], vec![0.4, -0.5]],
    };
    (large, ch)
}

#[test]
fn sinr_matches_scalar_evaluation() {
    let (large, ch) = two_pair_state();
    let noise = 1e-12;
    let (pv, pi) = (100.0, 50.0);
    let v = sinr_v2v(0, 1, &ch, &large, pv, pi, noise);
    let expected = pv * 4e-8 * 0.7 / (pi * 3e-10 * 1.1 + noise);
    assert_relative_eq!(v.value, expected, max_relative = 1e-12);
    // A negative true interference gain counts as no interference.
    let clamped = sinr_v2v(1, 0, &ch, &large, pv, pi, noise);
    assert_relative_eq!(clamped.value, pv * 5e-8 * 1.3 / noise, max_relative = 1e-12);
    let i = sinr_v2i(1, 0, &ch, &large, pv, pi, noise);
    assert_relative_eq!(
        i.value,
        pi * 3e-9 * 0.4 / (pv * 7e-11 * 1.7 + noise),
        max_relative = 1e-12
    );
    let capped = sinr_v2v(1, 0, &ch, &large, pv, pi, 0.0);
    assert!(capped.capped && capped.value == SINR_CAP);
}

#[test]
fn delay_and_throughput_reference_points() {
    assert_relative_eq!(delay(3200.0, 2e6, 3.0), 0.8e-3, max_relative = 1e-12);
    let q = qos_constants_for(3200.0, 2e6, 0.015);
    assert_relative_eq!(delay(3200.0, 2e6, q.gamma_v), 0.015, max_relative = 1e-12);
    assert_relative_eq!(throughput(2e6, 1023.0), 20e6, max_relative = 1e-12);
}

#[test]
fn outage_reference_and_limits() {
    let q = qos_constants_for(3200.0, 2e6, 0.015);
    // 1 / (1 + γ_V) with equal received powers and no noise.
    assert_relative_eq!(
        delay_outage_closed_form(1.0, 1.0, 1.0, 1.0, 0.0, q.gamma_v),
        0.92873,
        epsilon = 1e-5
    );
    assert_relative_eq!(
        delay_outage_closed_form(1.0, 1.0, 0.0, 1.0, 0.0, q.gamma_v),
        1.0
    );
    let noisy = delay_outage_closed_form(1.0, 1.0, 1.0, 1.0, 0.5, q.gamma_v);
    assert!(noisy < 0.92873);
}

#[test]
fn outage_matches_monte_carlo_at_a_generic_point() {
    let (p_v, l_v, p_i, l_i, noise, gamma) = (80.0, 3e-8, 120.0, 4e-9, 2e-7, 0.3);
    let exact = delay_outage_closed_form(p_v, l_v, p_i, l_i, noise, gamma);
    let mut rng = stream(17, 0, 0, Purpose::Oracle);
    let n = 1_000_000;
    let hits = (0..n)
        .filter(|_| {
            let gv: f64 = rng.sample(rand_distr::Exp1);
            let gi: f64 = rng.sample(rand_distr::Exp1);
            p_v * l_v * gv >= gamma * (p_i * l_i * gi + noise)
        })
        .count();
    let se = (exact * (1.0 - exact) / n as f64).sqrt();
    assert!((hits as f64 / n as f64 - exact).abs() < 3.0 * se);
}

#[test]
fn hazard_rate_reference_values() {
    let q = qos_constants_for(3200.0, 2e6, 0.015);
    // The linear approximation D_V·o/γ_V² at o = 1.
    assert_relative_eq!(hazard_rate_noise_free(1.0, q), 901.273, max_relative = 1e-5);
    assert!(hazard_rate_noise_free(2.0, q) > hazard_rate_noise_free(1.0, q));
    // The exact rate without noise and with equal received powers is
    // D_V / (γ_V (1 + γ_V)).
    assert_relative_eq!(
        hazard_rate(1.0, 1.0, 1.0, 1.0, 0.0, q),
        64.2325,
        max_relative = 1e-5
    );
}

#[test]
fn gaussian_satisfaction_matches_quadrature() {
    let (mean, var): (f64, f64) = (0.3, 0.02);
    for (c, offset) in [(0.5, -0.1), (2.0, 0.2), (8.0, -0.5), (0.05, 1.0)] {
        let s = var.sqrt();
        let integrand =
            |e: f64| normal_pdf((e - mean) / s) / s * (-c * (e + offset)).exp().min(1.0);
        let lo = mean - 12.0 * s;
        let hi = mean + 12.0 * s;
        // Split at the kink of min(1, ·) for an accurate rule.
        let kink = (-offset).clamp(lo, hi);
        let value = integrate(integrand, lo, kink, 1e-13, 8, 10_000).unwrap()
            + integrate(integrand, kink, hi, 1e-13, 8, 10_000).unwrap();
        assert_relative_eq!(
            gaussian_satisfaction(mean, var, c, offset),
            value,
            epsilon = 1e-10
        );
    }
}

fn snapshot() -> LinkSnapshot {
    LinkSnapshot {
        p_v: 10.0,
        p_i: 200.0,
        l_v: 2e-9,
        l_i_nm: 1e-9,
        delta: 0.65,
        g_v_hat: 0.9,
        g_i_nm_hat: 0.7,
        noise: 1e-11,
        gamma_v: 0.0767376,
    }
}

#[test]
fn true_satisfaction_matches_monte_carlo() {
    let law = ErrorDistribution::from_triples(&ErrorLawPreset::TypeOne.components()).unwrap();
    let link = snapshot();
    let exact = true_satisfaction_prob(&link, &law);
    assert!(exact > 0.05 && exact < 0.95, "{exact}");
    let n = 1_000_000;
    let mc =
        true_satisfaction_prob_mc(&link, &law, n, &mut stream(4, 0, 0, Purpose::Oracle)).unwrap();
    let se = (exact * (1.0 - exact) / n as f64).sqrt();
    assert!((mc - exact).abs() < 3.0 * se, "{mc} vs {exact}");
    assert!(
        true_satisfaction_prob_mc(&link, &law, 10, &mut stream(4, 0, 0, Purpose::Oracle)).is_err()
    );
}

#[test]
fn offset_form_matches_the_requirement() {
    let link = snapshot();
    // |e_m|² ≥ c (e + offset) is the requirement rearranged.
    for (e_m, e) in [(0.2, 0.1), (1.5, -0.3), (0.01, 0.9), (3.0, 2.0)] {
        let by_offset = e_m >= link.c() * (e + link.offset());
        assert_eq!(link.satisfied_by(e_m, e), by_offset);
    }
}

#[test]
fn deviation_vanishes_for_the_true_law() {
    let law = ErrorDistribution::from_triples(&ErrorLawPreset::TypeTwo.components()).unwrap();
    let links = vec![snapshot(); 3];
    assert_eq!(deviation_j(&links, &[&law, &law, &law], &law), 0.0);
    let shifted = ErrorDistribution::gaussian(1.5, 0.01);
    assert!(deviation_j(&links, &[&shifted, &law, &law], &law) > 0.0);
    assert!(shifted.satisfaction(1.0, 0.0) < law.satisfaction(1.0, 0.0));
}

#[test]
fn allocation_matrix_is_a_permutation() {
    let d = AllocationDecision {
        v2v_of: vec![2, 0, 1],
        p_v: vec![10.0; 3],
        p_i: vec![200.0; 3],
        slots: 0..10,
    };
    let a = d.matrix();
    for k in 0..3 {
        assert_eq!(a[k].iter().map(|&x| x as u32).sum::<u32>(), 1);
        assert_eq!(a.iter().map(|row| row[k] as u32).sum::<u32>(), 1);
    }
    assert_eq!(d.v2i_of(0), 1);
    assert!(d.is_valid((10.0, 200.0), (10.0, 200.0)));
    let bad = AllocationDecision {
        v2v_of: vec![0, 0, 1],
        ..d
    };
    assert!(!bad.is_valid((10.0, 200.0), (10.0, 200.0)));
}

#[test]
fn deviation_shrinks_with_more_absorption_samples() {
    use rv2x::absorption::{deconv_rate, DeconvEstimate};
    use rv2x::adaptation::{BetaMethod, EstimatedLaw};
    let law = ErrorDistribution::from_triples(&ErrorLawPreset::TypeOne.components()).unwrap();
    // Five fixed links at a fixed allocation, absorbed with the (200, 10) mW scheme.
    let mut rng = stream(60, 0, 0, Purpose::Oracle);
    let links: Vec<LinkSnapshot> = (0..5)
        .map(|_| LinkSnapshot {
            p_v: 20.0,
            p_i: 150.0,
            l_v: 1e-8,
            l_i_nm: 1e-8 * rng.random_range(0.5..2.0),
            delta: 0.65,
            g_v_hat: rng.sample(rand_distr::Exp1),
            g_i_nm_hat: rng.sample(rand_distr::Exp1),
            noise: 8e-12,
            gamma_v: 0.0767376,
        })
        .collect();
    let medians: Vec<f64> = [100, 1_000, 10_000]
        .iter()
        .map(|&t| {
            let mut j: Vec<f64> = (0..20)
                .map(|seed| {
                    let mut rng = stream(61, seed, 0, Purpose::Oracle);
                    let ests: Vec<EstimatedLaw> = links
                        .iter()
                        .map(|l| {
                            let rate = deconv_rate(200.0, l.l_i_nm, 10.0, l.l_v, l.delta);
                            let z = (0..t).map(|_| {
                                law.sample(&mut rng) + rng.sample::<f64, _>(rand_distr::Exp1) / rate
                            });
                            let est =
                                DeconvEstimate::new(z.collect(), rate, 10.0, 200.0, 10.0).unwrap();
                            EstimatedLaw::new(est, 10.0, 10.0, BetaMethod::Auto)
                        })
                        .collect();
                    let refs: Vec<&EstimatedLaw> = ests.iter().collect();
                    let j = deviation_j(&links, &refs, &law);
                    assert!(j >= 0.0);
                    j
                })
                .collect();
            j.sort_by(f64::total_cmp);
            0.5 * (j[9] + j[10])
        })
        .collect();
    assert!(
        medians[0] > medians[1] && medians[1] > medians[2],
        "{medians:?}"
    );
}
