//! SINR, throughput, delay, delay-outage probability and hazard rate, plus the
//! probability that a V2V link meets its delay requirement under a given
//! interference-error model.

use crate::channel::{ChannelState, ErrorDistribution, LargeScaleState};
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::scenario::QosConstants;
use crate::special::{exp_mul_normal_sf, normal_cdf};
use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;
use std::ops::Range;

/// SINR reported when the denominator vanishes.
pub const SINR_CAP: f64 = 1e30;

/// Matching and transmit powers in force over a range of slots.
///
/// `v2v_of[n]` is the V2V link sharing the resource block of V2I link `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AllocationDecision {
    pub v2v_of: Vec<usize>,
    pub p_v: Vec<f64>,
    pub p_i: Vec<f64>,
    pub slots: Range<usize>,
}

impl AllocationDecision {
    /// V2I link paired with V2V link `m`.
    pub fn v2i_of(&self, m: usize) -> usize {
        self.v2v_of
            .iter()
            .position(|&x| x == m)
            .expect("matching is a permutation")
    }

    /// Matching as a 0/1 matrix indexed `[n][m]`.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        let p = self.v2v_of.len();
        (0..p)
            .map(|n| (0..p).map(|m| u8::from(self.v2v_of[n] == m)).collect())
            .collect()
    }

    /// Every row and column of the matching matrix sums to one and all
    /// powers lie in the box.
    pub fn is_valid(&self, pv: (f64, f64), pi: (f64, f64)) -> bool {
        let p = self.v2v_of.len();
        let mut seen = vec![false; p];
        for &m in &self.v2v_of {
            if m >= p || seen[m] {
                return false;
            }
            seen[m] = true;
        }
        let tol = 1e-9;
        self.p_v
            .iter()
            .all(|&x| x >= pv.0 * (1.0 - tol) && x <= pv.1 * (1.0 + tol))
            && self
                .p_i
                .iter()
                .all(|&x| x >= pi.0 * (1.0 - tol) && x <= pi.1 * (1.0 + tol))
    }
}

/// Phase of the protocol a slot belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Absorption,
    Adaptation,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Absorption => "absorption",
            Self::Adaptation => "adaptation",
        }
    }
}

/// Realized QoS of one V2V pair and its V2I partner in one slot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QosSample {
    pub slot: usize,
    pub phase: Phase,
    /// V2V pair index.
    pub pair: usize,
    pub p_v: f64,
    pub p_i: f64,
    pub delay_s: f64,
    /// Throughput of the V2I link sharing the pair's resource block.
    pub throughput_bps: f64,
    pub satisfied: bool,
    /// The allocator found no feasible power and used its fallback.
    pub infeasible: bool,
}

/// SINR and whether it hit the cap because the denominator vanished.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sinr {
    pub value: f64,
    pub capped: bool,
}

fn ratio(signal: f64, denominator: f64) -> Sinr {
    if denominator <= 0.0 {
        Sinr {
            value: if signal > 0.0 { SINR_CAP } else { 0.0 },
            capped: signal > 0.0,
        }
    } else {
        Sinr {
            value: (signal / denominator).min(SINR_CAP),
            capped: false,
        }
    }
}

/// SINR of V2V link `m` sharing the RB of V2I link `n`. A negative true
/// interference gain is clamped at zero.
pub fn sinr_v2v(
    m: usize,
    n: usize,
    ch: &ChannelState,
    large: &LargeScaleState,
    p_v: f64,
    p_i: f64,
    noise: f64,
) -> Sinr {
    let signal = p_v * large.l_v[m] * ch.g_v[m];
    let interference = p_i * large.l_i_nm[n][m] * ch.g_i_nm[n][m].max(0.0);
    ratio(signal, interference + noise)
}

/// SINR of V2I link `n` at the RSU with V2V link `m` on its RB.
pub fn sinr_v2i(
    n: usize,
    m: usize,
    ch: &ChannelState,
    large: &LargeScaleState,
    p_v: f64,
    p_i: f64,
    noise: f64,
) -> Sinr {
    let signal = p_i * large.l_i[n] * ch.g_i[n];
    let interference = p_v * large.l_v_mn[m][n] * ch.g_v_mn[m][n];
    ratio(signal, interference + noise)
}

/// Shannon throughput in bit/s.
pub fn throughput(bandwidth_hz: f64, sinr: f64) -> f64 {
    bandwidth_hz * sinr.ln_1p() / std::f64::consts::LN_2
}

/// Transmission delay of one packet in seconds, `+∞` at zero SINR.
pub fn delay(packet_bits: f64, bandwidth_hz: f64, sinr: f64) -> f64 {
    let rate = throughput(bandwidth_hz, sinr);
    if rate > 0.0 {
        packet_bits / rate
    } else {
        f64::INFINITY
    }
}

/// `P{SINR_V ≥ γ}` for Rayleigh direct and interference fading and no CSI error.
pub fn delay_outage_closed_form(
    p_v: f64,
    l_v: f64,
    p_i: f64,
    l_i: f64,
    noise: f64,
    gamma: f64,
) -> f64 {
    let sv = p_v * l_v;
    (-noise * gamma / sv).exp() / (1.0 + p_i * l_i / sv * gamma)
}

/// Hazard rate of the V2V delay at the requirement.
///
/// This is `A'(τ0) / (1 - A(τ0))` with `A(τ) = P{delay ≤ τ}` from
/// [`delay_outage_closed_form`], written with `ρ = p_I L_I / (p_V L_V)` and
/// `s = σ² / (p_V L_V)`.
pub fn hazard_rate(p_v: f64, l_v: f64, p_i: f64, l_i: f64, noise: f64, q: QosConstants) -> f64 {
    let sv = p_v * l_v;
    let rho = p_i * l_i / sv;
    let s = noise / sv;
    let g = q.gamma_v;
    let e = (-s * g).exp();
    let a = 1.0 + rho * g;
    q.d_v * e * (rho + s * a) / (a * (a - e))
}

/// Noise-free hazard-rate approximation `D_V o / γ_V²` with `o = p_V L_V / (p_I L_I)`,
/// the form behind the linear hazard-rate constraint of the absorption powers.
pub fn hazard_rate_noise_free(o: f64, q: QosConstants) -> f64 {
    q.d_v * o / (q.gamma_v * q.gamma_v)
}

/// One V2V link's deployment in one slot: the quantities the delay
/// requirement `|e_m|² ≥ c (e_nm + b / (p_I L_I))` depends on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinkSnapshot {
    pub p_v: f64,
    pub p_i: f64,
    pub l_v: f64,
    pub l_i_nm: f64,
    pub delta: f64,
    pub g_v_hat: f64,
    pub g_i_nm_hat: f64,
    pub noise: f64,
    pub gamma_v: f64,
}

impl LinkSnapshot {
    /// `b = σ² + p_I L_I |ĝ_I|² - p_V L_V δ² |ĝ_V|² / γ_V`.
    pub fn b(&self) -> f64 {
        self.noise + self.p_i * self.l_i_nm * self.g_i_nm_hat
            - self.p_v * self.l_v * self.delta * self.delta * self.g_v_hat / self.gamma_v
    }

    /// `c = γ_V p_I L_I / (p_V L_V (1 - δ²))`.
    pub fn c(&self) -> f64 {
        self.gamma_v * self.p_i * self.l_i_nm
            / (self.p_v * self.l_v * (1.0 - self.delta * self.delta))
    }

    /// Offset `b / (p_I L_I)` of the interference error in the requirement.
    pub fn offset(&self) -> f64 {
        self.b() / (self.p_i * self.l_i_nm)
    }

    /// Whether the requirement holds for given error realizations, with the
    /// additive interference model left unclamped.
    pub fn satisfied_by(&self, e_m_sq: f64, e_nm: f64) -> bool {
        let d2 = self.delta * self.delta;
        let gv = d2 * self.g_v_hat + (1.0 - d2) * e_m_sq;
        let gi = self.g_i_nm_hat + e_nm;
        self.p_v * self.l_v * gv >= self.gamma_v * (self.p_i * self.l_i_nm * gi + self.noise)
    }
}

/// A law of the interference error able to report the probability that
/// `|e_m|² ≥ c (e + offset)` with `|e_m|² ~ Exp(1)`.
pub trait SatisfactionModel {
    fn satisfaction(&self, c: f64, offset: f64) -> f64;
}

/// `E[min(1, exp(-c (e + offset)))]` for `e ~ N(mean, var)`.
pub fn gaussian_satisfaction(mean: f64, var: f64, c: f64, offset: f64) -> f64 {
    let shift = mean + offset;
    if var <= 0.0 {
        return if shift <= 0.0 {
            1.0
        } else {
            (-c * shift).exp()
        };
    }
    let s = var.sqrt();
    let below = normal_cdf(-shift / s);
    let above = exp_mul_normal_sf(-c * shift + 0.5 * c * c * var, (-shift + c * var) / s);
    (below + above).clamp(0.0, 1.0)
}

impl SatisfactionModel for ErrorDistribution {
    fn satisfaction(&self, c: f64, offset: f64) -> f64 {
        self.components
            .iter()
            .map(|k| k.weight * gaussian_satisfaction(k.mean, k.variance, c, offset))
            .sum()
    }
}

/// Probability that the delay requirement holds under the true law, exact.
pub fn true_satisfaction_prob(link: &LinkSnapshot, law: &ErrorDistribution) -> f64 {
    law.satisfaction(link.c(), link.offset())
}

/// Monte Carlo estimate of the same probability from joint draws of
/// `|e_m|² ~ Exp(1)` and `e_nm ~ law`.
pub fn true_satisfaction_prob_mc(
    link: &LinkSnapshot,
    law: &ErrorDistribution,
    n_draws: usize,
    rng: &mut RandomStream,
) -> Result<f64> {
    if n_draws < 1000 {
        return Err(Error::InvalidArgument(format!(
            "need at least 1000 draws, got {n_draws}"
        )));
    }
    let hits = (0..n_draws)
        .filter(|_| {
            let e_m: f64 = rng.sample(Exp1);
            let e = law.sample(rng);
            link.satisfied_by(e_m, e)
        })
        .count();
    Ok(hits as f64 / n_draws as f64)
}

/// Sum over links of the squared gap between the estimated-law and true-law
/// satisfaction probabilities.
pub fn deviation_j<M: SatisfactionModel>(
    links: &[LinkSnapshot],
    estimates: &[&M],
    law: &ErrorDistribution,
) -> f64 {
    links
        .iter()
        .zip(estimates)
        .map(|(l, est)| {
            let (c, off) = (l.c(), l.offset());
            (est.satisfaction(c, off) - law.satisfaction(c, off)).powi(2)
        })
        .sum()
}
