//! Absorption phase: fixed powers and matching chosen for estimation
//! accuracy under a hazard-rate budget, sample collection, and the
//! deconvolution estimate of the interference-error density.

use crate::channel::{evolve_small_scale, ChannelStreams, ErrorDistribution, LargeScaleState};
use crate::config::{PowerBox, SimConfig};
use crate::error::{Error, Result};
use crate::hungarian::hungarian_match;
use crate::qos::{delay, sinr_v2i, sinr_v2v, throughput, Phase, QosSample};
use crate::rng::RandomStream;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Deconvolution sample of one slot.
///
/// `true_rss` and `nominal_rss` are the measured and CSI-predicted received
/// powers at the V2V receiver. The result equals `e_nm + |e_m|² / λ_Y`.
#[allow(clippy::too_many_arguments)]
pub fn collect_sample(
    true_rss: f64,
    nominal_rss: f64,
    p_i: f64,
    l_i_nm: f64,
    p_v: f64,
    l_v: f64,
    delta: f64,
    g_v_hat: f64,
) -> f64 {
    let si = p_i * l_i_nm;
    (true_rss - nominal_rss) / si + (p_v * l_v / si) * (1.0 - delta * delta) * g_v_hat
}

/// Rate `λ_Y = p_I L_I / (p_V L_V (1 - δ²))` of the exponential part of a sample.
pub fn deconv_rate(p_i: f64, l_i_nm: f64, p_v: f64, l_v: f64, delta: f64) -> f64 {
    p_i * l_i_nm / (p_v * l_v * (1.0 - delta * delta))
}

/// Samples of `Z = E + Y` with `Y ~ Exp(λ_Y)` and the estimator of the density of `E`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeconvEstimate {
    pub samples: Vec<f64>,
    pub rate: f64,
    pub k: f64,
    pub p_i: f64,
    pub p_v: f64,
}

impl DeconvEstimate {
    pub fn new(samples: Vec<f64>, rate: f64, k: f64, p_i: f64, p_v: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("empty sample set".into()));
        }
        if !(rate > 0.0 && k > 0.0) {
            return Err(Error::InvalidArgument(
                "rate and truncation must be positive".into(),
            ));
        }
        Ok(Self {
            samples,
            rate,
            k,
            p_i,
            p_v,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Truncated inversion kernel
    /// `(1/2π) ∫_{-W}^{W} e^{-jwa} (1 + jw/λ) dw`, `W = Kπ`.
    pub fn kernel(&self, a: f64) -> f64 {
        deconv_kernel(a, self.k * PI, self.rate)
    }

    /// Raw density estimate at `e`; may be negative.
    pub fn pdf(&self, e: f64) -> f64 {
        let w = self.k * PI;
        self.samples
            .iter()
            .map(|z| deconv_kernel(z - e, w, self.rate))
            .sum::<f64>()
            / self.len() as f64
    }

    /// Range holding the bulk of the estimate: the sample range widened by
    /// a few kernel widths.
    pub fn window(&self) -> (f64, f64) {
        let lo = self.samples.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self
            .samples
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let pad = 1.0 + 10.0 / (self.k * PI);
        (lo - pad, hi + pad)
    }

    /// Nonnegative, renormalized version of the estimate tabulated on a grid.
    pub fn clipped(&self, points: usize) -> ClippedDensity {
        let (lo, hi) = self.window();
        let h = (hi - lo) / (points - 1) as f64;
        let grid: Vec<f64> = (0..points).map(|i| lo + i as f64 * h).collect();
        let dens: Vec<f64> = grid.iter().map(|&e| self.pdf(e).max(0.0)).collect();
        ClippedDensity::from_table(grid, dens)
    }

    /// Plain-text record: one header line with rate, truncation and powers,
    /// then one sample per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:e} {:e} {:e} {:e}\n",
            self.rate, self.k, self.p_i, self.p_v
        );
        for z in &self.samples {
            out.push_str(&format!("{z:e}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |what: &str| Error::InvalidArgument(format!("malformed estimate record: {what}"));
        let mut lines = text.lines();
        let head: Vec<f64> = lines
            .next()
            .ok_or_else(|| bad("missing header"))?
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| bad("header")))
            .collect::<Result<_>>()?;
        if head.len() != 4 {
            return Err(bad("header needs four fields"));
        }
        let samples = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.trim().parse::<f64>().map_err(|_| bad("sample")))
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples, head[0], head[1], head[2], head[3])
    }
}

/// `(1/2π)[2 sin(Wa)/a - (2/λ)(Wa cos(Wa) - sin(Wa))/a²]`, with the series
/// near `a = 0` where the closed form cancels.
pub fn deconv_kernel(a: f64, w: f64, rate: f64) -> f64 {
    let x = w * a;
    if x.abs() < 1e-3 {
        let w3 = w * w * w;
        return (2.0 * w - w3 * a * a / 3.0 + 2.0 * w3 * a / (3.0 * rate)) / (2.0 * PI);
    }
    let (s, c) = x.sin_cos();
    (2.0 * s / a - 2.0 / rate * (x * c - s) / (a * a)) / (2.0 * PI)
}

/// Tabulated nonnegative density with inverse-CDF sampling.
#[derive(Clone, Debug)]
pub struct ClippedDensity {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    cdf: Vec<f64>,
}

impl ClippedDensity {
    pub fn from_table(grid: Vec<f64>, raw: Vec<f64>) -> Self {
        let mut cdf = vec![0.0; grid.len()];
        for i in 1..grid.len() {
            cdf[i] = cdf[i - 1] + 0.5 * (raw[i] + raw[i - 1]) * (grid[i] - grid[i - 1]);
        }
        let total = cdf[cdf.len() - 1].max(f64::MIN_POSITIVE);
        let density = raw.iter().map(|d| d / total).collect();
        cdf.iter_mut().for_each(|c| *c /= total);
        Self { grid, density, cdf }
    }

    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        let u: f64 = rng.random();
        let i = self
            .cdf
            .partition_point(|&c| c < u)
            .clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.grid[i - 1] + t * (self.grid[i] - self.grid[i - 1])
    }
}

/// Edge-weight objective `[√(1+x²) + ln(x + √(1+x²))/x]²` with `x = βo`.
pub fn capability_objective(x: f64) -> f64 {
    let r = (1.0 + x * x).sqrt();
    let tail = if x < 1e-8 { 1.0 } else { x.asinh() / x };
    (r + tail).powi(2)
}

/// Variance term of the mean-squared-error bound of the density estimate:
/// `(K²/4T)·objective(Kπ(1-δ²)·o)`.
pub fn adaptation_capability_bound(delta: f64, o: f64, k: f64, t: usize) -> f64 {
    let beta = k * PI * (1.0 - delta * delta);
    k * k / (4.0 * t as f64) * capability_objective(beta * o)
}

/// Absorption powers `(p_I, p_V)` with the smallest power-gain ratio `p_V/p_I`
/// allowed by the hazard-rate budget `p_V/p_I ≥ λ·pV_max/pI_min`, taking the
/// highest powers among ties. `None` when no point of the box meets the budget.
pub fn absorption_power(lambda: f64, b: &PowerBox) -> Option<(f64, f64)> {
    if !(0.0..=1.0).contains(&lambda)
        || lambda * b.pv_max / b.pi_min > b.pv_max / b.pi_min * (1.0 + 1e-12)
    {
        return None;
    }
    if lambda <= b.pv_min * b.pi_min / (b.pv_max * b.pi_max) {
        Some((b.pi_max, b.pv_min))
    } else if lambda <= b.pi_min / b.pi_max {
        Some((b.pi_max, lambda * b.pv_max * b.pi_max / b.pi_min))
    } else {
        Some((b.pi_min / lambda, b.pv_max))
    }
}

/// Edge weight of pairing V2I link `n` with V2V link `m`; `+∞` if infeasible.
pub fn edge_weight(
    n: usize,
    m: usize,
    large: &LargeScaleState,
    lambda: f64,
    b: &PowerBox,
    k: f64,
) -> f64 {
    match absorption_power(lambda, b) {
        None => f64::INFINITY,
        Some((p_i, p_v)) => {
            let o = p_v * large.l_v[m] / (p_i * large.l_i_nm[n][m]);
            let d2 = large.delta[m] * large.delta[m];
            capability_objective(k * PI * (1.0 - d2) * o)
        }
    }
}

/// Matching and powers held fixed through the absorption phase.
#[derive(Clone, Debug, Serialize)]
pub struct AbsorptionPlan {
    /// `v2v_of[n]`: V2V link on the RB of V2I link `n`.
    pub v2v_of: Vec<usize>,
    /// `v2i_of[m]`: inverse of `v2v_of`.
    pub v2i_of: Vec<usize>,
    /// Absorption power of each V2I link.
    pub p_i: Vec<f64>,
    /// Absorption power of each V2V link.
    pub p_v: Vec<f64>,
    /// Edge weight of each matched V2V link.
    pub phi: Vec<f64>,
    /// Variance term of the density-estimate error bound per V2V link.
    pub bound: Vec<f64>,
}

/// Powers from the hazard-rate budget, edge weights, and the minimum-weight matching.
pub fn plan_absorption(cfg: &SimConfig, large: &LargeScaleState) -> Result<AbsorptionPlan> {
    let p = cfg.num_pairs;
    let b = cfg.power_box();
    let weights: Vec<Vec<f64>> = (0..p)
        .map(|n| {
            (0..p)
                .map(|m| edge_weight(n, m, large, cfg.hr_weight(m), &b, cfg.trunc_k))
                .collect()
        })
        .collect();
    let v2v_of = hungarian_match(&weights)?;
    let mut v2i_of = vec![0; p];
    for (n, &m) in v2v_of.iter().enumerate() {
        v2i_of[m] = n;
    }
    let mut p_i = vec![0.0; p];
    let mut p_v = vec![0.0; p];
    let mut phi = vec![0.0; p];
    let mut bound = vec![0.0; p];
    for m in 0..p {
        let n = v2i_of[m];
        let (pi, pv) = absorption_power(cfg.hr_weight(m), &b).ok_or(Error::InfeasibleMatching)?;
        p_i[n] = pi;
        p_v[m] = pv;
        phi[m] = weights[n][m];
        let o = pv * large.l_v[m] / (pi * large.l_i_nm[n][m]);
        bound[m] = adaptation_capability_bound(large.delta[m], o, cfg.trunc_k, cfg.absorption_len);
    }
    Ok(AbsorptionPlan {
        v2v_of,
        v2i_of,
        p_i,
        p_v,
        phi,
        bound,
    })
}

/// Everything the absorption phase hands to the adaptation phase.
#[derive(Clone, Debug)]
pub struct AbsorptionOutcome {
    pub plan: AbsorptionPlan,
    /// Density estimate per V2V link.
    pub estimates: Vec<DeconvEstimate>,
    pub records: Vec<QosSample>,
    /// Slots in which a matched true interference gain was negative.
    pub clamped: usize,
}

/// Run the absorption phase for `cfg.absorption_len` slots starting at
/// `first_slot`, collecting one sample per V2V link and slot.
#[allow(clippy::too_many_arguments)]
pub fn run_absorption(
    cfg: &SimConfig,
    large: &LargeScaleState,
    law: &ErrorDistribution,
    streams: &mut ChannelStreams,
    noise: f64,
    first_slot: usize,
) -> Result<AbsorptionOutcome> {
    let plan = plan_absorption(cfg, large)?;
    let p = cfg.num_pairs;
    let t_len = cfg.absorption_len;
    let mut samples = vec![Vec::with_capacity(t_len); p];
    let mut records = Vec::with_capacity(t_len * p);
    let mut clamped = 0;
    for t in 0..t_len {
        let ch = evolve_small_scale(first_slot + t, large, law, streams);
        for m in 0..p {
            let n = plan.v2i_of[m];
            let (pv, pi) = (plan.p_v[m], plan.p_i[n]);
            let (lv, li) = (large.l_v[m], large.l_i_nm[n][m]);
            if ch.g_i_nm[n][m] < 0.0 {
                clamped += 1;
            }
            let sv = sinr_v2v(m, n, &ch, large, pv, pi, noise).value;
            let si = sinr_v2i(n, m, &ch, large, pv, pi, noise).value;
            let d = delay(cfg.packet_bits, cfg.bandwidth_hz, sv);
            records.push(QosSample {
                slot: first_slot + t,
                phase: Phase::Absorption,
                pair: m,
                p_v: pv,
                p_i: pi,
                delay_s: d,
                throughput_bps: throughput(cfg.bandwidth_hz, si),
                satisfied: d <= cfg.delay_req_s,
                infeasible: false,
            });
            let r = pv * lv * ch.g_v[m] + pi * li * ch.g_i_nm[n][m] + noise;
            let r_hat = pv * lv * ch.g_v_hat[m] + pi * li * ch.g_i_nm_hat[n][m] + noise;
            samples[m].push(collect_sample(
                r,
                r_hat,
                pi,
                li,
                pv,
                lv,
                large.delta[m],
                ch.g_v_hat[m],
            ));
        }
    }
    let estimates = samples
        .into_iter()
        .enumerate()
        .map(|(m, s)| {
            let n = plan.v2i_of[m];
            let rate = deconv_rate(
                plan.p_i[n],
                large.l_i_nm[n][m],
                plan.p_v[m],
                large.l_v[m],
                large.delta[m],
            );
            DeconvEstimate::new(s, rate, cfg.trunc_k, plan.p_i[n], plan.p_v[m])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AbsorptionOutcome {
        plan,
        estimates,
        records,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_limit_and_single_sample_density() {
        let est = DeconvEstimate::new(vec![0.3], 50.0, 10.0, 1.0, 1.0).unwrap();
        assert!((est.pdf(0.3) - 10.0).abs() < 1e-12);
        let w = 10.0 * PI;
        for &a in &[1e-5, -2e-5, 1e-4] {
            let (s, c) = (w * a).sin_cos();
            let direct = (2.0 * s / a - 2.0 / 50.0 * (w * a * c - s) / (a * a)) / (2.0 * PI);
            assert!((deconv_kernel(a, w, 50.0) - direct).abs() < 1e-6);
        }
    }

    #[test]
    fn absorption_power_cases() {
        let b = PowerBox {
            pv_min: 10.0,
            pv_max: 200.0,
            pi_min: 10.0,
            pi_max: 200.0,
        };
        assert_eq!(absorption_power(0.001, &b), Some((200.0, 10.0)));
        let (pi, pv) = absorption_power(0.01, &b).unwrap();
        assert!((pi - 200.0).abs() < 1e-12 && (pv - 40.0).abs() < 1e-12);
        let (pi, pv) = absorption_power(0.5, &b).unwrap();
        assert!((pi - 20.0).abs() < 1e-12 && (pv - 200.0).abs() < 1e-12);
        assert_eq!(absorption_power(1.5, &b), None);
    }

    #[test]
    fn bound_reference_points() {
        let delta = 0.4256f64.sqrt();
        let v = adaptation_capability_bound(delta, 1.0, 10.0, 1000);
        assert!((v - 8.35).abs() < 0.01, "{v}");
        let half = adaptation_capability_bound(delta, 1.0, 10.0, 500);
        assert!((half / v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn text_record_round_trip() {
        let est = DeconvEstimate::new(vec![0.25, -1.5e-3, 3.0], 12.5, 10.0, 20.0, 200.0).unwrap();
        assert_eq!(DeconvEstimate::from_text(&est.to_text()).unwrap(), est);
        assert!(DeconvEstimate::from_text("1 2 3\n").is_err());
    }
}
