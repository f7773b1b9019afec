//! Benchmark allocators: a Gaussian error model fitted by moments, and a
//! worst-case design over a high-probability region of the error.

use crate::adaptation::{solve_power_with, AdaptationContext, SlotDecision};
use crate::config::GaussianFitMode;
use crate::error::{Error, Result};
use crate::qos::{gaussian_satisfaction, SatisfactionModel};
use serde::Serialize;

/// Variance floor of the Gaussian fit.
pub const VARIANCE_FLOOR: f64 = 1e-6;

/// Smallest sample count accepted by the fits.
pub const MIN_FIT_SAMPLES: usize = 30;

/// Gaussian model of the interference error of one pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianFit {
    pub mean: f64,
    pub variance: f64,
    /// The moment estimate of the variance fell below the floor.
    pub floored: bool,
}

/// Moment fit of `E` from samples of `Z = E + Y`, `Y ~ Exp(λ_Y)`:
/// `mean_E = mean(z) - 1/λ_Y`, `var_E = var(z) - 1/λ_Y²`.
pub fn fit_gaussian(samples: &[f64], rate: f64, mode: GaussianFitMode) -> Result<GaussianFit> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "Gaussian fit needs at least {MIN_FIT_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mean_z = samples.iter().sum::<f64>() / n;
    let var_z = samples.iter().map(|z| (z - mean_z).powi(2)).sum::<f64>() / (n - 1.0);
    let raw = var_z - 1.0 / (rate * rate);
    let floored = raw < VARIANCE_FLOOR;
    let mean = match mode {
        GaussianFitMode::Refit => mean_z - 1.0 / rate,
        GaussianFitMode::ZeroMean => 0.0,
    };
    Ok(GaussianFit {
        mean,
        variance: raw.max(VARIANCE_FLOOR),
        floored,
    })
}

impl SatisfactionModel for GaussianFit {
    fn satisfaction(&self, c: f64, offset: f64) -> f64 {
        gaussian_satisfaction(self.mean, self.variance, c, offset)
    }
}

/// The Gaussian benchmark: the proposed search with the fitted Gaussian law.
pub fn gaussian_allocator(ctx: &AdaptationContext, fit: &GaussianFit, rate: f64) -> SlotDecision {
    solve_power_with(ctx, fit, rate)
}

/// Central interval holding a `P0` fraction of the error proxies `z - 1/λ_Y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HprRegion {
    pub lo: f64,
    pub hi: f64,
    /// Fraction of the fit set inside `[lo, hi]`.
    pub coverage: f64,
}

/// Empirical central interval at level `p0` of the proxies.
pub fn fit_hpr(samples: &[f64], rate: f64, p0: f64) -> Result<HprRegion> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "region fit needs at least {MIN_FIT_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let mut e: Vec<f64> = samples.iter().map(|z| z - 1.0 / rate).collect();
    e.sort_by(f64::total_cmp);
    let n = e.len();
    let lo_idx = (((1.0 - p0) / 2.0) * n as f64).floor() as usize;
    let hi_idx = ((((1.0 + p0) / 2.0) * n as f64).ceil() as usize).clamp(lo_idx + 1, n) - 1;
    let (lo, hi) = (e[lo_idx], e[hi_idx]);
    let inside = e.iter().filter(|&&x| x >= lo && x <= hi).count();
    Ok(HprRegion {
        lo,
        hi,
        coverage: inside as f64 / n as f64,
    })
}

/// Largest `c` whose delay requirement holds with the interference error at
/// the top of the region and `|e_m|²` at the value it exceeds with
/// probability `P0`. Infinite when the requirement holds for every `c`.
pub fn hpr_c_bound(ctx: &AdaptationContext, region: &HprRegion) -> f64 {
    let q = -ctx.prob_req.ln();
    let d2 = ctx.delta * ctx.delta;
    let headroom = q + ctx.g_v_hat * d2 / (1.0 - d2);
    let load = region.hi + ctx.g_i_nm_hat;
    if load <= 0.0 {
        f64::INFINITY
    } else {
        headroom / load
    }
}

/// The region benchmark: the largest `c` meeting the worst-case requirement
/// and the power box, kept above the rate bound, then mapped to powers.
pub fn hpr_allocator(ctx: &AdaptationContext, region: &HprRegion) -> SlotDecision {
    let (box_lo, box_hi) = ctx.box_interval();
    let c_l = box_lo.max(ctx.throughput_bound());
    let c_u = hpr_c_bound(ctx, region).min(box_hi);
    if c_l > c_u {
        return SlotDecision::fallback(ctx);
    }
    let (p_v, p_i) = ctx.powers_for(c_u);
    SlotDecision {
        pair: ctx.pair,
        c_l,
        c_u: Some(c_u),
        c_star: c_u,
        p_v,
        p_i,
        beta: f64::NAN,
        feasible: true,
    }
}
