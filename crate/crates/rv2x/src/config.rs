//! Simulation configuration, its defaults and validation.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Path-loss family used for every link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathlossModel {
    /// WINNER+ B1 for vehicle-to-vehicle links, 128.1 + 37.6 log10(d) to the RSU.
    WinnerB1,
    /// Free-space gain at 1 m followed by `d^-alpha` decay on every link.
    LogDistance,
}

/// How the Gaussian benchmark obtains its error model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianFitMode {
    /// Moment-match the absorption samples of each pair every epoch.
    Refit,
    /// Assume a zero-mean law whose variance is still fitted.
    ZeroMean,
}

/// Every scalar parameter of a run. Powers are in mW, durations in seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Number of V2V pairs M, equal to the number of V2I links N.
    pub num_pairs: usize,
    pub area_side_m: f64,
    /// Distance between parallel streets of the Manhattan grid.
    pub street_spacing_m: f64,
    pub bandwidth_hz: f64,
    pub carrier_freq_hz: f64,
    pub feedback_delay_s: f64,
    pub speed_mps: f64,
    pub packet_bits: f64,
    pub delay_req_s: f64,
    pub rate_req_bps: f64,
    pub prob_req: f64,
    /// Spectral truncation of the absorption-phase density estimator.
    pub trunc_k: f64,
    /// Support truncation of the violation window in the adaptation phase.
    pub trunc_k1: f64,
    /// Spectral truncation of the adaptation-phase probability estimate.
    pub trunc_k2: f64,
    pub absorption_len: usize,
    pub matching_horizon: usize,
    pub adaptation_len: usize,
    pub pv_min_mw: f64,
    pub pv_max_mw: f64,
    pub pi_min_mw: f64,
    pub pi_max_mw: f64,
    pub noise_psd_dbm_hz: f64,
    /// Hazard-rate weights, one per V2V link; a single value applies to all.
    pub hr_weights: Vec<f64>,
    pub pathloss_model: PathlossModel,
    pub pathloss_exponent: f64,
    pub shadow_v2v_db: f64,
    pub shadow_v2i_db: f64,
    pub shadow_interference_db: f64,
    /// Shortest distance fed to the path-loss formulas.
    pub min_distance_m: f64,
    pub rng_seed: u64,
    /// Interference-error mixture as `[mean, variance, weight]` triples.
    pub error_law: Vec<[f64; 3]>,
    pub gaussian_fit: GaussianFitMode,
    /// Let the benchmarks use the identity matching instead of the proposed one.
    pub baseline_identity_matching: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            num_pairs: 10,
            area_side_m: 400.0,
            street_spacing_m: 100.0,
            bandwidth_hz: 2e6,
            carrier_freq_hz: 5.9e9,
            feedback_delay_s: 1e-3,
            speed_mps: 10.0,
            packet_bits: 3200.0,
            delay_req_s: 0.015,
            rate_req_bps: 20e6,
            prob_req: 0.95,
            trunc_k: 10.0,
            trunc_k1: 10.0,
            trunc_k2: 10.0,
            absorption_len: 1000,
            matching_horizon: 1200,
            adaptation_len: 200,
            pv_min_mw: 10.0,
            pv_max_mw: 200.0,
            pi_min_mw: 10.0,
            pi_max_mw: 200.0,
            noise_psd_dbm_hz: -174.0,
            hr_weights: vec![0.5],
            pathloss_model: PathlossModel::WinnerB1,
            pathloss_exponent: 3.0,
            shadow_v2v_db: 4.0,
            shadow_v2i_db: 8.0,
            shadow_interference_db: 8.0,
            min_distance_m: 10.0,
            rng_seed: 1,
            error_law: ErrorLawPreset::TypeOne.components(),
            gaussian_fit: GaussianFitMode::Refit,
            baseline_identity_matching: false,
        }
    }
}

/// Transmit-power limits in mW.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerBox {
    pub pv_min: f64,
    pub pv_max: f64,
    pub pi_min: f64,
    pub pi_max: f64,
}

/// Named interference-error mixtures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorLawPreset {
    TypeOne,
    TypeTwo,
}

impl ErrorLawPreset {
    pub fn components(self) -> Vec<[f64; 3]> {
        match self {
            Self::TypeOne => vec![[0.2, 0.04, 0.5], [0.8, 0.02, 0.5]],
            Self::TypeTwo => vec![[0.4, 0.02, 0.4], [0.6, 0.04, 0.6]],
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl SimConfig {
    /// Read a TOML document; missing keys keep their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn power_box(&self) -> PowerBox {
        PowerBox {
            pv_min: self.pv_min_mw,
            pv_max: self.pv_max_mw,
            pi_min: self.pi_min_mw,
            pi_max: self.pi_max_mw,
        }
    }

    /// Hazard-rate weight of V2V link `m`.
    pub fn hr_weight(&self, m: usize) -> f64 {
        if self.hr_weights.len() == 1 {
            self.hr_weights[0]
        } else {
            self.hr_weights[m]
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_pairs == 0 || self.num_pairs > 180 {
            return Err(Error::Config(format!(
                "num_pairs must be in 1..=180, got {}",
                self.num_pairs
            )));
        }
        for (name, v) in [
            ("area_side_m", self.area_side_m),
            ("street_spacing_m", self.street_spacing_m),
            ("bandwidth_hz", self.bandwidth_hz),
            ("carrier_freq_hz", self.carrier_freq_hz),
            ("feedback_delay_s", self.feedback_delay_s),
            ("speed_mps", self.speed_mps),
            ("packet_bits", self.packet_bits),
            ("delay_req_s", self.delay_req_s),
            ("rate_req_bps", self.rate_req_bps),
            ("trunc_k", self.trunc_k),
            ("trunc_k1", self.trunc_k1),
            ("trunc_k2", self.trunc_k2),
            ("pv_min_mw", self.pv_min_mw),
            ("pv_max_mw", self.pv_max_mw),
            ("pi_min_mw", self.pi_min_mw),
            ("pi_max_mw", self.pi_max_mw),
            ("pathloss_exponent", self.pathloss_exponent),
            ("shadow_v2v_db", self.shadow_v2v_db),
            ("shadow_v2i_db", self.shadow_v2i_db),
            ("shadow_interference_db", self.shadow_interference_db),
            ("min_distance_m", self.min_distance_m),
        ] {
            positive(name, v)?;
        }
        if !self.noise_psd_dbm_hz.is_finite() {
            return Err(Error::Config("noise_psd_dbm_hz must be finite".into()));
        }
        if !(self.prob_req > 0.0 && self.prob_req < 1.0) {
            return Err(Error::Config(format!(
                "prob_req must lie in (0, 1), got {}",
                self.prob_req
            )));
        }
        if self.area_side_m < 160.0 {
            return Err(Error::Config(
                "area_side_m must be at least 160 m to fit a V2V link".into(),
            ));
        }
        if self.street_spacing_m > self.area_side_m {
            return Err(Error::Config(
                "street_spacing_m exceeds the area side".into(),
            ));
        }
        if self.pv_min_mw > self.pv_max_mw || self.pi_min_mw > self.pi_max_mw {
            return Err(Error::Config(
                "power box lower limits exceed upper limits".into(),
            ));
        }
        if self.absorption_len == 0 {
            return Err(Error::Config("absorption_len must be at least 1".into()));
        }
        if self.absorption_len > self.matching_horizon {
            return Err(Error::Config(
                "absorption_len must not exceed matching_horizon".into(),
            ));
        }
        if self.hr_weights.len() != 1 && self.hr_weights.len() != self.num_pairs {
            return Err(Error::Config(format!(
                "hr_weights needs 1 or {} entries, got {}",
                self.num_pairs,
                self.hr_weights.len()
            )));
        }
        if self.hr_weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::Config("hr_weights must lie in [0, 1]".into()));
        }
        if self.error_law.is_empty() {
            return Err(Error::Config(
                "error_law needs at least one component".into(),
            ));
        }
        let total: f64 = self.error_law.iter().map(|c| c[2]).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "error_law weights sum to {total}, not 1"
            )));
        }
        for c in &self.error_law {
            if !(c[1] > 0.0 && c[2] >= 0.0 && c[0].is_finite()) {
                return Err(Error::Config("error_law variances must be positive".into()));
            }
        }
        Ok(())
    }
}
