//! Large-scale fading, CSI aging and the hidden interference-error law.

use crate::config::{PathlossModel, SimConfig};
use crate::error::{Error, Result};
use crate::rng::{stream, Purpose, RandomStream};
use crate::scenario::Topology;
use crate::special::{bessel_j0, normal_cdf, normal_pdf};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Antenna height of every vehicle, in meters.
pub const VEHICLE_ANTENNA_HEIGHT_M: f64 = 1.5;

/// V2I path loss `128.1 + 37.6 log10(d)` with `d` in km.
pub fn pathloss_v2i_db(distance_km: f64) -> Result<f64> {
    if !(distance_km > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "distance must be positive, got {distance_km}"
        )));
    }
    Ok(128.1 + 37.6 * distance_km.log10())
}

/// WINNER+ B1 street-canyon path loss in dB for vehicle-height antennas.
///
/// LOS uses the dual-slope model with breakpoint `4 h'_tx h'_rx f_c / c`
/// (effective heights `h - 1 m`); NLOS uses the single-slope fit
/// `(44.9 - 6.55 log10 h) log10 d + 34.46 + 5.83 log10 h + 23 log10(f_c / 5 GHz)`.
pub fn pathloss_winner_b1_db(distance_m: f64, los: bool, carrier_hz: f64) -> f64 {
    let h = VEHICLE_ANTENNA_HEIGHT_M;
    let fc_ghz = carrier_hz / 1e9;
    if los {
        let h_eff = h - 1.0;
        let breakpoint = 4.0 * h_eff * h_eff * carrier_hz / SPEED_OF_LIGHT;
        if distance_m <= breakpoint {
            22.7 * distance_m.log10() + 41.0 + 20.0 * (fc_ghz / 5.0).log10()
        } else {
            40.0 * distance_m.log10() + 9.45 - 17.3 * h_eff.log10() - 17.3 * h_eff.log10()
                + 2.7 * (fc_ghz / 5.0).log10()
        }
    } else {
        (44.9 - 6.55 * h.log10()) * distance_m.log10()
            + 34.46
            + 5.83 * h.log10()
            + 23.0 * (fc_ghz / 5.0).log10()
    }
}

/// Log-distance path loss: free-space loss at 1 m plus `10 α log10(d)`.
pub fn pathloss_log_distance_db(distance_m: f64, exponent: f64, carrier_hz: f64) -> f64 {
    let fspl_1m = 20.0 * (4.0 * std::f64::consts::PI * carrier_hz / SPEED_OF_LIGHT).log10();
    fspl_1m + 10.0 * exponent * distance_m.log10()
}

/// Jakes correlation `J0(2π f_D Δt)` with `f_D = v f_c / c`.
pub fn doppler_coefficient(speed_mps: f64, carrier_hz: f64, delay_s: f64) -> f64 {
    let doppler = speed_mps * carrier_hz / SPEED_OF_LIGHT;
    bessel_j0(2.0 * std::f64::consts::PI * doppler * delay_s)
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Stable identifiers of every link, used to name random substreams.
#[derive(Clone, Copy, Debug)]
pub enum Link {
    V2i(usize),
    V2v(usize),
    /// Interference from V2I transmitter `n` at V2V receiver `m`.
    V2iToV2v(usize, usize),
    /// Interference from V2V transmitter `m` at the RSU on the RB of V2I link `n`.
    V2vToRsu(usize, usize),
}

impl Link {
    pub fn id(self, pairs: usize) -> u16 {
        let id = match self {
            Link::V2i(n) => n,
            Link::V2v(m) => pairs + m,
            Link::V2iToV2v(n, m) => 2 * pairs + n * pairs + m,
            Link::V2vToRsu(m, n) => 2 * pairs + pairs * pairs + m * pairs + n,
        };
        id as u16
    }
}

/// Large-scale gains of one epoch (linear, dimensionless).
#[derive(Clone, Debug, Serialize)]
pub struct LargeScaleState {
    /// V2I direct gain per V2I link `n`.
    pub l_i: Vec<f64>,
    /// V2V direct gain per V2V link `m`.
    pub l_v: Vec<f64>,
    /// `l_i_nm[n][m]`: V2I transmitter `n` to V2V receiver `m`.
    pub l_i_nm: Vec<Vec<f64>>,
    /// `l_v_mn[m][n]`: V2V transmitter `m` to the RSU.
    pub l_v_mn: Vec<Vec<f64>>,
    /// Doppler correlation per V2V link.
    pub delta: Vec<f64>,
    pub epoch: u32,
}

impl LargeScaleState {
    pub fn pairs(&self) -> usize {
        self.l_v.len()
    }
}

/// Path loss plus one log-normal shadowing draw per link for the epoch.
pub fn build_large_scale(cfg: &SimConfig, topo: &Topology, trial: u32) -> LargeScaleState {
    let pairs = cfg.num_pairs;
    let fc = cfg.carrier_freq_hz;
    let dmin = cfg.min_distance_m;
    let shadow = |link: Link, std_db: f64| -> f64 {
        let mut rng = stream(cfg.rng_seed, trial, link.id(pairs), Purpose::Shadowing);
        let z: f64 = rng.sample(StandardNormal);
        z * std_db
    };
    let v2v_db = |d: f64, los: bool| match cfg.pathloss_model {
        PathlossModel::WinnerB1 => pathloss_winner_b1_db(d.max(dmin), los, fc),
        PathlossModel::LogDistance => {
            pathloss_log_distance_db(d.max(dmin), cfg.pathloss_exponent, fc)
        }
    };
    let rsu_db = |d: f64| match cfg.pathloss_model {
        PathlossModel::WinnerB1 => {
            pathloss_v2i_db(d.max(dmin) / 1000.0).expect("distance is positive")
        }
        PathlossModel::LogDistance => {
            pathloss_log_distance_db(d.max(dmin), cfg.pathloss_exponent, fc)
        }
    };
    let gain = |loss_db: f64, shadow_db: f64| db_to_linear(-(loss_db + shadow_db));

    let l_i = (0..pairs)
        .map(|n| {
            let d = topo.v2i_tx[n].distance(topo.rsu);
            gain(rsu_db(d), shadow(Link::V2i(n), cfg.shadow_v2i_db))
        })
        .collect();
    let l_v = (0..pairs)
        .map(|m| {
            gain(
                v2v_db(topo.v2v_distance(m), true),
                shadow(Link::V2v(m), cfg.shadow_v2v_db),
            )
        })
        .collect();
    let l_i_nm = (0..pairs)
        .map(|n| {
            (0..pairs)
                .map(|m| {
                    let d = topo.v2i_tx[n].distance(topo.v2v_rx[m]);
                    gain(
                        v2v_db(d, false),
                        shadow(Link::V2iToV2v(n, m), cfg.shadow_interference_db),
                    )
                })
                .collect()
        })
        .collect();
    let l_v_mn = (0..pairs)
        .map(|m| {
            (0..pairs)
                .map(|n| {
                    let d = topo.v2v_tx[m].distance(topo.rsu);
                    let loss = match cfg.pathloss_model {
                        PathlossModel::WinnerB1 => v2v_db(d, false),
                        PathlossModel::LogDistance => rsu_db(d),
                    };
                    gain(
                        loss,
                        shadow(Link::V2vToRsu(m, n), cfg.shadow_interference_db),
                    )
                })
                .collect()
        })
        .collect();
    let delta = vec![doppler_coefficient(cfg.speed_mps, fc, cfg.feedback_delay_s); pairs];
    LargeScaleState {
        l_i,
        l_v,
        l_i_nm,
        l_v_mn,
        delta,
        epoch: trial,
    }
}

/// One Gaussian component of the error law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Component {
    pub mean: f64,
    pub variance: f64,
    pub weight: f64,
}

/// Hidden law of the additive interference-CSI error, a Gaussian mixture.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorDistribution {
    pub components: Vec<Component>,
}

impl ErrorDistribution {
    pub fn from_triples(triples: &[[f64; 3]]) -> Result<Self> {
        let components: Vec<Component> = triples
            .iter()
            .map(|t| Component {
                mean: t[0],
                variance: t[1],
                weight: t[2],
            })
            .collect();
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if components.is_empty() || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(
                "mixture weights must sum to 1".into(),
            ));
        }
        if components
            .iter()
            .any(|c| !(c.variance > 0.0) || c.weight < 0.0)
        {
            return Err(Error::InvalidArgument(
                "mixture variances must be positive".into(),
            ));
        }
        Ok(Self { components })
    }

    /// A single Gaussian component.
    pub fn gaussian(mean: f64, variance: f64) -> Self {
        Self {
            components: vec![Component {
                mean,
                variance,
                weight: 1.0,
            }],
        }
    }

    /// A degenerate law concentrated at zero (no interference-CSI error).
    pub fn zero() -> Self {
        Self::gaussian(0.0, 0.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.components.iter().all(|c| c.variance == 0.0)
    }

    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = self.components[self.components.len() - 1];
        for c in &self.components {
            acc += c.weight;
            if u < acc {
                chosen = *c;
                break;
            }
        }
        let z: f64 = rng.sample(StandardNormal);
        chosen.mean + chosen.variance.sqrt() * z
    }

    pub fn pdf(&self, e: f64) -> f64 {
        self.components
            .iter()
            .map(|c| {
                let s = c.variance.sqrt();
                c.weight * normal_pdf((e - c.mean) / s) / s
            })
            .sum()
    }

    pub fn cdf(&self, e: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * normal_cdf((e - c.mean) / c.variance.sqrt()))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.mean).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.components
            .iter()
            .map(|c| c.weight * (c.variance + (c.mean - mu).powi(2)))
            .sum()
    }

    /// Characteristic function `E[exp(j w E)]`.
    pub fn characteristic(&self, w: f64) -> num_complex::Complex64 {
        self.components
            .iter()
            .map(|c| {
                c.weight
                    * (-0.5 * c.variance * w * w).exp()
                    * num_complex::Complex64::from_polar(1.0, w * c.mean)
            })
            .sum()
    }

    /// A window `[lo, hi]` holding all but a negligible fraction of the mass.
    pub fn support(&self) -> (f64, f64) {
        let lo = self
            .components
            .iter()
            .map(|c| c.mean - 9.0 * c.variance.sqrt())
            .fold(f64::MAX, f64::min);
        let hi = self
            .components
            .iter()
            .map(|c| c.mean + 9.0 * c.variance.sqrt())
            .fold(f64::MIN, f64::max);
        (lo, hi)
    }
}

/// Squared magnitude of a unit-power circularly symmetric complex normal draw.
pub fn rayleigh_power(rng: &mut RandomStream) -> f64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    0.5 * (re * re + im * im)
}

/// Reported and true squared small-scale gains of every link in one slot.
///
/// Links towards the RSU are known exactly, so only their reported values are
/// stored. Matrices are indexed like the large-scale ones.
#[derive(Clone, Debug, Serialize)]
pub struct ChannelState {
    pub slot: usize,
    pub g_i: Vec<f64>,
    pub g_v_mn: Vec<Vec<f64>>,
    pub g_v_hat: Vec<f64>,
    pub g_v: Vec<f64>,
    pub e_m: Vec<f64>,
    pub g_i_nm_hat: Vec<Vec<f64>>,
    /// True interference gain before clamping; may be negative.
    pub g_i_nm: Vec<Vec<f64>>,
    pub e_nm: Vec<Vec<f64>>,
}

/// Per-link random streams of one trial.
pub struct ChannelStreams {
    pairs: usize,
    small: Vec<RandomStream>,
    v2v_error: Vec<RandomStream>,
    interference_error: Vec<RandomStream>,
}

impl ChannelStreams {
    pub fn new(seed: u64, trial: u32, pairs: usize) -> Self {
        let total = 2 * pairs + 2 * pairs * pairs;
        let small = (0..total)
            .map(|id| stream(seed, trial, id as u16, Purpose::SmallScale))
            .collect();
        let v2v_error = (0..pairs)
            .map(|m| stream(seed, trial, Link::V2v(m).id(pairs), Purpose::V2vError))
            .collect();
        let interference_error = (0..pairs * pairs)
            .map(|k| {
                let link = Link::V2iToV2v(k / pairs, k % pairs);
                stream(seed, trial, link.id(pairs), Purpose::InterferenceError)
            })
            .collect();
        Self {
            pairs,
            small,
            v2v_error,
            interference_error,
        }
    }
}

/// Draw the channel of the next slot. Errors are independent across slots;
/// the aged V2V gain follows `|g|² = δ²|ĝ|² + (1-δ²)|e|²` and the interference
/// gain is reported with an additive error drawn from `law`.
pub fn evolve_small_scale(
    slot: usize,
    large: &LargeScaleState,
    law: &ErrorDistribution,
    streams: &mut ChannelStreams,
) -> ChannelState {
    let p = streams.pairs;
    let mut draw = |link: Link| rayleigh_power(&mut streams.small[link.id(p) as usize]);
    let g_i: Vec<f64> = (0..p).map(|n| draw(Link::V2i(n))).collect();
    let g_v_hat: Vec<f64> = (0..p).map(|m| draw(Link::V2v(m))).collect();
    let g_i_nm_hat: Vec<Vec<f64>> = (0..p)
        .map(|n| (0..p).map(|m| draw(Link::V2iToV2v(n, m))).collect())
        .collect();
    let g_v_mn: Vec<Vec<f64>> = (0..p)
        .map(|m| (0..p).map(|n| draw(Link::V2vToRsu(m, n))).collect())
        .collect();
    let e_m: Vec<f64> = streams.v2v_error.iter_mut().map(rayleigh_power).collect();
    let g_v = (0..p)
        .map(|m| {
            let d2 = large.delta[m] * large.delta[m];
            g_v_hat[m] + (1.0 - d2) * (e_m[m] - g_v_hat[m])
        })
        .collect();
    let mut e_nm = vec![vec![0.0; p]; p];
    let mut g_i_nm = vec![vec![0.0; p]; p];
    for n in 0..p {
        for m in 0..p {
            let rng = &mut streams.interference_error[n * p + m];
            let e = law.sample(rng);
            e_nm[n][m] = e;
            g_i_nm[n][m] = g_i_nm_hat[n][m] + e;
        }
    }
    ChannelState {
        slot,
        g_i,
        g_v_mn,
        g_v_hat,
        g_v,
        e_m,
        g_i_nm_hat,
        g_i_nm,
        e_nm,
    }
}
