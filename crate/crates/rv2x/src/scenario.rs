//! Road topology and the constants every other module derives from the
//! configuration.

use crate::config::SimConfig;
use crate::rng::RandomStream;
use rand::Rng;
use serde::Serialize;

/// Shortest and longest V2V transmitter-receiver distance.
pub const V2V_MIN_DISTANCE_M: f64 = 60.0;
pub const V2V_MAX_DISTANCE_M: f64 = 80.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Vehicle and RSU positions for one large-scale epoch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Topology {
    pub rsu: Point,
    pub v2v_tx: Vec<Point>,
    pub v2v_rx: Vec<Point>,
    pub v2i_tx: Vec<Point>,
}

impl Topology {
    pub fn v2v_distance(&self, m: usize) -> f64 {
        self.v2v_tx[m].distance(self.v2v_rx[m])
    }
}

/// Coordinates of the parallel streets in one direction: the grid is offset by
/// half a block so that the RSU at the area center sits inside a block.
pub fn street_coordinates(cfg: &SimConfig) -> Vec<f64> {
    let mut out = Vec::new();
    let mut s = 0.5 * cfg.street_spacing_m;
    while s < cfg.area_side_m {
        out.push(s);
        s += cfg.street_spacing_m;
    }
    out
}

/// A uniformly placed vehicle on a uniformly chosen street, returned with the
/// street orientation (`true` for streets parallel to the x axis).
fn place_on_street(cfg: &SimConfig, streets: &[f64], rng: &mut RandomStream) -> (Point, bool) {
    let horizontal = rng.random_bool(0.5);
    let street = streets[rng.random_range(0..streets.len())];
    let along = rng.random_range(0.0..cfg.area_side_m);
    let p = if horizontal {
        Point {
            x: along,
            y: street,
        }
    } else {
        Point {
            x: street,
            y: along,
        }
    };
    (p, horizontal)
}

/// Draw the epoch topology: V2V transmitters and V2I transmitters uniformly on
/// the street grid, V2V receivers on the transmitter's street at a uniform
/// distance in [60, 80] m, turned around if the forward position leaves the area.
pub fn build_topology(cfg: &SimConfig, rng: &mut RandomStream) -> Topology {
    let streets = street_coordinates(cfg);
    let side = cfg.area_side_m;
    let n = cfg.num_pairs;
    let mut v2v_tx = Vec::with_capacity(n);
    let mut v2v_rx = Vec::with_capacity(n);
    for _ in 0..n {
        let (tx, horizontal) = place_on_street(cfg, &streets, rng);
        let d = rng.random_range(V2V_MIN_DISTANCE_M..=V2V_MAX_DISTANCE_M);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let along = if horizontal { tx.x } else { tx.y };
        let mut target = along + sign * d;
        if !(0.0..=side).contains(&target) {
            target = along - sign * d;
        }
        let rx = if horizontal {
            Point { x: target, y: tx.y }
        } else {
            Point { x: tx.x, y: target }
        };
        v2v_tx.push(tx);
        v2v_rx.push(rx);
    }
    let v2i_tx = (0..n)
        .map(|_| place_on_street(cfg, &streets, rng).0)
        .collect();
    Topology {
        rsu: Point {
            x: 0.5 * side,
            y: 0.5 * side,
        },
        v2v_tx,
        v2v_rx,
        v2i_tx,
    }
}

/// Thermal noise power over the configured bandwidth, in mW.
pub fn noise_power(cfg: &SimConfig) -> f64 {
    noise_power_mw(cfg.noise_psd_dbm_hz, cfg.bandwidth_hz)
}

/// Noise power in mW for a given density (dBm/Hz) and bandwidth (Hz).
pub fn noise_power_mw(psd_dbm_hz: f64, bandwidth_hz: f64) -> f64 {
    10f64.powf((psd_dbm_hz + 10.0 * bandwidth_hz.log10()) / 10.0)
}

/// SINR threshold and delay-slope constants of the V2V delay requirement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QosConstants {
    /// SINR at which the delay equals the requirement exactly.
    pub gamma_v: f64,
    /// Magnitude of the SINR-threshold derivative with respect to the delay.
    pub d_v: f64,
}

pub fn qos_constants(cfg: &SimConfig) -> QosConstants {
    qos_constants_for(cfg.packet_bits, cfg.bandwidth_hz, cfg.delay_req_s)
}

pub fn qos_constants_for(packet_bits: f64, bandwidth_hz: f64, delay_s: f64) -> QosConstants {
    let exponent = packet_bits / (bandwidth_hz * delay_s);
    let pow = exponent.exp2();
    QosConstants {
        gamma_v: (exponent * std::f64::consts::LN_2).exp_m1(),
        d_v: std::f64::consts::LN_2 * packet_bits * pow / (bandwidth_hz * delay_s * delay_s),
    }
}
