//! Monte Carlo driver: runs trials of absorption followed by adaptation,
//! aggregates the records and writes the result files.

use crate::absorption::run_absorption;
use crate::adaptation::{
    count_monotonicity_violations, solve_power, AdaptationContext, BetaMethod, EstimatedLaw,
    SlotDecision,
};
use crate::baselines::{
    fit_gaussian, fit_hpr, gaussian_allocator, hpr_allocator, GaussianFit, HprRegion,
};
use crate::channel::{build_large_scale, evolve_small_scale, ChannelStreams, ErrorDistribution};
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::qos::{delay, sinr_v2i, sinr_v2v, throughput, Phase, QosSample, SatisfactionModel};
use crate::rng::{stream, Purpose};
use crate::scenario::{build_topology, noise_power, qos_constants};
use crate::stats::{
    ccdf_on_grid, cdf_on_grid, conditional_mean_above, density_grid, integrated_squared_error,
    linspace, mean, median,
};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

/// Header of the per-slot record file.
pub const CSV_HEADER: &str =
    "slot,phase,pair,p_v_mw,p_i_mw,delay_ms,throughput_mbps,satisfied,infeasible";

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "RV2X_THREADS";

/// Points of the density grid used for estimation-error statistics.
const DENSITY_POINTS: usize = 401;

/// Which adaptation policy a run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocatorKind {
    Proposed,
    Gaussian,
    Hpr,
}

impl AllocatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Proposed => "proposed",
            Self::Gaussian => "gaussian",
            Self::Hpr => "hpr",
        }
    }
}

impl FromStr for AllocatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Self::Proposed),
            "gaussian" => Ok(Self::Gaussian),
            "hpr" => Ok(Self::Hpr),
            other => Err(Error::InvalidArgument(format!(
                "unknown allocator {other:?}"
            ))),
        }
    }
}

/// One adaptation decision with the slot it was made for.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecisionRecord {
    pub slot: usize,
    #[serde(flatten)]
    pub decision: SlotDecision,
}

/// Everything one trial produced.
#[derive(Clone, Debug, Serialize)]
pub struct TrialResult {
    pub trial: u32,
    pub records: Vec<QosSample>,
    pub decisions: Vec<DecisionRecord>,
    /// Squared deviation between the allocator's modeled and the true
    /// satisfaction probability, summed over pairs, per adaptation slot.
    /// Empty for allocators without a probability model.
    pub j_trace: Vec<f64>,
    /// Integrated squared error of each pair's density estimate.
    pub ise: Vec<f64>,
    /// Absorption slots whose matched true interference gain was negative.
    pub clamped: usize,
    /// Grid points of the pairs' `c` ranges where the sufficient monotonicity
    /// condition of `u` fails.
    pub monotonicity_violations: usize,
    /// Raw density estimate of pair 0 on the density grid.
    pub pdf_estimate: Vec<f64>,
}

/// A trial that stopped with an error.
#[derive(Clone, Debug, Serialize)]
pub struct TrialFailure {
    pub trial: u32,
    pub cause: String,
}

/// Results of a whole run, in trial order.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub config: SimConfig,
    pub allocator: AllocatorKind,
    pub trials: usize,
    pub results: Vec<TrialResult>,
    pub failures: Vec<TrialFailure>,
    /// Grid and true density behind the `pdf_estimate` columns.
    pub density_grid: Vec<f64>,
    pub true_density: Vec<f64>,
}

/// Simulate one trial: topology, large-scale epoch, absorption, adaptation.
pub fn run_trial(cfg: &SimConfig, allocator: AllocatorKind, trial: u32) -> Result<TrialResult> {
    let p = cfg.num_pairs;
    let law = ErrorDistribution::from_triples(&cfg.error_law)?;
    let topo = build_topology(cfg, &mut stream(cfg.rng_seed, trial, 0, Purpose::Topology));
    let large = build_large_scale(cfg, &topo, trial);
    let mut streams = ChannelStreams::new(cfg.rng_seed, trial, p);
    let noise = noise_power(cfg);
    let consts = qos_constants(cfg);
    let first_slot = trial as usize * (cfg.absorption_len + cfg.adaptation_len);

    let outcome = run_absorption(cfg, &large, &law, &mut streams, noise, first_slot)?;
    let grid = density_grid(&law, DENSITY_POINTS);
    let ise = outcome
        .estimates
        .iter()
        .map(|e| integrated_squared_error(e, &law, &grid))
        .collect();
    let pdf_estimate = grid.iter().map(|&e| outcome.estimates[0].pdf(e)).collect();

    let laws: Vec<EstimatedLaw> = outcome
        .estimates
        .iter()
        .map(|e| EstimatedLaw::new(e.clone(), cfg.trunc_k1, cfg.trunc_k2, BetaMethod::Auto))
        .collect();
    let rates: Vec<f64> = laws.iter().map(EstimatedLaw::rate).collect();

    let identity = cfg.baseline_identity_matching && allocator != AllocatorKind::Proposed;
    let partner = |m: usize| if identity { m } else { outcome.plan.v2i_of[m] };

    let mut monotonicity_violations = 0;
    for m in 0..p {
        let n = partner(m);
        let aging = 1.0 - large.delta[m] * large.delta[m];
        let unit = consts.gamma_v * large.l_i_nm[n][m] / (large.l_v[m] * aging);
        let (c_lo, c_hi) = (
            unit * cfg.pi_min_mw / cfg.pv_max_mw,
            unit * cfg.pi_max_mw / cfg.pv_min_mw,
        );
        let xs: Vec<f64> = linspace((1.0 / c_hi).ln(), (1.0 / c_lo).ln(), 1000)
            .into_iter()
            .map(f64::exp)
            .collect();
        monotonicity_violations += count_monotonicity_violations(rates[m], cfg.trunc_k2, &xs);
    }

    let gaussian: Vec<GaussianFit> = match allocator {
        AllocatorKind::Gaussian => outcome
            .estimates
            .iter()
            .map(|e| fit_gaussian(&e.samples, e.rate, cfg.gaussian_fit))
            .collect::<Result<_>>()?,
        _ => Vec::new(),
    };
    let regions: Vec<HprRegion> = match allocator {
        AllocatorKind::Hpr => outcome
            .estimates
            .iter()
            .map(|e| fit_hpr(&e.samples, e.rate, cfg.prob_req))
            .collect::<Result<_>>()?,
        _ => Vec::new(),
    };

    let mut records = outcome.records;
    let mut decisions = Vec::with_capacity(cfg.adaptation_len * p);
    let mut j_trace = Vec::with_capacity(cfg.adaptation_len);
    for t in 0..cfg.adaptation_len {
        let slot = first_slot + cfg.absorption_len + t;
        let ch = evolve_small_scale(slot, &large, &law, &mut streams);
        let mut j = 0.0;
        for m in 0..p {
            let n = partner(m);
            let ctx = AdaptationContext::from_slot(cfg, consts, noise, &large, &ch, n, m);
            let d = match allocator {
                AllocatorKind::Proposed => solve_power(&ctx, &laws[m]),
                AllocatorKind::Gaussian => gaussian_allocator(&ctx, &gaussian[m], rates[m]),
                AllocatorKind::Hpr => hpr_allocator(&ctx, &regions[m]),
            };
            let sv = sinr_v2v(m, n, &ch, &large, d.p_v, d.p_i, noise).value;
            let si = sinr_v2i(n, m, &ch, &large, d.p_v, d.p_i, noise).value;
            let delay_s = delay(cfg.packet_bits, cfg.bandwidth_hz, sv);
            records.push(QosSample {
                slot,
                phase: Phase::Adaptation,
                pair: m,
                p_v: d.p_v,
                p_i: d.p_i,
                delay_s,
                throughput_bps: throughput(cfg.bandwidth_hz, si),
                satisfied: delay_s <= cfg.delay_req_s,
                infeasible: !d.feasible,
            });
            let link = ctx.snapshot(d.p_v, d.p_i);
            let (c, offset) = (link.c(), link.offset());
            let model: Option<&dyn SatisfactionModel> = match allocator {
                AllocatorKind::Proposed => Some(&laws[m]),
                AllocatorKind::Gaussian => Some(&gaussian[m]),
                AllocatorKind::Hpr => None,
            };
            if let Some(model) = model {
                j += (model.satisfaction(c, offset) - law.satisfaction(c, offset)).powi(2);
            }
            decisions.push(DecisionRecord { slot, decision: d });
        }
        if allocator != AllocatorKind::Hpr {
            j_trace.push(j);
        }
    }
    Ok(TrialResult {
        trial,
        records,
        decisions,
        j_trace,
        ise,
        clamped: outcome.clamped,
        monotonicity_violations,
        pdf_estimate,
    })
}

/// Worker count: the explicit request, else the environment cap, else all cores.
fn worker_count(threads: Option<usize>) -> Option<usize> {
    threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()))
        .filter(|&n| n > 0)
}

/// Run `trials` trials in a worker pool and collect them in trial order.
pub fn run(
    cfg: &SimConfig,
    allocator: AllocatorKind,
    trials: usize,
    threads: Option<usize>,
) -> Result<RunReport> {
    cfg.validate()?;
    let law = ErrorDistribution::from_triples(&cfg.error_law)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count(threads) {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<(u32, Result<TrialResult>)> = pool.install(|| {
        (0..trials as u32)
            .into_par_iter()
            .map(|t| (t, run_trial(cfg, allocator, t)))
            .collect()
    });
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (trial, outcome) in outcomes {
        match outcome {
            Ok(r) => results.push(r),
            Err(e) => failures.push(TrialFailure {
                trial,
                cause: e.to_string(),
            }),
        }
    }
    let grid = density_grid(&law, DENSITY_POINTS);
    let true_density = grid.iter().map(|&e| law.pdf(e)).collect();
    Ok(RunReport {
        config: cfg.clone(),
        allocator,
        trials,
        results,
        failures,
        density_grid: grid,
        true_density,
    })
}

/// Named scalar metrics of a run. Missing values serialize as `null`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub allocator: AllocatorKind,
    pub trials_requested: usize,
    pub trials_completed: usize,
    pub failed_trials: Vec<u32>,
    pub absorption_satisfaction: Option<f64>,
    pub absorption_mean_throughput_mbps: Option<f64>,
    pub adaptation_satisfaction: Option<f64>,
    pub adaptation_mean_throughput_mbps: Option<f64>,
    pub adaptation_mean_delay_ms: Option<f64>,
    /// Mean adaptation delay over the slots that missed the requirement;
    /// absent when no slot did.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditional_mean_delay_ms: Option<f64>,
    pub infeasible_fraction: Option<f64>,
    pub per_link_adaptation_satisfaction: Vec<Option<f64>>,
    pub median_ise: Option<f64>,
    pub mean_ise: Option<f64>,
    pub mean_j: Option<f64>,
    pub clamped_fraction: Option<f64>,
    pub monotonicity_violations: usize,
}

impl RunReport {
    pub fn records(&self) -> impl Iterator<Item = &QosSample> {
        self.results.iter().flat_map(|r| r.records.iter())
    }

    fn phase(&self, phase: Phase) -> impl Iterator<Item = &QosSample> {
        self.records().filter(move |r| r.phase == phase)
    }

    /// Fraction of records of the phase meeting the delay requirement.
    pub fn satisfaction(&self, phase: Phase) -> Option<f64> {
        let flags: Vec<f64> = self
            .phase(phase)
            .map(|r| f64::from(u8::from(r.satisfied)))
            .collect();
        mean(&flags)
    }

    pub fn mean_throughput_mbps(&self, phase: Phase) -> Option<f64> {
        let v: Vec<f64> = self.phase(phase).map(|r| r.throughput_bps / 1e6).collect();
        mean(&v)
    }

    /// Adaptation delays in ms, infinite when the link carried nothing.
    pub fn delays_ms(&self, phase: Phase) -> Vec<f64> {
        self.phase(phase).map(|r| r.delay_s * 1e3).collect()
    }

    pub fn conditional_mean_delay_ms(&self, phase: Phase) -> Option<f64> {
        conditional_mean_above(&self.delays_ms(phase), self.config.delay_req_s * 1e3)
    }

    pub fn summary(&self) -> Summary {
        let p = self.config.num_pairs;
        let adaptation: Vec<&QosSample> = self.phase(Phase::Adaptation).collect();
        let finite_delays: Vec<f64> = self
            .delays_ms(Phase::Adaptation)
            .into_iter()
            .filter(|d| d.is_finite())
            .collect();
        let infeasible: Vec<f64> = adaptation
            .iter()
            .map(|r| f64::from(u8::from(r.infeasible)))
            .collect();
        let per_link = (0..p)
            .map(|m| {
                let flags: Vec<f64> = adaptation
                    .iter()
                    .filter(|r| r.pair == m)
                    .map(|r| f64::from(u8::from(r.satisfied)))
                    .collect();
                mean(&flags)
            })
            .collect();
        let ise: Vec<f64> = self
            .results
            .iter()
            .flat_map(|r| r.ise.iter().copied())
            .collect();
        let j: Vec<f64> = self
            .results
            .iter()
            .flat_map(|r| r.j_trace.iter().copied())
            .collect();
        let absorption_slots = self.results.len() * self.config.absorption_len * p;
        let clamped: usize = self.results.iter().map(|r| r.clamped).sum();
        Summary {
            allocator: self.allocator,
            trials_requested: self.trials,
            trials_completed: self.results.len(),
            failed_trials: self.failures.iter().map(|f| f.trial).collect(),
            absorption_satisfaction: self.satisfaction(Phase::Absorption),
            absorption_mean_throughput_mbps: self.mean_throughput_mbps(Phase::Absorption),
            adaptation_satisfaction: self.satisfaction(Phase::Adaptation),
            adaptation_mean_throughput_mbps: self.mean_throughput_mbps(Phase::Adaptation),
            adaptation_mean_delay_ms: mean(&finite_delays),
            conditional_mean_delay_ms: self.conditional_mean_delay_ms(Phase::Adaptation),
            infeasible_fraction: mean(&infeasible),
            per_link_adaptation_satisfaction: per_link,
            median_ise: median(&ise),
            mean_ise: mean(&ise),
            mean_j: mean(&j),
            clamped_fraction: (absorption_slots > 0)
                .then(|| clamped as f64 / absorption_slots as f64),
            monotonicity_violations: self.results.iter().map(|r| r.monotonicity_violations).sum(),
        }
    }

    /// Per-slot records as CSV. Infinite delays are written as -1.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER.split(','))?;
        for r in self.records() {
            let delay_ms = if r.delay_s.is_finite() {
                r.delay_s * 1e3
            } else {
                -1.0
            };
            w.write_record([
                r.slot.to_string(),
                r.phase.as_str().to_string(),
                r.pair.to_string(),
                r.p_v.to_string(),
                r.p_i.to_string(),
                delay_ms.to_string(),
                (r.throughput_bps / 1e6).to_string(),
                u8::from(r.satisfied).to_string(),
                u8::from(r.infeasible).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Plot tables as `(file name, header, rows)`.
    pub fn plot_tables(&self) -> Vec<(&'static str, &'static str, Vec<Vec<f64>>)> {
        let delays = self.delays_ms(Phase::Adaptation);
        let finite_max = delays
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0f64, f64::max);
        let delay_grid = linspace(
            0.0,
            finite_max.max(2.0 * self.config.delay_req_s * 1e3),
            501,
        );
        let tput: Vec<f64> = self
            .phase(Phase::Adaptation)
            .map(|r| r.throughput_bps / 1e6)
            .collect();
        let tput_grid = linspace(0.0, tput.iter().copied().fold(1.0f64, f64::max), 501);
        let pairs = |x: &[f64], y: Vec<f64>| {
            x.iter()
                .zip(y)
                .map(|(a, b)| vec![*a, b])
                .collect::<Vec<_>>()
        };

        let len = self.config.adaptation_len;
        let mut hits = vec![0.0; len];
        let mut counts = vec![0.0; len];
        for r in self.phase(Phase::Adaptation) {
            let t = (r.slot - self.config.absorption_len) % (self.config.absorption_len + len);
            hits[t] += f64::from(u8::from(r.satisfied));
            counts[t] += 1.0;
        }
        let trace = (0..len)
            .filter(|&t| counts[t] > 0.0)
            .map(|t| vec![t as f64, hits[t] / counts[t]])
            .collect();
        let j_trace = (0..len)
            .filter_map(|t| {
                let v: Vec<f64> = self
                    .results
                    .iter()
                    .filter_map(|r| r.j_trace.get(t).copied())
                    .collect();
                mean(&v).map(|m| vec![t as f64, m])
            })
            .collect();
        let pdf = self
            .density_grid
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let est = self.results.first().map_or(f64::NAN, |r| r.pdf_estimate[i]);
                vec![e, est, self.true_density[i]]
            })
            .collect();
        vec![
            (
                "delay_cdf.csv",
                "delay_ms,cdf",
                pairs(&delay_grid, cdf_on_grid(&delays, &delay_grid)),
            ),
            (
                "delay_ccdf.csv",
                "delay_ms,ccdf",
                pairs(&delay_grid, ccdf_on_grid(&delays, &delay_grid)),
            ),
            (
                "throughput_cdf.csv",
                "throughput_mbps,cdf",
                pairs(&tput_grid, cdf_on_grid(&tput, &tput_grid)),
            ),
            (
                "satisfaction_trace.csv",
                "adaptation_slot,satisfaction",
                trace,
            ),
            ("j_trace.csv", "adaptation_slot,j", j_trace),
            ("pdf_curves.csv", "e,estimated,true", pdf),
        ]
    }

    /// Write the record CSV, the summary and the plot tables into `dir`.
    pub fn emit(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.write_csv(std::fs::File::create(dir.join("records.csv"))?)?;
        let summary = serde_json::to_string_pretty(&self.summary())?;
        std::fs::write(dir.join("summary.json"), summary + "\n")?;
        std::fs::write(dir.join("config.toml"), self.config.to_toml_string())?;
        for (name, header, rows) in self.plot_tables() {
            let mut w = csv::Writer::from_path(dir.join(name))?;
            w.write_record(header.split(','))?;
            for row in rows {
                w.write_record(row.iter().map(|v| v.to_string()))?;
            }
            w.flush()?;
        }
        Ok(())
    }
}
