//! Adaptation phase: per-slot power control driven by the estimated
//! interference-error law.
//!
//! Every pair reduces to a search over the scalar
//! `c = γ_V p_I L_I / (p_V L_V (1 - δ²))`. The delay requirement holds when
//! `|e_m|² ≥ c (e_nm + ℓ(c))`, and the estimated probability `β(c)` of that
//! event is computed from the absorption samples through the truncated
//! inversion of their characteristic function.

use crate::absorption::DeconvEstimate;
use crate::channel::{ChannelState, LargeScaleState};
use crate::config::{PowerBox, SimConfig};
use crate::error::{Error, Result};
use crate::qos::{LinkSnapshot, SatisfactionModel};
use crate::quad::{composite_gauss_legendre, integrate};
use crate::scenario::QosConstants;
use crate::special::damped_sine_integral;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Relative tolerance of the root searches on `c`.
pub const C_REL_TOL: f64 = 1e-6;
/// Iteration cap of the root searches on `c`.
pub const MAX_ROOT_ITERATIONS: usize = 60;

/// Everything the power decision of one matched pair in one slot depends on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdaptationContext {
    /// V2V link index `m`.
    pub pair: usize,
    /// V2I link index `n` sharing the pair's resource block.
    pub v2i: usize,
    pub l_i: f64,
    pub l_v: f64,
    pub l_i_nm: f64,
    pub l_v_mn: f64,
    pub delta: f64,
    /// Reported squared gains of the slot.
    pub g_i: f64,
    pub g_v_mn: f64,
    pub g_v_hat: f64,
    pub g_i_nm_hat: f64,
    pub gamma_v: f64,
    pub k1: f64,
    pub k2: f64,
    pub noise: f64,
    pub power_box: PowerBox,
    pub rate_req_bps: f64,
    pub bandwidth_hz: f64,
    pub prob_req: f64,
}

impl AdaptationContext {
    /// Context of V2V link `m` on the RB of V2I link `n` in the slot `ch`.
    pub fn from_slot(
        cfg: &SimConfig,
        consts: QosConstants,
        noise: f64,
        large: &LargeScaleState,
        ch: &ChannelState,
        n: usize,
        m: usize,
    ) -> Self {
        Self {
            pair: m,
            v2i: n,
            l_i: large.l_i[n],
            l_v: large.l_v[m],
            l_i_nm: large.l_i_nm[n][m],
            l_v_mn: large.l_v_mn[m][n],
            delta: large.delta[m],
            g_i: ch.g_i[n],
            g_v_mn: ch.g_v_mn[m][n],
            g_v_hat: ch.g_v_hat[m],
            g_i_nm_hat: ch.g_i_nm_hat[n][m],
            gamma_v: consts.gamma_v,
            k1: cfg.trunc_k1,
            k2: cfg.trunc_k2,
            noise,
            power_box: cfg.power_box(),
            rate_req_bps: cfg.rate_req_bps,
            bandwidth_hz: cfg.bandwidth_hz,
            prob_req: cfg.prob_req,
        }
    }

    fn aging(&self) -> f64 {
        1.0 - self.delta * self.delta
    }

    /// `c = γ_V p_I L_I / (p_V L_V (1 - δ²))`.
    pub fn c_param(&self, p_i: f64, p_v: f64) -> f64 {
        self.gamma_v * p_i * self.l_i_nm / (p_v * self.l_v * self.aging())
    }

    /// Noise-free offset `ℓ(c) = |ĝ_I|² - (|ĝ_V|² / c) δ² / (1 - δ²)`.
    pub fn ell(&self, c: f64) -> f64 {
        self.g_i_nm_hat - self.g_v_hat / c * self.delta * self.delta / self.aging()
    }

    /// The link seen by the true-law probability models at given powers.
    pub fn snapshot(&self, p_v: f64, p_i: f64) -> LinkSnapshot {
        LinkSnapshot {
            p_v,
            p_i,
            l_v: self.l_v,
            l_i_nm: self.l_i_nm,
            delta: self.delta,
            g_v_hat: self.g_v_hat,
            g_i_nm_hat: self.g_i_nm_hat,
            noise: self.noise,
            gamma_v: self.gamma_v,
        }
    }

    /// Range of `c` reachable inside the power box.
    pub fn box_interval(&self) -> (f64, f64) {
        let b = &self.power_box;
        (
            self.c_param(b.pi_min, b.pv_max),
            self.c_param(b.pi_max, b.pv_min),
        )
    }

    /// Smallest `c` meeting the V2I rate requirement with the noise ignored.
    pub fn throughput_bound(&self) -> f64 {
        let need = (self.rate_req_bps / self.bandwidth_hz).exp2() - 1.0;
        need * self.gamma_v * self.l_i_nm * self.l_v_mn * self.g_v_mn
            / (self.aging() * self.l_v * self.l_i * self.g_i)
    }

    /// Map `c` to powers: saturate `p_V` at its maximum first, then `p_I`.
    pub fn powers_for(&self, c: f64) -> (f64, f64) {
        let b = &self.power_box;
        let scale = self.l_v * self.aging() / (self.gamma_v * self.l_i_nm);
        if c <= self.c_param(b.pi_min, b.pv_max) {
            (b.pv_max, b.pi_min)
        } else if c <= self.c_param(b.pi_max, b.pv_max) {
            (b.pv_max, c * b.pv_max * scale)
        } else {
            ((b.pi_max / (c * scale)).max(b.pv_min), b.pi_max)
        }
    }
}

/// The objective `u(c)` of the estimated-probability error bound.
pub fn u_value(c: f64, rate: f64, k2: f64) -> f64 {
    let w = k2 * PI;
    let a = w / rate;
    let s = (1.0 + a * a).sqrt();
    // ln((√(1+a²) - 1)/a) = -asinh(1/a), written without cancellation.
    let head = s - (1.0 / a).asinh();
    let r = (c * c + w * w).sqrt();
    head + c / rate * (w / c).asinh() + (c * w / (r + w)).ln() / c
}

/// Left side of the sufficient condition for `u` to increase, at `x = 1/c`.
pub fn monotonicity_condition_value(x: f64, rate: f64, k2: f64) -> f64 {
    let d = 1.0 / (k2 * PI);
    let s = (x * x + d * d).sqrt();
    x / s - (x / d).asinh() - rate * x * x * (x + s).ln()
}

/// Check the sufficient monotonicity condition at every `x` of the grid.
pub fn check_monotonicity_condition(rate: f64, k2: f64, xs: &[f64]) -> Result<()> {
    match xs
        .iter()
        .find(|&&x| monotonicity_condition_value(x, rate, k2) > 0.0)
    {
        Some(&x) => Err(Error::MonotonicityCondition { x }),
        None => Ok(()),
    }
}

/// Number of grid points violating the condition.
pub fn count_monotonicity_violations(rate: f64, k2: f64, xs: &[f64]) -> usize {
    xs.iter()
        .filter(|&&x| monotonicity_condition_value(x, rate, k2) > 0.0)
        .count()
}

/// How [`EstimatedLaw`] evaluates its satisfaction probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BetaMethod {
    /// Fixed spectral grid when the integrand is smooth enough for it,
    /// otherwise the exact per-sample closed form.
    Auto,
    /// Exact per-sample closed form in the error domain.
    Closed,
    /// Adaptive Gauss-Kronrod over frequency with absolute tolerance 1e-8.
    Adaptive,
}

const GRID_PANELS: usize = 64;
const GRID_ORDER: usize = 16;
/// Largest phase advance per grid panel that the fixed rule resolves.
const GRID_PHASE_LIMIT: f64 = 10.0;

struct SpectralGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `e^{-j w K1}` at each node.
    window: Vec<Complex64>,
    /// Empirical characteristic function times the deconvolution factor
    /// `(1 - j w / λ_Y)` at each node.
    factor: Vec<Complex64>,
}

/// Estimated law of the interference error, seen through its samples.
#[derive(Debug)]
pub struct EstimatedLaw {
    pub estimate: DeconvEstimate,
    pub k1: f64,
    pub k2: f64,
    pub method: BetaMethod,
    z_min: f64,
    z_max: f64,
    grid: OnceLock<SpectralGrid>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SpectralGrid({} nodes)", self.nodes.len())
    }
}

impl Clone for EstimatedLaw {
    fn clone(&self) -> Self {
        Self::new(self.estimate.clone(), self.k1, self.k2, self.method)
    }
}

/// `(e^{-jx} - 1)` without cancellation for small `x`.
fn expm1_neg_j(x: f64) -> Complex64 {
    let h = (0.5 * x).sin();
    Complex64::new(-2.0 * h * h, -x.sin())
}

/// Fourier transform of the truncated violation profile
/// `∫_0^{K1} (1 - e^{-c y}) e^{-j w y} dy`.
fn violation_transform(w: f64, c: f64, k1: f64, window: Complex64) -> Complex64 {
    let jw = Complex64::new(0.0, w);
    let first = if w == 0.0 {
        Complex64::new(k1, 0.0)
    } else {
        expm1_neg_j(w * k1) / (-jw)
    };
    let zeta = Complex64::new(c, w);
    let second = if zeta.norm() == 0.0 {
        Complex64::new(-k1, 0.0)
    } else {
        ((-c * k1).exp_m1() * window + expm1_neg_j(w * k1)) / zeta
    };
    first + second
}

/// Smallest `W·|u|` at which the asymptotic series replaces the exact
/// endpoint evaluation.
const FAR_FIELD_ARGUMENT: f64 = 600.0;

/// `Σ_k k! / x^{k+1}` with `x = ζu`: the asymptotic factor of the
/// antiderivative `e^{ζu} · series` of `e^{ζu} / u`.
fn asymptotic_series(x: Complex64) -> Complex64 {
    let inv = x.inv();
    let mut term = inv;
    let mut sum = inv;
    for k in 1..24 {
        term *= k as f64 * inv;
        sum += term;
        if term.norm_sqr() < 1e-34 * sum.norm_sqr() {
            break;
        }
    }
    sum
}

/// Per-sample violation mass for samples whose window `[A - K1, A]` lies far
/// from the origin. Every endpoint exponential then reduces to `e^{jWA}`
/// times constants, so one sine and cosine per sample suffice.
struct FarField {
    c: f64,
    k1: f64,
    w: f64,
    rate: f64,
    zeta: Complex64,
    damp: f64,
    rise: f64,
    rot: Complex64,
}

impl FarField {
    fn new(c: f64, k1: f64, w: f64, rate: f64) -> Self {
        Self {
            c,
            k1,
            w,
            rate,
            zeta: Complex64::new(c, w),
            damp: (-c * k1).exp(),
            rise: -(-c * k1).exp_m1(),
            rot: Complex64::from_polar(1.0, -w * k1),
        }
    }

    fn applies(&self, a: f64) -> bool {
        let lo = a - self.k1;
        a * lo > 0.0 && self.w * a.abs().min(lo.abs()) >= FAR_FIELD_ARGUMENT
    }

    fn violation(&self, a: f64) -> f64 {
        let lo = a - self.k1;
        let jw = Complex64::new(0.0, self.w);
        let e = Complex64::from_polar(1.0, self.w * a);
        let e_lo = e * self.rot;
        let s1 = 2.0 * (e * asymptotic_series(jw * a) - e_lo * asymptotic_series(jw * lo)).im;
        let s2 = 2.0
            * (e * asymptotic_series(self.zeta * a)
                - self.damp * e_lo * asymptotic_series(self.zeta * lo))
            .im;
        let sinc = 2.0 * e_lo.im / lo;
        (s1 - s2 + (self.rise * sinc - self.c * s2) / self.rate) / (2.0 * PI)
    }
}

impl EstimatedLaw {
    pub fn new(estimate: DeconvEstimate, k1: f64, k2: f64, method: BetaMethod) -> Self {
        let z_min = estimate
            .samples
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let z_max = estimate
            .samples
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        Self {
            estimate,
            k1,
            k2,
            method,
            z_min,
            z_max,
            grid: OnceLock::new(),
        }
    }

    pub fn rate(&self) -> f64 {
        self.estimate.rate
    }

    fn spectral_grid(&self) -> &SpectralGrid {
        self.grid.get_or_init(|| {
            let (nodes, weights) =
                composite_gauss_legendre(0.0, self.k2 * PI, GRID_PANELS, GRID_ORDER);
            let t = self.estimate.len() as f64;
            let window = nodes
                .iter()
                .map(|&w| Complex64::from_polar(1.0, -w * self.k1))
                .collect();
            let factor = nodes
                .iter()
                .map(|&w| {
                    let ecf: Complex64 = self
                        .estimate
                        .samples
                        .iter()
                        .map(|&z| Complex64::from_polar(1.0, w * z))
                        .sum::<Complex64>()
                        / t;
                    ecf * Complex64::new(1.0, -w / self.estimate.rate)
                })
                .collect();
            SpectralGrid {
                nodes,
                weights,
                window,
                factor,
            }
        })
    }

    /// Whether the fixed spectral grid resolves the integrand at this offset.
    fn grid_resolves(&self, offset: f64) -> bool {
        let h = self.k2 * PI / GRID_PANELS as f64;
        let omega = [
            self.z_min + offset,
            self.z_max + offset,
            self.z_min + offset - self.k1,
            self.z_max + offset - self.k1,
        ]
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
        omega * h <= GRID_PHASE_LIMIT
    }

    fn beta_grid(&self, c: f64, offset: f64) -> f64 {
        let g = self.spectral_grid();
        let mut acc = 0.0;
        for i in 0..g.nodes.len() {
            let w = g.nodes[i];
            let h = violation_transform(w, c, self.k1, g.window[i]);
            let v = h * Complex64::from_polar(1.0, w * offset) * g.factor[i];
            acc += g.weights[i] * v.re;
        }
        1.0 - acc / PI
    }

    /// Estimated violation mass of one sample at `A = z + offset`:
    /// `∫_0^{K1} (1 - e^{-c y}) κ(A - y) dy` with the deconvolution kernel κ.
    fn violation_of_sample(&self, a: f64, c: f64) -> f64 {
        let w = self.k2 * PI;
        let lo = a - self.k1;
        let s1 = 2.0 * damped_sine_integral(0.0, w, lo, a);
        let s2 = 2.0 * damped_sine_integral(c, w, lo, a);
        let sinc = if (w * lo).abs() < 1e-8 {
            2.0 * w
        } else {
            2.0 * (w * lo).sin() / lo
        };
        (s1 - s2 + (-(-c * self.k1).exp_m1() * sinc - c * s2) / self.estimate.rate) / (2.0 * PI)
    }

    fn beta_closed(&self, c: f64, offset: f64) -> f64 {
        let t = self.estimate.len() as f64;
        let far = FarField::new(c, self.k1, self.k2 * PI, self.estimate.rate);
        let total: f64 = self
            .estimate
            .samples
            .iter()
            .map(|&z| {
                let a = z + offset;
                if far.applies(a) {
                    far.violation(a)
                } else {
                    self.violation_of_sample(a, c)
                }
            })
            .sum();
        1.0 - total / t
    }

    /// Adaptive quadrature of the frequency-domain integrand with the
    /// empirical characteristic function evaluated on the fly.
    pub fn beta_adaptive(&self, c: f64, offset: f64) -> Result<f64> {
        let t = self.estimate.len() as f64;
        let rate = self.estimate.rate;
        let k1 = self.k1;
        let integrand = |w: f64| {
            let window = Complex64::from_polar(1.0, -w * k1);
            let ecf: Complex64 = self
                .estimate
                .samples
                .iter()
                .map(|&z| Complex64::from_polar(1.0, w * (z + offset)))
                .sum::<Complex64>()
                / t;
            (violation_transform(w, c, k1, window) * ecf * Complex64::new(1.0, -w / rate)).re
        };
        let value = integrate(integrand, 0.0, self.k2 * PI, 1e-8 * PI, 16, 200_000)?;
        Ok(1.0 - value / PI)
    }

    /// Unclamped estimate of `P{|e_m|² ≥ c (e + offset)}`.
    pub fn satisfaction_raw(&self, c: f64, offset: f64) -> f64 {
        match self.method {
            BetaMethod::Auto if self.grid_resolves(offset) => self.beta_grid(c, offset),
            BetaMethod::Auto | BetaMethod::Closed => self.beta_closed(c, offset),
            BetaMethod::Adaptive => self
                .beta_adaptive(c, offset)
                .unwrap_or_else(|_| self.beta_closed(c, offset)),
        }
    }
}

impl SatisfactionModel for EstimatedLaw {
    fn satisfaction(&self, c: f64, offset: f64) -> f64 {
        self.satisfaction_raw(c, offset).clamp(0.0, 1.0)
    }
}

/// `β(c)`: estimated probability of meeting the delay requirement at `c`.
pub fn beta<M: SatisfactionModel + ?Sized>(c: f64, ctx: &AdaptationContext, model: &M) -> f64 {
    model.satisfaction(c, ctx.ell(c))
}

/// Find a crossing of `f` on `[lo, hi]` given `f(lo) ≥ 0 > f(hi)`, working in
/// `ln c` with bisection safeguarded regula falsi.
fn crossing<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> f64 {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let (mut fa, mut fb) = (f_lo, f_hi);
    let mut side = 0i8;
    for _ in 0..MAX_ROOT_ITERATIONS {
        if (b - a).exp_m1() <= C_REL_TOL {
            break;
        }
        let secant = if fa != fb {
            (a * fb - b * fa) / (fb - fa)
        } else {
            0.5 * (a + b)
        };
        let span = b - a;
        // Keep the trial point away from the bracket ends.
        let x = if secant.is_finite() {
            secant.clamp(a + 0.01 * span, b - 0.01 * span)
        } else {
            0.5 * (a + b)
        };
        let fx = f(x.exp());
        if fx >= 0.0 {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
    }
    a.exp()
}

/// Feasible range `[c_l, c_u]` of `c`, or `None` if the slot is infeasible.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FeasibleInterval {
    pub c_l: f64,
    pub c_u: f64,
    /// `c_u` came from the probability requirement rather than the power box.
    pub c_u_from_root: bool,
}

fn lower_limit(ctx: &AdaptationContext) -> Option<(f64, f64)> {
    let (box_lo, box_hi) = ctx.box_interval();
    let c_l = box_lo.max(ctx.throughput_bound());
    (c_l <= box_hi).then_some((c_l, box_hi))
}

/// Root of `β(c) = P0` on `[lo, hi]`, or `hi` when `β(hi) ≥ P0`.
fn upper_limit<M: SatisfactionModel + ?Sized>(
    ctx: &AdaptationContext,
    model: &M,
    lo: f64,
    beta_lo: f64,
    hi: f64,
) -> (f64, bool) {
    let p0 = ctx.prob_req;
    let beta_hi = beta(hi, ctx, model);
    if beta_hi >= p0 {
        return (hi, false);
    }
    (
        crossing(
            |c| beta(c, ctx, model) - p0,
            lo,
            hi,
            beta_lo - p0,
            beta_hi - p0,
        ),
        true,
    )
}

/// Feasible interval of the rate, probability and power-box constraints.
pub fn feasible_interval<M: SatisfactionModel + ?Sized>(
    ctx: &AdaptationContext,
    model: &M,
) -> Option<FeasibleInterval> {
    let (c_l, box_hi) = lower_limit(ctx)?;
    let beta_l = beta(c_l, ctx, model);
    if beta_l < ctx.prob_req {
        return None;
    }
    let (c_u, c_u_from_root) = upper_limit(ctx, model, c_l, beta_l, box_hi);
    Some(FeasibleInterval {
        c_l,
        c_u,
        c_u_from_root,
    })
}

/// Point of `[lo, hi]` closest to `u(c) = 1`.
pub fn u_target(lo: f64, hi: f64, rate: f64, k2: f64) -> f64 {
    let g = |c: f64| u_value(c, rate, k2) - 1.0;
    let (g_lo, g_hi) = (g(lo), g(hi));
    if hi <= lo {
        return lo;
    }
    if g_lo >= 0.0 && g_hi < 0.0 {
        return crossing(g, lo, hi, g_lo, g_hi);
    }
    if g_lo < 0.0 && g_hi >= 0.0 {
        return crossing(|c| -g(c), lo, hi, -g_lo, -g_hi);
    }
    if g_lo < 0.0 && g_hi < 0.0 {
        // Both ends below the target: u may still peak above it in between.
        let (mut a, mut b) = (lo.ln(), hi.ln());
        for _ in 0..80 {
            let m1 = a + 0.382 * (b - a);
            let m2 = a + 0.618 * (b - a);
            if g(m1.exp()) < g(m2.exp()) {
                a = m1;
            } else {
                b = m2;
            }
        }
        let peak = (0.5 * (a + b)).exp();
        let g_peak = g(peak);
        if g_peak >= 0.0 {
            return crossing(|c| -g(c), lo, peak, -g_lo, -g_peak);
        }
        if g_peak > g_lo.max(g_hi) {
            return peak;
        }
    }
    if g_lo.abs() <= g_hi.abs() {
        lo
    } else {
        hi
    }
}

/// Outcome of one pair's power decision in one slot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlotDecision {
    pub pair: usize,
    pub c_l: f64,
    /// Upper end of the feasible interval. `None` when the probability
    /// requirement did not bind at the chosen point, so its root was not needed.
    pub c_u: Option<f64>,
    pub c_star: f64,
    pub p_v: f64,
    pub p_i: f64,
    /// Estimated probability at the chosen point.
    pub beta: f64,
    pub feasible: bool,
}

impl SlotDecision {
    /// The fallback for slots without a feasible `c`: protect the V2V link.
    pub fn fallback(ctx: &AdaptationContext) -> Self {
        let b = &ctx.power_box;
        Self {
            pair: ctx.pair,
            c_l: f64::NAN,
            c_u: None,
            c_star: ctx.c_param(b.pi_min, b.pv_max),
            p_v: b.pv_max,
            p_i: b.pi_min,
            beta: f64::NAN,
            feasible: false,
        }
    }
}

/// Choose `c*` minimizing `|u(c) - 1|` over the feasible interval and map it
/// to powers. `rate` is the deconvolution rate entering `u`.
///
/// The root of `β(c) = P0` is only searched when the unconstrained optimum
/// violates the probability requirement; otherwise it cannot change `c*`.
pub fn solve_power_with<M: SatisfactionModel + ?Sized>(
    ctx: &AdaptationContext,
    model: &M,
    rate: f64,
) -> SlotDecision {
    let Some((c_l, box_hi)) = lower_limit(ctx) else {
        return SlotDecision::fallback(ctx);
    };
    let beta_l = beta(c_l, ctx, model);
    if beta_l < ctx.prob_req {
        return SlotDecision::fallback(ctx);
    }
    let mut c_u = None;
    let mut c_star = u_target(c_l, box_hi, rate, ctx.k2);
    let mut beta_star = if c_star == c_l {
        beta_l
    } else {
        beta(c_star, ctx, model)
    };
    if beta_star < ctx.prob_req {
        let (upper, _) = upper_limit(ctx, model, c_l, beta_l, box_hi);
        c_u = Some(upper);
        c_star = u_target(c_l, upper, rate, ctx.k2);
        beta_star = beta(c_star, ctx, model);
    }
    let (p_v, p_i) = ctx.powers_for(c_star);
    SlotDecision {
        pair: ctx.pair,
        c_l,
        c_u,
        c_star,
        p_v,
        p_i,
        beta: beta_star,
        feasible: true,
    }
}

/// The proposed allocator with the estimated law of the pair.
pub fn solve_power(ctx: &AdaptationContext, law: &EstimatedLaw) -> SlotDecision {
    solve_power_with(ctx, law, law.rate())
}
