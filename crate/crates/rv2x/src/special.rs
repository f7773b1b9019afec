//! Special functions: Bessel J0, normal tails and the complex exponential
//! integral used to integrate damped sinc kernels in closed form.

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Zero-order Bessel function of the first kind.
pub fn bessel_j0(x: f64) -> f64 {
    libm::j0(x)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal survival function `1 - Φ(x)`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Mills ratio `(1 - Φ(x)) / φ(x)` for large positive `x`, by continued fraction.
fn mills_ratio(x: f64) -> f64 {
    let mut acc = x;
    for k in (1..=60).rev() {
        acc = x + k as f64 / acc;
    }
    1.0 / acc
}

/// `exp(a) * (1 - Φ(x))` without overflow or underflow in the far tail.
pub fn exp_mul_normal_sf(a: f64, x: f64) -> f64 {
    if x < 6.0 {
        a.exp() * normal_sf(x)
    } else {
        (a - 0.5 * x * x).exp() * INV_SQRT_2PI * mills_ratio(x)
    }
}

/// `exp(z) E1(z)` for complex `z` away from the origin.
///
/// Uses the asymptotic series when `|z|` is large and `z` is not close to the
/// negative real axis, and the Lentz continued fraction otherwise.
pub fn e1_scaled(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r >= 30.0 && (z.re >= 0.0 || z.im.abs() >= -z.re) {
        let inv = z.inv();
        let mut term = inv;
        let mut sum = inv;
        let mut last = term.norm();
        for n in 1..60 {
            term *= -(n as f64) * inv;
            let size = term.norm();
            if size > last {
                break;
            }
            sum += term;
            if size < 1e-16 * sum.norm() {
                break;
            }
            last = size;
        }
        return sum;
    }
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..200_000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = (a * d + b).inv();
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-15 {
            break;
        }
    }
    h
}

/// Entire function `P(x) = Σ_{n≥1} xⁿ / (n·n!)`, so that `P'(x) = (eˣ - 1)/x`.
pub fn ein_series(x: Complex64) -> Complex64 {
    let mut term = x;
    let mut sum = x;
    let bound = x.norm();
    for n in 2..400 {
        term *= x / n as f64;
        let add = term / n as f64;
        sum += add;
        if n as f64 > bound && add.norm() < 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// Contribution `exp(-c·b) · Im P(ζ v)` of one endpoint, with `ζ = c + jW`.
///
/// Returns the part without the principal-branch logarithm and, separately,
/// the argument that logarithm contributes (scaled by `exp(-c·b)` later), so
/// that equal arguments at both endpoints cancel before any scaling.
fn endpoint(c: f64, w: f64, v: f64, b: f64) -> (f64, f64) {
    let zeta = Complex64::new(c, w);
    let x = zeta * v;
    let r = x.norm();
    let near_cut = x.re > 0.0 && x.im.abs() < x.re;
    if r <= 4.0 || (near_cut && r <= 40.0) {
        return ((-c * b).exp() * ein_series(x).im, 0.0);
    }
    // P(x) = -E1(-x) - γ - ln(-x); the γ term is real.
    let scale = (-c * (b - v)).exp();
    let rot = Complex64::from_polar(1.0, w * v);
    let e1_part = -(scale * rot * e1_scaled(-x)).im;
    let theta = w.atan2(c);
    let arg = if v < 0.0 { theta } else { theta - PI };
    (e1_part, arg)
}

/// `∫_a^b exp(-c (b - u)) · sin(W u) / u du` for `a ≤ b`, `c ≥ 0`, `W > 0`.
pub fn damped_sine_integral(c: f64, w: f64, a: f64, b: f64) -> f64 {
    let (hi, arg_hi) = endpoint(c, w, b, b);
    let (lo, arg_lo) = endpoint(c, w, a, b);
    let arg = arg_hi - arg_lo;
    let branch = if arg == 0.0 {
        0.0
    } else {
        (-c * b).exp() * arg
    };
    hi - lo - branch
}

/// Sine integral `Si(x) = ∫_0^x sin(t)/t dt`.
pub fn sine_integral(x: f64) -> f64 {
    damped_sine_integral(0.0, 1.0, 0.0, x)
}
