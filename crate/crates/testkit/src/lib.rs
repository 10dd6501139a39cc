//! Reference computations for tests.
//!
//! Everything here is deliberately slow and simple: exact big-integer
//! series, trapezoid rules on integral representations, and double
//! exponential quadrature. None of it shares code with `daf-core`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::f64::consts::{FRAC_PI_2, PI};

/// `J0(x)` from `sum_k (-1)^k (x/2)^{2k} / (k!)^2` in 320-bit fixed point.
///
/// `x` is converted exactly, so the only error is the final rounding to `f64`.
pub fn j0_series_exact(x: f64) -> f64 {
    const FRAC_BITS: u32 = 320;
    let (mant, exp) = decompose(x.abs());
    // X = x * 2^FRAC_BITS exactly
    let shift = FRAC_BITS as i32 + exp;
    assert!(shift >= 0, "x too small for the fixed-point oracle");
    let xs = BigInt::from(mant) << shift as usize;
    let one = BigInt::from(1u8) << FRAC_BITS as usize;
    // q = x^2 / 4
    let q = (&xs * &xs) >> (FRAC_BITS as usize + 2);
    let mut term = one.clone();
    let mut sum = one;
    for k in 1u64..2000 {
        term = -((&term * &q) >> FRAC_BITS as usize) / BigInt::from(k * k);
        if term.is_zero() {
            break;
        }
        sum += &term;
    }
    to_f64_scaled(&sum, FRAC_BITS)
}

fn decompose(x: f64) -> (u64, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    }
}

fn to_f64_scaled(v: &BigInt, frac_bits: u32) -> f64 {
    // keep 64 significant bits before converting
    let bits = v.abs().bits() as i64;
    let drop = (bits - 64).max(0);
    let top = (v >> drop as usize).to_f64().unwrap();
    top * 2f64.powi((drop - frac_bits as i64) as i32)
}

/// `J0(x) = (1/pi) int_0^pi cos(x sin t) dt` by the trapezoid rule, which is
/// spectrally accurate for this periodic integrand.
pub fn j0_integral(x: f64) -> f64 {
    let n = 2 * (x.abs() as usize) + 200;
    let h = PI / n as f64;
    let mut s = 0.5 * (1.0 + 1.0);
    for i in 1..n {
        s += (x * (i as f64 * h).sin()).cos();
    }
    s / n as f64
}

/// `K0(x) = int_0^inf exp(-x cosh t) dt` by the trapezoid rule (the
/// integrand is even and analytic in a strip, so the error decays like
/// `exp(-c/h)`).
pub fn k0_integral(x: f64) -> f64 {
    let h: f64 = 1.0 / 64.0;
    let mut s = 0.5 * (-x).exp();
    let mut t = h;
    loop {
        let v = (-x * t.cosh()).exp();
        s += v;
        if v < 1e-300 || x * t.cosh() > 745.0 {
            break;
        }
        t += h;
    }
    s * h
}

/// `E1(x) = int_x^inf e^{-t}/t dt`.
pub fn e1_integral(x: f64) -> f64 {
    exp_sinh(|t| (-t).exp() / t, x, 1e-15)
}

/// `Q(x) = int_x^inf exp(-t^2/2)/sqrt(2 pi) dt`.
pub fn q_integral(x: f64) -> f64 {
    let pdf = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
    if x >= 0.0 {
        exp_sinh(pdf, x, 1e-15)
    } else {
        1.0 - exp_sinh(pdf, -x, 1e-15)
    }
}

/// Tanh-sinh quadrature on `[a, b]`, refining the step until two levels
/// agree to `rel_tol`.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let t_max = 4.0;
    let node = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        // distance from the nearer endpoint, 1 - tanh|u| = 2/(e^{2|u|}+1)
        let d = 2.0 / ((2.0 * u.abs()).exp() + 1.0);
        let w = FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
        if d == 0.0 || !w.is_finite() || w == 0.0 {
            return 0.0;
        }
        let x = if t >= 0.0 { b - half * d } else { a + half * d };
        if x <= a || x >= b {
            return 0.0;
        }
        w * f(x)
    };
    let mut h = 0.5;
    let mut sum = node(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += node(t) + node(-t);
        k += 1;
    }
    let mut est = sum * h * half;
    for _ in 0..14 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            sum += node(t) + node(-t);
            k += 2;
        }
        let next = sum * h * half;
        if (next - est).abs() <= rel_tol * next.abs() {
            return next;
        }
        est = next;
    }
    est
}

/// Exp-sinh quadrature on `[a, inf)`, for integrands decaying at infinity
/// and possibly sharply peaked at `a`.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64) -> f64 {
    let t_lo = -4.5;
    let t_hi = 4.5;
    let node = |t: f64| -> f64 {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let w = FRAC_PI_2 * t.cosh() * e;
        if e == 0.0 || !e.is_finite() {
            return 0.0;
        }
        let v = f(a + e);
        if v == 0.0 {
            0.0
        } else {
            w * v
        }
    };
    let mut h = 0.5;
    let mut sum = 0.0;
    let mut t = t_lo;
    while t <= t_hi {
        sum += node(t);
        t += h;
    }
    let mut est = sum * h;
    for _ in 0..14 {
        h *= 0.5;
        let mut t = t_lo + h;
        while t <= t_hi {
            sum += node(t);
            t += 2.0 * h;
        }
        let next = sum * h;
        if (next - est).abs() <= rel_tol * next.abs() {
            return next;
        }
        est = next;
    }
    est
}

/// Recursive adaptive Simpson rule.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Parameters of the nearest-neighbour PEP in plain numbers.
#[derive(Debug, Clone, Copy)]
pub struct PepInputs {
    pub p0: f64,
    pub amplification: f64,
    pub alpha_sd: f64,
    pub alpha: f64,
    pub d_sq: f64,
}

/// Relay-branch SNR term as a function of `eta = |h_rd|^2`. With `full`
/// the `2/rho` term is kept.
pub fn gamma_rd_of_eta(p: &PepInputs, eta: f64, full: bool) -> f64 {
    let a2 = p.amplification * p.amplification;
    let rho = a2 * p.p0 * eta / (a2 * eta + 1.0);
    if rho == 0.0 {
        return 0.0;
    }
    let al2 = p.alpha * p.alpha;
    let extra = if full { 2.0 / rho } else { 0.0 };
    al2 * rho / (2.0 * rho * (1.0 - al2) + 4.0 + extra)
}

/// `int_0^inf e^{-eta} / (1 + gamma_rd(eta) d^2 / (2 sin^2 theta)) d eta`.
pub fn i1_eta_integral(p: &PepInputs, theta: f64, full: bool) -> f64 {
    let c = p.d_sq / (2.0 * theta.sin().powi(2));
    exp_sinh(
        |eta| (-eta).exp() / (1.0 + gamma_rd_of_eta(p, eta, full) * c),
        0.0,
        1e-13,
    )
}

/// The PEP as a nested integral over `theta` and `eta`.
pub fn pep_nested(p: &PepInputs, full: bool) -> f64 {
    let sd2 = p.alpha_sd * p.alpha_sd;
    let g_sd = sd2 * p.p0 / (2.0 * p.p0 * (1.0 - sd2) + 4.0 + 2.0 / p.p0);
    let f = |theta: f64| {
        let s2 = 2.0 * theta.sin().powi(2);
        i1_eta_integral(p, theta, full) * s2 / (s2 + g_sd * p.d_sq)
    };
    tanh_sinh(f, 0.0, FRAC_PI_2, 1e-12) / PI
}

/// Central finite difference.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
