//! Real-valued special functions.
//!
//! All kernels are double precision and dependency-free except for `erfc` (libm),
//! which backs [`gaussian_q`].
//!
//! | function | method |
//! |---|---|
//! | `J0` | power series in double-double arithmetic for `|x| < 25`, Hankel asymptotic expansion beyond |
//! | `K0` | ascending series for `x <= 2`, Steed/Temme continued fraction beyond |
//! | `E1` | ascending series for `x <= 1`, Lentz continued fraction beyond |

use crate::{Error, Result};
use std::f64::consts::{FRAC_PI_4, PI};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const J0_SERIES_LIMIT: f64 = 25.0;
const K0_SERIES_LIMIT: f64 = 2.0;
const E1_SERIES_LIMIT: f64 = 1.0;
const MAX_ITER: usize = 500;

fn check_finite(function: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            function,
            value: x,
            expected: "finite",
        })
    }
}

fn check_positive(function: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            function,
            value: x,
            expected: "finite and > 0",
        })
    }
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    check_finite("bessel_j0", x)?;
    Ok(j0(x))
}

pub(crate) fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x < J0_SERIES_LIMIT {
        j0_series(x)
    } else {
        j0_hankel(x)
    }
}

/// `sum_k (-x^2/4)^k / (k!)^2`, accumulated in double-double so that the
/// alternating terms (up to ~1e9 at x = 25) cancel without loss.
fn j0_series(x: f64) -> f64 {
    let q = DoubleDouble::from_product(x, x).scale(0.25);
    let mut term = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ONE;
    for k in 1..MAX_ITER {
        let k2 = (k * k) as f64;
        term = term.mul(q).div_f64(-k2);
        sum = sum.add(term);
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) || term.hi.abs() < 1e-40 {
            break;
        }
    }
    sum.to_f64()
}

/// Hankel expansion `sqrt(2/(pi x)) (P cos chi - Q sin chi)`, truncated at
/// the smallest term.
fn j0_hankel(x: f64) -> f64 {
    let mut p = 0.0;
    let mut q = 0.0;
    // a_k = prod_{i=1..k} (2i-1)^2 / (k! 8^k x^k)
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..MAX_ITER {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            term *= odd * odd / (k as f64 * 8.0 * x);
        }
        if term.abs() > prev {
            break;
        }
        prev = term.abs();
        // a_k(0) alternates in sign: k = 0,1,2,3 -> +P, -Q, -P, +Q
        match k % 4 {
            0 => p += term,
            1 => q -= term,
            2 => p -= term,
            _ => q += term,
        }
        if term < 1e-17 {
            break;
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Modified Bessel function of the second kind, order zero. Requires `x > 0`.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check_positive("bessel_k0", x)?;
    Ok(k0(x))
}

pub(crate) fn k0(x: f64) -> f64 {
    if x <= K0_SERIES_LIMIT {
        k0_series(x)
    } else {
        k0_continued_fraction(x)
    }
}

/// `K0(x) = -(ln(x/2) + gamma) I0(x) + sum_{k>=1} (x^2/4)^k / (k!)^2 H_k`.
fn k0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term < 1e-17 * i0 {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

/// Steed's continued fraction (Temme's CF2) specialised to order zero.
fn k0_continued_fraction(x: f64) -> f64 {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    (PI / (2.0 * x)).sqrt() * (-x).exp() / s
}

/// Exponential integral `E1(x) = int_x^inf e^{-t}/t dt`. Requires `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    check_positive("exp_integral_e1", x)?;
    Ok(e1(x))
}

pub(crate) fn e1(x: f64) -> f64 {
    if x <= E1_SERIES_LIMIT {
        e1_series(x)
    } else {
        e1_continued_fraction_scaled(x) * (-x).exp()
    }
}

/// `e^x E1(x)` without forming the two factors separately for large `x`.
pub fn exp_scaled_e1(x: f64) -> Result<f64> {
    check_positive("exp_scaled_e1", x)?;
    Ok(scaled_e1(x))
}

pub(crate) fn scaled_e1(x: f64) -> f64 {
    if x <= E1_SERIES_LIMIT {
        x.exp() * e1_series(x)
    } else {
        e1_continued_fraction_scaled(x)
    }
}

fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut fact_term = 1.0; // (-1)^{k+1} x^k / k!
    for k in 1..MAX_ITER {
        let kf = k as f64;
        fact_term *= if k == 1 { x } else { -x / kf };
        let t = fact_term / kf;
        sum += t;
        if t.abs() < 1e-18 {
            break;
        }
    }
    -EULER_GAMMA - x.ln() + sum
}

/// Modified Lentz evaluation of `e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...)))`.
fn e1_continued_fraction_scaled(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Gaussian tail probability `Q(x) = erfc(x/sqrt 2)/2`.
pub fn gaussian_q(x: f64) -> Result<f64> {
    check_finite("gaussian_q", x)?;
    Ok(0.5 * libm::erfc(x / std::f64::consts::SQRT_2))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    const ONE: Self = DoubleDouble { hi: 1.0, lo: 0.0 };

    fn from_product(a: f64, b: f64) -> Self {
        let p = a * b;
        let e = a.mul_add(b, -p);
        DoubleDouble { hi: p, lo: e }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        DoubleDouble {
            hi: s,
            lo: lo - (s - hi),
        }
    }

    /// Exact for powers of two.
    fn scale(self, f: f64) -> Self {
        DoubleDouble {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    fn add(self, o: Self) -> Self {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let e = (self.hi - (s - bb)) + (o.hi - bb);
        Self::renorm(s, e + self.lo + o.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Self::renorm(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let p = q1 * d;
        let e = q1.mul_add(d, -p);
        let r = (self.hi - p - e + self.lo) / d;
        Self::renorm(q1, r)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}
