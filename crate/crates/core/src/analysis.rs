//! Error-probability analysis of D-AF with maximum-ratio (genie) weights.
//!
//! The pairwise error probability between nearest neighbours is
//!
//! ```text
//! P(E12) = 1/pi int_0^{pi/2} I1(theta) / (1 + gamma_sd |d|^2 / (2 sin^2 theta)) dtheta
//! ```
//!
//! where `I1` averages the relay-branch MGF over `eta = |h_rd|^2 ~ Exp(1)`
//! and has the closed form
//! `I1 = eps1 [1 + (beta1 - beta2) e^{beta2} E1(beta2)]` (see [`i1_closed_form`]).
//! That closed form is exact for the relay-branch SNR term
//! `alpha^2 rho / (2 rho (1 - alpha^2) + 4)`, i.e. [`gamma_rd`] without its
//! `2/rho` correction, which only matters at low SNR.

use crate::link::Constellation;
use crate::quadrature;
use crate::special;
use crate::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI};

/// Relative agreement required between the two quadrature orders.
pub const PEP_TOLERANCE: f64 = 1e-9;

/// `|alpha_sd - alpha|` below which the equal-correlation floor is used.
pub const FLOOR_BRANCH_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PepParams {
    pub p0: f64,
    pub amplification: f64,
    pub alpha_sd: f64,
    pub alpha: f64,
    pub d_min_sq: f64,
    pub order: usize,
}

impl PepParams {
    pub fn new(
        p0: f64,
        amplification: f64,
        alpha_sd: f64,
        alpha: f64,
        constellation: &Constellation,
    ) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(p0) && ok(amplification)) {
            return Err(Error::config(format!(
                "P0 = {p0} and A = {amplification} must be positive"
            )));
        }
        for (name, a) in [("alpha_sd", alpha_sd), ("alpha", alpha)] {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::config(format!("{name} = {a} outside (0, 1]")));
            }
        }
        Ok(PepParams {
            p0,
            amplification,
            alpha_sd,
            alpha,
            d_min_sq: constellation.d_min_sq(),
            order: constellation.order(),
        })
    }

    /// Equal source/relay split of a total power in dB, `A = sqrt(P1/(P0+1))`.
    pub fn equal_power(p_db: f64, alpha_sd: f64, alpha: f64, constellation: &Constellation) -> Result<Self> {
        let p = crate::link::PowerAllocation::equal_db(p_db)?;
        Self::new(p.source, p.amplification, alpha_sd, alpha, constellation)
    }
}

/// Effective direct-link SNR term
/// `alpha_sd^2 P0 / (2 P0 (1 - alpha_sd^2) + 4 + 2/P0)`.
pub fn gamma_sd(params: &PepParams) -> f64 {
    let a2 = params.alpha_sd * params.alpha_sd;
    let p0 = params.p0;
    a2 * p0 / (2.0 * p0 * (1.0 - a2) + 4.0 + 2.0 / p0)
}

/// Effective relay-link SNR term `alpha^2 rho / (2 rho (1 - alpha^2) + 4 + 2/rho)`.
pub fn gamma_rd(alpha: f64, rho: f64) -> f64 {
    let a2 = alpha * alpha;
    a2 * rho / (2.0 * rho * (1.0 - a2) + 4.0 + 2.0 / rho)
}

/// `(eps1, beta1, beta2)` at angle `theta`.
pub fn i1_coefficients(theta: f64, params: &PepParams) -> (f64, f64, f64) {
    let a2 = params.amplification * params.amplification;
    let b = a2 * params.p0;
    let u = 1.0 - params.alpha * params.alpha;
    let s2 = theta.sin().powi(2);
    let base = 4.0 * u * b + 8.0 * a2;
    let k = params.alpha * params.alpha * b * params.d_min_sq / s2 + base;
    (base / k, 4.0 / (2.0 * u * b + 4.0 * a2), 8.0 / k)
}

/// `I1(theta) = eps1 [1 + (beta1 - beta2) e^{beta2} E1(beta2)]`.
pub fn i1_closed_form(theta: f64, params: &PepParams) -> f64 {
    let (eps1, beta1, beta2) = i1_coefficients(theta, params);
    eps1 * (1.0 + (beta1 - beta2) * special::scaled_e1(beta2))
}

fn pep_integrand(theta: f64, params: &PepParams, g_sd: f64) -> f64 {
    let s2 = 2.0 * theta.sin().powi(2);
    i1_closed_form(theta, params) * s2 / (s2 + g_sd * params.d_min_sq)
}

/// Composite Gauss-Legendre over dyadic panels `[h 2^{-(j+1)}, h 2^{-j}]`,
/// resolving the sharp rise near `theta = 0` at low SNR.
fn graded<F: Fn(f64) -> f64>(order: usize, f: F) -> f64 {
    let gl = quadrature::rule(order);
    let mut sum = 0.0;
    let mut hi = FRAC_PI_2;
    for _ in 0..60 {
        let lo = 0.5 * hi;
        sum += gl.integrate(lo, hi, &f);
        hi = lo;
    }
    sum + gl.integrate(0.0, hi, &f)
}

/// Nearest-neighbour pairwise error probability.
///
/// Integrates with 64- and 128-point Gauss-Legendre rules; when they differ
/// by more than [`PEP_TOLERANCE`] (very low SNR), falls back to graded
/// panels checked the same way.
pub fn pep(params: &PepParams) -> Result<f64> {
    let g_sd = gamma_sd(params);
    let f = |t: f64| pep_integrand(t, params, g_sd);
    let coarse = quadrature::rule(64).integrate(0.0, FRAC_PI_2, f);
    let fine = quadrature::rule(128).integrate(0.0, FRAC_PI_2, f);
    let value = if (coarse - fine).abs() <= PEP_TOLERANCE * fine.abs() {
        fine
    } else {
        let coarse = graded(16, f);
        let fine = graded(32, f);
        if (coarse - fine).abs() > PEP_TOLERANCE * fine.abs() {
            return Err(Error::Numeric(format!(
                "PEP quadrature did not converge ({coarse} vs {fine})"
            )));
        }
        fine
    };
    let v = value / PI;
    if !v.is_finite() {
        return Err(Error::Numeric(format!("non-finite PEP {v}")));
    }
    Ok(v.clamp(0.0, 0.5))
}

/// `I1(pi/2) / (2 + gamma_sd |d|^2)`, the integrand bound at `theta = pi/2`.
pub fn pep_upper_bound(params: &PepParams) -> f64 {
    i1_closed_form(FRAC_PI_2, params) / (2.0 + gamma_sd(params) * params.d_min_sq)
}

/// High-SNR limit of the PEP.
///
/// For `alpha_sd != alpha`:
/// `1/2 - a_sd^2 (1-a^2) / (2 (a_sd^2 - a^2)) sqrt(a_sd^2 d / (a_sd^2 d + 4(1-a_sd^2)))
///      + a^2 (1-a_sd^2) / (2 (a_sd^2 - a^2)) sqrt(a^2 d / (a^2 d + 4(1-a^2)))`.
///
/// For `alpha_sd = alpha` the removable singularity is replaced by its limit
/// `1/2 {1 - sqrt(a^2 d / D) (1 + 2(1-a^2)/D)}`, `D = a^2 d + 4(1-a^2)`.
pub fn error_floor(alpha_sd: f64, alpha: f64, d_min_sq: f64) -> f64 {
    if alpha_sd >= 1.0 && alpha >= 1.0 {
        return 0.0;
    }
    let d = d_min_sq;
    let sd2 = alpha_sd * alpha_sd;
    let a2 = alpha * alpha;
    if (alpha_sd - alpha).abs() < FLOOR_BRANCH_EPS {
        let u = 1.0 - a2;
        let den = a2 * d + 4.0 * u;
        return (0.5 * (1.0 - (a2 * d / den).sqrt() * (1.0 + 2.0 * u / den))).max(0.0);
    }
    let diff = 2.0 * (sd2 - a2);
    let root_sd = (sd2 * d / (sd2 * d + 4.0 * (1.0 - sd2))).sqrt();
    let root_rd = (a2 * d / (a2 * d + 4.0 * (1.0 - a2))).sqrt();
    (0.5 - sd2 * (1.0 - a2) / diff * root_sd + a2 * (1.0 - sd2) / diff * root_rd).max(0.0)
}

/// Nearest-neighbour mapping to symbol and bit error rates. For DBPSK the
/// PEP is already the exact BER.
pub fn ser_ber_from_pep(pep: f64, order: usize) -> (f64, f64) {
    if order <= 2 {
        return (pep, pep);
    }
    let bits = (order as f64).log2();
    ((2.0 * pep).min(1.0), (2.0 * pep / bits).min(1.0))
}

/// Analytic record at one power level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PepPoint {
    pub p_db: f64,
    pub pep: f64,
    pub ser: f64,
    pub ber: f64,
    /// Error floor of the PEP.
    pub floor: f64,
}

impl PepPoint {
    /// BER implied by the error floor.
    pub fn floor_ber(&self, order: usize) -> f64 {
        ser_ber_from_pep(self.floor, order).1
    }
}

pub fn pep_point(p_db: f64, alpha_sd: f64, alpha: f64, constellation: &Constellation) -> Result<PepPoint> {
    let params = PepParams::equal_power(p_db, alpha_sd, alpha, constellation)?;
    let pep = pep(&params)?;
    let (ser, ber) = ser_ber_from_pep(pep, params.order);
    Ok(PepPoint {
        p_db,
        pep,
        ser,
        ber,
        floor: error_floor(alpha_sd, alpha, params.d_min_sq),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p_db: f64, a_sd: f64, a: f64, m: usize) -> PepParams {
        PepParams::equal_power(p_db, a_sd, a, &Constellation::new(m).unwrap()).unwrap()
    }

    #[test]
    fn gamma_sd_static_reduction() {
        let p = params(20.0, 1.0, 1.0, 2);
        let want = p.p0 * p.p0 / (4.0 * p.p0 + 2.0);
        assert!((gamma_sd(&p) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn gamma_limits() {
        let a: f64 = 0.99901;
        let lim = a * a / (2.0 * (1.0 - a * a));
        let p = params(200.0, a, a, 2);
        assert!((gamma_sd(&p) - lim).abs() < 1e-9 * lim);
        assert!((gamma_rd(a, 1e20) - lim).abs() < 1e-9 * lim);
        let rho: f64 = 10.0;
        assert!((gamma_rd(1.0, rho) - rho * rho / (4.0 * rho + 2.0)).abs() < 1e-15);
        // alpha = 0.9, rho = 10: 8.1 / (20 * 0.19 + 4 + 0.2)
        assert!((gamma_rd(0.9, 10.0) - 8.1 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn ser_ber_mapping() {
        assert_eq!(ser_ber_from_pep(0.01, 2), (0.01, 0.01));
        assert_eq!(ser_ber_from_pep(0.01, 4), (0.02, 0.01));
        assert_eq!(ser_ber_from_pep(0.6, 4), (1.0, 0.6));
    }

    #[test]
    fn floor_is_zero_for_static_channels() {
        assert_eq!(error_floor(1.0, 1.0, 4.0), 0.0);
        assert!(error_floor(1.0, 0.99, 4.0).abs() < 1e-15);
    }

    #[test]
    fn floor_branches_join_continuously() {
        let a = 0.97;
        for d in [4.0, 2.0] {
            let eq = error_floor(a, a, d);
            let up = error_floor(a * (1.0 + 1e-6), a, d);
            let down = error_floor(a * (1.0 - 1e-6), a, d);
            assert!((up - eq).abs() < 1e-4 * eq && (down - eq).abs() < 1e-4 * eq);
            assert!(up.min(down) <= eq && eq <= up.max(down));
        }
    }

    #[test]
    fn pep_tends_to_half_without_power() {
        let p = PepParams::new(1e-6, 1e-3, 0.99, 0.98, &Constellation::new(2).unwrap()).unwrap();
        assert!((pep(&p).unwrap() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn upper_bound_dominates() {
        for p_db in [0.0, 10.0, 20.0, 30.0, 40.0] {
            let p = params(p_db, 0.99999, 0.99998, 2);
            assert!(pep_upper_bound(&p) >= pep(&p).unwrap());
        }
    }

    #[test]
    fn rejects_invalid_params() {
        let c = Constellation::new(2).unwrap();
        assert!(PepParams::new(-1.0, 1.0, 0.9, 0.9, &c).is_err());
        assert!(PepParams::new(1.0, 1.0, 1.1, 0.9, &c).is_err());
        assert!(PepParams::new(1.0, 1.0, 0.9, 0.0, &c).is_err());
    }
}
