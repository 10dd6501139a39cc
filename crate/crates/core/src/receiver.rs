//! Combining weights, the two-branch differential combiner and
//! minimum-distance detection.
//!
//! The combiner forms
//! `zeta = b0 conj(y_sd[k-1]) y_sd[k] + b1 conj(y_rd[k-1]) y_rd[k]`
//! and the detector picks the PSK point closest to `zeta`.

use crate::link::{Constellation, LinkObservation};
use crate::ComplexSample;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WeightScheme {
    /// Classical differential detection: weights for quasi-static fading.
    Cdd,
    /// Time-varying differential detection: weights from the average
    /// equivalent-noise variances under time-varying fading.
    Tvd,
    /// Maximum-ratio weights from the instantaneous relay-destination gain.
    OptGenie,
}

impl WeightScheme {
    pub const ALL: [WeightScheme; 3] = [WeightScheme::Cdd, WeightScheme::Tvd, WeightScheme::OptGenie];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightScheme::Cdd => "cdd",
            WeightScheme::Tvd => "tvd",
            WeightScheme::OptGenie => "opt",
        }
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cdd" => Ok(WeightScheme::Cdd),
            "tvd" => Ok(WeightScheme::Tvd),
            "opt" | "optgenie" | "genie" => Ok(WeightScheme::OptGenie),
            other => Err(format!("unknown combining scheme '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinerWeights {
    pub scheme: WeightScheme,
    pub b0: f64,
    pub b1: f64,
}

impl CombinerWeights {
    pub fn scaled(self, c: f64) -> Self {
        CombinerWeights {
            b0: self.b0 * c,
            b1: self.b1 * c,
            ..self
        }
    }
}

/// `b0 = 1/2`, `b1 = 1/(2(1 + A^2))`.
pub fn weights_cdd(amplification: f64) -> CombinerWeights {
    CombinerWeights {
        scheme: WeightScheme::Cdd,
        b0: 0.5,
        b1: 0.5 / (1.0 + amplification * amplification),
    }
}

/// `b0 = a_sd / (1 + a_sd^2 + (1 - a_sd^2) P0)`,
/// `b1 = a / ((1 + a^2)(1 + A^2) + (1 - a^2) A^2 P0)`.
pub fn weights_tvd(alpha_sd: f64, alpha: f64, p0: f64, amplification: f64) -> CombinerWeights {
    let a2 = amplification * amplification;
    let sd2 = alpha_sd * alpha_sd;
    let al2 = alpha * alpha;
    CombinerWeights {
        scheme: WeightScheme::Tvd,
        b0: alpha_sd / (1.0 + sd2 + (1.0 - sd2) * p0),
        b1: alpha / ((1.0 + al2) * (1.0 + a2) + (1.0 - al2) * a2 * p0),
    }
}

/// Variances of the equivalent differential noises given `h_rd`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseVariances {
    pub sigma_n_sd_sq: f64,
    pub sigma_n_rd_sq: f64,
}

/// `sigma_n_sd^2 = 1 + a_sd^2 + (1 - a_sd^2) P0` and
/// `sigma_n_rd^2 = sigma^2 (1 + a^2 + (1 - a^2) rho)` with
/// `sigma^2 = A^2 |h_rd|^2 + 1`, `rho = A^2 P0 |h_rd|^2 / sigma^2`.
pub fn noise_variances(
    alpha_sd: f64,
    alpha: f64,
    p0: f64,
    amplification: f64,
    h_rd: ComplexSample,
) -> NoiseVariances {
    let g = amplification * amplification * h_rd.norm_sqr();
    let sigma2 = g + 1.0;
    let rho = g * p0 / sigma2;
    let sd2 = alpha_sd * alpha_sd;
    let al2 = alpha * alpha;
    NoiseVariances {
        sigma_n_sd_sq: 1.0 + sd2 + (1.0 - sd2) * p0,
        sigma_n_rd_sq: sigma2 * (1.0 + al2 + (1.0 - al2) * rho),
    }
}

/// `b0 = a_sd / sigma_n_sd^2`, `b1 = a / sigma_n_rd^2`.
pub fn weights_opt_genie(
    alpha_sd: f64,
    alpha: f64,
    p0: f64,
    amplification: f64,
    h_rd: ComplexSample,
) -> CombinerWeights {
    let nv = noise_variances(alpha_sd, alpha, p0, amplification, h_rd);
    CombinerWeights {
        scheme: WeightScheme::OptGenie,
        b0: alpha_sd / nv.sigma_n_sd_sq,
        b1: alpha / nv.sigma_n_rd_sq,
    }
}

#[inline]
pub fn combine(
    y_sd: (ComplexSample, ComplexSample),
    y_rd: (ComplexSample, ComplexSample),
    weights: &CombinerWeights,
) -> ComplexSample {
    y_sd.0.conj() * y_sd.1 * weights.b0 + y_rd.0.conj() * y_rd.1 * weights.b1
}

/// Minimum Euclidean distance over the constellation, evaluated as the
/// maximum of `Re{conj(v_m) zeta}`. Ties go to the smallest index.
#[inline]
pub fn detect(zeta: ComplexSample, constellation: &Constellation) -> usize {
    let mut best = 0;
    let mut best_metric = f64::NEG_INFINITY;
    for (m, v) in constellation.symbols().iter().enumerate() {
        let metric = v.re * zeta.re + v.im * zeta.im;
        if metric > best_metric {
            best_metric = metric;
            best = m;
        }
    }
    best
}

/// Which relay-destination sample the genie weights condition on at the
/// decision spanning `k-1 -> k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GenieIndex {
    /// `h_rd[k-1]`, the gain behind the reference observation.
    #[default]
    Previous,
    /// `h_rd[k]`.
    Current,
}

/// Per-frame differential detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Receiver {
    pub scheme: WeightScheme,
    pub alpha_sd: f64,
    pub alpha: f64,
    pub p0: f64,
    pub amplification: f64,
    pub genie_index: GenieIndex,
}

impl Receiver {
    /// Fixed weights, or `None` for the genie scheme whose weights change per symbol.
    pub fn fixed_weights(&self) -> Option<CombinerWeights> {
        match self.scheme {
            WeightScheme::Cdd => Some(weights_cdd(self.amplification)),
            WeightScheme::Tvd => Some(weights_tvd(self.alpha_sd, self.alpha, self.p0, self.amplification)),
            WeightScheme::OptGenie => None,
        }
    }

    /// Detected differential symbol indices for `k = 1..len`.
    pub fn detect_frame(&self, obs: &LinkObservation, constellation: &Constellation) -> Vec<usize> {
        let fixed = self.fixed_weights();
        (1..obs.len())
            .map(|k| {
                let w = fixed.unwrap_or_else(|| {
                    let h = match self.genie_index {
                        GenieIndex::Previous => obs.h_rd[k - 1],
                        GenieIndex::Current => obs.h_rd[k],
                    };
                    weights_opt_genie(self.alpha_sd, self.alpha, self.p0, self.amplification, h)
                });
                let zeta = combine((obs.y_sd[k - 1], obs.y_sd[k]), (obs.y_rd[k - 1], obs.y_rd[k]), &w);
                detect(zeta, constellation)
            })
            .collect()
    }
}
