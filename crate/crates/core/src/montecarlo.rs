//! Monte Carlo BER estimation of the complete D-AF chain.
//!
//! Each frame draws fresh channel realisations, Gray-mapped random data and
//! noise from a stream seeded by `(master_seed, frame_index)` alone. The
//! channel, data and noise of a frame are therefore shared by every power
//! level and combining scheme of a sweep, and no result depends on how frames
//! are spread across worker threads.

use crate::channel::{gen_cascaded, gen_fading, CascadedModelKind, Generator, Lag, Scenario};
use crate::link::{diff_encode, phase_indices, transmit, Constellation, LinkChannels, Noise, PowerAllocation};
use crate::receiver::{GenieIndex, Receiver, WeightScheme};
use crate::rng;
use crate::{Error, Result};
use rand::Rng;
use rayon::prelude::*;

pub const DEFAULT_MIN_BIT_ERRORS: u64 = 200;
pub const DEFAULT_MAX_SYMBOLS: u64 = 100_000_000;
pub const DEFAULT_FRAME_LEN: usize = 10_000;
const MAX_BATCH: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    /// PSK order `M`.
    pub order: usize,
    pub scheme: WeightScheme,
    pub p_db_grid: Vec<f64>,
    pub min_bit_errors: u64,
    /// Transmitted symbols (references included) after which a point stops.
    pub max_symbols: u64,
    /// Symbols per frame, including the reference symbol.
    pub frame_len: usize,
    pub master_seed: u64,
    pub generator: Generator,
    pub cascaded_model: CascadedModelKind,
    pub lag: Lag,
    pub noise: Noise,
    pub genie_index: GenieIndex,
}

impl RunConfig {
    /// Defaults: 200 errors / 1e8 symbols stopping rule, 1e4-symbol frames,
    /// sum-of-sinusoids links multiplied into the cascaded channel,
    /// block-by-block transmission.
    pub fn new(scenario: Scenario, order: usize, scheme: WeightScheme, p_db_grid: Vec<f64>) -> Self {
        RunConfig {
            scenario,
            order,
            scheme,
            p_db_grid,
            min_bit_errors: DEFAULT_MIN_BIT_ERRORS,
            max_symbols: DEFAULT_MAX_SYMBOLS,
            frame_len: DEFAULT_FRAME_LEN,
            master_seed: 0,
            generator: Generator::SumOfSinusoids,
            cascaded_model: CascadedModelKind::ExactProduct,
            lag: Lag::BlockByBlock,
            noise: Noise::Awgn,
            genie_index: GenieIndex::Previous,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_db_grid.is_empty() {
            return Err(Error::config("power grid is empty"));
        }
        if let Some(p) = self.p_db_grid.iter().find(|p| !p.is_finite()) {
            return Err(Error::config(format!("non-finite grid value {p}")));
        }
        if self.min_bit_errors < 50 {
            return Err(Error::config(format!(
                "min_bit_errors = {} below 50",
                self.min_bit_errors
            )));
        }
        if self.frame_len < 2 {
            return Err(Error::config("frame length must be at least 2 symbols"));
        }
        if self.max_symbols == 0 {
            return Err(Error::config("max_symbols must be positive"));
        }
        Constellation::new(self.order)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerEstimate {
    pub p_db: f64,
    pub scheme: WeightScheme,
    pub bit_errors: u64,
    pub bits: u64,
    pub symbols: u64,
    pub ber: f64,
    /// `1.96 sqrt(ber (1 - ber) / bits)`.
    pub ci95_halfwidth: f64,
    /// The symbol budget ran out before `min_bit_errors` were seen.
    pub truncated: bool,
}

impl BerEstimate {
    fn from_counts(p_db: f64, scheme: WeightScheme, bit_errors: u64, bits: u64, symbols: u64, truncated: bool) -> Self {
        let ber = if bits == 0 { 0.0 } else { bit_errors as f64 / bits as f64 };
        let ci = if bits == 0 {
            0.0
        } else {
            1.96 * (ber * (1.0 - ber) / bits as f64).sqrt()
        };
        BerEstimate {
            p_db,
            scheme,
            bit_errors,
            bits,
            symbols,
            ber,
            ci95_halfwidth: ci,
            truncated,
        }
    }

    pub fn ci_low(&self) -> f64 {
        self.ber - self.ci95_halfwidth
    }

    pub fn ci_high(&self) -> f64 {
        self.ber + self.ci95_halfwidth
    }
}

/// Everything a frame needs that does not change from frame to frame.
struct PointContext {
    constellation: Constellation,
    power: PowerAllocation,
    receiver: Receiver,
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameCount {
    bit_errors: u64,
    bits: u64,
    symbols: u64,
}

fn simulate_frame(cfg: &RunConfig, ctx: &PointContext, frame: u64) -> Result<FrameCount> {
    let mut rng = rng::stream(cfg.master_seed, &[frame]);
    let n = cfg.frame_len;
    let c = &ctx.constellation;

    let labels: Vec<usize> = (1..n).map(|_| rng.random_range(0..cfg.order)).collect();
    let data: Vec<usize> = labels.iter().map(|&b| c.index_of(b)).collect();
    let s = diff_encode(&data, c)?;

    let sc = &cfg.scenario;
    let h_sd = gen_fading(&sc.spec_sd(cfg.lag, cfg.generator), n, &mut rng);
    let relay = gen_cascaded(
        &sc.spec_sr(cfg.lag, cfg.generator),
        &sc.spec_rd(cfg.lag, cfg.generator),
        cfg.cascaded_model,
        n,
        &mut rng,
    )?;
    let obs = transmit(
        &s,
        &phase_indices(&data, cfg.order),
        LinkChannels { h_sd: &h_sd, relay: &relay },
        &ctx.power,
        cfg.noise,
        &mut rng,
    )?;
    let detected = ctx.receiver.detect_frame(&obs, c);
    let bit_errors = detected
        .iter()
        .zip(&labels)
        .map(|(&d, &b)| u64::from((c.bits_of(d) ^ b).count_ones()))
        .sum();
    Ok(FrameCount {
        bit_errors,
        bits: (n as u64 - 1) * u64::from(c.bits_per_symbol()),
        symbols: n as u64,
    })
}

/// BER at one total power `p_db` (equal source/relay split).
pub fn run_point(cfg: &RunConfig, p_db: f64) -> Result<BerEstimate> {
    cfg.validate()?;
    let constellation = Constellation::new(cfg.order)?;
    let power = PowerAllocation::equal_db(p_db)?;
    let (alpha_sd, alpha) = cfg.scenario.alphas(cfg.lag);
    let ctx = PointContext {
        constellation,
        power,
        receiver: Receiver {
            scheme: cfg.scheme,
            alpha_sd,
            alpha,
            p0: power.source,
            amplification: power.amplification,
            genie_index: cfg.genie_index,
        },
    };

    let mut total = FrameCount::default();
    let mut next_frame = 0u64;
    let mut batch = 1usize;
    loop {
        let counts: Vec<FrameCount> = (next_frame..next_frame + batch as u64)
            .into_par_iter()
            .map(|f| simulate_frame(cfg, &ctx, f))
            .collect::<Result<_>>()?;
        // frames are consumed strictly in order so the stopping point does
        // not depend on the batch size
        for c in counts {
            total.bit_errors += c.bit_errors;
            total.bits += c.bits;
            total.symbols += c.symbols;
            let enough = total.bit_errors >= cfg.min_bit_errors;
            if enough || total.symbols >= cfg.max_symbols {
                return Ok(BerEstimate::from_counts(
                    p_db,
                    cfg.scheme,
                    total.bit_errors,
                    total.bits,
                    total.symbols,
                    !enough,
                ));
            }
        }
        next_frame += batch as u64;
        batch = (batch * 2).min(MAX_BATCH);
    }
}

/// [`run_point`] over the whole grid.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<BerEstimate>> {
    cfg.validate()?;
    cfg.p_db_grid
        .iter()
        .map(|&p| {
            run_point(cfg, p).map_err(|e| match e {
                Error::Numeric(m) => Error::Numeric(format!("at P = {p} dB: {m}")),
                Error::Config(m) => Error::Config(format!("at P = {p} dB: {m}")),
                Error::Precondition(m) => Error::Precondition(format!("at P = {p} dB: {m}")),
                other => other,
            })
        })
        .collect()
}

/// Decades of BER lost per decade of power between two grid points:
/// `(log10 ber(P_low) - log10 ber(P_high)) / ((P_high - P_low) / 10)`.
pub fn diversity_slope(estimates: &[BerEstimate], p_low_db: f64, p_high_db: f64) -> Result<f64> {
    let find = |p: f64| {
        estimates
            .iter()
            .find(|e| (e.p_db - p).abs() < 1e-9)
            .ok_or_else(|| Error::Precondition(format!("P = {p} dB is not on the grid")))
    };
    let lo = find(p_low_db)?;
    let hi = find(p_high_db)?;
    if lo.bit_errors == 0 || hi.bit_errors == 0 {
        return Err(Error::Precondition(
            "slope undefined: a grid point has no bit errors".into(),
        ));
    }
    if p_high_db <= p_low_db {
        return Err(Error::Precondition("P_high must exceed P_low".into()));
    }
    Ok((lo.ber.log10() - hi.ber.log10()) / ((p_high_db - p_low_db) / 10.0))
}

/// Relative gap between two estimates, used to decide CI separation.
pub fn ci_separated_below(a: &BerEstimate, b: &BerEstimate) -> bool {
    a.ci_high() < b.ci_low()
}

/// Sweeps several schemes with common random numbers.
pub fn run_schemes(cfg: &RunConfig, schemes: &[WeightScheme]) -> Result<Vec<BerEstimate>> {
    let mut out = Vec::new();
    for &s in schemes {
        let c = RunConfig { scheme: s, ..cfg.clone() };
        out.extend(run_sweep(&c)?);
    }
    Ok(out)
}
