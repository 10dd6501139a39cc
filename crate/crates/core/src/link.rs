//! Differential M-PSK and the two-phase relay transmit chain.
//!
//! Phase I: the source broadcasts `s[k]`; the destination receives
//! `y_sd = sqrt(P0) h_sd s + w_sd` and the relay `y_sr = sqrt(P0) h_sr s + w_sr`.
//! Phase II: the relay forwards `A y_sr`, so the destination receives
//! `y_rd = A h_rd y_sr + w_rd`.

use crate::channel::CascadedChannel;
use crate::rng::complex_normal;
use crate::{ComplexSample, Error, Result};
use rand::Rng;
use std::f64::consts::PI;

/// Unit-energy M-PSK alphabet `{exp(j 2 pi m / M)}` with binary-reflected
/// Gray labelling: symbol `m` carries the bit pattern `m ^ (m >> 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: usize,
    bits: u32,
    symbols: Vec<ComplexSample>,
    /// symbol index for each bit pattern
    index_of_bits: Vec<usize>,
    d_min_sq: f64,
}

impl Constellation {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::config(format!(
                "PSK order must be a power of two >= 2, got {order}"
            )));
        }
        let symbols: Vec<_> = (0..order).map(|m| psk_point(m, order)).collect();
        let mut index_of_bits = vec![0; order];
        for m in 0..order {
            index_of_bits[gray(m)] = m;
        }
        let s = (PI / order as f64).sin();
        Ok(Constellation {
            order,
            bits: order.trailing_zeros(),
            symbols,
            index_of_bits,
            d_min_sq: 4.0 * s * s,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits
    }

    pub fn symbols(&self) -> &[ComplexSample] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> ComplexSample {
        self.symbols[index]
    }

    /// Squared distance between adjacent points, `4 sin^2(pi/M)`.
    pub fn d_min_sq(&self) -> f64 {
        self.d_min_sq
    }

    /// Gray label of symbol `index`.
    pub fn bits_of(&self, index: usize) -> usize {
        gray(index)
    }

    /// Symbol carrying the Gray label `bits`.
    pub fn index_of(&self, bits: usize) -> usize {
        self.index_of_bits[bits]
    }
}

fn gray(m: usize) -> usize {
    m ^ (m >> 1)
}

/// `exp(j 2 pi m / M)`, with the points on the axes set exactly.
fn psk_point(m: usize, order: usize) -> ComplexSample {
    if (4 * m).is_multiple_of(order) {
        match 4 * m / order {
            0 => ComplexSample::new(1.0, 0.0),
            1 => ComplexSample::new(0.0, 1.0),
            2 => ComplexSample::new(-1.0, 0.0),
            _ => ComplexSample::new(0.0, -1.0),
        }
    } else {
        ComplexSample::from_polar(1.0, 2.0 * PI * m as f64 / order as f64)
    }
}

/// Differential encoding `s[k] = v[k] s[k-1]`, `s[0] = 1`.
///
/// The running phase is tracked as an index modulo `M`, so every output is
/// an exact constellation point. The output is one longer than the input.
pub fn diff_encode(symbols: &[usize], constellation: &Constellation) -> Result<Vec<ComplexSample>> {
    let m = constellation.order();
    let mut phase = 0usize;
    let mut out = Vec::with_capacity(symbols.len() + 1);
    out.push(constellation.symbol(0));
    for &v in symbols {
        if v >= m {
            return Err(Error::config(format!("symbol index {v} out of range for M = {m}")));
        }
        phase = (phase + v) % m;
        out.push(constellation.symbol(phase));
    }
    Ok(out)
}

/// Transmit powers and the relay gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    pub total: f64,
    pub source: f64,
    pub relay: f64,
    /// `A = sqrt(P1 / (P0 + 1))`, normalising the average relay output to `P1`.
    pub amplification: f64,
}

impl PowerAllocation {
    pub fn new(source: f64, relay: f64) -> Result<Self> {
        if !(source > 0.0 && relay > 0.0 && source.is_finite() && relay.is_finite()) {
            return Err(Error::config(format!(
                "powers must be positive and finite (P0 = {source}, P1 = {relay})"
            )));
        }
        Ok(PowerAllocation {
            total: source + relay,
            source,
            relay,
            amplification: (relay / (source + 1.0)).sqrt(),
        })
    }

    /// `P0 = P1 = P/2`.
    pub fn equal(total: f64) -> Result<Self> {
        Self::new(0.5 * total, 0.5 * total)
    }

    /// Equal split of a total power given in dB.
    pub fn equal_db(total_db: f64) -> Result<Self> {
        Self::equal(10f64.powf(total_db / 10.0))
    }
}

/// The three links seen by one frame.
#[derive(Debug, Clone, Copy)]
pub struct LinkChannels<'a> {
    pub h_sd: &'a [ComplexSample],
    pub relay: &'a CascadedChannel,
}

/// Destination observations for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkObservation {
    pub y_sd: Vec<ComplexSample>,
    pub y_rd: Vec<ComplexSample>,
    /// Relay-destination channel, kept as genie side information.
    pub h_rd: Vec<ComplexSample>,
    /// Transmitted (differentially encoded) constellation indices; entry 0
    /// is the reference symbol.
    pub tx_symbols: Vec<usize>,
}

impl LinkObservation {
    pub fn len(&self) -> usize {
        self.y_sd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_sd.is_empty()
    }
}

/// Additive noise at the relay and destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Noise {
    /// Unit-variance circular Gaussian at every receiver.
    #[default]
    Awgn,
    Disabled,
}

/// Passes an encoded frame through both phases.
///
/// The relay-destination observation is built as `A h_rd (sqrt(P0) h_sr s + w_sr) + w_rd`
/// with `h_sr h_rd` replaced by the cascaded channel `h`; the forwarded relay
/// noise `A h_rd w_sr` therefore appears exactly as the physical chain produces it.
pub fn transmit<R: Rng + ?Sized>(
    s: &[ComplexSample],
    tx_symbols: &[usize],
    channels: LinkChannels<'_>,
    power: &PowerAllocation,
    noise: Noise,
    rng: &mut R,
) -> Result<LinkObservation> {
    let n = s.len();
    if channels.h_sd.len() != n || channels.relay.h.len() != n || channels.relay.h_rd.len() != n {
        return Err(Error::config(format!(
            "frame of {n} symbols but channels of length {}/{}/{}",
            channels.h_sd.len(),
            channels.relay.h.len(),
            channels.relay.h_rd.len()
        )));
    }
    if tx_symbols.len() != n {
        return Err(Error::config("transmitted index sequence length mismatch"));
    }
    let amp = power.source.sqrt();
    let a = power.amplification;
    let mut y_sd = Vec::with_capacity(n);
    let mut y_rd = Vec::with_capacity(n);
    for k in 0..n {
        let (w_sd, w_sr, w_rd) = match noise {
            Noise::Awgn => (complex_normal(rng), complex_normal(rng), complex_normal(rng)),
            Noise::Disabled => Default::default(),
        };
        let h_rd = channels.relay.h_rd[k];
        y_sd.push(channels.h_sd[k] * s[k] * amp + w_sd);
        y_rd.push((channels.relay.h[k] * s[k] * amp + h_rd * w_sr) * a + w_rd);
    }
    Ok(LinkObservation {
        y_sd,
        y_rd,
        h_rd: channels.relay.h_rd.clone(),
        tx_symbols: tx_symbols.to_vec(),
    })
}

/// Cumulative phase indices of a differentially encoded frame (entry 0 is
/// the reference).
pub fn phase_indices(data: &[usize], order: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(data.len() + 1);
    let mut p = 0;
    out.push(0);
    for &d in data {
        p = (p + d) % order;
        out.push(p);
    }
    out
}
