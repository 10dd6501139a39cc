//! Time-varying Rayleigh fading: per-link generators, the cascaded
//! source-relay-destination channel, and statistical validators.

use crate::quadrature;
use crate::rng::{self, complex_normal};
use crate::special;
use crate::{ComplexSample, Error, Result};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::f64::consts::PI;

/// Number of sinusoids per quadrature branch in the sum-of-sinusoids backend.
pub const SOS_SINUSOIDS: usize = 16;

/// Minimum sample count accepted by the statistical validators.
pub const MIN_VALIDATION_SAMPLES: usize = 10_000;

/// Default number of envelope histogram bins.
pub const HISTOGRAM_BINS: usize = 100;

/// Separation, in symbol periods, between the two channel uses that a
/// differential decision spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Lag {
    /// Both phases send whole blocks; consecutive uses are one symbol apart.
    #[default]
    BlockByBlock,
    /// Phases alternate per symbol; consecutive uses are two symbols apart.
    SymbolBySymbol,
}

impl Lag {
    pub fn symbols(self) -> u32 {
        match self {
            Lag::BlockByBlock => 1,
            Lag::SymbolBySymbol => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Generator {
    /// First-order autoregressive recursion with coefficient `J0(2 pi f n)`.
    #[default]
    Ar1,
    /// Statistical sum-of-sinusoids (improved Jakes) simulator.
    SumOfSinusoids,
}

/// One fading link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSpec {
    doppler: f64,
    lag: Lag,
    generator: Generator,
}

impl FadingSpec {
    /// `doppler` is the maximum Doppler shift normalised to the symbol rate.
    pub fn new(doppler: f64, lag: Lag, generator: Generator) -> Result<Self> {
        if !(0.0..0.5).contains(&doppler) {
            return Err(Error::config(format!(
                "normalized Doppler {doppler} outside [0, 0.5)"
            )));
        }
        Ok(FadingSpec {
            doppler,
            lag,
            generator,
        })
    }

    pub fn doppler(&self) -> f64 {
        self.doppler
    }

    pub fn lag(&self) -> Lag {
        self.lag
    }

    pub fn generator(&self) -> Generator {
        self.generator
    }

    /// `J0(2 pi f n)`.
    pub fn autocorr(&self) -> f64 {
        autocorr(self)
    }

    /// Phase advance per channel use, `2 pi f n`.
    fn angular_step(&self) -> f64 {
        2.0 * PI * self.doppler * f64::from(self.lag.symbols())
    }
}

/// Lag-`n` autocorrelation of a link, `J0(2 pi f n)`.
pub fn autocorr(spec: &FadingSpec) -> f64 {
    special::j0(spec.angular_step())
}

/// `sqrt(1 - alpha^2)`, exactly zero for a static channel.
fn innovation_scale(alpha: f64) -> f64 {
    (1.0 - alpha * alpha).max(0.0).sqrt()
}

/// A stateful fading stream. Each call to [`FadingProcess::next_sample`]
/// advances one channel use.
#[derive(Debug, Clone)]
pub enum FadingProcess {
    Ar1(Ar1Process),
    SumOfSinusoids(SosProcess),
}

impl FadingProcess {
    pub fn new<R: Rng + ?Sized>(spec: &FadingSpec, rng: &mut R) -> Self {
        match spec.generator {
            Generator::Ar1 => FadingProcess::Ar1(Ar1Process::new(spec.autocorr())),
            Generator::SumOfSinusoids => {
                FadingProcess::SumOfSinusoids(SosProcess::new(spec.angular_step(), rng))
            }
        }
    }

    #[inline]
    pub fn next_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> ComplexSample {
        match self {
            FadingProcess::Ar1(p) => p.next_sample(rng),
            FadingProcess::SumOfSinusoids(p) => p.next_sample(),
        }
    }
}

/// `h[k] = alpha h[k-1] + sqrt(1 - alpha^2) e[k]`, `e[k] ~ CN(0,1)`, with a
/// stationary `CN(0,1)` start.
#[derive(Debug, Clone)]
pub struct Ar1Process {
    alpha: f64,
    scale: f64,
    state: Option<ComplexSample>,
}

impl Ar1Process {
    pub fn new(alpha: f64) -> Self {
        Ar1Process {
            alpha,
            scale: innovation_scale(alpha),
            state: None,
        }
    }

    #[inline]
    pub fn next_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> ComplexSample {
        let next = match self.state {
            None => complex_normal(rng),
            // a static channel never consumes innovations
            Some(h) if self.scale == 0.0 => h,
            Some(h) => h * self.alpha + complex_normal(rng) * self.scale,
        };
        self.state = Some(next);
        next
    }
}

/// Sum-of-sinusoids fading with per-realisation random arrival-angle offset
/// and per-sinusoid random phases:
///
/// `h[k] = (1/sqrt M) sum_n [cos(w k cos a_n + phi_n) + j cos(w k sin a_n + psi_n)]`,
/// `a_n = (2 pi n - pi + theta) / (4M)`.
///
/// Each branch is evaluated by rotating unit phasors, so the per-sample cost
/// is `2M` complex multiplies.
#[derive(Debug, Clone)]
pub struct SosProcess {
    rot_i: Vec<ComplexSample>,
    rot_q: Vec<ComplexSample>,
    ph_i: Vec<ComplexSample>,
    ph_q: Vec<ComplexSample>,
    steps: u64,
}

impl SosProcess {
    pub fn new<R: Rng + ?Sized>(angular_step: f64, rng: &mut R) -> Self {
        let m = SOS_SINUSOIDS;
        let theta = rng.random_range(-PI..PI);
        let mut rot_i = Vec::with_capacity(m);
        let mut rot_q = Vec::with_capacity(m);
        let mut ph_i = Vec::with_capacity(m);
        let mut ph_q = Vec::with_capacity(m);
        for n in 1..=m {
            let a = (2.0 * PI * n as f64 - PI + theta) / (4.0 * m as f64);
            rot_i.push(ComplexSample::from_polar(1.0, angular_step * a.cos()));
            rot_q.push(ComplexSample::from_polar(1.0, angular_step * a.sin()));
            ph_i.push(ComplexSample::from_polar(1.0, rng.random_range(-PI..PI)));
            ph_q.push(ComplexSample::from_polar(1.0, rng.random_range(-PI..PI)));
        }
        SosProcess {
            rot_i,
            rot_q,
            ph_i,
            ph_q,
            steps: 0,
        }
    }

    #[inline]
    pub fn next_sample(&mut self) -> ComplexSample {
        let mut re = 0.0;
        let mut im = 0.0;
        for (p, r) in self.ph_i.iter_mut().zip(&self.rot_i) {
            re += p.re;
            *p *= r;
        }
        for (p, r) in self.ph_q.iter_mut().zip(&self.rot_q) {
            im += p.re;
            *p *= r;
        }
        self.steps += 1;
        if self.steps.is_multiple_of(4096) {
            for p in self.ph_i.iter_mut().chain(self.ph_q.iter_mut()) {
                *p /= p.norm();
            }
        }
        ComplexSample::new(re, im) / (SOS_SINUSOIDS as f64).sqrt()
    }
}

/// Generates `length` consecutive channel uses of one link.
pub fn gen_fading<R: Rng + ?Sized>(
    spec: &FadingSpec,
    length: usize,
    rng: &mut R,
) -> Vec<ComplexSample> {
    let mut p = FadingProcess::new(spec, rng);
    (0..length).map(|_| p.next_sample(rng)).collect()
}

/// How the cascaded channel `h = h_sr h_rd` evolves between channel uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CascadedModelKind {
    /// Elementwise product of two independently generated links.
    #[default]
    ExactProduct,
    /// `h[k] = alpha h[k-1] + sqrt(1-alpha^2) h_rd[k-1] e_sr[k]`, driven by
    /// the generated relay-destination link.
    Approximate,
    /// The mirror-image recursion driven by the source-relay link,
    /// `h[k] = alpha h[k-1] + sqrt(1-alpha^2) h_sr[k-1] e_rd[k]`. The reported
    /// `h_rd` is then `h / h_sr`.
    ApproximateSrTerm,
}

/// Streaming cascaded channel: yields `(h[k], h_rd[k])`.
#[derive(Debug, Clone)]
pub struct CascadedProcess {
    kind: CascadedModelKind,
    sr: FadingProcess,
    rd: FadingProcess,
    alpha: f64,
    scale: f64,
    /// `(h[k-1], driving link at k-1)`
    state: Option<(ComplexSample, ComplexSample)>,
}

impl CascadedProcess {
    pub fn new<R: Rng + ?Sized>(
        spec_sr: &FadingSpec,
        spec_rd: &FadingSpec,
        kind: CascadedModelKind,
        rng: &mut R,
    ) -> Result<Self> {
        if spec_sr.lag != spec_rd.lag {
            return Err(Error::config(
                "source-relay and relay-destination links must share the channel-use lag",
            ));
        }
        let alpha = spec_sr.autocorr() * spec_rd.autocorr();
        Ok(CascadedProcess {
            kind,
            sr: FadingProcess::new(spec_sr, rng),
            rd: FadingProcess::new(spec_rd, rng),
            alpha,
            scale: innovation_scale(alpha),
            state: None,
        })
    }

    /// Equivalent autocorrelation `alpha_sr alpha_rd`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn next_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (ComplexSample, ComplexSample) {
        match self.kind {
            CascadedModelKind::ExactProduct => {
                let sr = self.sr.next_sample(rng);
                let rd = self.rd.next_sample(rng);
                (sr * rd, rd)
            }
            CascadedModelKind::Approximate => {
                let rd = self.rd.next_sample(rng);
                let h = match self.state {
                    None => self.sr.next_sample(rng) * rd,
                    Some((h_prev, rd_prev)) => {
                        h_prev * self.alpha + rd_prev * complex_normal(rng) * self.scale
                    }
                };
                self.state = Some((h, rd));
                (h, rd)
            }
            CascadedModelKind::ApproximateSrTerm => {
                let sr = self.sr.next_sample(rng);
                let h = match self.state {
                    None => self.rd.next_sample(rng) * sr,
                    Some((h_prev, sr_prev)) => {
                        h_prev * self.alpha + sr_prev * complex_normal(rng) * self.scale
                    }
                };
                self.state = Some((h, sr));
                (h, h / sr)
            }
        }
    }
}

/// Cascaded channel realisation plus the relay-destination link that forms it.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadedChannel {
    pub h: Vec<ComplexSample>,
    pub h_rd: Vec<ComplexSample>,
}

pub fn gen_cascaded<R: Rng + ?Sized>(
    spec_sr: &FadingSpec,
    spec_rd: &FadingSpec,
    kind: CascadedModelKind,
    length: usize,
    rng: &mut R,
) -> Result<CascadedChannel> {
    let mut p = CascadedProcess::new(spec_sr, spec_rd, kind, rng)?;
    let (h, h_rd) = (0..length).map(|_| p.next_sample(rng)).unzip();
    Ok(CascadedChannel { h, h_rd })
}

/// The three normalised Doppler frequencies of a relay network.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub f_sd: f64,
    pub f_sr: f64,
    pub f_rd: f64,
}

impl Scenario {
    pub fn new(name: impl Into<String>, f_sd: f64, f_sr: f64, f_rd: f64) -> Result<Self> {
        for (link, f) in [("sd", f_sd), ("sr", f_sr), ("rd", f_rd)] {
            if !(0.0..0.5).contains(&f) {
                return Err(Error::config(format!(
                    "f_{link} = {f} outside [0, 0.5)"
                )));
            }
        }
        Ok(Scenario {
            name: name.into(),
            f_sd,
            f_sr,
            f_rd,
        })
    }

    /// Built-in scenarios: `I` all slow, `II` fairly fast SD/SR with slow RD,
    /// `III` very fast SD/SR with fairly fast RD.
    pub fn builtin(name: &str) -> Option<Self> {
        let (f_sd, f_sr, f_rd) = match name {
            "I" => (0.001, 0.001, 0.001),
            "II" => (0.01, 0.01, 0.001),
            "III" => (0.05, 0.05, 0.01),
            _ => return None,
        };
        Some(Scenario {
            name: name.to_string(),
            f_sd,
            f_sr,
            f_rd,
        })
    }

    pub fn builtins() -> Vec<Scenario> {
        ["I", "II", "III"]
            .iter()
            .filter_map(|n| Scenario::builtin(n))
            .collect()
    }

    pub fn spec_sd(&self, lag: Lag, generator: Generator) -> FadingSpec {
        FadingSpec::new(self.f_sd, lag, generator).expect("validated scenario")
    }

    pub fn spec_sr(&self, lag: Lag, generator: Generator) -> FadingSpec {
        FadingSpec::new(self.f_sr, lag, generator).expect("validated scenario")
    }

    pub fn spec_rd(&self, lag: Lag, generator: Generator) -> FadingSpec {
        FadingSpec::new(self.f_rd, lag, generator).expect("validated scenario")
    }

    /// `(alpha_sd, alpha_sr alpha_rd)`.
    pub fn alphas(&self, lag: Lag) -> (f64, f64) {
        let n = f64::from(lag.symbols());
        let a = |f: f64| special::j0(2.0 * PI * f * n);
        (a(self.f_sd), a(self.f_sr) * a(self.f_rd))
    }
}

/// Envelope density of the double-Rayleigh channel, `4 lambda K0(2 lambda)`.
pub fn envelope_pdf_theoretical(lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain {
            function: "envelope_pdf_theoretical",
            value: lambda,
            expected: "finite and >= 0",
        });
    }
    Ok(cascaded_envelope_pdf(lambda))
}

fn cascaded_envelope_pdf(lambda: f64) -> f64 {
    if lambda == 0.0 {
        0.0
    } else {
        4.0 * lambda * special::k0(2.0 * lambda)
    }
}

/// Envelope density of a unit-power Rayleigh channel, `2 lambda exp(-lambda^2)`.
pub fn rayleigh_envelope_pdf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        0.0
    } else {
        2.0 * lambda * (-lambda * lambda).exp()
    }
}

/// Uniform-bin envelope histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// `counts / (total * width)`.
    pub densities: Vec<f64>,
    pub total: u64,
}

impl Histogram {
    /// `bins` uniform bins over `[0, upper]`; values at `upper` land in the
    /// last bin.
    pub fn new(values: impl IntoIterator<Item = f64>, bins: usize, upper: f64) -> Self {
        let width = upper / bins as f64;
        let mut counts = vec![0u64; bins];
        let mut total = 0u64;
        for v in values {
            let i = ((v / width) as usize).min(bins - 1);
            counts[i] += 1;
            total += 1;
        }
        let densities = counts
            .iter()
            .map(|&c| c as f64 / (total as f64 * width))
            .collect();
        let edges = (0..=bins).map(|i| i as f64 * width).collect();
        Histogram {
            edges,
            counts,
            densities,
            total,
        }
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }

    /// Probability mass per bin under `pdf`; the last bin absorbs the tail
    /// beyond the upper edge.
    pub fn expected_mass<F: Fn(f64) -> f64>(&self, pdf: F) -> Vec<f64> {
        let gl = quadrature::rule(16);
        let mut mass: Vec<f64> = self
            .edges
            .windows(2)
            .map(|w| gl.integrate(w[0], w[1], &pdf))
            .collect();
        let inside: f64 = mass.iter().sum();
        if let Some(last) = mass.last_mut() {
            *last += (1.0 - inside).max(0.0);
        }
        mass
    }
}

/// Pearson goodness-of-fit result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square of a histogram against a density. Adjacent bins are
/// pooled until each expected count is at least 5.
pub fn chi_square_fit<F: Fn(f64) -> f64>(hist: &Histogram, pdf: F) -> Result<ChiSquareFit> {
    let n = hist.total as f64;
    let mass = hist.expected_mass(pdf);
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&c, &m) in hist.counts.iter().zip(&mass) {
        obs += c as f64;
        exp += m * n;
        if exp >= 5.0 {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => cells.push((obs, exp)),
        }
    }
    if cells.len() < 2 {
        return Err(Error::Precondition(
            "too few populated cells for a chi-square test".into(),
        ));
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(ChiSquareFit {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    })
}

/// Empirical first- and second-order statistics of a channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStats {
    pub samples: usize,
    pub mean: ComplexSample,
    /// `E|h - mean|^2`.
    pub variance: f64,
    /// Real part of the normalised lag-1 correlation `E{h[k] h*[k-1]} / var`.
    pub lag1_autocorr: f64,
    pub envelope_histogram: Histogram,
}

impl ChannelStats {
    pub fn chi_square_vs_cascaded(&self) -> Result<ChiSquareFit> {
        chi_square_fit(&self.envelope_histogram, cascaded_envelope_pdf)
    }
}

fn mean_and_variance(xs: &[ComplexSample]) -> (ComplexSample, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<ComplexSample>() / n;
    let var = xs.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / n;
    (mean, var)
}

fn envelope_histogram(xs: &[ComplexSample]) -> Histogram {
    let upper = xs.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let upper = if upper > 0.0 { upper } else { 1.0 };
    Histogram::new(xs.iter().map(|x| x.norm()), HISTOGRAM_BINS, upper)
}

fn require_samples(n: usize) -> Result<()> {
    if n < MIN_VALIDATION_SAMPLES {
        return Err(Error::Precondition(format!(
            "{n} samples supplied, at least {MIN_VALIDATION_SAMPLES} required"
        )));
    }
    Ok(())
}

/// Statistics of one contiguous sequence. The lag-1 correlation is taken
/// along the sequence.
pub fn validate_stats(samples: &[ComplexSample]) -> Result<ChannelStats> {
    require_samples(samples.len())?;
    let (mean, variance) = mean_and_variance(samples);
    let cross: ComplexSample = samples
        .windows(2)
        .map(|w| w[1] * w[0].conj())
        .sum::<ComplexSample>()
        / (samples.len() - 1) as f64;
    Ok(ChannelStats {
        samples: samples.len(),
        mean,
        variance,
        lag1_autocorr: cross.re / variance,
        envelope_histogram: envelope_histogram(samples),
    })
}

/// Consecutive pairs `(h[k-1], h[k])` drawn from independent realisations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairEnsemble {
    pub previous: Vec<ComplexSample>,
    pub current: Vec<ComplexSample>,
}

impl PairEnsemble {
    pub fn len(&self) -> usize {
        self.current.len()
    }

    pub fn is_empty(&self) -> bool {
        self.current.is_empty()
    }
}

/// Statistics over an ensemble of independent realisations. Moments and the
/// histogram use the final sample of each realisation, so every histogram
/// entry is independent; the lag-1 correlation pairs it with its predecessor.
pub fn validate_ensemble(pairs: &PairEnsemble) -> Result<ChannelStats> {
    require_samples(pairs.len())?;
    let (mean, variance) = mean_and_variance(&pairs.current);
    let cross: ComplexSample = pairs
        .current
        .iter()
        .zip(&pairs.previous)
        .map(|(c, p)| c * p.conj())
        .sum::<ComplexSample>()
        / pairs.len() as f64;
    Ok(ChannelStats {
        samples: pairs.len(),
        mean,
        variance,
        lag1_autocorr: cross.re / variance,
        envelope_histogram: envelope_histogram(&pairs.current),
    })
}

/// Runs `realizations` independent cascaded channels for `length >= 2` uses
/// each and keeps the last two samples.
pub fn sample_cascaded_ensemble(
    spec_sr: &FadingSpec,
    spec_rd: &FadingSpec,
    kind: CascadedModelKind,
    realizations: usize,
    length: usize,
    seed: u64,
) -> Result<PairEnsemble> {
    if length < 2 {
        return Err(Error::config("ensemble realisations need at least two uses"));
    }
    let mut rng = rng::stream(seed, &[0xCA5C]);
    let mut out = PairEnsemble {
        previous: Vec::with_capacity(realizations),
        current: Vec::with_capacity(realizations),
    };
    for _ in 0..realizations {
        let mut p = CascadedProcess::new(spec_sr, spec_rd, kind, &mut rng)?;
        let mut prev = p.next_sample(&mut rng).0;
        let mut cur = p.next_sample(&mut rng).0;
        for _ in 2..length {
            prev = cur;
            cur = p.next_sample(&mut rng).0;
        }
        out.previous.push(prev);
        out.current.push(cur);
    }
    Ok(out)
}

/// Single-link counterpart of [`sample_cascaded_ensemble`].
pub fn sample_fading_ensemble(
    spec: &FadingSpec,
    realizations: usize,
    length: usize,
    seed: u64,
) -> Result<PairEnsemble> {
    if length < 2 {
        return Err(Error::config("ensemble realisations need at least two uses"));
    }
    let mut rng = rng::stream(seed, &[0xFAD]);
    let mut out = PairEnsemble::default();
    for _ in 0..realizations {
        let mut p = FadingProcess::new(spec, &mut rng);
        let mut prev = p.next_sample(&mut rng);
        let mut cur = p.next_sample(&mut rng);
        for _ in 2..length {
            prev = cur;
            cur = p.next_sample(&mut rng);
        }
        out.previous.push(prev);
        out.current.push(cur);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn spec(f: f64, g: Generator) -> FadingSpec {
        FadingSpec::new(f, Lag::BlockByBlock, g).unwrap()
    }

    #[test]
    fn spec_rejects_out_of_range_doppler() {
        assert!(FadingSpec::new(0.5, Lag::BlockByBlock, Generator::Ar1).is_err());
        assert!(FadingSpec::new(-0.1, Lag::BlockByBlock, Generator::Ar1).is_err());
        assert!(FadingSpec::new(0.0, Lag::BlockByBlock, Generator::Ar1).is_ok());
    }

    #[test]
    fn static_ar1_is_constant() {
        let mut rng = stream(3, &[]);
        let h = gen_fading(&spec(0.0, Generator::Ar1), 1000, &mut rng);
        assert!(h.iter().all(|&x| x == h[0]));
    }

    #[test]
    fn static_cascade_is_constant_product() {
        for kind in [CascadedModelKind::ExactProduct, CascadedModelKind::Approximate] {
            let mut rng = stream(5, &[]);
            let s = spec(0.0, Generator::Ar1);
            let c = gen_cascaded(&s, &s, kind, 100, &mut rng).unwrap();
            assert!(c.h.iter().all(|&x| x == c.h[0]), "{kind:?}");
            assert!(c.h_rd.iter().all(|&x| x == c.h_rd[0]));
        }
    }

    #[test]
    fn symbol_by_symbol_doubles_the_lag() {
        let block = FadingSpec::new(0.01, Lag::BlockByBlock, Generator::Ar1).unwrap();
        let sym = FadingSpec::new(0.01, Lag::SymbolBySymbol, Generator::Ar1).unwrap();
        let twice = FadingSpec::new(0.02, Lag::BlockByBlock, Generator::Ar1).unwrap();
        assert_eq!(sym.autocorr(), twice.autocorr());
        assert!(sym.autocorr() < block.autocorr());
    }

    #[test]
    fn mismatched_lags_rejected() {
        let mut rng = stream(1, &[]);
        let a = FadingSpec::new(0.01, Lag::BlockByBlock, Generator::Ar1).unwrap();
        let b = FadingSpec::new(0.01, Lag::SymbolBySymbol, Generator::Ar1).unwrap();
        assert!(matches!(
            gen_cascaded(&a, &b, CascadedModelKind::ExactProduct, 10, &mut rng),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn envelope_pdf_domain() {
        assert_eq!(envelope_pdf_theoretical(0.0).unwrap(), 0.0);
        assert!(envelope_pdf_theoretical(-1e-9).is_err());
        assert!(envelope_pdf_theoretical(f64::NAN).is_err());
    }

    #[test]
    fn validators_require_enough_samples() {
        let xs = vec![ComplexSample::new(1.0, 0.0); MIN_VALIDATION_SAMPLES - 1];
        assert!(matches!(validate_stats(&xs), Err(Error::Precondition(_))));
    }

    #[test]
    fn histogram_densities_integrate_to_one() {
        let mut rng = stream(9, &[]);
        let xs: Vec<_> = (0..20_000).map(|_| complex_normal(&mut rng)).collect();
        let st = validate_stats(&xs).unwrap();
        let h = &st.envelope_histogram;
        let integral: f64 = h.densities.iter().sum::<f64>() * h.bin_width();
        assert!((integral - 1.0).abs() < 1e-6);
        assert_eq!(h.counts.len(), HISTOGRAM_BINS);
    }

    #[test]
    fn builtin_scenarios() {
        let s = Scenario::builtin("III").unwrap();
        assert_eq!((s.f_sd, s.f_sr, s.f_rd), (0.05, 0.05, 0.01));
        assert!(Scenario::builtin("IV").is_none());
        assert!(Scenario::new("x", 0.6, 0.0, 0.0).is_err());
    }

    #[test]
    fn reproducible_given_seed() {
        for g in [Generator::Ar1, Generator::SumOfSinusoids] {
            let s = spec(0.02, g);
            let a = gen_cascaded(&s, &s, CascadedModelKind::Approximate, 500, &mut stream(11, &[])).unwrap();
            let b = gen_cascaded(&s, &s, CascadedModelKind::Approximate, 500, &mut stream(11, &[])).unwrap();
            assert_eq!(a, b);
        }
    }
}
