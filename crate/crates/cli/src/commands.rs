use crate::config::{ChannelSettings, SweepSettings};
use crate::csv::{format_number, OutputRecord};
use crate::error::CliResult;
use daf_core::analysis::pep_point;
use daf_core::channel::{
    envelope_pdf_theoretical, rayleigh_envelope_pdf, sample_cascaded_ensemble, validate_ensemble,
    CascadedModelKind, ChannelStats, Histogram, PairEnsemble,
};
use daf_core::montecarlo::{run_sweep, RunConfig};
use daf_core::Constellation;
use std::fmt::Write;

/// Speed of light used by the Doppler conversion, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Normalised Doppler frequency `f_D T_s` of a terminal moving at `v_kmh`.
pub fn doppler(carrier_hz: f64, symbol_period_s: f64, v_kmh: f64) -> f64 {
    v_kmh / 3.6 * carrier_hz / SPEED_OF_LIGHT * symbol_period_s
}

/// Theory and (optionally) simulation for every grid point and scheme,
/// ordered by power, then scheme.
pub fn sweep(s: &SweepSettings) -> CliResult<Vec<OutputRecord>> {
    let constellation = Constellation::new(s.order)?;
    let (alpha_sd, alpha) = s.scenario.alphas(s.lag);

    let theory = s
        .grid
        .iter()
        .map(|&p| pep_point(p, alpha_sd, alpha, &constellation))
        .collect::<Result<Vec<_>, _>>()?;

    let mut sims = Vec::new();
    if s.simulate {
        for &scheme in &s.schemes {
            let cfg = RunConfig {
                min_bit_errors: s.min_bit_errors,
                max_symbols: s.max_symbols,
                frame_len: s.frame_len,
                master_seed: s.seed,
                generator: s.generator,
                cascaded_model: s.cascaded_model,
                lag: s.lag,
                genie_index: s.genie_index,
                ..RunConfig::new(s.scenario.clone(), s.order, scheme, s.grid.clone())
            };
            sims.push(run_sweep(&cfg)?);
        }
    }

    let mut out = Vec::with_capacity(s.grid.len() * s.schemes.len());
    for (i, (&p_db, th)) in s.grid.iter().zip(&theory).enumerate() {
        for (j, &scheme) in s.schemes.iter().enumerate() {
            let sim = sims.get(j).map(|v| &v[i]);
            out.push(OutputRecord {
                p_db,
                scenario: s.scenario.name.clone(),
                scheme,
                m: s.order,
                ber_sim: sim.map(|e| e.ber),
                ci95: sim.map(|e| e.ci95_halfwidth),
                ber_theory: Some(th.ber),
                ber_floor: Some(th.floor_ber(s.order)),
                truncated: sim.map(|e| e.truncated),
            });
        }
    }
    Ok(out)
}

/// Uses per realisation in the validation ensembles.
pub const VALIDATION_LENGTH: usize = 10;

/// Bins of the comparison table.
pub const TABLE_BINS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelReport {
    pub model: CascadedModelKind,
    pub stats: ChannelStats,
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub center: f64,
    pub exact: f64,
    pub approximate: f64,
    /// 95% half-width of `exact - approximate`.
    pub ci95: f64,
    pub pdf_cascaded: f64,
    pub pdf_rayleigh: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelReport {
    pub scenario: String,
    pub samples: usize,
    pub expected_lag1: f64,
    pub models: Vec<ModelReport>,
    pub table: Vec<TableRow>,
    /// Bins whose exact/approximate densities differ by at most 3 CI widths.
    pub bins_within_3ci: usize,
    /// First envelope value where the Rayleigh density overtakes the
    /// cascaded one.
    pub rayleigh_crossover: Option<f64>,
}

fn density_ci(count: u64, total: u64, width: f64) -> f64 {
    let p = count as f64 / total as f64;
    1.96 * (p * (1.0 - p) / total as f64).sqrt() / width
}

pub fn validate_channel(s: &ChannelSettings) -> CliResult<ChannelReport> {
    let sr = s.scenario.spec_sr(s.lag, s.generator);
    let rd = s.scenario.spec_rd(s.lag, s.generator);
    let expected_lag1 = s.scenario.alphas(s.lag).1;

    let kinds = [CascadedModelKind::ExactProduct, CascadedModelKind::Approximate];
    let mut ensembles: Vec<PairEnsemble> = Vec::new();
    let mut models = Vec::new();
    for (i, kind) in kinds.into_iter().enumerate() {
        let e = sample_cascaded_ensemble(&sr, &rd, kind, s.samples, VALIDATION_LENGTH, s.seed.wrapping_add(i as u64))?;
        let stats = validate_ensemble(&e)?;
        let fit = stats.chi_square_vs_cascaded()?;
        models.push(ModelReport {
            model: kind,
            stats,
            chi_square: fit.statistic,
            dof: fit.dof,
            p_value: fit.p_value,
        });
        ensembles.push(e);
    }

    let upper = ensembles
        .iter()
        .flat_map(|e| e.current.iter().map(|h| h.norm()))
        .fold(0.0, f64::max);
    let hist = |e: &PairEnsemble| Histogram::new(e.current.iter().map(|h| h.norm()), TABLE_BINS, upper);
    let (he, ha) = (hist(&ensembles[0]), hist(&ensembles[1]));
    let w = he.bin_width();
    let mut table = Vec::with_capacity(TABLE_BINS);
    let mut bins_within_3ci = 0;
    for (b, center) in he.centers().enumerate() {
        let ci = density_ci(he.counts[b], he.total, w).hypot(density_ci(ha.counts[b], ha.total, w));
        if (he.densities[b] - ha.densities[b]).abs() <= 3.0 * ci {
            bins_within_3ci += 1;
        }
        table.push(TableRow {
            center,
            exact: he.densities[b],
            approximate: ha.densities[b],
            ci95: ci,
            pdf_cascaded: envelope_pdf_theoretical(center)?,
            pdf_rayleigh: rayleigh_envelope_pdf(center),
        });
    }
    let rayleigh_crossover = rayleigh_crossover(upper.max(3.0));

    Ok(ChannelReport {
        scenario: s.scenario.name.clone(),
        samples: s.samples,
        expected_lag1,
        models,
        table,
        bins_within_3ci,
        rayleigh_crossover,
    })
}

/// Bisection on `pdf_rayleigh - pdf_cascaded`, which is negative just above
/// zero and changes sign once before the densities' common tail.
fn rayleigh_crossover(upper: f64) -> Option<f64> {
    let g = |x: f64| rayleigh_envelope_pdf(x) - envelope_pdf_theoretical(x).unwrap_or(f64::NAN);
    let steps = 1000;
    let mut lo = upper / steps as f64;
    let g0 = g(lo);
    if g0.is_nan() || g0 >= 0.0 {
        return None;
    }
    let mut hi = (1..=steps).map(|i| i as f64 * upper / steps as f64).find(|&x| g(x) > 0.0)?;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn model_name(kind: CascadedModelKind) -> &'static str {
    match kind {
        CascadedModelKind::ExactProduct => "exact",
        CascadedModelKind::Approximate => "approximate",
        CascadedModelKind::ApproximateSrTerm => "approximate-sr",
    }
}

impl ChannelReport {
    pub fn render(&self) -> String {
        let f = format_number;
        let mut s = String::new();
        writeln!(s, "scenario: {}", self.scenario).unwrap();
        writeln!(s, "samples: {}", self.samples).unwrap();
        writeln!(s, "expected_lag1: {}", f(self.expected_lag1)).unwrap();
        for m in &self.models {
            let st = &m.stats;
            writeln!(s, "[{}]", model_name(m.model)).unwrap();
            writeln!(s, "mean: {} {}", f(st.mean.re), f(st.mean.im)).unwrap();
            writeln!(s, "variance: {}", f(st.variance)).unwrap();
            writeln!(s, "lag1_autocorr: {}", f(st.lag1_autocorr)).unwrap();
            writeln!(s, "chi_square: {} dof {} p_value {}", f(m.chi_square), m.dof, f(m.p_value)).unwrap();
        }
        writeln!(s, "bins_within_3ci: {}/{}", self.bins_within_3ci, self.table.len()).unwrap();
        match self.rayleigh_crossover {
            Some(x) => writeln!(s, "rayleigh_crossover: {}", f(x)).unwrap(),
            None => writeln!(s, "rayleigh_crossover:").unwrap(),
        }
        writeln!(s, "bin,density_exact,density_approximate,ci95,pdf_cascaded,pdf_rayleigh").unwrap();
        for r in &self.table {
            writeln!(
                s,
                "{},{},{},{},{},{}",
                f(r.center),
                f(r.exact),
                f(r.approximate),
                f(r.ci95),
                f(r.pdf_cascaded),
                f(r.pdf_rayleigh)
            )
            .unwrap();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doppler_examples() {
        assert!((doppler(2e9, 1e-4, 5.0) - 0.000926).abs() < 1e-6);
        assert!((doppler(2e9, 1e-4, 270.0) - 0.05).abs() < 1e-12);
        assert_eq!(doppler(2e9, 1e-4, 0.0), 0.0);
    }

    #[test]
    fn crossover_is_where_densities_meet() {
        let x = rayleigh_crossover(5.0).unwrap();
        let c = envelope_pdf_theoretical(x).unwrap();
        assert!((rayleigh_envelope_pdf(x) - c).abs() < 1e-9);
        assert!(x > 0.1 && x < 1.0);
    }
}
