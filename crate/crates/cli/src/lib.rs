//! Command-line front end of the D-AF relaying simulator.
//!
//! Three subcommands:
//!
//! - `sweep`: theory, error floor and (unless `--no-sim`) Monte Carlo BER
//!   over a power grid, written as CSV.
//! - `validate-channel`: statistics of the exact and approximate cascaded
//!   channel models against the double-Rayleigh envelope density.
//! - `doppler`: converts carrier, symbol period and speed into a normalised
//!   Doppler frequency.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;

use clap::{Args, Parser, Subcommand};
use config::{ChannelSettings, KeyValues, SweepSettings};
pub use error::{CliError, CliResult};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "daf", version, about = "Differential amplify-and-forward relaying simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// BER versus power: theory, error floor and simulation, as CSV.
    Sweep(SweepArgs),
    /// Cascaded-channel statistics report.
    ValidateChannel(ChannelArgs),
    /// Normalised Doppler frequency of a moving terminal.
    Doppler(DopplerArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Flat key = value configuration file; flags override it.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// I, II, III or custom (with --f-sd, --f-sr, --f-rd).
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long = "f-sd")]
    pub f_sd: Option<String>,
    #[arg(long = "f-sr")]
    pub f_sr: Option<String>,
    #[arg(long = "f-rd")]
    pub f_rd: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// sos or ar1.
    #[arg(long)]
    pub generator: Option<String>,
    /// block or symbol.
    #[arg(long)]
    pub lag: Option<String>,
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: ScenarioArgs,
    /// PSK order, 2 or 4.
    #[arg(long)]
    pub m: Option<String>,
    /// cdd, tvd, opt, a comma-separated list, or all.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Power grid in dB, START:STEP:STOP.
    #[arg(long)]
    pub pdb: Option<String>,
    /// Theory only.
    #[arg(long)]
    pub no_sim: bool,
    #[arg(long)]
    pub min_errors: Option<String>,
    #[arg(long)]
    pub max_symbols: Option<String>,
    #[arg(long)]
    pub frame_len: Option<String>,
    /// exact, approx or approx-sr.
    #[arg(long)]
    pub model: Option<String>,
    /// previous or current.
    #[arg(long)]
    pub genie: Option<String>,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[command(flatten)]
    pub common: ScenarioArgs,
    /// Independent realisations per model.
    #[arg(long)]
    pub samples: Option<String>,
}

#[derive(Debug, Args)]
pub struct DopplerArgs {
    /// Carrier frequency, Hz.
    #[arg(long, default_value_t = 2e9)]
    pub fc: f64,
    /// Symbol period, s.
    #[arg(long, default_value_t = 1e-4)]
    pub ts: f64,
    /// Speed, km/h.
    #[arg(long)]
    pub v: f64,
}

fn overrides(pairs: &[(&str, Option<&String>)]) -> KeyValues {
    let mut kv = KeyValues::default();
    for (k, v) in pairs {
        if let Some(v) = v {
            kv.set(k, v.as_str());
        }
    }
    kv
}

fn load(common: &ScenarioArgs, extra: KeyValues) -> CliResult<KeyValues> {
    let file = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            KeyValues::parse(&text)?
        }
        None => KeyValues::default(),
    };
    let mut cli = overrides(&[
        ("scenario", common.scenario.as_ref()),
        ("f_sd", common.f_sd.as_ref()),
        ("f_sr", common.f_sr.as_ref()),
        ("f_rd", common.f_rd.as_ref()),
        ("seed", common.seed.as_ref()),
        ("generator", common.generator.as_ref()),
        ("lag", common.lag.as_ref()),
    ]);
    cli.extend(extra);
    file.merged(cli)
}

/// Text the command writes and where it goes.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub path: Option<PathBuf>,
}

pub fn execute(cli: &Cli) -> CliResult<Output> {
    match &cli.command {
        Command::Sweep(a) => {
            let mut extra = overrides(&[
                ("m", a.m.as_ref()),
                ("scheme", a.scheme.as_ref()),
                ("p_db", a.pdb.as_ref()),
                ("min_bit_errors", a.min_errors.as_ref()),
                ("max_symbols", a.max_symbols.as_ref()),
                ("frame_len", a.frame_len.as_ref()),
                ("cascaded_model", a.model.as_ref()),
                ("genie_index", a.genie.as_ref()),
            ]);
            if a.no_sim {
                extra.set("no_sim", "true");
            }
            let settings = SweepSettings::from_keys(&load(&a.common, extra)?)?;
            let records = commands::sweep(&settings)?;
            Ok(Output { text: csv::render(&records), path: a.common.out.clone() })
        }
        Command::ValidateChannel(a) => {
            let extra = overrides(&[("samples", a.samples.as_ref())]);
            let settings = ChannelSettings::from_keys(&load(&a.common, extra)?)?;
            let report = commands::validate_channel(&settings)?;
            Ok(Output { text: report.render(), path: a.common.out.clone() })
        }
        Command::Doppler(a) => {
            for (name, v) in [("fc", a.fc), ("ts", a.ts), ("v", a.v)] {
                if !v.is_finite() || v < 0.0 {
                    return Err(CliError::usage(format!("--{name} must be finite and non-negative")));
                }
            }
            let f = commands::doppler(a.fc, a.ts, a.v);
            Ok(Output { text: format!("{}\n", csv::format_number(f)), path: None })
        }
    }
}

/// Parses `args`, runs the command and writes its output. Returns the exit
/// status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli).and_then(|out| match out.path {
        Some(p) => std::fs::write(&p, out.text).map_err(CliError::from),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(out.text.as_bytes()).map_err(CliError::from)
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("daf: {e}");
            e.exit_code()
        }
    }
}
