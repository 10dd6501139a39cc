//! Flat `key = value` run configuration.
//!
//! ```text
//! # Scenario II, DQPSK
//! scenario = II
//! m = 4
//! scheme = cdd,tvd
//! p_db = 0:5:50
//! seed = 7
//! ```
//!
//! Command-line flags are translated into the same keys and override the
//! file. A built-in scenario and explicit `f_sd`/`f_sr`/`f_rd` given by the
//! same source conflict.

use crate::error::{CliError, CliResult};
use daf_core::channel::{CascadedModelKind, Generator, Lag, Scenario};
use daf_core::montecarlo::{DEFAULT_FRAME_LEN, DEFAULT_MAX_SYMBOLS, DEFAULT_MIN_BIT_ERRORS};
use daf_core::{GenieIndex, WeightScheme};
use std::collections::BTreeMap;

const KEYS: &[&str] = &[
    "scenario",
    "f_sd",
    "f_sr",
    "f_rd",
    "m",
    "scheme",
    "p_db",
    "seed",
    "no_sim",
    "min_bit_errors",
    "max_symbols",
    "frame_len",
    "generator",
    "cascaded_model",
    "lag",
    "genie_index",
    "samples",
];

const DOPPLER_KEYS: [&str; 3] = ["f_sd", "f_sr", "f_rd"];

/// Raw key/value pairs from one source.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("line {}: expected key = value", i + 1)))?;
            let key = k.trim().to_ascii_lowercase();
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::usage(format!("line {}: unknown key '{key}'", i + 1)));
            }
            if map.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::usage(format!("line {}: duplicate key '{key}'", i + 1)));
            }
        }
        Ok(KeyValues(map))
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key));
        self.0.insert(key.to_string(), value.into());
    }

    /// Adds every pair of `other`, replacing existing keys.
    pub fn extend(&mut self, other: KeyValues) {
        self.0.extend(other.0);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn check_scenario_conflict(&self, source: &str) -> CliResult<()> {
        let builtin = self.get("scenario").is_some_and(|s| !s.eq_ignore_ascii_case("custom"));
        if builtin && DOPPLER_KEYS.iter().any(|k| self.0.contains_key(*k)) {
            return Err(CliError::usage(format!(
                "{source}: a built-in scenario conflicts with explicit Doppler frequencies"
            )));
        }
        Ok(())
    }

    /// `overrides` wins key by key; a scenario given in `overrides` also
    /// discards the Doppler frequencies of `self`.
    pub fn merged(mut self, overrides: KeyValues) -> CliResult<KeyValues> {
        self.check_scenario_conflict("config file")?;
        overrides.check_scenario_conflict("command line")?;
        if overrides.0.contains_key("scenario") {
            for k in DOPPLER_KEYS {
                self.0.remove(k);
            }
        }
        if DOPPLER_KEYS.iter().any(|k| overrides.0.contains_key(*k))
            && !overrides.0.contains_key("scenario")
            && self.get("scenario").is_some_and(|s| !s.eq_ignore_ascii_case("custom"))
        {
            return Err(CliError::usage(
                "explicit Doppler frequencies conflict with the configured built-in scenario",
            ));
        }
        self.0.extend(overrides.0);
        Ok(self)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| CliError::usage(format!("{key}: cannot parse '{v}'")))
            })
            .transpose()
    }

    fn flag(&self, key: &str) -> CliResult<bool> {
        match self.get(key) {
            None => Ok(false),
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(CliError::usage(format!("{key}: expected true or false, got '{v}'"))),
            },
        }
    }
}

/// Everything a sweep needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub scenario: Scenario,
    pub order: usize,
    pub schemes: Vec<WeightScheme>,
    pub grid: Vec<f64>,
    pub seed: u64,
    pub simulate: bool,
    pub min_bit_errors: u64,
    pub max_symbols: u64,
    pub frame_len: usize,
    pub generator: Generator,
    pub cascaded_model: CascadedModelKind,
    pub lag: Lag,
    pub genie_index: GenieIndex,
}

/// Settings of the channel validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSettings {
    pub scenario: Scenario,
    pub samples: usize,
    pub seed: u64,
    pub generator: Generator,
    pub lag: Lag,
}

pub const DEFAULT_VALIDATION_SAMPLES: usize = 1_000_000;

fn scenario(kv: &KeyValues) -> CliResult<Scenario> {
    let name = kv.get("scenario").unwrap_or("I");
    if name.eq_ignore_ascii_case("custom") {
        let f = |k: &str| -> CliResult<f64> {
            kv.parsed::<f64>(k)?
                .ok_or_else(|| CliError::usage(format!("custom scenario needs {k}")))
        };
        return Ok(Scenario::new("custom", f("f_sd")?, f("f_sr")?, f("f_rd")?)?);
    }
    if DOPPLER_KEYS.iter().any(|k| kv.get(k).is_some()) && kv.get("scenario").is_none() {
        return Err(CliError::usage("Doppler frequencies given without scenario = custom"));
    }
    Scenario::builtin(&name.to_ascii_uppercase())
        .ok_or_else(|| CliError::usage(format!("unknown scenario '{name}' (expected I, II, III or custom)")))
}

/// `START:STEP:STOP` (inclusive), or a single value.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::usage(format!("malformed power grid '{text}' (expected START:STEP:STOP)"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    if parts.iter().any(|p| !p.is_finite()) {
        return Err(bad());
    }
    match parts[..] {
        [single] => Ok(vec![single]),
        [start, step, stop] => {
            if step <= 0.0 || stop < start {
                return Err(bad());
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if n > 10_000 {
                return Err(CliError::usage(format!("power grid '{text}' has {n} points")));
            }
            // round away accumulated binary noise such as 0.30000000000000004
            Ok((0..n)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        _ => Err(bad()),
    }
}

fn schemes(text: &str) -> CliResult<Vec<WeightScheme>> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(WeightScheme::ALL.to_vec());
    }
    let mut out: Vec<WeightScheme> = Vec::new();
    for part in text.split(',') {
        let s: WeightScheme = part.trim().parse().map_err(CliError::Usage)?;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out.sort();
    Ok(out)
}

fn generator(kv: &KeyValues, default: Generator) -> CliResult<Generator> {
    match kv.get("generator").map(str::to_ascii_lowercase).as_deref() {
        None => Ok(default),
        Some("sos") | Some("sum-of-sinusoids") => Ok(Generator::SumOfSinusoids),
        Some("ar1") => Ok(Generator::Ar1),
        Some(other) => Err(CliError::usage(format!("unknown generator '{other}' (sos or ar1)"))),
    }
}

fn lag(kv: &KeyValues) -> CliResult<Lag> {
    match kv.get("lag").map(str::to_ascii_lowercase).as_deref() {
        None | Some("block") | Some("1") => Ok(Lag::BlockByBlock),
        Some("symbol") | Some("2") => Ok(Lag::SymbolBySymbol),
        Some(other) => Err(CliError::usage(format!("unknown lag '{other}' (block or symbol)"))),
    }
}

impl SweepSettings {
    pub fn from_keys(kv: &KeyValues) -> CliResult<Self> {
        let order = kv.parsed::<usize>("m")?.unwrap_or(2);
        if order != 2 && order != 4 {
            return Err(CliError::usage(format!("m = {order}: only 2 and 4 are supported")));
        }
        let cascaded_model = match kv.get("cascaded_model").map(str::to_ascii_lowercase).as_deref() {
            None | Some("exact") => CascadedModelKind::ExactProduct,
            Some("approx") | Some("approximate") => CascadedModelKind::Approximate,
            Some("approx-sr") => CascadedModelKind::ApproximateSrTerm,
            Some(other) => {
                return Err(CliError::usage(format!(
                    "unknown cascaded model '{other}' (exact, approx or approx-sr)"
                )))
            }
        };
        let genie_index = match kv.get("genie_index").map(str::to_ascii_lowercase).as_deref() {
            None | Some("previous") => GenieIndex::Previous,
            Some("current") => GenieIndex::Current,
            Some(other) => {
                return Err(CliError::usage(format!(
                    "unknown genie index '{other}' (previous or current)"
                )))
            }
        };
        Ok(SweepSettings {
            scenario: scenario(kv)?,
            order,
            schemes: schemes(kv.get("scheme").unwrap_or("all"))?,
            grid: parse_grid(kv.get("p_db").unwrap_or("0:5:50"))?,
            seed: kv.parsed("seed")?.unwrap_or(0),
            simulate: !kv.flag("no_sim")?,
            min_bit_errors: kv.parsed("min_bit_errors")?.unwrap_or(DEFAULT_MIN_BIT_ERRORS),
            max_symbols: kv.parsed("max_symbols")?.unwrap_or(DEFAULT_MAX_SYMBOLS),
            frame_len: kv.parsed("frame_len")?.unwrap_or(DEFAULT_FRAME_LEN),
            generator: generator(kv, Generator::SumOfSinusoids)?,
            cascaded_model,
            lag: lag(kv)?,
            genie_index,
        })
    }
}

impl ChannelSettings {
    pub fn from_keys(kv: &KeyValues) -> CliResult<Self> {
        let samples = kv.parsed("samples")?.unwrap_or(DEFAULT_VALIDATION_SAMPLES);
        if samples < daf_core::channel::MIN_VALIDATION_SAMPLES {
            return Err(CliError::usage(format!(
                "{samples} samples requested, at least {} required",
                daf_core::channel::MIN_VALIDATION_SAMPLES
            )));
        }
        Ok(ChannelSettings {
            scenario: scenario(kv)?,
            samples,
            seed: kv.parsed("seed")?.unwrap_or(0),
            generator: generator(kv, Generator::Ar1)?,
            lag: lag(kv)?,
        })
    }
}
