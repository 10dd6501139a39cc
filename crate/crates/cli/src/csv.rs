//! Sweep records and their CSV rendering.

use daf_core::WeightScheme;
use std::fmt::Write;

pub const HEADER: &str = "p_db,scenario,scheme,m,ber_sim,ci95,ber_theory,ber_floor,truncated";

/// One output row. Absent values are written as empty fields.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    pub p_db: f64,
    pub scenario: String,
    pub scheme: WeightScheme,
    pub m: usize,
    pub ber_sim: Option<f64>,
    pub ci95: Option<f64>,
    pub ber_theory: Option<f64>,
    pub ber_floor: Option<f64>,
    pub truncated: Option<bool>,
}

/// Rounds to 6 significant digits and prints the shortest representation of
/// the rounded value; scientific notation outside `[1e-4, 1e6)`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.5e}").parse().expect("float round trip");
    let mag = rounded.abs();
    if (1e-4..1e6).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn field(out: &mut String, v: Option<f64>) {
    out.push(',');
    if let Some(v) = v {
        out.push_str(&format_number(v));
    }
}

impl OutputRecord {
    pub fn to_csv_line(&self) -> String {
        let mut s = format_number(self.p_db);
        write!(s, ",{},{},{}", self.scenario, self.scheme.as_str(), self.m).unwrap();
        field(&mut s, self.ber_sim);
        field(&mut s, self.ci95);
        field(&mut s, self.ber_theory);
        field(&mut s, self.ber_floor);
        s.push(',');
        if let Some(t) = self.truncated {
            s.push_str(if t { "true" } else { "false" });
        }
        s
    }
}

pub fn render(records: &[OutputRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(25.0), "25");
        assert_eq!(format_number(2.5), "2.5");
        assert_eq!(format_number(0.1234564), "0.123456");
        assert_eq!(format_number(0.12345678), "0.123457");
        assert_eq!(format_number(4.64804123e-4), "0.000464804");
        assert_eq!(format_number(7.3726049e-7), "7.3726e-7");
        assert_eq!(format_number(1.0e-5), "1e-5");
        assert_eq!(format_number(-3.0), "-3");
        assert_eq!(format_number(1234567.0), "1.23457e6");
    }

    #[test]
    fn six_digit_rounding_is_idempotent() {
        for v in [0.29581234, 1.8551e-5, 3.97812e-2, 0.5, 123.456789] {
            let once = format_number(v);
            assert_eq!(format_number(once.parse().unwrap()), once);
            assert!(((once.parse::<f64>().unwrap() - v) / v).abs() < 5e-6);
        }
    }

    #[test]
    fn empty_fields() {
        let r = OutputRecord {
            p_db: 10.0,
            scenario: "II".into(),
            scheme: WeightScheme::Tvd,
            m: 4,
            ber_sim: None,
            ci95: None,
            ber_theory: Some(0.01),
            ber_floor: None,
            truncated: None,
        };
        assert_eq!(r.to_csv_line(), "10,II,tvd,4,,,0.01,,");
        let r = OutputRecord { ber_sim: Some(0.02), ci95: Some(1e-3), truncated: Some(false), ..r };
        assert_eq!(r.to_csv_line(), "10,II,tvd,4,0.02,0.001,0.01,,false");
    }
}
