use daf_cli::csv::{format_number, HEADER};
use daf_core::analysis::pep_point;
use daf_core::channel::{Lag, Scenario};
use daf_core::Constellation;
use std::process::{Command, Output};

fn daf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_daf")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn theory_only_sweep() {
    let o = daf(&["sweep", "--scenario", "III", "--m", "4", "--pdb", "0:10:50", "--no-sim"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some(HEADER));
    let rows = rows(&text);
    assert_eq!(rows.len(), 6 * 3);
    let c = Constellation::new(4).unwrap();
    let (a_sd, a) = Scenario::builtin("III").unwrap().alphas(Lag::BlockByBlock);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.len(), 9);
        let p_db = (i / 3 * 10) as f64;
        assert_eq!(r[0], format_number(p_db));
        assert_eq!(r[1], "III");
        assert_eq!(r[2], ["cdd", "tvd", "opt"][i % 3]);
        assert_eq!(r[3], "4");
        assert!(r[4].is_empty() && r[5].is_empty() && r[8].is_empty());
        let pt = pep_point(p_db, a_sd, a, &c).unwrap();
        assert_eq!(r[6], format_number(pt.ber));
        assert_eq!(r[7], format_number(pt.floor_ber(4)));
    }
}

#[test]
fn simulated_sweep_fills_every_column() {
    let o = daf(&["sweep", "--scenario", "II", "--scheme", "tvd,cdd", "--pdb", "5", "--seed", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][2].as_str(), rows[1][2].as_str()), ("cdd", "tvd"));
    for r in &rows {
        assert!(r.iter().all(|f| !f.is_empty()));
        assert_eq!(r[8], "false");
        let (sim, ci, th): (f64, f64, f64) = (r[4].parse().unwrap(), r[5].parse().unwrap(), r[6].parse().unwrap());
        assert!((sim - th).abs() < 4.0 * ci + 0.2 * th, "{r:?}");
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# fast relay\nscenario = custom\nf_sd = 0.02\nf_sr = 0.02\nf_rd = 0.005\nm = 4\np_db = 10:10:30\nno_sim = true\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let o = daf(&["sweep", "--config", cfg, "--scheme", "tvd"]);
    assert_eq!(o.status.code(), Some(0));
    let got = rows(&stdout(&o));
    assert_eq!(got.len(), 3);
    assert!(got.iter().all(|r| r[1] == "custom" && r[3] == "4"));

    let out = dir.path().join("out.csv");
    let o = daf(&["sweep", "--config", cfg, "--scenario", "I", "--m", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let got = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(got.len(), 9);
    assert!(got.iter().all(|r| r[1] == "I" && r[3] == "2"));
}

#[test]
fn usage_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = dir.path().join("bad.cfg");
    std::fs::write(&bad_key, "scenario = I\ncolour = blue\n").unwrap();
    let conflict = dir.path().join("conflict.cfg");
    std::fs::write(&conflict, "scenario = II\nf_sd = 0.1\n").unwrap();
    let missing = dir.path().join("missing.cfg");
    let unwritable = dir.path().join("no/such/dir/out.csv");

    for args in [
        vec!["sweep", "--scenario", "IV"],
        vec!["sweep", "--pdb", "0:5"],
        vec!["sweep", "--pdb", "10:5:0"],
        vec!["sweep", "--m", "8"],
        vec!["sweep", "--scheme", "mrc"],
        vec!["sweep", "--scenario", "I", "--f-sd", "0.2"],
        vec!["sweep", "--scenario", "custom", "--f-sd", "0.2"],
        vec!["sweep", "--scenario", "custom", "--f-sd", "0.7", "--f-sr", "0", "--f-rd", "0"],
        vec!["sweep", "--config", bad_key.to_str().unwrap()],
        vec!["sweep", "--config", conflict.to_str().unwrap()],
        vec!["sweep", "--config", missing.to_str().unwrap()],
        vec!["sweep", "--no-sim", "--out", unwritable.to_str().unwrap()],
        vec!["sweep", "--bogus-flag"],
        vec!["frobnicate"],
        vec!["validate-channel", "--samples", "9999"],
        vec!["doppler", "--v", "-5"],
    ] {
        let o = daf(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn doppler_conversion() {
    let f = |v: &str| -> f64 { stdout(&daf(&["doppler", "--fc", "2e9", "--ts", "1e-4", "--v", v])).trim().parse().unwrap() };
    assert!((f("5") - 0.00093).abs() < 1e-5);
    assert!((f("54") - 0.01).abs() < 1e-12);
    assert!((f("270") - 0.05).abs() < 1e-12);
    assert_eq!(f("0"), 0.0);
}

#[test]
fn channel_report() {
    let o = daf(&["validate-channel", "--scenario", "I", "--samples", "200000", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let value = |key: &str| -> Vec<String> {
        text.lines()
            .filter_map(|l| l.strip_prefix(key))
            .map(|v| v.trim().to_string())
            .collect()
    };
    let want = testkit::j0_series_exact(2.0 * std::f64::consts::PI * 0.001).powi(2);
    for lag1 in value("lag1_autocorr:") {
        assert!((lag1.parse::<f64>().unwrap() - want).abs() < 0.01);
    }
    assert_eq!(value("[exact]").len() + value("[approximate]").len(), 2);
    assert_eq!(value("bins_within_3ci:"), vec!["50/50".to_string()]);
    let cross: f64 = value("rayleigh_crossover:")[0].parse().unwrap();
    assert!(cross > 0.0 && cross < 1.0);

    let table: Vec<Vec<f64>> = text
        .lines()
        .skip_while(|l| !l.starts_with("bin,"))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(table.len(), 50);
    // the cascaded density dominates the Rayleigh one near the origin
    assert!(table[0][4] > table[0][5]);
    assert!(table[0][1] > table[0][5]);
}
