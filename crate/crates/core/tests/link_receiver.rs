use daf_core::channel::{gen_cascaded, gen_fading, CascadedChannel, CascadedModelKind, FadingSpec, Generator, Lag, Scenario};
use daf_core::link::*;
use daf_core::receiver::*;
use daf_core::rng::stream;
use daf_core::ComplexSample;
use proptest::prelude::*;
use rand::Rng;

fn cs(re: f64, im: f64) -> ComplexSample {
    ComplexSample::new(re, im)
}

#[test]
fn diff_encode_examples() {
    let b = Constellation::new(2).unwrap();
    assert_eq!(diff_encode(&[0, 0, 0], &b).unwrap(), vec![cs(1.0, 0.0); 4]);
    assert_eq!(
        diff_encode(&[1, 1], &b).unwrap(),
        vec![cs(1.0, 0.0), cs(-1.0, 0.0), cs(1.0, 0.0)]
    );
    // j * (-1) * (-j) multiplied out step by step
    let q = Constellation::new(4).unwrap();
    let s = diff_encode(&[1, 2, 3], &q).unwrap();
    let mut want = vec![cs(1.0, 0.0)];
    for &v in &[1usize, 2, 3] {
        let prev = *want.last().unwrap();
        want.push(prev * q.symbol(v));
    }
    for (a, b) in s.iter().zip(&want) {
        assert!((a - b).norm() < 1e-15);
    }
    assert!(diff_encode(&[4], &q).is_err());
}

#[test]
fn unit_modulus_everywhere() {
    let mut rng = stream(1, &[]);
    for m in [2, 4, 8, 16] {
        let c = Constellation::new(m).unwrap();
        let data: Vec<usize> = (0..1000).map(|_| rng.random_range(0..m)).collect();
        for s in diff_encode(&data, &c).unwrap() {
            assert!((s.norm() - 1.0).abs() < 1e-15);
        }
    }
}

#[test]
fn average_relay_power_is_p1() {
    let sc = Scenario::new("x", 0.01, 0.01, 0.01).unwrap();
    let power = PowerAllocation::new(20.0, 30.0).unwrap();
    let c = Constellation::new(4).unwrap();
    let mut rng = stream(2, &[]);
    let (mut acc, mut n) = (0.0, 0usize);
    for _ in 0..100 {
        let data: Vec<usize> = (0..4999).map(|_| rng.random_range(0..4)).collect();
        let s = diff_encode(&data, &c).unwrap();
        let h_sd = gen_fading(&sc.spec_sd(Lag::BlockByBlock, Generator::Ar1), s.len(), &mut rng);
        let relay = gen_cascaded(
            &sc.spec_sr(Lag::BlockByBlock, Generator::Ar1),
            &sc.spec_rd(Lag::BlockByBlock, Generator::Ar1),
            CascadedModelKind::ExactProduct,
            s.len(),
            &mut rng,
        )
        .unwrap();
        let obs = transmit(
            &s,
            &phase_indices(&data, 4),
            LinkChannels { h_sd: &h_sd, relay: &relay },
            &power,
            Noise::Awgn,
            &mut rng,
        )
        .unwrap();
        // E|y_rd|^2 = A^2 (P0 + 1) E|h_rd|^2 + 1 = P1 + 1
        acc += obs.y_rd.iter().map(|y| y.norm_sqr()).sum::<f64>();
        n += obs.len();
    }
    let relay_power = acc / n as f64 - 1.0;
    assert!((relay_power / 30.0 - 1.0).abs() < 0.02, "{relay_power}");
}

#[test]
fn forwarded_noise_variance_given_h_rd() {
    let n = 100_000;
    let power = PowerAllocation::new(1.0, 2.0).unwrap();
    assert!((power.amplification - 1.0).abs() < 1e-15);
    let relay = CascadedChannel {
        h: vec![ComplexSample::default(); n],
        h_rd: vec![cs(1.0, 0.0); n],
    };
    let h_sd = vec![ComplexSample::default(); n];
    let s = vec![cs(1.0, 0.0); n];
    let obs = transmit(
        &s,
        &vec![0; n],
        LinkChannels { h_sd: &h_sd, relay: &relay },
        &power,
        Noise::Awgn,
        &mut stream(3, &[]),
    )
    .unwrap();
    let var = obs.y_rd.iter().map(|y| y.norm_sqr()).sum::<f64>() / n as f64;
    assert!((var - 2.0).abs() < 0.05, "{var}");
}

#[test]
fn noiseless_static_observations() {
    let n = 50;
    let c = Constellation::new(4).unwrap();
    let mut rng = stream(4, &[]);
    let data: Vec<usize> = (0..n - 1).map(|_| rng.random_range(0..4)).collect();
    let s = diff_encode(&data, &c).unwrap();
    let st = FadingSpec::new(0.0, Lag::BlockByBlock, Generator::Ar1).unwrap();
    let h_sd = gen_fading(&st, n, &mut rng);
    let relay = gen_cascaded(&st, &st, CascadedModelKind::ExactProduct, n, &mut rng).unwrap();
    let power = PowerAllocation::new(1.0, 2.0).unwrap();
    let obs = transmit(
        &s,
        &phase_indices(&data, 4),
        LinkChannels { h_sd: &h_sd, relay: &relay },
        &power,
        Noise::Disabled,
        &mut rng,
    )
    .unwrap();
    for k in 0..n {
        assert!((obs.y_sd[k] - h_sd[0] * s[k]).norm() < 1e-12);
        assert!((obs.y_rd[k] - relay.h[0] * s[k]).norm() < 1e-12);
    }
}

#[test]
fn noiseless_static_round_trip_has_no_errors() {
    let n = 2000;
    let st = FadingSpec::new(0.0, Lag::BlockByBlock, Generator::Ar1).unwrap();
    for m in [2, 4, 8] {
        let c = Constellation::new(m).unwrap();
        for scheme in WeightScheme::ALL {
            let mut rng = stream(5, &[m as u64]);
            let labels: Vec<usize> = (0..n - 1).map(|_| rng.random_range(0..m)).collect();
            let data: Vec<usize> = labels.iter().map(|&b| c.index_of(b)).collect();
            let s = diff_encode(&data, &c).unwrap();
            let h_sd = gen_fading(&st, n, &mut rng);
            let relay = gen_cascaded(&st, &st, CascadedModelKind::ExactProduct, n, &mut rng).unwrap();
            let power = PowerAllocation::equal_db(20.0).unwrap();
            let obs = transmit(
                &s,
                &phase_indices(&data, m),
                LinkChannels { h_sd: &h_sd, relay: &relay },
                &power,
                Noise::Disabled,
                &mut rng,
            )
            .unwrap();
            let rx = Receiver {
                scheme,
                alpha_sd: 1.0,
                alpha: 1.0,
                p0: power.source,
                amplification: power.amplification,
                genie_index: GenieIndex::Previous,
            };
            let detected = rx.detect_frame(&obs, &c);
            let bits: Vec<usize> = detected.iter().map(|&d| c.bits_of(d)).collect();
            assert_eq!(bits, labels, "M={m} {scheme}");
        }
    }
}

#[test]
fn genie_weights_against_hand_evaluation() {
    let sc = Scenario::builtin("III").unwrap();
    let (a_sd, a) = sc.alphas(Lag::BlockByBlock);
    let p0 = 50.0;
    let amp = (50.0f64 / 51.0).sqrt();
    let h = cs(0.6, -0.3);
    let w = weights_opt_genie(a_sd, a, p0, amp, h);
    let g = amp * amp * (0.36 + 0.09);
    let sigma2 = g + 1.0;
    let rho = g * p0 / sigma2;
    let var_sd = 1.0 + a_sd * a_sd + (1.0 - a_sd * a_sd) * p0;
    let var_rd = sigma2 * (1.0 + a * a + (1.0 - a * a) * rho);
    assert!((w.b0 - a_sd / var_sd).abs() < 1e-15);
    assert!((w.b1 - a / var_rd).abs() < 1e-15);
    let nv = noise_variances(a_sd, a, p0, amp, h);
    assert!(nv.sigma_n_sd_sq >= 1.0 && nv.sigma_n_rd_sq >= 1.0);
}

#[test]
fn tvd_continuity_towards_static_channels() {
    let a = 1.0 - 1e-12;
    for (p0, amp) in [(1.0, 0.7), (50.0, (50.0f64 / 51.0).sqrt()), (100.0, 1.0)] {
        let t = weights_tvd(a, a, p0, amp);
        let c = weights_cdd(amp);
        assert!((t.b0 - c.b0).abs() < 1e-9 && (t.b1 - c.b1).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn detection_is_scale_invariant(re in -10.0f64..10.0, im in -10.0f64..10.0, c in 1e-6f64..1e6, m in prop::sample::select(vec![2usize, 4, 8, 16])) {
        let k = Constellation::new(m).unwrap();
        let z = cs(re, im);
        prop_assert_eq!(detect(z * c, &k), detect(z, &k));
    }

    #[test]
    fn detection_is_minimum_distance(re in -3.0f64..3.0, im in -3.0f64..3.0, m in prop::sample::select(vec![2usize, 4, 8])) {
        let k = Constellation::new(m).unwrap();
        let z = cs(re, im);
        let d = detect(z, &k);
        let best = k.symbols().iter().map(|v| (z - v).norm_sqr()).fold(f64::INFINITY, f64::min);
        prop_assert!(((z - k.symbol(d)).norm_sqr() - best).abs() < 1e-12);
    }

    #[test]
    fn scaled_weights_leave_decisions_unchanged(b0 in 1e-3f64..1.0, b1 in 1e-3f64..1.0, c in 1e-3f64..1e3,
        y in prop::array::uniform8(-2.0f64..2.0)) {
        let k = Constellation::new(4).unwrap();
        let w = CombinerWeights { scheme: WeightScheme::Cdd, b0, b1 };
        let sd = (cs(y[0], y[1]), cs(y[2], y[3]));
        let rd = (cs(y[4], y[5]), cs(y[6], y[7]));
        prop_assert_eq!(detect(combine(sd, rd, &w.scaled(c)), &k), detect(combine(sd, rd, &w), &k));
    }

    #[test]
    fn tvd_direct_weight_decreases_with_power(a_sd in 0.5f64..0.999_999, p0 in 0.01f64..1e6, amp in 0.1f64..2.0) {
        let lo = weights_tvd(a_sd, 0.9, p0, amp).b0;
        let hi = weights_tvd(a_sd, 0.9, p0 * 1.5, amp).b0;
        prop_assert!(hi < lo);
        let s1 = weights_tvd(1.0, 0.9, p0, amp).b0;
        let s2 = weights_tvd(1.0, 0.9, p0 * 1.5, amp).b0;
        prop_assert_eq!(s1, s2);
    }
}
