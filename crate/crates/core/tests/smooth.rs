use std::f64::consts::PI;

use thetadelay::smooth::*;
use thetadelay::ModelParams;

#[test]
fn excitable_multistability_matches_delta_model_pattern() {
    let p = ModelParams::new(-1.0, 2.0, 4.0).unwrap();
    let mut ns = Vec::new();
    for k in 1..=3 {
        let run = integrate(&p, &History::Spikes { k }, 800.0, &SmoothConfig::default()).unwrap();
        assert!(!run.spurious_pulse());
        match run.attractor {
            Attractor::Periodic { n } => ns.push(n),
            other => panic!("seed {k}: {other:?}"),
        }
    }
    assert_eq!(ns, vec![0, 1, 2]);
}

#[test]
fn period_converges_at_fourth_order() {
    let p = ModelParams::new(-1.0, 2.0, 4.0).unwrap();
    let periods: Vec<f64> = [50, 100, 200]
        .iter()
        .map(|&steps| {
            let c = SmoothConfig {
                dt: Some(4.0 / steps as f64),
                transient: Some(400.0),
                ..Default::default()
            };
            integrate(&p, &History::Spikes { k: 1 }, 600.0, &c)
                .unwrap()
                .measured_period
                .unwrap()
        })
        .collect();
    let order = ((periods[0] - periods[1]) / (periods[1] - periods[2])).log2();
    assert!(order >= 3.5, "observed order {order}");
}

#[test]
fn uncoupled_lyapunov_is_not_positive() {
    let p = ModelParams::new(1.0, 0.0, 2.9).unwrap();
    let l = lyapunov_exponent(
        &p,
        &History::Spikes { k: 1 },
        1000.0,
        &SmoothConfig::default(),
        &LyapunovConfig::default(),
    )
    .unwrap();
    assert!(!l.is_positive());
    assert!(l.exponent < 1e-3);
    assert!(!l.rest);
}

#[test]
fn rest_state_lyapunov_is_flagged() {
    let p = ModelParams::new(-1.0, 0.0, 2.0).unwrap();
    let l = lyapunov_exponent(
        &p,
        &History::Constant(-PI / 2.0),
        600.0,
        &SmoothConfig::default(),
        &LyapunovConfig::default(),
    )
    .unwrap();
    assert!(l.rest);
    // linearization at the rest state: d(θ')/dθ = 2 sin θ₋ = −2
    assert!((l.exponent + 2.0).abs() < 0.05);
}

#[test]
fn inhibitory_route_to_chaos() {
    let base = ModelParams::new(1.0, -1.0, 2.9).unwrap();
    let lconf = LyapunovConfig::default();
    let c = SmoothConfig::default();
    let h = History::Spikes { k: 1 };
    let periodic = integrate_and_classify(&base, &h, 1500.0, &c, &lconf).unwrap();
    assert!(matches!(periodic.attractor, Attractor::Periodic { .. }));
    let l = lyapunov_exponent(&base, &h, 1500.0, &c, &lconf).unwrap();
    assert!(!l.is_positive(), "{l:?}");
    let doubled =
        integrate_and_classify(&base.with_tau(3.05).unwrap(), &h, 1500.0, &c, &lconf).unwrap();
    assert_eq!(doubled.attractor, Attractor::PeriodDoubled);
    let chaotic =
        integrate_and_classify(&base.with_tau(3.3).unwrap(), &h, 2000.0, &c, &lconf).unwrap();
    assert_eq!(chaotic.attractor, Attractor::Chaotic);
    assert!(chaotic.lyapunov.unwrap().is_positive());
    for run in [&periodic, &doubled, &chaotic] {
        assert!(!run.spurious_pulse());
    }
}

#[test]
fn excitable_branch_is_lost_at_a_fold() {
    let taus: Vec<f64> = (0..=50).map(|i| 4.0 - 0.05 * i as f64).collect();
    let c = SmoothConfig {
        dt: Some(2e-3),
        ..Default::default()
    };
    let pts =
        trace_stable_branch(-1.0, 2.0, &taus, &History::Spikes { k: 2 }, 200.0, 20, &c).unwrap();
    let ends = branch_ends(&pts);
    assert_eq!(ends.len(), 1, "{pts:?}");
    let e = ends[0];
    assert_eq!(pts[e - 1].n, Some(1));
    assert_eq!(pts[e].n, Some(0));
    // along the followed branch the period shrinks with τ, as on the delta branch
    let followed: Vec<f64> = pts[..e].iter().filter_map(|p| p.period).collect();
    assert!(followed.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn oscillatory_branch_sections_are_connected() {
    let taus: Vec<f64> = (0..=64).map(|i| 0.5 + 0.25 * i as f64).collect();
    let c = SmoothConfig {
        dt: Some(2e-3),
        ..Default::default()
    };
    let pts =
        trace_stable_branch(1.0, 1.0, &taus, &History::Spikes { k: 1 }, 200.0, 20, &c).unwrap();
    let ns: Vec<usize> = pts
        .iter()
        .map(|p| p.n.expect("gap in the traced branch"))
        .collect();
    assert!(
        ns.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1),
        "{ns:?}"
    );
    assert_eq!(ns[0], 0);
    assert!(*ns.last().unwrap() >= 5);
    // the n label increases where T is near its maximum and then drops
    for e in branch_ends(&pts) {
        let before = pts[e - 1].period.unwrap();
        let after = pts[e + 1].period.unwrap();
        assert!(
            before > 2.7 && after < before,
            "switch at tau = {}",
            pts[e].tau
        );
    }
}

#[test]
fn samples_and_final_state() {
    let p = ModelParams::new(-1.0, 2.0, 4.0).unwrap();
    let c = SmoothConfig {
        sample_dt: Some(0.1),
        ..Default::default()
    };
    let run = integrate(&p, &History::Spikes { k: 1 }, 100.0, &c).unwrap();
    assert_eq!(run.samples.len(), 1001);
    assert!(run.samples.iter().all(|&(_, th)| th > -PI && th <= PI));
    // continuing from the final state reproduces the spike pattern
    let cont = integrate(
        &p,
        &run.final_state,
        100.0,
        &SmoothConfig {
            transient: Some(0.0),
            ..Default::default()
        },
    )
    .unwrap();
    let last = run.spike_times.last().unwrap() - run.t_end;
    let isi_before =
        run.spike_times[run.spike_times.len() - 1] - run.spike_times[run.spike_times.len() - 2];
    assert!((cont.spike_times[0] - (last + isi_before)).abs() < 1e-3);
}

#[test]
fn trace_lengthens_chunks_for_slow_orbits() {
    // T ≈ 5.6, so a 100-unit chunk holds fewer spikes than classification needs
    let pts = trace_stable_branch(
        1.0,
        -1.0,
        &[2.9, 2.95],
        &History::Spikes { k: 1 },
        100.0,
        5,
        &SmoothConfig::default(),
    )
    .unwrap();
    for p in &pts {
        assert_eq!(p.attractor, Attractor::Periodic { n: 0 }, "{p:?}");
        let params = ModelParams::new(1.0, -1.0, p.tau).unwrap();
        let long = integrate(
            &params,
            &History::Spikes { k: 1 },
            1000.0,
            &SmoothConfig::default(),
        )
        .unwrap();
        let want = long.measured_period.unwrap();
        assert!(
            (p.period.unwrap() - want).abs() < 1e-6 * want,
            "{p:?} vs {want}"
        );
    }
}
