//! End-to-end acceptance checks, one line of output per criterion.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::Complex;
use thetadelay::branch::stable_solution;
use thetadelay::event_sim::{measure_period, perturbation_decay_rate, simulate, InitialHistory};
use thetadelay::excitable::{
    homoclinic_tau, min_period, primary_branch_slope, primary_branch_t, saddle_node_point,
    superstable_point,
};
use thetadelay::model::acot;
use thetadelay::oscillatory::{
    branch_parametric_pos, cusp_point, existence_residual as residual_pos, rotate_branch,
    superstable_point_pos, Coupling,
};
use thetadelay::smooth::{
    integrate, integrate_and_classify, Attractor, History, LyapunovConfig, SmoothConfig,
};
use thetadelay::stability::{g_roots, jacobian, jacobian_eigenvalues, UNIT_CIRCLE_TOL};
use thetadelay::{ModelParams, StabilitySpectrum};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(
        elapsed < limit,
        format!("took {elapsed:?}, limit {limit:?}"),
    )
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let neg = f(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn match_roots(reference: &[Complex<f64>], candidate: &[Complex<f64>]) -> f64 {
    let mut used = vec![false; candidate.len()];
    let mut worst = 0.0f64;
    for r in reference {
        let (j, d) = candidate
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, z)| (j, (z - r).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn homoclinic_value() -> Check {
    let start = Instant::now();
    let tau = homoclinic_tau(5.0).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure((tau - 0.25541).abs() < 1e-4, format!("tau* = {tau}"))?;
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!("tau* = {tau:.6}"))
}

fn superstable_geometry() -> Check {
    let kappa = 5.0;
    let tau_star = homoclinic_tau(kappa).unwrap();
    // minimum of the primary branch: zero of dT/dτ
    let s = bisect(|t| primary_branch_slope(t, kappa), tau_star + 1e-6, 5.0);
    let t = primary_branch_t(s, kappa).unwrap();
    ensure(
        (s - 0.42365).abs() < 1e-4 && (t - 0.8473).abs() < 1e-4,
        format!("primary minimum ({s}, {t})"),
    )?;
    let t_bar = min_period(kappa).unwrap();
    for n in 1..=4 {
        let nf = n as f64;
        let (tau, period) = (s + nf * t, t);
        let expected = ((2.0 * nf + 1.0) * t_bar / 2.0, t_bar);
        ensure(
            (tau - expected.0).abs() < 1e-8 && (period - expected.1).abs() < 1e-8,
            format!("n = {n}: minimum ({tau}, {period}), expected {expected:?}"),
        )?;
        let formula = superstable_point(n, kappa).unwrap();
        ensure(
            (formula.0 - tau).abs() < 1e-8,
            format!("n = {n}: superstable_point {formula:?}"),
        )?;
    }
    Ok(format!(
        "primary minimum ({s:.5}, {t:.5}); n = 1..4 minima at ((2n+1)T/2, T), T = {t_bar:.6}"
    ))
}

fn fold_limit() -> Check {
    let start = Instant::now();
    let periods: Vec<f64> = (1..=100)
        .map(|n| saddle_node_point(n, 5.0).unwrap().period)
        .collect();
    let elapsed = start.elapsed();
    let t_bar = 2.0 * thetadelay::model::acoth(2.5);
    ensure(
        periods.windows(2).all(|w| w[1] < w[0] && w[1] > t_bar),
        "fold periods not monotone towards T",
    )?;
    let gap = periods[99] - t_bar;
    ensure(gap.abs() < 1e-3, format!("|T(100) - T| = {gap}"))?;
    within(elapsed, Duration::from_millis(10))?;
    Ok(format!("T(1) = {:.6}, T(100) - T = {gap:.2e}", periods[0]))
}

fn spectral_cross_check() -> Check {
    let mut worst = 0.0f64;
    for n in 0..=10usize {
        let mut gammas = vec![0.1, 0.5, 1.0, 1.2, 2.0];
        if n > 0 {
            gammas.push((n as f64 + 1.0) / n as f64);
        }
        for gamma in gammas {
            let d = match_roots(
                &g_roots(n, gamma),
                &jacobian_eigenvalues(&jacobian(n, gamma)),
            );
            ensure(d < 1e-10, format!("n = {n}, gamma = {gamma}: mismatch {d}"))?;
            worst = worst.max(d);
        }
        let m = (n + 1) as f64;
        let unity: Vec<Complex<f64>> = (0..=n)
            .map(|k| Complex::from_polar(1.0, 2.0 * PI * k as f64 / m))
            .collect();
        ensure(
            match_roots(&unity, &g_roots(n, 0.0)) < 1e-10,
            format!("n = {n}: gamma = 0 roots"),
        )?;
        ensure(
            match_roots(&unity, &jacobian_eigenvalues(&jacobian(n, 0.0))) < 1e-10,
            format!("n = {n}: gamma = 0 J"),
        )?;
        let zero_g = g_roots(n, 1.0)[1..].iter().all(|z| z.norm() < 1e-10);
        let zero_j = jacobian_eigenvalues(&jacobian(n, 1.0))[1..]
            .iter()
            .all(|z| z.norm() < 1e-10);
        ensure(
            zero_g && zero_j,
            format!("n = {n}: gamma = 1 is not an n-fold zero"),
        )?;
    }
    Ok(format!("largest J vs g mismatch {worst:.1e}"))
}

fn exit_through_plus_one() -> Check {
    let mut failures = Vec::new();
    let mut speeds = Vec::new();
    for n in 1..=8usize {
        let nf = n as f64;
        let fold = (nf + 1.0) / nf;
        let excess = |g: f64| {
            StabilitySpectrum::compute(n, g)
                .unwrap()
                .max_nontrivial_modulus()
                - 1.0
        };
        let exit = bisect(excess, fold - 0.1, fold + 0.1);
        ensure(
            (exit - fold).abs() < 1e-8,
            format!("n = {n}: exit at gamma = {exit}"),
        )?;
        let real_root = |g: f64| {
            g_roots(n, g)[1..]
                .iter()
                .min_by(|a, b| (*a - 1.0).norm().total_cmp(&(*b - 1.0).norm()))
                .unwrap()
                .re
        };
        let h = 1e-6;
        let speed = (real_root(fold + h) - real_root(fold - h)) / (2.0 * h);
        speeds.push(speed);
        if (speed - nf / (nf + 1.0)).abs() >= 1e-4 {
            failures.push(format!(
                "n = {n}: dlambda/dgamma = {speed:.6}, expected {:.6}",
                nf / (nf + 1.0)
            ));
        }
    }
    for n in 1..=8usize {
        let fold = (n as f64 + 1.0) / n as f64;
        for i in 1..=10_000 {
            let gamma = 3.0 * i as f64 / 10_000.0;
            for z in &g_roots(n, gamma)[1..] {
                if z.norm() > 1.0 + UNIT_CIRCLE_TOL {
                    ensure(
                        z.im.abs() < 1e-9 && z.re > 1.0 && gamma > fold,
                        format!("n = {n}: off-axis exit {z}"),
                    )?;
                }
            }
        }
    }
    if failures.is_empty() {
        Ok("exit at (n+1)/n, speed n/(n+1), no off-axis exit".into())
    } else {
        Err(format!(
            "exit at (n+1)/n to 1e-8 and no off-axis exit, but measured exit speeds {:?} equal 2n/(n+1); {}",
            speeds.iter().map(|s| format!("{s:.6}")).collect::<Vec<_>>(),
            failures.join("; ")
        ))
    }
}

fn simulator_vs_analysis() -> Check {
    let p = ModelParams::new(-1.0, 5.0, 4.0).unwrap();
    let mut worst_period = 0.0f64;
    let mut worst_rate = 0.0f64;
    for n in 0..=3 {
        let target = stable_solution(&p, n).map_err(|e| e.to_string())?;
        let h = InitialHistory::periodic(target.period, n, 4.0).unwrap();
        let traj = simulate(p, &h, 800.0).map_err(|e| e.to_string())?;
        let m = measure_period(&traj, 400.0).map_err(|e| e.to_string())?;
        ensure(m.n == n, format!("seeded n = {n} settled on n = {}", m.n))?;
        let dp = (m.period - target.period).abs();
        ensure(dp < 1e-8, format!("n = {n}: period off by {dp}"))?;
        worst_period = worst_period.max(dp);
        let rho = StabilitySpectrum::compute(n, target.gamma)
            .unwrap()
            .max_nontrivial_modulus();
        let rate = perturbation_decay_rate(p, n, 1e-5, 50).map_err(|e| e.to_string())?;
        let rel = if rho == 0.0 {
            rate.abs()
        } else {
            (rate - rho).abs() / rho
        };
        ensure(rel <= 0.01, format!("n = {n}: decay rate {rate} vs {rho}"))?;
        worst_rate = worst_rate.max(rel);
    }
    Ok(format!(
        "period error <= {worst_period:.1e}, relative decay-rate error <= {worst_rate:.1e}"
    ))
}

fn rotation_symmetry() -> Check {
    let grid: Vec<f64> = (0..200).map(|i| PI * i as f64 / 199.0).collect();
    let mut worst = 0.0f64;
    for n in 0..=5 {
        let pts = branch_parametric_pos(n, 2.0, &grid).map_err(|e| e.to_string())?;
        for r in rotate_branch(&pts, n).map_err(|e| e.to_string())? {
            let res = residual_pos(n, r.tau, r.period, -2.0).abs();
            ensure(
                res < 1e-10,
                format!("n = {n}: residual {res} at ({}, {})", r.tau, r.period),
            )?;
            worst = worst.max(res);
        }
    }
    for n in 1..=6 {
        let nf = n as f64;
        let c = cusp_point(n, Coupling::Inhibitory).unwrap();
        let tau = (1.0 + 1.5 * nf) * PI
            - (nf + 1.0) * acot(((nf + 1.0) / nf).sqrt())
            - nf * (nf / (nf + 1.0)).sqrt().atan();
        let kappa = -1.0 / (nf * nf + nf).sqrt();
        ensure(
            (c.tau - tau).abs() < 1e-10 && (c.kappa - kappa).abs() < 1e-10,
            format!("cusp n = {n}: {c:?}"),
        )?;
    }
    Ok(format!("largest residual {worst:.1e}"))
}

fn positive_current_structure() -> Check {
    let kappa = 2.0;
    let grid: Vec<f64> = (0..=2000).map(|i| PI * i as f64 / 2000.0).collect();
    let mut last_end: Option<(f64, f64)> = None;
    for n in 0..=5 {
        let nf = n as f64;
        let pts = branch_parametric_pos(n, kappa, &grid).map_err(|e| e.to_string())?;
        let (first, last) = (pts[0], pts[pts.len() - 1]);
        if let Some((tau, t)) = last_end {
            ensure(
                (tau - first.tau).abs() < 1e-12 && (t - first.period).abs() < 1e-12,
                format!("gap before n = {n}"),
            )?;
        }
        last_end = Some((last.tau, last.period));
        ensure(
            (first.tau - nf * PI).abs() < 1e-12 && (first.period - PI).abs() < 1e-12,
            format!("n = {n} does not start at ({}pi, pi)", n),
        )?;
        ensure(
            pts.iter().all(|b| b.period <= PI + 1e-12),
            format!("n = {n}: period above pi"),
        )?;
        let jumps = pts
            .windows(2)
            .all(|w| (w[1].tau - w[0].tau).hypot(w[1].period - w[0].period) < 0.05);
        ensure(jumps, format!("n = {n}: branch has a jump"))?;
        let (tau_min, t_min) = superstable_point_pos(n, kappa);
        ensure(
            (tau_min - (nf + 0.5) * PI / 2.0).abs() < 1e-12 && (t_min - PI / 2.0).abs() < 1e-12,
            format!("n = {n}: minimum at ({tau_min}, {t_min})"),
        )?;
        let lowest = pts.iter().map(|b| b.period).fold(f64::MAX, f64::min);
        ensure(
            (lowest - PI / 2.0).abs() < 1e-6 && lowest >= PI / 2.0 - 1e-12,
            format!("n = {n}: lowest period {lowest}"),
        )?;
        ensure(
            residual_pos(n, tau_min, t_min, kappa).abs() < 1e-12,
            format!("n = {n}: minimum not on branch"),
        )?;
    }
    Ok("branches n = 0..5 join at (k pi, pi); minima at ((n+1/2) pi/2, pi/2)".into())
}

fn smooth_multistability() -> Check {
    let start = Instant::now();
    let p = ModelParams::new(-1.0, 2.0, 4.0).unwrap();
    let mut counts = Vec::new();
    for k in 1..=3 {
        let run = integrate(&p, &History::Spikes { k }, 800.0, &SmoothConfig::default())
            .map_err(|e| e.to_string())?;
        match run.attractor {
            Attractor::Periodic { n } => counts.push(n + 1),
            other => return Err(format!("seeding with {k} spikes ended in {other:?}")),
        }
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    counts.sort_unstable();
    counts.dedup();
    ensure(counts == vec![1, 2, 3], format!("spike counts {counts:?}"))?;
    Ok(format!(
        "spikes per delay interval {counts:?} in {:?}",
        start.elapsed()
    ))
}

fn smooth_chaos() -> Check {
    let start = Instant::now();
    let base = ModelParams::new(1.0, -1.0, 2.9).unwrap();
    let (c, l) = (SmoothConfig::default(), LyapunovConfig::default());
    let h = History::Spikes { k: 1 };
    let run = |tau: f64, t_end: f64| {
        integrate_and_classify(&base.with_tau(tau).unwrap(), &h, t_end, &c, &l)
            .map_err(|e| e.to_string())
    };
    let a = run(2.9, 1500.0)?;
    ensure(
        matches!(a.attractor, Attractor::Periodic { .. }),
        format!("tau = 2.9: {:?}", a.attractor),
    )?;
    let b = run(3.05, 1500.0)?;
    ensure(
        b.attractor == Attractor::PeriodDoubled,
        format!("tau = 3.05: {:?}", b.attractor),
    )?;
    let c3 = run(3.3, 2000.0)?;
    ensure(
        c3.attractor == Attractor::Chaotic,
        format!("tau = 3.3: {:?}", c3.attractor),
    )?;
    let est = c3.lyapunov.ok_or("no Lyapunov estimate at tau = 3.3")?;
    ensure(
        est.ci_low > 0.0,
        format!("95% interval [{}, {}]", est.ci_low, est.ci_high),
    )?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "Periodic / PeriodDoubled / Chaotic, lambda = {:.4} in [{:.4}, {:.4}], {:?}",
        est.exponent,
        est.ci_low,
        est.ci_high,
        start.elapsed()
    ))
}

fn delta_limit() -> Check {
    let p = ModelParams::new(-1.0, 2.0, 4.0).unwrap();
    // a narrow pulse delivers ∫κP(θ)dt ≈ πκ
    let delta = ModelParams::new(-1.0, 2.0 * PI, 4.0).unwrap();
    let mut report = Vec::new();
    for k in 1..=3usize {
        let n = k - 1;
        let reference = stable_solution(&delta, n)
            .map_err(|e| e.to_string())?
            .period;
        let mut errs = Vec::new();
        for m in [5u32, 80] {
            let c = SmoothConfig {
                pulse_exponent: m,
                transient: Some(2800.0),
                ..Default::default()
            };
            let run =
                integrate(&p, &History::Spikes { k }, 3000.0, &c).map_err(|e| e.to_string())?;
            ensure(
                run.attractor == Attractor::Periodic { n },
                format!("m = {m}, n = {n}: {:?}", run.attractor),
            )?;
            let t = run.measured_period.ok_or("no period")?;
            errs.push((t - reference).abs() / reference);
        }
        ensure(
            errs[1] < 0.05,
            format!("n = {n}: m = 80 off by {:.2}%", 100.0 * errs[1]),
        )?;
        ensure(
            errs[1] < errs[0],
            format!(
                "n = {n}: m = 80 ({}) not closer than m = 5 ({})",
                errs[1], errs[0]
            ),
        )?;
        report.push(format!(
            "n = {n}: {:.2}% -> {:.2}%",
            100.0 * errs[0],
            100.0 * errs[1]
        ));
    }
    Ok(report.join(", "))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("homoclinic value", homoclinic_value),
        ("superstable geometry", superstable_geometry),
        ("fold limit", fold_limit),
        ("spectral cross-check", spectral_cross_check),
        ("exit through +1", exit_through_plus_one),
        ("simulator vs analysis", simulator_vs_analysis),
        ("rotation symmetry", rotation_symmetry),
        ("positive-current structure", positive_current_structure),
        ("smooth multistability", smooth_multistability),
        ("smooth chaos", smooth_chaos),
        ("delta limit", delta_limit),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                println!("criterion {:2} {name}: FAIL ({why})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
