//! Monte Carlo identities for the delay and impact laws.

use hybridflow::{
    delay_moments, estimate_delay_moments, estimate_impact_moments, estimate_mgf,
    estimate_utility_gain, floor_gain, floor_optimal, impact_moments, sample_delay, FloorParams,
    ImpactLaw, McConfig, RngStream, TraderParams,
};

fn canonical() -> (FloorParams, ImpactLaw) {
    let p = FloorParams::new(4.0, 2.0, 1.0).unwrap();
    (p, ImpactLaw::new(p))
}

#[test]
fn delay_moments_q5() {
    let (p, _) = canonical();
    let est = estimate_delay_moments(5.0, &p, &McConfig::new(1_000_000, 1)).unwrap();
    let exact = delay_moments(5.0, &p).unwrap();
    assert!((est.mean - exact.mean).abs() <= 3.0 * est.stderr_mean);
    assert!((est.variance / exact.variance - 1.0).abs() < 0.02);
    assert!((est.variance - exact.variance).abs() <= 3.0 * est.stderr_variance);
    assert_eq!(est, estimate_delay_moments(5.0, &p, &McConfig::new(1_000_000, 1)).unwrap());
}

#[test]
fn impact_moments_q2() {
    let (_, law) = canonical();
    let est = estimate_impact_moments(2.0, &law, &McConfig::new(1_000_000, 2)).unwrap();
    assert!((est.mean - 1.0).abs() <= 3.0 * est.stderr_mean);
    assert!((est.variance - 1.0).abs() <= 3.0 * est.stderr_variance);
}

#[test]
fn impact_mgf_identity() {
    let (_, law) = canonical();
    let s_max = law.domain_sup();
    for (i, &q) in [1.0, 4.0].iter().enumerate() {
        for (j, frac) in [0.1, 0.2, 0.3, 0.4].iter().enumerate() {
            let s = frac * s_max;
            let est = estimate_mgf(q, s, &law, &McConfig::new(1_000_000, 30 + (4 * i + j) as u64)).unwrap();
            let (log_mgf, se) = est.log_mean();
            let exact = q * law.cumulant(s).unwrap();
            assert!((log_mgf - exact).abs() <= 3.0 * se, "q={q} s={s}: {log_mgf} vs {exact} (se {se})");
        }
    }
}

#[test]
fn moments_linear_in_size() {
    let (_, law) = canonical();
    let sizes = [0.5, 1.0, 2.0, 4.0];
    let ests: Vec<_> = sizes
        .iter()
        .enumerate()
        .map(|(i, &q)| estimate_impact_moments(q, &law, &McConfig::new(400_000, 50 + i as u64)).unwrap())
        .collect();
    for (q, est) in sizes.iter().zip(&ests) {
        let exact = impact_moments(*q, &law).unwrap();
        assert!((est.mean / q - exact.mean / q).abs() <= 3.0 * est.stderr_mean / q);
        assert!((est.variance / q - exact.variance / q).abs() <= 3.0 * est.stderr_variance / q);
    }
}

#[test]
fn utility_gain_identity() {
    let (_, law) = canonical();
    let t = TraderParams::new(1.0, 1.0, 250.0).unwrap();
    let est = estimate_utility_gain(0.5, &t, &law, &McConfig::new(1_000_000, 60)).unwrap();
    let exact = floor_gain(0.5, &t, &law).unwrap();
    assert!((exact - 0.334879).abs() < 1e-6);
    assert!((est.gain - exact).abs() <= 3.0 * est.stderr, "{} vs {exact}", est.gain);

    // At the floor optimum the closed form gain is what Monte Carlo sees.
    let opt = floor_optimal(&t, &law).unwrap();
    let at_opt = estimate_utility_gain(opt.q_slow, &t, &law, &McConfig::new(1_000_000, 61)).unwrap();
    assert!((at_opt.gain - opt.gain).abs() <= 3.0 * at_opt.stderr);

    // Small orders gain almost nothing.
    let tiny = estimate_utility_gain(1e-6, &t, &law, &McConfig::new(100_000, 62)).unwrap();
    assert!(tiny.gain.abs() < 1e-5);
}

#[test]
fn utility_gain_zero_volatility() {
    let law = ImpactLaw::new(FloorParams::new(4.0, 2.0, 0.0).unwrap());
    let t = TraderParams::new(1.0, 1.0, 0.0).unwrap();
    let est = estimate_utility_gain(0.5, &t, &law, &McConfig::new(1_000_000, 63)).unwrap();
    let exact = floor_gain(0.5, &t, &law).unwrap();
    assert!((est.gain - exact).abs() <= 3.0 * est.stderr);
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks_statistic(mut x: Vec<f64>, mut y: Vec<f64>) -> f64 {
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

#[test]
fn delay_is_levy_additive() {
    let p = FloorParams::new(4.0, 2.0, 1.0).unwrap();
    let n = 100_000;
    let mut rng = RngStream::new(70);
    let whole: Vec<f64> = (0..n).map(|_| sample_delay(2.5, &p, &mut rng).unwrap().seconds()).collect();
    let summed: Vec<f64> = (0..n)
        .map(|_| {
            sample_delay(0.7, &p, &mut rng).unwrap().seconds() + sample_delay(1.8, &p, &mut rng).unwrap().seconds()
        })
        .collect();
    let d = ks_statistic(whole, summed);
    // Asymptotic critical value at the 0.1% level: sqrt(-ln(alpha/2)/2) * sqrt(2/n).
    let critical = ((-(0.001f64 / 2.0).ln()) / 2.0).sqrt() * (2.0 / n as f64).sqrt();
    assert!(d < critical, "KS D={d} critical={critical}");
}

#[test]
fn gate_holds_across_seeds() {
    // At least 99 of 100 seeds keep each estimator within 3 standard errors.
    let (p, law) = canonical();
    let t = TraderParams::new(1.0, 1.0, 0.0).unwrap();
    let exact_delay = delay_moments(2.0, &p).unwrap();
    let exact_impact = impact_moments(2.0, &law).unwrap();
    let exact_gain = floor_gain(0.5, &t, &law).unwrap();
    let mut misses = [0usize; 5];
    for seed in 0..100u64 {
        let cfg = McConfig::new(20_000, 1000 + seed);
        let d = estimate_delay_moments(2.0, &p, &cfg).unwrap();
        let i = estimate_impact_moments(2.0, &law, &cfg).unwrap();
        let g = estimate_utility_gain(0.5, &t, &law, &cfg).unwrap();
        let outside = [
            (d.mean - exact_delay.mean).abs() > 3.0 * d.stderr_mean,
            (d.variance - exact_delay.variance).abs() > 3.0 * d.stderr_variance,
            (i.mean - exact_impact.mean).abs() > 3.0 * i.stderr_mean,
            (i.variance - exact_impact.variance).abs() > 3.0 * i.stderr_variance,
            (g.gain - exact_gain).abs() > 3.0 * g.stderr,
        ];
        for (m, o) in misses.iter_mut().zip(outside) {
            *m += o as usize;
        }
    }
    assert!(misses.iter().all(|&m| m <= 1), "misses per estimator: {misses:?}");
}
