//! Statistical and brute-force checks of the closed forms.
//!
//! Estimators split `n` draws into fixed-size chunks. Chunk `i` always uses
//! substream `i` of the master seed and chunk summaries are merged in index
//! order, so results are bit-identical for any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::impact::{feasible_size_sup, impact_moments, sample_impact, ImpactLaw};
use crate::pricing::{price_of_liquidity, GRID_GUARD};
use crate::rng::RngStream;
use crate::solver::{
    floor_gain, floor_optimal, hybrid_gain, sweep_profit, FastParams, TraderParams,
};
use crate::subordinator::{delay_moments, sample_delay, FloorParams};

/// Draws per chunk; fixes the substream layout.
pub const CHUNK: u64 = 1 << 16;

/// Largest exponent fed to `exp` in the utility estimator.
pub const EXPONENT_CAP: f64 = 700.0;

/// Smallest sample sizes at which the gates are considered powered.
pub const MIN_N_MOMENTS: u64 = 10_000;
pub const MIN_N_UTILITY: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n: u64,
    pub seed: u64,
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
}

impl McConfig {
    pub fn new(n: u64, seed: u64) -> Self {
        Self { n, seed, workers: 0 }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub stderr_mean: f64,
    /// Standard error of `variance`, from the fourth central moment.
    pub stderr_variance: f64,
    pub n: u64,
    pub seed: u64,
}

impl SampleStats {
    /// `log(mean)` with its delta-method standard error.
    pub fn log_mean(&self) -> (f64, f64) {
        (self.mean.ln(), self.stderr_mean / self.mean)
    }
}

/// Running central moments up to order four (Pebay's pairwise update).
#[derive(Debug, Clone, Copy, Default)]
struct CentralMoments {
    n: f64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl CentralMoments {
    fn push(&mut self, x: f64) {
        let n1 = self.n;
        self.n += 1.0;
        let n = self.n;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.mean += delta_n;
        self.m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * self.m2
            - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0.0 {
            return other;
        }
        if other.n == 0.0 {
            return self;
        }
        let (na, nb) = (self.n, other.n);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let d3 = d2 * delta;
        let d4 = d2 * d2;
        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3 + other.m3 + d3 * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4 + other.m4
            + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        Self { n, mean, m2, m3, m4 }
    }

    fn stats(&self, seed: u64) -> SampleStats {
        let n = self.n;
        let variance = self.m2 / (n - 1.0);
        let pop_var = self.m2 / n;
        let mu4 = self.m4 / n;
        let var_of_var = ((mu4 - pop_var * pop_var * (n - 3.0) / (n - 1.0)) / n).max(0.0);
        SampleStats {
            mean: self.mean,
            variance,
            stderr_mean: (variance / n).sqrt(),
            stderr_variance: var_of_var.sqrt(),
            n: n as u64,
            seed,
        }
    }
}

/// Draw `cfg.n` values with `draw`, chunked over substreams, and summarise.
fn simulate<F>(cfg: &McConfig, draw: F) -> Result<SampleStats>
where
    F: Fn(&mut RngStream) -> Result<f64> + Sync,
{
    if cfg.n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            constraint: ">= 2",
            value: cfg.n as f64,
        });
    }
    let master = RngStream::new(cfg.seed);
    let chunks = cfg.n.div_ceil(CHUNK);
    let run_chunk = |index: u64| -> Result<CentralMoments> {
        let mut rng = master.substream(index);
        let len = CHUNK.min(cfg.n - index * CHUNK);
        let mut acc = CentralMoments::default();
        for _ in 0..len {
            acc.push(draw(&mut rng)?);
        }
        Ok(acc)
    };
    let summaries: Vec<Result<CentralMoments>> = if cfg.workers == 0 {
        (0..chunks).into_par_iter().map(run_chunk).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .expect("thread pool")
            .install(|| (0..chunks).into_par_iter().map(run_chunk).collect())
    };
    let mut total = CentralMoments::default();
    for s in summaries {
        total = total.merge(s?);
    }
    Ok(total.stats(cfg.seed))
}

/// Sample moments of `tau(q)`.
pub fn estimate_delay_moments(q: f64, params: &FloorParams, cfg: &McConfig) -> Result<SampleStats> {
    positive("q", q)?;
    simulate(cfg, |rng| Ok(sample_delay(q, params, rng)?.seconds()))
}

/// Sample moments of `I(q)`.
pub fn estimate_impact_moments(q: f64, law: &ImpactLaw, cfg: &McConfig) -> Result<SampleStats> {
    positive("q", q)?;
    simulate(cfg, |rng| sample_impact(q, law, rng))
}

/// Sample statistics of `exp(s I(q))`; `log_mean()` estimates `q K(s)`.
pub fn estimate_mgf(q: f64, s: f64, law: &ImpactLaw, cfg: &McConfig) -> Result<SampleStats> {
    positive("q", q)?;
    law.cumulant(s)?;
    simulate(cfg, |rng| Ok((s * sample_impact(q, law, rng)?).exp()))
}

/// Certainty-equivalent gain `-log E exp(-eta q (dP - I(q)))` with its
/// delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainEstimate {
    pub gain: f64,
    pub stderr: f64,
    /// Statistics of the per-draw utility ratio `U / U_0`.
    pub ratio: SampleStats,
}

pub fn estimate_utility_gain(
    q: f64,
    trader: &TraderParams,
    law: &ImpactLaw,
    cfg: &McConfig,
) -> Result<GainEstimate> {
    positive("q", q)?;
    let eta = trader.eta();
    price_of_liquidity(q, eta, law)?;
    let scale = eta * q;
    let ratio = simulate(cfg, |rng| {
        let exponent = scale * (sample_impact(q, law, rng)? - trader.delta_p());
        if exponent.abs() > EXPONENT_CAP || exponent.is_nan() {
            return Err(Error::Overflow {
                estimator: "utility gain",
                exponent,
                cap: EXPONENT_CAP,
            });
        }
        Ok(exponent.exp())
    })?;
    let (log_ratio, stderr) = ratio.log_mean();
    Ok(GainEstimate {
        gain: -log_ratio,
        stderr,
        ratio,
    })
}

/// Objective maximised by [`grid_search`].
#[derive(Debug, Clone, Copy)]
pub enum Objective<'a> {
    /// Dollar profit of sweeping `q` shares.
    SweepProfit { delta_p: f64, lambda_fast: f64 },
    /// Floor-only utility gain in `q`.
    FloorGain { trader: &'a TraderParams, law: &'a ImpactLaw },
    /// Hybrid utility gain over `(q_fast, q_floor)`.
    HybridGain {
        trader: &'a TraderParams,
        fast: &'a FastParams,
        law: &'a ImpactLaw,
    },
}

impl Objective<'_> {
    pub fn dimension(&self) -> usize {
        match self {
            Objective::HybridGain { .. } => 2,
            _ => 1,
        }
    }

    /// Objective value; infeasible points score `-inf`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let value = match *self {
            Objective::SweepProfit { delta_p, lambda_fast } => Ok(sweep_profit(x[0], delta_p, lambda_fast)),
            Objective::FloorGain { trader, law } => floor_gain(x[0], trader, law),
            Objective::HybridGain { trader, fast, law } => hybrid_gain(x[0], x[1], trader, fast, law),
        };
        value.unwrap_or(f64::NEG_INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub argmax: Vec<f64>,
    pub max_value: f64,
    pub grid_step: f64,
    pub bounds: Vec<(f64, f64)>,
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const REFINE_TOL: f64 = 1e-10;

/// Golden-section maximisation of `f` on `[lo, hi]`; returns the best point seen.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, start: f64) -> f64 {
    let (mut best_x, mut best_f) = (start, f(start));
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > REFINE_TOL * 0.1 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best_f {
            best_x = x;
            best_f = v;
        }
    }
    best_x
}

fn grid_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step).floor() as usize;
    let mut pts: Vec<f64> = (0..=count).map(|i| lo + i as f64 * step).collect();
    if pts.last().is_some_and(|&x| x < hi) {
        pts.push(hi);
    }
    pts
}

/// Exhaustive scan of `objective` on a regular grid over `bounds`, then local
/// golden-section refinement around the best grid point.
pub fn grid_search(objective: &Objective<'_>, bounds: &[(f64, f64)], step: f64) -> Result<OracleResult> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Grid(format!("step must be positive, got {step}")));
    }
    if bounds.len() != objective.dimension() {
        return Err(Error::Grid(format!(
            "objective takes {} coordinates, got {} bounds",
            objective.dimension(),
            bounds.len()
        )));
    }
    if bounds.iter().any(|&(lo, hi)| !(lo <= hi && lo.is_finite() && hi.is_finite())) {
        return Err(Error::Grid("bounds must be finite and ordered".into()));
    }
    let axes: Vec<Vec<f64>> = bounds.iter().map(|&(lo, hi)| grid_points(lo, hi, step)).collect();

    let mut best = match axes.as_slice() {
        [xs] => xs
            .iter()
            .map(|&x| (vec![x], objective.eval(&[x])))
            .fold((vec![xs[0]], f64::NEG_INFINITY), |acc, cand| if cand.1 > acc.1 { cand } else { acc }),
        [xs, ys] => xs
            .par_iter()
            .map(|&x| {
                ys.iter()
                    .map(|&y| (vec![x, y], objective.eval(&[x, y])))
                    .fold((vec![x, ys[0]], f64::NEG_INFINITY), |acc, cand| if cand.1 > acc.1 { cand } else { acc })
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((vec![xs[0], ys[0]], f64::NEG_INFINITY), |acc, cand| if cand.1 > acc.1 { cand } else { acc }),
        _ => unreachable!("dimension checked above"),
    };
    if !best.1.is_finite() {
        return Err(Error::Grid("objective is infeasible on the whole grid".into()));
    }

    let directions: Vec<Vec<f64>> = if bounds.len() == 1 {
        vec![vec![1.0]]
    } else {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![r, r], vec![r, -r]]
    };
    let window = 2.0 * step;
    for _ in 0..5000 {
        let before = best.1;
        for d in &directions {
            // Line segment through the current point, clipped to the box.
            let (mut t_lo, mut t_hi) = (-window, window);
            for (k, &(lo, hi)) in bounds.iter().enumerate() {
                if d[k] > 0.0 {
                    t_lo = t_lo.max((lo - best.0[k]) / d[k]);
                    t_hi = t_hi.min((hi - best.0[k]) / d[k]);
                } else if d[k] < 0.0 {
                    t_lo = t_lo.max((hi - best.0[k]) / d[k]);
                    t_hi = t_hi.min((lo - best.0[k]) / d[k]);
                }
            }
            let origin = best.0.clone();
            let at = |t: f64| -> Vec<f64> { origin.iter().zip(d).map(|(o, dk)| o + t * dk).collect() };
            let t = golden_max(|t| objective.eval(&at(t)), t_lo, t_hi, 0.0);
            let cand = at(t);
            let value = objective.eval(&cand);
            if value > best.1 {
                best = (cand, value);
            }
        }
        if best.1 - before <= 1e-15 * before.abs().max(1.0) {
            break;
        }
    }

    Ok(OracleResult {
        argmax: best.0,
        max_value: best.1,
        grid_step: step,
        bounds: bounds.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Sample too small for the gate to mean anything.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// One estimator compared with its closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub estimate: f64,
    pub closed_form: f64,
    pub stderr: f64,
    pub z: f64,
    pub verdict: Verdict,
}

/// Gate width in standard errors.
pub const Z_GATE: f64 = 3.0;

impl Check {
    pub fn new(name: impl Into<String>, estimate: f64, closed_form: f64, stderr: f64, n: u64, min_n: u64) -> Self {
        let z = (estimate - closed_form) / stderr;
        let verdict = if n < min_n {
            Verdict::Inconclusive
        } else if z.abs() <= Z_GATE {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            name: name.into(),
            estimate,
            closed_form,
            stderr,
            z,
            verdict,
        }
    }
}

/// Outcome of one suite entry: a check, or an estimator that could not run.
#[derive(Debug, Clone, PartialEq)]
pub enum SuiteEntry {
    Check(Check),
    Failed { name: String, error: Error },
}

impl SuiteEntry {
    pub fn is_failure(&self) -> bool {
        match self {
            SuiteEntry::Check(c) => c.verdict == Verdict::Fail,
            SuiteEntry::Failed { .. } => true,
        }
    }
}

/// Fractions of `s_max` at which the suite checks the MGF identity. Kept
/// below one half so that `exp(s I)` has finite variance.
pub const SUITE_MGF_FRACTIONS: [f64; 2] = [0.2, 0.4];

/// Runs every estimator against its closed form for one parameter set.
///
/// Sizes checked: `q = 1` for the moment identities, `q = 1` for the MGF,
/// and `q = 0.4 q_bar` for the utility gain.
pub fn verification_suite(floor: &FloorParams, trader: &TraderParams, cfg: &McConfig) -> Vec<SuiteEntry> {
    let law = ImpactLaw::new(*floor);
    let mut out = Vec::new();
    let mut push = |name: &str, r: Result<Vec<Check>>| match r {
        Ok(checks) => out.extend(checks.into_iter().map(SuiteEntry::Check)),
        Err(error) => out.push(SuiteEntry::Failed { name: name.to_string(), error }),
    };
    let q = 1.0;

    push("delay_moments", (|| {
        let exact = delay_moments(q, floor)?;
        let est = estimate_delay_moments(q, floor, cfg)?;
        Ok(vec![
            Check::new("delay_mean", est.mean, exact.mean, est.stderr_mean, est.n, MIN_N_MOMENTS),
            Check::new("delay_variance", est.variance, exact.variance, est.stderr_variance, est.n, MIN_N_MOMENTS),
        ])
    })());

    push("impact_moments", (|| {
        let exact = impact_moments(q, &law)?;
        let est = estimate_impact_moments(q, &law, &McConfig { seed: cfg.seed.wrapping_add(1), ..*cfg })?;
        Ok(vec![
            Check::new("impact_mean", est.mean, exact.mean, est.stderr_mean, est.n, MIN_N_MOMENTS),
            Check::new("impact_variance", est.variance, exact.variance, est.stderr_variance, est.n, MIN_N_MOMENTS),
        ])
    })());

    for (i, frac) in SUITE_MGF_FRACTIONS.iter().enumerate() {
        let s = frac * law.domain_sup();
        push("impact_mgf", (|| {
            let est = estimate_mgf(q, s, &law, &McConfig { seed: cfg.seed.wrapping_add(2 + i as u64), ..*cfg })?;
            let (log_mgf, se) = est.log_mean();
            Ok(vec![Check::new(
                format!("log_mgf_s{frac}"),
                log_mgf,
                q * law.cumulant(s)?,
                se,
                est.n,
                MIN_N_MOMENTS,
            )])
        })());
    }

    push("utility_gain", (|| {
        let q_gain = 0.4 * feasible_size_sup(trader.eta(), &law)?;
        let est = estimate_utility_gain(q_gain, trader, &law, &McConfig { seed: cfg.seed.wrapping_add(10), ..*cfg })?;
        Ok(vec![Check::new(
            "utility_gain",
            est.gain,
            floor_gain(q_gain, trader, &law)?,
            est.stderr,
            est.ratio.n,
            MIN_N_UTILITY,
        )])
    })());

    push("floor_optimum", (|| {
        let opt = floor_optimal(trader, &law)?;
        let q_bar = feasible_size_sup(trader.eta(), &law)?;
        let oracle = grid_search(&Objective::FloorGain { trader, law: &law }, &[(0.0, GRID_GUARD * q_bar)], 1e-5)?;
        // Deterministic check: passes within two grid steps.
        let dev = (oracle.argmax[0] - opt.q_slow).abs();
        Ok(vec![Check {
            name: "floor_argmax_vs_grid".into(),
            estimate: oracle.argmax[0],
            closed_form: opt.q_slow,
            stderr: oracle.grid_step,
            z: dev / oracle.grid_step,
            verdict: if dev <= 2.0 * oracle.grid_step { Verdict::Pass } else { Verdict::Fail },
        }])
    })());

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn central_moments_merge_matches_sequential() {
        let mut rng = RngStream::new(3);
        let xs: Vec<f64> = (0..1000).map(|_| rng.random::<f64>().powi(3) * 10.0).collect();
        let mut whole = CentralMoments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let (mut a, mut b) = (CentralMoments::default(), CentralMoments::default());
        xs[..377].iter().for_each(|&x| a.push(x));
        xs[377..].iter().for_each(|&x| b.push(x));
        let merged = a.merge(b);
        for (u, v) in [(whole.mean, merged.mean), (whole.m2, merged.m2), (whole.m3, merged.m3), (whole.m4, merged.m4)] {
            assert!((u - v).abs() <= 1e-9 * u.abs().max(1.0), "{u} vs {v}");
        }
        // Two-pass reference.
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let m4: f64 = xs.iter().map(|x| (x - mean).powi(4)).sum();
        assert!((whole.m4 / m4 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn stats_reproducible_and_worker_invariant() {
        let p = FloorParams::new(4.0, 2.0, 1.0).unwrap();
        let cfg = McConfig::new(200_000, 17);
        let a = estimate_delay_moments(5.0, &p, &cfg.with_workers(1)).unwrap();
        let b = estimate_delay_moments(5.0, &p, &cfg.with_workers(4)).unwrap();
        let c = estimate_delay_moments(5.0, &p, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.n, 200_000);
        assert_eq!(a.seed, 17);
        assert!((a.stderr_mean - (a.variance / a.n as f64).sqrt()).abs() < 1e-18);
    }

    #[test]
    fn rejects_tiny_samples() {
        let p = FloorParams::new(4.0, 2.0, 1.0).unwrap();
        assert!(estimate_delay_moments(1.0, &p, &McConfig::new(1, 0)).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        // Huge mispricing times size pushes the exponent far past the cap.
        let law = ImpactLaw::new(FloorParams::new(4.0, 2.0, 1.0).unwrap());
        let t = TraderParams::new(1.0, 5000.0, 0.0).unwrap();
        let r = estimate_utility_gain(0.5, &t, &law, &McConfig::new(1000, 1));
        assert!(matches!(r, Err(Error::Overflow { .. })));
    }

    #[test]
    fn utility_gain_domain() {
        let law = ImpactLaw::new(FloorParams::new(4.0, 2.0, 1.0).unwrap());
        let t = TraderParams::new(1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            estimate_utility_gain(2.0, &t, &law, &McConfig::new(1000, 1)),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn sweep_profit_grid() {
        let r = grid_search(
            &Objective::SweepProfit { delta_p: 1.0, lambda_fast: 2.0 },
            &[(0.0, 1.0)],
            1e-5,
        )
        .unwrap();
        assert!((r.argmax[0] - 0.5).abs() < 1e-8);
        assert!((r.max_value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_bad_input() {
        let obj = Objective::SweepProfit { delta_p: 1.0, lambda_fast: 2.0 };
        assert!(grid_search(&obj, &[(0.0, 1.0)], 0.0).is_err());
        assert!(grid_search(&obj, &[(1.0, 0.0)], 0.1).is_err());
        assert!(grid_search(&obj, &[(0.0, 1.0), (0.0, 1.0)], 0.1).is_err());
    }

    #[test]
    fn verdicts() {
        assert_eq!(Check::new("x", 1.0, 1.0, 0.1, 100_000, 10_000).verdict, Verdict::Pass);
        assert_eq!(Check::new("x", 1.5, 1.0, 0.1, 100_000, 10_000).verdict, Verdict::Fail);
        assert_eq!(Check::new("x", 1.5, 1.0, 0.1, 100, 10_000).verdict, Verdict::Inconclusive);
    }
}
