use std::fmt::Write as _;

use hybridflow::montecarlo::{SuiteEntry, Verdict};
use hybridflow::{
    fast_optimal, feasible_size_sup, floor_optimal, floor_participation, hybrid_breakdown,
    hybrid_optimal, liquidity_grid, marginal_cost, price_of_liquidity, supply_curve,
    verification_suite, FastParams, FloorParams, ImpactLaw, McConfig, TraderParams, GRID_GUARD,
};
use serde_json::Value;

use crate::config::{SweepParam, Validated};
use crate::error::CliError;
use crate::output::{num, Output, Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Fast,
    Floor,
    Hybrid,
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn validate(cfg: &Validated) -> Result<Output, CliError> {
    let law = cfg.law();
    let lambda_slow = law.lambda_slow();
    let lambda_fast = cfg.fast.lambda_fast();
    let q_bar = feasible_size_sup(cfg.trader.eta(), &law)?;
    let mut s = String::new();
    writeln!(s, "config: ok").unwrap();
    writeln!(s, "lambda_slow: {lambda_slow}").unwrap();
    writeln!(s, "lambda_fast: {lambda_fast}").unwrap();
    writeln!(s, "participation threshold (lambda_fast/2): {}", 0.5 * lambda_fast).unwrap();
    writeln!(s, "q_bar: {q_bar}").unwrap();
    writeln!(s, "floor participates: {}", yes_no(floor_participation(lambda_slow, &cfg.fast))).unwrap();
    Ok(Output::Text(s))
}

fn insert(r: &mut Record, key: &str, value: f64) {
    r.insert(key.to_string(), num(value));
}

pub fn optimize(cfg: &Validated, mode: Mode) -> Result<Output, CliError> {
    let law = cfg.law();
    let (trader, fast) = (&cfg.trader, &cfg.fast);
    let mut r = Record::new();
    match mode {
        Mode::Fast => {
            let t = fast_optimal(trader, fast);
            r.insert("mode".into(), "fast".into());
            insert(&mut r, "q_fast", t.q_fast);
            insert(&mut r, "profit", t.profit);
            insert(&mut r, "sweep_cost", 0.5 * fast.lambda_fast() * t.q_fast * t.q_fast);
            insert(&mut r, "lambda_fast", fast.lambda_fast());
        }
        Mode::Floor => {
            let t = floor_optimal(trader, &law)?;
            r.insert("mode".into(), "floor".into());
            insert(&mut r, "q_slow", t.q_slow);
            insert(&mut r, "gain", t.gain);
            insert(&mut r, "price_of_liquidity", price_of_liquidity(t.q_slow, trader.eta(), &law)?);
            insert(&mut r, "marginal_cost", marginal_cost(t.q_slow, trader.eta(), &law)?);
            insert(&mut r, "marginal_revenue", trader.eta() * trader.delta_p());
            insert(&mut r, "lambda_slow", law.lambda_slow());
            insert(&mut r, "q_bar", feasible_size_sup(trader.eta(), &law)?);
        }
        Mode::Hybrid => {
            let s = hybrid_optimal(trader, fast, &law)?;
            let b = hybrid_breakdown(s.q_fast, s.q_floor, trader, fast, &law)?;
            r.insert("mode".into(), "hybrid".into());
            r.insert("corner".into(), s.corner.as_str().into());
            insert(&mut r, "q_total", s.q_total);
            insert(&mut r, "q_fast", s.q_fast);
            insert(&mut r, "q_floor", s.q_floor);
            insert(&mut r, "gain", s.gain);
            insert(&mut r, "immediacy", s.q_fast / s.q_total);
            insert(&mut r, "revenue", b.revenue);
            insert(&mut r, "sweep_cost", b.sweep_cost);
            insert(&mut r, "cross_impact", b.cross_impact);
            insert(&mut r, "floor_liquidity_price", price_of_liquidity(s.q_floor, trader.eta(), &law)?);
            insert(&mut r, "floor_liquidity_cost", b.floor_liquidity_cost);
            r.insert(
                "floor_participates".into(),
                yes_no(floor_participation(law.lambda_slow(), fast)).into(),
            );
        }
    }
    Ok(Output::One(r))
}

/// Parameters at one sweep point, or the invariant it violates.
fn sweep_point(
    cfg: &Validated,
    param: SweepParam,
    value: f64,
    vary_a: bool,
) -> hybridflow::Result<(TraderParams, FastParams, ImpactLaw)> {
    let f = cfg.raw.floor;
    let t = cfg.raw.trader;
    let (mut a, mut mu, mut sigma) = (f.a, f.mu, f.sigma);
    let (mut eta, mut delta_p) = (t.eta, t.delta_p);
    let mut lambda_fast = cfg.raw.fast.lambda_fast;
    match param {
        // Default moves the drift at fixed liquidity; --vary-a moves liquidity at fixed drift.
        SweepParam::LambdaSlow if vary_a => a = mu / value,
        SweepParam::LambdaSlow => mu = value * a,
        // Liquidity at fixed breadth.
        SweepParam::A => {
            let lambda = mu / a;
            a = value;
            mu = lambda * a;
        }
        SweepParam::Mu => mu = value,
        SweepParam::Sigma => sigma = value,
        SweepParam::LambdaFast => lambda_fast = value,
        SweepParam::Eta => eta = value,
        SweepParam::DeltaP => delta_p = value,
    }
    let floor = FloorParams::new(a, mu, sigma)?;
    Ok((
        TraderParams::new(eta, delta_p, t.wealth)?,
        FastParams::new(lambda_fast)?,
        ImpactLaw::new(floor),
    ))
}

pub fn sweep(cfg: &Validated, vary_a: bool) -> Result<Output, CliError> {
    let spec = cfg
        .raw
        .sweep
        .ok_or_else(|| CliError::Config("sweep block missing".into()))?;
    let rows = spec
        .points()
        .into_iter()
        .map(|value| {
            let mut r = Record::new();
            r.insert("parameter".into(), spec.parameter.name().into());
            insert(&mut r, "value", value);
            let solved = sweep_point(cfg, spec.parameter, value, vary_a)
                .and_then(|(t, f, law)| Ok((hybrid_optimal(&t, &f, &law)?, law)));
            match solved {
                Ok((s, law)) => {
                    insert(&mut r, "lambda_slow", law.lambda_slow());
                    insert(&mut r, "q_total", s.q_total);
                    insert(&mut r, "q_fast", s.q_fast);
                    insert(&mut r, "q_floor", s.q_floor);
                    insert(&mut r, "gain", s.gain);
                    r.insert("corner".into(), s.corner.as_str().into());
                    r.insert("error".into(), Value::Null);
                }
                Err(e) => {
                    for key in ["lambda_slow", "q_total", "q_fast", "q_floor", "gain", "corner"] {
                        r.insert(key.into(), Value::Null);
                    }
                    r.insert("error".into(), e.to_string().into());
                }
            }
            r
        })
        .collect();
    Ok(Output::Many(rows))
}

pub fn curves(cfg: &Validated, points: usize) -> Result<Output, CliError> {
    let law = cfg.law();
    let (trader, fast) = (&cfg.trader, &cfg.fast);
    let eta = trader.eta();
    let mut grid: Vec<(f64, &str)> = liquidity_grid(points, GRID_GUARD, eta, &law)?
        .into_iter()
        .map(|q| (q, ""))
        .collect();
    grid.push((floor_optimal(trader, &law)?.q_slow, "q_S"));
    let split = hybrid_optimal(trader, fast, &law)?;
    if split.q_floor > 0.0 {
        grid.push((split.q_floor, "q_HS"));
    }
    grid.sort_by(|x, y| x.0.total_cmp(&y.0));

    let qs: Vec<f64> = grid.iter().map(|g| g.0).collect();
    let rows = supply_curve(&qs, eta, trader.delta_p(), &law)?
        .into_iter()
        .zip(&grid)
        .map(|(p, &(_, marker))| {
            let mut r = Record::new();
            insert(&mut r, "q", p.q);
            insert(&mut r, "avg_cost", p.avg_cost);
            insert(&mut r, "marginal_cost", p.marginal_cost);
            insert(&mut r, "marginal_revenue", p.marginal_revenue);
            insert(&mut r, "fast_line", eta * fast.lambda_fast() * p.q);
            r.insert("marker".into(), marker.into());
            r
        })
        .collect();
    Ok(Output::Many(rows))
}

/// Runs the estimator suite. Returns the report and whether any check failed.
pub fn simulate(cfg: &Validated, mc: McConfig, json: bool) -> (Output, bool) {
    let entries = verification_suite(&cfg.floor, &cfg.trader, &mc);
    let failed = entries.iter().any(SuiteEntry::is_failure);
    let overall = if failed {
        "FAIL"
    } else if entries
        .iter()
        .any(|e| matches!(e, SuiteEntry::Check(c) if c.verdict == Verdict::Inconclusive))
    {
        "INCONCLUSIVE"
    } else {
        "PASS"
    };

    if json {
        let rows = entries
            .iter()
            .map(|e| {
                let mut r = Record::new();
                match e {
                    SuiteEntry::Check(c) => {
                        r.insert("check".into(), c.name.clone().into());
                        insert(&mut r, "estimate", c.estimate);
                        insert(&mut r, "closed_form", c.closed_form);
                        insert(&mut r, "stderr", c.stderr);
                        insert(&mut r, "z", c.z);
                        r.insert("verdict".into(), c.verdict.as_str().into());
                        r.insert("error".into(), Value::Null);
                    }
                    SuiteEntry::Failed { name, error } => {
                        r.insert("check".into(), name.clone().into());
                        for key in ["estimate", "closed_form", "stderr", "z"] {
                            r.insert(key.into(), Value::Null);
                        }
                        r.insert("verdict".into(), "FAIL".into());
                        r.insert("error".into(), error.to_string().into());
                    }
                }
                insert(&mut r, "n", mc.n as f64);
                r.insert("seed".into(), mc.seed.into());
                r
            })
            .collect();
        return (Output::Many(rows), failed);
    }

    let mut s = String::new();
    writeln!(s, "verification report: n={} seed={}", mc.n, mc.seed).unwrap();
    for e in &entries {
        match e {
            SuiteEntry::Check(c) => writeln!(
                s,
                "{:<24} estimate={:<22} closed_form={:<22} stderr={:<22} z={:+.4} {}",
                c.name,
                c.estimate,
                c.closed_form,
                c.stderr,
                c.z,
                c.verdict.as_str()
            )
            .unwrap(),
            SuiteEntry::Failed { name, error } => writeln!(s, "{name:<24} FAIL ({error})").unwrap(),
        }
    }
    writeln!(s, "overall: {overall}").unwrap();
    (Output::Text(s), failed)
}
