//! The experiment config file: one JSON object, unknown keys rejected.

use std::path::{Path, PathBuf};

use hybridflow::{FastParams, FloorParams, ImpactLaw, TraderParams};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub floor: FloorSpec,
    pub fast: FastSpec,
    pub trader: TraderSpec,
    #[serde(default)]
    pub mc: Option<McSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloorSpec {
    pub a: f64,
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FastSpec {
    pub lambda_fast: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraderSpec {
    pub eta: f64,
    pub delta_p: f64,
    #[serde(default)]
    pub wealth: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    pub n: u64,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    LambdaSlow,
    A,
    Mu,
    Sigma,
    LambdaFast,
    Eta,
    DeltaP,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::LambdaSlow => "lambda_slow",
            SweepParam::A => "a",
            SweepParam::Mu => "mu",
            SweepParam::Sigma => "sigma",
            SweepParam::LambdaFast => "lambda_fast",
            SweepParam::Eta => "eta",
            SweepParam::DeltaP => "delta_p",
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParam,
    pub range: [f64; 2],
    /// Number of intervals; the sweep visits `steps + 1` points.
    pub steps: usize,
}

impl SweepSpec {
    pub fn points(&self) -> Vec<f64> {
        let [lo, hi] = self.range;
        (0..=self.steps)
            .map(|i| lo + (hi - lo) * i as f64 / self.steps as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// A config whose parameters passed every model invariant.
#[derive(Debug, Clone)]
pub struct Validated {
    pub raw: ExperimentConfig,
    pub floor: FloorParams,
    pub fast: FastParams,
    pub trader: TraderParams,
}

impl Validated {
    pub fn law(&self) -> ImpactLaw {
        ImpactLaw::new(self.floor)
    }
}

pub fn load(path: &Path) -> Result<Validated, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Validated, CliError> {
    let raw: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("parse error: {e}")))?;
    let floor = FloorParams::new(raw.floor.a, raw.floor.mu, raw.floor.sigma)?;
    let fast = FastParams::new(raw.fast.lambda_fast)?;
    let trader = TraderParams::new(raw.trader.eta, raw.trader.delta_p, raw.trader.wealth)?;
    if let Some(mc) = raw.mc {
        if mc.n < 2 {
            return Err(CliError::Config(format!("mc.n must satisfy >= 2 (got {})", mc.n)));
        }
    }
    if let Some(sweep) = raw.sweep {
        let [lo, hi] = sweep.range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CliError::Config(format!(
                "sweep.range must be non-empty and ordered (got [{lo}, {hi}])"
            )));
        }
        if sweep.steps == 0 {
            return Err(CliError::Config("sweep.steps must satisfy >= 1 (got 0)".into()));
        }
    }
    Ok(Validated { raw, floor, fast, trader })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANONICAL: &str = r#"{
        "floor": {"a": 4, "mu": 2, "sigma": 1},
        "fast": {"lambda_fast": 2},
        "trader": {"eta": 1, "delta_p": 1, "wealth": 100}
    }"#;

    #[test]
    fn parses_minimal() {
        let v = parse(CANONICAL).unwrap();
        assert_eq!(v.floor.lambda_slow(), 0.5);
        assert!(v.raw.mc.is_none() && v.raw.sweep.is_none());
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = CANONICAL.replace("\"sigma\"", "\"sigmaa\"");
        assert!(matches!(parse(&bad), Err(CliError::Config(_))));
        let extra = CANONICAL.replace("\"wealth\": 100", "\"wealth\": 100, \"gamma\": 2");
        assert!(parse(&extra).is_err());
    }

    #[test]
    fn invariant_named() {
        let bad = CANONICAL.replace("\"mu\": 2", "\"mu\": 0");
        let msg = parse(&bad).unwrap_err().to_string();
        assert!(msg.contains("mu") && msg.contains("> 0"), "{msg}");
    }

    #[test]
    fn sweep_range_checked() {
        let with = |range: &str| {
            CANONICAL.replace(
                "\"wealth\": 100}",
                &format!("\"wealth\": 100}}, \"sweep\": {{\"parameter\": \"mu\", \"range\": {range}, \"steps\": 4}}"),
            )
        };
        assert!(parse(&with("[1, 2]")).is_ok());
        assert!(parse(&with("[2, 2]")).is_err());
        assert!(parse(&with("[3, 2]")).is_err());
    }

    #[test]
    fn sweep_points_hit_endpoints() {
        let s = SweepSpec { parameter: SweepParam::LambdaSlow, range: [0.1, 1.5], steps: 14 };
        let pts = s.points();
        assert_eq!(pts.len(), 15);
        assert_eq!(pts[0], 0.1);
        assert_eq!(pts[9], 1.0);
        assert_eq!(pts[14], 1.5);
    }
}
