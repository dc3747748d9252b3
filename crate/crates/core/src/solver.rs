//! Optimal order sizes: sweeping the book, trading on the floor, and the
//! hybrid split between the two.
//!
//! All quantities are unsigned; a sell-side problem maps onto the buy side by
//! symmetry, so `delta_p > 0` throughout.

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::impact::{feasible_size_sup, ImpactLaw};
use crate::pricing::{marginal_cost, price_of_liquidity};
use crate::root::{bisect, bisect_by_sign};

/// Fast-market breadth: dollars of impact per share swept from the book.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FastParams {
    lambda_fast: f64,
}

impl FastParams {
    pub fn new(lambda_fast: f64) -> Result<Self> {
        Ok(Self {
            lambda_fast: positive("lambda_fast", lambda_fast)?,
        })
    }

    pub fn lambda_fast(&self) -> f64 {
        self.lambda_fast
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraderParams {
    eta: f64,
    delta_p: f64,
    wealth: f64,
}

impl TraderParams {
    /// `eta` is absolute risk aversion, `delta_p` the mispricing. Under CARA
    /// initial wealth cancels out of every decision; it is kept for reporting.
    pub fn new(eta: f64, delta_p: f64, wealth: f64) -> Result<Self> {
        if !wealth.is_finite() {
            return Err(Error::InvalidParameter {
                name: "wealth",
                constraint: "finite",
                value: wealth,
            });
        }
        Ok(Self {
            eta: positive("eta", eta)?,
            delta_p: positive("delta_p", delta_p)?,
            wealth,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn delta_p(&self) -> f64 {
        self.delta_p
    }

    pub fn wealth(&self) -> f64 {
        self.wealth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corner {
    Interior,
    AllFloor,
    AllFast,
}

impl Corner {
    pub fn as_str(self) -> &'static str {
        match self {
            Corner::Interior => "interior",
            Corner::AllFloor => "all_floor",
            Corner::AllFast => "all_fast",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridSplit {
    pub q_total: f64,
    pub q_fast: f64,
    pub q_floor: f64,
    pub gain: f64,
    pub corner: Corner,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FastTrade {
    pub q_fast: f64,
    /// Dollars.
    pub profit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloorTrade {
    pub q_slow: f64,
    /// Utility units.
    pub gain: f64,
}

/// Terms of the hybrid utility gain, all in utility units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainBreakdown {
    /// `eta q_total dP`
    pub revenue: f64,
    /// `eta lambda_F q_fast^2 / 2`
    pub sweep_cost: f64,
    /// `eta q_floor lambda_F q_fast`: the floor fills after the sweep is public.
    pub cross_impact: f64,
    /// `q_floor P_{q_floor}`
    pub floor_liquidity_cost: f64,
    pub gain: f64,
}

/// Dollar profit of sweeping `q` shares: `q dP - lambda_F q^2 / 2`.
pub fn sweep_profit(q: f64, delta_p: f64, lambda_fast: f64) -> f64 {
    q * delta_p - 0.5 * lambda_fast * q * q
}

/// Certainty-equivalent gain of a riskless sweep, in utility units.
pub fn sweep_utility_gain(q: f64, trader: &TraderParams, fast: &FastParams) -> f64 {
    trader.eta * sweep_profit(q, trader.delta_p, fast.lambda_fast)
}

/// Floor-only utility gain `eta q dP - q P_q`.
pub fn floor_gain(q: f64, trader: &TraderParams, law: &ImpactLaw) -> Result<f64> {
    Ok(trader.eta * q * trader.delta_p - q * price_of_liquidity(q, trader.eta, law)?)
}

pub fn hybrid_breakdown(
    q_fast: f64,
    q_floor: f64,
    trader: &TraderParams,
    fast: &FastParams,
    law: &ImpactLaw,
) -> Result<GainBreakdown> {
    let eta = trader.eta;
    let lf = fast.lambda_fast;
    let revenue = eta * (q_fast + q_floor) * trader.delta_p;
    let sweep_cost = 0.5 * eta * lf * q_fast * q_fast;
    let cross_impact = eta * q_floor * lf * q_fast;
    let floor_liquidity_cost = q_floor * price_of_liquidity(q_floor, eta, law)?;
    Ok(GainBreakdown {
        revenue,
        sweep_cost,
        cross_impact,
        floor_liquidity_cost,
        gain: revenue - sweep_cost - cross_impact - floor_liquidity_cost,
    })
}

/// Total hybrid utility gain of sweeping `q_fast` and sending `q_floor` to the floor.
pub fn hybrid_gain(
    q_fast: f64,
    q_floor: f64,
    trader: &TraderParams,
    fast: &FastParams,
    law: &ImpactLaw,
) -> Result<f64> {
    Ok(hybrid_breakdown(q_fast, q_floor, trader, fast, law)?.gain)
}

/// Sweep until the book price reflects the full mispricing: `q_F = dP / lambda_F`.
pub fn fast_optimal(trader: &TraderParams, fast: &FastParams) -> FastTrade {
    let q_fast = trader.delta_p / fast.lambda_fast;
    FastTrade {
        q_fast,
        profit: sweep_profit(q_fast, trader.delta_p, fast.lambda_fast),
    }
}

/// Right edge of a bracket on `(0, q_bar)` where `f` is strictly negative.
/// Walks toward `q_bar` since costs diverge there.
fn negative_edge<F: Fn(f64) -> f64>(f: F, q_bar: f64) -> Option<f64> {
    (3..=15)
        .map(|k| q_bar * (1.0 - 10f64.powi(-k)))
        .find(|&q| f(q) < 0.0)
}

fn residual_or_neg_inf(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::NEG_INFINITY)
}

/// Stand-alone floor optimum: the monopsonist equates the constant marginal
/// revenue `eta dP` with the marginal liquidity cost.
pub fn floor_optimal(trader: &TraderParams, law: &ImpactLaw) -> Result<FloorTrade> {
    let eta = trader.eta;
    let q_bar = feasible_size_sup(eta, law)?;
    let revenue = eta * trader.delta_p;
    let residual = |q: f64| residual_or_neg_inf(marginal_cost(q, eta, law).map(|mc| revenue - mc));
    let hi = negative_edge(residual, q_bar).ok_or(Error::NoBracket { lo: 0.0, hi: q_bar })?;
    let q_slow = bisect(residual, 0.0, hi, 4.0 * f64::EPSILON * hi)?;
    Ok(FloorTrade {
        q_slow,
        gain: floor_gain(q_slow, trader, law)?,
    })
}

/// The floor attracts any order flow only if it is more than twice as deep
/// as the book: `lambda_S < lambda_F / 2`.
pub fn floor_participation(lambda_slow: f64, fast: &FastParams) -> bool {
    lambda_slow < 0.5 * fast.lambda_fast
}

/// Optimal split between sweeping the book and the floor.
///
/// Interior optimum: the total is pinned at `dP / lambda_F` and the floor
/// share solves `eta lambda_F q = MC(q)`. If that root reaches the total, the
/// book is not touched and the stand-alone floor problem applies; if the
/// floor is not deep enough, everything is swept.
pub fn hybrid_optimal(trader: &TraderParams, fast: &FastParams, law: &ImpactLaw) -> Result<HybridSplit> {
    let eta = trader.eta;
    let q_hybrid = trader.delta_p / fast.lambda_fast;

    if !floor_participation(law.lambda_slow(), fast) {
        return Ok(HybridSplit {
            q_total: q_hybrid,
            q_fast: q_hybrid,
            q_floor: 0.0,
            gain: hybrid_gain(q_hybrid, 0.0, trader, fast, law)?,
            corner: Corner::AllFast,
        });
    }

    let q_bar = feasible_size_sup(eta, law)?;
    let slope = eta * fast.lambda_fast;
    let excess = |q: f64| residual_or_neg_inf(marginal_cost(q, eta, law).map(|mc| slope * q - mc));

    if q_hybrid < q_bar && excess(q_hybrid) >= 0.0 {
        let floor = floor_optimal(trader, law)?;
        return Ok(HybridSplit {
            q_total: floor.q_slow,
            q_fast: 0.0,
            q_floor: floor.q_slow,
            gain: hybrid_gain(0.0, floor.q_slow, trader, fast, law)?,
            corner: Corner::AllFloor,
        });
    }

    let hi = if q_hybrid < q_bar {
        q_hybrid
    } else {
        negative_edge(excess, q_bar).ok_or(Error::NoBracket { lo: 0.0, hi: q_bar })?
    };
    // excess(0) = 0 with positive slope, so only the sign matters left of the root.
    let q_floor = bisect_by_sign(|q| excess(q) > 0.0, 0.0, hi, true, 4.0 * f64::EPSILON * hi)?;
    let q_fast = q_hybrid - q_floor;
    Ok(HybridSplit {
        q_total: q_hybrid,
        q_fast,
        q_floor,
        gain: hybrid_gain(q_fast, q_floor, trader, fast, law)?,
        corner: Corner::Interior,
    })
}

/// Competitive bound on informed trading, `dP / lambda_S`.
pub fn max_informed_trading(trader: &TraderParams, lambda_slow: f64) -> Result<f64> {
    Ok(trader.delta_p / positive("lambda_slow", lambda_slow)?)
}

/// Gain of a newly informed trader buying `q_j` on a floor already working
/// `q_prior` shares. Each trader pays the price set by their own size, but
/// the cost scales with the whole queue.
pub fn new_trader_gain(q_prior: f64, q_j: f64, trader: &TraderParams, law: &ImpactLaw) -> Result<f64> {
    let q_prior = crate::error::non_negative("q_prior", q_prior)?;
    let price = price_of_liquidity(q_j, trader.eta, law)?;
    Ok(trader.eta * q_j * trader.delta_p - (q_prior + q_j) * price)
}
