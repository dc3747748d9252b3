//! Informed trading across a sweepable electronic book and a slow auction
//! floor.
//!
//! Floor execution time is a Gamma subordinator in order size and price
//! impact is Brownian motion run on that clock (a Variance-Gamma process).
//! On top of that model the crate prices floor liquidity, solves for the
//! optimal sweep, floor and hybrid orders, and checks every closed form by
//! Monte Carlo and brute-force search.

pub mod error;
pub mod impact;
pub mod montecarlo;
pub mod pricing;
pub mod rng;
pub mod root;
pub mod solver;
pub mod subordinator;

pub use error::{Error, Result};
pub use impact::{feasible_size_sup, impact_cumulant, impact_moments, sample_impact, ImpactLaw};
pub use montecarlo::{
    estimate_delay_moments, estimate_impact_moments, estimate_mgf, estimate_utility_gain,
    grid_search, verification_suite, Check, GainEstimate, McConfig, Objective, OracleResult,
    SampleStats, SuiteEntry, Verdict,
};
pub use pricing::{
    liquidity_grid, marginal_cost, marginal_price, price_of_liquidity, supply_curve, SupplyPoint,
    GRID_GUARD,
};
pub use rng::RngStream;
pub use solver::{
    fast_optimal, floor_gain, floor_optimal, floor_participation, hybrid_breakdown, hybrid_gain,
    hybrid_optimal, max_informed_trading, new_trader_gain, sweep_profit, sweep_utility_gain,
    Corner, FastParams, FastTrade, FloorTrade, GainBreakdown, HybridSplit, TraderParams,
};
pub use subordinator::{delay_kernel, delay_moments, sample_delay, Delay, FloorParams, Moments};
