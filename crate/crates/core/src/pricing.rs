//! The price of floor liquidity and its supply curve.
//!
//! A trader with risk aversion `eta` who sends `q` shares to the floor pays
//! `P_q = K(eta q)` per share in utility units. Prices are dimensionless: they
//! enter the CARA exponent as `eta q dP - q P_q`.

use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, Result};
use crate::impact::{feasible_size_sup, ImpactLaw};

/// Default fraction of `q_bar` at which generated grids stop.
pub const GRID_GUARD: f64 = 0.999;

/// One row of the monopsonist's cost picture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupplyPoint {
    pub q: f64,
    /// `P_q`
    pub avg_cost: f64,
    /// `P_q + q dP/dq`
    pub marginal_cost: f64,
    /// `eta dP`, constant
    pub marginal_revenue: f64,
}

fn scaled_arg(q: f64, eta: f64, law: &ImpactLaw, what: &'static str) -> Result<f64> {
    let q = non_negative("q", q)?;
    let eta = positive("eta", eta)?;
    let s = eta * q;
    if s < law.domain_sup() {
        Ok(s)
    } else {
        Err(Error::Domain {
            what,
            arg_name: "q",
            arg: q,
            bound: law.domain_sup() / eta,
        })
    }
}

/// `P_q = K(eta q)`; zero for a price taker.
pub fn price_of_liquidity(q: f64, eta: f64, law: &ImpactLaw) -> Result<f64> {
    let s = scaled_arg(q, eta, law, "price of liquidity")?;
    law.cumulant(s)
}

/// `dP/dq = eta K'(eta q)`; equals `eta lambda_slow` at `q = 0`.
pub fn marginal_price(q: f64, eta: f64, law: &ImpactLaw) -> Result<f64> {
    let s = scaled_arg(q, eta, law, "marginal price of liquidity")?;
    Ok(eta * law.cumulant_derivative(s)?)
}

/// Marginal liquidity cost `P_q + q dP/dq`.
pub fn marginal_cost(q: f64, eta: f64, law: &ImpactLaw) -> Result<f64> {
    Ok(price_of_liquidity(q, eta, law)? + q * marginal_price(q, eta, law)?)
}

pub fn supply_curve(
    q_grid: &[f64],
    eta: f64,
    delta_p: f64,
    law: &ImpactLaw,
) -> Result<Vec<SupplyPoint>> {
    let marginal_revenue = eta * positive("delta_p", delta_p)?;
    q_grid
        .iter()
        .map(|&q| {
            let avg_cost = price_of_liquidity(q, eta, law)?;
            let slope = marginal_price(q, eta, law)?;
            Ok(SupplyPoint {
                q,
                avg_cost,
                marginal_cost: avg_cost + q * slope,
                marginal_revenue,
            })
        })
        .collect()
}

/// `points` evenly spaced sizes on `[0, guard * q_bar]`.
pub fn liquidity_grid(points: usize, guard: f64, eta: f64, law: &ImpactLaw) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::Grid(format!("need at least 2 points, got {points}")));
    }
    if !(guard > 0.0 && guard < 1.0) {
        return Err(Error::Grid(format!("guard {guard} outside (0, 1)")));
    }
    let top = guard * feasible_size_sup(eta, law)?;
    let last = (points - 1) as f64;
    Ok((0..points).map(|i| top * i as f64 / last).collect())
}
