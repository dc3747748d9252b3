//! Price impact of a floor order: drifting Brownian motion run on the
//! execution clock, `I(q) = mu tau(q) + sigma W(tau(q))`.
//!
//! With Gamma delays the impact is a Variance-Gamma process in `q` with
//! per-share cumulant `K(s) = log(a / (a - mu s - sigma^2 s^2 / 2))`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, Result};
use crate::subordinator::{sample_delay, FloorParams, Moments};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactLaw {
    params: FloorParams,
    lambda_slow: f64,
}

impl ImpactLaw {
    pub fn new(params: FloorParams) -> Self {
        Self {
            params,
            lambda_slow: params.lambda_slow(),
        }
    }

    pub fn params(&self) -> &FloorParams {
        &self.params
    }

    pub fn lambda_slow(&self) -> f64 {
        self.lambda_slow
    }

    /// Exponent fed to the delay kernel: `mu s + sigma^2 s^2 / 2`.
    fn clock_exponent(&self, s: f64) -> f64 {
        let p = &self.params;
        p.mu() * s + 0.5 * p.sigma() * p.sigma() * s * s
    }

    fn checked_gap(&self, s: f64) -> Result<f64> {
        let gap = self.params.a() - self.clock_exponent(s);
        if gap > 0.0 {
            Ok(gap)
        } else {
            Err(Error::Domain {
                what: "impact cumulant",
                arg_name: "s",
                arg: s,
                bound: self.domain_sup(),
            })
        }
    }

    pub fn cumulant(&self, s: f64) -> Result<f64> {
        self.checked_gap(s)?;
        Ok(-(-self.clock_exponent(s) / self.params.a()).ln_1p())
    }

    /// `K'(s) = (mu + sigma^2 s) / (a - mu s - sigma^2 s^2 / 2)`.
    pub fn cumulant_derivative(&self, s: f64) -> Result<f64> {
        let gap = self.checked_gap(s)?;
        let p = &self.params;
        Ok((p.mu() + p.sigma() * p.sigma() * s) / gap)
    }

    pub fn cumulant_second_derivative(&self, s: f64) -> Result<f64> {
        let gap = self.checked_gap(s)?;
        let p = &self.params;
        let sig2 = p.sigma() * p.sigma();
        let slope = p.mu() + sig2 * s;
        Ok(sig2 / gap + slope * slope / (gap * gap))
    }

    /// Positive root `s_max` of `a - mu s - sigma^2 s^2 / 2 = 0`; the
    /// impact MGF is finite exactly for `s < s_max` on the positive side.
    pub fn domain_sup(&self) -> f64 {
        let p = &self.params;
        // Rationalised root, also valid at sigma = 0.
        2.0 * p.a() / (p.mu() + (p.mu() * p.mu() + 2.0 * p.sigma() * p.sigma() * p.a()).sqrt())
    }
}

pub fn impact_cumulant(s: f64, law: &ImpactLaw) -> Result<f64> {
    law.cumulant(s)
}

/// Mean `lambda_slow q` and variance `(lambda_slow^2 + sigma^2/a) q`.
pub fn impact_moments(q: f64, law: &ImpactLaw) -> Result<Moments> {
    let q = non_negative("q", q)?;
    let p = law.params();
    let per_share_var = law.lambda_slow * law.lambda_slow + p.sigma() * p.sigma() / p.a();
    Ok(Moments {
        mean: law.lambda_slow * q,
        variance: per_share_var * q,
    })
}

/// One exact draw of `I(q)`: the delay first, then the conditional Gaussian
/// `sigma sqrt(tau) Z` from the same stream.
pub fn sample_impact<R: Rng + ?Sized>(q: f64, law: &ImpactLaw, rng: &mut R) -> Result<f64> {
    let q = positive("q", q)?;
    let tau = sample_delay(q, law.params(), rng)?.seconds();
    let z: f64 = rng.sample(StandardNormal);
    let p = law.params();
    Ok(p.mu() * tau + p.sigma() * tau.sqrt() * z)
}

/// Largest order size `q_bar` with a finite liquidity price for risk
/// aversion `eta`: `q_bar = s_max / eta`.
pub fn feasible_size_sup(eta: f64, law: &ImpactLaw) -> Result<f64> {
    let eta = positive("eta", eta)?;
    Ok(law.domain_sup() / eta)
}
