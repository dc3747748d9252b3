//! Execution delay on the floor as a Gamma subordinator in order size.
//!
//! An order of `q` shares waits `tau(q) ~ Gamma(shape = q, rate = a)` seconds
//! for enough marketable noise flow to fill. The cumulant kernel per share is
//! `K_tau(s) = -log(1 - s/a)`, so `E exp(s tau(q)) = exp(q K_tau(s))` for `s < a`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, Result};

/// Slow-market primitives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloorParams {
    a: f64,
    mu: f64,
    sigma: f64,
}

impl FloorParams {
    /// `a` is the noise-order arrival rate (shares/s), `mu` the impact drift
    /// ($/s), `sigma` the impact volatility ($/sqrt(s)).
    pub fn new(a: f64, mu: f64, sigma: f64) -> Result<Self> {
        let a = positive("a", a)?;
        let mu = positive("mu", mu)?;
        let sigma = non_negative("sigma", sigma)?;
        let lambda = mu / a;
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda_slow",
                constraint: "finite and > 0",
                value: lambda,
            });
        }
        Ok(Self { a, mu, sigma })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Floor breadth: expected dollars of impact per share, `mu / a`.
    pub fn lambda_slow(&self) -> f64 {
        self.mu / self.a
    }

    /// Per-share cumulant kernel of the delay, `-log(1 - s/a)`.
    pub fn kernel(&self, s: f64) -> Result<f64> {
        self.check_kernel_arg(s)?;
        Ok(-(-s / self.a).ln_1p())
    }

    /// `K_tau'(s) = 1 / (a - s)`.
    pub fn kernel_derivative(&self, s: f64) -> Result<f64> {
        self.check_kernel_arg(s)?;
        Ok(1.0 / (self.a - s))
    }

    /// `K_tau''(s) = 1 / (a - s)^2`.
    pub fn kernel_second_derivative(&self, s: f64) -> Result<f64> {
        self.check_kernel_arg(s)?;
        let gap = self.a - s;
        Ok(1.0 / (gap * gap))
    }

    fn check_kernel_arg(&self, s: f64) -> Result<()> {
        if s < self.a {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "delay kernel",
                arg_name: "s",
                arg: s,
                bound: self.a,
            })
        }
    }
}

/// Execution time in seconds.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Delay(f64);

impl Delay {
    pub fn seconds(self) -> f64 {
        self.0
    }
}

/// First two moments of a size-`q` quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

pub fn delay_kernel(s: f64, params: &FloorParams) -> Result<f64> {
    params.kernel(s)
}

/// `E tau(q) = q/a`, `Var tau(q) = q/a^2`.
pub fn delay_moments(q: f64, params: &FloorParams) -> Result<Moments> {
    let q = non_negative("q", q)?;
    Ok(Moments {
        mean: q * params.kernel_derivative(0.0)?,
        variance: q * params.kernel_second_derivative(0.0)?,
    })
}

/// One exact draw of `tau(q)`.
pub fn sample_delay<R: Rng + ?Sized>(q: f64, params: &FloorParams, rng: &mut R) -> Result<Delay> {
    let q = positive("q", q)?;
    Ok(Delay(sample_gamma(q, rng) / params.a))
}

/// Gamma(shape, 1) by Marsaglia-Tsang squeeze/rejection. Shapes below one
/// are boosted: `G(k) = G(k + 1) * U^(1/k)`.
pub(crate) fn sample_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    debug_assert!(shape > 0.0);
    if shape < 1.0 {
        let boosted = marsaglia_tsang(shape + 1.0, rng);
        let u = open_unit(rng);
        // U^(1/k) underflows for tiny shapes; the delay must stay positive.
        return (boosted * (u.ln() / shape).exp()).max(f64::MIN_POSITIVE);
    }
    marsaglia_tsang(shape, rng)
}

fn marsaglia_tsang<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = open_unit(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Uniform on (0, 1].
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
