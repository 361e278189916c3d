//! Benchmark bidders: the conservative ratio bidder and three
//! dual-subgradient pacing strategies, plus the worked demonstration that
//! ROI pacing with the optimal dual can still violate the ROI constraint.
//!
//! Pacing maintains estimates of the optimal dual variables for the budget
//! and ROI constraints and scales bids by them: `v / (alpha + lambda)` for
//! budget, `(1 + mu) v / (alpha + gamma mu)` for ROI, and the joint form
//! with both. Duals move by projected subgradient steps after each auction.

use crate::ctbr::Bid;
use crate::{Error, Result};

/// Dual-variable state for the pacing bidders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacingState {
    /// Budget dual estimate, kept in `[0, lambda_cap]`.
    pub lambda_hat: f64,
    /// ROI dual estimate, kept in `[0, mu_cap]`.
    pub mu_hat: f64,
    pub lambda_cap: f64,
    pub mu_cap: f64,
    /// Subgradient step size, constant per run.
    pub step: f64,
}

impl PacingState {
    pub fn new(lambda_cap: f64, mu_cap: f64, step: f64) -> Result<Self> {
        if !(lambda_cap >= 0.0 && mu_cap >= 0.0 && step >= 0.0) {
            return Err(Error::InvalidParameter(
                "pacing caps and step size must be nonnegative".into(),
            ));
        }
        Ok(Self {
            lambda_hat: 0.0,
            mu_hat: 0.0,
            lambda_cap,
            mu_cap,
            step,
        })
    }

    /// Defaults: generous dual boxes of 10 and the `1/sqrt(T)` step size.
    pub fn defaults_for_horizon(horizon: usize) -> Self {
        Self::new(10.0, 10.0, 1.0 / (horizon as f64).sqrt()).unwrap()
    }

    /// Budget-paced bid `v / (alpha + lambda)`. With `alpha = 0` and a zero
    /// dual the paced bid is unbounded, represented by the always-win
    /// sentinel.
    pub fn budget_bid(&self, v: f64, alpha: f64) -> Bid {
        paced(v, alpha + self.lambda_hat)
    }

    /// ROI-paced bid `(1 + mu) v / (alpha + gamma mu)`.
    pub fn roi_bid(&self, v: f64, alpha: f64, gamma: f64) -> Bid {
        paced((1.0 + self.mu_hat) * v, alpha + gamma * self.mu_hat)
    }

    /// Jointly paced bid `(1 + mu) v / (alpha + gamma mu + lambda)`.
    pub fn joint_bid(&self, v: f64, alpha: f64, gamma: f64) -> Bid {
        paced(
            (1.0 + self.mu_hat) * v,
            alpha + gamma * self.mu_hat + self.lambda_hat,
        )
    }

    /// `lambda <- clamp(lambda - step (rho - payment))` after observing the
    /// period's payment `d_t z_t`.
    pub fn update_budget_dual(&mut self, rho: f64, payment: f64) {
        self.lambda_hat =
            (self.lambda_hat - self.step * (rho - payment)).clamp(0.0, self.lambda_cap);
    }

    /// `mu <- clamp(mu - step (v z - gamma d z))` after observing the won
    /// value and payment.
    pub fn update_roi_dual(&mut self, gamma: f64, value_won: f64, payment: f64) {
        self.mu_hat =
            (self.mu_hat - self.step * (value_won - gamma * payment)).clamp(0.0, self.mu_cap);
    }
}

fn paced(numerator: f64, denominator: f64) -> Bid {
    if denominator <= 0.0 {
        Bid::AlwaysWin
    } else {
        Bid::Amount(numerator / denominator)
    }
}

/// The ratio bidder: bid `v / gamma` every period, which wins only auctions
/// with value-to-cost ratio at least `gamma` and therefore keeps the
/// realized ROI at or above the target surely.
pub fn conserv_bid(v: f64, gamma: f64) -> Bid {
    Bid::Amount(v / gamma)
}

/// Analytic cumulative expected ROI balance of the fixed `mu* = 2` ROI
/// pacer on the two-point instance: valuations constant at `v`, price
/// `v/(2 gamma)` w.p. `p` and `3v/(2 gamma)` otherwise. The paced bid
/// `3v/(2 gamma)` wins both outcomes, so the balance is `T v (p - 1/2)`,
/// strictly negative for `p < 1/2`.
pub fn example1_expected_roi(p: f64, v: f64, horizon: usize) -> f64 {
    horizon as f64 * v * (p - 0.5)
}

/// Monte-Carlo companion to [`example1_expected_roi`]: run the fixed
/// `mu* = 2` pacer and return the realized cumulative ROI balance.
pub fn example1_simulated_roi(
    p: f64,
    v: f64,
    gamma: f64,
    horizon: usize,
    rng: &mut crate::rng::RandomSource,
) -> f64 {
    let mu_star = 2.0;
    let bid = paced((1.0 + mu_star) * v, gamma * mu_star); // alpha = 0
    let low = v / (2.0 * gamma);
    let high = 3.0 * v / (2.0 * gamma);
    let mut balance = 0.0;
    for _ in 0..horizon {
        let d = if rng.bernoulli(p) { low } else { high };
        if bid.wins_against(d) {
            balance += v - gamma * d;
        }
    }
    balance
}
