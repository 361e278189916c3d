//! JSON experiment configuration.
//!
//! Schemas are strict: unknown keys are rejected so typos fail loudly
//! before any computation runs.

use anyhow::{bail, Context};
use bidsim::ctbr::ConfidenceSchedule;
use bidsim::harness::{BidderSpec, Regime};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketCfg {
    pub pairs: Vec<(f64, f64)>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PricingCfg {
    /// Buyer valuations in strictly decreasing order.
    pub valuations: Vec<f64>,
    /// Valuation probabilities (positive, summing to 1).
    pub probs: Vec<f64>,
    /// Seller price set in strictly decreasing order.
    pub prices: Vec<f64>,
    pub gamma: f64,
    pub rho: f64,
}

impl PricingCfg {
    pub fn build(&self) -> anyhow::Result<bidsim::PricingModel> {
        bidsim::PricingModel::new(
            &self.valuations,
            &self.probs,
            &self.prices,
            self.gamma,
            self.rho,
        )
        .context("invalid pricing model")
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleCfg {
    /// One of `power`, `ee-theory`, `sgd-vanishing-theory`,
    /// `sgd-constant-theory`, `constant`.
    pub kind: String,
    pub s: Option<f64>,
    pub eta: Option<f64>,
    pub value: Option<f64>,
}

impl ScheduleCfg {
    pub fn resolve(&self, horizon: usize) -> anyhow::Result<ConfidenceSchedule> {
        Ok(match self.kind.as_str() {
            "power" => ConfidenceSchedule::Power {
                s: self.s.unwrap_or(1.0),
            },
            "ee-theory" => ConfidenceSchedule::EeTheory,
            "sgd-vanishing-theory" => ConfidenceSchedule::SgdVanishingTheory,
            "sgd-constant-theory" => ConfidenceSchedule::SgdConstantTheory {
                eta: self
                    .eta
                    .unwrap_or_else(|| (horizon as f64).powf(-2.0 / 3.0)),
            },
            "constant" => ConfidenceSchedule::Constant {
                value: self
                    .value
                    .ok_or_else(|| anyhow::anyhow!("constant schedule needs `value`"))?,
            },
            other => bail!("unknown confidence schedule kind `{other}`"),
        })
    }
}

fn default_schedule() -> ConfidenceSchedule {
    ConfidenceSchedule::power_default()
}

pub fn bidder_from_name(
    name: &str,
    schedule: ConfidenceSchedule,
    eta: Option<f64>,
) -> anyhow::Result<BidderSpec> {
    Ok(match name {
        "ctbr-ee" => BidderSpec::CtbrEe { schedule },
        "ctbr-sgd-vanishing" => BidderSpec::CtbrSgdVanishing { schedule },
        "ctbr-sgd-constant" => BidderSpec::CtbrSgdConstant { eta, schedule },
        "known-p-threshold" => BidderSpec::KnownDistribution,
        "never-bid" => BidderSpec::NeverBid,
        "conserv" => BidderSpec::Conserv,
        "budget-pacing" => BidderSpec::BudgetPacing,
        "roi-pacing" => BidderSpec::RoiPacing,
        "pacing" => BidderSpec::JointPacing,
        other => bail!("unknown bidder `{other}`"),
    })
}

pub fn regime_from_name(name: &str) -> anyhow::Result<Regime> {
    Ok(match name {
        "roi" => Regime::RoiDominant,
        "budget" => Regime::BudgetDominant,
        "alpha" => Regime::AlphaDominant,
        other => bail!("unknown regime `{other}` (expected roi|budget|alpha)"),
    })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveCfg {
    /// Exactly one of `market` (one hindsight solve) or `pricing`
    /// (revenue curve over the whole price set).
    pub market: Option<MarketCfg>,
    pub pricing: Option<PricingCfg>,
    /// Solver weights for market mode; defaults to the probabilities.
    pub weights: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    pub horizons: Vec<usize>,
    pub seeds_per: usize,
    pub bidder: Option<String>,
    pub schedule: Option<ScheduleCfg>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BidCfg {
    /// Constraint regime to sample instances from: roi|budget|alpha.
    pub regime: String,
    pub horizon: Option<usize>,
    pub instances: Option<usize>,
    /// Bidder names; defaults to the five-bidder comparison roster.
    pub bidders: Option<Vec<String>>,
    /// Confidence schedule for the threshold bidders (default power s=1).
    pub schedule: Option<ScheduleCfg>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub rho: Option<f64>,
    /// Arrival support pairs; defaults to the 19-ratio grid.
    pub support: Option<Vec<(f64, f64)>>,
    /// Hard-stop benchmark bidders at the budget (default true).
    pub hard_stop: Option<bool>,
    /// Write one per-period CSV per run (default true).
    pub write_runs: Option<bool>,
    /// Regret-scaling sweep settings, used with `--sweep`.
    pub sweep: Option<SweepCfg>,
}

impl BidCfg {
    pub fn scenario(&self, seed: u64) -> anyhow::Result<bidsim::ScenarioConfig> {
        let regime = regime_from_name(&self.regime)?;
        let horizon = self.horizon.unwrap_or(10_000);
        let reference = regime.reference_params();
        let params = bidsim::BuyerParams::new(
            self.alpha.unwrap_or(reference.alpha),
            self.gamma.unwrap_or(reference.gamma),
            self.rho.unwrap_or(reference.rho),
        )?;
        let schedule = match &self.schedule {
            Some(s) => s.resolve(horizon)?,
            None => default_schedule(),
        };
        let bidders = match &self.bidders {
            Some(names) => names
                .iter()
                .map(|n| bidder_from_name(n, schedule, None))
                .collect::<anyhow::Result<Vec<_>>>()?,
            None => vec![
                BidderSpec::CtbrEe { schedule },
                BidderSpec::Conserv,
                BidderSpec::BudgetPacing,
                BidderSpec::RoiPacing,
                BidderSpec::JointPacing,
            ],
        };
        Ok(bidsim::ScenarioConfig {
            regime,
            params,
            support: self
                .support
                .clone()
                .unwrap_or_else(bidsim::harness::ratio_grid_support),
            instances: self.instances.unwrap_or(10),
            horizon,
            bidders,
            seed,
            collect_records: self.write_runs.unwrap_or(true),
            benchmark_hard_stop: self.hard_stop.unwrap_or(true),
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceCfg {
    pub pricing: PricingCfg,
    /// `clairvoyant` (default) or `ctbr-sgd-constant`.
    pub buyer: Option<String>,
    pub horizon: usize,
    /// Exploration episode length; defaults to `T^(2/3 + 1/ln T)` rounded.
    pub episode: Option<usize>,
    /// Learning-buyer SGD step size; defaults to `T^(-2/3)`.
    pub eta: Option<f64>,
    /// Learning-buyer confidence schedule (default power s=1).
    pub schedule: Option<ScheduleCfg>,
}

impl PriceCfg {
    pub fn episode_len(&self) -> usize {
        self.episode.unwrap_or_else(|| {
            let t = self.horizon as f64;
            t.powf(2.0 / 3.0 + 1.0 / t.ln()).ceil() as usize
        })
    }

    pub fn buyer_schedule(&self) -> anyhow::Result<ConfidenceSchedule> {
        match &self.schedule {
            Some(s) => s.resolve(self.horizon),
            None => Ok(default_schedule()),
        }
    }
}

/// Parse a config file's JSON into `C`, reporting offending keys.
pub fn load<C: for<'de> Deserialize<'de>>(content: &str) -> anyhow::Result<C> {
    serde_json::from_str(content).map_err(|e| anyhow::anyhow!("{e}"))
}
