//! Scenario generation, batch trials, and regret-scaling sweeps.
//!
//! A scenario fixes buyer parameters and a support, samples occurrence
//! distributions that exhibit a target constraint-binding pattern, and runs
//! a roster of bidders over common arrival streams (every bidder in an
//! instance consumes the identical stream; only bid randomization differs).

use crate::ctbr::{
    self, Bid, ConfidenceSchedule, LearnerConfig, RunRecord, RunRow,
};
use crate::hindsight::{self, ArrivalCounts};
use crate::market::{BuyerParams, MarketModel};
use crate::pacing::{self, PacingState};
use crate::rng::RandomSource;
use crate::{Error, Result};

/// Which constraint binds at the optimum of the expected problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    RoiDominant,
    BudgetDominant,
    AlphaDominant,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Self::RoiDominant => "roi",
            Self::BudgetDominant => "budget",
            Self::AlphaDominant => "alpha",
        }
    }

    /// Reference parameter sets (capital cost 1 throughout): tight ROI
    /// target for the ROI regime, tight budget rate for the budget regime,
    /// both loose for the alpha regime.
    pub fn reference_params(&self) -> BuyerParams {
        let (gamma, rho) = match self {
            Self::BudgetDominant => (1.2, 0.05),
            Self::RoiDominant => (2.1, 0.4),
            Self::AlphaDominant => (1.2, 0.4),
        };
        BuyerParams::new(1.0, gamma, rho).unwrap()
    }

    fn matches(&self, roi_binding: bool, budget_binding: bool) -> bool {
        match self {
            Self::RoiDominant => roi_binding && !budget_binding,
            Self::BudgetDominant => budget_binding && !roi_binding,
            Self::AlphaDominant => !roi_binding && !budget_binding,
        }
    }
}

/// The bidders the harness can field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BidderSpec {
    /// Conservative threshold bidding with empirical estimation.
    CtbrEe { schedule: ConfidenceSchedule },
    /// Conservative threshold bidding with vanishing-step SGD.
    CtbrSgdVanishing { schedule: ConfidenceSchedule },
    /// Conservative threshold bidding with constant-step SGD; `eta = None`
    /// resolves to `T^(-2/3)` at run time.
    CtbrSgdConstant {
        eta: Option<f64>,
        schedule: ConfidenceSchedule,
    },
    /// Threshold bidding at the optimum computed from the true
    /// distribution; no learning.
    KnownDistribution,
    /// Control that never wins anything.
    NeverBid,
    /// Bid `v / gamma` every period.
    Conserv,
    /// Dual-paced `v / (alpha + lambda)`.
    BudgetPacing,
    /// Dual-paced `(1 + mu) v / (alpha + gamma mu)`.
    RoiPacing,
    /// Dual-paced with both multipliers.
    JointPacing,
}

impl BidderSpec {
    pub fn label(&self) -> &'static str {
        match self {
            Self::CtbrEe { .. } => "ctbr-ee",
            Self::CtbrSgdVanishing { .. } => "ctbr-sgd-vanishing",
            Self::CtbrSgdConstant { .. } => "ctbr-sgd-constant",
            Self::KnownDistribution => "known-p-threshold",
            Self::NeverBid => "never-bid",
            Self::Conserv => "conserv",
            Self::BudgetPacing => "budget-pacing",
            Self::RoiPacing => "roi-pacing",
            Self::JointPacing => "pacing",
        }
    }

    pub fn is_pacing(&self) -> bool {
        matches!(
            self,
            Self::BudgetPacing | Self::RoiPacing | Self::JointPacing
        )
    }

    /// The default benchmark roster: conservative threshold bidding with
    /// empirical estimation against the four benchmark bidders.
    pub fn default_roster() -> Vec<BidderSpec> {
        vec![
            Self::CtbrEe {
                schedule: ConfidenceSchedule::power_default(),
            },
            Self::Conserv,
            Self::BudgetPacing,
            Self::RoiPacing,
            Self::JointPacing,
        ]
    }
}

/// Full scenario description for a benchmark suite.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub regime: Regime,
    pub params: BuyerParams,
    pub support: Vec<(f64, f64)>,
    pub instances: usize,
    pub horizon: usize,
    pub bidders: Vec<BidderSpec>,
    pub seed: u64,
    /// Keep full per-period records (memory scales with
    /// `instances * bidders * horizon`).
    pub collect_records: bool,
    /// Hard-stop benchmark bidders at the budget `rho * T`. The
    /// conservative threshold bidders never hard-stop.
    pub benchmark_hard_stop: bool,
}

impl ScenarioConfig {
    pub fn desk_scale(regime: Regime, seed: u64) -> Self {
        Self {
            regime,
            params: regime.reference_params(),
            support: ratio_grid_support(),
            instances: 10,
            horizon: 10_000,
            bidders: BidderSpec::default_roster(),
            seed,
            collect_records: false,
            benchmark_hard_stop: true,
        }
    }
}

/// The 19 pairs of the `{0.2, 0.4, 0.6, 0.8, 1.0}^2` grid with distinct
/// value-to-cost ratios: one reduced-fraction representative per ratio.
pub fn ratio_grid_support() -> Vec<(f64, f64)> {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let mut pairs = Vec::new();
    for i in 1..=5u32 {
        for j in 1..=5u32 {
            if gcd(i, j) == 1 {
                pairs.push((0.2 * i as f64, 0.2 * j as f64));
            }
        }
    }
    pairs
}

/// Rejection-sample an occurrence distribution whose optimal solution
/// exhibits the regime's binding pattern. Entries are uniform on (0, 1)
/// rescaled to sum 1.
pub fn sample_regime_instance(
    regime: Regime,
    params: &BuyerParams,
    support: &[(f64, f64)],
    rng: &mut RandomSource,
) -> Result<MarketModel> {
    const MAX_ATTEMPTS: usize = 100_000;
    let k = support.len();
    let base = MarketModel::new(support, &vec![1.0 / k as f64; k])?;
    for _ in 0..MAX_ATTEMPTS {
        let mut probs: Vec<f64> = (0..k).map(|_| rng.uniform()).collect();
        let sum: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= sum);
        let market = base.with_probs(&probs)?;
        if classify_instance(&market, params)? == Some(regime) {
            return Ok(market);
        }
    }
    Err(Error::RegimeInfeasible {
        attempts: MAX_ATTEMPTS,
    })
}

/// Binding pattern of the expected problem, if it matches a regime.
pub fn classify_instance(market: &MarketModel, params: &BuyerParams) -> Result<Option<Regime>> {
    let sol = hindsight::solve_threshold(
        market.probs(),
        params.alpha,
        params.gamma,
        params.rho,
        market,
    )?;
    let mean_spend: f64 = market
        .probs()
        .iter()
        .zip(market.arrivals())
        .map(|(p, a)| p * a.cost)
        .sum();
    let scale = 1.0 + params.rho + mean_spend;
    let roi_binding = sol.roi_slack.abs() <= 1e-9 * scale;
    let budget_binding = sol.budget_slack.abs() <= 1e-9 * scale;
    for regime in [
        Regime::RoiDominant,
        Regime::BudgetDominant,
        Regime::AlphaDominant,
    ] {
        if regime.matches(roi_binding, budget_binding) {
            return Ok(Some(regime));
        }
    }
    Ok(None)
}

/// Summary metrics of one bidder run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    /// Mean per-period utility.
    pub utility_rate: f64,
    /// Mean per-period utility divided by the optimal rate `U(p)`;
    /// undefined when the optimal rate is 0.
    pub normalized_utility: Option<f64>,
    /// Optimal per-period utility rate for the instance.
    pub optimal_rate: f64,
    /// `sum(v z) / sum(d z)`; `None` when nothing was spent.
    pub realized_roi: Option<f64>,
    /// Cumulative ROI balance nonnegative (vacuously true with no spend).
    pub roi_attained: bool,
    /// Total spend within the budget `rho * T`.
    pub budget_ok: bool,
    /// Spend as a fraction of the budget.
    pub final_depletion: f64,
    /// Hindsight optimum on the same stream minus realized utility.
    pub regret: f64,
}

fn metrics_from_record(
    market: &MarketModel,
    params: &BuyerParams,
    arrivals: &[usize],
    record: &RunRecord,
) -> Result<RunMetrics> {
    let horizon = arrivals.len() as f64;
    let counts = ArrivalCounts::from_indices(market, arrivals);
    let opt = hindsight::hindsight_opt_from_counts(market, params, &counts)?;
    let optimal_rate = hindsight::solve_threshold(
        market.probs(),
        params.alpha,
        params.gamma,
        params.rho,
        market,
    )?
    .objective;
    let budget = params.rho * horizon;
    let utility_rate = record.utility_total / horizon;
    Ok(RunMetrics {
        utility_rate,
        normalized_utility: (optimal_rate > 0.0).then(|| utility_rate / optimal_rate),
        optimal_rate,
        realized_roi: record.realized_roi(),
        roi_attained: record.roi_balance_total >= -1e-9 * (1.0 + record.value_total),
        budget_ok: record.spend_total <= budget * (1.0 + 1e-12) + 1e-9,
        final_depletion: record.spend_total / budget,
        regret: opt - record.utility_total,
    })
}

/// Run one bidder over a fixed arrival stream (type indices).
pub fn run_bidder_on_stream(
    market: &MarketModel,
    params: &BuyerParams,
    spec: &BidderSpec,
    arrivals: &[usize],
    rng: &mut RandomSource,
    hard_stop: bool,
) -> Result<(RunRecord, RunMetrics)> {
    let horizon = arrivals.len();
    let record = match spec {
        BidderSpec::CtbrEe { schedule } => ctbr::ctbr_run(
            market,
            params,
            LearnerConfig::EmpiricalEstimation,
            *schedule,
            arrivals,
            rng,
        )?,
        BidderSpec::CtbrSgdVanishing { schedule } => ctbr::ctbr_run(
            market,
            params,
            LearnerConfig::SgdVanishing,
            *schedule,
            arrivals,
            rng,
        )?,
        BidderSpec::CtbrSgdConstant { eta, schedule } => {
            let learner = match eta {
                Some(eta) => LearnerConfig::SgdConstant { eta: *eta },
                None => LearnerConfig::sgd_constant_for_horizon(horizon),
            };
            ctbr::ctbr_run(market, params, learner, *schedule, arrivals, rng)?
        }
        BidderSpec::KnownDistribution => {
            let sol = hindsight::solve_threshold(
                market.probs(),
                params.alpha,
                params.gamma,
                params.rho,
                market,
            )?;
            run_fixed_threshold(market, params, sol.head(), sol.remainder(), arrivals, rng)?
        }
        BidderSpec::NeverBid => run_benchmark(market, params, arrivals, hard_stop, |_, _, _| {
            Bid::Amount(0.0)
        })?,
        BidderSpec::Conserv => {
            let gamma = params.gamma;
            run_benchmark(market, params, arrivals, hard_stop, move |v, _, _| {
                pacing::conserv_bid(v, gamma)
            })?
        }
        BidderSpec::BudgetPacing | BidderSpec::RoiPacing | BidderSpec::JointPacing => {
            run_pacing(market, params, spec, arrivals, hard_stop)?
        }
    };
    let metrics = metrics_from_record(market, params, arrivals, &record)?;
    Ok((record, metrics))
}

/// Draw a stream and run one bidder over it; deterministic in `(rng, spec)`.
pub fn run_bidder_trial(
    market: &MarketModel,
    params: &BuyerParams,
    spec: &BidderSpec,
    horizon: usize,
    rng: &RandomSource,
    hard_stop: bool,
) -> Result<RunMetrics> {
    let mut arrivals_rng = rng.stream(rng.stream_id() ^ 0xa551);
    let arrivals = ctbr::draw_arrivals(market, horizon, &mut arrivals_rng);
    let mut bid_rng = rng.stream(rng.stream_id() ^ 0xb1d);
    let (_, metrics) =
        run_bidder_on_stream(market, params, spec, &arrivals, &mut bid_rng, hard_stop)?;
    Ok(metrics)
}

fn run_fixed_threshold(
    market: &MarketModel,
    params: &BuyerParams,
    head: usize,
    remainder: f64,
    arrivals: &[usize],
    rng: &mut RandomSource,
) -> Result<RunRecord> {
    let mut record = RunRecord::default();
    for (i, &k) in arrivals.iter().enumerate() {
        let a = *market.arrival(k);
        record.trace.push((head, remainder));
        let bid = ctbr::threshold_bid(a.value, head, remainder, market, rng)?;
        let win = bid.wins_against(a.cost);
        let z = if win { 1.0 } else { 0.0 };
        record.push(RunRow {
            t: i as u64 + 1,
            value: a.value,
            cost: a.cost,
            bid: bid.as_f64(),
            win,
            payment: a.cost * z,
            utility: (a.value - params.alpha * a.cost) * z,
            roi_balance: (a.value - params.gamma * a.cost) * z,
        });
    }
    Ok(record)
}

fn run_benchmark(
    market: &MarketModel,
    params: &BuyerParams,
    arrivals: &[usize],
    hard_stop: bool,
    mut bid_fn: impl FnMut(f64, f64, u64) -> Bid,
) -> Result<RunRecord> {
    let budget = params.rho * arrivals.len() as f64;
    let mut record = RunRecord::default();
    for (i, &k) in arrivals.iter().enumerate() {
        let a = *market.arrival(k);
        let mut bid = bid_fn(a.value, a.cost, i as u64 + 1);
        if hard_stop {
            bid = bid.capped(budget - record.spend_total);
        }
        let win = bid.wins_against(a.cost);
        let z = if win { 1.0 } else { 0.0 };
        record.push(RunRow {
            t: i as u64 + 1,
            value: a.value,
            cost: a.cost,
            bid: bid.as_f64(),
            win,
            payment: a.cost * z,
            utility: (a.value - params.alpha * a.cost) * z,
            roi_balance: (a.value - params.gamma * a.cost) * z,
        });
    }
    Ok(record)
}

fn run_pacing(
    market: &MarketModel,
    params: &BuyerParams,
    spec: &BidderSpec,
    arrivals: &[usize],
    hard_stop: bool,
) -> Result<RunRecord> {
    let horizon = arrivals.len();
    let budget = params.rho * horizon as f64;
    let mut state = PacingState::defaults_for_horizon(horizon);
    let mut record = RunRecord::default();
    for (i, &k) in arrivals.iter().enumerate() {
        let a = *market.arrival(k);
        let mut bid = match spec {
            BidderSpec::BudgetPacing => state.budget_bid(a.value, params.alpha),
            BidderSpec::RoiPacing => state.roi_bid(a.value, params.alpha, params.gamma),
            BidderSpec::JointPacing => state.joint_bid(a.value, params.alpha, params.gamma),
            _ => unreachable!("run_pacing called with a non-pacing spec"),
        };
        if hard_stop {
            bid = bid.capped(budget - record.spend_total);
        }
        let win = bid.wins_against(a.cost);
        let z = if win { 1.0 } else { 0.0 };
        let payment = a.cost * z;
        match spec {
            BidderSpec::BudgetPacing => state.update_budget_dual(params.rho, payment),
            BidderSpec::RoiPacing => {
                state.update_roi_dual(params.gamma, a.value * z, payment);
            }
            BidderSpec::JointPacing => {
                state.update_budget_dual(params.rho, payment);
                state.update_roi_dual(params.gamma, a.value * z, payment);
            }
            _ => unreachable!(),
        }
        record.push(RunRow {
            t: i as u64 + 1,
            value: a.value,
            cost: a.cost,
            bid: bid.as_f64(),
            win,
            payment,
            utility: (a.value - params.alpha * a.cost) * z,
            roi_balance: (a.value - params.gamma * a.cost) * z,
        });
    }
    Ok(record)
}

/// One run's identity and metrics inside a suite.
#[derive(Debug, Clone)]
pub struct SuiteRun {
    pub bidder: &'static str,
    pub instance: usize,
    pub metrics: RunMetrics,
    pub record: Option<RunRecord>,
}

/// Per-bidder aggregates across instances.
#[derive(Debug, Clone)]
pub struct SuiteRow {
    pub bidder: &'static str,
    pub regime: &'static str,
    pub median_norm_utility: f64,
    pub q25_norm_utility: f64,
    pub q75_norm_utility: f64,
    pub roi_attained_frac: f64,
    pub median_final_depletion: f64,
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub rows: Vec<SuiteRow>,
    pub runs: Vec<SuiteRun>,
}

impl SuiteResult {
    pub fn row(&self, bidder: &str) -> Option<&SuiteRow> {
        self.rows.iter().find(|r| r.bidder == bidder)
    }
}

/// Interpolated quantile of a sample (deterministic; sorts a copy).
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Run every bidder on common arrival streams across sampled instances and
/// aggregate medians and quartiles.
pub fn run_benchmark_suite(scenario: &ScenarioConfig) -> Result<SuiteResult> {
    let mut runs = Vec::new();
    for instance in 0..scenario.instances {
        let base = instance as u64 * 64;
        let mut sample_rng = RandomSource::new(scenario.seed, base);
        let market = sample_regime_instance(
            scenario.regime,
            &scenario.params,
            &scenario.support,
            &mut sample_rng,
        )?;
        let mut arrivals_rng = RandomSource::new(scenario.seed, base + 1);
        let arrivals = ctbr::draw_arrivals(&market, scenario.horizon, &mut arrivals_rng);
        for (j, spec) in scenario.bidders.iter().enumerate() {
            let mut bid_rng = RandomSource::new(scenario.seed, base + 2 + j as u64);
            let (record, metrics) = run_bidder_on_stream(
                &market,
                &scenario.params,
                spec,
                &arrivals,
                &mut bid_rng,
                scenario.benchmark_hard_stop,
            )?;
            runs.push(SuiteRun {
                bidder: spec.label(),
                instance,
                metrics,
                record: scenario.collect_records.then_some(record),
            });
        }
    }

    let mut rows = Vec::new();
    for spec in &scenario.bidders {
        let of_bidder: Vec<&SuiteRun> = runs
            .iter()
            .filter(|r| r.bidder == spec.label())
            .collect();
        let norm: Vec<f64> = of_bidder
            .iter()
            .map(|r| r.metrics.normalized_utility.unwrap_or(0.0))
            .collect();
        let depletion: Vec<f64> = of_bidder
            .iter()
            .map(|r| r.metrics.final_depletion)
            .collect();
        let attained = of_bidder.iter().filter(|r| r.metrics.roi_attained).count();
        rows.push(SuiteRow {
            bidder: spec.label(),
            regime: scenario.regime.label(),
            median_norm_utility: quantile(&norm, 0.5),
            q25_norm_utility: quantile(&norm, 0.25),
            q75_norm_utility: quantile(&norm, 0.75),
            roi_attained_frac: attained as f64 / of_bidder.len() as f64,
            median_final_depletion: quantile(&depletion, 0.5),
        });
    }
    Ok(SuiteResult { rows, runs })
}

/// Mean regret by horizon plus the fitted log-log slope.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub points: Vec<(usize, f64)>,
    pub slope: Option<f64>,
    pub warnings: Vec<String>,
}

/// Estimate how regret scales with the horizon: run `seeds_per` streams at
/// each horizon, average the regret, and fit a line to
/// `log(mean regret) ~ log T`. Nonpositive means are excluded with a
/// warning; fewer than 3 usable horizons or 20 seeds also warn.
pub fn regret_scaling_sweep(
    market: &MarketModel,
    params: &BuyerParams,
    spec: &BidderSpec,
    horizons: &[usize],
    seeds_per: usize,
    seed: u64,
    hard_stop: bool,
) -> Result<SweepResult> {
    let mut warnings = Vec::new();
    if horizons.len() < 3 {
        warnings.push(format!(
            "{} horizons is below the 3 recommended for a slope fit",
            horizons.len()
        ));
    }
    if seeds_per < 20 {
        warnings.push(format!(
            "{seeds_per} seeds per horizon is below the 20 recommended"
        ));
    }
    let mut points = Vec::new();
    for (hi, &horizon) in horizons.iter().enumerate() {
        let mut total = 0.0;
        for s in 0..seeds_per {
            let stream_base = (hi * seeds_per + s) as u64 * 4;
            let mut arrivals_rng = RandomSource::new(seed, stream_base);
            let arrivals = ctbr::draw_arrivals(market, horizon, &mut arrivals_rng);
            let mut bid_rng = RandomSource::new(seed, stream_base + 1);
            let (_, metrics) =
                run_bidder_on_stream(market, params, spec, &arrivals, &mut bid_rng, hard_stop)?;
            total += metrics.regret;
        }
        points.push((horizon, total / seeds_per as f64));
    }

    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|&(t, r)| {
            if r > 0.0 {
                Some(((t as f64).ln(), r.ln()))
            } else {
                warnings.push(format!("mean regret {r} at horizon {t} excluded from fit"));
                None
            }
        })
        .collect();
    let slope = if usable.len() >= 2 {
        let n = usable.len() as f64;
        let mean_x: f64 = usable.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_y: f64 = usable.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = usable.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
        let sxy: f64 = usable
            .iter()
            .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
            .sum();
        Some(sxy / sxx)
    } else {
        warnings.push("too few usable points for a slope fit".into());
        None
    };
    Ok(SweepResult {
        points,
        slope,
        warnings,
    })
}
