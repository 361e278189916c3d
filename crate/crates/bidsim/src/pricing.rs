//! Seller side: posted-price revenue against a budget- and ROI-constrained
//! buyer, price classification, the bell-shape structure check, and the
//! episodic binary-search pricing algorithm.
//!
//! For a fixed price `d` the optimal buyer behavior is the threshold
//! solution of the constrained LP over the valuation support, which induces
//! a take probability and hence the seller's per-period revenue
//! `pi(d) = d * take`. Traversed in increasing price order the revenue
//! curve rises over non-binding prices, plateaus at the budget rate while
//! the budget binds, and falls once the ROI constraint binds, which is what
//! makes binary search over prices sound.

use crate::ctbr::{self, ConfidenceSchedule, CtbrState, LearnerConfig};
use crate::hindsight::{self, HindsightSolution};
use crate::market::MarketModel;
use crate::rng::RandomSource;
use crate::threshold::ThresholdVector;
use crate::{Error, Result};

/// Slack tolerance for declaring a constraint binding, scaled like the
/// solver's feasibility checks.
const BINDING_TOL: f64 = 1e-9;

/// Posted-price market: buyer valuations with distribution, seller prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingModel {
    valuations: Vec<f64>,
    val_probs: Vec<f64>,
    prices: Vec<f64>,
    gamma: f64,
    rho: f64,
}

impl PricingModel {
    /// Valuations and prices must be strictly decreasing; the valuation
    /// distribution must be strictly positive and sum to 1. The buyer's
    /// capital cost is 0 in the posted-price setting (value-maximizing).
    pub fn new(
        valuations: &[f64],
        val_probs: &[f64],
        prices: &[f64],
        gamma: f64,
        rho: f64,
    ) -> Result<Self> {
        if valuations.is_empty() || prices.is_empty() {
            return Err(Error::InvalidParameter(
                "valuations and prices must be nonempty".into(),
            ));
        }
        if valuations.len() != val_probs.len() {
            return Err(Error::DimensionMismatch {
                left: valuations.len(),
                right: val_probs.len(),
            });
        }
        for w in valuations.windows(2) {
            if !(w[0] > w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "valuations must strictly decrease, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for w in prices.windows(2) {
            if !(w[0] > w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "prices must strictly decrease, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if valuations.iter().any(|&v| !(v > 0.0)) || prices.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::InvalidParameter(
                "valuations and prices must be strictly positive".into(),
            ));
        }
        let sum: f64 = val_probs.iter().sum();
        if val_probs.iter().any(|&p| !(p > 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(
                "valuation probabilities must be strictly positive and sum to 1".into(),
            ));
        }
        if !(gamma > 0.0) || !(rho > 0.0) {
            return Err(Error::InvalidParameter(
                "gamma and rho must be strictly positive".into(),
            ));
        }
        let val_probs: Vec<f64> = val_probs.iter().map(|p| p / sum).collect();
        Ok(Self {
            valuations: valuations.to_vec(),
            val_probs,
            prices: prices.to_vec(),
            gamma,
            rho,
        })
    }

    pub fn valuations(&self) -> &[f64] {
        &self.valuations
    }

    pub fn val_probs(&self) -> &[f64] {
        &self.val_probs
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn price_count(&self) -> usize {
        self.prices.len()
    }

    pub fn price_max(&self) -> f64 {
        self.prices[0]
    }

    pub fn price_min(&self) -> f64 {
        *self.prices.last().unwrap()
    }

    /// Violations of the non-triviality assumption: for every price `d`,
    /// the smallest valuation must fall below `gamma d` and the largest
    /// must exceed it, the mean margin must be bounded away from zero, and
    /// the budget rate must sit strictly between the price extremes.
    pub fn assumption_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let v_max = self.valuations[0];
        let v_min = *self.valuations.last().unwrap();
        for &d in &self.prices {
            let gd = self.gamma * d;
            if !(v_min < gd) {
                out.push(format!(
                    "price {d}: smallest valuation {v_min} is not below gamma*d = {gd}"
                ));
            }
            if !(v_max > gd) {
                out.push(format!(
                    "price {d}: largest valuation {v_max} does not exceed gamma*d = {gd} \
                     (optimal take probability is 0)"
                ));
            }
            let mean_margin: f64 = self
                .valuations
                .iter()
                .zip(&self.val_probs)
                .map(|(v, g)| g * (v - gd))
                .sum();
            if mean_margin.abs() <= 1e-12 {
                out.push(format!("price {d}: mean ROI margin is degenerate (~0)"));
            }
        }
        if !(self.price_max() > self.rho) {
            out.push(format!(
                "largest price {} does not exceed the budget rate {}",
                self.price_max(),
                self.rho
            ));
        }
        if !(self.price_min() < self.rho) {
            out.push(format!(
                "smallest price {} is not below the budget rate {}",
                self.price_min(),
                self.rho
            ));
        }
        out
    }

    /// True when `gamma * d` clears the whole valuation support, forcing a
    /// zero take probability (one of the assumption violations above).
    fn price_is_degenerate(&self, d: f64) -> bool {
        !(self.valuations[0] > self.gamma * d)
    }

    /// Minimum gap between unequal revenues over the price set (diagnostic).
    pub fn min_revenue_gap(&self) -> Result<f64> {
        let mut revenues: Vec<f64> = Vec::with_capacity(self.prices.len());
        for &d in &self.prices {
            revenues.push(self.evaluate_price(d)?.revenue);
        }
        let mut gap = f64::INFINITY;
        for i in 0..revenues.len() {
            for j in i + 1..revenues.len() {
                let diff = (revenues[i] - revenues[j]).abs();
                if diff > 1e-12 && diff < gap {
                    gap = diff;
                }
            }
        }
        Ok(gap)
    }

    /// Maximum per-period revenue and one price index attaining it.
    pub fn max_revenue(&self) -> Result<(usize, f64)> {
        let mut best = (0, f64::MIN);
        for (m, &d) in self.prices.iter().enumerate() {
            let pi = self.evaluate_price(d)?.revenue;
            if pi > best.1 {
                best = (m, pi);
            }
        }
        Ok(best)
    }

    /// Solve the buyer's problem at price `d` and derive revenue point data.
    pub fn evaluate_price(&self, d: f64) -> Result<RevenuePoint> {
        let (sol, _) = self.solve_at(d)?;
        let take_prob = sol.solution.dot(&self.val_probs);
        let revenue = d * take_prob;
        let scale = 1.0 + self.rho + d;
        let budget_binding = sol.budget_slack.abs() <= BINDING_TOL * scale;
        let roi_binding = sol.roi_slack.abs() <= BINDING_TOL * scale;
        let class = match (budget_binding, roi_binding) {
            (true, true) => PriceClass::BudgetAndRoiBinding,
            (true, false) => PriceClass::BudgetBinding,
            (false, true) => PriceClass::RoiBinding,
            (false, false) => PriceClass::NonBinding,
        };
        Ok(RevenuePoint {
            price: d,
            solution: sol.solution,
            utility: sol.objective,
            revenue,
            take_prob,
            class,
            roi_slack: sol.roi_slack,
            budget_slack: sol.budget_slack,
        })
    }

    fn solve_at(&self, d: f64) -> Result<(HindsightSolution, MarketModel)> {
        if !(d > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "price must be strictly positive, got {d}"
            )));
        }
        let pairs: Vec<(f64, f64)> = self.valuations.iter().map(|&v| (v, d)).collect();
        let market = MarketModel::new(&pairs, &self.val_probs)?;
        let sol = hindsight::solve_threshold(&self.val_probs, 0.0, self.gamma, self.rho, &market)?;
        Ok((sol, market))
    }

    /// Buyer-side product support `valuations x prices`, with uniform
    /// placeholder probabilities (the posted-price loop never samples from
    /// them). Ratio ties across prices are tolerated with a deterministic
    /// order.
    pub fn product_market(&self) -> Result<MarketModel> {
        let mut pairs = Vec::with_capacity(self.valuations.len() * self.prices.len());
        for &v in &self.valuations {
            for &d in &self.prices {
                pairs.push((v, d));
            }
        }
        let probs = vec![1.0 / pairs.len() as f64; pairs.len()];
        MarketModel::with_weak_ratio_order(&pairs, &probs)
    }
}

/// Which buyer constraints bind at the optimal solution for a price.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriceClass {
    NonBinding,
    BudgetBinding,
    RoiBinding,
    BudgetAndRoiBinding,
}

impl PriceClass {
    pub fn is_budget_binding(&self) -> bool {
        matches!(self, Self::BudgetBinding | Self::BudgetAndRoiBinding)
    }

    pub fn is_roi_binding(&self) -> bool {
        matches!(self, Self::RoiBinding | Self::BudgetAndRoiBinding)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::NonBinding => "non-binding",
            Self::BudgetBinding => "budget-binding",
            Self::RoiBinding => "roi-binding",
            Self::BudgetAndRoiBinding => "budget-and-roi-binding",
        }
    }
}

/// Revenue data for one price.
#[derive(Debug, Clone)]
pub struct RevenuePoint {
    pub price: f64,
    pub solution: ThresholdVector,
    /// Buyer's optimal utility at this price.
    pub utility: f64,
    /// Seller's per-period revenue `d * take_prob`.
    pub revenue: f64,
    pub take_prob: f64,
    pub class: PriceClass,
    pub roi_slack: f64,
    pub budget_slack: f64,
}

/// Buyer utility and optimal solution at a fixed price.
pub fn u_of_d(model: &PricingModel, d: f64) -> Result<(f64, ThresholdVector)> {
    let point = model.evaluate_price(d)?;
    Ok((point.utility, point.solution))
}

/// Seller per-period revenue under optimal buyer behavior.
pub fn revenue_pi(model: &PricingModel, d: f64) -> Result<f64> {
    Ok(model.evaluate_price(d)?.revenue)
}

/// Classification of a price by its binding constraints.
pub fn classify_price(model: &PricingModel, d: f64) -> Result<PriceClass> {
    Ok(model.evaluate_price(d)?.class)
}

/// Result of traversing the price list and checking the revenue structure.
#[derive(Debug, Clone)]
pub struct BellShapeReport {
    /// Revenue points in the model's (decreasing) price order.
    pub points: Vec<RevenuePoint>,
    /// Hard violations of the increase/plateau/decrease structure.
    pub violations: Vec<String>,
    /// Assumption violations; degenerate zero-take prices are exempted from
    /// the strict-decrease requirement and reported here instead.
    pub warnings: Vec<String>,
    /// Price indices (into the model's price list) classified budget-binding.
    pub plateau: Vec<usize>,
    /// Index of the first non-binding price in increasing price order.
    pub first_non_binding: Option<usize>,
    /// Index of the first budget-binding price in increasing price order.
    pub first_budget_binding: Option<usize>,
    /// Index of the first ROI-binding price in increasing price order.
    pub first_roi_binding: Option<usize>,
}

impl BellShapeReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verify the increase / plateau / decrease structure of the revenue curve.
///
/// Traversing prices in increasing order: (1) revenue strictly increases
/// across non-binding prices; (2) beyond the first budget-binding price no
/// price is non-binding; (3) beyond the first ROI-binding price every price
/// is ROI-binding with strictly decreasing revenue. Prices with zero
/// optimal take (assumption violations) only need weak decrease.
pub fn bell_shape_check(model: &PricingModel) -> Result<BellShapeReport> {
    let mut warnings = model.assumption_violations();
    let mut points = Vec::with_capacity(model.price_count());
    for &d in model.prices() {
        points.push(model.evaluate_price(d)?);
    }

    // Work in increasing price order (reverse of the stored list).
    let increasing: Vec<&RevenuePoint> = points.iter().rev().collect();
    let mut violations = Vec::new();

    for (i, a) in increasing.iter().enumerate() {
        for b in increasing.iter().skip(i + 1) {
            match a.class {
                PriceClass::NonBinding => {
                    if b.class == PriceClass::NonBinding && !(a.revenue < b.revenue) {
                        violations.push(format!(
                            "revenue fails to increase across non-binding prices {} -> {} \
                             ({} vs {})",
                            a.price, b.price, a.revenue, b.revenue
                        ));
                    }
                }
                PriceClass::BudgetBinding => {
                    if b.class == PriceClass::NonBinding {
                        violations.push(format!(
                            "non-binding price {} above budget-binding price {}",
                            b.price, a.price
                        ));
                    }
                }
                PriceClass::RoiBinding | PriceClass::BudgetAndRoiBinding => {
                    if !b.class.is_roi_binding() {
                        violations.push(format!(
                            "price {} above ROI-binding price {} is {}",
                            b.price,
                            a.price,
                            b.class.label()
                        ));
                    } else if model.price_is_degenerate(b.price) {
                        if b.revenue > a.revenue + 1e-12 {
                            violations.push(format!(
                                "revenue increases into the degenerate tail {} -> {}",
                                a.price, b.price
                            ));
                        }
                    } else if !(b.revenue < a.revenue) {
                        violations.push(format!(
                            "revenue fails to decrease across ROI-binding prices {} -> {} \
                             ({} vs {})",
                            a.price, b.price, a.revenue, b.revenue
                        ));
                    }
                }
            }
        }
    }
    warnings.dedup();

    let first = |pred: &dyn Fn(&RevenuePoint) -> bool| -> Option<usize> {
        increasing
            .iter()
            .position(|p| pred(p))
            .map(|i| model.price_count() - 1 - i)
    };
    let plateau: Vec<usize> = (0..points.len())
        .filter(|&m| points[m].class.is_budget_binding())
        .collect();

    Ok(BellShapeReport {
        first_non_binding: first(&|p| p.class == PriceClass::NonBinding),
        first_budget_binding: first(&|p| p.class.is_budget_binding()),
        first_roi_binding: first(&|p| p.class.is_roi_binding()),
        plateau,
        points,
        violations,
        warnings,
    })
}

/// A buyer that responds to posted prices.
pub trait PostedPriceBuyer {
    /// Take/leave decision for period `t` (1-based) at the given price.
    fn decide(&mut self, t: usize, price_index: usize, price: f64) -> bool;
}

/// Idealized buyer taking price `d` with the optimal probability
/// `pi(d) / d`; used to test the seller algorithm in isolation.
pub struct ClairvoyantBuyer {
    take_probs: Vec<f64>,
    rng: RandomSource,
}

impl ClairvoyantBuyer {
    pub fn new(model: &PricingModel, rng: RandomSource) -> Result<Self> {
        let mut take_probs = Vec::with_capacity(model.price_count());
        for &d in model.prices() {
            take_probs.push(model.evaluate_price(d)?.take_prob);
        }
        Ok(Self { take_probs, rng })
    }
}

impl PostedPriceBuyer for ClairvoyantBuyer {
    fn decide(&mut self, _t: usize, price_index: usize, _price: f64) -> bool {
        self.rng.bernoulli(self.take_probs[price_index])
    }
}

/// Live learning buyer: a conservative threshold bidder over the product
/// support, translating bids into take/leave decisions.
pub struct CtbrPostedPriceBuyer {
    state: CtbrState,
    valuations: Vec<f64>,
    val_probs: Vec<f64>,
    value_rng: RandomSource,
    bid_rng: RandomSource,
}

impl CtbrPostedPriceBuyer {
    pub fn new(
        model: &PricingModel,
        learner: LearnerConfig,
        schedule: ConfidenceSchedule,
        horizon: usize,
        rng: &RandomSource,
    ) -> Result<Self> {
        let market = model.product_market()?;
        let params = crate::market::BuyerParams::new(0.0, model.gamma(), model.rho())?;
        let state = ctbr::ctbr_init(&market, &params, learner, schedule, horizon)?;
        Ok(Self {
            state,
            valuations: model.valuations().to_vec(),
            val_probs: model.val_probs().to_vec(),
            value_rng: rng.stream(rng.stream_id() ^ 0x76616c75),
            bid_rng: rng.stream(rng.stream_id() ^ 0x626964),
        })
    }

    pub fn state(&self) -> &CtbrState {
        &self.state
    }
}

impl PostedPriceBuyer for CtbrPostedPriceBuyer {
    fn decide(&mut self, _t: usize, _price_index: usize, price: f64) -> bool {
        let v = self.valuations[self.value_rng.categorical(&self.val_probs)];
        ctbr::ctbr_step(&mut self.state, v, price, &mut self.bid_rng)
            .map(|out| out.win)
            .unwrap_or(false)
    }
}

/// Phase marker for pricing-run rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PricePhase {
    Explore,
    Exploit,
}

impl PricePhase {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Explore => "explore",
            Self::Exploit => "exploit",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PricingRow {
    pub t: u64,
    pub price_index: usize,
    pub price: f64,
    pub take: bool,
    pub phase: PricePhase,
}

/// One completed exploration episode.
#[derive(Debug, Clone, Copy)]
pub struct EpisodeInfo {
    pub price_index: usize,
    pub start: u64,
    pub len: usize,
    pub take_rate: f64,
}

/// Full record of a pricing run.
#[derive(Debug, Clone, Default)]
pub struct PricingRunRecord {
    pub rows: Vec<PricingRow>,
    /// Estimated per-period revenue by price index; `None` if unexplored.
    pub pi_hat: Vec<Option<f64>>,
    pub episodes: Vec<EpisodeInfo>,
    /// Exploited price index (best recorded estimate).
    pub chosen: Option<usize>,
    /// First exploitation period, when the run got that far.
    pub exploit_start: Option<u64>,
    pub revenue_total: f64,
    /// False when the horizon ran out during exploration.
    pub complete: bool,
}

impl PricingRunRecord {
    /// Mean per-period revenue over the exploitation phase.
    pub fn exploit_mean_revenue(&self) -> Option<f64> {
        let start = self.exploit_start?;
        let rows: Vec<&PricingRow> = self.rows.iter().filter(|r| r.t >= start).collect();
        if rows.is_empty() {
            return None;
        }
        let total: f64 = rows
            .iter()
            .map(|r| if r.take { r.price } else { 0.0 })
            .sum();
        Some(total / rows.len() as f64)
    }
}

/// Episodic binary-search pricing over a decreasing price list.
///
/// Explore the largest and smallest prices for one episode each, then
/// binary-search the interior: each iteration explores the (at most two)
/// unrecorded midpoint prices, moves toward the side with the larger
/// estimate, and tracks the incumbent best. All remaining periods exploit
/// the incumbent. Each price is explored at most once; ties keep the
/// incumbent. If the horizon runs out mid-exploration the run ends with
/// partial results and `complete = false`.
pub fn binary_search_pricing(
    prices: &[f64],
    episode_len: usize,
    horizon: usize,
    buyer: &mut dyn PostedPriceBuyer,
) -> Result<PricingRunRecord> {
    let m_count = prices.len();
    if m_count == 0 || episode_len == 0 {
        return Err(Error::InvalidParameter(
            "need at least one price and a positive episode length".into(),
        ));
    }
    if horizon < 2 * episode_len {
        return Err(Error::HorizonTooSmall {
            horizon,
            reason: format!("initial exploration needs 2 episodes of {episode_len}"),
        });
    }

    let mut record = PricingRunRecord {
        pi_hat: vec![None; m_count],
        complete: true,
        ..Default::default()
    };
    let mut t: u64 = 0;

    let mut explore = |m: usize, record: &mut PricingRunRecord, t: &mut u64| -> bool {
        let start = *t + 1;
        let mut takes = 0usize;
        let mut len = 0usize;
        for _ in 0..episode_len {
            if *t as usize >= horizon {
                break;
            }
            *t += 1;
            len += 1;
            let take = buyer.decide(*t as usize, m, prices[m]);
            if take {
                takes += 1;
                record.revenue_total += prices[m];
            }
            record.rows.push(PricingRow {
                t: *t,
                price_index: m,
                price: prices[m],
                take,
                phase: PricePhase::Explore,
            });
        }
        let take_rate = if len > 0 { takes as f64 / len as f64 } else { 0.0 };
        record.pi_hat[m] = Some(prices[m] * take_rate);
        record.episodes.push(EpisodeInfo {
            price_index: m,
            start,
            len,
            take_rate,
        });
        len == episode_len
    };

    // Initial exploration of the price extremes.
    let mut ok = explore(0, &mut record, &mut t);
    ok = ok && explore(m_count - 1, &mut record, &mut t);
    let mut best = 0usize;
    if record.pi_hat[m_count - 1] > record.pi_hat[best] {
        best = m_count - 1;
    }

    // Binary search; indices are signed because the right edge may step
    // below the left edge on termination.
    let mut lo: i64 = 0;
    let mut hi: i64 = m_count as i64 - 1;
    let mut mid = (lo + hi) / 2;
    while lo < hi && ok {
        for m in [mid as usize, mid as usize + 1] {
            if record.pi_hat[m].is_none() {
                ok = explore(m, &mut record, &mut t);
                if !ok {
                    break;
                }
            }
        }
        if !ok {
            break;
        }
        let here = record.pi_hat[mid as usize];
        let right = record.pi_hat[mid as usize + 1];
        if here < right {
            if right > record.pi_hat[best] {
                best = mid as usize + 1;
            }
            lo = mid + 1;
        } else {
            if here > record.pi_hat[best] {
                best = mid as usize;
            }
            hi = mid - 1;
        }
        mid = (lo + hi) / 2;
    }

    record.chosen = Some(best);
    if !ok {
        record.complete = false;
        return Ok(record);
    }

    record.exploit_start = Some(t + 1);
    while (t as usize) < horizon {
        t += 1;
        let take = buyer.decide(t as usize, best, prices[best]);
        if take {
            record.revenue_total += prices[best];
        }
        record.rows.push(PricingRow {
            t,
            price_index: best,
            price: prices[best],
            take,
            phase: PricePhase::Exploit,
        });
    }
    Ok(record)
}

/// Monte-Carlo seller regret of a pricing run: `T max_d pi(d)` minus the
/// realized revenue. Uses model internals, so it is a simulator diagnostic,
/// not information available to the seller algorithm.
pub fn seller_regret(model: &PricingModel, record: &PricingRunRecord) -> Result<f64> {
    let (_, best) = model.max_revenue()?;
    Ok(best * record.rows.len() as f64 - record.revenue_total)
}
