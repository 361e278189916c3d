//! Conservative threshold bidding under budget and ROI constraints.
//!
//! Each period the bidder randomizes over two bids, `v / theta^J` and
//! `v / theta^(J+1)`, so that arrival types `1..=J` are won surely and type
//! `J+1` with the remainder probability `q`. The pair `(J, q)` is re-derived
//! every period from a distribution estimate supplied by a pluggable
//! learner, biased conservatively by a confidence bound `ell_t`: the bound
//! widens the candidate threshold sets and shrinks the remainder, trading
//! utility for constraint safety.
//!
//! Bid probability convention: the larger bid `v / theta^(J+1)` is submitted
//! with probability `q`, so the type-`(J+1)` win probability is exactly `q`
//! and expected per-type outcomes match the hindsight solution.

use crate::market::{BuyerParams, MarketModel};
use crate::threshold::{self, ThresholdVector, MAX_REMAINDER};
use crate::{Error, Result};

/// Relative tolerance for the win comparison `bid >= cost`. Ties are won;
/// the slack absorbs rounding in bids of the form `v / (v'/d')`, which sit
/// exactly on a support cost. Distinct support ratios are separated by far
/// more than this.
const WIN_TOL: f64 = 1e-12;

/// A submitted bid. The sentinel wins against every cost, standing in for
/// `v / theta^(K+1)` with `theta^(K+1) = 0` (and for unbounded paced bids).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bid {
    Amount(f64),
    AlwaysWin,
}

impl Bid {
    pub fn wins_against(&self, cost: f64) -> bool {
        match self {
            Bid::Amount(b) => *b >= cost * (1.0 - WIN_TOL),
            Bid::AlwaysWin => true,
        }
    }

    /// Numeric view for reporting; the sentinel maps to infinity.
    pub fn as_f64(&self) -> f64 {
        match self {
            Bid::Amount(b) => *b,
            Bid::AlwaysWin => f64::INFINITY,
        }
    }

    /// Cap the bid at a remaining-budget amount. In a second-price auction
    /// the payment never exceeds the bid, so this enforces a hard budget.
    pub fn capped(&self, remaining: f64) -> Bid {
        let r = remaining.max(0.0);
        match self {
            Bid::Amount(b) => Bid::Amount(b.min(r)),
            Bid::AlwaysWin => Bid::Amount(r),
        }
    }
}

/// One-hot marker of which arrival type occurred in a period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OccurrenceIndicator {
    index: usize,
    dim: usize,
}

impl OccurrenceIndicator {
    pub fn new(index: usize, dim: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                index: index + 1,
                len: dim,
            });
        }
        Ok(Self { index, dim })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn one_hot(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.dim];
        s[self.index] = 1.0;
        s
    }
}

/// Distribution learner plugged into the bidding framework.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearnerConfig {
    /// Running empirical frequency: `p_(t+1) = (t p_t + s_t) / (t + 1)`.
    EmpiricalEstimation,
    /// Projected SGD step toward the observation with step size `1/t`.
    SgdVanishing,
    /// Projected SGD with a constant step size (default `T^(-2/3)`).
    SgdConstant { eta: f64 },
}

impl LearnerConfig {
    /// Constant-step SGD at the horizon-tuned default `eta = T^(-2/3)`.
    pub fn sgd_constant_for_horizon(horizon: usize) -> Self {
        Self::SgdConstant {
            eta: (horizon as f64).powf(-2.0 / 3.0),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Self::SgdConstant { eta } = self {
            if !(*eta > 0.0 && *eta < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "constant SGD step size must lie in (0, 1), got {eta}"
                )));
            }
        }
        Ok(())
    }

    /// Update the estimate in place given the period-`t` observation.
    pub fn update(&self, p_hat: &mut [f64], s: &OccurrenceIndicator, t: u64) {
        match self {
            Self::EmpiricalEstimation => {
                let t = t as f64;
                for p in p_hat.iter_mut() {
                    *p *= t / (t + 1.0);
                }
                p_hat[s.index] += 1.0 / (t + 1.0);
            }
            Self::SgdVanishing => sgd_step(p_hat, s.index, 1.0 / t as f64),
            Self::SgdConstant { eta } => sgd_step(p_hat, s.index, *eta),
        }
        // Hold the simplex invariant against drift over long runs.
        let sum: f64 = p_hat.iter().sum();
        for p in p_hat.iter_mut() {
            *p /= sum;
        }
    }
}

fn sgd_step(p_hat: &mut [f64], observed: usize, eta: f64) {
    let mut point: Vec<f64> = p_hat.iter().map(|p| (1.0 - eta) * p).collect();
    point[observed] += eta;
    let projected = project_simplex(&point);
    p_hat.copy_from_slice(&projected);
}

/// Euclidean projection onto the probability simplex (sort-and-threshold).
pub fn project_simplex(u: &[f64]) -> Vec<f64> {
    let mut sorted = u.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut prefix = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in sorted.iter().enumerate() {
        prefix += uj;
        let candidate = (prefix - 1.0) / (j + 1) as f64;
        if uj - candidate > 0.0 {
            tau = candidate;
        }
    }
    u.iter().map(|&ui| (ui - tau).max(0.0)).collect()
}

/// Confidence-bound sequence used to bias the threshold estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConfidenceSchedule {
    /// `sqrt(2 K log(2T) / t)`, matching empirical estimation.
    EeTheory,
    /// `sqrt((600 log(T log T) + 12) / t)`, matching vanishing-step SGD.
    SgdVanishingTheory,
    /// `A (1 - 2 eta)^((t-1)/2) + B sqrt(eta)` with
    /// `A = sqrt(2 + 16 sqrt(log(T log T)))`, `B = 2 sqrt(1 + 72 log(T log T))`.
    SgdConstantTheory { eta: f64 },
    /// `t^(-s) / (max(cost_max, margin_max) sqrt(K))`; the practical choice,
    /// `s = 1` being the comparison configuration.
    Power { s: f64 },
    /// Fixed value, for diagnostics; 0 recovers the known-distribution
    /// formulas exactly.
    Constant { value: f64 },
}

impl ConfidenceSchedule {
    pub fn power_default() -> Self {
        Self::Power { s: 1.0 }
    }

    fn ell(&self, t: u64, horizon: usize, k_count: usize, norm: f64) -> f64 {
        let t = t as f64;
        let big_t = horizon as f64;
        match self {
            Self::EeTheory => (2.0 * k_count as f64 * (2.0 * big_t).ln() / t).sqrt(),
            Self::SgdVanishingTheory => ((600.0 * (big_t * big_t.ln()).ln() + 12.0) / t).sqrt(),
            Self::SgdConstantTheory { eta } => {
                let log_term = (big_t * big_t.ln()).ln();
                let a = (2.0 + 16.0 * log_term.sqrt()).sqrt();
                let b = 2.0 * (1.0 + 72.0 * log_term).sqrt();
                a * (1.0 - 2.0 * eta).powf((t - 1.0) / 2.0) + b * eta.sqrt()
            }
            Self::Power { s } => t.powf(-s) / (norm * (k_count as f64).sqrt()),
            Self::Constant { value } => *value,
        }
    }
}

/// Conservative threshold estimates derived from a distribution estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservativeThresholds {
    /// ROI threshold estimate (count of types deemed ROI-affordable).
    pub roi_head: usize,
    /// Raw ROI remainder estimate, before clamping at 0.
    pub q_roi: f64,
    /// Budget threshold estimate.
    pub budget_head: usize,
    /// Raw budget remainder estimate, before clamping at 0.
    pub q_budget: f64,
    /// `min{psi(roi_head, (q_roi)+), psi(budget_head, (q_budget)+), psi(kappa, 0)}`.
    pub target: ThresholdVector,
    /// Set when a remainder denominator had zero estimated mass (resolved as
    /// q = 0; unreachable when the estimate is the one that chose the head).
    pub zero_mass: bool,
}

/// The threshold-vector update: widen the candidate sets by
/// `sqrt(K) * bound * ell` and shrink the remainders by
/// `(sqrt(K) + 2) * bound * ell`, then clip at the capital-cost cutoff.
#[allow(clippy::too_many_arguments)]
pub fn conservative_update(
    p_hat: &[f64],
    margins: &[f64],
    costs: &[f64],
    rho: f64,
    kappa_alpha: usize,
    margin_max: f64,
    cost_max: f64,
    ell: f64,
) -> Result<ConservativeThresholds> {
    let k_count = p_hat.len();
    let sqrt_k = (k_count as f64).sqrt();
    let mut zero_mass = false;

    let mut roi_head = 0;
    let mut roi_sum_at_head = 0.0;
    let mut prefix = 0.0;
    for k in 0..k_count {
        prefix += p_hat[k] * margins[k];
        if prefix >= -sqrt_k * margin_max * ell {
            roi_head = k + 1;
            roi_sum_at_head = prefix;
        }
    }
    let q_roi = if roi_head == k_count {
        0.0
    } else {
        let den = p_hat[roi_head] * margins[roi_head].abs();
        if den == 0.0 {
            zero_mass = true;
            0.0
        } else {
            (roi_sum_at_head - (sqrt_k + 2.0) * margin_max * ell) / den
        }
    };

    let mut budget_head = 0;
    let mut spend_at_head = 0.0;
    let mut spend = 0.0;
    for k in 0..k_count {
        spend += p_hat[k] * costs[k];
        if spend <= rho + sqrt_k * cost_max * ell {
            budget_head = k + 1;
            spend_at_head = spend;
        }
    }
    let q_budget = if budget_head == k_count {
        0.0
    } else {
        let den = p_hat[budget_head] * costs[budget_head];
        if den == 0.0 {
            zero_mass = true;
            0.0
        } else {
            (rho - spend_at_head - (sqrt_k + 2.0) * cost_max * ell) / den
        }
    };

    let clamp = |q: f64, head: usize| {
        if head == k_count {
            0.0
        } else {
            q.clamp(0.0, MAX_REMAINDER)
        }
    };
    let x_roi = ThresholdVector::new(k_count, roi_head, clamp(q_roi, roi_head))?;
    let x_budget = ThresholdVector::new(k_count, budget_head, clamp(q_budget, budget_head))?;
    let x_kappa = ThresholdVector::new(k_count, kappa_alpha, 0.0)?;
    let target = threshold::min3(&x_roi, &x_budget, &x_kappa)?;

    Ok(ConservativeThresholds {
        roi_head,
        q_roi,
        budget_head,
        q_budget,
        target,
        zero_mass,
    })
}

/// Submit a threshold bid for valuation `v` against the strategy `(k, q)`:
/// `v / theta^(k+1)` with probability `q`, `v / theta^k` otherwise, where
/// `theta^0 = +inf` (bid 0, never wins) and `theta^(K+1) = 0` (always wins).
pub fn threshold_bid(
    v: f64,
    head: usize,
    remainder: f64,
    market: &MarketModel,
    rng: &mut crate::rng::RandomSource,
) -> Result<Bid> {
    let k_count = market.len();
    if head > k_count {
        return Err(Error::IndexOutOfRange {
            index: head,
            len: k_count,
        });
    }
    if !(0.0..1.0).contains(&remainder) {
        return Err(Error::InvalidParameter(format!(
            "remainder probability {remainder} not in [0, 1)"
        )));
    }
    let idx = if remainder > 0.0 && rng.bernoulli(remainder) {
        head + 1
    } else {
        head
    };
    Ok(if idx == 0 {
        Bid::Amount(0.0)
    } else if idx == k_count + 1 {
        Bid::AlwaysWin
    } else {
        Bid::Amount(v / market.arrival(idx - 1).ratio)
    })
}

/// Evolving bidder state.
#[derive(Debug, Clone)]
pub struct CtbrState {
    market: MarketModel,
    params: BuyerParams,
    learner: LearnerConfig,
    schedule: ConfidenceSchedule,
    horizon: usize,
    margins: Vec<f64>,
    margin_max: f64,
    cost_max: f64,
    kappa_alpha: usize,
    /// Current period (1-based).
    pub t: u64,
    /// Distribution estimate on the simplex.
    pub p_hat: Vec<f64>,
    /// Confidence bound used in the most recent update.
    pub ell: f64,
    pub roi_head_hat: usize,
    pub budget_head_hat: usize,
    pub q_roi_hat: f64,
    pub q_budget_hat: f64,
    /// Current bidding target `psi(head, remainder)`.
    pub head: usize,
    pub remainder: f64,
    /// Count of zero-estimated-mass denominator fallbacks.
    pub zero_mass_events: u64,
}

impl CtbrState {
    pub fn market(&self) -> &MarketModel {
        &self.market
    }
}

/// Outcome of a single bidding period.
#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    pub bid: Bid,
    pub win: bool,
    pub payment: f64,
    pub utility: f64,
    pub roi_balance: f64,
}

/// Initialize the bidder: uniform estimate, threshold head 1, remainder 0.
pub fn ctbr_init(
    market: &MarketModel,
    params: &BuyerParams,
    learner: LearnerConfig,
    schedule: ConfidenceSchedule,
    horizon: usize,
) -> Result<CtbrState> {
    learner.validate()?;
    if horizon < 1 {
        return Err(Error::HorizonTooSmall {
            horizon,
            reason: "need at least one period".into(),
        });
    }
    let k_count = market.len();
    let margins = market.roi_margins(params.gamma);
    let margin_max = market.roi_margin_max_abs(params.gamma);
    let cost_max = market.cost_max();
    let norm = margin_max.max(cost_max);
    let ell = schedule.ell(1, horizon, k_count, norm);
    Ok(CtbrState {
        market: market.clone(),
        params: *params,
        learner,
        schedule,
        horizon,
        margins,
        margin_max,
        cost_max,
        kappa_alpha: market.kappa(params.alpha),
        t: 1,
        p_hat: vec![1.0 / k_count as f64; k_count],
        ell,
        roi_head_hat: 1,
        budget_head_hat: 1,
        q_roi_hat: 0.0,
        q_budget_hat: 0.0,
        head: 1.min(k_count),
        remainder: 0.0,
        zero_mass_events: 0,
    })
}

/// Play one period: bid on `v`, resolve against the competing bid `d`,
/// then fold the observation into the estimate and refresh the thresholds.
pub fn ctbr_step(
    state: &mut CtbrState,
    value: f64,
    cost: f64,
    rng: &mut crate::rng::RandomSource,
) -> Result<StepOutcome> {
    let type_index = state.market.find_type(value, cost)?;
    let bid = threshold_bid(value, state.head, state.remainder, &state.market, rng)?;
    let win = bid.wins_against(cost);
    let z = if win { 1.0 } else { 0.0 };
    let outcome = StepOutcome {
        bid,
        win,
        payment: cost * z,
        utility: (value - state.params.alpha * cost) * z,
        roi_balance: (value - state.params.gamma * cost) * z,
    };

    let s = OccurrenceIndicator::new(type_index, state.market.len())?;
    state.learner.update(&mut state.p_hat, &s, state.t);
    let norm = state.margin_max.max(state.cost_max);
    state.ell = state
        .schedule
        .ell(state.t, state.horizon, state.market.len(), norm);
    let costs: Vec<f64> = state.market.arrivals().iter().map(|a| a.cost).collect();
    let thresholds = conservative_update(
        &state.p_hat,
        &state.margins,
        &costs,
        state.params.rho,
        state.kappa_alpha,
        state.margin_max,
        state.cost_max,
        state.ell,
    )?;
    if thresholds.zero_mass {
        state.zero_mass_events += 1;
    }
    state.roi_head_hat = thresholds.roi_head;
    state.budget_head_hat = thresholds.budget_head;
    state.q_roi_hat = thresholds.q_roi;
    state.q_budget_hat = thresholds.q_budget;
    state.head = thresholds.target.head();
    state.remainder = thresholds.target.remainder();
    state.t += 1;
    Ok(outcome)
}

/// One period of a full run.
#[derive(Debug, Clone, Copy)]
pub struct RunRow {
    pub t: u64,
    pub value: f64,
    pub cost: f64,
    pub bid: f64,
    pub win: bool,
    pub payment: f64,
    pub utility: f64,
    pub roi_balance: f64,
}

/// Complete record of a bidding run, shared by every bidder in the crate.
#[derive(Debug, Clone, Default)]
pub struct RunRecord {
    pub rows: Vec<RunRow>,
    /// `(head, remainder)` in force when each bid was placed; empty for
    /// bidders without threshold state.
    pub trace: Vec<(usize, f64)>,
    pub utility_total: f64,
    pub spend_total: f64,
    pub value_total: f64,
    pub roi_balance_total: f64,
    pub wins_total: u64,
}

impl RunRecord {
    pub fn push(&mut self, row: RunRow) {
        self.utility_total += row.utility;
        self.spend_total += row.payment;
        self.roi_balance_total += row.roi_balance;
        if row.win {
            self.value_total += row.value;
            self.wins_total += 1;
        }
        self.rows.push(row);
    }

    /// Realized ROI `sum(v z) / sum(d z)`; `None` when nothing was spent.
    pub fn realized_roi(&self) -> Option<f64> {
        (self.spend_total > 0.0).then(|| self.value_total / self.spend_total)
    }
}

/// Run the bidder over a supplied arrival stream (type indices).
pub fn ctbr_run(
    market: &MarketModel,
    params: &BuyerParams,
    learner: LearnerConfig,
    schedule: ConfidenceSchedule,
    arrivals: &[usize],
    rng: &mut crate::rng::RandomSource,
) -> Result<RunRecord> {
    let mut state = ctbr_init(market, params, learner, schedule, arrivals.len())?;
    let mut record = RunRecord::default();
    for (i, &k) in arrivals.iter().enumerate() {
        let arrival = *market.arrival(k);
        record.trace.push((state.head, state.remainder));
        let out = ctbr_step(&mut state, arrival.value, arrival.cost, rng)?;
        record.push(RunRow {
            t: i as u64 + 1,
            value: arrival.value,
            cost: arrival.cost,
            bid: out.bid.as_f64(),
            win: out.win,
            payment: out.payment,
            utility: out.utility,
            roi_balance: out.roi_balance,
        });
    }
    Ok(record)
}

/// Draw an i.i.d. arrival stream from the market distribution.
pub fn draw_arrivals(
    market: &MarketModel,
    horizon: usize,
    rng: &mut crate::rng::RandomSource,
) -> Vec<usize> {
    (0..horizon)
        .map(|_| rng.categorical(market.probs()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hindsight::solve_threshold;
    use crate::rng::RandomSource;

    fn simple_market() -> MarketModel {
        // ratios 3, 1.25, 0.5
        MarketModel::new(&[(0.6, 0.2), (0.5, 0.4), (0.2, 0.4)], &[0.3, 0.4, 0.3]).unwrap()
    }

    #[test]
    fn deterministic_bid_when_remainder_zero() {
        let market = simple_market();
        let mut rng = RandomSource::new(1, 0);
        for _ in 0..20 {
            let bid = threshold_bid(0.6, 1, 0.0, &market, &mut rng).unwrap();
            assert_eq!(bid, Bid::Amount(0.6 / market.arrival(0).ratio));
        }
        // wins exactly the types with ratio >= theta^1
        let bid = threshold_bid(0.6, 1, 0.0, &market, &mut rng).unwrap();
        assert!(bid.wins_against(0.2));
        assert!(!bid.wins_against(0.4));
    }

    #[test]
    fn head_k_wins_every_type() {
        let market = simple_market();
        let mut rng = RandomSource::new(2, 0);
        let bid = threshold_bid(0.2, 3, 0.0, &market, &mut rng).unwrap();
        for arrival in market.arrivals() {
            assert!(bid.wins_against(arrival.cost));
        }
    }

    #[test]
    fn boundary_type_win_frequency_matches_remainder() {
        let market = simple_market();
        let mut rng = RandomSource::new(3, 0);
        let draws = 100_000;
        let mut wins = 0;
        // head 1, remainder 0.5: a type-2 arrival should be won w.p. 0.5
        let arrival = market.arrival(1);
        for _ in 0..draws {
            let bid = threshold_bid(arrival.value, 1, 0.5, &market, &mut rng).unwrap();
            if bid.wins_against(arrival.cost) {
                wins += 1;
            }
        }
        let freq = wins as f64 / draws as f64;
        assert!((freq - 0.5).abs() < 0.01, "win frequency {freq}");
    }

    #[test]
    fn invalid_bid_arguments_rejected() {
        let market = simple_market();
        let mut rng = RandomSource::new(1, 0);
        assert!(threshold_bid(0.5, 4, 0.0, &market, &mut rng).is_err());
        assert!(threshold_bid(0.5, 1, 1.0, &market, &mut rng).is_err());
    }

    #[test]
    fn init_state_matches_line_one() {
        let market = MarketModel::new(
            &[(0.8, 0.2), (0.6, 0.3), (0.4, 0.4), (0.2, 0.4)],
            &[0.25; 4],
        )
        .unwrap();
        let params = BuyerParams::new(1.0, 1.2, 0.3).unwrap();
        let state = ctbr_init(
            &market,
            &params,
            LearnerConfig::EmpiricalEstimation,
            ConfidenceSchedule::power_default(),
            100,
        )
        .unwrap();
        assert_eq!(state.p_hat, vec![0.25; 4]);
        assert_eq!(state.head, 1);
        assert_eq!(state.remainder, 0.0);
        assert!(state.ell > 0.0);

        let tiny = MarketModel::new(&[(1.0, 0.5)], &[1.0]).unwrap();
        let state = ctbr_init(
            &tiny,
            &params,
            LearnerConfig::EmpiricalEstimation,
            ConfidenceSchedule::power_default(),
            10,
        )
        .unwrap();
        assert_eq!(state.head, 1);
    }

    #[test]
    fn zero_bound_with_true_distribution_recovers_hindsight_thresholds() {
        let market = simple_market();
        let params = BuyerParams::new(1.0, 1.2, 0.25).unwrap();
        let probs = market.probs().to_vec();
        let sol = solve_threshold(&probs, params.alpha, params.gamma, params.rho, &market).unwrap();
        let costs: Vec<f64> = market.arrivals().iter().map(|a| a.cost).collect();
        let thr = conservative_update(
            &probs,
            &market.roi_margins(params.gamma),
            &costs,
            params.rho,
            market.kappa(params.alpha),
            market.roi_margin_max_abs(params.gamma),
            market.cost_max(),
            0.0,
        )
        .unwrap();
        assert_eq!(thr.roi_head, sol.roi_head);
        assert_eq!(thr.budget_head, sol.budget_head);
        assert!((thr.q_roi - sol.q_roi).abs() < 1e-12);
        assert!((thr.q_budget - sol.q_budget).abs() < 1e-12);
        assert_eq!(thr.target.head(), sol.head());
        assert!((thr.target.remainder() - sol.remainder()).abs() < 1e-12);
    }

    #[test]
    fn conservative_update_matches_direct_enumeration() {
        // hand-set estimate and bound, checked against literal max-set scans
        let market = simple_market();
        let gamma = 1.3;
        let rho = 0.3;
        let p_hat = vec![0.5, 0.2, 0.3];
        let ell = 0.05;
        let margins = market.roi_margins(gamma);
        let costs: Vec<f64> = market.arrivals().iter().map(|a| a.cost).collect();
        let w_bar = market.roi_margin_max_abs(gamma);
        let d_bar = market.cost_max();
        let kappa = market.kappa(1.0);
        let thr =
            conservative_update(&p_hat, &margins, &costs, rho, kappa, w_bar, d_bar, ell).unwrap();

        let sqrt_k = 3f64.sqrt();
        let mut r_expect = 0;
        for k in 1..=3 {
            let sum: f64 = (0..k).map(|i| p_hat[i] * margins[i]).sum();
            if sum >= -sqrt_k * w_bar * ell {
                r_expect = k;
            }
        }
        let mut b_expect = 0;
        for k in 1..=3 {
            let sum: f64 = (0..k).map(|i| p_hat[i] * costs[i]).sum();
            if sum <= rho + sqrt_k * d_bar * ell {
                b_expect = k;
            }
        }
        assert_eq!(thr.roi_head, r_expect);
        assert_eq!(thr.budget_head, b_expect);
        if r_expect < 3 {
            let num: f64 = (0..r_expect).map(|i| p_hat[i] * margins[i]).sum::<f64>()
                - (sqrt_k + 2.0) * w_bar * ell;
            let den = p_hat[r_expect] * margins[r_expect].abs();
            assert!((thr.q_roi - num / den).abs() < 1e-12);
        }
        if b_expect < 3 {
            let num: f64 = rho
                - (0..b_expect).map(|i| p_hat[i] * costs[i]).sum::<f64>()
                - (sqrt_k + 2.0) * d_bar * ell;
            let den = p_hat[b_expect] * costs[b_expect];
            assert!((thr.q_budget - num / den).abs() < 1e-12);
        }
    }

    #[test]
    fn remainder_estimates_stay_below_one() {
        let market = simple_market();
        let params = BuyerParams::new(1.0, 1.2, 0.25).unwrap();
        let mut state = ctbr_init(
            &market,
            &params,
            LearnerConfig::EmpiricalEstimation,
            ConfidenceSchedule::power_default(),
            2_000,
        )
        .unwrap();
        let mut rng = RandomSource::new(11, 0);
        let mut arrivals_rng = RandomSource::new(11, 1);
        for _ in 0..2_000 {
            let k = arrivals_rng.categorical(market.probs());
            let a = *market.arrival(k);
            ctbr_step(&mut state, a.value, a.cost, &mut rng).unwrap();
            assert!(state.q_roi_hat < 1.0);
            assert!(state.q_budget_hat < 1.0);
            assert!(state.remainder < 1.0);
            let sum: f64 = state.p_hat.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
        }
        assert_eq!(state.zero_mass_events, 0);
    }

    #[test]
    fn simplex_invariant_for_all_learners() {
        let mut rng = RandomSource::new(21, 0);
        for learner in [
            LearnerConfig::EmpiricalEstimation,
            LearnerConfig::SgdVanishing,
            LearnerConfig::SgdConstant { eta: 0.01 },
        ] {
            let mut p = vec![0.2; 5];
            for t in 1..=5_000u64 {
                let k = rng.index(5);
                learner.update(&mut p, &OccurrenceIndicator::new(k, 5).unwrap(), t);
                let sum: f64 = p.iter().sum();
                assert!((sum - 1.0).abs() <= 1e-12, "{learner:?} drifted to {sum}");
                assert!(p.iter().all(|&x| x >= 0.0));
            }
        }
    }

    #[test]
    fn larger_bound_is_more_conservative() {
        let market = simple_market();
        let gamma = 1.3;
        let rho = 0.3;
        let p_hat = vec![0.4, 0.35, 0.25];
        let margins = market.roi_margins(gamma);
        let costs: Vec<f64> = market.arrivals().iter().map(|a| a.cost).collect();
        let w_bar = market.roi_margin_max_abs(gamma);
        let d_bar = market.cost_max();
        let mut prev: Option<ConservativeThresholds> = None;
        for ell in [0.0, 0.02, 0.05, 0.1, 0.5] {
            let thr =
                conservative_update(&p_hat, &margins, &costs, rho, 3, w_bar, d_bar, ell).unwrap();
            if let Some(p) = prev {
                assert!(thr.roi_head >= p.roi_head);
                assert!(thr.budget_head >= p.budget_head);
                if thr.roi_head == p.roi_head {
                    assert!(thr.q_roi <= p.q_roi + 1e-12);
                }
                if thr.budget_head == p.budget_head {
                    assert!(thr.q_budget <= p.q_budget + 1e-12);
                }
            }
            prev = Some(thr);
        }
    }

    #[test]
    fn ee_update_examples_and_closed_form() {
        let learner = LearnerConfig::EmpiricalEstimation;
        let mut p = vec![0.5, 0.5];
        learner.update(&mut p, &OccurrenceIndicator::new(0, 2).unwrap(), 1);
        assert!((p[0] - 0.75).abs() < 1e-15 && (p[1] - 0.25).abs() < 1e-15);

        // t periods of type-1 arrivals from uniform start
        let mut p = vec![0.5, 0.5];
        let t_max = 40;
        for t in 1..=t_max {
            learner.update(&mut p, &OccurrenceIndicator::new(0, 2).unwrap(), t);
        }
        let tm = t_max as f64;
        assert!((p[0] - (0.5 + tm) / (tm + 1.0)).abs() < 1e-12);
        assert!((p[1] - 0.5 / (tm + 1.0)).abs() < 1e-12);

        // random streams match accumulate-and-divide
        let mut rng = RandomSource::new(4, 0);
        let mut p = vec![1.0 / 3.0; 3];
        let mut counts = [0u64; 3];
        for t in 1..=200 {
            let k = rng.index(3);
            counts[k] += 1;
            learner.update(&mut p, &OccurrenceIndicator::new(k, 3).unwrap(), t);
            for i in 0..3 {
                let want = (1.0 / 3.0 + counts[i] as f64) / (t as f64 + 1.0);
                assert!((p[i] - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sgd_update_examples() {
        let mut p = vec![0.3, 0.7];
        LearnerConfig::SgdConstant { eta: 0.999_999 }.update(
            &mut p,
            &OccurrenceIndicator::new(0, 2).unwrap(),
            1,
        );
        assert!((p[0] - 1.0).abs() < 1e-5);

        let mut p = vec![0.5, 0.5];
        sgd_step(&mut p, 0, 0.0);
        assert_eq!(p, vec![0.5, 0.5]);

        let mut p = vec![0.5, 0.5];
        sgd_step(&mut p, 0, 0.5);
        assert!((p[0] - 0.75).abs() < 1e-15 && (p[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn simplex_projection_examples_and_grid_oracle() {
        let p = project_simplex(&[0.6, 0.6]);
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);

        let p = project_simplex(&[1.2, -0.2]);
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1] == 0.0);

        let mut rng = RandomSource::new(9, 0);
        for _ in 0..5 {
            let u: Vec<f64> = (0..3).map(|_| 3.0 * rng.uniform() - 1.0).collect();
            let p = project_simplex(&u);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            // coarse grid search over the simplex
            let mut best = f64::MAX;
            let mut best_point = [0.0; 3];
            let steps = 1000;
            for i in 0..=steps {
                for j in 0..=(steps - i) {
                    let x = [
                        i as f64 / steps as f64,
                        j as f64 / steps as f64,
                        (steps - i - j) as f64 / steps as f64,
                    ];
                    let dist: f64 = x.iter().zip(&u).map(|(a, b)| (a - b) * (a - b)).sum();
                    if dist < best {
                        best = dist;
                        best_point = x;
                    }
                }
            }
            let err: f64 = p
                .iter()
                .zip(&best_point)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(err < 2e-3, "projection differs from grid search by {err}");
        }
    }

    #[test]
    fn projection_is_idempotent() {
        let mut rng = RandomSource::new(10, 0);
        for _ in 0..50 {
            let u: Vec<f64> = (0..5).map(|_| 4.0 * rng.uniform() - 2.0).collect();
            let p = project_simplex(&u);
            let pp = project_simplex(&p);
            for (a, b) in p.iter().zip(&pp) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn every_bid_sits_on_the_two_support_points() {
        let market = simple_market();
        let params = BuyerParams::new(1.0, 1.2, 0.25).unwrap();
        let arrivals_rng = &mut RandomSource::new(12, 1);
        let arrivals = draw_arrivals(&market, 500, arrivals_rng);
        let mut state = ctbr_init(
            &market,
            &params,
            LearnerConfig::EmpiricalEstimation,
            ConfidenceSchedule::power_default(),
            arrivals.len(),
        )
        .unwrap();
        let mut rng = RandomSource::new(12, 0);
        for &k in &arrivals {
            let a = *market.arrival(k);
            let head = state.head;
            let out = ctbr_step(&mut state, a.value, a.cost, &mut rng).unwrap();
            let mut allowed = vec![];
            for idx in [head, head + 1] {
                if idx == 0 {
                    allowed.push(0.0);
                } else if idx <= market.len() {
                    allowed.push(a.value / market.arrival(idx - 1).ratio);
                } else {
                    allowed.push(f64::INFINITY);
                }
            }
            assert!(
                allowed.contains(&out.bid.as_f64()),
                "bid {} not in {allowed:?}",
                out.bid.as_f64()
            );
        }
    }

    #[test]
    fn degenerate_single_type_run_wins_everything() {
        // one profitable type, margin positive, cost within budget
        let market = MarketModel::new(&[(1.0, 0.2)], &[1.0]).unwrap();
        let params = BuyerParams::new(1.0, 1.5, 0.5).unwrap();
        let t = 200;
        let arrivals = vec![0usize; t];
        let mut rng = RandomSource::new(13, 0);
        let record = ctbr_run(
            &market,
            &params,
            LearnerConfig::EmpiricalEstimation,
            ConfidenceSchedule::power_default(),
            &arrivals,
            &mut rng,
        )
        .unwrap();
        assert_eq!(record.wins_total, t as u64);
        let want = t as f64 * (1.0 - 1.0 * 0.2);
        assert!((record.utility_total - want).abs() < 1e-9);
    }

    #[test]
    fn state_trace_converges_to_hindsight_thresholds() {
        let market = simple_market();
        let params = BuyerParams::new(1.0, 1.2, 0.25).unwrap();
        let probs = market.probs().to_vec();
        let sol = solve_threshold(&probs, params.alpha, params.gamma, params.rho, &market).unwrap();
        let arrivals = draw_arrivals(&market, 10_000, &mut RandomSource::new(14, 1));
        let record = ctbr_run(
            &market,
            &params,
            LearnerConfig::EmpiricalEstimation,
            ConfidenceSchedule::power_default(),
            &arrivals,
            &mut RandomSource::new(14, 0),
        )
        .unwrap();
        let (head, remainder) = *record.trace.last().unwrap();
        assert_eq!(head, sol.head());
        assert!(
            (remainder - sol.remainder()).abs() < 0.05,
            "remainder {remainder} vs optimal {}",
            sol.remainder()
        );
    }

    #[test]
    fn average_roi_balance_nonnegative_at_scale() {
        // one instance per parameter regime, T = 10000
        let market = simple_market();
        for (gamma, rho) in [(1.2, 0.05), (2.1, 0.4), (1.2, 0.4)] {
            let params = BuyerParams::new(1.0, gamma, rho).unwrap();
            let arrivals = draw_arrivals(&market, 10_000, &mut RandomSource::new(15, 1));
            let record = ctbr_run(
                &market,
                &params,
                LearnerConfig::EmpiricalEstimation,
                ConfidenceSchedule::power_default(),
                &arrivals,
                &mut RandomSource::new(15, 0),
            )
            .unwrap();
            let mean_balance = record.roi_balance_total / 10_000.0;
            assert!(
                mean_balance > -0.01,
                "gamma {gamma} rho {rho}: mean ROI balance {mean_balance}"
            );
        }
    }
}
