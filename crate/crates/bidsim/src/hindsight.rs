//! Exact solver for the two-constraint LP family
//!
//! ```text
//! max  sum_k n^k (v^k - alpha d^k) x^k
//! s.t. sum_k n^k (v^k - gamma d^k) x^k >= 0     (ROI)
//!      sum_k n^k d^k x^k <= c                   (budget)
//!      x in [0, 1]^K
//! ```
//!
//! The optimum is the elementwise minimum of three threshold vectors: a
//! fractional-knapsack solution for the budget, its mirror image for the
//! ROI constraint, and a hard cutoff at the last type whose value covers
//! the capital cost. [`lp_vertex_oracle`] solves the same LP by brute
//! vertex enumeration and exists purely to cross-check the closed form.
//! [`hindsight_opt`] evaluates the benchmark OPT on a realized arrival
//! sequence by solving over its type counts.

use crate::market::{BuyerParams, MarketModel};
use crate::threshold::{self, ThresholdVector, MAX_REMAINDER};
use crate::{Error, Result};

/// Partial sums this close to their comparison point are reported as
/// degenerate: the closed form stays valid but ties are broken by the exact
/// `>=`/`<=` comparisons, which float noise can flip.
const DEGENERACY_TOL: f64 = 1e-12;

/// Closed-form solution of the constrained LP.
#[derive(Debug, Clone)]
pub struct HindsightSolution {
    /// ROI threshold type `r` (count of leading types the ROI balance covers).
    pub roi_head: usize,
    /// Budget threshold type `b`.
    pub budget_head: usize,
    /// Last type with `v^k >= alpha d^k`.
    pub kappa_alpha: usize,
    /// Fractional remainder of the ROI-only solution.
    pub q_roi: f64,
    /// Fractional remainder of the budget-only solution.
    pub q_budget: f64,
    /// Optimal solution `x* = min{psi(r, q_roi), psi(b, q_budget), psi(kappa, 0)}`.
    pub solution: ThresholdVector,
    /// Optimal objective value.
    pub objective: f64,
    /// `sum n^k w^k x*^k` (nonnegative at the optimum).
    pub roi_slack: f64,
    /// `c - sum n^k d^k x*^k` (nonnegative at the optimum).
    pub budget_slack: f64,
    /// Near-degenerate partial sums encountered during construction.
    pub warnings: Vec<String>,
}

impl HindsightSolution {
    /// Head `J = min{r, b, kappa_alpha}` of the optimal threshold vector.
    pub fn head(&self) -> usize {
        self.solution.head()
    }

    /// Remainder probability `q` of the optimal threshold vector.
    pub fn remainder(&self) -> f64 {
        self.solution.remainder()
    }
}

/// Solve the LP by the threshold construction.
///
/// Conventions for empty max-sets: `r = 0` (forced by `w^1 < 0`) or `b = 0`
/// (forced by `n^1 d^1 > c`) with the remainder formulas applied verbatim
/// using the `k = 1` denominator; `r = K` or `b = K` take remainder 0. The
/// branch `r = 0` with `w^1 > 0` cannot occur.
pub fn solve_threshold(
    weights: &[f64],
    alpha: f64,
    gamma: f64,
    cap: f64,
    market: &MarketModel,
) -> Result<HindsightSolution> {
    let k_count = market.len();
    if weights.len() != k_count {
        return Err(Error::DimensionMismatch {
            left: weights.len(),
            right: k_count,
        });
    }
    if weights.iter().any(|&n| !(n > 0.0) || !n.is_finite()) {
        return Err(Error::InvalidParameter(
            "all solver weights must be strictly positive".into(),
        ));
    }
    if !(cap > 0.0) || !cap.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "budget cap must be strictly positive, got {cap}"
        )));
    }

    let margins = market.roi_margins(gamma);
    let mut warnings = Vec::new();

    // ROI threshold: last k whose weighted margin prefix stays nonnegative.
    let mut roi_head = 0;
    let mut roi_sum_at_head = 0.0;
    let mut prefix = 0.0;
    for k in 0..k_count {
        prefix += weights[k] * margins[k];
        if prefix.abs() <= DEGENERACY_TOL {
            warnings.push(format!(
                "ROI partial sum through type {} is {prefix:e}, within {DEGENERACY_TOL:e} of zero",
                k + 1
            ));
        }
        if prefix >= 0.0 {
            roi_head = k + 1;
            roi_sum_at_head = prefix;
        }
    }
    let q_roi = if roi_head == k_count {
        0.0
    } else {
        // Maximality of roi_head forces w at the boundary type negative, so
        // the quotient lies in [0, 1).
        let boundary = weights[roi_head] * margins[roi_head].abs();
        if boundary == 0.0 {
            warnings.push(format!(
                "zero denominator for the ROI remainder at type {}; taking q = 0",
                roi_head + 1
            ));
            0.0
        } else {
            (roi_sum_at_head / boundary).min(MAX_REMAINDER)
        }
    };

    // Budget threshold: fractional knapsack prefix under the cap.
    let mut budget_head = 0;
    let mut spend_at_head = 0.0;
    let mut spend = 0.0;
    for k in 0..k_count {
        let arrival = market.arrival(k);
        spend += weights[k] * arrival.cost;
        if (cap - spend).abs() <= DEGENERACY_TOL {
            warnings.push(format!(
                "budget partial sum through type {} is within {DEGENERACY_TOL:e} of the cap",
                k + 1
            ));
        }
        if spend <= cap {
            budget_head = k + 1;
            spend_at_head = spend;
        }
    }
    let q_budget = if budget_head == k_count {
        0.0
    } else {
        let boundary = weights[budget_head] * market.arrival(budget_head).cost;
        ((cap - spend_at_head) / boundary).clamp(0.0, MAX_REMAINDER)
    };

    let kappa_alpha = market.kappa(alpha);

    let x_roi = ThresholdVector::new(k_count, roi_head, q_roi)?;
    let x_budget = ThresholdVector::new(k_count, budget_head, q_budget)?;
    let x_kappa = ThresholdVector::new(k_count, kappa_alpha, 0.0)?;
    let solution = threshold::min3(&x_roi, &x_budget, &x_kappa)?;

    let objective_weights: Vec<f64> = (0..k_count)
        .map(|k| {
            let a = market.arrival(k);
            weights[k] * (a.value - alpha * a.cost)
        })
        .collect();
    let roi_weights: Vec<f64> = (0..k_count).map(|k| weights[k] * margins[k]).collect();
    let spend_weights: Vec<f64> = (0..k_count)
        .map(|k| weights[k] * market.arrival(k).cost)
        .collect();

    Ok(HindsightSolution {
        roi_head,
        budget_head,
        kappa_alpha,
        q_roi,
        q_budget,
        solution,
        objective: solution.dot(&objective_weights),
        roi_slack: solution.dot(&roi_weights),
        budget_slack: cap - solution.dot(&spend_weights),
        warnings,
    })
}

/// Largest support size the vertex oracle enumerates.
pub const ORACLE_MAX_TYPES: usize = 12;

/// Brute-force LP optimum by vertex enumeration.
///
/// Any optimal vertex of the box-plus-two-halfspace polytope has at most two
/// fractional coordinates. Enumerate every fractional index set of size
/// <= 2, every 0/1 assignment of the complement, and every choice of
/// constraints held at equality; solve the residual system, keep feasible
/// candidates, return the best. Ties prefer the lexicographically largest
/// solution, so cross-checks against [`solve_threshold`] compare objectives.
pub fn lp_vertex_oracle(
    weights: &[f64],
    alpha: f64,
    gamma: f64,
    cap: f64,
    market: &MarketModel,
) -> Result<(Vec<f64>, f64)> {
    let k_count = market.len();
    if k_count > ORACLE_MAX_TYPES {
        return Err(Error::OracleTooLarge {
            got: k_count,
            max: ORACLE_MAX_TYPES,
        });
    }
    if weights.len() != k_count {
        return Err(Error::DimensionMismatch {
            left: weights.len(),
            right: k_count,
        });
    }

    let obj: Vec<f64> = (0..k_count)
        .map(|k| {
            let a = market.arrival(k);
            weights[k] * (a.value - alpha * a.cost)
        })
        .collect();
    let roi: Vec<f64> = market
        .roi_margins(gamma)
        .iter()
        .zip(weights)
        .map(|(w, n)| n * w)
        .collect();
    let spend: Vec<f64> = (0..k_count)
        .map(|k| weights[k] * market.arrival(k).cost)
        .collect();

    let scale = 1.0 + cap.abs() + spend.iter().sum::<f64>();
    let feas_tol = 1e-9 * scale;

    let dot = |coef: &[f64], x: &[f64]| -> f64 { coef.iter().zip(x).map(|(c, v)| c * v).sum() };
    let lex_greater = |a: &[f64], b: &[f64]| -> bool {
        for (x, y) in a.iter().zip(b) {
            if x > y {
                return true;
            }
            if x < y {
                return false;
            }
        }
        false
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |x: Vec<f64>| {
        if !(x.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v))
            && dot(&roi, &x) >= -feas_tol
            && dot(&spend, &x) <= cap + feas_tol)
        {
            return;
        }
        let value = dot(&obj, &x);
        let better = match &best {
            None => true,
            Some((best_value, best_x)) => {
                let tol = 1e-12 * (1.0 + best_value.abs());
                value > best_value + tol
                    || (value >= best_value - tol && lex_greater(&x, best_x))
            }
        };
        if better {
            best = Some((value, x));
        }
    };

    let assignments = 1usize << k_count;
    // |F| = 0: pure 0/1 points.
    for mask in 0..assignments {
        let x: Vec<f64> = (0..k_count)
            .map(|k| if mask >> k & 1 == 1 { 1.0 } else { 0.0 })
            .collect();
        consider(x);
    }

    // |F| = 1: one fractional coordinate, one constraint tight.
    for free in 0..k_count {
        for mask in 0..assignments {
            if mask >> free & 1 == 1 {
                continue; // the free coordinate is handled separately
            }
            let mut x: Vec<f64> = (0..k_count)
                .map(|k| if mask >> k & 1 == 1 { 1.0 } else { 0.0 })
                .collect();
            for (coef, target) in [(&roi, 0.0), (&spend, cap)] {
                if coef[free].abs() < 1e-15 {
                    continue;
                }
                let rest: f64 = (0..k_count)
                    .filter(|&k| k != free)
                    .map(|k| coef[k] * x[k])
                    .sum();
                let v = (target - rest) / coef[free];
                if (0.0..=1.0).contains(&v) {
                    x[free] = v;
                    consider(x.clone());
                    x[free] = 0.0;
                }
            }
        }
    }

    // |F| = 2: two fractional coordinates, both constraints tight.
    for f1 in 0..k_count {
        for f2 in f1 + 1..k_count {
            for mask in 0..assignments {
                if mask >> f1 & 1 == 1 || mask >> f2 & 1 == 1 {
                    continue;
                }
                let mut x: Vec<f64> = (0..k_count)
                    .map(|k| if mask >> k & 1 == 1 { 1.0 } else { 0.0 })
                    .collect();
                let rest_roi: f64 = (0..k_count)
                    .filter(|&k| k != f1 && k != f2)
                    .map(|k| roi[k] * x[k])
                    .sum();
                let rest_spend: f64 = (0..k_count)
                    .filter(|&k| k != f1 && k != f2)
                    .map(|k| spend[k] * x[k])
                    .sum();
                // roi[f1] u + roi[f2] v = -rest_roi
                // spend[f1] u + spend[f2] v = cap - rest_spend
                let det = roi[f1] * spend[f2] - roi[f2] * spend[f1];
                if det.abs() < 1e-14 {
                    continue;
                }
                let rhs1 = -rest_roi;
                let rhs2 = cap - rest_spend;
                let u = (rhs1 * spend[f2] - roi[f2] * rhs2) / det;
                let v = (roi[f1] * rhs2 - rhs1 * spend[f1]) / det;
                if (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v) {
                    x[f1] = u;
                    x[f2] = v;
                    consider(x.clone());
                }
            }
        }
    }

    let (value, x) = best.expect("x = 0 is always feasible");
    Ok((x, value))
}

/// Per-type occurrence counts of a realized arrival sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalCounts {
    counts: Vec<u64>,
    total: u64,
}

impl ArrivalCounts {
    pub fn from_pairs(market: &MarketModel, realization: &[(f64, f64)]) -> Result<Self> {
        let mut counts = vec![0u64; market.len()];
        for &(v, d) in realization {
            counts[market.find_type(v, d)?] += 1;
        }
        Ok(Self::from_counts(counts))
    }

    pub fn from_indices(market: &MarketModel, indices: &[usize]) -> Self {
        let mut counts = vec![0u64; market.len()];
        for &i in indices {
            counts[i] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Hindsight benchmark `OPT` on a realized sequence: the LP over the
/// sequence's type counts with cap `rho * T`. Types that never occurred are
/// dropped (the solver requires strictly positive weights).
pub fn hindsight_opt(
    market: &MarketModel,
    params: &BuyerParams,
    realization: &[(f64, f64)],
) -> Result<f64> {
    let counts = ArrivalCounts::from_pairs(market, realization)?;
    hindsight_opt_from_counts(market, params, &counts)
}

/// [`hindsight_opt`] on precomputed counts.
pub fn hindsight_opt_from_counts(
    market: &MarketModel,
    params: &BuyerParams,
    counts: &ArrivalCounts,
) -> Result<f64> {
    if counts.total == 0 {
        return Ok(0.0);
    }
    let mut pairs = Vec::new();
    let mut probs = Vec::new();
    let mut weights = Vec::new();
    for (k, &n) in counts.counts.iter().enumerate() {
        if n > 0 {
            let a = market.arrival(k);
            pairs.push((a.value, a.cost));
            probs.push(n as f64 / counts.total as f64);
            weights.push(n as f64);
        }
    }
    let sub = MarketModel::with_weak_ratio_order(&pairs, &probs)?;
    let cap = params.rho * counts.total as f64;
    Ok(solve_threshold(&weights, params.alpha, params.gamma, cap, &sub)?.objective)
}

/// Regret of a run: hindsight optimum minus realized cumulative utility.
pub fn regret_of_run(
    market: &MarketModel,
    params: &BuyerParams,
    realization: &[(f64, f64)],
    realized_utility: f64,
) -> Result<f64> {
    Ok(hindsight_opt(market, params, realization)? - realized_utility)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;

    fn random_instance(
        rng: &mut RandomSource,
        k_range: std::ops::RangeInclusive<usize>,
    ) -> (MarketModel, Vec<f64>, f64, f64, f64) {
        loop {
            let k = *k_range.start() + rng.index(k_range.end() - k_range.start() + 1);
            let pairs: Vec<(f64, f64)> = (0..k)
                .map(|_| (0.1 + rng.uniform(), 0.1 + rng.uniform()))
                .collect();
            let mut ratios: Vec<f64> = pairs.iter().map(|(v, d)| v / d).collect();
            ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if ratios.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let probs = vec![1.0 / k as f64; k];
            let market = MarketModel::new(&pairs, &probs).unwrap();
            let weights: Vec<f64> = (0..k).map(|_| 0.1 + rng.uniform()).collect();
            let alpha = 2.0 * rng.uniform();
            let gamma = alpha + 2.0 * rng.uniform().max(1e-3);
            let total_spend: f64 = weights
                .iter()
                .zip(market.arrivals())
                .map(|(n, a)| n * a.cost)
                .sum();
            let cap = total_spend * (0.05 + 1.15 * rng.uniform());
            return (market, weights, alpha, gamma, cap);
        }
    }

    #[test]
    fn unconstrained_instance_takes_everything() {
        // ratios 3 and 2, gamma below both, generous cap
        let market = MarketModel::new(&[(0.6, 0.2), (0.8, 0.4)], &[0.5, 0.5]).unwrap();
        let n = [2.0, 3.0];
        let sol = solve_threshold(&n, 0.5, 1.5, 10.0, &market).unwrap();
        assert_eq!(sol.solution, ThresholdVector::ones(2));
        let want: f64 = n
            .iter()
            .zip(market.arrivals())
            .map(|(n, a)| n * (a.value - 0.5 * a.cost))
            .sum();
        assert!((sol.objective - want).abs() < 1e-12);
        assert!(sol.roi_slack > 0.0 && sol.budget_slack > 0.0);
    }

    #[test]
    fn fractional_knapsack_single_type() {
        let market = MarketModel::new(&[(1.0, 1.0)], &[1.0]).unwrap();
        let sol = solve_threshold(&[1.0], 0.0, 0.5, 0.3, &market).unwrap();
        assert_eq!(sol.budget_head, 0);
        assert!((sol.q_budget - 0.3).abs() < 1e-12);
        assert_eq!(sol.roi_head, 1);
        assert_eq!(sol.kappa_alpha, 1);
        assert_eq!(sol.solution.expand(), vec![0.3]);
        assert!((sol.objective - 0.3).abs() < 1e-12);
    }

    #[test]
    fn roi_forbids_all_wins() {
        // single type with negative margin: optimum is the zero vector
        let market = MarketModel::new(&[(0.2, 1.0)], &[1.0]).unwrap();
        let sol = solve_threshold(&[1.0], 0.0, 1.2, 0.5, &market).unwrap();
        assert_eq!(sol.roi_head, 0);
        assert_eq!(sol.q_roi, 0.0);
        assert_eq!(sol.solution, ThresholdVector::zeros(1));
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn closed_form_matches_vertex_oracle() {
        let mut rng = RandomSource::new(20260809, 0);
        for _ in 0..60 {
            let (market, n, alpha, gamma, cap) = random_instance(&mut rng, 2..=8);
            let sol = solve_threshold(&n, alpha, gamma, cap, &market).unwrap();
            let (_, oracle) = lp_vertex_oracle(&n, alpha, gamma, cap, &market).unwrap();
            assert!(
                (sol.objective - oracle).abs() <= 1e-7 * (1.0 + oracle.abs()),
                "closed form {} vs oracle {} (alpha {alpha}, gamma {gamma}, cap {cap})",
                sol.objective,
                oracle
            );
        }
    }

    #[test]
    fn solution_is_always_feasible() {
        let mut rng = RandomSource::new(7, 1);
        for _ in 0..200 {
            let (market, n, alpha, gamma, cap) = random_instance(&mut rng, 1..=10);
            let sol = solve_threshold(&n, alpha, gamma, cap, &market).unwrap();
            let spend: f64 = n
                .iter()
                .zip(market.arrivals())
                .map(|(n, a)| n * a.cost)
                .sum();
            let scale = 1.0 + cap.abs() + spend;
            assert!(sol.roi_slack >= -1e-9 * scale);
            assert!(sol.budget_slack >= -1e-9 * scale);
            assert!((0.0..1.0).contains(&sol.q_roi));
            assert!((0.0..1.0).contains(&sol.q_budget));
        }
    }

    #[test]
    fn objective_monotone_in_cap_and_gamma() {
        let mut rng = RandomSource::new(99, 2);
        for _ in 0..40 {
            let (market, n, alpha, gamma, cap) = random_instance(&mut rng, 2..=6);
            let base = solve_threshold(&n, alpha, gamma, cap, &market)
                .unwrap()
                .objective;
            let more_cap = solve_threshold(&n, alpha, gamma, cap * 1.5, &market)
                .unwrap()
                .objective;
            assert!(more_cap >= base - 1e-10);
            let tighter_roi = solve_threshold(&n, alpha, gamma + 0.5, cap, &market)
                .unwrap()
                .objective;
            assert!(tighter_roi <= base + 1e-10);
        }
    }

    #[test]
    fn reduces_to_knapsack_when_roi_is_slack() {
        let mut rng = RandomSource::new(41, 3);
        let mut checked = 0;
        for _ in 0..200 {
            let (market, n, alpha, gamma, cap) = random_instance(&mut rng, 2..=6);
            let sol = solve_threshold(&n, alpha, gamma, cap, &market).unwrap();
            let knap = ThresholdVector::new(market.len(), sol.budget_head, sol.q_budget)
                .unwrap()
                .min(&ThresholdVector::new(market.len(), sol.kappa_alpha, 0.0).unwrap())
                .unwrap();
            let roi_weights: Vec<f64> = market
                .roi_margins(gamma)
                .iter()
                .zip(&n)
                .map(|(w, n)| n * w)
                .collect();
            if knap.dot(&roi_weights) >= 0.0 {
                assert_eq!(sol.solution, knap);
                checked += 1;
            }
        }
        assert!(checked > 20, "sample produced only {checked} slack cases");
    }

    #[test]
    fn oracle_rejects_large_supports() {
        let pairs: Vec<(f64, f64)> = (1..=13).map(|i| (i as f64, 1.0)).collect();
        let probs = vec![1.0 / 13.0; 13];
        let market = MarketModel::new(&pairs, &probs).unwrap();
        let n = vec![1.0; 13];
        assert!(matches!(
            lp_vertex_oracle(&n, 0.0, 1.0, 1.0, &market),
            Err(Error::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn hindsight_single_type_cases() {
        // profitable type, slack budget: OPT = T (v - alpha d)
        let market = MarketModel::new(&[(1.0, 0.5)], &[1.0]).unwrap();
        let params = BuyerParams::new(0.5, 1.5, 1.0).unwrap();
        let realization = vec![(1.0, 0.5); 20];
        let opt = hindsight_opt(&market, &params, &realization).unwrap();
        assert!((opt - 20.0 * (1.0 - 0.25)).abs() < 1e-9);

        // negative margin type: ROI forbids any win
        let market = MarketModel::new(&[(0.4, 1.0)], &[1.0]).unwrap();
        let params = BuyerParams::new(0.0, 1.2, 1.0).unwrap();
        let opt = hindsight_opt(&market, &params, &vec![(0.4, 1.0); 10]).unwrap();
        assert_eq!(opt, 0.0);
    }

    #[test]
    fn hindsight_matches_oracle_on_counts() {
        let mut rng = RandomSource::new(5, 4);
        for _ in 0..20 {
            let (market, _, alpha, gamma, _) = random_instance(&mut rng, 4..=4);
            let params = BuyerParams::new(alpha, gamma, 0.3).unwrap();
            let t = 50;
            let stream: Vec<usize> = (0..t).map(|_| rng.index(4)).collect();
            let counts = ArrivalCounts::from_indices(&market, &stream);
            let opt = hindsight_opt_from_counts(&market, &params, &counts).unwrap();

            let mut pairs = Vec::new();
            let mut weights = Vec::new();
            for (k, &n) in counts.counts().iter().enumerate() {
                if n > 0 {
                    let a = market.arrival(k);
                    pairs.push((a.value, a.cost));
                    weights.push(n as f64);
                }
            }
            let probs: Vec<f64> = weights.iter().map(|n| n / t as f64).collect();
            let sub = MarketModel::new(&pairs, &probs).unwrap();
            let (_, oracle) =
                lp_vertex_oracle(&weights, alpha, gamma, params.rho * t as f64, &sub).unwrap();
            assert!((opt - oracle).abs() <= 1e-7 * (1.0 + oracle.abs()));
        }
    }

    #[test]
    fn regret_of_never_bidding_is_opt() {
        let market = MarketModel::new(&[(1.0, 0.5), (0.5, 0.5)], &[0.5, 0.5]).unwrap();
        let params = BuyerParams::new(0.5, 1.2, 0.4).unwrap();
        let realization = vec![(1.0, 0.5), (0.5, 0.5), (1.0, 0.5)];
        let opt = hindsight_opt(&market, &params, &realization).unwrap();
        let regret = regret_of_run(&market, &params, &realization, 0.0).unwrap();
        assert_eq!(regret, opt);
        assert!(opt > 0.0);
    }

    #[test]
    fn unknown_pair_is_rejected() {
        let market = MarketModel::new(&[(1.0, 0.5)], &[1.0]).unwrap();
        let params = BuyerParams::new(0.0, 1.2, 0.4).unwrap();
        assert!(matches!(
            hindsight_opt(&market, &params, &[(2.0, 0.5)]),
            Err(Error::NotInSupport { .. })
        ));
    }
}
