//! Arrival supports and buyer parameters.
//!
//! An arrival type is a `(value, cost)` pair: the buyer's valuation and the
//! highest competing bid (or posted price). A market is a finite list of
//! types sorted by strictly decreasing value-to-cost ratio together with an
//! occurrence distribution. The sentinel type `K+1` with ratio 0 and
//! infinite cost is a convention handled at each use site, never stored.

use crate::{Error, Result};

/// Probability normalization tolerance accepted on user input.
const INPUT_PROB_TOL: f64 = 1e-9;
/// Tolerance the stored distribution is held to after normalization.
const STORED_PROB_TOL: f64 = 1e-12;

/// One arrival type: valuation, highest competing bid, and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalType {
    pub value: f64,
    pub cost: f64,
    pub ratio: f64,
}

impl ArrivalType {
    fn new(value: f64, cost: f64) -> Result<Self> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::InvalidMarket(format!(
                "value must be strictly positive, got {value}"
            )));
        }
        if !(cost > 0.0) || !cost.is_finite() {
            return Err(Error::InvalidMarket(format!(
                "cost must be strictly positive, got {cost}"
            )));
        }
        Ok(Self {
            value,
            cost,
            ratio: value / cost,
        })
    }
}

/// Buyer parameters: private capital cost, target ROI, budget rate.
///
/// Utility per win is `v - alpha * d`; the ROI constraint asks the realized
/// return `sum(v z) / sum(d z)` to be at least `gamma`; total expenditure is
/// capped at `rho * T` in expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuyerParams {
    pub alpha: f64,
    pub gamma: f64,
    pub rho: f64,
}

impl BuyerParams {
    pub fn new(alpha: f64, gamma: f64, rho: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "capital cost must be nonnegative, got {alpha}"
            )));
        }
        if !(gamma > alpha) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "target ROI must exceed the capital cost, got gamma {gamma} vs alpha {alpha}"
            )));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "budget rate must be strictly positive, got {rho}"
            )));
        }
        Ok(Self { alpha, gamma, rho })
    }
}

/// Finite arrival support with occurrence distribution.
///
/// Types are sorted by decreasing ratio; [`MarketModel::new`] requires the
/// order to be strict, [`MarketModel::with_weak_ratio_order`] tolerates ties
/// for product supports where they are unavoidable. Zero-probability types
/// are allowed (some analysis assumes `p^k > 0`; callers who rely on that
/// should drop them).
#[derive(Debug, Clone, PartialEq)]
pub struct MarketModel {
    arrivals: Vec<ArrivalType>,
    probs: Vec<f64>,
}

impl MarketModel {
    /// Build a market from raw `(value, cost)` pairs and probabilities.
    ///
    /// Pairs are sorted by strictly decreasing ratio (probabilities permuted
    /// along); two pairs with equal ratio are rejected as a degenerate
    /// ordering. Callers with duplicate-ratio supports merge them first, see
    /// [`merge_duplicate_ratios`].
    pub fn new(pairs: &[(f64, f64)], probs: &[f64]) -> Result<Self> {
        let market = Self::sorted(pairs, probs)?;
        for window in market.arrivals.windows(2) {
            if window[0].ratio == window[1].ratio {
                return Err(Error::InvalidMarket(format!(
                    "duplicate value-to-cost ratio {} (pairs ({}, {}) and ({}, {}))",
                    window[0].ratio,
                    window[0].value,
                    window[0].cost,
                    window[1].value,
                    window[1].cost
                )));
            }
        }
        Ok(market)
    }

    /// Like [`MarketModel::new`] but tolerating equal ratios, with the tie
    /// broken deterministically by ascending cost. Product supports
    /// `valuations x prices` generally contain ratio ties; the threshold
    /// machinery stays well defined, only solution uniqueness is lost.
    pub fn with_weak_ratio_order(pairs: &[(f64, f64)], probs: &[f64]) -> Result<Self> {
        Self::sorted(pairs, probs)
    }

    fn sorted(pairs: &[(f64, f64)], probs: &[f64]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidMarket("empty support".into()));
        }
        if pairs.len() != probs.len() {
            return Err(Error::DimensionMismatch {
                left: pairs.len(),
                right: probs.len(),
            });
        }
        let mut sum = 0.0;
        for &p in probs {
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::InvalidMarket(format!(
                    "probabilities must be nonnegative, got {p}"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > INPUT_PROB_TOL {
            return Err(Error::InvalidMarket(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }

        let mut arrivals = Vec::with_capacity(pairs.len());
        for &(v, d) in pairs {
            arrivals.push(ArrivalType::new(v, d)?);
        }
        let mut order: Vec<usize> = (0..arrivals.len()).collect();
        order.sort_by(|&i, &j| {
            arrivals[j]
                .ratio
                .partial_cmp(&arrivals[i].ratio)
                .unwrap()
                .then(arrivals[i].cost.partial_cmp(&arrivals[j].cost).unwrap())
        });
        let arrivals: Vec<ArrivalType> = order.iter().map(|&i| arrivals[i]).collect();
        let probs: Vec<f64> = order.iter().map(|&i| probs[i] / sum).collect();
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= STORED_PROB_TOL);
        Ok(Self { arrivals, probs })
    }

    /// Number of arrival types K.
    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires K >= 1
    }

    pub fn arrivals(&self) -> &[ArrivalType] {
        &self.arrivals
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn arrival(&self, k: usize) -> &ArrivalType {
        &self.arrivals[k]
    }

    /// Replace the occurrence distribution, keeping the support.
    pub fn with_probs(&self, probs: &[f64]) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = self.arrivals.iter().map(|a| (a.value, a.cost)).collect();
        Self::sorted(&pairs, probs)
    }

    /// Largest cost over the support.
    pub fn cost_max(&self) -> f64 {
        self.arrivals.iter().map(|a| a.cost).fold(f64::MIN, f64::max)
    }

    /// Smallest cost over the support.
    pub fn cost_min(&self) -> f64 {
        self.arrivals.iter().map(|a| a.cost).fold(f64::MAX, f64::min)
    }

    /// ROI margin `w^k = v^k - gamma * d^k` for the 0-indexed type `k`.
    pub fn roi_margin(&self, gamma: f64, k: usize) -> Result<f64> {
        if k >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: k + 1,
                len: self.len(),
            });
        }
        let a = &self.arrivals[k];
        Ok(a.value - gamma * a.cost)
    }

    /// All ROI margins for a given target ROI.
    pub fn roi_margins(&self, gamma: f64) -> Vec<f64> {
        self.arrivals
            .iter()
            .map(|a| a.value - gamma * a.cost)
            .collect()
    }

    /// `max_k |v^k - gamma d^k|`.
    pub fn roi_margin_max_abs(&self, gamma: f64) -> f64 {
        self.roi_margins(gamma)
            .iter()
            .map(|w| w.abs())
            .fold(0.0, f64::max)
    }

    /// Largest 0-indexed-plus-one count of types with `v^k >= alpha d^k`,
    /// i.e. the paper's `kappa_alpha` in 1-indexed terms. Returns 0 when no
    /// type qualifies. Ratios decrease, so this is a prefix count.
    pub fn kappa(&self, alpha: f64) -> usize {
        self.arrivals
            .iter()
            .take_while(|a| a.value >= alpha * a.cost)
            .count()
    }

    /// Exact-match lookup of an observed pair in the support.
    pub fn find_type(&self, value: f64, cost: f64) -> Result<usize> {
        self.arrivals
            .iter()
            .position(|a| a.value == value && a.cost == cost)
            .ok_or(Error::NotInSupport { value, cost })
    }
}

/// Merge pairs sharing a value-to-cost ratio by summing their probabilities
/// onto the first-seen pair of each ratio class. The representative keeps
/// its own `(value, cost)`; use only where types of equal ratio are
/// interchangeable for the caller's purpose.
pub fn merge_duplicate_ratios(pairs: &[(f64, f64)], probs: &[f64]) -> (Vec<(f64, f64)>, Vec<f64>) {
    let mut out_pairs: Vec<(f64, f64)> = Vec::new();
    let mut out_probs: Vec<f64> = Vec::new();
    for (&(v, d), &p) in pairs.iter().zip(probs) {
        let ratio = v / d;
        match out_pairs.iter().position(|&(ov, od)| ov / od == ratio) {
            Some(i) => out_probs[i] += p,
            None => {
                out_pairs.push((v, d));
                out_probs.push(p);
            }
        }
    }
    (out_pairs, out_probs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_by_decreasing_ratio() {
        let m = MarketModel::new(&[(0.6, 0.2), (0.2, 0.4)], &[0.5, 0.5]).unwrap();
        let ratios: Vec<f64> = m.arrivals().iter().map(|a| a.ratio).collect();
        assert!((ratios[0] - 3.0).abs() < 1e-12 && (ratios[1] - 0.5).abs() < 1e-12);
        assert_eq!(m.arrival(0).value, 0.6);
    }

    #[test]
    fn singleton() {
        let m = MarketModel::new(&[(1.0, 1.0)], &[1.0]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.arrival(0).ratio, 1.0);
    }

    #[test]
    fn grid_support_with_19_ratios_accepted() {
        // {0.2, 0.4, 0.6, 0.8, 1.0}^2 has 25 pairs but 19 distinct ratios.
        let mut pairs = Vec::new();
        let mut probs = Vec::new();
        for i in 1..=5 {
            for j in 1..=5 {
                pairs.push((0.2 * i as f64, 0.2 * j as f64));
                probs.push(1.0 / 25.0);
            }
        }
        let (pairs, probs) = merge_duplicate_ratios(&pairs, &probs);
        assert_eq!(pairs.len(), 19);
        let m = MarketModel::new(&pairs, &probs).unwrap();
        assert_eq!(m.len(), 19);
        assert!((m.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for w in m.arrivals().windows(2) {
            assert!(w[0].ratio > w[1].ratio);
        }
    }

    #[test]
    fn duplicate_ratio_rejected() {
        let err = MarketModel::new(&[(0.4, 0.2), (0.6, 0.3)], &[0.5, 0.5]);
        assert!(matches!(err, Err(Error::InvalidMarket(_))));
    }

    #[test]
    fn weak_order_allows_ties_deterministically() {
        let m =
            MarketModel::with_weak_ratio_order(&[(0.6, 0.3), (0.4, 0.2)], &[0.5, 0.5]).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.arrival(0).cost, 0.2);
    }

    #[test]
    fn bad_probs_rejected() {
        assert!(MarketModel::new(&[(1.0, 1.0)], &[0.9]).is_err());
        assert!(MarketModel::new(&[(1.0, 1.0), (2.0, 1.0)], &[1.5, -0.5]).is_err());
        assert!(MarketModel::new(&[(1.0, -1.0)], &[1.0]).is_err());
        assert!(MarketModel::new(&[(0.0, 1.0)], &[1.0]).is_err());
    }

    #[test]
    fn roi_margin_values() {
        let m = MarketModel::new(&[(1.0, 0.4)], &[1.0]).unwrap();
        assert!((m.roi_margin(2.0, 0).unwrap() - 0.2).abs() < 1e-15);

        let m = MarketModel::new(&[(0.2, 1.0)], &[1.0]).unwrap();
        assert!((m.roi_margin(1.2, 0).unwrap() - (-1.0)).abs() < 1e-15);

        // Figure-style primitives: V = 0.6, d = 0.5, gamma = 1.3.
        let m = MarketModel::new(&[(0.6, 0.5)], &[1.0]).unwrap();
        assert!((m.roi_margin(1.3, 0).unwrap() - (-0.05)).abs() < 1e-15);

        assert!(m.roi_margin(1.3, 1).is_err());
    }

    #[test]
    fn buyer_params_invariants() {
        assert!(BuyerParams::new(1.0, 1.2, 0.4).is_ok());
        assert!(BuyerParams::new(0.0, 1.0, 0.2).is_ok());
        assert!(BuyerParams::new(1.2, 1.2, 0.4).is_err());
        assert!(BuyerParams::new(-0.1, 1.0, 0.4).is_err());
        assert!(BuyerParams::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn kappa_counts_ratio_prefix() {
        let m = MarketModel::new(&[(0.6, 0.2), (0.5, 0.5), (0.2, 0.4)], &[0.3, 0.3, 0.4]).unwrap();
        // ratios: 3, 1, 0.5
        assert_eq!(m.kappa(2.0), 1);
        assert_eq!(m.kappa(1.0), 2);
        assert_eq!(m.kappa(0.0), 3);
        assert_eq!(m.kappa(3.5), 0);
    }
}
