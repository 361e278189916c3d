//! Simulation laboratory for bidding under budget and ROI constraints in
//! repeated second-price auctions, and for posted-price selling against such
//! buyers.
//!
//! The library is organized around a small set of moving parts:
//!
//! - [`market`]: finite arrival supports `(value, cost)` sorted by
//!   value-to-cost ratio, plus buyer parameters (capital cost, target ROI,
//!   budget rate).
//! - [`threshold`]: the `(1, ..., 1, q, 0, ..., 0)` threshold vectors that
//!   carry every optimal solution in this problem family.
//! - [`hindsight`]: exact closed-form solver for the two-constraint LP, an
//!   independent vertex-enumeration oracle, and the realized-sequence
//!   hindsight benchmark.
//! - [`ctbr`]: the conservative threshold bidding framework with pluggable
//!   learners (empirical estimation, SGD) and confidence-bound schedules.
//! - [`pacing`]: dual-subgradient pacing benchmark bidders and the
//!   pacing-fails-ROI demonstration.
//! - [`pricing`]: the seller's revenue function, price classification,
//!   bell-shape verification, and episodic binary-search pricing.
//! - [`harness`]: scenario sampling, batch trials on common random numbers,
//!   and regret-scaling sweeps.
//! - [`report`]: versioned, byte-stable CSV emission for all run artifacts.

pub mod ctbr;
pub mod harness;
pub mod hindsight;
pub mod market;
pub mod pacing;
pub mod pricing;
pub mod report;
pub mod rng;
pub mod threshold;

pub use ctbr::{Bid, ConfidenceSchedule, CtbrState, LearnerConfig, RunRecord};
pub use harness::{BidderSpec, Regime, RunMetrics, ScenarioConfig};
pub use hindsight::{ArrivalCounts, HindsightSolution};
pub use market::{ArrivalType, BuyerParams, MarketModel};
pub use pricing::{PriceClass, PricingModel, RevenuePoint};
pub use rng::RandomSource;
pub use threshold::ThresholdVector;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid market: {0}")]
    InvalidMarket(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("pair ({value}, {cost}) not in the market support")]
    NotInSupport { value: f64, cost: f64 },
    #[error("vertex oracle supports K <= {max}, got K = {got}")]
    OracleTooLarge { got: usize, max: usize },
    #[error("horizon {horizon} too small: {reason}")]
    HorizonTooSmall { horizon: usize, reason: String },
    #[error("regime sampling exhausted {attempts} attempts without a matching instance")]
    RegimeInfeasible { attempts: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv schema mismatch: {0}")]
    SchemaMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
