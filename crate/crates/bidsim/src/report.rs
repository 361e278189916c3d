//! Versioned, byte-stable CSV emission.
//!
//! Every file starts with a `#schema <name> v<version>` line followed by the
//! header row. Numbers are written in Rust's shortest round-trip decimal
//! form, so identical runs produce identical bytes; timestamps and other
//! environment data belong in sidecar metadata files, never here. Readers
//! check the schema line and reject unknown names or versions.

use crate::ctbr::{RunRecord, RunRow};
use crate::harness::{SuiteRow, SweepResult};
use crate::hindsight::HindsightSolution;
use crate::market::MarketModel;
use crate::pricing::{PricingRunRecord, RevenuePoint};
use crate::{Error, Result};

/// Schema version shared by all writers in this build.
pub const SCHEMA_VERSION: u32 = 1;

fn schema_line(name: &str) -> String {
    format!("#schema {name} v{SCHEMA_VERSION}\n")
}

/// Shortest round-trip decimal form of a double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn fmt_bool(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Per-period record of one bidding run.
pub fn run_csv(record: &RunRecord) -> String {
    let mut out = schema_line("run");
    out.push_str("t,v,d,bid,win,payment,utility,roi_balance\n");
    for RunRow {
        t,
        value,
        cost,
        bid,
        win,
        payment,
        utility,
        roi_balance,
    } in &record.rows
    {
        out.push_str(&format!(
            "{t},{},{},{},{},{},{},{}\n",
            fmt_f64(*value),
            fmt_f64(*cost),
            fmt_f64(*bid),
            fmt_bool(*win),
            fmt_f64(*payment),
            fmt_f64(*utility),
            fmt_f64(*roi_balance),
        ));
    }
    out
}

/// Revenue curve over a price list.
pub fn revenue_csv(points: &[RevenuePoint]) -> String {
    let mut out = schema_line("revenue");
    out.push_str("price,revenue,class,roi_slack,budget_slack\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(p.price),
            fmt_f64(p.revenue),
            p.class.label(),
            fmt_f64(p.roi_slack),
            fmt_f64(p.budget_slack),
        ));
    }
    out
}

/// Per-bidder aggregates of a benchmark suite.
pub fn aggregate_csv(rows: &[SuiteRow]) -> String {
    let mut out = schema_line("aggregate");
    out.push_str("bidder,regime,median_norm_utility,q25,q75,roi_attained_frac,final_depletion\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.bidder,
            r.regime,
            fmt_f64(r.median_norm_utility),
            fmt_f64(r.q25_norm_utility),
            fmt_f64(r.q75_norm_utility),
            fmt_f64(r.roi_attained_frac),
            fmt_f64(r.median_final_depletion),
        ));
    }
    out
}

/// Per-period trace of a pricing run.
pub fn pricing_csv(record: &PricingRunRecord) -> String {
    let mut out = schema_line("pricing");
    out.push_str("t,price,take,phase\n");
    for row in &record.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.t,
            fmt_f64(row.price),
            fmt_bool(row.take),
            row.phase.label(),
        ));
    }
    out
}

/// Regret-scaling sweep points with the fitted slope on every row.
pub fn sweep_csv(sweep: &SweepResult) -> String {
    let mut out = schema_line("sweep");
    out.push_str("t,mean_regret,slope\n");
    let slope = sweep
        .slope
        .map(fmt_f64)
        .unwrap_or_else(|| "nan".to_string());
    for &(t, regret) in &sweep.points {
        out.push_str(&format!("{t},{},{slope}\n", fmt_f64(regret)));
    }
    out
}

/// Per-type view of a solved instance.
pub fn solution_csv(market: &MarketModel, weights: &[f64], sol: &HindsightSolution) -> String {
    let mut out = schema_line("solution");
    out.push_str("k,value,cost,ratio,weight,x\n");
    let x = sol.solution.expand();
    for (k, a) in market.arrivals().iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            k + 1,
            fmt_f64(a.value),
            fmt_f64(a.cost),
            fmt_f64(a.ratio),
            fmt_f64(weights[k]),
            fmt_f64(x[k]),
        ));
    }
    out
}

/// Parse a CSV produced by this module, checking the schema line.
/// Returns the header fields and data rows.
pub fn read_checked(content: &str, expect_name: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = content.lines();
    let schema = lines
        .next()
        .ok_or_else(|| Error::SchemaMismatch("empty file".into()))?;
    let want = format!("#schema {expect_name} v{SCHEMA_VERSION}");
    if schema != want {
        return Err(Error::SchemaMismatch(format!(
            "expected '{want}', found '{schema}'"
        )));
    }
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::SchemaMismatch("missing header row".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    Ok((header, rows))
}
