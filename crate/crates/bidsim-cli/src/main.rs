//! Command-line runner: hindsight solves and revenue curves (`solve`),
//! bidding experiment suites and regret sweeps (`bid`), and posted-price
//! runs (`price`). Every run is reproducible from its config file and seed;
//! data files carry no timestamps (those live in the `.meta.json` sidecar).

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use bidsim::harness;
use bidsim::hindsight::{lp_vertex_oracle, solve_threshold};
use bidsim::pricing::{
    bell_shape_check, binary_search_pricing, seller_regret, ClairvoyantBuyer,
    CtbrPostedPriceBuyer, PostedPriceBuyer,
};
use bidsim::report;
use bidsim::rng::RandomSource;
use bidsim::{LearnerConfig, MarketModel};
use clap::{Parser, Subcommand};

use config::{BidCfg, PriceCfg, SolveCfg};

#[derive(Parser)]
#[command(name = "bidsim", version, about = "Auction bidding and pricing simulation lab")]
struct Cli {
    /// JSON config file for the subcommand
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed for all randomness
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory (the BIDSIM_OUT env var overrides this)
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a hindsight instance, or trace a revenue curve over prices
    Solve {
        /// Cross-check the closed form against the vertex-enumeration oracle
        #[arg(long)]
        oracle: bool,
    },
    /// Run a bidder-comparison suite, or a regret-scaling sweep
    Bid {
        /// Run the regret-scaling sweep from the config's `sweep` section
        #[arg(long)]
        sweep: bool,
    },
    /// Run the episodic binary-search pricing algorithm against a buyer
    Price {
        /// Also verify and print the revenue curve's bell-shape structure
        #[arg(long)]
        bell_check: bool,
    },
}

/// Errors which indicate a bad config rather than a failed computation.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.is::<ConfigError>() {
                eprintln!("config error: {e}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let out_dir = match std::env::var_os("BIDSIM_OUT") {
        Some(dir) => PathBuf::from(dir),
        None => cli.out.clone(),
    };
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;

    match cli.cmd {
        Cmd::Solve { oracle } => {
            let cfg: SolveCfg = load_config(cli.config.as_deref())?;
            cmd_solve(&cfg, oracle, cli.seed, &out_dir)?;
            write_meta(&out_dir, "solve", cli.seed)?;
        }
        Cmd::Bid { sweep } => {
            let cfg: BidCfg = load_config(cli.config.as_deref())?;
            cmd_bid(&cfg, sweep, cli.seed, &out_dir)?;
            write_meta(&out_dir, "bid", cli.seed)?;
        }
        Cmd::Price { bell_check } => {
            let cfg: PriceCfg = load_config(cli.config.as_deref())?;
            cmd_price(&cfg, bell_check, cli.seed, &out_dir)?;
            write_meta(&out_dir, "price", cli.seed)?;
        }
    }
    Ok(())
}

fn load_config<C: for<'de> serde::Deserialize<'de>>(path: Option<&Path>) -> anyhow::Result<C> {
    let path = path.ok_or_else(|| ConfigError("--config PATH is required".into()))?;
    let content = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    config::load(&content).map_err(|e| ConfigError(format!("{}: {e}", path.display())).into())
}

/// Sidecar with everything environment-specific; the data files stay
/// byte-identical across reruns.
fn write_meta(out_dir: &Path, command: &str, seed: u64) -> anyhow::Result<()> {
    let created = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = format!(
        "{{\"command\":\"{command}\",\"seed\":{seed},\"schema_version\":{},\"created_unix\":{created}}}\n",
        report::SCHEMA_VERSION
    );
    std::fs::write(out_dir.join(format!("{command}.meta.json")), meta)?;
    Ok(())
}

fn cmd_solve(cfg: &SolveCfg, oracle: bool, _seed: u64, out_dir: &Path) -> anyhow::Result<()> {
    match (&cfg.market, &cfg.pricing) {
        (Some(market_cfg), None) => {
            let market = MarketModel::new(&market_cfg.pairs, &market_cfg.probs)
                .map_err(|e| ConfigError(e.to_string()))?;
            let weights = cfg
                .weights
                .clone()
                .unwrap_or_else(|| market.probs().to_vec());
            let alpha = cfg.alpha.unwrap_or(0.0);
            let gamma = cfg
                .gamma
                .ok_or_else(|| ConfigError("market solve needs `gamma`".into()))?;
            let rho = cfg
                .rho
                .ok_or_else(|| ConfigError("market solve needs `rho`".into()))?;
            let sol = solve_threshold(&weights, alpha, gamma, rho, &market)?;
            println!("threshold solve over {} types:", market.len());
            println!(
                "  roi head r = {}  (q_roi = {})",
                sol.roi_head,
                report::fmt_f64(sol.q_roi)
            );
            println!(
                "  budget head b = {}  (q_budget = {})",
                sol.budget_head,
                report::fmt_f64(sol.q_budget)
            );
            println!("  capital-cost cutoff kappa = {}", sol.kappa_alpha);
            println!(
                "  solution head J = {}, remainder q = {}",
                sol.head(),
                report::fmt_f64(sol.remainder())
            );
            println!("  objective U = {}", report::fmt_f64(sol.objective));
            println!(
                "  roi slack = {}, budget slack = {}",
                report::fmt_f64(sol.roi_slack),
                report::fmt_f64(sol.budget_slack)
            );
            for w in &sol.warnings {
                println!("  warning: {w}");
            }
            if oracle {
                let (_, oracle_value) = lp_vertex_oracle(&weights, alpha, gamma, rho, &market)?;
                println!(
                    "  oracle objective = {}, deviation = {}",
                    report::fmt_f64(oracle_value),
                    report::fmt_f64((sol.objective - oracle_value).abs())
                );
            }
            let csv = report::solution_csv(&market, &weights, &sol);
            write_out(out_dir, "solution.csv", &csv)?;
        }
        (None, Some(pricing_cfg)) => {
            let model = pricing_cfg
                .build()
                .map_err(|e| ConfigError(format!("{e:#}")))?;
            let mut points = Vec::with_capacity(model.price_count());
            let mut max_oracle_dev: f64 = 0.0;
            for &d in model.prices() {
                let point = model.evaluate_price(d)?;
                if oracle {
                    let pairs: Vec<(f64, f64)> =
                        model.valuations().iter().map(|&v| (v, d)).collect();
                    let sub = MarketModel::new(&pairs, model.val_probs())?;
                    let (_, want) = lp_vertex_oracle(
                        model.val_probs(),
                        0.0,
                        model.gamma(),
                        model.rho(),
                        &sub,
                    )?;
                    max_oracle_dev = max_oracle_dev.max((point.utility - want).abs());
                }
                points.push(point);
            }
            let (best_m, best_pi) = model.max_revenue()?;
            println!(
                "revenue curve over {} prices: max revenue {} at price {}",
                model.price_count(),
                report::fmt_f64(best_pi),
                report::fmt_f64(model.prices()[best_m])
            );
            if oracle {
                println!(
                    "  max closed-form vs oracle deviation = {}",
                    report::fmt_f64(max_oracle_dev)
                );
            }
            write_out(out_dir, "revenue.csv", &report::revenue_csv(&points))?;
        }
        _ => {
            return Err(ConfigError(
                "solve config needs exactly one of `market` or `pricing`".into(),
            )
            .into())
        }
    }
    Ok(())
}

fn cmd_bid(cfg: &BidCfg, sweep: bool, seed: u64, out_dir: &Path) -> anyhow::Result<()> {
    let scenario = cfg.scenario(seed).map_err(|e| ConfigError(format!("{e:#}")))?;
    if sweep {
        let sweep_cfg = cfg
            .sweep
            .as_ref()
            .ok_or_else(|| ConfigError("--sweep requires a `sweep` config section".into()))?;
        let schedule = match &sweep_cfg.schedule {
            Some(s) => s.resolve(*sweep_cfg.horizons.iter().max().unwrap_or(&10_000))?,
            None => bidsim::ConfidenceSchedule::power_default(),
        };
        let bidder_name = sweep_cfg.bidder.as_deref().unwrap_or("ctbr-ee");
        let spec = config::bidder_from_name(bidder_name, schedule, None)
            .map_err(|e| ConfigError(format!("{e:#}")))?;
        let mut rng = RandomSource::new(seed, 0);
        let market = harness::sample_regime_instance(
            scenario.regime,
            &scenario.params,
            &scenario.support,
            &mut rng,
        )?;
        let result = harness::regret_scaling_sweep(
            &market,
            &scenario.params,
            &spec,
            &sweep_cfg.horizons,
            sweep_cfg.seeds_per,
            seed,
            scenario.benchmark_hard_stop,
        )?;
        for (t, regret) in &result.points {
            println!("T = {t}: mean regret {}", report::fmt_f64(*regret));
        }
        match result.slope {
            Some(s) => println!("fitted log-log slope: {}", report::fmt_f64(s)),
            None => println!("fitted log-log slope: unavailable"),
        }
        for w in &result.warnings {
            println!("warning: {w}");
        }
        write_out(out_dir, "sweep.csv", &report::sweep_csv(&result))?;
        return Ok(());
    }

    let result = harness::run_benchmark_suite(&scenario)?;
    println!(
        "{:<20} {:>10} {:>10} {:>10} {:>8} {:>10}",
        "bidder", "median", "q25", "q75", "roi_ok", "depletion"
    );
    for row in &result.rows {
        println!(
            "{:<20} {:>10.4} {:>10.4} {:>10.4} {:>8.2} {:>10.4}",
            row.bidder,
            row.median_norm_utility,
            row.q25_norm_utility,
            row.q75_norm_utility,
            row.roi_attained_frac,
            row.median_final_depletion
        );
    }
    write_out(out_dir, "aggregate.csv", &report::aggregate_csv(&result.rows))?;
    if scenario.collect_records {
        for run in &result.runs {
            if let Some(record) = &run.record {
                let name = format!("run_{}_i{}.csv", run.bidder, run.instance);
                write_out(out_dir, &name, &report::run_csv(record))?;
            }
        }
    }
    Ok(())
}

fn cmd_price(cfg: &PriceCfg, bell: bool, seed: u64, out_dir: &Path) -> anyhow::Result<()> {
    let model = cfg
        .pricing
        .build()
        .map_err(|e| ConfigError(format!("{e:#}")))?;
    let episode = cfg.episode_len();
    let buyer_name = cfg.buyer.as_deref().unwrap_or("clairvoyant");
    let mut buyer: Box<dyn PostedPriceBuyer> = match buyer_name {
        "clairvoyant" => Box::new(ClairvoyantBuyer::new(&model, RandomSource::new(seed, 1))?),
        "ctbr-sgd-constant" => {
            let eta = cfg
                .eta
                .unwrap_or_else(|| (cfg.horizon as f64).powf(-2.0 / 3.0));
            Box::new(CtbrPostedPriceBuyer::new(
                &model,
                LearnerConfig::SgdConstant { eta },
                cfg.buyer_schedule().map_err(|e| ConfigError(format!("{e:#}")))?,
                cfg.horizon,
                &RandomSource::new(seed, 2),
            )?)
        }
        other => {
            return Err(ConfigError(format!(
                "unknown buyer `{other}` (expected clairvoyant|ctbr-sgd-constant)"
            ))
            .into())
        }
    };

    if bell {
        let report = bell_shape_check(&model)?;
        println!(
            "bell-shape check: {}",
            if report.pass() { "pass" } else { "FAIL" }
        );
        if report.plateau.is_empty() {
            println!("  plateau: empty");
        } else {
            println!(
                "  plateau: {} prices at revenue {}",
                report.plateau.len(),
                report::fmt_f64(model.rho())
            );
        }
        for v in &report.violations {
            println!("  violation: {v}");
        }
        for w in &report.warnings {
            println!("  warning: {w}");
        }
        write_out(out_dir, "revenue.csv", &report::revenue_csv(&report.points))?;
    }

    println!(
        "pricing run: {} prices, episode length {episode}, horizon {}",
        model.price_count(),
        cfg.horizon
    );
    let record = binary_search_pricing(model.prices(), episode, cfg.horizon, buyer.as_mut())?;
    let chosen = record.chosen.expect("run always picks an incumbent");
    let chosen_price = model.prices()[chosen];
    println!(
        "exploited price index {} (price {}), estimated revenue {}",
        chosen + 1,
        report::fmt_f64(chosen_price),
        report::fmt_f64(record.pi_hat[chosen].unwrap_or(f64::NAN))
    );
    println!(
        "true revenue at exploited price: {}",
        report::fmt_f64(model.evaluate_price(chosen_price)?.revenue)
    );
    println!(
        "episodes used: {}, complete: {}",
        record.episodes.len(),
        record.complete
    );
    println!(
        "estimated seller regret: {}",
        report::fmt_f64(seller_regret(&model, &record)?)
    );
    write_out(out_dir, "pricing.csv", &report::pricing_csv(&record))?;
    Ok(())
}

fn write_out(dir: &Path, name: &str, content: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content)
        .with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}
