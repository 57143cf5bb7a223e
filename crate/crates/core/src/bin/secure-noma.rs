//! Command-line front end.
//!
//! Exit codes: 0 feasible, 2 infeasible, 1 usage or input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use secure_noma::channel::{mw_to_dbm, sample_realization};
use secure_noma::experiments::{run_sweep, to_csv, write_results, SweepSpec};
use secure_noma::maxmin::{solve_maxmin_two_user, DEFAULT_RATE_TOLERANCE};
use secure_noma::oma::tdma_min_power;
use secure_noma::secrecy::secrecy_outage_closed_form;
use secure_noma::{
    compare_maxmin, db_to_linear, dbm_to_mw, solve_maxmin_bisection, solve_min_power, Channel, Geometry,
    InfeasibleVerdict, NomaError, Requirement, SolveOutcome,
};

#[derive(Parser, Debug)]
#[command(name = "secure-noma", version, about = "Secure NOMA downlink power and rate design")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimum total power meeting a common confidential rate and outage budget.
    MinPower {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Confidential rate per user, bits per channel use.
        #[arg(long)]
        q: f64,
        /// Also report equal-time TDMA powers.
        #[arg(long)]
        tdma: bool,
        #[arg(long)]
        json: bool,
    },
    /// Largest common confidential rate under a power budget.
    MaxMinRate {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Bisection tolerance on the rate.
        #[arg(long, default_value_t = DEFAULT_RATE_TOLERANCE)]
        tolerance: f64,
        #[arg(long, value_enum, default_value_t = Method::Bisection)]
        method: Method,
        #[arg(long)]
        json: bool,
    },
    /// NOMA max-min rate against optimal-time and equal-time TDMA.
    CompareOma {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        json: bool,
    },
    /// Runs a sweep described by a config file and writes CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Bisection,
    ClosedForm,
}

#[derive(Args, Debug)]
struct ChannelArgs {
    /// User gains in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "num_users")]
    gains_db: Option<Vec<f64>>,
    /// Eavesdropper average gain in dB (with --gains-db).
    #[arg(long, allow_hyphen_values = true, requires = "gains_db")]
    eaves_db: Option<f64>,
    /// Draw gains from a fading geometry instead of --gains-db.
    #[arg(long, requires_all = ["user_distance", "eaves_distance"])]
    num_users: Option<usize>,
    #[arg(long)]
    user_distance: Option<f64>,
    #[arg(long)]
    eaves_distance: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    path_loss_exponent: f64,
    #[arg(long, default_value_t = -70.0, allow_hyphen_values = true)]
    user_noise_dbm: f64,
    #[arg(long, default_value_t = -70.0, allow_hyphen_values = true)]
    eaves_noise_dbm: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Secrecy outage budget, in (0, 1).
    #[arg(long)]
    eps: f64,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct BudgetArgs {
    /// Power budget in dBm.
    #[arg(long, allow_hyphen_values = true)]
    power_dbm: Option<f64>,
    /// Power budget in linear units (mW).
    #[arg(long)]
    power: Option<f64>,
}

impl BudgetArgs {
    fn linear(&self) -> f64 {
        match (self.power, self.power_dbm) {
            (Some(p), _) => p,
            (None, Some(dbm)) => dbm_to_mw(dbm),
            (None, None) => unreachable!("clap enforces one budget flag"),
        }
    }
}

/// Channel sorted by gain plus the input position of each sorted user.
struct Instance {
    channel: Channel,
    order: Vec<usize>,
}

impl Instance {
    /// 1-based user number as given on the command line.
    fn user(&self, sorted: usize) -> usize {
        self.order[sorted] + 1
    }

    fn users(&self, sorted: &[usize]) -> Vec<usize> {
        sorted.iter().map(|&k| self.user(k)).collect()
    }
}

impl ChannelArgs {
    fn instance(&self) -> Result<Instance, NomaError> {
        match (&self.gains_db, self.num_users) {
            (Some(gains_db), _) => {
                let eaves_db =
                    self.eaves_db.ok_or_else(|| NomaError::InvalidInput("--gains-db needs --eaves-db".into()))?;
                let gains = gains_db.iter().map(|g| db_to_linear(*g)).collect();
                let (channel, order) = Channel::from_unsorted(gains, db_to_linear(eaves_db))?;
                Ok(Instance { channel, order })
            }
            (None, Some(n)) => {
                let geometry = Geometry::equidistant(
                    n,
                    self.user_distance.unwrap_or_default(),
                    self.eaves_distance.unwrap_or_default(),
                    self.path_loss_exponent,
                    dbm_to_mw(self.user_noise_dbm),
                    dbm_to_mw(self.eaves_noise_dbm),
                )?;
                let channel = sample_realization(&geometry, self.seed);
                Ok(Instance { order: (0..n).collect(), channel })
            }
            (None, None) => Err(NomaError::InvalidInput("give either --gains-db or --num-users".into())),
        }
    }
}

enum Status {
    Feasible,
    Infeasible,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(Status::Feasible) => ExitCode::SUCCESS,
        Ok(Status::Infeasible) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<Status, NomaError> {
    match command {
        Command::MinPower { channel, q, tdma, json } => min_power(&channel, q, tdma, json),
        Command::MaxMinRate { channel, budget, tolerance, method, json } => {
            max_min_rate(&channel, budget.linear(), tolerance, method, json)
        }
        Command::CompareOma { channel, budget, json } => compare(&channel, budget.linear(), json),
        Command::Sweep { config, output } => {
            let spec = SweepSpec::load(&config)?;
            let rows = run_sweep(&spec)?;
            match output {
                Some(path) => {
                    write_results(&rows, &path)?;
                    println!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => print!("{}", to_csv(&rows)),
            }
            Ok(Status::Feasible)
        }
    }
}

fn report_infeasible(inst: &Instance, verdict: &InfeasibleVerdict, json: bool) -> Status {
    let users = inst.users(&verdict.failing_users);
    if json {
        println!("{}", json!({ "status": "infeasible", "reason": verdict.reason, "failing_users": users }));
    } else {
        let list: Vec<String> = users.iter().map(|u| u.to_string()).collect();
        let reason = serde_json::to_value(verdict.reason).expect("serializable");
        println!("infeasible: user {} ({})", list.join(", "), reason.as_str().unwrap_or_default());
    }
    Status::Infeasible
}

fn power_entry(inst: &Instance, k: usize, power: f64) -> Value {
    json!({ "user": inst.user(k), "power": power, "power_dbm": mw_to_dbm(power) })
}

fn min_power(args: &ChannelArgs, q: f64, with_tdma: bool, json: bool) -> Result<Status, NomaError> {
    let inst = args.instance()?;
    let req = Requirement::new(q, args.eps)?;
    let sol = match solve_min_power(&inst.channel, &req)? {
        SolveOutcome::Feasible(s) => s,
        SolveOutcome::Infeasible(v) => return Ok(report_infeasible(&inst, &v, json)),
    };
    let mut users = Vec::new();
    for (k, (&p, rates)) in sol.allocation.powers().iter().zip(&sol.rate_pairs).enumerate() {
        let outage = secrecy_outage_closed_form(&inst.channel, &sol.allocation, q, k)?;
        let mut entry = power_entry(&inst, k, p);
        entry["codeword_rate"] = json!(rates.codeword_rate);
        entry["confidential_rate"] = json!(rates.confidential_rate);
        entry["outage"] = json!(outage);
        users.push(entry);
    }
    let tdma = if with_tdma { Some(tdma_min_power(&inst.channel, q, args.eps)?) } else { None };
    if json {
        let mut doc = json!({ "status": "feasible", "users": users, "total_power": sol.total_power,
            "total_power_dbm": mw_to_dbm(sol.total_power) });
        if let Some(t) = &tdma {
            doc["tdma_equal"] = serde_json::to_value(t).expect("serializable");
        }
        println!("{doc}");
        return Ok(Status::Feasible);
    }
    println!("user  power          power_dBm   R_t            R_s       outage");
    for u in &users {
        println!(
            "{:<5} {:<14.9} {:<11.4} {:<14.9} {:<9.6} {:.6e}",
            u["user"].as_u64().unwrap_or_default(),
            f(&u["power"]),
            f(&u["power_dbm"]),
            f(&u["codeword_rate"]),
            f(&u["confidential_rate"]),
            f(&u["outage"])
        );
    }
    println!("total power: {:.9} ({:.4} dBm)", sol.total_power, mw_to_dbm(sol.total_power));
    match tdma {
        Some(SolveOutcome::Feasible(t)) => {
            println!("tdma equal-time: average {:.9}, peak {:.9}", t.average_power, t.peak_power)
        }
        Some(SolveOutcome::Infeasible(v)) => {
            println!("tdma equal-time: infeasible for user {:?}", inst.users(&v.failing_users))
        }
        None => {}
    }
    Ok(Status::Feasible)
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn max_min_rate(
    args: &ChannelArgs,
    budget: f64,
    tolerance: f64,
    method: Method,
    json: bool,
) -> Result<Status, NomaError> {
    let inst = args.instance()?;
    let outcome = match method {
        Method::Bisection => solve_maxmin_bisection(&inst.channel, args.eps, budget, tolerance)?,
        Method::ClosedForm => solve_maxmin_two_user(&inst.channel, args.eps, budget)?,
    };
    let sol = match outcome {
        SolveOutcome::Feasible(s) => s,
        SolveOutcome::Infeasible(v) => return Ok(report_infeasible(&inst, &v, json)),
    };
    let powers: Vec<Value> = sol
        .allocation
        .iter()
        .flat_map(|a| a.powers().iter().enumerate().map(|(k, &p)| power_entry(&inst, k, p)))
        .collect();
    if json {
        println!(
            "{}",
            json!({ "status": "feasible", "rate": sol.rate, "users": powers,
                "total_power": sol.total_power(), "iterations": sol.iterations_used })
        );
        return Ok(Status::Feasible);
    }
    println!("max-min rate: {:.9}", sol.rate);
    for u in &powers {
        println!(
            "user {}: power {:.9} ({:.4} dBm)",
            u["user"].as_u64().unwrap_or_default(),
            f(&u["power"]),
            f(&u["power_dbm"])
        );
    }
    println!("total power: {:.9}", sol.total_power());
    if method == Method::Bisection {
        println!("iterations: {}", sol.iterations_used);
    }
    Ok(Status::Feasible)
}

fn compare(args: &ChannelArgs, budget: f64, json: bool) -> Result<Status, NomaError> {
    let inst = args.instance()?;
    let cmp = match compare_maxmin(&inst.channel, args.eps, budget)? {
        SolveOutcome::Feasible(c) => c,
        SolveOutcome::Infeasible(v) => return Ok(report_infeasible(&inst, &v, json)),
    };
    let ratio_equal = cmp.noma / cmp.tdma_equal;
    if json {
        println!(
            "{}",
            json!({ "status": "feasible", "noma": cmp.noma, "tdma_optimal": cmp.tdma_optimal,
                "tdma_equal": cmp.tdma_equal, "ratio": cmp.ratio, "ratio_equal": ratio_equal })
        );
        return Ok(Status::Feasible);
    }
    println!("noma:          {:.9}", cmp.noma);
    println!("tdma optimal:  {:.9}", cmp.tdma_optimal);
    println!("tdma equal:    {:.9}", cmp.tdma_equal);
    println!("ratio (noma/tdma optimal): {:.6}", cmp.ratio);
    println!("ratio (noma/tdma equal):   {:.6}", ratio_equal);
    Ok(Status::Feasible)
}
