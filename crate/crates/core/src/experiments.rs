//! Parameter sweeps comparing NOMA with the TDMA baselines.
//!
//! Deterministic sweeps fix one channel realization given in dB. Fading
//! sweeps draw `trials` realizations per axis point; trial `i` always uses
//! stream `i` of the seed, so every axis point sees the same fading draws
//! and the output is identical across runs and thread counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{db_to_linear, dbm_to_mw, sample_with, substream, ChannelRealization, NetworkGeometry};
use crate::config::ConfigMap;
use crate::error::{invalid, NomaError, Result};
use crate::maxmin::{optimal_power_ratio_user1, solve_maxmin_bisection, DEFAULT_RATE_TOLERANCE};
use crate::oma::{tdma_maxmin, tdma_min_power, TdmaMode};
use crate::outcome::SolveOutcome;
use crate::power_min::solve_min_power;
use crate::secrecy::{stringency, SecrecyRequirement};

pub const CSV_HEADER: &str = "x,scheme,metric,value,stderr,feasible_frac,trials,seed";
pub const DEFAULT_TRIALS: u64 = 5_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Minimum total power versus the QoS rate, fixed gains.
    PowerVsQ,
    /// Max-min rate versus power budget, fixed gains.
    RateVsP,
    /// Optimal weak-user power share versus outage budget, two users.
    BetaVsEps,
    /// Fading-averaged max-min rate versus outage budget.
    AvgRateVsEps,
    /// Fading-averaged NOMA/TDMA gain versus number of users.
    GainVsK,
}

impl SweepKind {
    /// Name of the swept parameter.
    pub fn axis_name(self) -> &'static str {
        match self {
            SweepKind::PowerVsQ => "q",
            SweepKind::RateVsP => "power_dbm",
            SweepKind::BetaVsEps | SweepKind::AvgRateVsEps => "eps",
            SweepKind::GainVsK => "num_users",
        }
    }

    pub fn is_fading(self) -> bool {
        matches!(self, SweepKind::AvgRateVsEps | SweepKind::GainVsK)
    }

    fn required_params(self) -> &'static [&'static str] {
        const GEOMETRY: [&str; 5] =
            ["user_distance", "eaves_distance", "path_loss_exponent", "user_noise_dbm", "eaves_noise_dbm"];
        match self {
            SweepKind::PowerVsQ => &["gains_db", "eaves_db", "eps"],
            SweepKind::RateVsP => &["gains_db", "eaves_db", "eps"],
            SweepKind::BetaVsEps => &["gains_db", "eaves_db", "power_dbm"],
            SweepKind::AvgRateVsEps => {
                &["num_users", GEOMETRY[0], GEOMETRY[1], GEOMETRY[2], GEOMETRY[3], GEOMETRY[4], "power_dbm"]
            }
            SweepKind::GainVsK => {
                &["eps", GEOMETRY[0], GEOMETRY[1], GEOMETRY[2], GEOMETRY[3], GEOMETRY[4], "power_dbm"]
            }
        }
    }
}

impl FromStr for SweepKind {
    type Err = NomaError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "power_vs_q" => SweepKind::PowerVsQ,
            "rate_vs_p" => SweepKind::RateVsP,
            "beta_vs_eps" => SweepKind::BetaVsEps,
            "avg_rate_vs_eps" => SweepKind::AvgRateVsEps,
            "gain_vs_k" => SweepKind::GainVsK,
            other => return invalid(format!("unknown sweep kind `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        (0..self.steps).map(|i| self.start + span * i as f64 / (self.steps - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    /// Named parameters; scalars are one-element lists.
    pub fixed_params: BTreeMap<String, Vec<f64>>,
    pub axis: SweepAxis,
    pub trials: u64,
    pub seed: u64,
}

const RESERVED_KEYS: [&str; 7] = ["kind", "axis", "start", "stop", "steps", "trials", "seed"];

impl SweepSpec {
    /// Reads a spec from a parsed config file.
    ///
    /// Reserved keys: `kind`, `axis`, `start`, `stop`, `steps`, `trials`,
    /// `seed`. Every other key becomes a fixed parameter.
    pub fn from_config(cfg: &ConfigMap) -> Result<Self> {
        let kind: SweepKind = cfg.require("kind")?.parse()?;
        let axis_name = cfg.get("axis").unwrap_or(kind.axis_name()).to_string();
        let axis = SweepAxis {
            name: axis_name,
            start: cfg.f64("start")?,
            stop: cfg.f64("stop")?,
            steps: cfg.u64("steps")? as usize,
        };
        let trials = if cfg.get("trials").is_some() {
            cfg.u64("trials")?
        } else if kind.is_fading() {
            DEFAULT_TRIALS
        } else {
            1
        };
        let seed = if cfg.get("seed").is_some() { cfg.u64("seed")? } else { 0 };
        let mut fixed_params = BTreeMap::new();
        for key in cfg.keys().filter(|k| !RESERVED_KEYS.contains(k)) {
            fixed_params.insert(key.to_string(), cfg.f64_list(key)?);
        }
        let spec = Self { kind, fixed_params, axis, trials, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_config(&ConfigMap::load(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.axis.name != self.kind.axis_name() {
            return invalid(format!("sweep kind expects axis `{}`, got `{}`", self.kind.axis_name(), self.axis.name));
        }
        if self.axis.steps < 2 {
            return invalid("sweep needs at least two steps");
        }
        if !self.axis.start.is_finite() || !self.axis.stop.is_finite() {
            return Err(NomaError::NonFinite("sweep axis"));
        }
        if self.trials == 0 {
            return invalid("trials must be at least one");
        }
        for key in self.kind.required_params() {
            if !self.fixed_params.contains_key(*key) {
                return invalid(format!("missing parameter `{key}`"));
            }
        }
        if self.kind == SweepKind::BetaVsEps && self.fixed_params["gains_db"].len() != 2 {
            return invalid("beta_vs_eps needs exactly two gains");
        }
        Ok(())
    }

    fn scalar(&self, key: &str) -> Result<f64> {
        match self.fixed_params.get(key).map(Vec::as_slice) {
            Some([v]) => Ok(*v),
            Some(_) => invalid(format!("parameter `{key}` must be a single number")),
            None => invalid(format!("missing parameter `{key}`")),
        }
    }

    fn scalar_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.fixed_params.contains_key(key) {
            self.scalar(key)
        } else {
            Ok(default)
        }
    }

    fn channel_from_db(&self) -> Result<ChannelRealization<f64>> {
        let gains = self.fixed_params["gains_db"].iter().map(|g| db_to_linear(*g)).collect();
        let eaves = db_to_linear(self.scalar("eaves_db")?);
        Ok(ChannelRealization::from_unsorted(gains, eaves)?.0)
    }

    fn geometry(&self, num_users: usize) -> Result<NetworkGeometry<f64>> {
        NetworkGeometry::equidistant(
            num_users,
            self.scalar("user_distance")?,
            self.scalar("eaves_distance")?,
            self.scalar("path_loss_exponent")?,
            dbm_to_mw(self.scalar("user_noise_dbm")?),
            dbm_to_mw(self.scalar("eaves_noise_dbm")?),
        )
    }
}

/// One CSV row: a metric of one scheme at one axis point.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub x: f64,
    pub scheme: String,
    pub metric: String,
    pub value: f64,
    pub stderr: f64,
    pub feasible_frac: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Per-realization outcome of a fading trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub noma: f64,
    pub tdma_equal: f64,
    pub tdma_optimal: f64,
    pub feasible: bool,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<AggregateResult>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for x in spec.axis.values() {
        match spec.kind {
            SweepKind::PowerVsQ => power_vs_q_point(spec, x, &mut rows)?,
            SweepKind::RateVsP => rate_vs_p_point(spec, x, &mut rows)?,
            SweepKind::BetaVsEps => beta_point(spec, x, &mut rows)?,
            SweepKind::AvgRateVsEps => {
                let k = spec.scalar("num_users")?;
                fading_point(spec, x, as_user_count(k)?, spec.scalar("power_dbm")?, x, &mut rows)?
            }
            SweepKind::GainVsK => {
                let eps = spec.scalar("eps")?;
                fading_point(spec, x, as_user_count(x)?, spec.scalar("power_dbm")?, eps, &mut rows)?
            }
        }
    }
    Ok(rows)
}

fn as_user_count(x: f64) -> Result<usize> {
    let k = x.round();
    if !(k >= 1.0) {
        return invalid(format!("number of users must be at least one, got {x}"));
    }
    Ok(k as usize)
}

fn deterministic_row(x: f64, scheme: &str, metric: &str, value: f64, feasible: bool, seed: u64) -> AggregateResult {
    AggregateResult {
        x,
        scheme: scheme.into(),
        metric: metric.into(),
        value,
        stderr: 0.0,
        feasible_frac: if feasible { 1.0 } else { 0.0 },
        trials: 1,
        seed,
    }
}

fn power_vs_q_point(spec: &SweepSpec, q: f64, rows: &mut Vec<AggregateResult>) -> Result<()> {
    let channel = spec.channel_from_db()?;
    let eps = spec.scalar("eps")?;
    let req = SecrecyRequirement::new(q, eps)?;
    let (noma, noma_ok) = match solve_min_power(&channel, &req)? {
        SolveOutcome::Feasible(s) => (s.total_power, true),
        SolveOutcome::Infeasible(_) => (f64::INFINITY, false),
    };
    rows.push(deterministic_row(q, "noma", "total_power", noma, noma_ok, spec.seed));
    let (avg, peak, ok) = match tdma_min_power(&channel, q, eps)? {
        SolveOutcome::Feasible(t) => (t.average_power, t.peak_power, true),
        SolveOutcome::Infeasible(_) => (f64::INFINITY, f64::INFINITY, false),
    };
    rows.push(deterministic_row(q, "tdma_equal", "average_power", avg, ok, spec.seed));
    rows.push(deterministic_row(q, "tdma_equal", "peak_power", peak, ok, spec.seed));
    Ok(())
}

fn rate_vs_p_point(spec: &SweepSpec, power_dbm: f64, rows: &mut Vec<AggregateResult>) -> Result<()> {
    let channel = spec.channel_from_db()?;
    let eps = spec.scalar("eps")?;
    let power = dbm_to_mw(power_dbm);
    let tol = spec.scalar_or("tolerance", DEFAULT_RATE_TOLERANCE)?;
    let (noma, ok) = match solve_maxmin_bisection(&channel, eps, power, tol)? {
        SolveOutcome::Feasible(s) => (s.rate, true),
        SolveOutcome::Infeasible(_) => (0.0, false),
    };
    rows.push(deterministic_row(power_dbm, "noma", "min_rate", noma, ok, spec.seed));
    for (scheme, mode) in [("tdma_optimal", TdmaMode::OptimalTime), ("tdma_equal", TdmaMode::EqualTime)] {
        let r = tdma_maxmin(&channel, eps, power, mode)?.rate;
        rows.push(deterministic_row(power_dbm, scheme, "min_rate", r, ok, spec.seed));
    }
    Ok(())
}

fn beta_point(spec: &SweepSpec, eps: f64, rows: &mut Vec<AggregateResult>) -> Result<()> {
    let channel = spec.channel_from_db()?;
    let power = dbm_to_mw(spec.scalar("power_dbm")?);
    let phi = stringency(channel.eaves_avg_gain(), eps);
    let (g1, g2) = (channel.gain(0), channel.gain(1));
    let (beta, ok) = if g1 > phi { (optimal_power_ratio_user1(g1, g2, phi, power)?, true) } else { (f64::NAN, false) };
    rows.push(deterministic_row(eps, "noma", "beta1", beta, ok, spec.seed));
    Ok(())
}

/// Runs one fading trial: NOMA bisection and both TDMA variants on the same
/// realization. Infeasible realizations score zero for every scheme.
pub fn fading_trial(
    geometry: &NetworkGeometry<f64>,
    outage_budget: f64,
    power: f64,
    tolerance: f64,
    seed: u64,
    trial: u64,
) -> Result<TrialRecord> {
    let channel = sample_with(geometry, &mut substream(seed, trial));
    let noma = solve_maxmin_bisection(&channel, outage_budget, power, tolerance)?;
    let Some(noma) = noma.feasible() else {
        return Ok(TrialRecord { noma: 0.0, tdma_equal: 0.0, tdma_optimal: 0.0, feasible: false });
    };
    Ok(TrialRecord {
        noma: noma.rate,
        tdma_equal: tdma_maxmin(&channel, outage_budget, power, TdmaMode::EqualTime)?.rate,
        tdma_optimal: tdma_maxmin(&channel, outage_budget, power, TdmaMode::OptimalTime)?.rate,
        feasible: true,
    })
}

fn fading_point(
    spec: &SweepSpec,
    x: f64,
    num_users: usize,
    power_dbm: f64,
    eps: f64,
    rows: &mut Vec<AggregateResult>,
) -> Result<()> {
    let geometry = spec.geometry(num_users)?;
    let power = dbm_to_mw(power_dbm);
    let tol = spec.scalar_or("tolerance", DEFAULT_RATE_TOLERANCE)?;
    let records = (0..spec.trials)
        .into_par_iter()
        .map(|i| fading_trial(&geometry, eps, power, tol, spec.seed, i))
        .collect::<Result<Vec<_>>>()?;
    let n = records.len() as f64;
    let feasible_frac = records.iter().filter(|r| r.feasible).count() as f64 / n;
    let noma: Vec<f64> = records.iter().map(|r| r.noma).collect();
    let tdma_eq: Vec<f64> = records.iter().map(|r| r.tdma_equal).collect();
    let tdma_opt: Vec<f64> = records.iter().map(|r| r.tdma_optimal).collect();
    let row = |scheme: &str, metric: &str, (value, stderr): (f64, f64)| AggregateResult {
        x,
        scheme: scheme.into(),
        metric: metric.into(),
        value,
        stderr,
        feasible_frac,
        trials: spec.trials,
        seed: spec.seed,
    };
    rows.push(row("noma", "avg_min_rate", mean_stderr(&noma)));
    rows.push(row("tdma_optimal", "avg_min_rate", mean_stderr(&tdma_opt)));
    rows.push(row("tdma_equal", "avg_min_rate", mean_stderr(&tdma_eq)));
    if spec.kind == SweepKind::GainVsK {
        rows.push(row("noma_over_tdma_equal", "ratio", ratio_stderr(&noma, &tdma_eq)));
        rows.push(row("noma_over_tdma_optimal", "ratio", ratio_stderr(&noma, &tdma_opt)));
    }
    Ok(())
}

/// Sample mean and its standard error (zero for a single sample).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Ratio of means with a first-order (delta method) standard error for paired samples.
pub fn ratio_stderr(num: &[f64], den: &[f64]) -> (f64, f64) {
    let n = num.len() as f64;
    let (mx, _) = mean_stderr(num);
    let (my, _) = mean_stderr(den);
    let ratio = mx / my;
    if num.len() < 2 || my == 0.0 {
        return (ratio, 0.0);
    }
    let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
    for (x, y) in num.iter().zip(den) {
        vx += (x - mx).powi(2);
        vy += (y - my).powi(2);
        cxy += (x - mx) * (y - my);
    }
    let scale = 1.0 / ((n - 1.0) * n);
    let var = scale * (vx + ratio * ratio * vy - 2.0 * ratio * cxy) / (my * my);
    (ratio, var.max(0.0).sqrt())
}

/// Formats with 12 significant digits in scientific notation.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.11e}")
    }
}

pub fn to_csv(rows: &[AggregateResult]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_sig12(r.x),
            r.scheme,
            r.metric,
            format_sig12(r.value),
            format_sig12(r.stderr),
            format_sig12(r.feasible_frac),
            r.trials,
            r.seed
        )
        .expect("writing to a String");
    }
    out
}

pub fn write_results(rows: &[AggregateResult], path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_csv(rows))?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<Vec<AggregateResult>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => return invalid("missing or unexpected CSV header"),
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let bad = |what: &str| NomaError::Config { line: i + 1, message: format!("bad {what}") };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 8 {
                return Err(bad("field count"));
            }
            let num = |s: &str, what: &str| s.parse::<f64>().map_err(|_| bad(what));
            Ok(AggregateResult {
                x: num(f[0], "x")?,
                scheme: f[1].to_string(),
                metric: f[2].to_string(),
                value: num(f[3], "value")?,
                stderr: num(f[4], "stderr")?,
                feasible_frac: num(f[5], "feasible_frac")?,
                trials: f[6].parse().map_err(|_| bad("trials"))?,
                seed: f[7].parse().map_err(|_| bad("seed"))?,
            })
        })
        .collect()
}

pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<AggregateResult>> {
    parse_csv(&std::fs::read_to_string(path)?)
}
