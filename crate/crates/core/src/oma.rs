//! TDMA baseline: each user gets a time fraction at full power.

use serde::Serialize;

use crate::channel::ChannelRealization;
use crate::error::{invalid, NomaError, Result};
use crate::maxmin::{solve_maxmin_bisection, solve_maxmin_two_user, DEFAULT_RATE_TOLERANCE};
use crate::outcome::{InfeasibilityReason, InfeasibleVerdict, SolveOutcome};
use crate::scalar::Scalar;
use crate::secrecy::{check_outage_budget, stringency};

/// Time fractions per user; non-negative and summing to at most one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeAllocation<T> {
    ratios: Vec<T>,
}

impl<T: Scalar> TimeAllocation<T> {
    pub fn new(ratios: Vec<T>) -> Result<Self> {
        if ratios.iter().any(|t| !t.is_finite() || *t < T::zero()) {
            return invalid("time ratios must be finite and non-negative");
        }
        let total = ratios.iter().fold(T::zero(), |a, b| a + *b);
        if total > T::one() + T::lit(1e-12) {
            return invalid("time ratios must sum to at most one");
        }
        Ok(Self { ratios })
    }

    pub fn equal(num_users: usize) -> Self {
        Self { ratios: vec![T::one() / T::lit(num_users as f64); num_users] }
    }

    pub fn ratios(&self) -> &[T] {
        &self.ratios
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TdmaMode {
    EqualTime,
    OptimalTime,
}

/// Full-slot secrecy capacity margin `[log2((1+Pγ_k)/(1+Pφ))]⁺`.
fn slot_rate<T: Scalar>(gain: T, phi: T, power: T) -> T {
    ((T::one() + power * gain) / (T::one() + power * phi)).log2().max(T::zero())
}

/// Confidential rate of a user holding time fraction `time_ratio` at power `power`.
pub fn tdma_user_rate<T: Scalar>(gain: T, eaves_avg_gain: T, outage_budget: T, power: T, time_ratio: T) -> T {
    time_ratio * slot_rate(gain, stringency(eaves_avg_gain, outage_budget), power)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TdmaMaxMin<T> {
    pub rate: T,
    pub time: TimeAllocation<T>,
}

fn check_power<T: Scalar>(power: T) -> Result<()> {
    if !power.is_finite() {
        return Err(NomaError::NonFinite("power budget"));
    }
    if power <= T::zero() {
        return invalid("power budget must be positive");
    }
    Ok(())
}

/// Max-min confidential rate of TDMA.
///
/// `OptimalTime` equalizes all user rates, `t_k ∝ 1/c_k`, which for two users
/// is the known optimal split. If any user has a zero slot rate the max-min
/// rate is zero and equal time sharing is reported.
pub fn tdma_maxmin<T: Scalar>(
    channel: &ChannelRealization<T>,
    outage_budget: T,
    power: T,
    mode: TdmaMode,
) -> Result<TdmaMaxMin<T>> {
    check_outage_budget(outage_budget)?;
    check_power(power)?;
    let k_users = channel.num_users();
    let phi = stringency(channel.eaves_avg_gain(), outage_budget);
    let rates: Vec<T> = channel.gains().iter().map(|&g| slot_rate(g, phi, power)).collect();
    if rates.iter().any(|c| *c <= T::zero()) {
        return Ok(TdmaMaxMin { rate: T::zero(), time: TimeAllocation::equal(k_users) });
    }
    match mode {
        TdmaMode::EqualTime => {
            let time = TimeAllocation::equal(k_users);
            let share = time.ratios()[0];
            let rate = rates.iter().fold(T::infinity(), |m, c| m.min(*c * share));
            Ok(TdmaMaxMin { rate, time })
        }
        TdmaMode::OptimalTime => {
            let inv_sum = rates.iter().fold(T::zero(), |a, c| a + c.recip());
            let ratios = rates.iter().map(|c| c.recip() / inv_sum).collect();
            Ok(TdmaMaxMin { rate: inv_sum.recip(), time: TimeAllocation { ratios } })
        }
    }
}

/// Per-slot powers of equal-time TDMA meeting rate `qos_rate` for every user.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TdmaPower<T> {
    pub slot_powers: Vec<T>,
    /// `(1/K) Σ P_k`.
    pub average_power: T,
    pub peak_power: T,
}

/// Minimum powers for equal-time TDMA: each user needs
/// `(1/K) log2((1+γ_k P_k)/(1+φ P_k)) >= Q`, so
/// `P_k = (2^{KQ} - 1) / (γ_k - φ 2^{KQ})`.
pub fn tdma_min_power<T: Scalar>(
    channel: &ChannelRealization<T>,
    qos_rate: T,
    outage_budget: T,
) -> Result<SolveOutcome<TdmaPower<T>>> {
    check_outage_budget(outage_budget)?;
    if !(qos_rate > T::zero()) || !qos_rate.is_finite() {
        return invalid("QoS rate must be positive");
    }
    let k_users = T::lit(channel.num_users() as f64);
    let phi = stringency(channel.eaves_avg_gain(), outage_budget);
    let two_kq = T::exp2_of(k_users * qos_rate);
    let floor = T::lit(crate::power_min::DENOMINATOR_FLOOR);
    let mut slot_powers = Vec::with_capacity(channel.num_users());
    let mut failing = Vec::new();
    for (k, &gain) in channel.gains().iter().enumerate() {
        let denom = gain - phi * two_kq;
        let p = (two_kq - T::one()) / denom;
        if !(denom > floor) || !p.is_finite() {
            failing.push(k);
        }
        slot_powers.push(p);
    }
    if !failing.is_empty() {
        return Ok(SolveOutcome::Infeasible(InfeasibleVerdict::new(failing, InfeasibilityReason::TdmaSlotCondition)));
    }
    let total = slot_powers.iter().fold(T::zero(), |a, b| a + *b);
    let peak = slot_powers.iter().copied().fold(T::zero(), T::max);
    Ok(SolveOutcome::Feasible(TdmaPower { slot_powers, average_power: total / k_users, peak_power: peak }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxMinComparison<T> {
    pub noma: T,
    pub tdma_optimal: T,
    pub tdma_equal: T,
    /// `noma / tdma_optimal`.
    pub ratio: T,
}

/// NOMA versus both TDMA variants at the same budget. Two-user instances use
/// the closed form, larger ones the bisection at the default tolerance.
pub fn compare_maxmin<T: Scalar>(
    channel: &ChannelRealization<T>,
    outage_budget: T,
    power: T,
) -> Result<SolveOutcome<MaxMinComparison<T>>> {
    let noma = if channel.num_users() == 2 {
        solve_maxmin_two_user(channel, outage_budget, power)?
    } else {
        solve_maxmin_bisection(channel, outage_budget, power, T::lit(DEFAULT_RATE_TOLERANCE))?
    };
    let noma = match noma {
        SolveOutcome::Feasible(s) => s.rate,
        SolveOutcome::Infeasible(v) => return Ok(SolveOutcome::Infeasible(v)),
    };
    let tdma_optimal = tdma_maxmin(channel, outage_budget, power, TdmaMode::OptimalTime)?.rate;
    let tdma_equal = tdma_maxmin(channel, outage_budget, power, TdmaMode::EqualTime)?.rate;
    Ok(SolveOutcome::Feasible(MaxMinComparison { noma, tdma_optimal, tdma_equal, ratio: noma / tdma_optimal }))
}

/// Upper boundaries of the two-user confidential rate regions, as
/// `(R_1, R_2)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRegionBoundary<T> {
    pub noma: Vec<(T, T)>,
    pub tdma: Vec<(T, T)>,
}

/// Samples both boundaries with `samples` points each, endpoints included.
///
/// The NOMA boundary sweeps the strong user's power `P_2` from 0 to `P`,
/// choosing the `P_2` values that space `R_2` evenly so second differences of
/// `R_1` along the list measure curvature directly. The TDMA boundary sweeps
/// `t_2` evenly over `[0, 1]`.
pub fn noma_rate_region_boundary<T: Scalar>(
    channel: &ChannelRealization<T>,
    outage_budget: T,
    power: T,
    samples: usize,
) -> Result<RateRegionBoundary<T>> {
    if channel.num_users() != 2 {
        return invalid("rate region needs exactly two users");
    }
    if samples < 2 {
        return invalid("need at least two samples");
    }
    check_outage_budget(outage_budget)?;
    check_power(power)?;
    let phi = stringency(channel.eaves_avg_gain(), outage_budget);
    let (g1, g2) = (channel.gain(0), channel.gain(1));
    if !(g1 > phi) {
        return invalid("rate region needs γ1 > φ");
    }
    let one = T::one();
    let c1 = slot_rate(g1, phi, power);
    let c2 = slot_rate(g2, phi, power);
    let last = samples - 1;
    let frac = |j: usize| T::lit(j as f64) / T::lit(last as f64);

    let noma = (0..samples)
        .map(|j| {
            let p2 = match j {
                0 => T::zero(),
                j if j == last => power,
                j => {
                    let two_r = T::exp2_of(frac(j) * c2);
                    (two_r - one) / (g2 - phi * two_r)
                }
            };
            let r1 = ((one + g1 * power) * (one + phi * p2) / ((one + g1 * p2) * (one + phi * power))).log2();
            let r2 = ((one + g2 * p2) / (one + phi * p2)).log2();
            (r1, r2)
        })
        .collect();
    let tdma = (0..samples)
        .map(|j| {
            let t2 = frac(j);
            ((one - t2) * c1, t2 * c2)
        })
        .collect();
    Ok(RateRegionBoundary { noma, tdma })
}

/// `v[i-1] - 2 v[i] + v[i+1]` for each interior point.
pub fn second_differences<T: Scalar>(values: &[T]) -> Vec<T> {
    values.windows(3).map(|w| w[0] - T::two() * w[1] + w[2]).collect()
}
