//! Max-min confidential rate under a total power budget.
//!
//! For any `K` the optimum is found by bisection on the common rate, using
//! the closed-form minimum-power allocation as the feasibility test. For two
//! users the optimum is also available in closed form.

use serde::Serialize;

use crate::channel::ChannelRealization;
use crate::error::{invalid, NomaError, Result};
use crate::outcome::{InfeasibilityReason, InfeasibleVerdict, SolveOutcome};
use crate::power_min::min_power_recursion;
use crate::scalar::Scalar;
use crate::secrecy::{check_outage_budget, stringency, PowerAllocation};

/// Default bisection tolerance on the rate, in bits per channel use.
pub const DEFAULT_RATE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxMinSolution<T> {
    /// Largest certified common confidential rate.
    pub rate: T,
    /// Allocation achieving `rate`; `None` when no positive rate could be
    /// certified within the tolerance.
    pub allocation: Option<PowerAllocation<T>>,
    pub iterations_used: usize,
}

impl<T: Scalar> MaxMinSolution<T> {
    pub fn total_power(&self) -> T {
        self.allocation.as_ref().map_or(T::zero(), |a| a.total())
    }
}

fn check_budget<T: Scalar>(budget: T) -> Result<()> {
    if !budget.is_finite() {
        return Err(NomaError::NonFinite("power budget"));
    }
    if budget <= T::zero() {
        return invalid("power budget must be positive");
    }
    Ok(())
}

fn positive_rate_verdict<T: Scalar>(gains: &[T], phi: T) -> Option<InfeasibleVerdict> {
    let failing: Vec<usize> = (0..gains.len()).filter(|&k| !(gains[k] > phi)).collect();
    (!failing.is_empty()).then(|| InfeasibleVerdict::new(failing, InfeasibilityReason::PositiveRateCondition))
}

/// True iff every `γ_k > γ̄_e ln(1/ε)`, i.e. some positive common rate is achievable.
pub fn check_positive_rate_feasibility<T: Scalar>(channel: &ChannelRealization<T>, outage_budget: T) -> Result<bool> {
    check_outage_budget(outage_budget)?;
    let phi = stringency(channel.eaves_avg_gain(), outage_budget);
    Ok(positive_rate_verdict(channel.gains(), phi).is_none())
}

/// Number of halvings needed to shrink an interval of `width` below `tolerance`.
pub fn bisection_iterations<T: Scalar>(width: T, tolerance: T) -> usize {
    let ratio = width / tolerance;
    if ratio <= T::one() {
        0
    } else {
        ratio.log2().ceil().to_usize().unwrap_or(usize::MAX)
    }
}

/// Bisection on the common rate over `[0, log2(1 + γ_1 P)]`.
///
/// Each midpoint is accepted when the minimum-power recursion is feasible and
/// its total fits in `budget`; the last accepted rate and allocation are
/// returned. The loop runs exactly `⌈log2(width / tolerance)⌉` times.
pub fn solve_maxmin_bisection<T: Scalar>(
    channel: &ChannelRealization<T>,
    outage_budget: T,
    budget: T,
    tolerance: T,
) -> Result<SolveOutcome<MaxMinSolution<T>>> {
    check_outage_budget(outage_budget)?;
    check_budget(budget)?;
    if !(tolerance > T::zero()) || !tolerance.is_finite() {
        return invalid("rate tolerance must be positive");
    }
    let gains = channel.gains();
    let phi = stringency(channel.eaves_avg_gain(), outage_budget);
    if let Some(v) = positive_rate_verdict(gains, phi) {
        return Ok(SolveOutcome::Infeasible(v));
    }

    let mut lower = T::zero();
    let mut upper = (T::one() + gains[0] * budget).log2();
    let iterations = bisection_iterations(upper - lower, tolerance);
    let mut best: Option<(T, Vec<T>)> = None;
    for _ in 0..iterations {
        let q = (upper + lower) / T::two();
        match min_power_recursion(gains, phi, q) {
            SolveOutcome::Feasible(powers) if sum(&powers) <= budget => {
                lower = q;
                best = Some((q, powers));
            }
            _ => upper = q,
        }
    }
    let (rate, allocation) = match best {
        Some((q, powers)) => (q, Some(PowerAllocation::new(powers)?)),
        None => (T::zero(), None),
    };
    Ok(SolveOutcome::Feasible(MaxMinSolution { rate, allocation, iterations_used: iterations }))
}

fn sum<T: Scalar>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |a, b| a + *b)
}

/// Closed-form pieces of the two-user optimum.
struct TwoUserForm<T> {
    psi: T,
    denom: T,
    load: T,
}

impl<T: Scalar> TwoUserForm<T> {
    fn new(g1: T, g2: T, phi: T, budget: T) -> Self {
        let one = T::one();
        let four = T::lit(4.0);
        let load = one + phi * budget;
        let psi = (load * (four * (one + g1 * budget) * (g1 - phi) * (g2 - phi) + load * (g2 - g1).powi(2))).sqrt();
        let denom = T::two() * (load * g1 * g2 - phi * phi * (one + g1 * budget));
        Self { psi, denom, load }
    }

    fn weak_power(&self, g1: T, g2: T, phi: T, budget: T) -> T {
        let one = T::one();
        (self.load * (g2 + g1 * (one + T::two() * g2 * budget) - T::two() * phi * (one + g1 * budget)) - self.psi)
            / self.denom
    }

    fn strong_power(&self, g1: T, g2: T, phi: T, budget: T) -> T {
        (self.psi - (g1 + g2) - phi * (g2 * budget - g1 * budget - T::two())) / self.denom
    }

    /// `2^R*`, the binding bound on `2^Q`.
    fn rate_bound(&self, g1: T, g2: T, phi: T) -> T {
        (self.psi - self.load * (g2 - g1)) / (T::two() * self.load * (g1 - phi))
    }
}

fn check_two_user<T: Scalar>(g1: T, g2: T, phi: T, budget: T) -> Result<()> {
    check_budget(budget)?;
    if ![g1, g2, phi].iter().all(|v| v.is_finite()) {
        return Err(NomaError::NonFinite("two-user parameters"));
    }
    if !(phi > T::zero() && g1 > phi && g2 >= g1) {
        return invalid("two-user closed form needs γ2 >= γ1 > φ > 0");
    }
    Ok(())
}

/// Two-user max-min optimum in closed form. The optimal rate is
/// `log2(b3)` where `b3` is the binding bound from [`bound_triple`].
pub fn solve_maxmin_two_user<T: Scalar>(
    channel: &ChannelRealization<T>,
    outage_budget: T,
    budget: T,
) -> Result<SolveOutcome<MaxMinSolution<T>>> {
    if channel.num_users() != 2 {
        return invalid("closed form needs exactly two users");
    }
    check_outage_budget(outage_budget)?;
    check_budget(budget)?;
    let phi = stringency(channel.eaves_avg_gain(), outage_budget);
    if let Some(v) = positive_rate_verdict(channel.gains(), phi) {
        return Ok(SolveOutcome::Infeasible(v));
    }
    let (g1, g2) = (channel.gain(0), channel.gain(1));
    let form = TwoUserForm::new(g1, g2, phi, budget);
    let powers = vec![form.weak_power(g1, g2, phi, budget), form.strong_power(g1, g2, phi, budget)];
    Ok(SolveOutcome::Feasible(MaxMinSolution {
        rate: form.rate_bound(g1, g2, phi).log2(),
        allocation: Some(PowerAllocation::new(powers)?),
        iterations_used: 0,
    }))
}

/// Optimal share of the budget given to the weaker user, `P_1* / P`.
pub fn optimal_power_ratio_user1<T: Scalar>(g1: T, g2: T, phi: T, budget: T) -> Result<T> {
    check_two_user(g1, g2, phi, budget)?;
    let form = TwoUserForm::new(g1, g2, phi, budget);
    Ok(form.weak_power(g1, g2, phi, budget) / budget)
}

/// Upper bounds on `2^Q` for the two-user problem: strongest-user
/// feasibility (`b1`), weaker-user feasibility (`b2`) and the power budget
/// (`b3`). The budget bound is always the smallest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundTriple<T> {
    pub b1: T,
    pub b2: T,
    pub b3: T,
}

impl<T: Scalar> BoundTriple<T> {
    pub fn min(&self) -> T {
        self.b1.min(self.b2).min(self.b3)
    }
}

pub fn bound_triple<T: Scalar>(g1: T, g2: T, phi: T, budget: T) -> Result<BoundTriple<T>> {
    check_two_user(g1, g2, phi, budget)?;
    let b1 = g2 / phi;
    let inner = T::lit(4.0) * phi * phi * g1 - T::lit(3.0) * phi * g1 * g1 - T::lit(6.0) * phi * g1 * g2
        + T::lit(4.0) * g1 * g1 * g2
        + phi * g2 * g2;
    let b2 = (inner.sqrt() / phi.sqrt() - (g2 - g1)) / (T::two() * (g1 - phi));
    let b3 = TwoUserForm::new(g1, g2, phi, budget).rate_bound(g1, g2, phi);
    Ok(BoundTriple { b1, b2, b3 })
}
