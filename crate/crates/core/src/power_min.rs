//! Minimum total transmit power meeting a common confidential-rate floor and
//! secrecy-outage budget.
//!
//! With the canonical decoding order the optimum is found backwards from the
//! strongest user: each power is the smallest one that makes its own outage
//! constraint active given the powers already fixed above it.

use serde::Serialize;

use crate::channel::ChannelRealization;
use crate::error::{invalid, Result};
use crate::outcome::{InfeasibilityReason, InfeasibleVerdict, SolveOutcome};
use crate::scalar::Scalar;
use crate::secrecy::{codeword_rate_in_order, PowerAllocation, RatePair, SecrecyRequirement};

/// Denominators at or below this are treated as infeasible.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerMinSolution<T> {
    pub allocation: PowerAllocation<T>,
    pub rate_pairs: Vec<RatePair<T>>,
    pub total_power: T,
}

/// Closed-form minimum-power allocation.
///
/// Feasibility is checked inside the backward recursion because each user's
/// condition depends on the powers of the users decoded after it. The verdict
/// names the first user (in recursion order) whose condition fails.
pub fn solve_min_power<T: Scalar>(
    channel: &ChannelRealization<T>,
    req: &SecrecyRequirement<T>,
) -> Result<SolveOutcome<PowerMinSolution<T>>> {
    Ok(min_power_recursion(channel.gains(), req.stringency(channel), req.qos_rate()).map(|powers| {
        let rate_pairs = (0..powers.len())
            .map(|k| RatePair {
                codeword_rate: codeword_rate_in_order(channel.gains(), &powers, k),
                confidential_rate: req.qos_rate(),
            })
            .collect();
        let allocation = PowerAllocation::new(powers).expect("recursion yields positive finite powers");
        let total_power = allocation.total();
        PowerMinSolution { allocation, rate_pairs, total_power }
    }))
}

/// Backward recursion on sorted `gains` with stringency `phi` and rate `q`.
pub(crate) fn min_power_recursion<T: Scalar>(gains: &[T], phi: T, q: T) -> SolveOutcome<Vec<T>> {
    let n = gains.len();
    let two_q = T::exp2_of(q);
    let excess = two_q - T::one();
    let floor = T::lit(DENOMINATOR_FLOOR);
    let mut powers = vec![T::zero(); n];
    let mut tail = T::zero();
    for k in (0..n).rev() {
        let gain = gains[k];
        let denom = gain * (T::one() - phi * excess * tail) - phi * two_q;
        let power = excess * (T::one() + phi * tail) * (T::one() + gain * tail) / denom;
        if !(denom > floor) || !power.is_finite() || !(power > T::zero()) {
            let reason =
                if k + 1 == n { InfeasibilityReason::LastUserCondition } else { InfeasibilityReason::UserCondition };
            return SolveOutcome::Infeasible(InfeasibleVerdict::new(vec![k], reason));
        }
        powers[k] = power;
        tail = tail + power;
    }
    SolveOutcome::Feasible(powers)
}

/// Users kept by the best-channel-first selection and their allocation.
/// An empty selection means transmission is suspended.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserSelection<T> {
    /// Positions in the input realization, ascending.
    pub users: Vec<usize>,
    pub solution: Option<PowerMinSolution<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionPolicy {
    #[default]
    BestChannelGreedy,
}

/// Drops every user with `γ_i <= φ 2^Q`, then adds the remaining users from
/// the strongest down until the minimum-power problem becomes infeasible.
pub fn select_users<T: Scalar>(
    channel: &ChannelRealization<T>,
    req: &SecrecyRequirement<T>,
    policy: SelectionPolicy,
) -> Result<UserSelection<T>> {
    let SelectionPolicy::BestChannelGreedy = policy;
    let threshold = req.stringency(channel) * T::exp2_of(req.qos_rate());
    let mut users = Vec::new();
    let mut solution = None;
    for candidate in (0..channel.num_users()).rev().filter(|&i| channel.gain(i) > threshold) {
        let mut trial = users.clone();
        trial.insert(0, candidate);
        match solve_min_power(&channel.subset(&trial)?, req)? {
            SolveOutcome::Feasible(s) => {
                users = trial;
                solution = Some(s);
            }
            SolveOutcome::Infeasible(_) => break,
        }
    }
    Ok(UserSelection { users, solution })
}

/// Outage constraint function for user `k`: feasibility of the user's secrecy
/// constraint is `φ <= f(x, y)` with `x = P_k`, `y = Σ_{i>k} P_i`.
pub fn outage_constraint_function<T: Scalar>(gain: T, qos_rate: T, x: T, y: T) -> T {
    let two_q = T::exp2_of(qos_rate);
    let ratio = (T::one() + gain * (x + y)) / (T::one() + gain * y);
    (ratio - two_q) / (two_q * (x + y) - ratio * y)
}

/// Exhaustive grid search for the minimum total power, `K <= 3`.
///
/// Powers range over `step, 2·step, …, upper`. Returns the best total and
/// powers, or `None` when no grid point is feasible.
pub fn grid_min_power<T: Scalar>(
    channel: &ChannelRealization<T>,
    req: &SecrecyRequirement<T>,
    step: T,
    upper: T,
) -> Result<Option<(T, Vec<T>)>> {
    let n = channel.num_users();
    if n > 3 {
        return invalid("grid oracle supports at most three users");
    }
    if !(step > T::zero()) || !(upper >= step) {
        return invalid("grid needs 0 < step <= upper");
    }
    let points = (upper / step).floor().to_usize().unwrap_or(0);
    let grid = GridSearch { gains: channel.gains(), phi: req.stringency(channel), q: req.qos_rate(), step, points };
    let mut best: Option<(T, Vec<T>)> = None;
    let mut current = vec![T::zero(); n];
    grid.descend(n - 1, T::zero(), &mut current, &mut best);
    Ok(best)
}

struct GridSearch<'a, T> {
    gains: &'a [T],
    phi: T,
    q: T,
    step: T,
    points: usize,
}

impl<T: Scalar> GridSearch<'_, T> {
    fn descend(&self, k: usize, tail: T, current: &mut [T], best: &mut Option<(T, Vec<T>)>) {
        for j in 1..=self.points {
            let x = T::lit(j as f64) * self.step;
            if best.as_ref().is_some_and(|(b, _)| tail + x >= *b) {
                break;
            }
            if self.phi > outage_constraint_function(self.gains[k], self.q, x, tail) {
                continue;
            }
            current[k] = x;
            if k == 0 {
                *best = Some((tail + x, current.to_vec()));
                break;
            }
            self.descend(k - 1, tail + x, current, best);
        }
    }
}

/// Relative gap `(grid optimum - closed form) / closed form`; a correct
/// closed form gives a gap no smaller than minus rounding.
pub fn verify_optimality_bruteforce<T: Scalar>(
    channel: &ChannelRealization<T>,
    req: &SecrecyRequirement<T>,
    step: T,
    upper: T,
) -> Result<T> {
    let closed = match solve_min_power(channel, req)? {
        SolveOutcome::Feasible(s) => s.total_power,
        SolveOutcome::Infeasible(_) => return invalid("instance is infeasible"),
    };
    match grid_min_power(channel, req, step, upper)? {
        Some((grid, _)) => Ok((grid - closed) / closed),
        None => invalid("no feasible grid point inside the search box"),
    }
}
