//! SINR algebra under successive interference cancellation and the secrecy
//! outage probability of each user's wiretap-coded message.
//!
//! User indices are 0-based decoding positions. Unless a function says
//! otherwise, the decoding order is the canonical one: ascending gain, which
//! is exactly the storage order of [`ChannelRealization`].

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{substream, unit_exponential, ChannelRealization};
use crate::error::{invalid, NomaError, Result};
use crate::scalar::{all_finite, Scalar};

/// Per-user transmit powers in decoding order (mW).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerAllocation<T> {
    powers: Vec<T>,
}

impl<T: Scalar> PowerAllocation<T> {
    pub fn new(powers: Vec<T>) -> Result<Self> {
        if powers.is_empty() {
            return invalid("allocation needs at least one user");
        }
        if !all_finite(&powers) {
            return Err(NomaError::NonFinite("power allocation"));
        }
        if powers.iter().any(|p| *p <= T::zero()) {
            return invalid("every transmit power must be strictly positive");
        }
        Ok(Self { powers })
    }

    pub fn powers(&self) -> &[T] {
        &self.powers
    }

    pub fn num_users(&self) -> usize {
        self.powers.len()
    }

    pub fn total(&self) -> T {
        self.powers.iter().fold(T::zero(), |acc, p| acc + *p)
    }

    /// Interference seen while decoding message `k`: `Σ_{i>k} P_i`.
    pub fn tail_sum(&self, k: usize) -> T {
        self.powers[k + 1..].iter().fold(T::zero(), |acc, p| acc + *p)
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.powers.len() {
            return Err(NomaError::IndexOutOfRange { index: k, len: self.powers.len() });
        }
        Ok(())
    }
}

/// Wiretap-code rates for one message, in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePair<T> {
    pub codeword_rate: T,
    pub confidential_rate: T,
}

impl<T: Scalar> RatePair<T> {
    pub fn new(codeword_rate: T, confidential_rate: T) -> Result<Self> {
        if !codeword_rate.is_finite() || !confidential_rate.is_finite() {
            return Err(NomaError::NonFinite("rate pair"));
        }
        if confidential_rate < T::zero() || confidential_rate > codeword_rate {
            return invalid("rate pair must satisfy 0 <= R_s <= R_t");
        }
        Ok(Self { codeword_rate, confidential_rate })
    }

    /// Redundancy rate `R_t - R_s` spent on confusing the eavesdropper.
    pub fn redundancy(&self) -> T {
        self.codeword_rate - self.confidential_rate
    }
}

/// Common QoS floor and outage budget applied to every user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecrecyRequirement<T> {
    qos_rate: T,
    outage_budget: T,
}

impl<T: Scalar> SecrecyRequirement<T> {
    pub fn new(qos_rate: T, outage_budget: T) -> Result<Self> {
        if !qos_rate.is_finite() || !outage_budget.is_finite() {
            return Err(NomaError::NonFinite("secrecy requirement"));
        }
        if qos_rate <= T::zero() {
            return invalid("QoS rate must be positive");
        }
        check_outage_budget(outage_budget)?;
        Ok(Self { qos_rate, outage_budget })
    }

    pub fn qos_rate(&self) -> T {
        self.qos_rate
    }

    pub fn outage_budget(&self) -> T {
        self.outage_budget
    }

    /// `φ = γ̄_e ln(1/ε)` for this requirement on `channel`.
    pub fn stringency(&self, channel: &ChannelRealization<T>) -> T {
        stringency(channel.eaves_avg_gain(), self.outage_budget)
    }
}

pub(crate) fn check_outage_budget<T: Scalar>(eps: T) -> Result<()> {
    if !eps.is_finite() {
        return Err(NomaError::NonFinite("outage budget"));
    }
    if eps <= T::zero() || eps >= T::one() {
        return invalid("outage budget must lie in (0, 1)");
    }
    Ok(())
}

/// Composite secrecy stringency `φ = γ̄_e ln(1/ε)`.
pub fn stringency<T: Scalar>(eaves_avg_gain: T, outage_budget: T) -> T {
    eaves_avg_gain * outage_budget.recip().ln()
}

fn check_lengths<T: Scalar>(channel: &ChannelRealization<T>, alloc: &PowerAllocation<T>) -> Result<()> {
    if channel.num_users() != alloc.num_users() {
        return invalid(format!("channel has {} users but allocation has {}", channel.num_users(), alloc.num_users()));
    }
    Ok(())
}

#[inline]
fn sinr<T: Scalar>(gain: T, power: T, interference: T) -> T {
    gain * power / (T::one() + gain * interference)
}

/// SINR at user `k` when decoding its own message after cancelling `0..k`.
pub fn sinr_own_message<T: Scalar>(channel: &ChannelRealization<T>, alloc: &PowerAllocation<T>, k: usize) -> Result<T> {
    check_lengths(channel, alloc)?;
    alloc.check_index(k)?;
    Ok(sinr(channel.gain(k), alloc.powers()[k], alloc.tail_sum(k)))
}

/// SINR at user `m` when decoding message `k` during SIC (`k < m`).
pub fn sinr_cross_message<T: Scalar>(
    channel: &ChannelRealization<T>,
    alloc: &PowerAllocation<T>,
    m: usize,
    k: usize,
) -> Result<T> {
    check_lengths(channel, alloc)?;
    alloc.check_index(m)?;
    if k >= m {
        return invalid(format!("cross-message SINR needs k < m, got k={k}, m={m}"));
    }
    Ok(sinr(channel.gain(m), alloc.powers()[k], alloc.tail_sum(k)))
}

/// Eavesdropper SINR for message `k` at instantaneous gain `eaves_gain`,
/// assuming it has already cancelled every earlier message.
pub fn eaves_sinr<T: Scalar>(eaves_gain: T, alloc: &PowerAllocation<T>, k: usize) -> Result<T> {
    alloc.check_index(k)?;
    if !(eaves_gain > T::zero()) {
        return invalid("instantaneous eavesdropper gain must be positive");
    }
    Ok(sinr(eaves_gain, alloc.powers()[k], alloc.tail_sum(k)))
}

/// Largest codeword rate every user `i >= k` can still decode for message `k`.
pub fn max_codeword_rate<T: Scalar>(
    channel: &ChannelRealization<T>,
    alloc: &PowerAllocation<T>,
    k: usize,
) -> Result<T> {
    check_lengths(channel, alloc)?;
    alloc.check_index(k)?;
    Ok(codeword_rate_in_order(channel.gains(), alloc.powers(), k))
}

/// Max codeword rate for an arbitrary decoding order: `gains[j]` is the gain
/// of the user decoded at position `j`, so the bottleneck is the weakest user
/// from position `k` onwards.
pub fn codeword_rate_in_order<T: Scalar>(gains: &[T], powers: &[T], k: usize) -> T {
    let weakest = suffix_min(gains, k);
    let tail = powers[k + 1..].iter().fold(T::zero(), |a, p| a + *p);
    (T::one() + sinr(weakest, powers[k], tail)).log2()
}

fn suffix_min<T: Scalar>(values: &[T], k: usize) -> T {
    values[k..].iter().copied().fold(T::infinity(), T::min)
}

/// Closed-form secrecy outage of message `k` when the codeword rate is the
/// maximum decodable one and the confidential rate equals `qos_rate`.
pub fn secrecy_outage_closed_form<T: Scalar>(
    channel: &ChannelRealization<T>,
    alloc: &PowerAllocation<T>,
    qos_rate: T,
    k: usize,
) -> Result<T> {
    check_lengths(channel, alloc)?;
    alloc.check_index(k)?;
    if !(qos_rate > T::zero()) {
        return invalid("QoS rate must be positive");
    }
    Ok(secrecy_outage_in_order(channel.gains(), alloc.powers(), channel.eaves_avg_gain(), qos_rate, k))
}

/// Outage of message `k` for an arbitrary decoding order (see
/// [`codeword_rate_in_order`] for the layout of `gains`).
///
/// With `a = 2^(R_t - Q)` the eavesdropper wins iff
/// `γ_e (P_k - (a-1) S_{k+1}) > a - 1`; for an exponential `γ_e` this gives
/// `exp(-N / (γ̄_e D))` with `N = 2^R_t - 2^Q` and `D = 2^Q (P_k - (a-1) S_{k+1})`.
pub fn secrecy_outage_in_order<T: Scalar>(gains: &[T], powers: &[T], eaves_avg_gain: T, qos_rate: T, k: usize) -> T {
    let weakest = suffix_min(gains, k);
    let tail = powers[k + 1..].iter().fold(T::zero(), |a, p| a + *p);
    let through = powers[k] + tail;
    let two_q = T::exp2_of(qos_rate);
    // 2^{R_t}
    let ratio = (T::one() + weakest * through) / (T::one() + weakest * tail);
    let numer = ratio - two_q;
    let denom = two_q * through - ratio * tail;
    if denom <= T::zero() {
        return T::one();
    }
    let p = (-(numer / (eaves_avg_gain * denom))).exp();
    p.max(T::zero()).min(T::one())
}

const OUTAGE_CHUNK: u64 = 1 << 16;

/// Monte Carlo estimate of the outage of message `k`: the fraction of
/// `trials` eavesdropper draws `γ_e ~ Exp(mean γ̄_e)` whose capacity exceeds
/// the redundancy `R_t - R_s` of `rate_pairs[k]`.
///
/// Trials are split into fixed-size chunks, each on its own substream of
/// `seed`, so the estimate does not depend on thread scheduling.
pub fn empirical_outage<T: Scalar>(
    channel: &ChannelRealization<T>,
    alloc: &PowerAllocation<T>,
    rate_pairs: &[RatePair<T>],
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<T> {
    check_lengths(channel, alloc)?;
    alloc.check_index(k)?;
    if rate_pairs.len() != alloc.num_users() {
        return invalid("need one rate pair per user");
    }
    if trials == 0 {
        return invalid("need at least one trial");
    }
    let margin = rate_pairs[k].redundancy().as_f64();
    let power = alloc.powers()[k].as_f64();
    let tail = alloc.tail_sum(k).as_f64();
    let mean = channel.eaves_avg_gain().as_f64();
    let chunks = trials.div_ceil(OUTAGE_CHUNK);
    let outages: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = substream(seed, chunk);
            let n = OUTAGE_CHUNK.min(trials - chunk * OUTAGE_CHUNK);
            (0..n)
                .filter(|_| {
                    let gamma_e = mean * unit_exponential(&mut rng);
                    let capacity = (1.0 + sinr(gamma_e, power, tail)).log2();
                    margin < capacity
                })
                .count() as u64
        })
        .sum();
    Ok(T::lit(outages as f64 / trials as f64))
}

/// Optimal SIC decoding order: user indices sorted by ascending gain, ties
/// kept in original index order.
pub fn optimal_decoding_order<T: Scalar>(gains: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..gains.len()).collect();
    order.sort_by(|&a, &b| gains[a].partial_cmp(&gains[b]).unwrap_or(std::cmp::Ordering::Equal));
    order
}
