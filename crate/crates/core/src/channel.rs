//! Channel realizations: Rayleigh block fading with distance path loss.
//!
//! All randomness in the crate flows through [`substream`], so a
//! `(seed, index)` pair identifies a reproducible, independent stream.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, NomaError, Result};
use crate::scalar::{all_finite, Scalar};

/// Deployment geometry and receiver noise levels.
///
/// Distances are in any consistent length unit, noise powers in mW.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkGeometry<T> {
    user_distances: Vec<T>,
    eaves_distance: T,
    path_loss_exponent: T,
    user_noise_power: T,
    eaves_noise_power: T,
}

impl<T: Scalar> NetworkGeometry<T> {
    pub fn new(
        user_distances: Vec<T>,
        eaves_distance: T,
        path_loss_exponent: T,
        user_noise_power: T,
        eaves_noise_power: T,
    ) -> Result<Self> {
        if user_distances.is_empty() {
            return invalid("geometry needs at least one user");
        }
        let scalars = [eaves_distance, path_loss_exponent, user_noise_power, eaves_noise_power];
        if !all_finite(&user_distances) || !all_finite(&scalars) {
            return Err(NomaError::NonFinite("network geometry"));
        }
        if user_distances.iter().any(|d| *d <= T::zero()) || eaves_distance <= T::zero() {
            return invalid("distances must be positive");
        }
        if path_loss_exponent <= T::zero() {
            return invalid("path-loss exponent must be positive");
        }
        if user_noise_power <= T::zero() || eaves_noise_power <= T::zero() {
            return invalid("noise powers must be positive");
        }
        Ok(Self { user_distances, eaves_distance, path_loss_exponent, user_noise_power, eaves_noise_power })
    }

    /// `num_users` users all placed at `user_distance`.
    pub fn equidistant(
        num_users: usize,
        user_distance: T,
        eaves_distance: T,
        path_loss_exponent: T,
        user_noise_power: T,
        eaves_noise_power: T,
    ) -> Result<Self> {
        Self::new(
            vec![user_distance; num_users],
            eaves_distance,
            path_loss_exponent,
            user_noise_power,
            eaves_noise_power,
        )
    }

    pub fn num_users(&self) -> usize {
        self.user_distances.len()
    }

    pub fn user_distances(&self) -> &[T] {
        &self.user_distances
    }

    pub fn eaves_distance(&self) -> T {
        self.eaves_distance
    }

    pub fn path_loss_exponent(&self) -> T {
        self.path_loss_exponent
    }

    pub fn user_noise_power(&self) -> T {
        self.user_noise_power
    }

    pub fn eaves_noise_power(&self) -> T {
        self.eaves_noise_power
    }

    /// Mean normalized gain of user `k`: `d_k^-α / σ_u²`.
    pub fn mean_user_gain(&self, k: usize) -> T {
        self.user_distances[k].powf(-self.path_loss_exponent) / self.user_noise_power
    }

    /// Average normalized eavesdropper gain `d_e^-α / σ_e²`.
    pub fn eaves_avg_gain(&self) -> T {
        self.eaves_distance.powf(-self.path_loss_exponent) / self.eaves_noise_power
    }
}

/// Normalized user gains, sorted ascending, plus the eavesdropper's average gain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelRealization<T> {
    gains: Vec<T>,
    eaves_avg_gain: T,
}

impl<T: Scalar> ChannelRealization<T> {
    /// Builds a realization from gains that are already in ascending order.
    pub fn new(gains: Vec<T>, eaves_avg_gain: T) -> Result<Self> {
        Self::validate(&gains, eaves_avg_gain)?;
        if gains.windows(2).any(|w| w[0] > w[1]) {
            return invalid("user gains must be sorted ascending");
        }
        Ok(Self { gains, eaves_avg_gain })
    }

    /// Sorts `gains` ascending (stable) and returns the realization together
    /// with the original index of each sorted position.
    pub fn from_unsorted(gains: Vec<T>, eaves_avg_gain: T) -> Result<(Self, Vec<usize>)> {
        Self::validate(&gains, eaves_avg_gain)?;
        let order = crate::secrecy::optimal_decoding_order(&gains);
        let sorted = order.iter().map(|&i| gains[i]).collect();
        Ok((Self { gains: sorted, eaves_avg_gain }, order))
    }

    fn validate(gains: &[T], eaves_avg_gain: T) -> Result<()> {
        if gains.is_empty() {
            return invalid("channel needs at least one user gain");
        }
        if !all_finite(gains) || !eaves_avg_gain.is_finite() {
            return Err(NomaError::NonFinite("channel gains"));
        }
        if gains.iter().any(|g| *g <= T::zero()) {
            return invalid("user gains must be positive");
        }
        if eaves_avg_gain <= T::zero() {
            return invalid("eavesdropper average gain must be positive");
        }
        Ok(())
    }

    pub fn num_users(&self) -> usize {
        self.gains.len()
    }

    pub fn gains(&self) -> &[T] {
        &self.gains
    }

    pub fn gain(&self, k: usize) -> T {
        self.gains[k]
    }

    pub fn eaves_avg_gain(&self) -> T {
        self.eaves_avg_gain
    }

    /// Keeps only the users at `indices` (ascending positions in this realization).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut gains = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.gains.len() {
                return Err(NomaError::IndexOutOfRange { index: i, len: self.gains.len() });
            }
            gains.push(self.gains[i]);
        }
        Self::new(gains, self.eaves_avg_gain)
    }
}

/// Independent ChaCha stream number `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws from Exponential(mean 1) by inverting the CDF.
pub fn unit_exponential<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    -u.ln()
}

/// Draws one block-fading realization for `geometry`.
pub fn sample_realization<T: Scalar>(geometry: &NetworkGeometry<T>, seed: u64) -> ChannelRealization<T> {
    sample_with(geometry, &mut substream(seed, 0))
}

/// Same as [`sample_realization`] but drawing from a caller-provided stream.
pub fn sample_with<T: Scalar, R: Rng + ?Sized>(geometry: &NetworkGeometry<T>, rng: &mut R) -> ChannelRealization<T> {
    let mut gains: Vec<T> =
        (0..geometry.num_users()).map(|k| geometry.mean_user_gain(k) * T::lit(unit_exponential(rng))).collect();
    gains.sort_by(|a, b| a.partial_cmp(b).expect("finite gains"));
    ChannelRealization { gains, eaves_avg_gain: geometry.eaves_avg_gain() }
}

/// `10^(value/10)`.
pub fn db_to_linear<T: Scalar>(value_db: T) -> T {
    T::lit(10.0).powf(value_db / T::lit(10.0))
}

/// dBm (referenced to 1 mW) to mW.
pub fn dbm_to_mw<T: Scalar>(value_dbm: T) -> T {
    db_to_linear(value_dbm)
}

/// mW to dBm; non-positive powers map to negative infinity.
pub fn mw_to_dbm<T: Scalar>(value_mw: T) -> T {
    T::lit(10.0) * value_mw.log10()
}
