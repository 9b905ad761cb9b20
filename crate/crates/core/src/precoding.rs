//! MRT precoding, received power and max-min power allocation.

use num_complex::Complex;

use crate::channel::ChannelVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A set of unit-norm beam directions with their allocated powers.
#[derive(Debug, Clone)]
pub struct PrecoderSet<S> {
    directions: Vec<Vec<Complex<S>>>,
    powers: Vec<S>,
}

impl<S: Scalar> PrecoderSet<S> {
    pub fn num_beams(&self) -> usize {
        self.directions.len()
    }

    pub fn dim(&self) -> usize {
        self.directions.first().map_or(0, Vec::len)
    }

    pub fn directions(&self) -> &[Vec<Complex<S>>] {
        &self.directions
    }

    pub fn powers(&self) -> &[S] {
        &self.powers
    }

    /// Full precoder `w_m = sqrt(P_m) * direction_m`.
    pub fn beam(&self, m: usize) -> Vec<Complex<S>> {
        let scale = self.powers[m].sqrt();
        self.directions[m].iter().map(|c| c * scale).collect()
    }
}

/// Strategy slot for precoder construction; alternative designs (e.g. solver
/// based max-min beamforming) can plug in behind the same signature.
pub trait PrecoderStrategy<S: Scalar> {
    fn design(&self, channels: &[ChannelVector<S>], powers: &[S]) -> Result<PrecoderSet<S>>;
}

/// Maximum ratio transmission: each beam points along its target channel.
#[derive(Debug, Clone, Copy, Default)]
pub struct MrtStrategy;

impl<S: Scalar> PrecoderStrategy<S> for MrtStrategy {
    fn design(&self, channels: &[ChannelVector<S>], powers: &[S]) -> Result<PrecoderSet<S>> {
        mrt_precoders(channels, powers)
    }
}

/// Build MRT precoders `w_m = sqrt(P_m) * gamma_m / |gamma_m|`.
pub fn mrt_precoders<S: Scalar>(
    channels: &[ChannelVector<S>],
    powers: &[S],
) -> Result<PrecoderSet<S>> {
    if channels.len() != powers.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} channels vs {} powers",
            channels.len(),
            powers.len()
        )));
    }
    if channels.is_empty() {
        return Err(Error::DimensionMismatch("no channels given".into()));
    }
    let dim = channels[0].len();
    let mut directions = Vec::with_capacity(channels.len());
    for (m, ch) in channels.iter().enumerate() {
        if ch.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "channel {m} has length {} but channel 0 has {dim}",
                ch.len()
            )));
        }
        let norm = ch.norm();
        if !(norm > S::zero()) {
            return Err(Error::DegenerateChannel(format!(
                "channel {m} has zero norm"
            )));
        }
        directions.push(ch.coefficients().iter().map(|c| c / norm).collect());
    }
    for (m, p) in powers.iter().enumerate() {
        if *p < S::zero() {
            return Err(Error::Domain(format!("power {m} is negative")));
        }
    }
    Ok(PrecoderSet {
        directions,
        powers: powers.to_vec(),
    })
}

/// Exact received power `sum_m P_m |gamma^H dir_m|^2`, cross terms included.
pub fn received_power<S: Scalar>(gamma: &ChannelVector<S>, set: &PrecoderSet<S>) -> Result<S> {
    if gamma.len() != set.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel length {} vs precoder dimension {}",
            gamma.len(),
            set.dim()
        )));
    }
    let mut total = S::zero();
    for (dir, p) in set.directions.iter().zip(&set.powers) {
        let ip = gamma.inner(dir);
        total += *p * ip.norm_sqr();
    }
    Ok(total)
}

/// Dedicated-beam lower bound `P_i |gamma_i|^2`.
pub fn dedicated_bound<S: Scalar>(gamma: &ChannelVector<S>, power: S) -> S {
    power * gamma.norm_sq()
}

/// Result of the closed-form max-min allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation<S> {
    /// Per-target power, watts. Sums to the budget.
    pub powers: Vec<S>,
    /// Common weighted power level `P_i * gain_i / k_i`.
    pub t: S,
}

/// Max-min optimal power split for fixed gains: equalizes every weighted
/// power `P_i * gain_i / k_i` while exhausting the budget.
pub fn maxmin_power_allocation<S: Scalar>(
    gains: &[S],
    densities: &[S],
    budget: S,
) -> Result<Allocation<S>> {
    if gains.len() != densities.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} gains vs {} densities",
            gains.len(),
            densities.len()
        )));
    }
    if gains.is_empty() {
        return Err(Error::DimensionMismatch("no targets to allocate to".into()));
    }
    if budget <= S::zero() {
        return Err(Error::Domain(
            "power budget must be strictly positive".into(),
        ));
    }
    let mut denom = S::zero();
    for (i, (&g, &k)) in gains.iter().zip(densities).enumerate() {
        if !(g > S::zero()) {
            return Err(Error::DegenerateChannel(format!(
                "gain {i} is not strictly positive"
            )));
        }
        if !(k > S::zero()) {
            return Err(Error::Domain(format!("density {i} must be positive")));
        }
        denom += k / g;
    }
    let t = budget / denom;
    let powers = gains
        .iter()
        .zip(densities)
        .map(|(&g, &k)| t * k / g)
        .collect();
    Ok(Allocation { powers, t })
}
