//! Near-field line-of-sight channel model.
//!
//! Complex channel coefficients between ceiling-mounted elements and receive
//! points, the cosine radiation profile, the closed-form channel gain and the
//! Fresnel/Fraunhofer boundary distances.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar, SPEED_OF_LIGHT};
use crate::scene::Deployment;

/// Per-element complex channel coefficients toward one receive point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector<S>(pub Vec<Complex<S>>);

impl<S: Scalar> ChannelVector<S> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coefficients(&self) -> &[Complex<S>] {
        &self.0
    }

    /// Squared Euclidean norm, i.e. the aggregate channel gain.
    pub fn norm_sq(&self) -> S {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> S {
        self.norm_sq().sqrt()
    }

    /// Hermitian inner product `self^H other`.
    pub fn inner(&self, other: &[Complex<S>]) -> Complex<S> {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::new(S::zero(), S::zero()), |acc, v| acc + v)
    }
}

/// Radiative near-field boundary distances for one aperture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearFieldBounds<S> {
    /// Fresnel (inner) distance, meters.
    pub fresnel: S,
    /// Fraunhofer (outer) distance, meters.
    pub fraunhofer: S,
}

/// Wavelength `C / f` using the exact speed of light.
pub fn wavelength<S: Scalar>(frequency: S) -> Result<S> {
    if frequency <= S::zero() {
        return Err(Error::Domain("frequency must be strictly positive".into()));
    }
    Ok(lit::<S>(SPEED_OF_LIGHT) / frequency)
}

/// Fresnel and Fraunhofer distances for aperture diameter `d`.
pub fn near_field_bounds<S: Scalar>(d: S, lambda: S) -> Result<NearFieldBounds<S>> {
    if d <= S::zero() || lambda <= S::zero() {
        return Err(Error::Domain(
            "aperture diameter and wavelength must be strictly positive".into(),
        ));
    }
    let fresnel = (d.powi(4) / (lit::<S>(8.0) * lambda)).cbrt();
    let fraunhofer = lit::<S>(2.0) * d * d / lambda;
    Ok(NearFieldBounds {
        fresnel,
        fraunhofer,
    })
}

/// Element radiation profile `2(b+1) cos^b(theta)` on the lower hemisphere.
pub fn radiation_gain<S: Scalar>(theta: S, b: S) -> S {
    if theta >= S::zero() && theta <= S::FRAC_PI_2() {
        lit::<S>(2.0) * (b + S::one()) * theta.cos().powf(b)
    } else {
        S::zero()
    }
}

/// Complex channel coefficient between one ceiling element and a receive point.
pub fn channel_coefficient<S: Scalar>(
    element: &[S; 3],
    point: &[S; 3],
    lambda: S,
    b: S,
) -> Result<Complex<S>> {
    if lambda <= S::zero() {
        return Err(Error::Domain("wavelength must be strictly positive".into()));
    }
    let dx = element[0] - point[0];
    let dy = element[1] - point[1];
    let dz = element[2] - point[2];
    let dist = (dx * dx + dy * dy + dz * dz).sqrt();
    if dist <= S::zero() {
        return Err(Error::Singularity);
    }
    let cos_theta = dz / dist;
    // Below-horizon points see a true zero, not an error.
    let profile = if cos_theta >= S::zero() {
        lit::<S>(2.0) * (b + S::one()) * cos_theta.powf(b)
    } else {
        S::zero()
    };
    let four_pi = lit::<S>(4.0) * S::PI();
    let amplitude = profile.sqrt() * lambda / (four_pi * dist);
    let phase = -(lit::<S>(2.0) * S::PI() / lambda) * dist;
    Ok(Complex::from_polar(amplitude, phase))
}

/// Channel coefficients from every element of `deployment` to `point`.
pub fn channel_vector<S: Scalar>(
    deployment: &Deployment<S>,
    point: &[S; 3],
    lambda: S,
    b: S,
) -> Result<ChannelVector<S>> {
    let coeffs = deployment
        .elements
        .iter()
        .map(|g| channel_coefficient(g, point, lambda, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelVector(coeffs))
}

/// Closed-form aggregate channel gain
/// `2(b+1) (h_c - q_3)^b (lambda/4pi)^2 sum_j |g_j - q|^-(b+2)`.
pub fn channel_gain<S: Scalar>(
    deployment: &Deployment<S>,
    point: &[S; 3],
    b: S,
    lambda: S,
    h_c: S,
) -> Result<S> {
    if lambda <= S::zero() {
        return Err(Error::Domain("wavelength must be strictly positive".into()));
    }
    let gap = h_c - point[2];
    if gap < S::zero() {
        return Err(Error::Domain(
            "receive point must not lie above the element plane".into(),
        ));
    }
    let mut sum = S::zero();
    for g in &deployment.elements {
        let dx = g[0] - point[0];
        let dy = g[1] - point[1];
        let dz = g[2] - point[2];
        let dist = (dx * dx + dy * dy + dz * dz).sqrt();
        if dist <= S::zero() {
            return Err(Error::Singularity);
        }
        sum += dist.powf(-(b + lit::<S>(2.0)));
    }
    let four_pi = lit::<S>(4.0) * S::PI();
    let scale = lambda / four_pi;
    Ok(lit::<S>(2.0) * (b + S::one()) * gap.powf(b) * scale * scale * sum)
}

/// Largest pairwise distance between elements (the aperture diameter).
pub fn aperture_diameter<S: Scalar>(deployment: &Deployment<S>) -> Result<S> {
    let n = deployment.len();
    if n < 2 {
        return Err(Error::Domain(
            "aperture diameter needs at least 2 elements".into(),
        ));
    }
    let mut best = S::zero();
    for j in 0..n {
        for k in (j + 1)..n {
            let a = &deployment.elements[j];
            let b = &deployment.elements[k];
            let dx = a[0] - b[0];
            let dy = a[1] - b[1];
            let dz = a[2] - b[2];
            let d = (dx * dx + dy * dy + dz * dz).sqrt();
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}
