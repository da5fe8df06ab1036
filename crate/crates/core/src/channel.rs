//! Air-to-ground channel primitives.
//!
//! The received power from an aerial base station at 3D distance `d` is
//! `h · (d/d0)^(-n)`, with the transmit power and the reference gain folded
//! into the noise ratio β₀ carried by [`RadioParams`]. The exponent `n` depends
//! on the UAV altitude through the SUI terrain model, see [`ple`].

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use std::f64::consts::PI;

use crate::{Error, Result};

/// Terrain constants of the SUI model, the reference distance, and an optional
/// fixed path-loss exponent that replaces the height-dependent one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentParams {
    pub terrain_a: f64,
    /// Per meter.
    pub terrain_b: f64,
    /// Meters.
    pub terrain_c: f64,
    /// Reference distance in meters.
    pub d0: f64,
    /// When set, every altitude uses this exponent instead of [`ple`].
    pub ple_override: Option<f64>,
}

impl EnvironmentParams {
    /// Urban SUI terrain: a = 4.6, b = 0.0075 m⁻¹, c = 12.6 m, with d0 = 100 m.
    pub fn sui_urban() -> Self {
        Self {
            terrain_a: 4.6,
            terrain_b: 0.0075,
            terrain_c: 12.6,
            d0: 100.0,
            ple_override: None,
        }
    }

    /// Same terrain, but the exponent is pinned to `n` at every altitude.
    pub fn with_fixed_ple(self, n: f64) -> Self {
        Self {
            ple_override: Some(n),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.terrain_a > 0.0) {
            return Err(Error::domain(format!("terrain_a must be > 0, got {}", self.terrain_a)));
        }
        if !(self.terrain_b >= 0.0) || !(self.terrain_c >= 0.0) {
            return Err(Error::domain("terrain_b and terrain_c must be >= 0"));
        }
        if !(self.d0 > 0.0) || !self.d0.is_finite() {
            return Err(Error::domain(format!("d0 must be > 0, got {}", self.d0)));
        }
        if let Some(n) = self.ple_override {
            if !(n >= 2.0) || !n.is_finite() {
                return Err(Error::domain(format!("fixed path-loss exponent must be >= 2, got {n}")));
            }
        }
        Ok(())
    }

    /// The exponent in force at altitude `z`: the override if present, otherwise [`ple`].
    pub fn exponent_at(&self, z: f64) -> Result<f64> {
        match self.ple_override {
            Some(n) => Ok(n),
            None => ple(z, self),
        }
    }
}

impl Default for EnvironmentParams {
    fn default() -> Self {
        Self::sui_urban()
    }
}

/// UAV density and altitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeploymentParams {
    /// UAVs per square meter.
    pub lambda: f64,
    /// Common altitude in meters.
    pub z: f64,
    pub l_min: f64,
    pub l_max: f64,
}

impl DeploymentParams {
    /// Deployment at altitude `z` with the bounds collapsed onto it.
    pub fn at(lambda: f64, z: f64) -> Self {
        Self {
            lambda,
            z,
            l_min: z,
            l_max: z,
        }
    }

    pub fn with_height(self, z: f64) -> Self {
        Self { z, ..self }
    }

    pub fn with_density(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::domain(format!("density must be > 0, got {}", self.lambda)));
        }
        if !(self.l_min > 0.0) {
            return Err(Error::domain(format!("l_min must be > 0, got {}", self.l_min)));
        }
        if !(self.l_min <= self.z && self.z <= self.l_max) {
            return Err(Error::domain(format!(
                "altitude {} outside [{}, {}]",
                self.z, self.l_min, self.l_max
            )));
        }
        Ok(())
    }
}

/// Small-scale power fading, always normalized to unit mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingModel {
    Rayleigh,
    /// Gamma-distributed power with shape `m`.
    Nakagami {
        m: f64,
    },
    /// Linear K-factor; sampled through its Nakagami-m equivalent.
    Rician {
        k: f64,
    },
}

impl FadingModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FadingModel::Rayleigh => Ok(()),
            FadingModel::Nakagami { m } if m >= 0.5 && m.is_finite() => Ok(()),
            FadingModel::Nakagami { m } => Err(Error::domain(format!("Nakagami m must be >= 0.5, got {m}"))),
            FadingModel::Rician { k } => rician_k_to_m(k).map(|_| ()),
        }
    }

    /// Equivalent Nakagami shape parameter: 1 for Rayleigh, the moment-matched
    /// value for Rician.
    pub fn nakagami_m(&self) -> Result<f64> {
        match *self {
            FadingModel::Rayleigh => Ok(1.0),
            FadingModel::Nakagami { m } => Ok(m),
            FadingModel::Rician { k } => rician_k_to_m(k),
        }
    }

    pub fn sampler(&self) -> Result<FadingSampler> {
        self.validate()?;
        let m = self.nakagami_m()?;
        if m == 1.0 {
            return Ok(FadingSampler::Exponential);
        }
        let gamma = Gamma::new(m, 1.0 / m).map_err(|e| Error::domain(format!("fading: {e}")))?;
        Ok(FadingSampler::Gamma(gamma))
    }
}

/// Prepared sampler for a [`FadingModel`]; build once, draw many times.
#[derive(Debug, Clone, Copy)]
pub enum FadingSampler {
    Exponential,
    Gamma(Gamma<f64>),
}

impl Distribution<f64> for FadingSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FadingSampler::Exponential => Exp1.sample(rng),
            FadingSampler::Gamma(g) => g.sample(rng),
        }
    }
}

/// Single power-gain draw from `model`.
pub fn sample_fading<R: Rng + ?Sized>(model: FadingModel, rng: &mut R) -> Result<f64> {
    Ok(model.sampler()?.sample(rng))
}

/// SINR threshold, noise ratio and fading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    /// Linear SINR threshold θ.
    pub theta: f64,
    /// Noise power over the received power at the reference distance, β₀ = N / (P_t K₀).
    pub beta0: f64,
    pub fading: FadingModel,
}

impl RadioParams {
    pub fn rayleigh(theta: f64, beta0: f64) -> Self {
        Self {
            theta,
            beta0,
            fading: FadingModel::Rayleigh,
        }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0) || !self.theta.is_finite() {
            return Err(Error::domain(format!("theta must be > 0, got {}", self.theta)));
        }
        if !(self.beta0 >= 0.0) || !self.beta0.is_finite() {
            return Err(Error::domain(format!("beta0 must be >= 0, got {}", self.beta0)));
        }
        self.fading.validate()
    }
}

/// Height-dependent path-loss exponent `max(a − b·z + c/z, 2)` of the SUI model.
pub fn ple(z: f64, env: &EnvironmentParams) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain(format!("altitude must be > 0, got {z}")));
    }
    let n = env.terrain_a - env.terrain_b * z + env.terrain_c / z;
    Ok(n.max(2.0))
}

/// Deterministic path gain `(d/d0)^(−n)`; fading and K₀ excluded.
pub fn path_gain(d: f64, env: &EnvironmentParams, n: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::domain(format!("distance must be > 0, got {d}")));
    }
    Ok((d / env.d0).powf(-n))
}

/// Nakagami shape matching the first two moments of a Rician channel with linear K-factor `k`.
pub fn rician_k_to_m(k: f64) -> Result<f64> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::domain(format!("Rician K-factor must be >= 0, got {k}")));
    }
    Ok((k * k + 2.0 * k + 1.0) / (2.0 * k + 1.0))
}

/// Density of the ground distance to the nearest point of a PPP with density `lambda`.
pub fn nearest_distance_pdf(r: f64, lambda: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    2.0 * lambda * PI * r * (-lambda * PI * r * r).exp()
}

/// CDF matching [`nearest_distance_pdf`].
pub fn nearest_distance_cdf(r: f64, lambda: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    -(-lambda * PI * r * r).exp_m1()
}
