//! Coverage probability under Rayleigh fading.
//!
//! Conditioning on the nearest UAV at ground distance `r` (3D distance
//! `d = √(r² + z²)`), exponential fading turns the coverage event into the
//! product of a noise term and the Laplace transform of the interference,
//! `exp(−λπ d² ρ(θ, n))`. Integrating over `v = r²` gives
//!
//! ```text
//! P(θ, z) = λπ e^{−λπρz²} ∫₀^∞ exp(−λπ(1+ρ)v − θβ₀((v+z²)/d0²)^{n/2}) dv
//! ```
//!
//! which [`coverage_rayleigh`] evaluates by quadrature. The remaining
//! functions are its special cases: no noise, no interference, and `n = 4`,
//! where the integral is Gaussian.

mod special;

pub use special::{erfcx, q_approx, q_function, q_scaled};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::channel::{DeploymentParams, EnvironmentParams, FadingModel, RadioParams};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::{Error, Result};

/// How a coverage value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ExactQuadrature,
    ClosedN4,
    NoNoise,
    NoiseLimited,
    DensityApprox,
    MonteCarlo,
    NakagamiSemianalytic,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::ExactQuadrature,
        Method::ClosedN4,
        Method::NoNoise,
        Method::NoiseLimited,
        Method::DensityApprox,
        Method::MonteCarlo,
        Method::NakagamiSemianalytic,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::ExactQuadrature => "exact-quadrature",
            Method::ClosedN4 => "closed-n4",
            Method::NoNoise => "no-noise",
            Method::NoiseLimited => "noise-limited",
            Method::DensityApprox => "density-approx",
            Method::MonteCarlo => "monte-carlo",
            Method::NakagamiSemianalytic => "nakagami-semianalytic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::domain(format!("unknown method '{s}'")))
    }
}

/// A coverage probability with the method that produced it and an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageEstimate {
    pub value: f64,
    pub method: Method,
    /// Quadrature error plus truncation bound, or the half-width of a confidence interval.
    pub error_bound: f64,
}

impl CoverageEstimate {
    pub(crate) fn new(value: f64, method: Method, error_bound: f64) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            method,
            error_bound: error_bound.max(0.0),
        }
    }
}

fn check_interference_exponent(n: f64) -> Result<()> {
    if n > 2.0 {
        Ok(())
    } else {
        Err(Error::Divergent { exponent: n })
    }
}

/// `ρ` with the absolute quadrature error.
pub fn rho_with_error(theta: f64, n: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    if !(theta > 0.0) {
        return Err(Error::domain(format!("theta must be > 0, got {theta}")));
    }
    check_interference_exponent(n)?;
    // ∫_a^∞ dx/(1+x^p) with a = θ^{-2/n}, p = n/2. x = 1/t maps the tail onto (0, 1/a];
    // t = s^q with q = 1/(p−1) then removes the t^{p−2} endpoint singularity, leaving
    // ∫_0^{a^{1−p}} q/(1 + s^{qp}) ds with a smooth integrand.
    let p = 0.5 * n;
    let q = 1.0 / (p - 1.0);
    let qp = p * q;
    let upper = theta.powf((n - 2.0) / n);
    let scale = theta.powf(2.0 / n);
    let inner = QuadratureConfig {
        abs_tol: cfg.abs_tol / scale,
        ..*cfg
    };
    let r = integrate(|s| q / (1.0 + s.powf(qp)), 0.0, upper, &inner)?;
    Ok((scale * r.value, scale * r.abs_error))
}

/// Normalized interference integral `ρ(θ, n) = θ^{2/n} ∫_{θ^{−2/n}}^∞ dx / (1 + x^{n/2})`.
///
/// Diverges for `n ≤ 2`.
pub fn rho(theta: f64, n: f64, cfg: &QuadratureConfig) -> Result<f64> {
    rho_with_error(theta, n, cfg).map(|(v, _)| v)
}

/// `ρ` at `n = 4`: `√θ·(π/2 − arctan θ^{−1/2}) = √θ·arctan √θ`.
pub fn rho_closed_n4(theta: f64) -> f64 {
    let s = theta.sqrt();
    s * s.atan()
}

/// Laplace transform of the interference seen by a user served from ground
/// distance `r`, evaluated at `θ·(d/d0)^n`: `exp(−λπ d² ρ(θ, n))`.
pub fn laplace_interference(theta: f64, r: f64, z: f64, lambda: f64, n: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(lambda >= 0.0) || !(r >= 0.0) || !(z >= 0.0) {
        return Err(Error::domain("lambda, r and z must be non-negative"));
    }
    let rho = rho(theta, n, cfg)?;
    Ok((-lambda * PI * (r * r + z * z) * rho).exp())
}

struct CoverageIntegral {
    value: f64,
    error: f64,
}

// With u = λπ(1+ρ)v and g(u) = θβ₀((u/α + z²)/d0²)^{n/2}, coverage is
// (λπ/α)·exp(−λπρz² − g(0)) · ∫ exp(−u − (g(u) − g(0))) du. Factoring out exp(−g(0))
// keeps the integrand O(1) and lets the cutoff follow the steeper of the two decays.
#[allow(clippy::too_many_arguments)]
fn coverage_integral(
    lambda: f64,
    z: f64,
    theta: f64,
    beta0: f64,
    d0: f64,
    n: f64,
    rho: f64,
    cfg: &QuadratureConfig,
) -> Result<CoverageIntegral> {
    let lp = lambda * PI;
    let alpha = lp * (1.0 + rho);
    let z2 = z * z;
    let p = 0.5 * n;
    let tb = theta * beta0;
    let g0 = tb * (z2 / (d0 * d0)).powf(p);

    // growth of the noise exponent above its value at u = 0, written to avoid cancellation
    let excess = |u: f64| -> f64 {
        if tb == 0.0 {
            0.0
        } else if z2 > 0.0 {
            g0 * (p * (u / (alpha * z2)).ln_1p()).exp_m1()
        } else {
            tb * (u / (alpha * d0 * d0)).powf(p)
        }
    };
    let exponent = |u: f64| u + excess(u);
    // smallest u with exponent(u) >= level; exponent(u) >= u bounds it by level
    let solve = |level: f64| -> f64 {
        let (mut lo, mut hi) = (0.0, level);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if exponent(mid) >= level {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };

    // the integrand stays above 1/e on [0, u1]
    let u1 = solve(1.0);
    let j_lower = u1 / std::f64::consts::E;
    // exponent is convex with slope >= 1, so the tail beyond U is at most exp(−exponent(U))
    let level = (1.0 / cfg.abs_tol).ln().max((100.0 / (cfg.rel_tol * j_lower)).ln());
    let cutoff = solve(level);
    let tail = (-exponent(cutoff)).exp();

    let inner = QuadratureConfig {
        abs_tol: cfg.abs_tol.min(cfg.rel_tol * j_lower),
        ..*cfg
    };
    let f = |u: f64| (-exponent(u)).exp();
    let head = integrate(f, 0.0, u1.min(cutoff), &inner)?;
    let body = integrate(f, u1.min(cutoff), cutoff, &inner)?;
    let j = head.value + body.value;
    let j_err = head.abs_error + body.abs_error + tail;

    let ln_prefactor = (lp / alpha).ln() - lp * rho * z2 - g0;
    let prefactor = ln_prefactor.exp();
    Ok(CoverageIntegral {
        value: prefactor * j,
        error: prefactor * j_err,
    })
}

fn require_rayleigh(radio: &RadioParams) -> Result<()> {
    match radio.fading {
        FadingModel::Rayleigh => Ok(()),
        FadingModel::Nakagami { m: 1.0 } | FadingModel::Rician { k: 0.0 } => Ok(()),
        other => Err(Error::domain(format!(
            "closed-form coverage needs Rayleigh fading, got {other:?}; use the Monte Carlo estimators"
        ))),
    }
}

fn validate_all(dep: &DeploymentParams, radio: &RadioParams, env: &EnvironmentParams) -> Result<()> {
    if !(dep.lambda > 0.0) || !(dep.z >= 0.0) {
        return Err(Error::domain("density must be > 0 and altitude >= 0"));
    }
    radio.validate()?;
    env.validate()
}

/// Rayleigh coverage for a caller-supplied `ρ` and exponent `n`.
///
/// With `rho = 0` this is the interference-free coverage; validation hooks
/// use it to probe the quadrature path with a deliberately perturbed `ρ`.
pub fn coverage_rayleigh_given_rho(
    dep: &DeploymentParams,
    radio: &RadioParams,
    d0: f64,
    n: f64,
    rho: f64,
    cfg: &QuadratureConfig,
) -> Result<CoverageEstimate> {
    cfg.validate()?;
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::domain(format!("rho must be finite and >= 0, got {rho}")));
    }
    if !(n >= 2.0) {
        return Err(Error::domain(format!("path-loss exponent must be >= 2, got {n}")));
    }
    let out = coverage_integral(dep.lambda, dep.z, radio.theta, radio.beta0, d0, n, rho, cfg)?;
    let method = if rho == 0.0 {
        Method::NoiseLimited
    } else {
        Method::ExactQuadrature
    };
    Ok(CoverageEstimate::new(out.value, method, out.error))
}

/// Coverage under Rayleigh fading with noise and interference, by quadrature.
///
/// The exponent is `env.exponent_at(dep.z)`. Fails with [`Error::Divergent`]
/// when that exponent is 2, where the interference of an infinite network is unbounded.
pub fn coverage_rayleigh(
    dep: &DeploymentParams,
    radio: &RadioParams,
    env: &EnvironmentParams,
    cfg: &QuadratureConfig,
) -> Result<CoverageEstimate> {
    validate_all(dep, radio, env)?;
    require_rayleigh(radio)?;
    let n = env.exponent_at(dep.z)?;
    let (rho, rho_err) = rho_with_error(radio.theta, n, cfg)?;
    let mut est = coverage_rayleigh_given_rho(dep, radio, env.d0, n, rho, cfg)?;
    est.method = Method::ExactQuadrature;
    // first-order propagation of the ρ quadrature error
    let sensitivity = dep.lambda * PI * dep.z * dep.z + 1.0 / (1.0 + rho);
    est.error_bound += est.value * sensitivity * rho_err;
    Ok(est)
}

/// Closed form at `n = 4`:
/// `(λπ^{3/2} d0² / √(θβ₀)) · exp(κ²/2 + λπz²) · Q(κ + (z²/d0²)√(2θβ₀))`
/// with `κ = λπ(1+ρ)d0² / √(2θβ₀)`.
///
/// `exp(κ²/2)·Q(·)` is evaluated through the scaled Q-function, so the result
/// stays finite however large `κ` gets. The exponent is fixed at 4 whatever `env` says.
pub fn coverage_rayleigh_n4_closed(
    dep: &DeploymentParams,
    radio: &RadioParams,
    env: &EnvironmentParams,
) -> Result<CoverageEstimate> {
    validate_all(dep, radio, env)?;
    require_rayleigh(radio)?;
    if radio.beta0 <= 0.0 {
        return Err(Error::domain("closed n=4 form needs beta0 > 0; use coverage_no_noise"));
    }
    let lp = dep.lambda * PI;
    let d02 = env.d0 * env.d0;
    let z2 = dep.z * dep.z;
    let tb = radio.theta * radio.beta0;
    let rho = rho_closed_n4(radio.theta);
    let kappa = lp * (1.0 + rho) * d02 / (2.0 * tb).sqrt();
    let shift = z2 / d02 * (2.0 * tb).sqrt();
    let x = kappa + shift;
    // κ²/2 + λπz² − x²/2 expanded: the κ² terms cancel exactly
    let exponent = -lp * rho * z2 - tb * z2 * z2 / (d02 * d02);
    let prefactor = lp * PI.sqrt() * d02 / tb.sqrt();
    let value = prefactor * exponent.exp() * q_scaled(x);
    Ok(CoverageEstimate::new(
        value,
        Method::ClosedN4,
        64.0 * f64::EPSILON * value,
    ))
}

/// Interference-limited coverage `exp(−λπρz²)/(1 + ρ)`; `radio.beta0` is ignored.
pub fn coverage_no_noise(
    dep: &DeploymentParams,
    radio: &RadioParams,
    env: &EnvironmentParams,
    cfg: &QuadratureConfig,
) -> Result<CoverageEstimate> {
    validate_all(dep, radio, env)?;
    require_rayleigh(radio)?;
    let n = env.exponent_at(dep.z)?;
    let (rho, rho_err) = rho_with_error(radio.theta, n, cfg)?;
    let lpz2 = dep.lambda * PI * dep.z * dep.z;
    let value = (-lpz2 * rho).exp() / (1.0 + rho);
    let error = value * (lpz2 + 1.0 / (1.0 + rho)) * rho_err;
    Ok(CoverageEstimate::new(value, Method::NoNoise, error))
}

/// Noise-limited coverage: interference dropped (`ρ = 0`), valid for every `n ≥ 2`.
pub fn coverage_noise_limited(
    dep: &DeploymentParams,
    radio: &RadioParams,
    env: &EnvironmentParams,
    cfg: &QuadratureConfig,
) -> Result<CoverageEstimate> {
    validate_all(dep, radio, env)?;
    require_rayleigh(radio)?;
    let n = env.exponent_at(dep.z)?;
    coverage_rayleigh_given_rho(dep, radio, env.d0, n, 0.0, cfg)
}
