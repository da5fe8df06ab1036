//! Monte Carlo ground truth.
//!
//! Each trial realizes the UAV process on a disk around the user, serves the
//! user from the nearest UAV and compares the SINR with the threshold. Points
//! are generated in order of increasing distance (cumulative unit-rate
//! exponential areas), so a trial with a larger window extends, rather than
//! replaces, the realization of a smaller one.
//!
//! Trial `i` draws from ChaCha8 stream `i` keyed by the seed, and partial sums
//! are reduced over fixed-size chunks in index order: results do not depend on
//! the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use statrs::function::erf::erf_inv;
use statrs::function::gamma::gamma_ur;
use std::f64::consts::PI;

use crate::analytic::{CoverageEstimate, Method};
use crate::channel::{DeploymentParams, EnvironmentParams, FadingSampler, RadioParams};
use crate::{Error, Result};

const CHUNK: u64 = 1024;

/// Simulation window around the user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionRadius {
    /// `max(10/√(λπ), 20·z, 10·d0)`, see [`auto_region_radius`].
    Auto,
    /// Fixed radius in meters.
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub region_radius: RegionRadius,
    pub confidence_level: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 0x00C0_FFEE,
            region_radius: RegionRadius::Auto,
            confidence_level: 0.95,
        }
    }
}

impl McConfig {
    pub fn with_trials(self, trials: u64) -> Self {
        Self { trials, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_radius(self, region_radius: RegionRadius) -> Self {
        Self { region_radius, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::domain("trials must be >= 1"));
        }
        if let RegionRadius::Explicit(r) = self.region_radius {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::domain(format!("region radius must be > 0, got {r}")));
            }
        }
        if !(self.confidence_level > 0.0 && self.confidence_level < 1.0) {
            return Err(Error::domain("confidence level must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Window radius for a deployment, in meters.
    pub fn radius_for(&self, lambda: f64, z: f64, d0: f64) -> f64 {
        match self.region_radius {
            RegionRadius::Auto => auto_region_radius(lambda, z, d0),
            RegionRadius::Explicit(r) => r,
        }
    }

    fn z_score(&self) -> f64 {
        std::f64::consts::SQRT_2 * erf_inv(self.confidence_level)
    }
}

/// `max(10/√(λπ), 20·z, 10·d0)`: about 100 expected UAVs, and far enough that
/// the height has flattened out of the interferer distances.
pub fn auto_region_radius(lambda: f64, z: f64, d0: f64) -> f64 {
    (10.0 / (lambda * PI).sqrt()).max(20.0 * z).max(10.0 * d0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub estimate: f64,
    pub ci_half_width: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials_used: u64,
    /// Meters.
    pub region_radius: f64,
    /// Sample variance of the per-trial statistic (indicator or conditional probability).
    pub per_trial_variance: f64,
}

impl McResult {
    pub fn to_estimate(&self, method: Method) -> CoverageEstimate {
        CoverageEstimate::new(self.estimate, method, self.ci_half_width)
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Wilson score interval for `successes` out of `trials`, as
/// `(estimate, half_width, low, high)`; the estimate is the raw fraction.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64, f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (p, half, low, high)
}

/// Point of the ground-plane projection of the UAV process, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundPoint {
    pub x: f64,
    pub y: f64,
}

impl GroundPoint {
    pub fn distance(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Poisson point process of density `lambda` on the disk of `radius` around the
/// origin, sorted by distance from the origin.
pub fn generate_ppp<R: Rng + ?Sized>(lambda: f64, radius: f64, rng: &mut R) -> Result<Vec<GroundPoint>> {
    if !(lambda > 0.0) || !(radius > 0.0) {
        return Err(Error::domain("density and radius must be > 0"));
    }
    let lp = lambda * PI;
    let mut area = 0.0;
    let mut points = Vec::new();
    loop {
        let e: f64 = Exp1.sample(rng);
        area += e;
        let r = (area / lp).sqrt();
        if r > radius {
            break;
        }
        let phi = 2.0 * PI * rng.random::<f64>();
        points.push(GroundPoint {
            x: r * phi.cos(),
            y: r * phi.sin(),
        });
    }
    Ok(points)
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One trial's serving link and aggregate interference.
#[derive(Debug, Clone, Copy)]
struct Link {
    /// `(d/d0)^n` of the serving UAV.
    inv_gain: f64,
    /// Fading of the serving link.
    h: f64,
    /// Normalized interference.
    interference: f64,
}

struct Scenario {
    lp: f64,
    radius: f64,
    z2: f64,
    d02: f64,
    half_n: f64,
    beta0: f64,
    fading: FadingSampler,
}

impl Scenario {
    fn new(dep: &DeploymentParams, radio: &RadioParams, env: &EnvironmentParams, mc: &McConfig) -> Result<(Self, f64)> {
        if !(dep.lambda > 0.0) || !(dep.z >= 0.0) {
            return Err(Error::domain("density must be > 0 and altitude >= 0"));
        }
        radio.validate()?;
        env.validate()?;
        mc.validate()?;
        let n = env.exponent_at(dep.z)?;
        if n <= 2.0 && radio.beta0 == 0.0 {
            return Err(Error::Divergent { exponent: n });
        }
        let radius = mc.radius_for(dep.lambda, dep.z, env.d0);
        Ok((
            Self {
                lp: dep.lambda * PI,
                radius,
                z2: dep.z * dep.z,
                d02: env.d0 * env.d0,
                half_n: 0.5 * n,
                beta0: radio.beta0,
                fading: radio.fading.sampler()?,
            },
            n,
        ))
    }

    /// Draws one realization; `None` when the window is empty.
    fn trial(&self, rng: &mut ChaCha8Rng) -> Option<Link> {
        let mut area = 0.0;
        let mut serving: Option<(f64, f64)> = None;
        let mut interference = 0.0;
        let r2_max = self.radius * self.radius;
        loop {
            let e: f64 = Exp1.sample(rng);
            area += e;
            let r2 = area / self.lp;
            if r2 > r2_max {
                break;
            }
            let h = self.fading.sample(rng);
            let inv_gain = ((r2 + self.z2) / self.d02).powf(self.half_n);
            match serving {
                None => serving = Some((inv_gain, h)),
                Some(_) => interference += h / inv_gain,
            }
        }
        serving.map(|(inv_gain, h)| Link {
            inv_gain,
            h,
            interference,
        })
    }
}

fn chunks(trials: u64) -> impl ParallelIterator<Item = (u64, u64)> {
    let n_chunks = trials.div_ceil(CHUNK);
    (0..n_chunks)
        .into_par_iter()
        .map(move |c| (c * CHUNK, ((c + 1) * CHUNK).min(trials)))
}

/// Empirical coverage at each threshold in `thetas`; `radio.theta` is ignored.
///
/// All thresholds share the same realizations.
pub fn simulate_coverage_curve(
    dep: &DeploymentParams,
    radio: &RadioParams,
    env: &EnvironmentParams,
    thetas: &[f64],
    mc: &McConfig,
) -> Result<Vec<McResult>> {
    for &t in thetas {
        radio.with_theta(t).validate()?;
    }
    let (sc, _) = Scenario::new(dep, &radio.with_theta(thetas.first().copied().unwrap_or(1.0)), env, mc)?;
    let per_chunk: Vec<Vec<u64>> = chunks(mc.trials)
        .map(|(start, end)| {
            let mut counts = vec![0u64; thetas.len()];
            for trial in start..end {
                let mut rng = trial_rng(mc.seed, trial);
                // empty window: outage at every threshold
                let Some(link) = sc.trial(&mut rng) else { continue };
                let sinr = link.h / link.inv_gain / (sc.beta0 + link.interference);
                for (c, &t) in counts.iter_mut().zip(thetas) {
                    if sinr > t {
                        *c += 1;
                    }
                }
            }
            counts
        })
        .collect();

    let z = mc.z_score();
    let n = mc.trials as f64;
    Ok((0..thetas.len())
        .map(|k| {
            let hits: u64 = per_chunk.iter().map(|c| c[k]).sum();
            let (p, half, lo, hi) = wilson_interval(hits, mc.trials, z);
            McResult {
                estimate: p,
                ci_half_width: half,
                ci_low: lo,
                ci_high: hi,
                trials_used: mc.trials,
                region_radius: sc.radius,
                per_trial_variance: if mc.trials > 1 {
                    p * (1.0 - p) * n / (n - 1.0)
                } else {
                    0.0
                },
            }
        })
        .collect())
}

/// Empirical coverage at `radio.theta` with a Wilson score interval.
pub fn simulate_coverage(
    dep: &DeploymentParams,
    radio: &RadioParams,
    env: &EnvironmentParams,
    mc: &McConfig,
) -> Result<McResult> {
    let mut v = simulate_coverage_curve(dep, radio, env, &[radio.theta], mc)?;
    Ok(v.remove(0))
}

/// Semi-analytic Nakagami-m estimator at each threshold in `thetas`.
///
/// Only the process and the interferer fading are sampled; the serving link's
/// Gamma fading is integrated exactly, so each trial contributes the
/// conditional coverage `Γ(m, mμ)/Γ(m)` with `μ = θ(β₀ + I)(d/d0)^n`.
/// Rayleigh and Rician models use their equivalent `m` (1 and the moment match).
pub fn coverage_nakagami_semianalytic_curve(
    dep: &DeploymentParams,
    radio: &RadioParams,
    env: &EnvironmentParams,
    thetas: &[f64],
    mc: &McConfig,
) -> Result<Vec<McResult>> {
    for &t in thetas {
        radio.with_theta(t).validate()?;
    }
    let m = radio.fading.nakagami_m()?;
    let (sc, _) = Scenario::new(dep, &radio.with_theta(thetas.first().copied().unwrap_or(1.0)), env, mc)?;
    let conditional = |x: f64| -> f64 {
        if m == 1.0 {
            (-x).exp()
        } else {
            gamma_ur(m, m * x)
        }
    };
    let per_chunk: Vec<Vec<(f64, f64)>> = chunks(mc.trials)
        .map(|(start, end)| {
            let mut acc = vec![(0.0, 0.0); thetas.len()];
            for trial in start..end {
                let mut rng = trial_rng(mc.seed, trial);
                let Some(link) = sc.trial(&mut rng) else { continue };
                let base = (sc.beta0 + link.interference) * link.inv_gain;
                for (a, &t) in acc.iter_mut().zip(thetas) {
                    let p = conditional(t * base);
                    a.0 += p;
                    a.1 += p * p;
                }
            }
            acc
        })
        .collect();

    let z = mc.z_score();
    let n = mc.trials as f64;
    Ok((0..thetas.len())
        .map(|k| {
            let (sum, sum_sq) = per_chunk.iter().fold((0.0, 0.0), |(s, q), c| (s + c[k].0, q + c[k].1));
            let mean = sum / n;
            let var = if mc.trials > 1 {
                ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            let half = z * (var / n).sqrt();
            McResult {
                estimate: mean,
                ci_half_width: half,
                ci_low: (mean - half).max(0.0),
                ci_high: (mean + half).min(1.0),
                trials_used: mc.trials,
                region_radius: sc.radius,
                per_trial_variance: var,
            }
        })
        .collect())
}

/// Semi-analytic Nakagami-m coverage at `radio.theta`.
pub fn coverage_nakagami_semianalytic(
    dep: &DeploymentParams,
    radio: &RadioParams,
    env: &EnvironmentParams,
    mc: &McConfig,
) -> Result<McResult> {
    let mut v = coverage_nakagami_semianalytic_curve(dep, radio, env, &[radio.theta], mc)?;
    Ok(v.remove(0))
}
