//! Deployment design: the UAV density and the altitude that maximize coverage.
//!
//! Density is solved two ways at `n = 4`. The approximate route replaces the
//! Q-function by its large-argument expansion, which gives
//! `P ≈ πA·λ·e^{−Cλ}/√(1 + Bλ²)` with a unique stationary point at the positive
//! root of `BCλ³ + Cλ − 1`. The numeric route maximizes the exact closed form
//! directly.
//!
//! Altitude couples the exponent to the height through the SUI model; the
//! clamp at `n = 2` puts a kink in the coverage curve, so the search scans a
//! grid first and only then refines.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::analytic::{
    coverage_noise_limited, coverage_rayleigh, coverage_rayleigh_n4_closed, CoverageEstimate, Method,
};
use crate::channel::{DeploymentParams, EnvironmentParams, RadioParams};
use crate::montecarlo::{simulate_coverage, McConfig};
use crate::quadrature::QuadratureConfig;
use crate::{Error, Result};

/// Coefficients of the approximate density curve `π·A·λ·e^{−Cλ}/√(1 + Bλ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityCoeffs {
    /// Square meters (per unit density).
    pub coef_a: f64,
    /// Square meters squared.
    pub coef_b: f64,
    /// Square meters.
    pub coef_c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptMethod {
    CubicClosed,
    GoldenSection,
    Grid,
}

impl OptMethod {
    pub fn tag(self) -> &'static str {
        match self {
            OptMethod::CubicClosed => "cubic-closed",
            OptMethod::GoldenSection => "golden-section",
            OptMethod::Grid => "grid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    /// Altitude in meters or density in UAVs per square meter.
    pub argument: f64,
    pub value: f64,
    pub method: OptMethod,
    /// Set when the search had to leave its primary strategy (non-unimodal
    /// density curve, or Monte Carlo used for divergent altitude points).
    pub fallback: bool,
}

/// `A = d0²/√(2θβ₀)·exp(−θβ₀z⁴/d0⁴)`, `B = π²(1+ρ)²d0⁴/(2θβ₀)`, `C = πρz²`.
pub fn density_coeffs(z: f64, theta: f64, beta0: f64, d0: f64, rho: f64) -> Result<DensityCoeffs> {
    let tb = theta * beta0;
    if !(tb > 0.0) || !tb.is_finite() {
        return Err(Error::domain("the density approximation needs theta*beta0 > 0"));
    }
    if !(d0 > 0.0) || !(rho >= 0.0) || !(z >= 0.0) {
        return Err(Error::domain("d0 must be > 0, rho and z >= 0"));
    }
    let d02 = d0 * d0;
    let z4 = z.powi(4);
    Ok(DensityCoeffs {
        coef_a: d02 / (2.0 * tb).sqrt() * (-tb * z4 / (d02 * d02)).exp(),
        coef_b: PI * PI * (1.0 + rho).powi(2) * d02 * d02 / (2.0 * tb),
        coef_c: PI * rho * z * z,
    })
}

/// Value of the approximate density curve; may exceed 1 outside its validity regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityApprox {
    pub value: f64,
    /// `value` is a probability (within `[0, 1]`).
    pub valid: bool,
}

/// `π·A·λ·e^{−Cλ}/√(1 + Bλ²)`.
///
/// The leading `π` comes from the large-argument expansion of the exact `n = 4`
/// form, whose prefactor is `λπd0²/√(2θβ₀)`; with `A` alone the curve sits a
/// factor π below the coverage it approximates. The argmax is unaffected.
pub fn coverage_density_approx(lambda: f64, coeffs: &DensityCoeffs) -> DensityApprox {
    let value =
        PI * coeffs.coef_a * lambda * (-coeffs.coef_c * lambda).exp() / (1.0 + coeffs.coef_b * lambda * lambda).sqrt();
    DensityApprox {
        value,
        valid: (0.0..=1.0).contains(&value),
    }
}

/// Which radicand of the Cardano form reproduces the bracketed root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadicandVariant {
    /// `1/(4B²C²) + 1/(27B³)`, the textbook depressed-cubic discriminant.
    Standard,
    /// `1/(4B²C²) + 1/(8B³)`, as the formula is usually quoted for this problem.
    Printed,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardanoCheck {
    pub standard: f64,
    pub printed: f64,
    pub standard_rel_gap: f64,
    pub printed_rel_gap: f64,
    pub matching: RadicandVariant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedDensityOptimum {
    /// Root of the stationarity cubic; `value` is the approximate coverage there, clamped to `[0, 1]`.
    pub optimum: Optimum,
    pub raw_value: f64,
    /// `|−BCλ³ − Cλ + 1|` at the returned root.
    pub residual: f64,
    pub cardano: CardanoCheck,
}

fn cardano(b: f64, c: f64, cubic_term: f64) -> f64 {
    // t1 = ∛(q + √(q² + cubic_term)), and t1·t2 = ∛(q² − (q² + cubic_term)) = −∛cubic_term
    let q = 1.0 / (2.0 * b * c);
    let t1 = (q + (q * q + cubic_term).sqrt()).cbrt();
    t1 - cubic_term.cbrt() / t1
}

/// Unique positive root of `BCλ³ + Cλ − 1 = 0`, the maximizer of [`coverage_density_approx`].
///
/// Solved by safeguarded Newton iteration on the bracket `[0, 1/C]`; both
/// Cardano variants are evaluated alongside and compared with it.
pub fn optimal_density_closed(coeffs: &DensityCoeffs) -> Result<ClosedDensityOptimum> {
    let (b, c) = (coeffs.coef_b, coeffs.coef_c);
    if !(b > 0.0) || !(c > 0.0) || !b.is_finite() || !c.is_finite() {
        return Err(Error::domain(format!(
            "coefficients B and C must be > 0, got B={b}, C={c}"
        )));
    }
    let f = |x: f64| b * c * x * x * x + c * x - 1.0;
    let df = |x: f64| 3.0 * b * c * x * x + c;
    let (mut lo, mut hi) = (0.0, 1.0 / c);
    let mut x = 0.5 * hi;
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            break;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / df(x);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let done = (next - x).abs() <= 1e-15 * x;
        x = next;
        if done || hi - lo <= 1e-16 * hi {
            break;
        }
    }

    let standard = cardano(b, c, 1.0 / (27.0 * b * b * b));
    let printed = cardano(b, c, 1.0 / (8.0 * b * b * b));
    let standard_rel_gap = ((standard - x) / x).abs();
    let printed_rel_gap = ((printed - x) / x).abs();
    let matching = if standard_rel_gap < 1e-9 {
        RadicandVariant::Standard
    } else if printed_rel_gap < 1e-9 {
        RadicandVariant::Printed
    } else {
        RadicandVariant::Neither
    };

    let raw_value = coverage_density_approx(x, coeffs).value;
    Ok(ClosedDensityOptimum {
        optimum: Optimum {
            argument: x,
            value: raw_value.clamp(0.0, 1.0),
            method: OptMethod::CubicClosed,
            fallback: false,
        },
        raw_value,
        residual: (-b * c * x * x * x - c * x + 1.0).abs(),
        cardano: CardanoCheck {
            standard,
            printed,
            standard_rel_gap,
            printed_rel_gap,
            matching,
        },
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on `[a, b]`, stopping when the bracket is below `tol`.
pub fn golden_section_max<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..500 {
        if b - a <= tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Number of interior strict local maxima, ignoring flat stretches.
fn count_peaks(values: &[f64]) -> usize {
    let mut peaks = 0;
    let mut rising = true;
    for w in values.windows(2) {
        if w[1] > w[0] {
            rising = true;
        } else if w[1] < w[0] {
            if rising {
                peaks += 1;
            }
            rising = false;
        }
    }
    peaks
}

/// Points of the exact `n = 4` coverage against density, for plotting and for [`optimal_density_numeric`].
pub fn density_curve(
    dep: &DeploymentParams,
    radio: &RadioParams,
    env: &EnvironmentParams,
    densities: &[f64],
) -> Result<Vec<CoverageEstimate>> {
    densities
        .par_iter()
        .map(|&l| coverage_rayleigh_n4_closed(&dep.with_density(l), radio, env))
        .collect()
}

/// Density in `bounds` (UAVs per m²) maximizing the exact `n = 4` coverage.
///
/// A 64-point log grid locates the peak, then golden-section search in
/// `ln λ` refines it to 1e-7 relative. If the grid shows more than one peak the
/// search falls back to a 1000-point log grid and sets `fallback`.
pub fn optimal_density_numeric(
    dep: &DeploymentParams,
    radio: &RadioParams,
    env: &EnvironmentParams,
    bounds: (f64, f64),
) -> Result<Optimum> {
    let (lo, hi) = bounds;
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(Error::domain(format!("invalid density bounds [{lo}, {hi}]")));
    }
    let eval = |l: f64| coverage_rayleigh_n4_closed(&dep.with_density(l), radio, env).map(|e| e.value);
    if lo == hi {
        return Ok(Optimum {
            argument: lo,
            value: eval(lo)?,
            method: OptMethod::Grid,
            fallback: false,
        });
    }

    let grid = log_grid(lo, hi, 64);
    let values: Vec<f64> = density_curve(dep, radio, env, &grid)?.iter().map(|e| e.value).collect();
    if count_peaks(&values) > 1 {
        let dense = log_grid(lo, hi, 1000);
        let dv: Vec<f64> = density_curve(dep, radio, env, &dense)?
            .iter()
            .map(|e| e.value)
            .collect();
        let (i, &v) = dv
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("grid is non-empty");
        return Ok(Optimum {
            argument: dense[i],
            value: v,
            method: OptMethod::Grid,
            fallback: true,
        });
    }
    let (i, _) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let a = grid[i.saturating_sub(1)].ln();
    let b = grid[(i + 1).min(grid.len() - 1)].ln();
    let (x, v) = golden_section_max(|t| eval(t.exp()), a, b, 1e-7)?;
    // keep the grid point if the refinement landed lower (flat tops)
    if v >= values[i] {
        Ok(Optimum {
            argument: x.exp(),
            value: v,
            method: OptMethod::GoldenSection,
            fallback: false,
        })
    } else {
        Ok(Optimum {
            argument: grid[i],
            value: values[i],
            method: OptMethod::Grid,
            fallback: false,
        })
    }
}

/// β₀ at or above which (reference SNR ≤ 0 dB) the analytic height evaluator
/// treats interference as negligible and uses the noise-limited coverage.
pub const NOISE_DOMINANT_BETA0: f64 = 1.0;

/// How coverage is computed at each candidate altitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeightEvaluator {
    /// Rayleigh quadrature with `n(z)`; noise-limited when `β₀ ≥` [`NOISE_DOMINANT_BETA0`],
    /// and Monte Carlo with `fallback` where the interference integral diverges (`n = 2`).
    Analytic { quad: QuadratureConfig, fallback: McConfig },
    /// Interference ignored at every altitude.
    NoiseLimited { quad: QuadratureConfig },
    /// Simulation at every altitude, with the same seed throughout.
    MonteCarlo { mc: McConfig },
}

impl HeightEvaluator {
    pub fn analytic() -> Self {
        HeightEvaluator::Analytic {
            quad: QuadratureConfig::default(),
            fallback: McConfig::default().with_trials(20_000),
        }
    }

    /// Coverage at the altitude of `dep`; the flag reports a Monte Carlo fallback.
    pub fn evaluate(
        &self,
        dep: &DeploymentParams,
        radio: &RadioParams,
        env: &EnvironmentParams,
    ) -> Result<(CoverageEstimate, bool)> {
        match self {
            HeightEvaluator::Analytic { quad, fallback } => {
                if radio.beta0 >= NOISE_DOMINANT_BETA0 {
                    return Ok((coverage_noise_limited(dep, radio, env, quad)?, false));
                }
                match coverage_rayleigh(dep, radio, env, quad) {
                    Err(Error::Divergent { .. }) => {
                        let r = simulate_coverage(dep, radio, env, fallback)?;
                        Ok((r.to_estimate(Method::MonteCarlo), true))
                    }
                    other => Ok((other?, false)),
                }
            }
            HeightEvaluator::NoiseLimited { quad } => Ok((coverage_noise_limited(dep, radio, env, quad)?, false)),
            HeightEvaluator::MonteCarlo { mc } => {
                let r = simulate_coverage(dep, radio, env, mc)?;
                Ok((r.to_estimate(Method::MonteCarlo), false))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightPoint {
    pub z: f64,
    pub ple: f64,
    pub coverage: CoverageEstimate,
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightSearch {
    pub optimum: Optimum,
    /// Exponent at the optimum.
    pub ple: f64,
    pub curve: Vec<HeightPoint>,
}

/// Lowest altitude the search accepts, meters; the terrain model is not fitted below it.
pub const MIN_SEARCH_ALTITUDE: f64 = 20.0;

/// Grid spacing of the altitude scan, meters.
pub const HEIGHT_GRID_STEP: f64 = 5.0;

/// Altitude in `bounds` maximizing coverage, with `n(z)` from `env` at every point.
///
/// Scans a 5 m grid, then golden-section refines between the neighbours of the
/// best grid point to 1 cm. `dep.z` is ignored.
pub fn optimal_height(
    dep: &DeploymentParams,
    radio: &RadioParams,
    env: &EnvironmentParams,
    evaluator: &HeightEvaluator,
    bounds: (f64, f64),
) -> Result<HeightSearch> {
    optimal_height_with_step(dep, radio, env, evaluator, bounds, HEIGHT_GRID_STEP)
}

pub fn optimal_height_with_step(
    dep: &DeploymentParams,
    radio: &RadioParams,
    env: &EnvironmentParams,
    evaluator: &HeightEvaluator,
    bounds: (f64, f64),
    step: f64,
) -> Result<HeightSearch> {
    let (lo, hi) = bounds;
    if !(lo >= MIN_SEARCH_ALTITUDE) || !(hi >= lo) || !hi.is_finite() {
        return Err(Error::domain(format!(
            "invalid altitude bounds [{lo}, {hi}]; the lower bound must be at least {MIN_SEARCH_ALTITUDE} m"
        )));
    }
    if !(step > 0.0) {
        return Err(Error::domain("grid step must be > 0"));
    }
    let point = |z: f64| -> Result<HeightPoint> {
        let d = DeploymentParams {
            z,
            l_min: lo,
            l_max: hi,
            ..*dep
        };
        let (coverage, fallback) = evaluator.evaluate(&d, radio, env)?;
        Ok(HeightPoint {
            z,
            ple: env.exponent_at(z)?,
            coverage,
            fallback,
        })
    };

    let cells = ((hi - lo) / step).floor() as usize;
    let mut zs: Vec<f64> = (0..=cells).map(|i| lo + step * i as f64).collect();
    if *zs.last().expect("grid is non-empty") < hi {
        zs.push(hi);
    }
    let curve: Vec<HeightPoint> = zs.par_iter().map(|&z| point(z)).collect::<Result<_>>()?;
    let any_fallback = curve.iter().any(|p| p.fallback);
    let (i, best) = curve
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.coverage.value.total_cmp(&b.1.coverage.value))
        .expect("grid is non-empty");

    let mut optimum = Optimum {
        argument: best.z,
        value: best.coverage.value,
        method: OptMethod::Grid,
        fallback: any_fallback,
    };
    let mut best_ple = best.ple;
    if curve.len() > 1 {
        let a = curve[i.saturating_sub(1)].z;
        let b = curve[(i + 1).min(curve.len() - 1)].z;
        let (z, v) = golden_section_max(|z| point(z).map(|p| p.coverage.value), a, b, 0.01)?;
        if v > optimum.value {
            optimum.argument = z;
            optimum.value = v;
            optimum.method = OptMethod::GoldenSection;
            best_ple = env.exponent_at(z)?;
        }
    }
    Ok(HeightSearch {
        optimum,
        ple: best_ple,
        curve,
    })
}
