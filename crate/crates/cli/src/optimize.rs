use std::io::Write;

use uavcov::analytic::{coverage_rayleigh_n4_closed, rho_closed_n4};
use uavcov::channel::{DeploymentParams, FadingModel};
use uavcov::optimize::{
    coverage_density_approx, density_coeffs, optimal_density_closed, optimal_density_numeric, optimal_height,
    HeightEvaluator, RadicandVariant, MIN_SEARCH_ALTITUDE,
};
use uavcov::units::{per_km2_to_per_m2, per_m2_to_per_km2};

use crate::config::{RunConfig, Target};
use crate::output::{emit_csv, num};
use crate::{CliError, EvaluatorArg, Outcome};

const DEFAULT_HEIGHT_BOUNDS: (f64, f64) = (20.0, 600.0);
const DEFAULT_DENSITY_BOUNDS: (f64, f64) = (0.01, 100.0);
const DENSITY_CURVE_POINTS: usize = 101;

fn bounds(cfg: &RunConfig, default: (f64, f64)) -> Result<(f64, f64), CliError> {
    let lo = cfg.min.unwrap_or(default.0);
    let hi = cfg.max.unwrap_or(default.1);
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(CliError::Config(format!("invalid bounds: min {lo}, max {hi}")));
    }
    Ok((lo, hi))
}

fn numeric_error(e: uavcov::Error) -> CliError {
    CliError::Numeric(e.to_string())
}

/// `optimize`: the scanned curve with the optimum flagged, plus a summary.
pub fn cmd_optimize(
    cfg: &RunConfig,
    evaluator: EvaluatorArg,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let target = cfg
        .target
        .ok_or_else(|| CliError::Config("--target height|density is required".into()))?;
    let s = cfg.scenario(None)?;
    let (header, rows, summary) = match target {
        Target::Height => {
            let (lo, hi) = bounds(cfg, DEFAULT_HEIGHT_BOUNDS)?;
            if lo < MIN_SEARCH_ALTITUDE {
                return Err(CliError::Config(format!(
                    "height search needs min >= {MIN_SEARCH_ALTITUDE} m, got {lo}"
                )));
            }
            let ev = match evaluator {
                EvaluatorArg::Analytic => HeightEvaluator::Analytic {
                    quad: s.quad,
                    fallback: s.mc,
                },
                EvaluatorArg::NoiseLimited => HeightEvaluator::NoiseLimited { quad: s.quad },
                EvaluatorArg::MonteCarlo => HeightEvaluator::MonteCarlo { mc: s.mc },
            };
            let dep = DeploymentParams {
                l_min: lo,
                l_max: hi,
                ..s.dep
            };
            let search = optimal_height(&dep, &s.radio, &s.env, &ev, (lo, hi)).map_err(numeric_error)?;
            let opt = search.optimum;
            let header: Vec<String> = ["z_m", "ple", "coverage", "coverage_err", "method", "optimum"]
                .map(String::from)
                .to_vec();
            let mut rows: Vec<(f64, Vec<String>)> = search
                .curve
                .iter()
                .map(|p| {
                    (
                        p.z,
                        vec![
                            num(p.z),
                            num(p.ple),
                            num(p.coverage.value),
                            num(p.coverage.error_bound),
                            p.coverage.method.tag().to_string(),
                            u8::from(p.z == opt.argument).to_string(),
                        ],
                    )
                })
                .collect();
            if !search.curve.iter().any(|p| p.z == opt.argument) {
                rows.push((
                    opt.argument,
                    vec![
                        num(opt.argument),
                        num(search.ple),
                        num(opt.value),
                        String::new(),
                        opt.method.tag().to_string(),
                        "1".into(),
                    ],
                ));
            }
            rows.sort_by(|a, b| a.0.total_cmp(&b.0));
            let summary = vec![format!(
                "optimum target=height z_m={:.6} coverage={:.6e} ple={:.6} search={} mc_fallback={}",
                opt.argument,
                opt.value,
                search.ple,
                opt.method.tag(),
                opt.fallback
            )];
            (header, rows.into_iter().map(|r| r.1).collect::<Vec<_>>(), summary)
        }
        Target::Density => {
            if s.radio.fading != FadingModel::Rayleigh {
                return Err(CliError::Config("density optimization needs Rayleigh fading".into()));
            }
            let (lo_km, hi_km) = bounds(cfg, DEFAULT_DENSITY_BOUNDS)?;
            let (lo, hi) = (per_km2_to_per_m2(lo_km), per_km2_to_per_m2(hi_km));
            let env4 = s.env.with_fixed_ple(4.0);
            let numeric = optimal_density_numeric(&s.dep, &s.radio, &env4, (lo, hi)).map_err(numeric_error)?;
            let coeffs = density_coeffs(
                s.dep.z,
                s.radio.theta,
                s.radio.beta0,
                s.env.d0,
                rho_closed_n4(s.radio.theta),
            )
            .map_err(numeric_error)?;
            let closed = optimal_density_closed(&coeffs).map_err(numeric_error)?;
            let cl = closed.optimum.argument;

            let mut lambdas: Vec<f64> = if lo == hi {
                vec![lo]
            } else {
                let (a, b) = (lo.ln(), hi.ln());
                (0..DENSITY_CURVE_POINTS)
                    .map(|i| (a + (b - a) * i as f64 / (DENSITY_CURVE_POINTS - 1) as f64).exp())
                    .collect()
            };
            if !lambdas.contains(&numeric.argument) {
                lambdas.push(numeric.argument);
            }
            if (lo..=hi).contains(&cl) && !lambdas.contains(&cl) {
                lambdas.push(cl);
            }
            lambdas.sort_by(f64::total_cmp);

            let header: Vec<String> = [
                "lambda_per_km2",
                "closed_n4",
                "closed_n4_err",
                "density_approx",
                "optimum",
            ]
            .map(String::from)
            .to_vec();
            let mut rows = Vec::with_capacity(lambdas.len());
            for &l in &lambdas {
                let exact =
                    coverage_rayleigh_n4_closed(&s.dep.with_density(l), &s.radio, &env4).map_err(numeric_error)?;
                let flag = match (l == numeric.argument, l == cl) {
                    (true, true) => "numeric+closed",
                    (true, false) => "numeric",
                    (false, true) => "closed",
                    _ => "",
                };
                rows.push(vec![
                    num(per_m2_to_per_km2(l)),
                    num(exact.value),
                    num(exact.error_bound),
                    num(coverage_density_approx(l, &coeffs).value),
                    flag.to_string(),
                ]);
            }
            let gap = (cl - numeric.argument).abs() / numeric.argument;
            let variant = match closed.cardano.matching {
                RadicandVariant::Standard => "standard-27",
                RadicandVariant::Printed => "printed-8",
                RadicandVariant::Neither => "neither",
            };
            let summary = vec![
                format!(
                    "optimum target=density numeric_per_km2={:.6e} coverage={:.6e} search={} fallback={}",
                    per_m2_to_per_km2(numeric.argument),
                    numeric.value,
                    numeric.method.tag(),
                    numeric.fallback
                ),
                format!(
                    "closed_per_km2={:.6e} approx_value={:.6e} relative_gap={:.6e} cubic_residual={:.3e} in_bounds={}",
                    per_m2_to_per_km2(cl),
                    closed.raw_value,
                    gap,
                    closed.residual,
                    (lo..=hi).contains(&cl)
                ),
                format!(
                    "cardano standard_per_km2={:.6e} printed_per_km2={:.6e} matches={}",
                    per_m2_to_per_km2(closed.cardano.standard),
                    per_m2_to_per_km2(closed.cardano.printed),
                    variant
                ),
            ];
            (header, rows, summary)
        }
    };

    emit_csv(cfg.out.as_deref(), stdout, &header, &rows)?;
    let log: &mut dyn Write = if cfg.out.is_some() { stdout } else { stderr };
    for line in summary {
        let _ = writeln!(log, "{line}");
    }
    Ok(Outcome::Success)
}
