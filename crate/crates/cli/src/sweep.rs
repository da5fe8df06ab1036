use std::io::Write;

use rayon::prelude::*;

use uavcov::analytic::{
    coverage_no_noise, coverage_noise_limited, coverage_rayleigh, coverage_rayleigh_n4_closed, rho_closed_n4, Method,
};
use uavcov::montecarlo::{coverage_nakagami_semianalytic, simulate_coverage};
use uavcov::optimize::{coverage_density_approx, density_coeffs};

use crate::config::{RunConfig, Scenario};
use crate::output::{emit_csv, num};
use crate::{CliError, Outcome};

/// Coverage value and its error bound (confidence half-width for simulations).
pub(crate) type Cell = Result<(f64, f64), String>;

/// One method at one scenario.
pub(crate) fn evaluate(method: Method, s: &Scenario) -> Cell {
    let est = |r: uavcov::Result<uavcov::analytic::CoverageEstimate>| {
        r.map(|e| (e.value, e.error_bound)).map_err(|e| e.to_string())
    };
    match method {
        Method::ExactQuadrature => est(coverage_rayleigh(&s.dep, &s.radio, &s.env, &s.quad)),
        Method::ClosedN4 => est(coverage_rayleigh_n4_closed(&s.dep, &s.radio, &s.env)),
        Method::NoNoise => est(coverage_no_noise(&s.dep, &s.radio, &s.env, &s.quad)),
        Method::NoiseLimited => est(coverage_noise_limited(&s.dep, &s.radio, &s.env, &s.quad)),
        Method::DensityApprox => {
            // raw approximation (may leave [0, 1]); the error column is its gap to the exact n = 4 form
            let exact = coverage_rayleigh_n4_closed(&s.dep, &s.radio, &s.env).map_err(|e| e.to_string())?;
            let k = density_coeffs(
                s.dep.z,
                s.radio.theta,
                s.radio.beta0,
                s.env.d0,
                rho_closed_n4(s.radio.theta),
            )
            .map_err(|e| e.to_string())?;
            let v = coverage_density_approx(s.dep.lambda, &k).value;
            Ok((v, (v - exact.value).abs()))
        }
        Method::MonteCarlo => simulate_coverage(&s.dep, &s.radio, &s.env, &s.mc)
            .map(|r| (r.estimate, r.ci_half_width))
            .map_err(|e| e.to_string()),
        Method::NakagamiSemianalytic => coverage_nakagami_semianalytic(&s.dep, &s.radio, &s.env, &s.mc)
            .map(|r| (r.estimate, r.ci_half_width))
            .map_err(|e| e.to_string()),
    }
}

/// `sweep`: one row per grid point, columns `axis, m1, m1_err, m2, m2_err, …`.
///
/// The CSV goes to `cfg.out` (summary on `stdout`) or, without a path, to
/// `stdout` (summary on `stderr`). Points that fail numerically leave empty
/// cells and turn the outcome into a partial failure.
pub fn cmd_sweep(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Outcome, CliError> {
    let axis = cfg
        .axis
        .ok_or_else(|| CliError::Config("--axis is required for sweep".into()))?;
    let methods = cfg.parsed_methods()?;
    let grid = cfg.grid()?;
    let scenarios: Vec<Scenario> = grid
        .iter()
        .map(|&v| cfg.scenario(Some((axis, v))))
        .collect::<Result<_, _>>()?;

    let cells: Vec<Vec<Cell>> = scenarios
        .par_iter()
        .map(|s| methods.iter().map(|&m| evaluate(m, s)).collect())
        .collect();

    let mut header = vec![axis.column().to_string()];
    for m in &methods {
        header.push(m.tag().to_string());
        header.push(format!("{}_err", m.tag()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for (x, row_cells) in grid.iter().zip(&cells) {
        let mut row = vec![num(*x)];
        for (m, c) in methods.iter().zip(row_cells) {
            match c {
                Ok((v, e)) => {
                    row.push(num(*v));
                    row.push(num(*e));
                }
                Err(msg) => {
                    row.push(String::new());
                    row.push(String::new());
                    failures.push(format!("{}={}: {}: {msg}", axis.column(), x, m.tag()));
                }
            }
        }
        rows.push(row);
    }

    emit_csv(cfg.out.as_deref(), stdout, &header, &rows)?;
    let log: &mut dyn Write = if cfg.out.is_some() { stdout } else { &mut *stderr };
    let tags: Vec<&str> = methods.iter().map(|m| m.tag()).collect();
    let _ = writeln!(
        log,
        "sweep axis={} points={} methods={} failed_cells={}",
        axis.column(),
        grid.len(),
        tags.join(","),
        failures.len()
    );
    // pairwise agreement between the first analytic column and any simulated one
    let is_sim = |m: &Method| matches!(m, Method::MonteCarlo | Method::NakagamiSemianalytic);
    if let (Some(a), Some(s)) = (methods.iter().position(|m| !is_sim(m)), methods.iter().position(is_sim)) {
        let mut worst: f64 = 0.0;
        let mut worst_excess: f64 = f64::NEG_INFINITY;
        for row in &cells {
            if let (Ok((va, _)), Ok((vs, h))) = (&row[a], &row[s]) {
                let d = (va - vs).abs();
                worst = worst.max(d);
                worst_excess = worst_excess.max(d - h.max(0.01));
            }
        }
        let _ = writeln!(
            log,
            "agreement {} vs {}: max_abs_diff={:.6e} within_max(0.01,ci)={}",
            methods[a].tag(),
            methods[s].tag(),
            worst,
            worst_excess <= 0.0
        );
    }
    for f in &failures {
        let _ = writeln!(stderr, "failed: {f}");
    }
    Ok(if failures.is_empty() {
        Outcome::Success
    } else {
        Outcome::PartialFailure
    })
}
