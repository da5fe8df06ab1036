use std::io::Write;

use uavcov::analytic::{
    coverage_no_noise, coverage_rayleigh_given_rho, coverage_rayleigh_n4_closed, rho, rho_closed_n4,
};
use uavcov::channel::{DeploymentParams, EnvironmentParams, RadioParams};
use uavcov::montecarlo::simulate_coverage_curve;
use uavcov::quadrature::QuadratureConfig;
use uavcov::units::{beta0_from_snr_db, db_to_linear, per_km2_to_per_m2};

use crate::config::RunConfig;
use crate::{CliError, Outcome};

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

/// General coverage by quadrature at `n = 4` with `ρ` scaled by `perturb`.
fn quadrature_n4(
    dep: &DeploymentParams,
    radio: &RadioParams,
    d0: f64,
    perturb: f64,
    q: &QuadratureConfig,
) -> uavcov::Result<f64> {
    let r = rho(radio.theta, 4.0, q)? * perturb;
    Ok(coverage_rayleigh_given_rho(dep, radio, d0, 4.0, r, q)?.value)
}

fn closed_identity(perturb: f64, q: &QuadratureConfig) -> uavcov::Result<Check> {
    const TOL: f64 = 1e-6;
    let d0 = EnvironmentParams::default().d0;
    let env4 = EnvironmentParams::default().with_fixed_ple(4.0);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for lam in [0.5, 1.0, 5.0] {
        for z in [50.0, 100.0, 200.0] {
            for tdb in [-10.0, 0.0, 10.0] {
                for snr in [10.0, 30.0, 50.0] {
                    let dep = DeploymentParams::at(per_km2_to_per_m2(lam), z);
                    let radio = RadioParams::rayleigh(db_to_linear(tdb), beta0_from_snr_db(snr));
                    let closed = coverage_rayleigh_n4_closed(&dep, &radio, &env4)?.value;
                    let quad = quadrature_n4(&dep, &radio, d0, perturb, q)?;
                    worst = worst.max((quad - closed).abs() / closed);
                    cases += 1;
                }
            }
        }
    }
    Ok(Check {
        name: "closed-identity",
        pass: worst <= TOL,
        detail: format!("cases={cases} worst_rel={worst:.3e} tol={TOL:.0e}"),
    })
}

fn rho_identity(perturb: f64, q: &QuadratureConfig) -> uavcov::Result<Check> {
    const TOL: f64 = 1e-8;
    let mut worst: f64 = 0.0;
    for i in 0..61 {
        let theta = 10f64.powf(-3.0 + 0.1 * i as f64);
        let d = (rho(theta, 4.0, q)? * perturb - rho_closed_n4(theta)).abs();
        worst = worst.max(d);
    }
    Ok(Check {
        name: "rho-identity",
        pass: worst <= TOL,
        detail: format!("cases=61 worst_abs={worst:.3e} tol={TOL:.0e}"),
    })
}

fn no_noise_limit(perturb: f64, q: &QuadratureConfig) -> uavcov::Result<Check> {
    const TOL: f64 = 1e-4;
    let env4 = EnvironmentParams::default().with_fixed_ple(4.0);
    let dep = DeploymentParams::at(per_km2_to_per_m2(1.0), 100.0);
    let mut gaps = Vec::new();
    for theta_db in [-10.0, 0.0, 10.0] {
        let target = coverage_no_noise(&dep, &RadioParams::rayleigh(db_to_linear(theta_db), 0.0), &env4, q)?.value;
        let row: Vec<f64> = [1e-3, 1e-5, 1e-7]
            .into_iter()
            .map(|b| {
                quadrature_n4(
                    &dep,
                    &RadioParams::rayleigh(db_to_linear(theta_db), b),
                    env4.d0,
                    perturb,
                    q,
                )
                .map(|v| (v - target).abs())
            })
            .collect::<uavcov::Result<_>>()?;
        gaps.push(row);
    }
    let monotone = gaps.iter().all(|g| g.windows(2).all(|w| w[1] < w[0]));
    let last = gaps.iter().map(|g| g[2]).fold(0.0, f64::max);
    Ok(Check {
        name: "no-noise-limit",
        pass: monotone && last <= TOL,
        detail: format!("monotone={monotone} final_gap={last:.3e} tol={TOL:.0e}"),
    })
}

fn mc_agreement(cfg: &RunConfig, perturb: f64, q: &QuadratureConfig) -> Result<Check, CliError> {
    let base = cfg.scenario(None)?;
    let env4 = EnvironmentParams::default().with_fixed_ple(4.0);
    let dep = DeploymentParams::at(per_km2_to_per_m2(1.0), 100.0);
    let thetas: Vec<f64> = (0..9).map(|i| db_to_linear(-20.0 + 5.0 * i as f64)).collect();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_diff: f64 = 0.0;
    let numeric = |e: uavcov::Error| CliError::Numeric(e.to_string());
    for snr in [20.0, 40.0] {
        let radio = RadioParams::rayleigh(1.0, beta0_from_snr_db(snr));
        let sims = simulate_coverage_curve(&dep, &radio, &env4, &thetas, &base.mc).map_err(numeric)?;
        for (&t, sim) in thetas.iter().zip(&sims) {
            let a = quadrature_n4(&dep, &radio.with_theta(t), env4.d0, perturb, q).map_err(numeric)?;
            let d = (a - sim.estimate).abs();
            worst_diff = worst_diff.max(d);
            worst_excess = worst_excess.max(d - sim.ci_half_width.max(0.01));
        }
    }
    Ok(Check {
        name: "mc-agreement",
        pass: worst_excess <= 0.0,
        detail: format!(
            "cases={} trials={} seed={} worst_abs={worst_diff:.3e} tol=max(0.01,ci)",
            2 * thetas.len(),
            base.mc.trials,
            base.mc.seed
        ),
    })
}

/// `validate`: one `check=… status=…` line per identity, then a summary line.
///
/// `perturb` scales `ρ` on every quadrature path; any value other than 1 should fail.
pub fn cmd_validate(cfg: &RunConfig, perturb: f64, stdout: &mut dyn Write) -> Result<Outcome, CliError> {
    if !(perturb > 0.0) || !perturb.is_finite() {
        return Err(CliError::Config(format!(
            "perturbation factor must be > 0, got {perturb}"
        )));
    }
    let q = QuadratureConfig::default();
    let numeric = |e: uavcov::Error| CliError::Numeric(e.to_string());
    let checks = vec![
        closed_identity(perturb, &q).map_err(numeric)?,
        rho_identity(perturb, &q).map_err(numeric)?,
        no_noise_limit(perturb, &q).map_err(numeric)?,
        mc_agreement(cfg, perturb, &q)?,
    ];
    let io = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    let mut failed = Vec::new();
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        writeln!(stdout, "check={} status={status} {}", c.name, c.detail).map_err(io)?;
        if !c.pass {
            failed.push(c.name);
        }
    }
    let status = if failed.is_empty() { "PASS" } else { "FAIL" };
    writeln!(
        stdout,
        "summary status={status} checks={} failed={} failures={}",
        checks.len(),
        failed.len(),
        if failed.is_empty() {
            "-".to_string()
        } else {
            failed.join(",")
        }
    )
    .map_err(io)?;
    Ok(if failed.is_empty() {
        Outcome::Success
    } else {
        Outcome::ValidationFailed
    })
}
