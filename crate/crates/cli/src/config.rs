//! Run configuration: TOML file, command-line flags, and the single conversion
//! from user units (dB, km⁻²) to the SI values the library works in.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use uavcov::analytic::Method;
use uavcov::channel::{DeploymentParams, EnvironmentParams, FadingModel, RadioParams};
use uavcov::montecarlo::{McConfig, RegionRadius};
use uavcov::quadrature::QuadratureConfig;
use uavcov::units::{beta0_from_snr_db, db_to_linear, per_km2_to_per_m2};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    #[value(name = "theta_db")]
    ThetaDb,
    #[value(name = "z")]
    Z,
    #[value(name = "ple")]
    Ple,
    #[value(name = "lambda")]
    Lambda,
    #[value(name = "snr_db")]
    SnrDb,
}

impl Axis {
    /// CSV header of the swept column, with its unit.
    pub fn column(self) -> &'static str {
        match self {
            Axis::ThetaDb => "theta_db",
            Axis::Z => "z_m",
            Axis::Ple => "ple",
            Axis::Lambda => "lambda_per_km2",
            Axis::SnrDb => "snr_db",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Height,
    Density,
}

/// Fading as written in configs: `rayleigh`, `nakagami:<m>`, `rician:<K>` (linear K)
/// or `rician-db:<K in dB>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSpec(pub FadingModel);

impl FromStr for FadingSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("rayleigh") {
            return Ok(FadingSpec(FadingModel::Rayleigh));
        }
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| format!("fading '{s}': expected rayleigh, nakagami:<m>, rician:<K> or rician-db:<K>"))?;
        let x: f64 = arg
            .trim()
            .parse()
            .map_err(|_| format!("fading '{s}': '{arg}' is not a number"))?;
        let model = match kind.trim().to_ascii_lowercase().as_str() {
            "nakagami" => FadingModel::Nakagami { m: x },
            "rician" => FadingModel::Rician { k: x },
            "rician-db" => FadingModel::Rician { k: db_to_linear(x) },
            other => return Err(format!("unknown fading kind '{other}'")),
        };
        model.validate().map_err(|e| e.to_string())?;
        Ok(FadingSpec(model))
    }
}

impl fmt::Display for FadingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            FadingModel::Rayleigh => f.write_str("rayleigh"),
            FadingModel::Nakagami { m } => write!(f, "nakagami:{m}"),
            FadingModel::Rician { k } => write!(f, "rician:{k}"),
        }
    }
}

/// Everything a run needs, in user units. Key names double as TOML keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub terrain_a: f64,
    pub terrain_b: f64,
    /// Meters.
    pub terrain_c: f64,
    pub d0_m: f64,
    /// Fixed path-loss exponent; when absent the exponent follows the altitude.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ple: Option<f64>,
    pub density_per_km2: f64,
    pub height_m: f64,
    pub theta_db: f64,
    pub snr_db: f64,
    pub fading: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    pub methods: Vec<String>,
    pub trials: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region_radius_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    /// Lower search bound: meters for height, km⁻² for density.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let env = EnvironmentParams::sui_urban();
        Self {
            terrain_a: env.terrain_a,
            terrain_b: env.terrain_b,
            terrain_c: env.terrain_c,
            d0_m: env.d0,
            ple: None,
            density_per_km2: 1.0,
            height_m: 100.0,
            theta_db: 0.0,
            snr_db: 20.0,
            fading: "rayleigh".into(),
            axis: None,
            from: None,
            to: None,
            step: None,
            methods: vec![Method::ExactQuadrature.tag().into()],
            trials: 100_000,
            seed: McConfig::default().seed,
            region_radius_m: None,
            out: None,
            target: None,
            min: None,
            max: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig always serializes")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn parsed_methods(&self) -> Result<Vec<Method>, CliError> {
        if self.methods.is_empty() {
            return Err(CliError::Config("at least one method is required".into()));
        }
        let mut out: Vec<Method> = Vec::new();
        for m in &self.methods {
            let m: Method = m.parse().map_err(|e: uavcov::Error| CliError::Config(e.to_string()))?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        Ok(out)
    }

    pub fn fading_model(&self) -> Result<FadingModel, CliError> {
        self.fading.parse::<FadingSpec>().map(|f| f.0).map_err(CliError::Config)
    }

    /// Sweep grid `from, from+step, …, ≤ to` in user units.
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let (from, to, step) = match (self.from, self.to, self.step) {
            (Some(a), Some(b), Some(s)) => (a, b, s),
            _ => return Err(CliError::Config("--from, --to and --step are all required".into())),
        };
        if !(from.is_finite() && to.is_finite()) || !(step > 0.0) || !step.is_finite() {
            return Err(CliError::Config("from/to must be finite and step > 0".into()));
        }
        if to < from {
            return Err(CliError::Config(format!("empty range: from {from} > to {to}")));
        }
        let count = ((to - from) / step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            return Err(CliError::Config(format!("{count} grid points is too many")));
        }
        Ok((0..count).map(|i| from + step * i as f64).collect())
    }

    /// The library-side scenario with `axis` set to `value` (user units).
    pub fn scenario(&self, axis: Option<(Axis, f64)>) -> Result<Scenario, CliError> {
        let mut c = self.clone();
        if let Some((axis, v)) = axis {
            match axis {
                Axis::ThetaDb => c.theta_db = v,
                Axis::Z => c.height_m = v,
                Axis::Ple => c.ple = Some(v),
                Axis::Lambda => c.density_per_km2 = v,
                Axis::SnrDb => c.snr_db = v,
            }
        }
        let mut env = EnvironmentParams {
            terrain_a: c.terrain_a,
            terrain_b: c.terrain_b,
            terrain_c: c.terrain_c,
            d0: c.d0_m,
            ple_override: None,
        };
        if let Some(n) = c.ple {
            env = env.with_fixed_ple(n);
        }
        let dep = DeploymentParams::at(per_km2_to_per_m2(c.density_per_km2), c.height_m);
        let radio = RadioParams {
            theta: db_to_linear(c.theta_db),
            beta0: beta0_from_snr_db(c.snr_db),
            fading: c.fading_model()?,
        };
        let radius = match c.region_radius_m {
            Some(r) => RegionRadius::Explicit(r),
            None => RegionRadius::Auto,
        };
        let mc = McConfig::default()
            .with_trials(c.trials)
            .with_seed(c.seed)
            .with_radius(radius);
        let bad = |e: uavcov::Error| CliError::Config(e.to_string());
        env.validate().map_err(bad)?;
        dep.validate().map_err(bad)?;
        radio.validate().map_err(bad)?;
        mc.validate().map_err(bad)?;
        Ok(Scenario {
            dep,
            radio,
            env,
            mc,
            quad: QuadratureConfig::default(),
        })
    }
}

/// SI parameters ready for the library.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub dep: DeploymentParams,
    pub radio: RadioParams,
    pub env: EnvironmentParams,
    pub mc: McConfig,
    pub quad: QuadratureConfig,
}

/// Scenario flags shared by every subcommand; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioArgs {
    /// TOML file with any RunConfig keys; flags win over it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta_db: Option<f64>,
    #[arg(long)]
    pub height_m: Option<f64>,
    #[arg(long)]
    pub density_per_km2: Option<f64>,
    /// Fixed path-loss exponent
    #[arg(long, conflicts_with = "sui")]
    pub ple: Option<f64>,
    /// Altitude-dependent exponent from the SUI terrain model (the default)
    #[arg(long)]
    pub sui: bool,
    #[arg(long)]
    pub d0_m: Option<f64>,
    /// rayleigh, nakagami:<m>, rician:<K> or rician-db:<K dB>
    #[arg(long)]
    pub fading: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulation window radius in meters (default scales with density and altitude)
    #[arg(long)]
    pub region_radius_m: Option<f64>,
    /// Output CSV path (standard output when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ScenarioArgs {
    /// Defaults, then the config file, then these flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = &self.$f { c.$f = v.clone(); } )* };
        }
        take!(snr_db, theta_db, height_m, density_per_km2, d0_m, fading, trials, seed);
        if self.ple.is_some() {
            c.ple = self.ple;
        }
        if self.sui {
            c.ple = None;
        }
        if self.region_radius_m.is_some() {
            c.region_radius_m = self.region_radius_m;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fading_specs() {
        assert_eq!("rayleigh".parse::<FadingSpec>().unwrap().0, FadingModel::Rayleigh);
        assert_eq!(
            "nakagami:2.5".parse::<FadingSpec>().unwrap().0,
            FadingModel::Nakagami { m: 2.5 }
        );
        let FadingModel::Rician { k } = "rician-db:10".parse::<FadingSpec>().unwrap().0 else {
            panic!()
        };
        assert!((k - 10.0).abs() < 1e-12);
        assert!("nakagami:0.1".parse::<FadingSpec>().is_err());
        assert!("gauss:1".parse::<FadingSpec>().is_err());
        assert!("rician".parse::<FadingSpec>().is_err());
    }

    #[test]
    fn grid_includes_endpoint() {
        let c = RunConfig {
            from: Some(-20.0),
            to: Some(20.0),
            step: Some(1.0),
            ..Default::default()
        };
        let g = c.grid().unwrap();
        assert_eq!(g.len(), 41);
        assert_eq!(*g.last().unwrap(), 20.0);
        let c = RunConfig {
            from: Some(2.0),
            to: Some(5.0),
            step: Some(0.5),
            ..Default::default()
        };
        assert_eq!(c.grid().unwrap().len(), 7);
        let c = RunConfig {
            from: Some(0.0),
            to: Some(0.3),
            step: Some(0.1),
            ..Default::default()
        };
        assert_eq!(c.grid().unwrap().len(), 4);
    }

    #[test]
    fn scenario_converts_units_once() {
        let c = RunConfig {
            density_per_km2: 2.0,
            theta_db: 10.0,
            snr_db: 30.0,
            ple: Some(4.0),
            ..Default::default()
        };
        let s = c.scenario(None).unwrap();
        assert_eq!(s.dep.lambda, 2e-6);
        assert!((s.radio.theta - 10.0).abs() < 1e-12);
        assert!((s.radio.beta0 - 1e-3).abs() < 1e-18);
        assert_eq!(s.env.exponent_at(100.0).unwrap(), 4.0);
        let s = c.scenario(Some((Axis::Lambda, 5.0))).unwrap();
        assert_eq!(s.dep.lambda, 5e-6);
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let c = RunConfig {
            height_m: -1.0,
            ..Default::default()
        };
        assert!(matches!(c.scenario(None), Err(CliError::Config(_))));
        let c = RunConfig {
            methods: vec!["bogus".into()],
            ..Default::default()
        };
        assert!(c.parsed_methods().is_err());
        assert!(RunConfig::from_toml("unknown_key = 1").is_err());
    }
}
