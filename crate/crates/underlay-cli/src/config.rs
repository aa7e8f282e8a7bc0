//! Experiment configuration files.
//!
//! Flat TOML with two optional sections: `[scenario]` holds the physics
//! and experiment knobs (reference-deployment defaults apply to anything
//! omitted) and `[sweep]` holds per-variable value lists used by
//! `simulate --sweep`. Validation failures carry field-level paths.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use underlay::rates::DecoderKind;
use underlay::sim::{Interferers, ScenarioConfig, SweepSpec};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenario: Option<ScenarioSection>,
    sweep: Option<SweepSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    sigma2_dbm: Option<f64>,
    alpha: Option<f64>,
    p_m_dbm: Option<f64>,
    p_b_dbm: Option<f64>,
    k_db: Option<f64>,
    radius_m: Option<f64>,
    n_m: Option<usize>,
    n_i: Option<usize>,
    lambda_i: Option<f64>,
    r_m: Option<f64>,
    decoder: Option<String>,
    trials: Option<u64>,
    master_seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    r_m: Option<Vec<f64>>,
    n_m: Option<Vec<usize>>,
    lambda_i: Option<Vec<f64>>,
}

/// Parsed and validated configuration.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub scenario: ScenarioConfig,
    /// Whether the file pinned its own master seed.
    pub seed_in_file: bool,
    r_m_values: Option<Vec<f64>>,
    n_m_values: Option<Vec<usize>>,
    lambda_i_values: Option<Vec<f64>>,
}

/// Sweep variable selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Rm,
    Nm,
    LambdaI,
}

/// Log-spaced grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (llo, lhi) = (lo.log10(), hi.log10());
    (0..points)
        .map(|i| 10f64.powf(llo + (lhi - llo) * i as f64 / (points - 1) as f64))
        .collect()
}

impl LoadedConfig {
    /// Value list for the requested sweep; falls back to the stock grids
    /// (R_M log-spaced on [1e-3, 2], N_M = 1..10, λ_I log-spaced on
    /// [1e-5, 1e-3]) when the file does not pin one.
    pub fn sweep_spec(&self, variable: SweepVariable) -> SweepSpec {
        match variable {
            SweepVariable::Rm => SweepSpec::Rm(
                self.r_m_values.clone().unwrap_or_else(|| log_grid(1e-3, 2.0, 8)),
            ),
            SweepVariable::Nm => {
                SweepSpec::Nm(self.n_m_values.clone().unwrap_or_else(|| (1..=10).collect()))
            }
            SweepVariable::LambdaI => SweepSpec::LambdaI(
                self.lambda_i_values.clone().unwrap_or_else(|| log_grid(1e-5, 1e-3, 5)),
            ),
        }
    }
}

fn parse_decoder(value: &str) -> Result<DecoderKind> {
    match value {
        "jd" => Ok(DecoderKind::Jd),
        "sd" => Ok(DecoderKind::Sd),
        other => Err(anyhow!("scenario.decoder: expected \"jd\" or \"sd\", got \"{other}\"")),
    }
}

/// Load, parse and validate a configuration file.
pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let file: ConfigFile = toml::from_str(&text)
        .with_context(|| format!("cannot parse config file {}", path.display()))?;
    let section = file.scenario.unwrap_or_default();
    let sweep = file.sweep.unwrap_or_default();

    let defaults = ScenarioConfig::default();
    let interferers = match (section.n_i, section.lambda_i) {
        (Some(_), Some(_)) => {
            bail!("scenario.n_i and scenario.lambda_i are mutually exclusive; give one")
        }
        (Some(n), None) => Interferers::Count(n),
        (None, Some(lambda)) => Interferers::Density(lambda),
        (None, None) => defaults.interferers,
    };
    let scenario = ScenarioConfig {
        sigma2_dbm: section.sigma2_dbm.unwrap_or(defaults.sigma2_dbm),
        alpha: section.alpha.unwrap_or(defaults.alpha),
        p_m_dbm: section.p_m_dbm.unwrap_or(defaults.p_m_dbm),
        p_b_dbm: section.p_b_dbm.unwrap_or(defaults.p_b_dbm),
        k_db: section.k_db.unwrap_or(defaults.k_db),
        radius_m: section.radius_m.unwrap_or(defaults.radius_m),
        n_m: section.n_m.unwrap_or(defaults.n_m),
        interferers,
        r_m: section.r_m.unwrap_or(defaults.r_m),
        decoder: match &section.decoder {
            Some(value) => parse_decoder(value)?,
            None => defaults.decoder,
        },
        trials: section.trials.unwrap_or(defaults.trials),
        master_seed: section.master_seed.unwrap_or(0),
    };
    validate_scenario(&scenario)?;
    if let Some(values) = &sweep.r_m {
        if values.iter().any(|&v| !v.is_finite() || v < 0.0) {
            bail!("sweep.r_m: values must be finite and nonnegative");
        }
    }
    if let Some(values) = &sweep.n_m {
        if values.iter().any(|&n| n == 0 || n > 20) {
            bail!("sweep.n_m: values must be between 1 and 20");
        }
    }
    if let Some(values) = &sweep.lambda_i {
        if values.iter().any(|&v| !v.is_finite() || v < 0.0) {
            bail!("sweep.lambda_i: values must be finite and nonnegative");
        }
    }
    Ok(LoadedConfig {
        scenario,
        seed_in_file: section.master_seed.is_some(),
        r_m_values: sweep.r_m,
        n_m_values: sweep.n_m,
        lambda_i_values: sweep.lambda_i,
    })
}

/// Field-level validation on top of the library checks.
fn validate_scenario(scenario: &ScenarioConfig) -> Result<()> {
    let field = |name: &str, ok: bool, requirement: &str| -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(anyhow!("scenario.{name}: {requirement}"))
        }
    };
    field("sigma2_dbm", scenario.sigma2_dbm.is_finite(), "must be finite")?;
    field("alpha", scenario.alpha.is_finite() && scenario.alpha > 2.0, "must exceed 2")?;
    field("p_m_dbm", scenario.p_m_dbm.is_finite(), "must be finite")?;
    field("p_b_dbm", scenario.p_b_dbm.is_finite(), "must be finite")?;
    field("k_db", scenario.k_db.is_finite(), "must be finite")?;
    field(
        "radius_m",
        scenario.radius_m.is_finite() && scenario.radius_m > 0.0,
        "must be positive",
    )?;
    field("n_m", (1..=20).contains(&scenario.n_m), "must be between 1 and 20")?;
    field("r_m", scenario.r_m.is_finite() && scenario.r_m >= 0.0, "must be nonnegative")?;
    field("trials", scenario.trials >= 1, "must be at least 1")?;
    if let Interferers::Density(lambda) = scenario.interferers {
        field("lambda_i", lambda.is_finite() && lambda >= 0.0, "must be nonnegative")?;
    }
    // end-to-end check through the library resolver
    scenario.resolve().map_err(|e| anyhow!("scenario: {e}"))?;
    Ok(())
}
