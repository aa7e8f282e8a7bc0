//! Monte Carlo engine: per-trial scenario sampling, zero-outage rate
//! selection, decodability verification, outage estimation and parameter
//! sweeps.
//!
//! Every trial owns an RNG stream derived from `(master_seed, trial index)`
//! and aggregation runs in trial order, so results are bit-identical for
//! any number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{mean_rate_jd, mean_rate_sd, MeanRateKind};
use crate::channel::{capacity, dbm_to_mw, db_to_linear, LinSnr, PowerDbm, Rate, SnrThreshold};
use crate::channel::inv_capacity;
use crate::error::{Error, Result};
use crate::geometry::{expected_received_power, expected_snr_lower_bound, interference_variance,
    DiskDeployment, PathLossParams};
use crate::mac::{decodable_mtd_set, downlink_decodable, sd_max_downlink_rate, MacScenario,
    DECODABILITY_SLACK, MAX_MTDS};
use crate::rates::{zero_outage_snr, DecoderKind};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Non-associated interferer population: either a node count or a spatial
/// density; the other is derived through `λ_I = N_I/(πR²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interferers {
    Count(usize),
    Density(f64),
}

/// Full experiment description. Physics defaults follow the reference
/// deployment: σ² = −97.5 dBm, α = 4, P_M = −10 dBm, P_B = 30 dBm,
/// K = −30 dB, R = 200 m.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub sigma2_dbm: f64,
    pub alpha: f64,
    pub p_m_dbm: f64,
    pub p_b_dbm: f64,
    pub k_db: f64,
    pub radius_m: f64,
    pub n_m: usize,
    pub interferers: Interferers,
    /// Fixed MTD rate R_M in bits/s/Hz.
    pub r_m: f64,
    pub decoder: DecoderKind,
    pub trials: u64,
    pub master_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            sigma2_dbm: -97.5,
            alpha: 4.0,
            p_m_dbm: -10.0,
            p_b_dbm: 30.0,
            k_db: -30.0,
            radius_m: 200.0,
            n_m: 1,
            interferers: Interferers::Count(0),
            r_m: 0.01,
            decoder: DecoderKind::Jd,
            trials: 100_000,
            master_seed: 0,
        }
    }
}

impl ScenarioConfig {
    /// Derived interferer count.
    pub fn n_i(&self) -> Result<usize> {
        match self.interferers {
            Interferers::Count(n) => Ok(n),
            Interferers::Density(lambda) => {
                if !lambda.is_finite() || lambda < 0.0 {
                    return Err(Error::Negative { name: "interferer density", value: lambda });
                }
                Ok((lambda * std::f64::consts::PI * self.radius_m * self.radius_m).round()
                    as usize)
            }
        }
    }

    /// Derived interferer density λ_I = N_I/(πR²).
    pub fn lambda_i(&self) -> Result<f64> {
        match self.interferers {
            Interferers::Density(lambda) => Ok(lambda),
            Interferers::Count(n) => {
                Ok(n as f64 / (std::f64::consts::PI * self.radius_m * self.radius_m))
            }
        }
    }

    /// Validate and convert to linear units.
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        let sigma2_mw = dbm_to_mw(PowerDbm::new(self.sigma2_dbm)?);
        let p_b_mw = dbm_to_mw(PowerDbm::new(self.p_b_dbm)?);
        let p_m_mw = dbm_to_mw(PowerDbm::new(self.p_m_dbm)?);
        let params = PathLossParams::new(db_to_linear(self.k_db)?, self.alpha)?;
        if !(self.radius_m.is_finite() && self.radius_m > 0.0) {
            return Err(Error::NonPositive { name: "disk radius", value: self.radius_m });
        }
        if self.n_m == 0 || self.n_m > MAX_MTDS {
            return Err(Error::MtdCountOutOfRange { count: self.n_m, max: MAX_MTDS });
        }
        if self.trials == 0 {
            return Err(Error::NoTrials);
        }
        let r_m = Rate::new(self.r_m)?;
        Ok(ResolvedScenario {
            sigma2_mw,
            p_b_mw,
            p_m_mw,
            params,
            radius_m: self.radius_m,
            n_m: self.n_m,
            n_i: self.n_i()?,
            gamma_m: inv_capacity(r_m),
            decoder: self.decoder,
            trials: self.trials,
            master_seed: self.master_seed,
        })
    }
}

/// Validated scenario in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedScenario {
    pub sigma2_mw: f64,
    pub p_b_mw: f64,
    pub p_m_mw: f64,
    pub params: PathLossParams,
    pub radius_m: f64,
    pub n_m: usize,
    pub n_i: usize,
    pub gamma_m: SnrThreshold,
    pub decoder: DecoderKind,
    pub trials: u64,
    pub master_seed: u64,
}

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

/// Outcome of a single slot realization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub gamma_b: LinSnr,
    pub mtd_snrs: Vec<LinSnr>,
    pub selected_rate: Rate,
    pub decoded: bool,
    pub n_mtds_decoded: usize,
}

/// Independent RNG stream for one trial of one experiment.
pub fn trial_stream(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

/// Run one trial: sample the deployment, compute the per-slot interference
/// realization, select the zero-outage rate from `γ_B` alone and verify
/// decodability with the MAC engine.
pub fn run_trial<R: Rng + ?Sized>(rng: &mut R, cfg: &ScenarioConfig) -> Result<TrialResult> {
    let resolved = cfg.resolve()?;
    Ok(run_resolved_trial(rng, &resolved))
}

fn run_resolved_trial<R: Rng + ?Sized>(rng: &mut R, sc: &ResolvedScenario) -> TrialResult {
    let (scenario, selected) = draw_scenario(rng, sc);
    let decoded = rate_decodable(sc.decoder, &scenario, selected);
    let n_mtds_decoded = decodable_mtd_set(&scenario).len();
    TrialResult {
        gamma_b: scenario.gamma_b(),
        mtd_snrs: scenario.mtd_snrs().to_vec(),
        selected_rate: selected,
        decoded,
        n_mtds_decoded,
    }
}

/// Sample one slot and select the transmitter's rate. Draw order is fixed:
/// downlink node first, then associated MTDs, then interferers.
fn draw_scenario<R: Rng + ?Sized>(rng: &mut R, sc: &ResolvedScenario) -> (MacScenario, Rate) {
    let nodes = 1 + sc.n_m + sc.n_i;
    let deployment = DiskDeployment::sample(rng, sc.radius_m, nodes)
        .expect("validated radius admits sampling");
    let gains = deployment.channel_gains(&sc.params).expect("sampled draws are valid");

    // block-fading slot: the interference realization defines this slot's σ̃²
    let interference: f64 = gains[1 + sc.n_m..].iter().map(|&g| g * sc.p_m_mw).sum();
    let sigma_tilde2 = interference + sc.sigma2_mw;

    let gamma_b = LinSnr::new(gains[0] * sc.p_b_mw / sigma_tilde2).expect("finite SNR");
    let mtd_snrs: Vec<LinSnr> = gains[1..1 + sc.n_m]
        .iter()
        .map(|&g| LinSnr::new(g * sc.p_m_mw / sigma_tilde2).expect("finite SNR"))
        .collect();

    let scenario = MacScenario::new(gamma_b, mtd_snrs, sc.gamma_m)
        .expect("validated MTD count");
    let threshold = zero_outage_snr(sc.decoder, gamma_b, sc.gamma_m, sc.n_m)
        .expect("validated MTD count");
    let selected = capacity(LinSnr::new(threshold.value()).expect("finite threshold"));
    (scenario, selected)
}

fn rate_decodable(decoder: DecoderKind, scenario: &MacScenario, rate: Rate) -> bool {
    match decoder {
        DecoderKind::Jd => downlink_decodable(scenario, rate),
        DecoderKind::Sd => {
            rate.value() <= sd_max_downlink_rate(scenario).value() + DECODABILITY_SLACK
        }
    }
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Sweep variable and its values.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepSpec {
    /// Sweep the fixed MTD rate R_M.
    Rm(Vec<f64>),
    /// Sweep the number of associated MTDs.
    Nm(Vec<usize>),
    /// Sweep the interferer density λ_I.
    LambdaI(Vec<f64>),
}

impl SweepSpec {
    pub fn variable_name(&self) -> &'static str {
        match self {
            SweepSpec::Rm(_) => "r_m",
            SweepSpec::Nm(_) => "n_m",
            SweepSpec::LambdaI(_) => "lambda_i",
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            SweepSpec::Rm(v) => v.is_empty(),
            SweepSpec::Nm(v) => v.is_empty(),
            SweepSpec::LambdaI(v) => v.is_empty(),
        }
    }

    fn apply(&self, index: usize, cfg: &ScenarioConfig) -> (f64, ScenarioConfig) {
        let mut point = cfg.clone();
        match self {
            SweepSpec::Rm(v) => {
                point.r_m = v[index];
                (v[index], point)
            }
            SweepSpec::Nm(v) => {
                point.n_m = v[index];
                (v[index] as f64, point)
            }
            SweepSpec::LambdaI(v) => {
                point.interferers = Interferers::Density(v[index]);
                (v[index], point)
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            SweepSpec::Rm(v) => v.len(),
            SweepSpec::Nm(v) => v.len(),
            SweepSpec::LambdaI(v) => v.len(),
        }
    }
}

/// Aggregates for one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub sweep_value: f64,
    pub mean_rate_sim: f64,
    pub std_err: f64,
    pub mean_rate_analytic: f64,
    pub analytic_kind: MeanRateKind,
    pub outage_rate: f64,
    pub trials: u64,
}

/// One full sweep: per-point simulated aggregates plus the analytic curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub variable: &'static str,
    pub master_seed: u64,
    pub points: Vec<SweepPoint>,
}

/// Run `cfg.trials` trials per sweep value and aggregate.
pub fn run_sweep(cfg: &ScenarioConfig, sweep: &SweepSpec) -> Result<SweepResult> {
    if sweep.is_empty() {
        return Err(Error::EmptySweep);
    }
    let mut points = Vec::with_capacity(sweep.len());
    for index in 0..sweep.len() {
        let (sweep_value, point_cfg) = sweep.apply(index, cfg);
        let sc = point_cfg.resolve()?;

        let outcomes: Vec<(f64, bool)> = (0..sc.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_stream(sc.master_seed, t);
                let trial = run_resolved_trial(&mut rng, &sc);
                (trial.selected_rate.value(), trial.decoded)
            })
            .collect();

        let mean_rate_sim = kahan_mean(outcomes.iter().map(|&(r, _)| r));
        let std_err = standard_error(outcomes.iter().map(|&(r, _)| r), mean_rate_sim);
        let outages = outcomes.iter().filter(|&&(_, decoded)| !decoded).count();
        let analytic = analytic_point(&sc)?;

        points.push(SweepPoint {
            sweep_value,
            mean_rate_sim,
            std_err,
            mean_rate_analytic: analytic.0,
            analytic_kind: analytic.1,
            outage_rate: outages as f64 / sc.trials as f64,
            trials: sc.trials,
        });
    }
    Ok(SweepResult { variable: sweep.variable_name(), master_seed: cfg.master_seed, points })
}

/// Analytic mean-rate curve value for a sweep point, with the expected SNR
/// taken from the closed-form received power and interference variance.
fn analytic_point(sc: &ResolvedScenario) -> Result<(f64, MeanRateKind)> {
    let e_zeta_b = expected_received_power(sc.p_b_mw, &sc.params, sc.radius_m)?;
    let sigma_tilde2 =
        interference_variance(sc.n_i, sc.p_m_mw, &sc.params, sc.radius_m, sc.sigma2_mw)?;
    let e_gamma_b = expected_snr_lower_bound(e_zeta_b, sigma_tilde2)?;
    let has_interference = sc.n_i > 0;
    let result = match sc.decoder {
        DecoderKind::Jd => mean_rate_jd(e_gamma_b, sc.gamma_m, sc.n_m, has_interference)?,
        DecoderKind::Sd if sc.n_m == 1 => {
            mean_rate_sd(e_gamma_b, sc.gamma_m, 1, has_interference)?
        }
        // no positive zero-outage SD rate exists for several MTDs
        DecoderKind::Sd => crate::analysis::MeanRateResult {
            value: Rate::ZERO,
            kind: if has_interference {
                MeanRateKind::Approximation
            } else {
                MeanRateKind::UpperBound
            },
        },
    };
    Ok((result.value.value(), result.kind))
}

// ---------------------------------------------------------------------------
// Outage estimation
// ---------------------------------------------------------------------------

/// Fraction of trials in which the selected rate, inflated by
/// `rate_inflation ≥ 1`, is undecodable. A negative control: at inflation
/// 1.0 the joint decoder must report exactly zero outage.
pub fn estimate_outage(cfg: &ScenarioConfig, rate_inflation: f64) -> Result<f64> {
    if !rate_inflation.is_finite() || rate_inflation < 1.0 {
        return Err(Error::InflationBelowOne(rate_inflation));
    }
    let sc = cfg.resolve()?;
    let undecodable: u64 = (0..sc.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_stream(sc.master_seed, t);
            let (scenario, selected) = draw_scenario(&mut rng, &sc);
            let inflated = Rate::new(selected.value() * rate_inflation).expect("finite rate");
            u64::from(!rate_decodable(sc.decoder, &scenario, inflated))
        })
        .sum();
    Ok(undecodable as f64 / sc.trials as f64)
}

// ---------------------------------------------------------------------------
// Aggregation helpers
// ---------------------------------------------------------------------------

fn kahan_mean(values: impl Iterator<Item = f64> + ExactSizeIterator) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum / n as f64
}

fn standard_error(values: impl Iterator<Item = f64> + ExactSizeIterator, mean: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let d = (v - mean) * (v - mean);
        let y = d - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    (sum / ((n - 1) as f64 * n as f64)).sqrt()
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> ScenarioConfig {
        ScenarioConfig { trials: 2000, master_seed: 42, ..ScenarioConfig::default() }
    }

    #[test]
    fn zero_rate_mtds_select_full_capacity() {
        let cfg = ScenarioConfig { r_m: 0.0, ..quick_cfg() };
        let mut rng = trial_stream(cfg.master_seed, 0);
        let trial = run_trial(&mut rng, &cfg).unwrap();
        let expect = capacity(trial.gamma_b).value();
        assert!((trial.selected_rate.value() - expect).abs() < 1e-12);
        assert!(trial.decoded);
    }

    #[test]
    fn jd_trials_always_decode() {
        for r_m in [0.01, 0.5, 2.0] {
            for n_m in [1, 3] {
                let cfg = ScenarioConfig { r_m, n_m, trials: 500, ..quick_cfg() };
                for t in 0..cfg.trials {
                    let mut rng = trial_stream(cfg.master_seed, t);
                    let trial = run_trial(&mut rng, &cfg).unwrap();
                    assert!(trial.decoded, "JD outage at r_m={r_m}, n_m={n_m}, trial {t}");
                }
            }
        }
    }

    #[test]
    fn trials_are_deterministic() {
        let cfg = ScenarioConfig { n_m: 2, interferers: Interferers::Count(3), ..quick_cfg() };
        for t in [0, 1, 77] {
            let a = run_trial(&mut trial_stream(cfg.master_seed, t), &cfg).unwrap();
            let b = run_trial(&mut trial_stream(cfg.master_seed, t), &cfg).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sd_multi_mtd_selects_zero_and_counts_decoded() {
        let cfg = ScenarioConfig { decoder: DecoderKind::Sd, n_m: 2, ..quick_cfg() };
        let mut rng = trial_stream(7, 3);
        let trial = run_trial(&mut rng, &cfg).unwrap();
        assert_eq!(trial.selected_rate, Rate::ZERO);
        assert!(trial.decoded, "transmitting nothing cannot fail");
    }

    #[test]
    fn sweep_rejects_empty_values() {
        let cfg = quick_cfg();
        assert_eq!(run_sweep(&cfg, &SweepSpec::Rm(vec![])), Err(Error::EmptySweep));
    }

    #[test]
    fn sweep_zero_outage_and_bound() {
        let cfg = ScenarioConfig { trials: 3000, ..quick_cfg() };
        let sweep = SweepSpec::Rm(vec![0.01, 0.5]);
        let result = run_sweep(&cfg, &sweep).unwrap();
        assert_eq!(result.variable, "r_m");
        for p in &result.points {
            assert_eq!(p.outage_rate, 0.0);
            assert_eq!(p.analytic_kind, MeanRateKind::UpperBound);
            assert!(
                p.mean_rate_sim <= p.mean_rate_analytic + 3.0 * p.std_err,
                "simulated mean above analytic bound at r_m={}",
                p.sweep_value
            );
        }
    }

    #[test]
    fn sweep_mean_decreases_with_mtd_count() {
        let cfg = ScenarioConfig { trials: 4000, r_m: 0.5, ..quick_cfg() };
        let result = run_sweep(&cfg, &SweepSpec::Nm(vec![1, 4, 8])).unwrap();
        let means: Vec<f64> = result.points.iter().map(|p| p.mean_rate_sim).collect();
        assert!(means[0] > means[1] && means[1] > means[2], "means {means:?}");
        let analytic: Vec<f64> = result.points.iter().map(|p| p.mean_rate_analytic).collect();
        assert!(analytic[0] > analytic[1] && analytic[1] > analytic[2]);
    }

    #[test]
    fn interference_marks_approximation() {
        let cfg = ScenarioConfig { trials: 200, ..quick_cfg() };
        let result = run_sweep(&cfg, &SweepSpec::LambdaI(vec![1e-4])).unwrap();
        assert_eq!(result.points[0].analytic_kind, MeanRateKind::Approximation);
        // density maps to a node count through the disk area
        let cfg = ScenarioConfig { interferers: Interferers::Density(1e-4), ..quick_cfg() };
        assert_eq!(cfg.n_i().unwrap(), 13);
    }

    #[test]
    fn outage_estimation_controls() {
        let cfg = ScenarioConfig { trials: 3000, ..quick_cfg() };
        assert_eq!(estimate_outage(&cfg, 1.0).unwrap(), 0.0);
        let zero_rate = ScenarioConfig { r_m: 0.0, ..cfg.clone() };
        assert_eq!(estimate_outage(&zero_rate, 1.0).unwrap(), 0.0);
        assert!(estimate_outage(&cfg, 0.99).is_err());
        // inflating the rate breaks the zero-outage guarantee
        let inflated = estimate_outage(&ScenarioConfig { r_m: 1.0, ..cfg }, 1.5).unwrap();
        assert!(inflated > 0.0, "inflated rate should produce outages, got {inflated}");
    }

    #[test]
    fn config_validation_failures() {
        assert!(ScenarioConfig { radius_m: 0.0, ..quick_cfg() }.resolve().is_err());
        assert!(ScenarioConfig { alpha: 1.5, ..quick_cfg() }.resolve().is_err());
        assert!(ScenarioConfig { n_m: 0, ..quick_cfg() }.resolve().is_err());
        assert!(ScenarioConfig { trials: 0, ..quick_cfg() }.resolve().is_err());
        assert!(ScenarioConfig { r_m: -0.1, ..quick_cfg() }.resolve().is_err());
        assert!(ScenarioConfig { sigma2_dbm: f64::NAN, ..quick_cfg() }.resolve().is_err());
        let bad_density =
            ScenarioConfig { interferers: Interferers::Density(-1.0), ..quick_cfg() };
        assert!(bad_density.resolve().is_err());
    }
}
