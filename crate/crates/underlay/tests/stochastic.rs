//! Statistical validation: sampler distributions, Monte Carlo consistency
//! with the closed forms, bound directions, determinism and outage
//! controls.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use underlay::analysis::{mean_rate_jd, mean_rate_sd};
use underlay::channel::{capacity, inv_capacity, LinSnr, Rate};
use underlay::geometry::{
    channel_power_gain, expected_received_power, expected_snr_lower_bound, interference_variance,
    sample_distance, sample_fading, PathLossParams,
};
use underlay::rates::{sd_zero_outage_snr, zero_outage_snr, DecoderKind};
use underlay::sim::{estimate_outage, run_sweep, Interferers, ScenarioConfig, SweepSpec};
use underlay::verify::{ks_critical_1pct, ks_statistic, simpson};

const RADIUS: f64 = 200.0;
const SIGMA2: f64 = 1.7782794100389227e-10; // −97.5 dBm in mW

fn table1_params() -> PathLossParams {
    PathLossParams::new(1e-3, 4.0).unwrap()
}

/// Downlink SNR draw under Table-I physics without external interference.
fn draw_gamma_b(rng: &mut ChaCha8Rng) -> f64 {
    let params = table1_params();
    let r = sample_distance(rng, RADIUS).unwrap();
    let h = sample_fading(rng);
    1000.0 * channel_power_gain(r, &params, h).unwrap() / SIGMA2
}

// ---------------------------------------------------------------------------
// Sampler distributions
// ---------------------------------------------------------------------------

#[test]
fn distance_sampler_matches_disk_cdf() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD155);
    let n = 100_000;
    let mut samples: Vec<f64> = (0..n).map(|_| sample_distance(&mut rng, RADIUS).unwrap()).collect();
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let d = ks_statistic(&samples, |r| (r / RADIUS) * (r / RADIUS));
    assert!(d < ks_critical_1pct(n), "KS statistic {d} above the 1% critical value");
}

#[test]
fn fading_sampler_has_unit_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFAD);
    let n = 100_000;
    let draws: Vec<f64> = (0..n).map(|_| sample_fading(&mut rng)).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let var = draws.iter().map(|h| (h - mean) * (h - mean)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!((mean - 1.0).abs() <= 3.0 * se, "fading mean {mean} ± {se}");
}

#[test]
fn sampled_received_power_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2EC);
    let params = table1_params();
    let n = 200_000usize;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let r = sample_distance(&mut rng, RADIUS).unwrap();
        let h = sample_fading(&mut rng);
        let zeta = 1000.0 * channel_power_gain(r, &params, h).unwrap();
        sum += zeta;
        sum_sq += zeta * zeta;
    }
    let mean = sum / n as f64;
    let se = ((sum_sq / n as f64 - mean * mean).max(0.0) / n as f64).sqrt();
    let closed = expected_received_power(1000.0, &params, RADIUS).unwrap();
    assert!(
        (mean - closed).abs() <= 3.0 * se,
        "sampled {mean:.4e} ± {se:.4e} vs closed form {closed:.4e}"
    );
}

// ---------------------------------------------------------------------------
// Bound directions
// ---------------------------------------------------------------------------

#[test]
fn jensen_snr_bound_is_a_lower_bound_under_interference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1E35);
    let params = table1_params();
    let n_i = 13usize; // λ_I = 1e-4 over the Table-I disk
    let trials = 100_000usize;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let r = sample_distance(&mut rng, RADIUS).unwrap();
        let h = sample_fading(&mut rng);
        let zeta_b = 1000.0 * channel_power_gain(r, &params, h).unwrap();
        let mut sigma_tilde2 = SIGMA2;
        for _ in 0..n_i {
            let r = sample_distance(&mut rng, RADIUS).unwrap();
            let h = sample_fading(&mut rng);
            sigma_tilde2 += 0.1 * channel_power_gain(r, &params, h).unwrap();
        }
        let gamma = zeta_b / sigma_tilde2;
        sum += gamma;
        sum_sq += gamma * gamma;
    }
    let mc_mean = sum / trials as f64;
    let se = ((sum_sq / trials as f64 - mc_mean * mc_mean).max(0.0) / trials as f64).sqrt();
    let e_zeta = expected_received_power(1000.0, &params, RADIUS).unwrap();
    let sigma_tilde2 = interference_variance(n_i, 0.1, &params, RADIUS, SIGMA2).unwrap();
    let bound = expected_snr_lower_bound(e_zeta, sigma_tilde2).unwrap().value();
    assert!(
        mc_mean >= bound - 3.0 * se,
        "Jensen bound {bound:.4e} above sampled mean {mc_mean:.4e} ± {se:.4e}"
    );
}

#[test]
fn analytic_curves_dominate_simulated_means_without_interference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0B);
    let params = table1_params();
    let e_zeta = expected_received_power(1000.0, &params, RADIUS).unwrap();
    let e_gamma = expected_snr_lower_bound(e_zeta, SIGMA2).unwrap();
    for r_m in [0.001, 0.01, 0.1, 1.0, 2.0] {
        let gamma_m = inv_capacity(Rate::new(r_m).unwrap());
        let trials = 50_000usize;
        let mut jd = (0.0, 0.0);
        let mut sd = (0.0, 0.0);
        for _ in 0..trials {
            let gamma_b = LinSnr::new(draw_gamma_b(&mut rng)).unwrap();
            let r_jd = capacity(
                LinSnr::new(zero_outage_snr(DecoderKind::Jd, gamma_b, gamma_m, 1).unwrap().value())
                    .unwrap(),
            )
            .value();
            let r_sd =
                capacity(LinSnr::new(sd_zero_outage_snr(gamma_b, gamma_m, 1).unwrap().value()).unwrap())
                    .value();
            jd = (jd.0 + r_jd, jd.1 + r_jd * r_jd);
            sd = (sd.0 + r_sd, sd.1 + r_sd * r_sd);
        }
        let check = |label: &str, (sum, sum_sq): (f64, f64), analytic: f64| {
            let mean = sum / trials as f64;
            let se = ((sum_sq / trials as f64 - mean * mean).max(0.0) / trials as f64).sqrt();
            assert!(
                mean <= analytic + 3.0 * se,
                "{label} simulated mean {mean} exceeds analytic bound {analytic} at R_M={r_m}"
            );
        };
        check("JD", jd, mean_rate_jd(e_gamma, gamma_m, 1, false).unwrap().value.value());
        check("SD", sd, mean_rate_sd(e_gamma, gamma_m, 1, false).unwrap().value.value());
    }
}

#[test]
fn sd_double_jensen_ordering_by_quadrature() {
    // C(E[γ]/(1+Γ_M(1+E[γ]))) ≥ E[C(Γ_SD(γ))] for the Table-I γ_B law
    let params = table1_params();
    let scale = 1000.0 * params.k_loss() / SIGMA2;
    let mean_rate = |gamma_m: f64| {
        let inner = |u: f64| {
            simpson(
                |v: f64| {
                    let gamma = scale * v * (1.0 + u).powf(-params.alpha());
                    let snr = gamma / (1.0 + gamma_m * (1.0 + gamma));
                    snr.ln_1p() / std::f64::consts::LN_2 * (-v).exp()
                },
                0.0,
                50.0,
                600,
            )
        };
        let transformed = |t: f64| {
            let u = t.exp_m1();
            inner(u) * 2.0 * u / (RADIUS * RADIUS) * t.exp()
        };
        simpson(transformed, 0.0, RADIUS.ln_1p(), 600)
    };
    let e_zeta = expected_received_power(1000.0, &params, RADIUS).unwrap();
    let e_gamma = expected_snr_lower_bound(e_zeta, SIGMA2).unwrap();
    for r_m in [0.001, 0.01, 0.1, 1.0, 2.0] {
        let gamma_m = inv_capacity(Rate::new(r_m).unwrap());
        let analytic = mean_rate_sd(e_gamma, gamma_m, 1, false).unwrap().value.value();
        let expected_curve = mean_rate(gamma_m.value());
        assert!(
            analytic >= expected_curve - 1e-9,
            "double-Jensen ordering violated at R_M={r_m}: \
             analytic {analytic} < quadrature {expected_curve}"
        );
    }
}

// ---------------------------------------------------------------------------
// Determinism and outage controls
// ---------------------------------------------------------------------------

#[test]
fn sweeps_are_identical_across_worker_counts() {
    let cfg = ScenarioConfig {
        trials: 2000,
        master_seed: 2024,
        n_m: 2,
        interferers: Interferers::Count(5),
        ..ScenarioConfig::default()
    };
    let sweep = SweepSpec::Rm(vec![0.01, 1.0]);
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let quad = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = single.install(|| run_sweep(&cfg, &sweep)).unwrap();
    let b = quad.install(|| run_sweep(&cfg, &sweep)).unwrap();
    assert_eq!(a, b, "results must not depend on the worker count");
}

#[test]
fn zero_outage_holds_for_both_decoders() {
    for decoder in [DecoderKind::Jd, DecoderKind::Sd] {
        for r_m in [0.01, 1.0] {
            let cfg = ScenarioConfig {
                decoder,
                r_m,
                trials: 20_000,
                master_seed: 7,
                ..ScenarioConfig::default()
            };
            let outage = estimate_outage(&cfg, 1.0).unwrap();
            assert_eq!(outage, 0.0, "{decoder:?} outage at R_M={r_m}");
        }
    }
}

#[test]
fn slightly_inflated_rate_breaks_the_guarantee() {
    // γ_1 lands in the violating neighborhood of Γ_M with positive
    // probability, so even a 0.1% inflation must eventually fail
    let cfg = ScenarioConfig {
        r_m: 1.0,
        trials: 400_000,
        master_seed: 11,
        ..ScenarioConfig::default()
    };
    let outage = estimate_outage(&cfg, 1.0 + 1e-3).unwrap();
    assert!(outage > 0.0, "expected positive outage under inflation, got {outage}");
}

#[test]
fn mean_rates_converge_to_the_no_mtd_baseline() {
    let base_cfg =
        ScenarioConfig { trials: 40_000, master_seed: 99, ..ScenarioConfig::default() };
    for decoder in [DecoderKind::Jd, DecoderKind::Sd] {
        let cfg = ScenarioConfig { decoder, ..base_cfg.clone() };
        let sweep = SweepSpec::Rm(vec![0.0, 1e-4, 1e-3, 1e-2]);
        let result = run_sweep(&cfg, &sweep).unwrap();
        let baseline = result.points[0].mean_rate_sim;
        let gaps: Vec<f64> = result.points[1..]
            .iter()
            .map(|p| (baseline - p.mean_rate_sim) / baseline)
            .collect();
        assert!(
            gaps[0] < gaps[1] && gaps[1] < gaps[2],
            "{decoder:?} gaps should shrink as R_M falls: {gaps:?}"
        );
        assert!(gaps[0] >= 0.0, "{decoder:?} mean above baseline");
    }
    // joint decoding is already within 1% of the baseline at R_M = 1e-3
    let jd = run_sweep(&base_cfg, &SweepSpec::Rm(vec![0.0, 1e-3])).unwrap();
    let rel = (jd.points[0].mean_rate_sim - jd.points[1].mean_rate_sim)
        / jd.points[0].mean_rate_sim;
    assert!(rel.abs() <= 0.01, "JD gap at R_M=1e-3 was {rel}");
}
