//! Self-check suites: oracle-equivalence and statistical validation runs
//! behind the `verify` command.
//!
//! Each suite re-derives expected values through an independent route
//! (closed forms against numerical quadrature, formulas against the
//! brute-force MAC engine, samplers against distribution tests) and
//! reports per-check outcomes with a counterexample description on
//! failure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{capacity, LinSnr, SnrThreshold};
use crate::geometry::{
    asymptotic_interference_variance, channel_power_gain, expected_received_power,
    interference_variance, sample_distance, sample_fading, PathLossParams,
};
use crate::mac::{downlink_decodable, max_downlink_rate, sd_max_downlink_rate, worst_case_mtd_snrs,
    MacScenario};
use crate::rates::jd_zero_outage_snr;

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// One verified property.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub label: String,
    pub passed: bool,
    /// Measured quantities; on failure, the counterexample.
    pub detail: String,
}

/// Outcome of one suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(checks: &mut Vec<CheckResult>, label: &str, passed: bool, detail: String) {
    checks.push(CheckResult { label: label.to_string(), passed, detail });
}

// ---------------------------------------------------------------------------
// Numeric helpers (shared oracle machinery)
// ---------------------------------------------------------------------------

/// Composite Simpson rule on `[a, b]` with `n` panels (`n` even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        sum += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// Expected received power by 2-D quadrature of the defining integral
/// `∫∫ K·P·v·(1+u)^{−α} f_h(v) f_R(u) dv du` over fading `v` and
/// distance `u`. Independent of the closed form it checks.
pub fn quadrature_expected_received_power(
    p_tx_mw: f64,
    params: &PathLossParams,
    radius_m: f64,
) -> f64 {
    // truncate the exponential fading tail at v = 50 (mass ~ 1e-20)
    let inner = |u: f64| {
        let pathloss = params.k_loss() * p_tx_mw * (1.0 + u).powf(-params.alpha());
        simpson(|v: f64| pathloss * v * (-v).exp(), 0.0, 50.0, 2000)
    };
    // substitute u = e^t − 1 so the sharp pathloss peak near u = 0 is
    // resolved even for kilometre-scale disks
    let transformed = |t: f64| {
        let u = t.exp_m1();
        inner(u) * 2.0 * u / (radius_m * radius_m) * t.exp()
    };
    simpson(transformed, 0.0, radius_m.ln_1p(), 2000)
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against `cdf`.
/// `samples` must be sorted ascending.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Large-sample KS critical value at 1% significance.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.6276 / (n as f64).sqrt()
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo.log10()..hi.log10()))
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

/// Zero-outage MAC properties against the brute-force engine.
pub fn mac_oracle_suite(seed: u64, scenarios_per_n: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // Zero-outage rate is decodable in every random scenario.
    let mut failures = 0usize;
    let mut example = String::new();
    for n_m in 1..=5usize {
        for _ in 0..scenarios_per_n {
            let gamma_b = LinSnr::new(log_uniform(&mut rng, 1e-3, 1e3)).unwrap();
            let gamma_m = SnrThreshold::new(log_uniform(&mut rng, 1e-2, 10.0)).unwrap();
            let mtds: Vec<LinSnr> = (0..n_m)
                .map(|_| LinSnr::new(log_uniform(&mut rng, 1e-3, 1e3)).unwrap())
                .collect();
            let scenario = MacScenario::new(gamma_b, mtds.clone(), gamma_m).unwrap();
            let rate = capacity(
                LinSnr::new(jd_zero_outage_snr(gamma_b, gamma_m, n_m).unwrap().value()).unwrap(),
            );
            if !downlink_decodable(&scenario, rate) {
                failures += 1;
                if example.is_empty() {
                    example = format!(
                        "counterexample: gamma_b={}, gamma_m={}, mtds={:?}",
                        gamma_b.value(),
                        gamma_m.value(),
                        mtds.iter().map(|g| g.value()).collect::<Vec<_>>()
                    );
                }
            }
        }
    }
    check(
        &mut checks,
        "zero-outage rate decodable in every scenario",
        failures == 0,
        if failures == 0 {
            format!("{} scenarios across N_M=1..5", 5 * scenarios_per_n)
        } else {
            format!("{failures} undecodable scenarios; {example}")
        },
    );

    // Worst-case equal SNRs make the formula tight. Γ_M is drawn from the
    // operating MTD-rate range [1e-3, 2] bits/s/Hz and γ_B from [0.1, 1e3];
    // harsher corners push the construction below f64 input resolution.
    let mut worst_gap = 0.0f64;
    let mut worst_case = String::new();
    for n_m in 1..=8usize {
        for _ in 0..100 {
            let gamma_b = LinSnr::new(log_uniform(&mut rng, 1e-1, 1e3)).unwrap();
            let r_m = log_uniform(&mut rng, 1e-3, 2.0);
            let gamma_m = SnrThreshold::new((r_m * std::f64::consts::LN_2).exp_m1()).unwrap();
            let mtds = worst_case_mtd_snrs(gamma_m, n_m).unwrap();
            let scenario = MacScenario::new(gamma_b, mtds, gamma_m).unwrap();
            let expect = capacity(
                LinSnr::new(jd_zero_outage_snr(gamma_b, gamma_m, n_m).unwrap().value()).unwrap(),
            )
            .value();
            let got = max_downlink_rate(&scenario).value();
            let gap = ((got - expect) / expect.max(f64::MIN_POSITIVE)).abs();
            if gap > worst_gap {
                worst_gap = gap;
                worst_case = format!(
                    "N_M={n_m}, gamma_b={}, gamma_m={}",
                    gamma_b.value(),
                    gamma_m.value()
                );
            }
        }
    }
    check(
        &mut checks,
        "worst-case construction attains the formula",
        worst_gap <= 1e-9,
        format!("max relative gap {worst_gap:.3e} at {worst_case}"),
    );

    // Single-user decoding never beats joint decoding.
    let mut violations = 0usize;
    for _ in 0..scenarios_per_n {
        let n_m = rng.gen_range(1..=5usize);
        let gamma_b = LinSnr::new(log_uniform(&mut rng, 1e-3, 1e3)).unwrap();
        let gamma_m = SnrThreshold::new(log_uniform(&mut rng, 1e-2, 10.0)).unwrap();
        let mtds: Vec<LinSnr> = (0..n_m)
            .map(|_| LinSnr::new(log_uniform(&mut rng, 1e-3, 1e3)).unwrap())
            .collect();
        let scenario = MacScenario::new(gamma_b, mtds, gamma_m).unwrap();
        let sd = sd_max_downlink_rate(&scenario).value();
        let jd = max_downlink_rate(&scenario).value();
        if sd > jd + 1e-12 {
            violations += 1;
        }
    }
    check(
        &mut checks,
        "SIC rate never exceeds the joint-decoding rate",
        violations == 0,
        format!("{violations} violations over {scenarios_per_n} scenarios"),
    );

    SuiteReport { name: "mac-oracle", checks }
}

/// Closed-form moments against numerical quadrature.
pub fn closed_form_suite() -> SuiteReport {
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    let mut at = String::new();
    for alpha in [2.5, 3.0, 4.0, 6.0] {
        for radius in [10.0, 200.0, 1000.0] {
            let params = PathLossParams::new(1e-3, alpha).unwrap();
            let closed = expected_received_power(100.0, &params, radius).unwrap();
            let quad = quadrature_expected_received_power(100.0, &params, radius);
            let gap = ((closed - quad) / quad).abs();
            if gap > worst {
                worst = gap;
                at = format!("alpha={alpha}, R={radius}");
            }
        }
    }
    check(
        &mut checks,
        "expected received power matches quadrature",
        worst <= 1e-6,
        format!("max relative gap {worst:.3e} at {at}"),
    );

    // Asymptotic interference variance close to the finite-disk value.
    let params = PathLossParams::new(1e-3, 4.0).unwrap();
    let sigma2 = 10f64.powf(-9.75);
    let radius = 200.0;
    let area = std::f64::consts::PI * radius * radius;
    let mut worst = 0.0f64;
    let mut at = String::new();
    for exp in 0..=20 {
        let lambda = 10f64.powf(-4.0 + 2.0 * exp as f64 / 20.0);
        let n_i = (lambda * area).round() as usize;
        let lambda_snapped = n_i as f64 / area;
        let finite = interference_variance(n_i, 0.1, &params, radius, sigma2).unwrap();
        let asymptotic =
            asymptotic_interference_variance(lambda_snapped, 0.1, &params, sigma2).unwrap();
        let gap = ((asymptotic - finite) / finite).abs();
        if gap > worst {
            worst = gap;
            at = format!("lambda={lambda_snapped:.3e} (N_I={n_i})");
        }
    }
    check(
        &mut checks,
        "asymptotic interference variance within 5% of finite disk",
        worst <= 0.05,
        format!("max relative gap {worst:.3e} at {at}"),
    );

    SuiteReport { name: "closed-form", checks }
}

/// Distribution tests for the geometric samplers.
pub fn geometry_suite(seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let radius = 200.0;
    let n = 100_000usize;

    let mut distances: Vec<f64> =
        (0..n).map(|_| sample_distance(&mut rng, radius).unwrap()).collect();
    distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let d = ks_statistic(&distances, |r| (r / radius) * (r / radius));
    let critical = ks_critical_1pct(n);
    check(
        &mut checks,
        "distance sampler matches the disk distribution (KS, 1%)",
        d < critical,
        format!("KS statistic {d:.5} vs critical {critical:.5}"),
    );

    let fadings: Vec<f64> = (0..n).map(|_| sample_fading(&mut rng)).collect();
    let mean = fadings.iter().sum::<f64>() / n as f64;
    let var = fadings.iter().map(|h| (h - mean) * (h - mean)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    check(
        &mut checks,
        "fading draws have unit mean (3 standard errors)",
        (mean - 1.0).abs() <= 3.0 * se,
        format!("sample mean {mean:.5} ± {se:.5}"),
    );

    // Monte Carlo received power against the closed form.
    let params = PathLossParams::new(1e-3, 4.0).unwrap();
    let p_tx = 1000.0;
    let trials = 1_000_000usize;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let r = sample_distance(&mut rng, radius).unwrap();
        let h = sample_fading(&mut rng);
        let zeta = p_tx * channel_power_gain(r, &params, h).unwrap();
        sum += zeta;
        sum_sq += zeta * zeta;
    }
    let mc_mean = sum / trials as f64;
    let mc_var = (sum_sq / trials as f64 - mc_mean * mc_mean).max(0.0);
    let mc_se = (mc_var / trials as f64).sqrt();
    let closed = expected_received_power(p_tx, &params, radius).unwrap();
    check(
        &mut checks,
        "Monte Carlo received power matches the closed form (3 standard errors)",
        (mc_mean - closed).abs() <= 3.0 * mc_se,
        format!("sampled {mc_mean:.5e} ± {mc_se:.2e}, closed form {closed:.5e}"),
    );

    SuiteReport { name: "geometry", checks }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
