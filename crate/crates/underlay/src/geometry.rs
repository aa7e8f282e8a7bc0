//! Stochastic-geometry layer: node placement on a disk, bounded pathloss
//! with Rayleigh fading, closed-form expected received power, aggregate
//! interference variance and the Jensen SNR lower bound.
//!
//! All nodes are deployed uniformly and isotropically on a disk of radius
//! `R` with the receiver at the origin, so only radial distances matter.
//! The channel power gain is the bounded model `h·K·(1 + r)^{−α}` with
//! unit-mean exponential fading `h`, which keeps every SNR moment finite.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::channel::LinSnr;
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Parameters and deployments
// ---------------------------------------------------------------------------

/// Bounded pathloss parameters: linear gain constant and exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    k_loss: f64,
    alpha: f64,
}

impl PathLossParams {
    /// `k_loss` is the linear gain (from K dB); `alpha` must exceed 2 for
    /// the closed-form moments to exist.
    pub fn new(k_loss: f64, alpha: f64) -> Result<Self> {
        if !k_loss.is_finite() {
            return Err(Error::NonFinite { name: "pathloss gain K", value: k_loss });
        }
        if k_loss <= 0.0 {
            return Err(Error::NonPositive { name: "pathloss gain K", value: k_loss });
        }
        if !alpha.is_finite() {
            return Err(Error::NonFinite { name: "pathloss exponent", value: alpha });
        }
        if alpha <= 2.0 {
            return Err(Error::AlphaNotAboveTwo { alpha });
        }
        Ok(PathLossParams { k_loss, alpha })
    }

    pub fn k_loss(self) -> f64 {
        self.k_loss
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }
}

/// Distances and fading draws for one set of nodes on the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskDeployment {
    pub radius_m: f64,
    pub distances: Vec<f64>,
    pub fadings: Vec<f64>,
}

impl DiskDeployment {
    /// Sample `n_nodes` independent (distance, fading) pairs.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, radius_m: f64, n_nodes: usize) -> Result<Self> {
        let mut distances = Vec::with_capacity(n_nodes);
        let mut fadings = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            distances.push(sample_distance(rng, radius_m)?);
            fadings.push(sample_fading(rng));
        }
        Ok(DiskDeployment { radius_m, distances, fadings })
    }

    /// Channel power gain `h·K·(1 + r)^{−α}` per node.
    pub fn channel_gains(&self, params: &PathLossParams) -> Result<Vec<f64>> {
        self.distances
            .iter()
            .zip(&self.fadings)
            .map(|(&r, &h)| channel_power_gain(r, params, h))
            .collect()
    }
}

/// Aggregate interference description for a disk deployment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceField {
    /// Number of non-associated interfering MTDs.
    pub n_i: usize,
    /// Interferer density λ_I = N_I / (πR²) per m².
    pub lambda_i: f64,
    /// Thermal noise power σ² in mW.
    pub sigma2_mw: f64,
    /// Expected total noise-plus-interference power σ̃² in mW.
    pub total_variance_mw: f64,
}

impl InterferenceField {
    pub fn for_disk(
        n_i: usize,
        p_m_mw: f64,
        params: &PathLossParams,
        radius_m: f64,
        sigma2_mw: f64,
    ) -> Result<Self> {
        let total_variance_mw = interference_variance(n_i, p_m_mw, params, radius_m, sigma2_mw)?;
        Ok(InterferenceField {
            n_i,
            lambda_i: n_i as f64 / (std::f64::consts::PI * radius_m * radius_m),
            sigma2_mw,
            total_variance_mw,
        })
    }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// Inverse-CDF of the disk distance distribution: `r = R·√u`.
///
/// Uniform isotropic placement makes the distance pdf `f_R(r) = 2r/R²`
/// with cdf `r²/R²`.
pub fn distance_from_unit(u: f64, radius_m: f64) -> Result<f64> {
    if !(radius_m.is_finite() && radius_m > 0.0) {
        return Err(Error::NonPositive { name: "disk radius", value: radius_m });
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Negative { name: "unit sample", value: u });
    }
    Ok(radius_m * u.sqrt())
}

/// Sample a node distance from the disk distribution.
pub fn sample_distance<R: Rng + ?Sized>(rng: &mut R, radius_m: f64) -> Result<f64> {
    distance_from_unit(rng.gen::<f64>(), radius_m)
}

/// Sample a unit-mean exponential fading power draw.
pub fn sample_fading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Bounded channel power gain `h·K·(1 + r)^{−α}`, finite at `r = 0`.
pub fn channel_power_gain(r: f64, params: &PathLossParams, h: f64) -> Result<f64> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Negative { name: "distance", value: r });
    }
    if !h.is_finite() || h < 0.0 {
        return Err(Error::Negative { name: "fading draw", value: h });
    }
    Ok(h * params.k_loss * (1.0 + r).powf(-params.alpha))
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// Expected received power E[ζ] of a transmitter at power `p_tx_mw`
/// deployed uniformly on the disk:
///
/// ```text
/// E[ζ] = −2KP(Rα + R²α − (R+1)^α − R² + 1) / (R²(R+1)^α(α² − 3α + 2))
/// ```
pub fn expected_received_power(
    p_tx_mw: f64,
    params: &PathLossParams,
    radius_m: f64,
) -> Result<f64> {
    if !(radius_m.is_finite() && radius_m > 0.0) {
        return Err(Error::NonPositive { name: "disk radius", value: radius_m });
    }
    if !p_tx_mw.is_finite() || p_tx_mw < 0.0 {
        return Err(Error::Negative { name: "transmit power [mW]", value: p_tx_mw });
    }
    let a = params.alpha;
    let r = radius_m;
    let edge = (r + 1.0).powf(a);
    let numerator = -2.0 * params.k_loss * p_tx_mw * (r * a + r * r * a - edge - r * r + 1.0);
    let denominator = r * r * edge * (a * a - 3.0 * a + 2.0);
    Ok(numerator / denominator)
}

/// Total noise-plus-interference variance for `n_i` uniformly deployed
/// interferers: `N_I · E[ζ_M] + σ²`.
pub fn interference_variance(
    n_i: usize,
    p_m_mw: f64,
    params: &PathLossParams,
    radius_m: f64,
    sigma2_mw: f64,
) -> Result<f64> {
    if !sigma2_mw.is_finite() || sigma2_mw < 0.0 {
        return Err(Error::Negative { name: "noise power [mW]", value: sigma2_mw });
    }
    Ok(n_i as f64 * expected_received_power(p_m_mw, params, radius_m)? + sigma2_mw)
}

/// Large-network limit of the interference variance at constant density:
/// `2πKP_Mλ_I / (α² − 3α + 2) + σ²`.
pub fn asymptotic_interference_variance(
    lambda_i: f64,
    p_m_mw: f64,
    params: &PathLossParams,
    sigma2_mw: f64,
) -> Result<f64> {
    if !lambda_i.is_finite() || lambda_i < 0.0 {
        return Err(Error::Negative { name: "interferer density", value: lambda_i });
    }
    if !p_m_mw.is_finite() || p_m_mw < 0.0 {
        return Err(Error::Negative { name: "transmit power [mW]", value: p_m_mw });
    }
    if !sigma2_mw.is_finite() || sigma2_mw < 0.0 {
        return Err(Error::Negative { name: "noise power [mW]", value: sigma2_mw });
    }
    let a = params.alpha;
    let interference =
        2.0 * std::f64::consts::PI * params.k_loss * p_m_mw * lambda_i / (a * a - 3.0 * a + 2.0);
    Ok(interference + sigma2_mw)
}

/// Jensen lower bound on the expected SNR: `E[ζ_x] / σ̃²`.
///
/// Exact when there is no interference, a lower bound otherwise.
pub fn expected_snr_lower_bound(e_zeta_mw: f64, sigma_tilde2_mw: f64) -> Result<LinSnr> {
    if !e_zeta_mw.is_finite() || e_zeta_mw < 0.0 {
        return Err(Error::Negative { name: "expected received power [mW]", value: e_zeta_mw });
    }
    if !sigma_tilde2_mw.is_finite() || sigma_tilde2_mw <= 0.0 {
        return Err(Error::NonPositive {
            name: "noise-plus-interference power [mW]",
            value: sigma_tilde2_mw,
        });
    }
    LinSnr::new(e_zeta_mw / sigma_tilde2_mw)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table1_params() -> PathLossParams {
        PathLossParams::new(1e-3, 4.0).unwrap()
    }

    #[test]
    fn params_reject_invalid() {
        assert!(PathLossParams::new(0.0, 4.0).is_err());
        assert!(PathLossParams::new(-1.0, 4.0).is_err());
        assert!(PathLossParams::new(1e-3, 2.0).is_err());
        assert!(PathLossParams::new(1e-3, f64::NAN).is_err());
    }

    #[test]
    fn distance_inverse_cdf_points() {
        assert_eq!(distance_from_unit(0.0, 200.0).unwrap(), 0.0);
        assert!((distance_from_unit(0.25, 200.0).unwrap() - 100.0).abs() < 1e-12);
        let near_edge = distance_from_unit(1.0 - 1e-12, 200.0).unwrap();
        assert!(near_edge < 200.0 && near_edge > 199.9999);
        assert!(distance_from_unit(0.5, 0.0).is_err());
        assert!(distance_from_unit(-0.1, 200.0).is_err());
    }

    #[test]
    fn power_gain_points() {
        let p = PathLossParams::new(0.001, 4.0).unwrap();
        assert!((channel_power_gain(0.0, &p, 1.0).unwrap() - 0.001).abs() < 1e-18);
        assert!((channel_power_gain(1.0, &p, 1.0).unwrap() - 6.25e-5).abs() < 1e-18);
        let p = PathLossParams::new(1.0, 2.5).unwrap();
        let got = channel_power_gain(9.0, &p, 2.0).unwrap();
        assert!((got - 2.0 * 10f64.powf(-2.5)).abs() < 1e-15);
        assert!(channel_power_gain(-1.0, &p, 1.0).is_err());
        assert!(channel_power_gain(1.0, &p, -1.0).is_err());
    }

    #[test]
    fn expected_power_table1_value() {
        // hand-checked against the defining integral: 8.3327e-6 mW for the
        // downlink transmitter at Table-I settings
        let got = expected_received_power(1000.0, &table1_params(), 200.0).unwrap();
        assert!(
            (got - 8.33274e-6).abs() < 1e-10,
            "expected about 8.3327e-6 mW, got {got}"
        );
    }

    #[test]
    fn expected_power_linear_in_p() {
        let params = table1_params();
        let base = expected_received_power(10.0, &params, 200.0).unwrap();
        let double = expected_received_power(20.0, &params, 200.0).unwrap();
        assert!((double - 2.0 * base).abs() <= 1e-15 * double.abs());
        assert_eq!(expected_received_power(0.0, &params, 200.0).unwrap(), 0.0);
        assert!(expected_received_power(10.0, &params, -5.0).is_err());
    }

    #[test]
    fn expected_power_positive_over_grid() {
        for alpha in [2.5, 3.0, 4.0, 6.0] {
            for radius in [10.0, 200.0, 1000.0] {
                let p = PathLossParams::new(1e-3, alpha).unwrap();
                let v = expected_received_power(100.0, &p, radius).unwrap();
                assert!(v > 0.0, "E[ζ] must be positive at α={alpha}, R={radius}");
            }
        }
    }

    #[test]
    fn interference_variance_composition() {
        let params = table1_params();
        let sigma2 = 10f64.powf(-9.75);
        let none = interference_variance(0, 0.1, &params, 200.0, sigma2).unwrap();
        assert_eq!(none, sigma2);
        let one = interference_variance(1, 0.1, &params, 200.0, sigma2).unwrap();
        let ten = interference_variance(10, 0.1, &params, 200.0, sigma2).unwrap();
        let e_zeta = expected_received_power(0.1, &params, 200.0).unwrap();
        assert!((ten - (10.0 * e_zeta + sigma2)).abs() < 1e-24);
        assert!(((ten - sigma2) - 10.0 * (one - sigma2)).abs() < 1e-24);
    }

    #[test]
    fn asymptotic_variance_points() {
        let params = table1_params();
        let sigma2 = 10f64.powf(-9.75);
        let v = asymptotic_interference_variance(0.0, 0.1, &params, sigma2).unwrap();
        assert_eq!(v, sigma2);
        let v = asymptotic_interference_variance(1e-3, 0.1, &params, sigma2).unwrap();
        let expect = 2.0 * std::f64::consts::PI * 1e-4 * 1e-3 / 6.0 + sigma2;
        assert!((v - expect).abs() < 1e-20);
    }

    #[test]
    fn jensen_bound_points() {
        assert!((expected_snr_lower_bound(1.0, 1.0).unwrap().value() - 1.0).abs() < 1e-15);
        assert_eq!(expected_snr_lower_bound(0.0, 1e-10).unwrap().value(), 0.0);
        assert!(expected_snr_lower_bound(1.0, 0.0).is_err());
        assert!(expected_snr_lower_bound(-1.0, 1.0).is_err());
    }

    #[test]
    fn deployment_sampling_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let dep = DiskDeployment::sample(&mut rng, 200.0, 1000).unwrap();
        assert_eq!(dep.distances.len(), 1000);
        assert!(dep.distances.iter().all(|&r| (0.0..200.0).contains(&r)));
        assert!(dep.fadings.iter().all(|&h| h >= 0.0));
        let gains = dep.channel_gains(&table1_params()).unwrap();
        assert!(gains.iter().all(|&g| g >= 0.0 && g.is_finite()));
    }

    #[test]
    fn interference_field_density() {
        let params = table1_params();
        let field = InterferenceField::for_disk(126, 0.1, &params, 200.0, 1e-10).unwrap();
        let area = std::f64::consts::PI * 200.0 * 200.0;
        assert!((field.lambda_i - 126.0 / area).abs() < 1e-18);
        assert!(field.total_variance_mw >= field.sigma2_mw);
    }
}
