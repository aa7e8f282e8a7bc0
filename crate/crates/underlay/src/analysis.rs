//! Analytical mean downlink rate curves.
//!
//! Plugging the expected downlink SNR into the zero-outage formulas gives
//! `C(E[γ_B]/(1+Γ_M)^{N_M})` for joint decoding and
//! `C(E[γ_B]/(1+Γ_M(1+E[γ_B])))` for single-user decoding. Both follow from
//! Jensen's inequality and are genuine upper bounds on the simulated mean
//! only without external interference; with interference the expected SNR
//! itself is a lower bound, so the curves degrade to approximations.

use crate::channel::{capacity, LinSnr, Rate, SnrThreshold};
use crate::error::{Error, Result};
use crate::rates::{jd_zero_outage_snr, sd_zero_outage_snr};

/// Whether an analytic mean-rate value is a proven bound or an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanRateKind {
    UpperBound,
    Approximation,
}

impl MeanRateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeanRateKind::UpperBound => "upper_bound",
            MeanRateKind::Approximation => "approximation",
        }
    }
}

/// Analytic mean downlink rate and its epistemic status.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanRateResult {
    pub value: Rate,
    pub kind: MeanRateKind,
}

fn kind_for(has_interference: bool) -> MeanRateKind {
    if has_interference {
        MeanRateKind::Approximation
    } else {
        MeanRateKind::UpperBound
    }
}

/// Mean downlink rate under joint decoding: `C(E[γ_B]/(1+Γ_M)^{n_m})`.
pub fn mean_rate_jd(
    e_gamma_b: LinSnr,
    gamma_m_threshold: SnrThreshold,
    n_m: usize,
    has_interference: bool,
) -> Result<MeanRateResult> {
    let snr = jd_zero_outage_snr(e_gamma_b, gamma_m_threshold, n_m)?;
    Ok(MeanRateResult {
        value: capacity(LinSnr::new(snr.value())?),
        kind: kind_for(has_interference),
    })
}

/// Mean downlink rate under single-user decoding, defined for one MTD:
/// `C(E[γ_B]/(1+Γ_M(1+E[γ_B])))`.
pub fn mean_rate_sd(
    e_gamma_b: LinSnr,
    gamma_m_threshold: SnrThreshold,
    n_m: usize,
    has_interference: bool,
) -> Result<MeanRateResult> {
    if n_m != 1 {
        return Err(Error::SdMeanRateNeedsSingleMtd { n_m });
    }
    let snr = sd_zero_outage_snr(e_gamma_b, gamma_m_threshold, 1)?;
    Ok(MeanRateResult {
        value: capacity(LinSnr::new(snr.value())?),
        kind: kind_for(has_interference),
    })
}
