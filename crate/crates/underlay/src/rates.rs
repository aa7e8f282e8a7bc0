//! Closed-form zero-outage rate selectors and the single-interferer
//! rate-versus-interference profiles behind them.
//!
//! The transmitter knows its own link SNR `γ_B` and the fixed MTD rate
//! threshold `Γ_M` but nothing about the interfering SNRs. Under joint
//! decoding the largest always-decodable downlink SNR is
//! `γ_B / (1 + Γ_M)^{N_M}`; under single-user decoding with cancellation it
//! is `γ_B / (1 + Γ_M(1 + γ_B))` for one MTD and zero for more than one.

use crate::channel::{capacity, LinSnr, Rate, SnrThreshold};
use crate::error::{Error, Result};

/// Receiver architecture used to decode the composite signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    /// Joint decoding over the full MAC region.
    Jd,
    /// Successive single-user decoding with interference cancellation.
    Sd,
}

impl DecoderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DecoderKind::Jd => "jd",
            DecoderKind::Sd => "sd",
        }
    }
}

impl std::fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

// ---------------------------------------------------------------------------
// Zero-outage SNR selection
// ---------------------------------------------------------------------------

/// Zero-outage downlink SNR under joint decoding with `n_m` MTDs:
/// `γ_B / (1 + Γ_M)^{n_m}`.
pub fn jd_zero_outage_snr(
    gamma_b: LinSnr,
    gamma_m_threshold: SnrThreshold,
    n_m: usize,
) -> Result<SnrThreshold> {
    if n_m == 0 {
        return Err(Error::MtdCountOutOfRange { count: 0, max: crate::mac::MAX_MTDS });
    }
    let mut denom = 1.0;
    for _ in 0..n_m {
        denom *= 1.0 + gamma_m_threshold.value();
    }
    SnrThreshold::new(gamma_b.value() / denom)
}

/// Zero-outage downlink SNR under single-user decoding:
/// `γ_B / (1 + Γ_M(1 + γ_B))` for one MTD, exactly zero otherwise.
pub fn sd_zero_outage_snr(
    gamma_b: LinSnr,
    gamma_m_threshold: SnrThreshold,
    n_m: usize,
) -> Result<SnrThreshold> {
    if n_m == 0 {
        return Err(Error::MtdCountOutOfRange { count: 0, max: crate::mac::MAX_MTDS });
    }
    if n_m > 1 {
        return Ok(SnrThreshold::ZERO);
    }
    let gb = gamma_b.value();
    SnrThreshold::new(gb / (1.0 + gamma_m_threshold.value() * (1.0 + gb)))
}

/// Zero-outage SNR for either decoder.
pub fn zero_outage_snr(
    decoder: DecoderKind,
    gamma_b: LinSnr,
    gamma_m_threshold: SnrThreshold,
    n_m: usize,
) -> Result<SnrThreshold> {
    match decoder {
        DecoderKind::Jd => jd_zero_outage_snr(gamma_b, gamma_m_threshold, n_m),
        DecoderKind::Sd => sd_zero_outage_snr(gamma_b, gamma_m_threshold, n_m),
    }
}

// ---------------------------------------------------------------------------
// Rate-versus-interference profiles (single MTD)
// ---------------------------------------------------------------------------

/// Regime boundaries of the single-interferer profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileBreakpoints {
    /// Joint decoding: noise regime below `tau1 = Γ_M`, joint regime up to
    /// `tau2 = Γ_M(1 + γ_B)`, full cancellation beyond.
    Jd { tau1: SnrThreshold, tau2: SnrThreshold },
    /// Single-user decoding: noise regime below `phi1 = Γ_M(1 + γ_B)`,
    /// cancellation at and above it.
    Sd { phi1: SnrThreshold },
}

/// Maximal downlink rate as a function of the single interferer SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct RateProfile {
    pub gamma_1_grid: Vec<LinSnr>,
    pub rates: Vec<Rate>,
    pub breakpoints: ProfileBreakpoints,
}

/// Piecewise profile value at one interferer SNR `γ_1`.
///
/// JD: `C(γ_B/(1+γ_1))` below `Γ_M`, then
/// `max{C(γ_B/(1+γ_1)), min{C(γ_B), C(γ_1+γ_B) − C(Γ_M)}}`.
/// SD: `C(γ_B/(1+γ_1))` below `Γ_M(1+γ_B)`, then `C(γ_B)`; the boundary
/// itself takes the cancelled value, so the profile is the achievable
/// upper envelope of the supremum construction.
pub fn profile_rate(
    decoder: DecoderKind,
    gamma_b: LinSnr,
    gamma_m_threshold: SnrThreshold,
    gamma_1: LinSnr,
) -> Rate {
    let gb = gamma_b.value();
    let gm = gamma_m_threshold.value();
    let g1 = gamma_1.value();
    let noise_branch = || capacity(LinSnr::new(gb / (1.0 + g1)).expect("valid SNR"));
    match decoder {
        DecoderKind::Jd => {
            if g1 < gm {
                noise_branch()
            } else {
                let joint = (capacity(LinSnr::new(gb).expect("valid SNR")).value())
                    .min(capacity(LinSnr::new(g1 + gb).expect("valid SNR")).value() - gm.ln_1p() / std::f64::consts::LN_2);
                Rate::new(noise_branch().value().max(joint).max(0.0)).expect("finite rate")
            }
        }
        DecoderKind::Sd => {
            // same boundary slack as the SIC chain, so both routes agree
            // bit-for-bit at the cancellation threshold
            if g1 >= gm * (1.0 + gb) * (1.0 - crate::mac::FEASIBILITY_SLACK) {
                capacity(LinSnr::new(gb).expect("valid SNR"))
            } else {
                noise_branch()
            }
        }
    }
}

/// Evaluate the piecewise profile on an ascending grid of interferer SNRs.
pub fn rate_profile(
    decoder: DecoderKind,
    gamma_b: LinSnr,
    gamma_m_threshold: SnrThreshold,
    grid: &[LinSnr],
) -> Result<RateProfile> {
    if grid.windows(2).any(|w| w[1].value() < w[0].value()) {
        return Err(Error::UnsortedGrid);
    }
    let rates = grid
        .iter()
        .map(|&g1| profile_rate(decoder, gamma_b, gamma_m_threshold, g1))
        .collect();
    let gm = gamma_m_threshold.value();
    let phi = SnrThreshold::new(gm * (1.0 + gamma_b.value()))?;
    let breakpoints = match decoder {
        DecoderKind::Jd => ProfileBreakpoints::Jd { tau1: gamma_m_threshold, tau2: phi },
        DecoderKind::Sd => ProfileBreakpoints::Sd { phi1: phi },
    };
    Ok(RateProfile { gamma_1_grid: grid.to_vec(), rates, breakpoints })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
