//! Scalar channel algebra: Shannon capacity, SNR/rate thresholds and
//! dB/linear unit conversions shared by all other modules.
//!
//! All internal computation is carried out in linear units (mW, linear
//! SNR); dBm and dB appear only at configuration boundaries.

use std::f64::consts::LN_2;
use std::fmt;

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Domain newtypes
// ---------------------------------------------------------------------------

/// Linear (dimensionless) signal-to-noise power ratio. Nonnegative, finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LinSnr(f64);

impl LinSnr {
    pub const ZERO: LinSnr = LinSnr(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite { name: "linear SNR", value });
        }
        if value < 0.0 {
            return Err(Error::Negative { name: "linear SNR", value });
        }
        Ok(LinSnr(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for LinSnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Spectral efficiency in bits/s/Hz (bandwidth normalized to 1 Hz).
/// Nonnegative, finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Rate(f64);

impl Rate {
    pub const ZERO: Rate = Rate(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite { name: "rate", value });
        }
        if value < 0.0 {
            return Err(Error::Negative { name: "rate", value });
        }
        Ok(Rate(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Transmit or noise power in dBm. Finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerDbm(f64);

impl PowerDbm {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite { name: "power [dBm]", value });
        }
        Ok(PowerDbm(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Minimal required linear SNR for decoding at a given rate.
///
/// Nonnegative; may be infinite for astronomically large rates, so only
/// NaN is rejected.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SnrThreshold(f64);

impl SnrThreshold {
    pub const ZERO: SnrThreshold = SnrThreshold(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::NonFinite { name: "SNR threshold", value });
        }
        if value < 0.0 {
            return Err(Error::Negative { name: "SNR threshold", value });
        }
        Ok(SnrThreshold(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

// ---------------------------------------------------------------------------
// Capacity functions
// ---------------------------------------------------------------------------

/// Shannon capacity C(γ) = log2(1 + γ) in bits/s/Hz.
///
/// Strictly increasing and concave; `capacity(0) = 0`.
pub fn capacity(gamma: LinSnr) -> Rate {
    // ln_1p keeps full precision for small γ.
    Rate(gamma.value().ln_1p() / LN_2)
}

/// Inverse capacity C⁻¹(R) = 2^R − 1: the minimal linear SNR that
/// supports rate `rate` in absence of interference.
pub fn inv_capacity(rate: Rate) -> SnrThreshold {
    // exp_m1 keeps full precision for small rates; the result may
    // overflow to +inf for rates beyond what f64 can represent.
    SnrThreshold((rate.value() * LN_2).exp_m1())
}

// ---------------------------------------------------------------------------
// Unit conversions
// ---------------------------------------------------------------------------

/// dBm to milliwatts: 10^(p/10).
pub fn dbm_to_mw(p: PowerDbm) -> f64 {
    10f64.powf(p.value() / 10.0)
}

/// Milliwatts to dBm. The input must be strictly positive.
pub fn mw_to_dbm(mw: f64) -> Result<PowerDbm> {
    if !mw.is_finite() {
        return Err(Error::NonFinite { name: "power [mW]", value: mw });
    }
    if mw <= 0.0 {
        return Err(Error::NonPositive { name: "power [mW]", value: mw });
    }
    PowerDbm::new(10.0 * mw.log10())
}

/// dB to a linear power ratio: 10^(x/10).
pub fn db_to_linear(db: f64) -> Result<f64> {
    if !db.is_finite() {
        return Err(Error::NonFinite { name: "gain [dB]", value: db });
    }
    Ok(10f64.powf(db / 10.0))
}

/// Linear power ratio to dB. The input must be strictly positive.
pub fn linear_to_db(linear: f64) -> Result<f64> {
    if !linear.is_finite() {
        return Err(Error::NonFinite { name: "linear gain", value: linear });
    }
    if linear <= 0.0 {
        return Err(Error::NonPositive { name: "linear gain", value: linear });
    }
    Ok(10.0 * linear.log10())
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
