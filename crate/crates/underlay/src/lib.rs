//! Zero-outage downlink rate selection for a cellular link underlaid with
//! fixed-rate machine-type device-to-device transmissions.
//!
//! A base station transmits to a user while `N_M` machine-type devices,
//! attached to that user, send simultaneously at a common fixed rate. The
//! base station knows only its own link SNR, yet a positive downlink rate
//! exists that the user can always decode: weak interferers are absorbed
//! as noise, strong ones are decoded and cancelled, and the worst case
//! sits exactly at the transition. This crate provides
//!
//! - the capacity algebra and unit conversions ([`channel`]),
//! - a brute-force multiple-access-channel decodability engine ([`mac`]),
//! - the closed-form zero-outage rate selectors and profiles ([`rates`]),
//! - stochastic geometry for disk deployments ([`geometry`]),
//! - analytic mean-rate curves ([`analysis`]),
//! - a deterministic parallel Monte Carlo engine ([`sim`]),
//! - self-check suites pairing each closed form with an independent
//!   oracle ([`verify`]).

pub mod analysis;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod mac;
pub mod rates;
pub mod sim;
pub mod verify;

pub use channel::{capacity, inv_capacity, LinSnr, PowerDbm, Rate, SnrThreshold};
pub use error::{Error, Result};
pub use rates::DecoderKind;
