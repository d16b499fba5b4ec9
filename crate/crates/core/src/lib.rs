//! Power-domain non-orthogonal multiple access (NOMA) toolkit.
//!
//! The crate covers the single-cell mathematics of NOMA:
//!
//! * [`downlink_rates`]: SIC achievable rates and rate-region membership for
//!   superposition-coded downlink transmission.
//! * [`power_allocation`]: closed-form minimum-power allocation under rate
//!   targets, the (trivial) sum-rate maximizer, and two-user region sweeps.
//! * [`beamforming`]: per-cluster NOMA beam design under SINR targets with
//!   zero-forcing across clusters, plus a Monte Carlo power-vs-antennas study.
//! * [`uplink_sic`]: mutual information and chain-rule SIC rates for uplink.
//! * [`random_access`]: ALOHA / NOMA-ALOHA throughput, both analytic and
//!   simulated over a power-frequency resource grid.
//! * [`channel`]: seeded Rayleigh channel generation.
//! * [`cli`]: the `noma` command-line front end.
//!
//! Rates are in bits per channel use (base-2 logarithms). Downlink and uplink
//! noise variance is normalized to one unless a cluster carries its own
//! noise power.

pub mod beamforming;
pub mod channel;
pub mod cli;
pub mod downlink_rates;
mod error;
pub mod power_allocation;
pub mod random_access;
pub mod uplink_sic;

pub use error::{Error, Result};
