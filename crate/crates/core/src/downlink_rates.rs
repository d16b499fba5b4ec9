//! Downlink SIC achievable rates and rate-region membership.
//!
//! Users are indexed `1..=K` in the public API and ordered by nonincreasing
//! channel gain, so user 1 is the strongest. With superposition coding, user
//! `k` decodes and strips the signals of the weaker users `K, K-1, ..., k+1`
//! before decoding its own; the signals of stronger users `1..l-1` remain as
//! interference while decoding the signal of user `l`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Channel gains, power allocation and (optionally) transmission rates.
///
/// Gains are `α_k = |h_k|²` with unit noise variance, sorted nonincreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScenario", into = "RawScenario")]
pub struct DownlinkScenario {
    gains: Vec<f64>,
    powers: Vec<f64>,
    rates: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawScenario {
    gains: Vec<f64>,
    powers: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rates: Option<Vec<f64>>,
}

impl TryFrom<RawScenario> for DownlinkScenario {
    type Error = Error;

    fn try_from(raw: RawScenario) -> Result<Self> {
        Self::new(raw.gains, raw.powers, raw.rates)
    }
}

impl From<DownlinkScenario> for RawScenario {
    fn from(s: DownlinkScenario) -> Self {
        RawScenario {
            gains: s.gains,
            powers: s.powers,
            rates: s.rates,
        }
    }
}

/// Checks that gains are finite, positive and sorted nonincreasing.
pub(crate) fn validate_sorted_gains(gains: &[f64]) -> Result<()> {
    if gains.is_empty() {
        return invalid("at least one user is required");
    }
    if gains.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return invalid("channel gains must be finite and positive");
    }
    if gains.windows(2).any(|w| w[0] < w[1]) {
        return invalid("channel gains must be sorted nonincreasing");
    }
    Ok(())
}

fn validate_nonnegative(name: &str, values: &[f64]) -> Result<()> {
    if values.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
        return invalid(format!("{name} must be finite and nonnegative"));
    }
    Ok(())
}

/// `log2(1 + α P_l / (α I + 1))` where `I` is the interfering power.
pub(crate) fn sic_rate(gain: f64, power: f64, interference: f64) -> f64 {
    (gain * power / (gain * interference + 1.0)).ln_1p() / std::f64::consts::LN_2
}

impl DownlinkScenario {
    pub fn new(gains: Vec<f64>, powers: Vec<f64>, rates: Option<Vec<f64>>) -> Result<Self> {
        validate_sorted_gains(&gains)?;
        if powers.len() != gains.len() {
            return invalid(format!(
                "{} powers given for {} users",
                powers.len(),
                gains.len()
            ));
        }
        validate_nonnegative("powers", &powers)?;
        if let Some(r) = &rates {
            if r.len() != gains.len() {
                return invalid(format!("{} rates given for {} users", r.len(), gains.len()));
            }
            validate_nonnegative("rates", r)?;
        }
        Ok(Self {
            gains,
            powers,
            rates,
        })
    }

    pub fn users(&self) -> usize {
        self.gains.len()
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn rates(&self) -> Option<&[f64]> {
        self.rates.as_deref()
    }

    pub fn with_rates(mut self, rates: Vec<f64>) -> Result<Self> {
        self.rates = Some(rates);
        Self::new(self.gains, self.powers, self.rates)
    }

    /// `C_{l;k}`: rate at which user `k` can decode the signal intended for
    /// user `l` (1-based, `k ≤ l`) while users `1..l-1` interfere.
    pub fn achievable_rate(&self, l: usize, k: usize) -> Result<f64> {
        let users = self.users();
        for idx in [l, k] {
            if idx == 0 || idx > users {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    len: users,
                });
            }
        }
        if k > l {
            return invalid(format!(
                "user {k} cannot decode the signal of stronger user {l}"
            ));
        }
        let interference: f64 = self.powers[..l - 1].iter().sum();
        Ok(sic_rate(self.gains[k - 1], self.powers[l - 1], interference))
    }

    /// `C_{l;l}` for every user, in order.
    pub fn own_rates(&self) -> Vec<f64> {
        let mut interference = 0.0;
        self.gains
            .iter()
            .zip(&self.powers)
            .map(|(&a, &p)| {
                let c = sic_rate(a, p, interference);
                interference += p;
                c
            })
            .collect()
    }

    fn required_rates(&self) -> Result<&[f64]> {
        self.rates
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("scenario has no rates".into()))
    }

    /// Full region test: `R_l < C_{l;k}` for every `k` and every `l ≥ k`.
    pub fn in_rate_region(&self) -> Result<bool> {
        self.in_rate_region_with_tolerance(0.0)
    }

    /// As [`in_rate_region`](Self::in_rate_region), accepting `R_l < C_{l;k} + tol`.
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN rates must fail
    pub fn in_rate_region_with_tolerance(&self, tol: f64) -> Result<bool> {
        let rates = self.required_rates()?;
        let users = self.users();
        for k in 1..=users {
            for l in k..=users {
                if !(rates[l - 1] < self.achievable_rate(l, k)? + tol) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Reduced region test for sorted gains: `R_l < C_{l;l}` for every `l`.
    pub fn reduced_region_check(&self) -> Result<bool> {
        self.reduced_region_check_with_tolerance(0.0)
    }

    pub fn reduced_region_check_with_tolerance(&self, tol: f64) -> Result<bool> {
        let rates = self.required_rates()?;
        Ok(self
            .own_rates()
            .iter()
            .zip(rates)
            .all(|(&c, &r)| r < c + tol))
    }
}
