//! Uplink NOMA with successive interference cancellation at the base station.
//!
//! Users are labelled `1..=K`. A decoding order lists the users in the
//! sequence in which the base station decodes and strips their signals: the
//! first user in the order sees every other user as interference, the last
//! one sees none. Writing the chain rule as
//! `I(r; u_1..u_K) = Σ_k I(r; u_k | u_{k+1}, …, u_K)` corresponds to the order
//! `[K, K-1, …, 1]`.

use serde::{Deserialize, Serialize};

use crate::downlink_rates::sic_rate;
use crate::error::{invalid, Error, Result};

/// Gains `β_k = |g_k|²`, transmit powers `Q_k` and a decoding order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUplink", into = "RawUplink")]
pub struct UplinkScenario {
    gains: Vec<f64>,
    powers: Vec<f64>,
    order: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawUplink {
    gains: Vec<f64>,
    powers: Vec<f64>,
    /// Defaults to `[K, …, 1]`.
    #[serde(default)]
    order: Option<Vec<usize>>,
}

impl TryFrom<RawUplink> for UplinkScenario {
    type Error = Error;

    fn try_from(raw: RawUplink) -> Result<Self> {
        match raw.order {
            Some(order) => Self::new(raw.gains, raw.powers, order),
            None => Self::descending(raw.gains, raw.powers),
        }
    }
}

impl From<UplinkScenario> for RawUplink {
    fn from(s: UplinkScenario) -> Self {
        RawUplink {
            gains: s.gains,
            powers: s.powers,
            order: Some(s.order),
        }
    }
}

impl UplinkScenario {
    /// `order` is a permutation of `1..=K`, first-decoded user first.
    pub fn new(gains: Vec<f64>, powers: Vec<f64>, order: Vec<usize>) -> Result<Self> {
        let k = gains.len();
        if k == 0 {
            return invalid("at least one user is required");
        }
        if powers.len() != k || order.len() != k {
            return invalid("gains, powers and order must have equal lengths");
        }
        if gains.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
            return invalid("channel gains must be finite and positive");
        }
        if powers.iter().any(|&q| !(q >= 0.0 && q.is_finite())) {
            return invalid("powers must be finite and nonnegative");
        }
        let mut seen = vec![false; k];
        for &u in &order {
            if u == 0 || u > k || std::mem::replace(&mut seen[u - 1], true) {
                return invalid(format!("decoding order {order:?} is not a permutation of 1..={k}"));
            }
        }
        Ok(Self {
            gains,
            powers,
            order,
        })
    }

    /// Scenario decoded in the order `K, K-1, …, 1`.
    pub fn descending(gains: Vec<f64>, powers: Vec<f64>) -> Result<Self> {
        let order = (1..=gains.len()).rev().collect();
        Self::new(gains, powers, order)
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

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn with_order(&self, order: Vec<usize>) -> Result<Self> {
        Self::new(self.gains.clone(), self.powers.clone(), order)
    }

    fn received_power(&self, user: usize) -> f64 {
        self.gains[user - 1] * self.powers[user - 1]
    }

    /// `log2(1 + Σ β_k Q_k)`.
    pub fn total_mutual_information(&self) -> f64 {
        let sum: f64 = (1..=self.users()).map(|u| self.received_power(u)).sum();
        sum.ln_1p() / std::f64::consts::LN_2
    }

    /// Per-user SIC rates, indexed by user (entry `k-1` belongs to user `k`).
    pub fn sic_rates(&self) -> Vec<f64> {
        // walk the order backwards so the interference is a running sum of
        // the users decoded later
        let mut later = 0.0;
        let mut rates = vec![0.0; self.users()];
        for &u in self.order.iter().rev() {
            let own = self.received_power(u);
            rates[u - 1] = sic_rate(1.0, own, later);
            later += own;
        }
        rates
    }

    /// Strict test `R_k < sic_rates()[k]` for every user.
    pub fn feasible_rate_tuple(&self, rates: &[f64]) -> Result<bool> {
        if rates.len() != self.users() {
            return invalid(format!(
                "{} rates given for {} users",
                rates.len(),
                self.users()
            ));
        }
        Ok(self.sic_rates().iter().zip(rates).all(|(&c, &r)| r < c))
    }
}
