//! Downlink power allocation under SIC.
//!
//! Two problems over sorted gains `α_1 ≥ … ≥ α_K` and unit noise:
//!
//! * sum-rate maximization under a total power budget, whose optimum puts
//!   the whole budget on the strongest user;
//! * total-power minimization subject to `C_{k;k} ≥ R̄_k` for every user.
//!   The minimum is reached by making every constraint tight in ascending
//!   user order:
//!
//! ```text
//! P_k = (2^R̄_k − 1) · (P_1 + … + P_{k−1} + 1/α_k)
//! ```
//!
//! Raising `P_k` above that value only adds interference for users `k+1..K`,
//! so the greedy order is optimal.

use serde::{Deserialize, Serialize};

use crate::downlink_rates::{sic_rate, validate_sorted_gains};
use crate::error::{invalid, Error, Result};

/// Per-user minimum rates `R̄_k` in bits per channel use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RateTargets(Vec<f64>);

impl RateTargets {
    pub fn new(targets: Vec<f64>) -> Result<Self> {
        if targets.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
            return invalid("rate targets must be finite and nonnegative");
        }
        Ok(Self(targets))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for RateTargets {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RateTargets> for Vec<f64> {
    fn from(t: RateTargets) -> Self {
        t.0
    }
}

/// A power vector together with its 1-norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSolution {
    pub powers: Vec<f64>,
    pub total: f64,
}

impl PowerSolution {
    pub fn from_powers(powers: Vec<f64>) -> Self {
        let total = powers.iter().sum();
        Self { powers, total }
    }

    /// `C_{k;k}` for each user under this allocation.
    pub fn own_rates(&self, gains: &[f64]) -> Result<Vec<f64>> {
        if gains.len() != self.powers.len() {
            return invalid("gain and power vectors differ in length");
        }
        let mut interference = 0.0;
        Ok(gains
            .iter()
            .zip(&self.powers)
            .map(|(&a, &p)| {
                let c = sic_rate(a, p, interference);
                interference += p;
                c
            })
            .collect())
    }

    pub fn sum_rate(&self, gains: &[f64]) -> Result<f64> {
        Ok(self.own_rates(gains)?.iter().sum())
    }
}

/// `2^r − 1` without cancellation for small `r`.
pub fn exp2_m1(r: f64) -> f64 {
    if r.abs() < 0.5 {
        (r * std::f64::consts::LN_2).exp_m1()
    } else {
        r.exp2() - 1.0
    }
}

/// Minimum total power meeting every rate target, uncapped.
pub fn min_power_allocation(gains: &[f64], targets: &RateTargets) -> Result<PowerSolution> {
    validate_sorted_gains(gains)?;
    if targets.len() != gains.len() {
        return invalid(format!(
            "{} rate targets given for {} users",
            targets.len(),
            gains.len()
        ));
    }
    let mut assigned = 0.0;
    let powers = gains
        .iter()
        .zip(targets.as_slice())
        .map(|(&a, &r)| {
            let p = exp2_m1(r) * (assigned + 1.0 / a);
            assigned += p;
            p
        })
        .collect();
    Ok(PowerSolution::from_powers(powers))
}

/// Like [`min_power_allocation`], failing with [`Error::Infeasible`] when the
/// minimum total exceeds `cap`.
pub fn min_power_allocation_capped(
    gains: &[f64],
    targets: &RateTargets,
    cap: f64,
) -> Result<PowerSolution> {
    let solution = min_power_allocation(gains, targets)?;
    if solution.total > cap {
        return Err(Error::Infeasible(format!(
            "minimum total power {} exceeds the cap {}",
            solution.total, cap
        )));
    }
    Ok(solution)
}

/// Sum-rate maximizing allocation: the whole budget goes to user 1.
pub fn max_sum_rate_allocation(gains: &[f64], total_power: f64) -> Result<PowerSolution> {
    validate_sorted_gains(gains)?;
    if !(total_power >= 0.0 && total_power.is_finite()) {
        return invalid("total power must be finite and nonnegative");
    }
    let mut powers = vec![0.0; gains.len()];
    powers[0] = total_power;
    Ok(PowerSolution::from_powers(powers))
}

/// One point of a two-user region sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub p1: f64,
    pub p2: f64,
    pub r1: f64,
    pub r2: f64,
}

/// Boundary of the two-user reduced rate region for a total power budget.
///
/// `P_1` runs over `grid_points` uniformly spaced values on `[0, P_T]` (uniform
/// in power, not in rate) with `P_2 = P_T − P_1`; each point carries
/// `(C_{1;1}, C_{2;2})`. `R_1` increases and `R_2` decreases along the sweep.
pub fn rate_region_boundary(
    gains: &[f64],
    total_power: f64,
    grid_points: usize,
) -> Result<Vec<RegionPoint>> {
    validate_sorted_gains(gains)?;
    if gains.len() != 2 {
        return invalid("the region sweep needs exactly two users");
    }
    if !(total_power > 0.0 && total_power.is_finite()) {
        return invalid("total power must be finite and positive");
    }
    if grid_points < 2 {
        return invalid("the region sweep needs at least two grid points");
    }
    let steps = (grid_points - 1) as f64;
    Ok((0..grid_points)
        .map(|i| {
            let p1 = total_power * i as f64 / steps;
            let p2 = (total_power - p1).max(0.0);
            RegionPoint {
                p1,
                p2,
                r1: sic_rate(gains[0], p1, 0.0),
                r2: sic_rate(gains[1], p2, p1),
            }
        })
        .collect())
}
