//! Slotted ALOHA and NOMA-ALOHA throughput.
//!
//! Throughput is the expected number of packets decoded per slot. Each of
//! `K` users transmits in a slot with access probability `p_a`.
//!
//! The multichannel simulator spreads transmissions over a grid of `B`
//! subcarriers by `L` power levels; a transmitting user picks one cell of
//! the grid uniformly. The power levels are abstract: only which users share
//! a cell matters, not the physical powers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::derive_seed;
use crate::error::{invalid, Result};

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("access probability {p} is outside [0, 1]"));
    }
    Ok(())
}

fn binomial2(k: usize) -> f64 {
    let k = k as f64;
    k * (k - 1.0) / 2.0
}

/// `K p_a (1 − p_a)^(K−1)`.
pub fn aloha_throughput(users: usize, p: f64) -> Result<f64> {
    check_probability(p)?;
    if users == 0 {
        return invalid("at least one user is required");
    }
    Ok(users as f64 * p * (1.0 - p).powi(users as i32 - 1))
}

/// Two-level NOMA-ALOHA:
/// `K p_a (1 − p_a)^(K−1) + ½ C(K,2) p_a² (1 − p_a)^(K−2)`.
///
/// The second term is implemented with its ½ coefficient as published. If
/// both packets are decoded whenever two colliding users pick different
/// levels, the expected number of successes from that event is twice the
/// term; compare with [`simulate_multichannel`] for the empirical count.
pub fn noma_aloha_throughput_2level(users: usize, p: f64) -> Result<f64> {
    check_probability(p)?;
    if users < 2 {
        return invalid("two-level NOMA-ALOHA needs at least two users");
    }
    let single = aloha_throughput(users, p)?;
    let pair = 0.5 * binomial2(users) * p * p * (1.0 - p).powi(users as i32 - 2);
    Ok(single + pair)
}

/// Closed-form throughput expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticFormula {
    Aloha,
    NomaTwoLevel,
}

impl AnalyticFormula {
    pub fn eval(self, users: usize, p: f64) -> Result<f64> {
        match self {
            AnalyticFormula::Aloha => aloha_throughput(users, p),
            AnalyticFormula::NomaTwoLevel => noma_aloha_throughput_2level(users, p),
        }
    }
}

/// Maximizer of an analytic throughput over `p_a ∈ [0, 1]` by golden-section
/// search. Both formulas are unimodal in `p_a`.
pub fn analytic_peak(formula: AnalyticFormula, users: usize) -> Result<(f64, f64)> {
    formula.eval(users, 0.5)?;
    let f = |p: f64| formula.eval(users, p).unwrap_or(f64::NEG_INFINITY);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let p = 0.5 * (lo + hi);
    Ok((p, f(p)))
}

/// How collisions inside one subcarrier are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodingModel {
    /// A packet succeeds iff no other user picked the same (subcarrier,
    /// level) cell.
    IndependentSubchannel,
    /// Levels of a subcarrier are decoded from the highest down. A level with
    /// one user succeeds and is stripped; a level with two or more users
    /// fails and stops decoding of every lower level on that subcarrier.
    SicBlocking,
}

impl DecodingModel {
    pub fn name(self) -> &'static str {
        match self {
            DecodingModel::IndependentSubchannel => "independent_subchannel",
            DecodingModel::SicBlocking => "sic_blocking",
        }
    }
}

/// Random-access simulation setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaConfig {
    pub users: usize,
    pub access_prob: f64,
    pub power_levels: usize,
    pub subcarriers: usize,
    pub decoding_model: DecodingModel,
    pub trials: usize,
    pub seed: u64,
}

impl RaConfig {
    pub fn validate(&self) -> Result<()> {
        check_probability(self.access_prob)?;
        if self.users == 0 {
            return invalid("at least one user is required");
        }
        if self.power_levels == 0 || self.subcarriers == 0 {
            return invalid("power levels and subcarriers must be at least 1");
        }
        if self.trials == 0 {
            return invalid("at least one trial is required");
        }
        Ok(())
    }

    pub fn with_access_prob(&self, access_prob: f64) -> Self {
        Self {
            access_prob,
            ..self.clone()
        }
    }

    pub fn with_model(&self, decoding_model: DecodingModel) -> Self {
        Self {
            decoding_model,
            ..self.clone()
        }
    }
}

/// Sample mean of per-slot successes and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimEstimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Successes of one slot under both decoding models.
fn slot_successes(config: &RaConfig, trial: u64, counts: &mut [u32]) -> (u32, u32) {
    let levels = config.power_levels;
    let cells = levels * config.subcarriers;
    counts.iter_mut().for_each(|c| *c = 0);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, trial));
    for _ in 0..config.users {
        if rng.random::<f64>() < config.access_prob {
            counts[rng.random_range(0..cells)] += 1;
        }
    }
    let independent = counts.iter().filter(|&&c| c == 1).count() as u32;
    let mut blocking = 0;
    for sub in counts.chunks(levels) {
        for &c in sub.iter().rev() {
            match c {
                0 => {}
                1 => blocking += 1,
                _ => break,
            }
        }
    }
    (independent, blocking)
}

#[derive(Default, Clone, Copy)]
struct Moments {
    n: u64,
    sum: [u64; 2],
    sum_sq: [u64; 2],
}

impl Moments {
    fn push(mut self, (a, b): (u32, u32)) -> Self {
        self.n += 1;
        for (i, x) in [a as u64, b as u64].into_iter().enumerate() {
            self.sum[i] += x;
            self.sum_sq[i] += x * x;
        }
        self
    }

    fn merge(mut self, o: Self) -> Self {
        self.n += o.n;
        for i in 0..2 {
            self.sum[i] += o.sum[i];
            self.sum_sq[i] += o.sum_sq[i];
        }
        self
    }

    fn estimate(&self, i: usize) -> SimEstimate {
        let n = self.n as f64;
        let mean = self.sum[i] as f64 / n;
        let stderr = if self.n > 1 {
            let var = (self.sum_sq[i] as f64 - n * mean * mean) / (n - 1.0);
            (var.max(0.0) / n).sqrt()
        } else {
            0.0
        };
        SimEstimate { mean, stderr }
    }
}

/// Simulates both decoding models on common random numbers and returns
/// `(independent_subchannel, sic_blocking)`; `config.decoding_model` is
/// ignored.
///
/// Trial `t` draws from ChaCha8 seeded with `derive_seed(seed, t)`, so the
/// result does not depend on scheduling. Success counts are accumulated as
/// integers, making the reduction exact.
pub fn simulate_both_models(config: &RaConfig) -> Result<(SimEstimate, SimEstimate)> {
    config.validate()?;
    let cells = config.power_levels * config.subcarriers;
    let moments = (0..config.trials as u64)
        .into_par_iter()
        .fold(
            || (Moments::default(), vec![0u32; cells]),
            |(m, mut counts), t| {
                let s = slot_successes(config, t, &mut counts);
                (m.push(s), counts)
            },
        )
        .map(|(m, _)| m)
        .reduce(Moments::default, Moments::merge);
    Ok((moments.estimate(0), moments.estimate(1)))
}

/// Monte Carlo throughput under `config.decoding_model`.
pub fn simulate_multichannel(config: &RaConfig) -> Result<SimEstimate> {
    let (independent, blocking) = simulate_both_models(config)?;
    Ok(match config.decoding_model {
        DecodingModel::IndependentSubchannel => independent,
        DecodingModel::SicBlocking => blocking,
    })
}

/// One evaluated access probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub access_prob: f64,
    pub throughput: f64,
    /// Zero for analytic points.
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveSource {
    Analytic(AnalyticFormula),
    Simulated(DecodingModel),
}

/// Throughput over a grid of access probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputCurve {
    pub source: CurveSource,
    pub points: Vec<CurvePoint>,
    /// `(p_a, T)` of the best grid point; the first one wins ties.
    pub peak: (f64, f64),
}

/// `n` uniform points on `[0, 1]`; 101 is the default resolution.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn default_grid() -> Vec<f64> {
    uniform_grid(101)
}

/// Which evaluation [`throughput_curve`] uses for `config`: the analytic
/// formulas for a single subcarrier with one or two levels, else simulation.
pub fn curve_source(config: &RaConfig) -> CurveSource {
    match (config.subcarriers, config.power_levels) {
        (1, 1) => CurveSource::Analytic(AnalyticFormula::Aloha),
        (1, 2) if config.users >= 2 => CurveSource::Analytic(AnalyticFormula::NomaTwoLevel),
        _ => CurveSource::Simulated(config.decoding_model),
    }
}

pub fn throughput_curve(config: &RaConfig, grid: &[f64]) -> Result<ThroughputCurve> {
    curve_with_source(config, grid, curve_source(config))
}

/// Simulated curve regardless of the analytic shortcut.
pub fn simulated_curve(config: &RaConfig, grid: &[f64]) -> Result<ThroughputCurve> {
    curve_with_source(config, grid, CurveSource::Simulated(config.decoding_model))
}

fn curve_with_source(
    config: &RaConfig,
    grid: &[f64],
    source: CurveSource,
) -> Result<ThroughputCurve> {
    if grid.is_empty() {
        return invalid("access probability grid is empty");
    }
    for &p in grid {
        check_probability(p)?;
    }
    config.with_access_prob(0.0).validate()?;
    let points = grid
        .iter()
        .map(|&p| {
            let (throughput, stderr) = match source {
                CurveSource::Analytic(f) => (f.eval(config.users, p)?, 0.0),
                CurveSource::Simulated(model) => {
                    let est = simulate_multichannel(&config.with_access_prob(p).with_model(model))?;
                    (est.mean, est.stderr)
                }
            };
            Ok(CurvePoint {
                access_prob: p,
                throughput,
                stderr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = points
        .iter()
        .fold(points[0], |b, &pt| if pt.throughput > b.throughput { pt } else { b });
    Ok(ThroughputCurve {
        source,
        points,
        peak: (best.access_prob, best.throughput),
    })
}
