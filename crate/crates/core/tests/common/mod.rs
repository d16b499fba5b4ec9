//! Independent oracles shared by the property and acceptance suites.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use noma::beamforming::Cluster;
use noma::channel::ComplexVector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gains drawn log-uniformly on [1e-2, 1e2] and sorted nonincreasing.
pub fn sorted_gains(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..k).map(|_| 10f64.powf(rng.random_range(-2.0..2.0))).collect();
    g.sort_by(|a, b| b.partial_cmp(a).unwrap());
    g
}

/// `C_{k;k}` straight from the defining formula, for an arbitrary power vector.
pub fn own_rate(gains: &[f64], powers: &[f64], k: usize) -> f64 {
    let interference: f64 = powers[..k].iter().sum();
    (1.0 + gains[k] * powers[k] / (gains[k] * interference + 1.0)).log2()
}

// ---------------------------------------------------------------------------
// Random access: exact expected successes by enumeration
// ---------------------------------------------------------------------------

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Successes of one cell-occupancy vector under both models, with levels
/// `0..L` of each subcarrier stored contiguously and level `L-1` highest.
fn successes(counts: &[usize], levels: usize) -> (f64, f64) {
    let independent = counts.iter().filter(|&&c| c == 1).count() as f64;
    let mut blocking = 0.0;
    for sub in counts.chunks(levels) {
        for &c in sub.iter().rev() {
            if c == 1 {
                blocking += 1.0;
            } else if c >= 2 {
                break;
            }
        }
    }
    (independent, blocking)
}

/// Exact expected successes per slot, `(independent_subchannel, sic_blocking)`.
///
/// Conditions on the number `n` of transmitters (binomial) and enumerates all
/// `(B·L)^n` equally likely cell assignments.
pub fn exact_throughput(users: usize, p: f64, levels: usize, subcarriers: usize) -> (f64, f64) {
    let cells = levels * subcarriers;
    let mut total = (0.0, 0.0);
    for n in 0..=users {
        let weight = binomial(users, n) * p.powi(n as i32) * (1.0 - p).powi((users - n) as i32);
        if weight == 0.0 {
            continue;
        }
        let assignments = cells.pow(n as u32);
        let mut acc = (0.0, 0.0);
        let mut counts = vec![0usize; cells];
        for code in 0..assignments {
            counts.iter_mut().for_each(|c| *c = 0);
            let mut c = code;
            for _ in 0..n {
                counts[c % cells] += 1;
                c /= cells;
            }
            let (a, b) = successes(&counts, levels);
            acc.0 += a;
            acc.1 += b;
        }
        total.0 += weight * acc.0 / assignments as f64;
        total.1 += weight * acc.1 / assignments as f64;
    }
    total
}

/// Same expectation by walking every per-user outcome (idle or one of the
/// `B·L` cells); `(1 + B·L)^K` terms.
pub fn exhaustive_throughput(users: usize, p: f64, levels: usize, subcarriers: usize) -> (f64, f64) {
    let cells = levels * subcarriers;
    let states = cells + 1;
    let mut total = (0.0, 0.0);
    let mut counts = vec![0usize; cells];
    for code in 0..states.pow(users as u32) {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut prob = 1.0;
        let mut c = code;
        for _ in 0..users {
            let s = c % states;
            c /= states;
            if s == 0 {
                prob *= 1.0 - p;
            } else {
                prob *= p / cells as f64;
                counts[s - 1] += 1;
            }
        }
        let (a, b) = successes(&counts, levels);
        total.0 += prob * a;
        total.1 += prob * b;
    }
    total
}

// ---------------------------------------------------------------------------
// Beamforming: full-space brute force for three antennas
// ---------------------------------------------------------------------------

pub fn random_vector(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> ComplexVector {
    let entries = (0..len)
        .map(|_| {
            Complex64::new(
                rng.random_range(-1.0..1.0) * scale,
                rng.random_range(-1.0..1.0) * scale,
            )
        })
        .collect();
    ComplexVector::new(entries).unwrap()
}

/// Unit vector of C^3 (up to a common phase) from four angles.
fn unit3(params: &[f64; 4]) -> [Complex64; 3] {
    let [a, b, psi1, psi2] = *params;
    [
        Complex64::new(a.cos(), 0.0),
        Complex64::from_polar(a.sin() * b.cos(), psi1),
        Complex64::from_polar(a.sin() * b.sin(), psi2),
    ]
}

/// Per-cluster power for an arbitrary unit beam, `+∞` when (K1) fails.
pub fn cluster_power(cluster: &Cluster, w: &[Complex64]) -> f64 {
    let gain = |h: &ComplexVector| {
        h.as_slice()
            .iter()
            .zip(w)
            .map(|(x, y)| x.conj() * y)
            .sum::<Complex64>()
            .norm_sqr()
    };
    let x = gain(&cluster.h1);
    let y = gain(&cluster.h2);
    if x <= 0.0 || y <= 0.0 || x < y {
        return f64::INFINITY;
    }
    (1.0 + cluster.g2) * cluster.g1 * cluster.noise / x + cluster.g2 * cluster.noise / y
}

fn power3(cluster: &Cluster, params: &[f64; 4]) -> f64 {
    cluster_power(cluster, &unit3(params))
}

/// Coarse grid over the four angles of the unit sphere of C^3.
pub fn brute_force_grid3(cluster: &Cluster, n_mag: usize, n_phase: usize) -> ([f64; 4], f64) {
    let half = std::f64::consts::FRAC_PI_2;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut best = ([0.0; 4], f64::INFINITY);
    for i in 0..n_mag {
        let a = half * i as f64 / (n_mag - 1) as f64;
        for j in 0..n_mag {
            let b = half * j as f64 / (n_mag - 1) as f64;
            for k in 0..n_phase {
                let p1 = two_pi * k as f64 / n_phase as f64;
                for l in 0..n_phase {
                    let p2 = two_pi * l as f64 / n_phase as f64;
                    let params = [a, b, p1, p2];
                    let f = power3(cluster, &params);
                    if f < best.1 {
                        best = (params, f);
                    }
                }
            }
        }
    }
    best
}

/// Nelder–Mead polish of a full-space starting point.
pub fn nelder_mead3(cluster: &Cluster, start: [f64; 4], step: f64, iters: usize) -> f64 {
    let f = |p: &[f64; 4]| power3(cluster, p);
    let mut simplex: Vec<([f64; 4], f64)> = vec![(start, f(&start))];
    for d in 0..4 {
        let mut p = start;
        p[d] += step;
        simplex.push((p, f(&p)));
    }
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let worst = simplex[4];
        let mut centroid = [0.0; 4];
        for (p, _) in &simplex[..4] {
            for d in 0..4 {
                centroid[d] += p[d] / 4.0;
            }
        }
        let along = |t: f64| {
            let mut p = [0.0; 4];
            for d in 0..4 {
                p[d] = centroid[d] + t * (worst.0[d] - centroid[d]);
            }
            (p, f(&p))
        };
        let reflected = along(-1.0);
        if reflected.1 < simplex[0].1 {
            let expanded = along(-2.0);
            simplex[4] = if expanded.1 < reflected.1 { expanded } else { reflected };
        } else if reflected.1 < simplex[3].1 {
            simplex[4] = reflected;
        } else {
            let contracted = along(0.5);
            if contracted.1 < worst.1 {
                simplex[4] = contracted;
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    for (x, b) in v.0.iter_mut().zip(best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    v.1 = f(&v.0);
                }
            }
        }
    }
    simplex.iter().map(|s| s.1).fold(f64::INFINITY, f64::min)
}
