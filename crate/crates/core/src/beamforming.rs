//! NOMA beamforming for two-user clusters.
//!
//! A cluster shares one beam `w` between a strong user 1 and a weak user 2.
//! User 1 decodes and strips user 2's signal before decoding its own, which
//! gives the constraints
//!
//! ```text
//! (K1) |h1ᴴw|² ≥ |h2ᴴw|²
//! (K2) |h1ᴴw|² P1 ≥ G1 σ²
//! (K3) |h2ᴴw|² P2 ≥ (|h2ᴴw|² P1 + σ²) G2
//! ```
//!
//! For a fixed beam the cheapest powers make (K2) and (K3) tight, so the
//! per-cluster power is
//!
//! ```text
//! P1 + P2 = (1 + G2) G1 σ² / |h1ᴴw|² + G2 σ² / |h2ᴴw|²
//! ```
//!
//! Only the components of `w` in `span{h1, h2}` enter that expression, so the
//! optimal beam is searched on the two-parameter family
//! `w = cos θ · u1 + sin θ · e^{jφ} · u2` with `{u1, u2}` an orthonormal basis of
//! the span (`u1` along `h1`). The search evaluates a 512 × 512 grid over
//! `θ ∈ [0, π/2]`, `φ ∈ [0, 2π)` and then refines `θ` by golden-section search
//! with `φ` solved in closed form for each `θ`.
//!
//! Across clusters, each beam is confined to the orthogonal complement of the
//! other clusters' channels (zero-forcing).
//!
//! # OMA baseline
//!
//! The orthogonal baseline gives each user of a cluster half of the resource.
//! To deliver the same rate `log2(1 + G_i)` in half the time, user `i` needs
//! SINR `(1 + G_i)² − 1` during its half, served by its own matched beam in the
//! zero-forcing subspace. The reported OMA power is the time average
//! `½ Σ_i ((1 + G_i)² − 1) σ² / ‖P h_i‖²` where `P` projects onto that
//! subspace. This baseline is a modeling choice.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{derive_seed, draw_channel, inner, ComplexVector, FadingSpec};
use crate::error::{invalid, Error, Result};

/// Grid resolution per coordinate of the beam search.
pub const BEAM_GRID: usize = 512;

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Two users served by one beam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub h1: ComplexVector,
    pub h2: ComplexVector,
    pub g1: f64,
    pub g2: f64,
    pub noise: f64,
}

impl Cluster {
    /// `g1`, `g2` are linear SINR targets; `noise` is `σ²`.
    pub fn new(h1: ComplexVector, h2: ComplexVector, g1: f64, g2: f64, noise: f64) -> Result<Self> {
        if h1.len() != h2.len() {
            return invalid("cluster channels must have the same length");
        }
        if h1.norm_sqr() == 0.0 || h2.norm_sqr() == 0.0 {
            return invalid("cluster channels must be nonzero");
        }
        if !(g1 >= 0.0 && g1.is_finite() && g2 >= 0.0 && g2.is_finite()) {
            return invalid("SINR targets must be finite and nonnegative");
        }
        if !(noise > 0.0 && noise.is_finite()) {
            return invalid("noise power must be finite and positive");
        }
        Ok(Self {
            h1,
            h2,
            g1,
            g2,
            noise,
        })
    }

    pub fn antennas(&self) -> usize {
        self.h1.len()
    }

    /// Per-cluster power for a beam with effective gains `x = |h1ᴴw|²`, `y = |h2ᴴw|²`.
    fn power_for_gains(&self, x: f64, y: f64) -> f64 {
        (1.0 + self.g2) * self.g1 * self.noise / x + self.g2 * self.noise / y
    }
}

/// Unit-norm beamforming vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Beam(ComplexVector);

impl Beam {
    pub fn new(w: ComplexVector) -> Result<Self> {
        if (w.norm() - 1.0).abs() > 1e-12 {
            return invalid(format!("beam must have unit norm, got {}", w.norm()));
        }
        Ok(Self(w))
    }

    /// Scales `v` to unit norm.
    pub fn normalized(v: &ComplexVector) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 {
            return invalid("cannot normalize a zero vector");
        }
        Ok(Self(v.scaled(Complex64::new(1.0 / n, 0.0))))
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Beam and powers for one cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSolution {
    pub beam: Beam,
    pub p1: f64,
    pub p2: f64,
    pub total: f64,
}

/// SINR at the weak user, `|h2ᴴw|² P2 / (|h2ᴴw|² P1 + σ²)`.
pub fn sinr_weak(cluster: &Cluster, beam: &Beam, p1: f64, p2: f64) -> f64 {
    let y = cluster.h2.gain(beam.vector());
    y * p2 / (y * p1 + cluster.noise)
}

/// SINR at the strong user after SIC, `|h1ᴴw|² P1 / σ²`.
pub fn sinr_strong(cluster: &Cluster, beam: &Beam, p1: f64) -> f64 {
    cluster.h1.gain(beam.vector()) * p1 / cluster.noise
}

/// Exact test of (K1)–(K3).
pub fn constraints_satisfied(cluster: &Cluster, beam: &Beam, p1: f64, p2: f64) -> bool {
    constraints_satisfied_within(cluster, beam, p1, p2, 0.0)
}

/// Test of (K1)–(K3) where each left side may fall short of its right side
/// by `rel_tol` times the right side.
pub fn constraints_satisfied_within(
    cluster: &Cluster,
    beam: &Beam,
    p1: f64,
    p2: f64,
    rel_tol: f64,
) -> bool {
    let x = cluster.h1.gain(beam.vector());
    let y = cluster.h2.gain(beam.vector());
    let ok = |lhs: f64, rhs: f64| lhs >= rhs * (1.0 - rel_tol);
    ok(x, y) && ok(x * p1, cluster.g1 * cluster.noise) && ok(y * p2, (y * p1 + cluster.noise) * cluster.g2)
}

/// Smallest powers meeting (K2) and (K3) with equality for a given beam.
pub fn powers_for_beam(cluster: &Cluster, beam: &Beam) -> Result<ClusterSolution> {
    if beam.len() != cluster.antennas() {
        return invalid("beam length differs from the antenna count");
    }
    let x = cluster.h1.gain(beam.vector());
    let y = cluster.h2.gain(beam.vector());
    if x == 0.0 || y == 0.0 {
        return Err(Error::Infeasible("beam has zero effective gain".into()));
    }
    if x < y {
        return Err(Error::Infeasible(
            "beam gives the weak user a larger gain than the strong user".into(),
        ));
    }
    let p1 = cluster.g1 * cluster.noise / x;
    let p2 = cluster.g2 * (p1 + cluster.noise / y);
    Ok(ClusterSolution {
        beam: beam.clone(),
        p1,
        p2,
        total: p1 + p2,
    })
}

/// Orthonormal basis of a subspace of `C^L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Complex64>>,
}

const RANK_TOL: f64 = 1e-10;

fn sub_scaled(v: &mut [Complex64], u: &[Complex64], c: Complex64) {
    for (a, b) in v.iter_mut().zip(u) {
        *a -= b * c;
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Gram–Schmidt with one reorthogonalization pass. Returns the unit residual
/// of `v` against `basis`, or `None` if `v` lies in its span.
fn orthonormal_residual(basis: &[Vec<Complex64>], v: &[Complex64]) -> Option<Vec<Complex64>> {
    let scale = vec_norm(v);
    if scale == 0.0 {
        return None;
    }
    let mut r = v.to_vec();
    for _ in 0..2 {
        for u in basis {
            let c = inner(u, &r);
            sub_scaled(&mut r, u, c);
        }
    }
    let n = vec_norm(&r);
    if n <= RANK_TOL * scale {
        return None;
    }
    r.iter_mut().for_each(|z| *z /= n);
    Some(r)
}

impl Subspace {
    /// The whole of `C^L`.
    pub fn full(ambient: usize) -> Self {
        Self::orthogonal_complement(ambient, &[])
    }

    /// Orthonormalized span of `vectors`.
    pub fn span(vectors: &[&ComplexVector]) -> Result<Self> {
        let ambient = match vectors.first() {
            Some(v) => v.len(),
            None => return invalid("cannot span an empty set"),
        };
        if vectors.iter().any(|v| v.len() != ambient) {
            return invalid("spanning vectors differ in length");
        }
        let mut basis = Vec::new();
        for v in vectors {
            if let Some(u) = orthonormal_residual(&basis, v.as_slice()) {
                basis.push(u);
            }
        }
        Ok(Self { ambient, basis })
    }

    /// Orthogonal complement of `span(vectors)` in `C^ambient`.
    pub fn orthogonal_complement(ambient: usize, vectors: &[&ComplexVector]) -> Self {
        let mut span = Vec::new();
        for v in vectors {
            if let Some(u) = orthonormal_residual(&span, v.as_slice()) {
                span.push(u);
            }
        }
        let mut basis: Vec<Vec<Complex64>> = Vec::new();
        for i in 0..ambient {
            if span.len() + basis.len() == ambient {
                break;
            }
            let mut e = vec![Complex64::new(0.0, 0.0); ambient];
            e[i] = Complex64::new(1.0, 0.0);
            let mut against = span.clone();
            against.extend(basis.iter().cloned());
            if let Some(u) = orthonormal_residual(&against, &e) {
                basis.push(u);
            }
        }
        Self { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    /// Orthogonal projection of `h` onto the subspace.
    pub fn project(&self, h: &ComplexVector) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.ambient];
        for u in &self.basis {
            let c = inner(u, h.as_slice());
            for (o, b) in out.iter_mut().zip(u) {
                *o += b * c;
            }
        }
        out
    }
}

/// Coordinates of the two projected channels in the plane `{u1, u2}`.
struct BeamPlane {
    u1: Vec<Complex64>,
    u2: Option<Vec<Complex64>>,
    /// `‖P h1‖`, equal to `(P h1)ᴴ u1`.
    a1: f64,
    /// `(P h2)ᴴ u1`.
    c2: Complex64,
    /// `(P h2)ᴴ u2`, real and nonnegative by construction.
    b2: f64,
}

impl BeamPlane {
    fn new(cluster: &Cluster, subspace: &Subspace) -> Result<Self> {
        let h1p = subspace.project(&cluster.h1);
        let h2p = subspace.project(&cluster.h2);
        let a1 = vec_norm(&h1p);
        if a1 <= RANK_TOL * cluster.h1.norm() {
            return Err(Error::Infeasible(
                "strong user's channel vanishes in the beam subspace".into(),
            ));
        }
        if vec_norm(&h2p) <= RANK_TOL * cluster.h2.norm() {
            return Err(Error::Infeasible(
                "weak user's channel vanishes in the beam subspace".into(),
            ));
        }
        let u1: Vec<Complex64> = h1p.iter().map(|z| z / a1).collect();
        let c2 = inner(&h2p, &u1);
        let mut r = h2p.clone();
        sub_scaled(&mut r, &u1, c2.conj());
        let b2 = vec_norm(&r);
        let u2 = if b2 > RANK_TOL * vec_norm(&h2p) {
            Some(r.iter().map(|z| z / b2).collect())
        } else {
            None
        };
        Ok(Self {
            u1,
            b2: if u2.is_some() { b2 } else { 0.0 },
            u2,
            a1,
            c2,
        })
    }

    fn beam(&self, theta: f64, phi: f64) -> Result<Beam> {
        let (s, c) = theta.sin_cos();
        let w: Vec<Complex64> = match &self.u2 {
            Some(u2) => self
                .u1
                .iter()
                .zip(u2)
                .map(|(a, b)| a * c + b * Complex64::from_polar(s, phi))
                .collect(),
            None => self.u1.clone(),
        };
        Beam::normalized(&ComplexVector::new(w)?)
    }
}

/// Best `φ` for a fixed `θ`; returns `(power, φ)` or `None` if no `φ` meets (K1).
fn best_phase(cluster: &Cluster, plane: &BeamPlane, theta: f64) -> Option<(f64, f64)> {
    let (s, c) = theta.sin_cos();
    let x = plane.a1 * plane.a1 * c * c;
    if x <= 0.0 {
        return None;
    }
    // y(φ) = A + B cos(φ − φ0)
    let a = plane.c2.norm_sqr() * c * c + plane.b2 * plane.b2 * s * s;
    let b = 2.0 * plane.c2.norm() * plane.b2 * c * s;
    let phi0 = plane.c2.arg();
    let (y, phi) = if a + b <= x {
        (a + b, phi0)
    } else if a - b <= x * (1.0 - 1e-12) {
        // (K1) binds: largest admissible y sits slightly inside the boundary.
        let y = x * (1.0 - 1e-12);
        let cos_arg = ((y - a) / b).clamp(-1.0, 1.0);
        (y, phi0 + cos_arg.acos())
    } else {
        return None;
    };
    if y <= 0.0 {
        return None;
    }
    Some((cluster.power_for_gains(x, y), phi))
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
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
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Result of the raw grid stage, kept for diagnostics and tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptimum {
    pub theta: f64,
    pub phi: f64,
    pub total: f64,
}

fn grid_search(cluster: &Cluster, plane: &BeamPlane) -> Option<GridOptimum> {
    let n = BEAM_GRID;
    let phi0 = plane.c2.arg();
    let cos_table: Vec<f64> = (0..n)
        .map(|j| (2.0 * PI * j as f64 / n as f64 - phi0).cos())
        .collect();
    let mut best: Option<GridOptimum> = None;
    let thetas = if plane.u2.is_some() { n } else { 1 };
    for i in 0..thetas {
        let theta = FRAC_PI_2 * i as f64 / (n - 1) as f64;
        let (s, c) = theta.sin_cos();
        let x = plane.a1 * plane.a1 * c * c;
        if x <= 0.0 {
            continue;
        }
        let a = plane.c2.norm_sqr() * c * c + plane.b2 * plane.b2 * s * s;
        let b = 2.0 * plane.c2.norm() * plane.b2 * c * s;
        for (j, &cj) in cos_table.iter().enumerate() {
            let y = a + b * cj;
            if y <= 0.0 || y > x {
                continue;
            }
            let total = cluster.power_for_gains(x, y);
            if best.is_none_or(|bst| total < bst.total) {
                best = Some(GridOptimum {
                    theta,
                    phi: 2.0 * PI * j as f64 / n as f64,
                    total,
                });
            }
        }
    }
    best
}

/// Minimum-power beam for a cluster, optionally confined to `subspace`.
pub fn optimize_beam(cluster: &Cluster, subspace: Option<&Subspace>) -> Result<ClusterSolution> {
    let full;
    let subspace = match subspace {
        Some(s) => {
            if s.ambient() != cluster.antennas() {
                return invalid("subspace dimension differs from the antenna count");
            }
            s
        }
        None => {
            full = Subspace::full(cluster.antennas());
            &full
        }
    };
    if subspace.rank() == 0 {
        return Err(Error::Infeasible("beam subspace is empty".into()));
    }
    let plane = BeamPlane::new(cluster, subspace)?;
    let grid = grid_search(cluster, &plane).ok_or_else(|| {
        Error::Infeasible("no beam in the subspace gives the strong user the larger gain".into())
    })?;
    let grid_solution = powers_for_beam(cluster, &plane.beam(grid.theta, grid.phi)?)?;
    if plane.u2.is_none() {
        return Ok(grid_solution);
    }

    let step = FRAC_PI_2 / (BEAM_GRID - 1) as f64;
    let lo = (grid.theta - step).max(0.0);
    let hi = (grid.theta + step).min(FRAC_PI_2);
    let g = |t: f64| best_phase(cluster, &plane, t).map_or(f64::INFINITY, |(p, _)| p);
    let (theta, _) = golden_section(g, lo, hi, 80);
    let refined = best_phase(cluster, &plane, theta)
        .and_then(|(_, phi)| plane.beam(theta, phi).ok())
        .and_then(|beam| powers_for_beam(cluster, &beam).ok());
    Ok(match refined {
        Some(sol) if sol.total <= grid_solution.total => sol,
        _ => grid_solution,
    })
}

/// Grid stage of [`optimize_beam`] alone, over the full antenna space.
pub fn beam_grid_optimum(cluster: &Cluster) -> Result<GridOptimum> {
    let plane = BeamPlane::new(cluster, &Subspace::full(cluster.antennas()))?;
    grid_search(cluster, &plane)
        .ok_or_else(|| Error::Infeasible("no grid beam satisfies (K1)".into()))
}

/// Which channels of other clusters a beam is forced to null.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZfNulling {
    /// Both users of every other cluster.
    #[default]
    AllUsers,
    /// Only the weak user of every other cluster.
    WeakUsers,
}

impl ZfNulling {
    fn nulled(self, clusters: &[Cluster], own: usize) -> Vec<&ComplexVector> {
        clusters
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != own)
            .flat_map(|(_, c)| match self {
                ZfNulling::AllUsers => vec![&c.h1, &c.h2],
                ZfNulling::WeakUsers => vec![&c.h2],
            })
            .collect()
    }

    /// Nulled channels per cluster for `clusters` clusters.
    pub fn nulled_count(self, clusters: usize) -> usize {
        let per = match self {
            ZfNulling::AllUsers => 2,
            ZfNulling::WeakUsers => 1,
        };
        per * clusters.saturating_sub(1)
    }

    /// Zero-forcing subspace of cluster `own`.
    pub fn subspace(self, clusters: &[Cluster], own: usize) -> Subspace {
        let ambient = clusters[own].antennas();
        Subspace::orthogonal_complement(ambient, &self.nulled(clusters, own))
    }
}

/// Zero-forcing beams that null both users of every other cluster.
pub fn zf_multicluster(clusters: &[Cluster]) -> Result<Vec<ClusterSolution>> {
    zf_multicluster_with(clusters, ZfNulling::AllUsers)
}

pub fn zf_multicluster_with(
    clusters: &[Cluster],
    nulling: ZfNulling,
) -> Result<Vec<ClusterSolution>> {
    let antennas = match clusters.first() {
        Some(c) => c.antennas(),
        None => return invalid("no clusters given"),
    };
    if clusters.iter().any(|c| c.antennas() != antennas) {
        return invalid("clusters differ in antenna count");
    }
    (0..clusters.len())
        .map(|i| {
            let subspace = nulling.subspace(clusters, i);
            optimize_beam(&clusters[i], Some(&subspace))
                .map_err(|e| Error::Infeasible(format!("cluster {}: {}", i + 1, inner_message(e))))
        })
        .collect()
}

fn inner_message(e: Error) -> String {
    match e {
        Error::Infeasible(m) | Error::InvalidArgument(m) => m,
        other => other.to_string(),
    }
}

/// Time-averaged OMA power of one cluster in `subspace` (see module docs).
pub fn oma_cluster_power(cluster: &Cluster, subspace: &Subspace) -> Result<f64> {
    let mut total = 0.0;
    for (h, g) in [(&cluster.h1, cluster.g1), (&cluster.h2, cluster.g2)] {
        let gain = vec_norm(&subspace.project(h)).powi(2);
        if gain <= (RANK_TOL * h.norm()).powi(2) {
            return Err(Error::Infeasible("channel vanishes in the OMA beam subspace".into()));
        }
        let half_slot_sinr = (1.0 + g) * (1.0 + g) - 1.0;
        total += 0.5 * half_slot_sinr * cluster.noise / gain;
    }
    Ok(total)
}

/// Monte Carlo setup for total power versus antenna count.
///
/// `spec.user_distances` lists users cluster by cluster, strong user first:
/// `[strong_1, weak_1, strong_2, weak_2, …]`. `spec.antenna_count` is
/// ignored; each entry of `antenna_counts` is used instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Config {
    pub antenna_counts: Vec<usize>,
    pub trials: usize,
    pub spec: FadingSpec,
    pub g1: f64,
    pub g2: f64,
    pub noise: f64,
    pub nulling: ZfNulling,
}

impl Fig3Config {
    /// Unit noise and weak-user nulling.
    pub fn new(antenna_counts: Vec<usize>, trials: usize, spec: FadingSpec, g1: f64, g2: f64) -> Self {
        Self {
            antenna_counts,
            trials,
            spec,
            g1,
            g2,
            noise: 1.0,
            nulling: ZfNulling::WeakUsers,
        }
    }

    pub fn clusters(&self) -> usize {
        self.spec.user_distances.len() / 2
    }

    fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let users = self.spec.user_distances.len();
        if users == 0 || !users.is_multiple_of(2) {
            return invalid("user distances must come in strong/weak pairs");
        }
        if self.trials == 0 {
            return invalid("at least one trial is required");
        }
        if self.antenna_counts.is_empty() {
            return invalid("no antenna counts given");
        }
        let needed = self.nulling.nulled_count(self.clusters()) + 1;
        if let Some(&l) = self.antenna_counts.iter().find(|&&l| l < needed) {
            return invalid(format!(
                "{l} antennas cannot null {} channels per cluster",
                needed - 1
            ));
        }
        Ok(())
    }
}

/// One channel realization with its NOMA and OMA solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Trial {
    pub clusters: Vec<Cluster>,
    pub solutions: Vec<ClusterSolution>,
    pub noma_total: f64,
    pub oma_total: f64,
}

/// Draws trial `trial` at `antennas` antennas and solves it.
///
/// The channel seed depends on the trial index only, so the realizations at
/// different antenna counts are nested prefixes of one another.
pub fn fig3_trial(config: &Fig3Config, antennas: usize, trial: u64) -> Result<Fig3Trial> {
    let spec = config
        .spec
        .with_antennas(antennas)
        .with_seed(derive_seed(config.spec.seed, trial));
    let clusters = (0..config.clusters())
        .map(|c| {
            Cluster::new(
                draw_channel(&spec, 2 * c)?,
                draw_channel(&spec, 2 * c + 1)?,
                config.g1,
                config.g2,
                config.noise,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let solutions = zf_multicluster_with(&clusters, config.nulling)?;
    let oma_total = (0..clusters.len())
        .map(|i| oma_cluster_power(&clusters[i], &config.nulling.subspace(&clusters, i)))
        .sum::<Result<f64>>()?;
    let noma_total = solutions.iter().map(|s| s.total).sum();
    Ok(Fig3Trial {
        clusters,
        solutions,
        noma_total,
        oma_total,
    })
}

/// One row of the power-vs-antennas table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig3Row {
    pub antennas: usize,
    pub noma_mean_power: f64,
    pub oma_mean_power: f64,
    pub infeasible_rate: f64,
}

/// Mean NOMA and OMA total power per antenna count.
///
/// Trials run in parallel and are reduced in trial order. A trial in which
/// any cluster is infeasible is left out of both means and counted in
/// `infeasible_rate`.
pub fn fig3_experiment(config: &Fig3Config) -> Result<Vec<Fig3Row>> {
    config.validate()?;
    config
        .antenna_counts
        .iter()
        .map(|&antennas| {
            let outcomes: Vec<Option<(f64, f64)>> = (0..config.trials as u64)
                .into_par_iter()
                .map(|t| match fig3_trial(config, antennas, t) {
                    Ok(trial) => Ok(Some((trial.noma_total, trial.oma_total))),
                    Err(Error::Infeasible(_)) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<_>>()?;
            let feasible: Vec<(f64, f64)> = outcomes.iter().flatten().copied().collect();
            let n = feasible.len() as f64;
            let (noma, oma) = feasible
                .iter()
                .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
            Ok(Fig3Row {
                antennas,
                noma_mean_power: noma / n,
                oma_mean_power: oma / n,
                infeasible_rate: (outcomes.len() - feasible.len()) as f64 / outcomes.len() as f64,
            })
        })
        .collect()
}
