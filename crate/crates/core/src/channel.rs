//! Seeded Rayleigh channel generation.
//!
//! Every entry of a drawn channel vector is an independent circularly
//! symmetric complex Gaussian sample, `CN(0, d^-n)`, where `d` is the user's
//! normalized distance and `n` the path-loss exponent.
//!
//! # Random stream
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded with
//! `seed_from_u64(spec.seed)` and switched to stream number `user_index` via
//! `set_stream`. Each complex entry consumes two standard normals (real part
//! first, then imaginary part) drawn with the Ziggurat sampler of
//! `rand_distr::StandardNormal`; both are scaled by `sqrt(1/2)` and by
//! `d^(-n/2)`.
//!
//! Entries are produced in order, so the first `L` entries of a draw with
//! `antenna_count = L' > L` coincide with the draw for `antenna_count = L`.
//! The beamforming experiment relies on this to compare antenna counts on
//! nested channel realizations.

use std::ops::Index;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A nonempty vector of finite complex channel coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return invalid("complex vector must have at least one entry");
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("complex vector entries must be finite");
        }
        Ok(Self(entries))
    }

    /// Builds a vector with zero imaginary parts.
    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// Squared Euclidean norm.
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Hermitian inner product `selfᴴ other`.
    pub fn inner(&self, other: &ComplexVector) -> Complex64 {
        inner(&self.0, &other.0)
    }

    /// Effective gain `|selfᴴ w|²`.
    pub fn gain(&self, w: &ComplexVector) -> f64 {
        self.inner(w).norm_sqr()
    }

    /// Multiplies every entry by `c`.
    pub fn scaled(&self, c: Complex64) -> ComplexVector {
        ComplexVector(self.0.iter().map(|z| z * c).collect())
    }

    /// First `len` entries.
    pub fn truncated(&self, len: usize) -> Result<ComplexVector> {
        ComplexVector::new(self.0.iter().take(len).copied().collect())
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<Complex64>> for ComplexVector {
    type Error = Error;

    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ComplexVector> for Vec<Complex64> {
    fn from(v: ComplexVector) -> Self {
        v.0
    }
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Parameters of the Rayleigh channel generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FadingSpec {
    pub antenna_count: usize,
    pub user_distances: Vec<f64>,
    pub path_loss_exponent: f64,
    pub seed: u64,
}

impl FadingSpec {
    pub fn new(
        antenna_count: usize,
        user_distances: Vec<f64>,
        path_loss_exponent: f64,
        seed: u64,
    ) -> Result<Self> {
        let spec = Self {
            antenna_count,
            user_distances,
            path_loss_exponent,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.antenna_count == 0 {
            return invalid("antenna_count must be at least 1");
        }
        if !(self.path_loss_exponent >= 0.0 && self.path_loss_exponent.is_finite()) {
            return invalid("path_loss_exponent must be finite and nonnegative");
        }
        if self
            .user_distances
            .iter()
            .any(|&d| !(d > 0.0 && d.is_finite()))
        {
            return invalid("user distances must be finite and positive");
        }
        Ok(())
    }

    pub fn user_count(&self) -> usize {
        self.user_distances.len()
    }

    /// Average per-entry power `d^-n` of user `user_index`.
    pub fn mean_gain(&self, user_index: usize) -> Result<f64> {
        let d = self.distance(user_index)?;
        Ok(d.powf(-self.path_loss_exponent))
    }

    /// Same spec with a different antenna count.
    pub fn with_antennas(&self, antenna_count: usize) -> Self {
        Self {
            antenna_count,
            ..self.clone()
        }
    }

    /// Same spec with a different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    fn distance(&self, user_index: usize) -> Result<f64> {
        self.user_distances
            .get(user_index)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index: user_index,
                len: self.user_distances.len(),
            })
    }
}

/// Draws the channel vector of user `user_index` (0-based).
///
/// Identical `(spec, user_index)` always yields the identical vector.
pub fn draw_channel(spec: &FadingSpec, user_index: usize) -> Result<ComplexVector> {
    spec.validate()?;
    let amplitude = (0.5 * spec.mean_gain(user_index)?).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(user_index as u64);
    let entries = (0..spec.antenna_count)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * amplitude, im * amplitude)
        })
        .collect();
    ComplexVector::new(entries)
}

/// Decorrelates a base seed and a trial index into a per-trial seed
/// (SplitMix64 finalizer applied to `seed + (index + 1)·φ`).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
