//! Reproducible i.i.d. non-negative random potentials.
//!
//! Each realization is one ChaCha20 stream: the generator is keyed by the
//! master seed (expanded with `SeedableRng::seed_from_u64`), the stream id is
//! the realization index and the value at site `s` is derived from the
//! `s`-th 64-bit output word. A site value is therefore a pure function of
//! `(seed, realization, site)` and does not depend on evaluation order.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// Uniform on `[0, v_max)`.
    Uniform { v_max: f64 },
    /// `v_max` with probability `p`, otherwise `0`.
    Bernoulli { p: f64, v_max: f64 },
    /// Exponential with the given rate, clipped at `cap`.
    Exponential { rate: f64, cap: f64 },
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        match *self {
            Distribution::Uniform { v_max } => {
                if !finite_nonneg(v_max) {
                    return Err(invalid("v_max", "must be finite and non-negative"));
                }
            }
            Distribution::Bernoulli { p, v_max } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(invalid("p", "must lie in [0, 1]"));
                }
                if !finite_nonneg(v_max) {
                    return Err(invalid("v_max", "must be finite and non-negative"));
                }
            }
            Distribution::Exponential { rate, cap } => {
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(invalid("rate", "must be finite and positive"));
                }
                if !finite_nonneg(cap) {
                    return Err(invalid("cap", "must be finite and non-negative"));
                }
            }
        }
        Ok(())
    }

    /// Largest value the distribution can produce.
    pub fn upper_bound(&self) -> f64 {
        match *self {
            Distribution::Uniform { v_max } | Distribution::Bernoulli { v_max, .. } => v_max,
            Distribution::Exponential { cap, .. } => cap,
        }
    }

    /// Maps a uniform variate in `[0, 1)` to a draw.
    fn transform(&self, u: f64) -> f64 {
        match *self {
            Distribution::Uniform { v_max } => v_max * u,
            Distribution::Bernoulli { p, v_max } => {
                if u < p {
                    v_max
                } else {
                    0.0
                }
            }
            Distribution::Exponential { rate, cap } => (-(-u).ln_1p() / rate).min(cap),
        }
    }
}

impl Default for Distribution {
    fn default() -> Self {
        Distribution::Uniform { v_max: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisorderSpec {
    pub distribution: Distribution,
    pub seed: u64,
    pub realizations: usize,
}

impl DisorderSpec {
    pub fn new(distribution: Distribution, seed: u64, realizations: usize) -> Self {
        Self {
            distribution,
            seed,
            realizations,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.distribution.validate()
    }

    fn stream(&self, realization: usize) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(realization as u64);
        rng
    }
}

/// One disorder realization on the single-particle sites.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    index: usize,
    values: Vec<f64>,
}

impl PotentialField {
    pub fn new(index: usize, values: Vec<f64>) -> Self {
        Self { index, values }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Value at a single site, evaluated without generating the rest of the field.
pub fn site_value(spec: &DisorderSpec, realization: usize, site: usize) -> f64 {
    let mut rng = spec.stream(realization);
    rng.set_word_pos(2 * site as u128);
    spec.distribution.transform(unit_interval(rng.next_u64()))
}

pub fn sample_field(spec: &DisorderSpec, sites: usize, realization: usize) -> Result<PotentialField> {
    spec.validate()?;
    if realization >= spec.realizations {
        return Err(Error::RealizationIndex {
            index: realization,
            count: spec.realizations,
        });
    }
    let mut rng = spec.stream(realization);
    let values = (0..sites)
        .map(|_| spec.distribution.transform(unit_interval(rng.next_u64())))
        .collect();
    Ok(PotentialField::new(realization, values))
}

/// Realizations `0..R` in order.
pub fn stream_realizations(spec: &DisorderSpec, sites: usize) -> impl Iterator<Item = PotentialField> + '_ {
    (0..spec.realizations).map(move |k| sample_field(spec, sites, k).expect("index below realization count"))
}
