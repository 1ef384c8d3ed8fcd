//! Maxima of quenched samples, normalised by `(log N)^{1/(α∧2)}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mean, quantile};
use crate::disorder::{DisorderRealization, TailClass};
use crate::error::{GlabError, Result};
use crate::lattice::BoxGeometry;
use crate::rng::{self, Purpose};
use crate::sampler::{QuenchedSample, QuenchedSampler};
use crate::scalar::Real;
use crate::spectral::SpectralPlan;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxSweepRecord {
    pub d: usize,
    pub n: usize,
    pub tail: TailClass,
    pub disorder_seed: u64,
    pub samples: usize,
    /// `(log N)^{1/(α∧2)}`
    pub normalizer: f64,
    pub mean: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    /// `max m_N^η / normalizer` (the same for every sample of one η).
    pub mean_field_max: f64,
    /// Mean over samples of `max(GFF part) / normalizer`.
    pub gff_max_mean: f64,
    /// Samples in which `max m` exceeds `max(GFF part)`.
    pub mean_field_dominates: usize,
    /// Per-sample normalised maxima in field-seed order.
    pub normalized_maxima: Vec<f64>,
}

/// `(log N)^{1/(α∧2)}`, defined for `N ≥ 2`.
pub fn normalizer(n: usize, tail: &TailClass) -> Result<f64> {
    if n < 2 {
        return Err(GlabError::param("N", "log N normalisation needs N >= 2"));
    }
    Ok((n as f64).ln().powf(tail.log_exponent()))
}

/// Per-sample maxima of the field and of its two parts.
#[derive(Clone, Copy, Debug)]
struct SampleMaxima {
    phi: f64,
    mean: f64,
    gff: f64,
}

impl SampleMaxima {
    fn of<T: Real>(s: &QuenchedSample<T>) -> Self {
        SampleMaxima {
            phi: s.phi.max().to_f64_lossy(),
            mean: s.mean_part.max().to_f64_lossy(),
            gff: s.gff_part.max().to_f64_lossy(),
        }
    }
}

fn summarise(
    geometry: &BoxGeometry,
    tail: &TailClass,
    disorder_seed: u64,
    per_sample: &[SampleMaxima],
) -> Result<MaxSweepRecord> {
    if per_sample.is_empty() {
        return Err(GlabError::EmptyStream);
    }
    let z = normalizer(geometry.radius(), tail)?;
    let normalized_maxima: Vec<f64> = per_sample.iter().map(|s| s.phi / z).collect();
    let gff: Vec<f64> = per_sample.iter().map(|s| s.gff / z).collect();
    let mut sorted = normalized_maxima.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(MaxSweepRecord {
        d: geometry.dim(),
        n: geometry.radius(),
        tail: *tail,
        disorder_seed,
        samples: sorted.len(),
        normalizer: z,
        mean: mean(&sorted),
        q05: quantile(&sorted, 0.05),
        q50: quantile(&sorted, 0.5),
        q95: quantile(&sorted, 0.95),
        mean_field_max: per_sample.iter().map(|s| s.mean).fold(f64::NEG_INFINITY, f64::max) / z,
        gff_max_mean: mean(&gff),
        mean_field_dominates: per_sample.iter().filter(|s| s.mean > s.gff).count(),
        normalized_maxima,
    })
}

/// Summarises a stream of samples sharing one geometry and disorder law.
pub fn max_statistics<T: Real>(
    samples: impl IntoIterator<Item = QuenchedSample<T>>,
    tail: &TailClass,
) -> Result<MaxSweepRecord> {
    let mut it = samples.into_iter().peekable();
    let first = it.peek().ok_or(GlabError::EmptyStream)?;
    let geometry = *first.geometry();
    let disorder_seed = first.disorder_seed;
    let mut per_sample = Vec::new();
    for s in it {
        geometry.same_as(s.geometry())?;
        per_sample.push(SampleMaxima::of(&s));
    }
    summarise(&geometry, tail, disorder_seed, &per_sample)
}

/// `samples` quenched draws for one fixed `η`, in parallel; field seed `i`
/// is derived from `(master_seed, i)` so the record does not depend on
/// scheduling. Only per-sample maxima are kept.
pub fn max_sweep<T: Real>(
    plan: &SpectralPlan<T>,
    eta: &DisorderRealization<T>,
    samples: usize,
    master_seed: u64,
) -> Result<MaxSweepRecord> {
    let sampler = QuenchedSampler::new(plan, eta)?;
    let mean_max = sampler.mean().max().to_f64_lossy();
    let per_sample: Vec<SampleMaxima> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let gff = plan.sample_gff(rng::derive_seed(master_seed, Purpose::Field, i));
            let phi = gff.add(sampler.mean()).expect("same geometry");
            SampleMaxima {
                phi: phi.max().to_f64_lossy(),
                mean: mean_max,
                gff: gff.max().to_f64_lossy(),
            }
        })
        .collect();
    summarise(plan.geometry(), &eta.tail, eta.seed, &per_sample)
}
