//! High points of the disorder-induced mean `m_N^η`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mean;
use crate::disorder::{mean_field, sample_disorder, TailClass};
use crate::error::{GlabError, Result};
use crate::lattice::{BoxGeometry, ScalarField};
use crate::rng::{self, Purpose};
use crate::scalar::Real;
use crate::spectral::SpectralPlan;

/// `(b log N)^{1/α}` for a stretched-exponential or Gaussian tail.
pub fn high_point_threshold(tail: &TailClass, b: f64, n: usize) -> Result<f64> {
    let rate = tail.rate().ok_or_else(|| {
        GlabError::WrongTailClass(format!(
            "high-point counts need a stretched-exponential or Gaussian tail, got {tail}; \
             use max_mean_field for bounded disorder"
        ))
    })?;
    if b.is_nan() || b <= 0.0 {
        return Err(GlabError::param("b", format!("{b} must be positive")));
    }
    Ok((b * (n as f64).ln()).powf(1.0 / rate.alpha))
}

/// `|{x ∈ Λ_N : m(x) ≥ (b log N)^{1/α}}|`.
pub fn high_point_count<T: Real>(m: &ScalarField<T>, tail: &TailClass, b: f64, n: usize) -> Result<usize> {
    let t = high_point_threshold(tail, b, n)?;
    Ok(m.values().iter().filter(|v| v.to_f64_lossy() >= t).count())
}

pub fn max_mean_field<T: Real>(m: &ScalarField<T>) -> f64 {
    m.max().to_f64_lossy()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HighPointLevel {
    pub b: f64,
    pub threshold: f64,
    pub mean_count: f64,
    pub counts: Vec<usize>,
    /// `N^{d - K b + slack}`
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HighPointRecord {
    pub d: usize,
    pub n: usize,
    pub tail: TailClass,
    pub draws: usize,
    pub k: f64,
    pub slack: f64,
    pub levels: Vec<HighPointLevel>,
    /// `max m / (log N)^{1/α}` per draw.
    pub normalized_max_mean_field: Vec<f64>,
    /// `(d/K)^{1/α}` and `((d+1)/K)^{1/α}`.
    pub band: (f64, f64),
}

/// Counts high points of `m_N^η` over `draws` independent disorder
/// realisations and compares the mean count with `N^{d-Kb+slack}`.
pub fn high_point_experiment(
    geometry: BoxGeometry,
    tail: TailClass,
    b_values: &[f64],
    k: f64,
    slack: f64,
    draws: usize,
    master_seed: u64,
) -> Result<HighPointRecord> {
    let rate = tail
        .rate()
        .ok_or_else(|| GlabError::WrongTailClass(format!("high-point counts need (A_α) disorder, got {tail}")))?;
    if draws == 0 {
        return Err(GlabError::EmptyStream);
    }
    let n = geometry.radius();
    let d = geometry.dim();
    let thresholds = b_values
        .iter()
        .map(|&b| high_point_threshold(&tail, b, n))
        .collect::<Result<Vec<_>>>()?;
    let plan = SpectralPlan::<f64>::new(geometry);
    let per_draw: Vec<(Vec<usize>, f64)> = (0..draws as u64)
        .into_par_iter()
        .map(|i| {
            let eta = sample_disorder(geometry, tail, rng::derive_seed(master_seed, Purpose::Disorder, i))?;
            let m = mean_field(&plan, &eta)?;
            let counts = thresholds
                .iter()
                .map(|&t| m.values().iter().filter(|&&v| v >= t).count())
                .collect();
            Ok((counts, max_mean_field(&m)))
        })
        .collect::<Result<_>>()?;

    let log_n = (n as f64).ln();
    let levels = b_values
        .iter()
        .zip(&thresholds)
        .enumerate()
        .map(|(j, (&b, &threshold))| {
            let counts: Vec<usize> = per_draw.iter().map(|(c, _)| c[j]).collect();
            let mean_count = mean(&counts.iter().map(|&c| c as f64).collect::<Vec<_>>());
            let bound = (n as f64).powf(d as f64 - k * b + slack);
            HighPointLevel {
                b,
                threshold,
                mean_count,
                counts,
                bound,
                within_bound: mean_count <= bound,
            }
        })
        .collect();
    let inv = 1.0 / rate.alpha;
    Ok(HighPointRecord {
        d,
        n,
        tail,
        draws,
        k,
        slack,
        levels,
        normalized_max_mean_field: per_draw.iter().map(|(_, m)| m / log_n.powf(inv)).collect(),
        band: ((d as f64 / k).powf(inv), ((d + 1) as f64 / k).powf(inv)),
    })
}
