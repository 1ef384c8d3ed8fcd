//! Hard-wall probability `μ_N^η(φ ≥ 0 on Λ_{⌊(1-ε)N⌋})`.
//!
//! The plain estimator counts hits. The mean-shift estimator draws
//! `φ + h` and reweights each hit by the Cameron–Martin density; the
//! default `h` solves `(-Δ_N) h = 1_inner` and is scaled so that
//! `m + h` is at least one on the inner box.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disorder::{mean_field, DisorderRealization, TailClass};
use crate::error::{GlabError, Result};
use crate::lattice::ScalarField;
use crate::rng::{self, Purpose};
use crate::spectral::{ShiftTilt, SpectralPlan};

/// Hits needed before an estimator is considered to resolve the probability.
pub const RESOLVED_HITS: u64 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Plain,
    MeanShift,
}

#[derive(Clone, Debug)]
pub struct RepulsionOptions {
    pub shrink: f64,
    pub estimator: Estimator,
    pub replicates: usize,
    pub seed: u64,
    /// Mean shift; [`default_shift`] when `None`.
    pub shift: Option<ScalarField<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepulsionRecord {
    pub d: usize,
    pub n: usize,
    pub eps: f64,
    pub inner_radius: usize,
    pub tail: TailClass,
    pub estimator: Estimator,
    pub replicates: usize,
    pub hits: u64,
    pub estimate: f64,
    pub se: f64,
    /// `log estimate`, absent when no hit was observed.
    pub log_estimate: Option<f64>,
    /// `(Σ w)² / Σ w²` over hits.
    pub effective_sample_size: f64,
    /// One-sided 95% upper bound, reported when no hit was observed.
    pub upper_bound: Option<f64>,
    pub resolved: bool,
    pub warnings: Vec<String>,
}

impl RepulsionRecord {
    /// Whether two estimates agree within `k` combined standard errors.
    pub fn agrees_with(&self, other: &RepulsionRecord, k: f64) -> bool {
        let se = (self.se * self.se + other.se * other.se).sqrt();
        (self.estimate - other.estimate).abs() <= k * se
    }
}

/// `c · (-Δ_N)^{-1} 1_inner`, with `c` chosen so that `m + h ≥ 1` on the
/// inner box wherever the unscaled profile allows.
pub fn default_shift(plan: &SpectralPlan<f64>, mean: &ScalarField<f64>, shrink: f64) -> Result<ScalarField<f64>> {
    let g = *plan.geometry();
    let inner = g.inner_box_sites(shrink)?;
    let mut indicator = ScalarField::<f64>::zeros(g);
    for s in &inner {
        indicator.values_mut()[g.index(s)?] = 1.0;
    }
    let profile = plan.solve_poisson(&indicator)?;
    let mut scale: f64 = 0.0;
    for s in &inner {
        let i = g.index(s)?;
        let need = 1.0 - mean.values()[i];
        scale = scale.max(need / profile.values()[i]);
    }
    Ok(profile.scale(scale))
}

pub fn repulsion_probability(
    plan: &SpectralPlan<f64>,
    eta: &DisorderRealization<f64>,
    opts: &RepulsionOptions,
) -> Result<RepulsionRecord> {
    let g = *plan.geometry();
    if opts.replicates < 2 {
        return Err(GlabError::param("replicates", "need at least two replicates"));
    }
    let inner_radius = g.inner_radius(opts.shrink)?;
    let inner: Vec<usize> = g
        .inner_box_sites(opts.shrink)?
        .iter()
        .map(|s| g.index(s))
        .collect::<Result<_>>()?;
    let mean = mean_field(plan, eta)?;
    let floor: Vec<f64> = inner.iter().map(|&i| -mean.values()[i]).collect();

    let tilt = match opts.estimator {
        Estimator::Plain => None,
        Estimator::MeanShift => {
            let h = match &opts.shift {
                Some(h) => {
                    g.same_as(h.geometry())?;
                    h.clone()
                }
                None => default_shift(plan, &mean, opts.shrink)?,
            };
            Some(ShiftTilt::new(plan, &h)?)
        }
    };

    // per replicate: log weight of a hit, or None for a miss
    let outcomes: Vec<Option<f64>> = (0..opts.replicates as u64)
        .into_par_iter()
        .map(|i| {
            let phi = plan.sample_gff_with(&mut rng::stream(opts.seed, Purpose::Field, i));
            let (phi, log_w) = match &tilt {
                Some(t) => t.shift(phi),
                None => (phi, 0.0),
            };
            let v = phi.values();
            let hit = inner.iter().zip(&floor).all(|(&k, &f)| v[k] >= f);
            hit.then_some(log_w)
        })
        .collect();

    let n = opts.replicates as f64;
    let logs: Vec<f64> = outcomes.iter().flatten().copied().collect();
    let hits = logs.len() as u64;
    let mut warnings = Vec::new();
    let (estimate, se, log_estimate, ess, upper_bound) = if logs.is_empty() {
        warnings.push(format!(
            "no hits in {} replicates; only an upper bound is reported",
            opts.replicates
        ));
        let ub = match opts.estimator {
            Estimator::Plain => Some(1.0 - 0.05f64.powf(1.0 / n)),
            Estimator::MeanShift => None,
        };
        (0.0, 0.0, None, 0.0, ub)
    } else {
        // sums in units of the largest weight, so tiny probabilities stay finite
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let s1: f64 = logs.iter().map(|l| (l - top).exp()).sum();
        let s2: f64 = logs.iter().map(|l| (2.0 * (l - top)).exp()).sum();
        let log_mean = top + s1.ln() - n.ln();
        let mean_scaled = s1 / n;
        let var_scaled = ((s2 / n - mean_scaled * mean_scaled) * n / (n - 1.0)).max(0.0);
        let se = top.exp() * (var_scaled / n).sqrt();
        (log_mean.exp(), se, Some(log_mean), s1 * s1 / s2, None)
    };

    Ok(RepulsionRecord {
        d: g.dim(),
        n: g.radius(),
        eps: opts.shrink,
        inner_radius,
        tail: eta.tail,
        estimator: opts.estimator,
        replicates: opts.replicates,
        hits,
        estimate,
        se,
        log_estimate,
        effective_sample_size: ess,
        upper_bound,
        resolved: hits >= RESOLVED_HITS,
        warnings,
    })
}
