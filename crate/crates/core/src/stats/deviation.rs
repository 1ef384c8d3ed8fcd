//! Deviation probabilities of Green-weighted disorder sums.
//!
//! For each box radius `N` and level `b` the experiment estimates
//! `P(S_A(0) ≥ (b log N)^{1/α})` where `S_A(0) = Σ_{y∈A} G_N(0,y) η(y)`
//! and `A` is the near box `Λ_L` or the far region `Λ_N \ Λ_L`, then fits
//! `log P` against `log N` at fixed `b`.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{least_squares, wilson_interval};
use crate::disorder::{Region, TailClass};
use crate::error::{GlabError, Result};
use crate::green::{BoxKernel, GreenAccessor};
use crate::lattice::{BoxGeometry, SubBox};
use crate::rng::{self, Purpose};

/// Cells with fewer exceedances than this are flagged as sparse.
pub const SPARSE_COUNT: u64 = 100;

const CHUNK: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationConfig {
    pub d: usize,
    /// Radius of the near box `Λ_L`.
    pub l: usize,
    pub n_grid: Vec<usize>,
    pub b_grid: Vec<f64>,
    pub region: Region,
    pub tail: TailClass,
    pub replicates: usize,
    pub seed: u64,
    /// Count `|S| ≥ threshold` instead of `S ≥ threshold`.
    #[serde(default)]
    pub two_sided: bool,
    /// Rate constant the fitted slopes are compared against (`-K b`).
    #[serde(default)]
    pub k: Option<f64>,
    /// Relative half-width `ε / (K b)` of the accepted slope bracket.
    #[serde(default = "default_slope_tolerance")]
    pub slope_tolerance: f64,
}

fn default_slope_tolerance() -> f64 {
    0.35
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationCell {
    pub n: usize,
    pub b: f64,
    pub threshold: f64,
    pub count: u64,
    pub total: u64,
    pub p: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub sparse: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub b: f64,
    /// `None` when fewer than two cells have exceedances.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub residuals: Vec<f64>,
    /// `-K b`, when a rate constant was supplied.
    pub target: Option<f64>,
    pub bracket: Option<(f64, f64)>,
    pub within_bracket: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationRecord {
    pub d: usize,
    pub l: usize,
    pub n_grid: Vec<usize>,
    pub b_grid: Vec<f64>,
    pub region: Region,
    pub tail: TailClass,
    pub replicates: usize,
    pub two_sided: bool,
    pub cells: Vec<DeviationCell>,
    pub slopes: Vec<SlopeFit>,
    pub warnings: Vec<String>,
}

/// Weights `G_N(0,y)` over the region for one box radius, in site order.
pub fn region_weights(d: usize, l: usize, n: usize, region: Region) -> Result<Vec<f64>> {
    match region {
        Region::Near(_) => {
            let near = BoxGeometry::new(d, l)?;
            let sites: Vec<Vec<i64>> = near.sites().collect();
            BoxKernel::new(d, n)?.green_from_origin(&sites)
        }
        Region::Far(_) | Region::Full => {
            let g = BoxGeometry::new(d, n)?;
            let acc = GreenAccessor::<f64>::for_box(g);
            let col = acc.column(&vec![0; d])?;
            if region == Region::Full {
                return Ok(col.values().to_vec());
            }
            let near = SubBox::new(g, vec![0; d], l)?;
            Ok(col
                .values()
                .iter()
                .zip(g.sites())
                .filter(|(_, s)| !near.contains(s))
                .map(|(v, _)| *v)
                .collect())
        }
    }
}

fn weighted_draw(weights: &[f64], tail: &TailClass, rng: &mut ChaCha8Rng) -> f64 {
    weights.iter().map(|w| w * tail.draw(rng)).sum()
}

pub fn deviation_experiment(cfg: &DeviationConfig) -> Result<DeviationRecord> {
    cfg.tail.validate()?;
    if cfg.n_grid.is_empty() || cfg.b_grid.is_empty() {
        return Err(GlabError::param("grid", "N and b grids must be nonempty"));
    }
    let min_n = *cfg.n_grid.iter().min().unwrap();
    if cfg.l > min_n {
        return Err(GlabError::param(
            "L",
            format!("{} exceeds the smallest N = {min_n}", cfg.l),
        ));
    }
    if min_n < 2 {
        return Err(GlabError::param("N", "log N thresholds need N >= 2"));
    }
    if cfg.b_grid.iter().any(|&b| b.is_nan() || b <= 0.0) {
        return Err(GlabError::param("b", "levels must be positive"));
    }
    if cfg.replicates == 0 {
        return Err(GlabError::EmptyStream);
    }
    let region = match cfg.region {
        Region::Near(_) => Region::Near(cfg.l),
        Region::Far(_) => Region::Far(cfg.l),
        Region::Full => Region::Full,
    };
    let alpha = cfg.tail.effective_alpha();
    let weights = cfg
        .n_grid
        .iter()
        .map(|&n| region_weights(cfg.d, cfg.l, n, region))
        .collect::<Result<Vec<_>>>()?;
    let thresholds: Vec<Vec<f64>> = cfg
        .n_grid
        .iter()
        .map(|&n| {
            cfg.b_grid
                .iter()
                .map(|b| (b * (n as f64).ln()).powf(1.0 / alpha))
                .collect()
        })
        .collect();

    let (nn, nb) = (cfg.n_grid.len(), cfg.b_grid.len());
    let shared_near = matches!(region, Region::Near(_));
    let chunks = cfg.replicates.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = vec![0u64; nn * nb];
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(cfg.replicates);
            for rep in lo..hi {
                let rep_seed = rng::derive_seed(cfg.seed, Purpose::Disorder, rep as u64);
                // the near box is the same set of sites for every N, so one
                // draw of η serves the whole grid
                let near_eta: Option<Vec<f64>> = shared_near.then(|| {
                    let mut r = rng::stream(rep_seed, Purpose::Replicate, 0);
                    (0..weights[0].len()).map(|_| cfg.tail.draw(&mut r)).collect()
                });
                for (i, w) in weights.iter().enumerate() {
                    let s = match &near_eta {
                        Some(eta) => w.iter().zip(eta).map(|(a, b)| a * b).sum(),
                        None => weighted_draw(
                            w,
                            &cfg.tail,
                            &mut rng::stream(rep_seed, Purpose::Replicate, 1 + i as u64),
                        ),
                    };
                    let s = if cfg.two_sided { s.abs() } else { s };
                    for (j, &t) in thresholds[i].iter().enumerate() {
                        if s >= t {
                            local[i * nb + j] += 1;
                        }
                    }
                }
            }
            local
        })
        .reduce(
            || vec![0u64; nn * nb],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let total = cfg.replicates as u64;
    let mut cells = Vec::with_capacity(nn * nb);
    let mut warnings = Vec::new();
    for (i, &n) in cfg.n_grid.iter().enumerate() {
        for (j, &b) in cfg.b_grid.iter().enumerate() {
            let count = counts[i * nb + j];
            let (ci_low, ci_high) = wilson_interval(count, total, 1.96);
            cells.push(DeviationCell {
                n,
                b,
                threshold: thresholds[i][j],
                count,
                total,
                p: count as f64 / total as f64,
                ci_low,
                ci_high,
                sparse: count < SPARSE_COUNT,
            });
        }
    }
    let loosest = cells.iter().map(|c| c.count).max().unwrap_or(0);
    if loosest < SPARSE_COUNT {
        warnings.push(format!(
            "only {loosest} exceedances at the loosest (N, b) cell; increase replicates"
        ));
    }

    let slopes = cfg
        .b_grid
        .iter()
        .map(|&b| {
            let pts: Vec<(f64, f64)> = cells
                .iter()
                .filter(|c| c.b == b && c.count > 0)
                .map(|c| ((c.n as f64).ln(), c.p.ln()))
                .collect();
            let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
            let fit = least_squares(&x, &y);
            let target = cfg.k.map(|k| -k * b);
            let bracket = target.map(|t| (t * (1.0 + cfg.slope_tolerance), t * (1.0 - cfg.slope_tolerance)));
            let within = match (&fit, bracket) {
                (Some(f), Some((lo, hi))) => Some(lo <= f.slope && f.slope <= hi),
                _ => None,
            };
            if fit.is_none() {
                warnings.push(format!("b = {b}: fewer than two resolved cells, no slope"));
            }
            SlopeFit {
                b,
                slope: fit.as_ref().map(|f| f.slope),
                intercept: fit.as_ref().map(|f| f.intercept),
                residuals: fit.map(|f| f.residuals).unwrap_or_default(),
                target,
                bracket,
                within_bracket: within,
            }
        })
        .collect();

    Ok(DeviationRecord {
        d: cfg.d,
        l: cfg.l,
        n_grid: cfg.n_grid.clone(),
        b_grid: cfg.b_grid.clone(),
        region,
        tail: cfg.tail,
        replicates: cfg.replicates,
        two_sided: cfg.two_sided,
        cells,
        slopes,
        warnings,
    })
}
