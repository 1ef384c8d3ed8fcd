//! Dispatch from a validated config to the library experiments.
//!
//! Every experiment returns its records in a fixed order (grid order or
//! replicate index), so identical configs give identical payloads.

use anyhow::{Context, Result};
use glab_core::constants::{self, ConstantsOptions, ConstantsReport, WalkBudget};
use glab_core::disorder::{sample_disorder, DisorderRealization, Region};
use glab_core::green::{infinite::green_infinite_many, GreenAccessor};
use glab_core::rng::{derive_seed, Purpose};
use glab_core::sampler::{write_raw_field, DumpHeader, QuenchedSampler};
use glab_core::stats::{
    deviation_experiment, high_point_experiment, max_sweep, repulsion_probability, variance_scan, DeviationConfig,
    RepulsionOptions,
};
use glab_core::{BoxGeometry, Plan};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::*;

/// Records of one run; `failures` counts grid points that errored and
/// were reported in place of a record.
pub struct Payload {
    pub records: Vec<Value>,
    pub failures: usize,
}

impl Payload {
    fn of<T: Serialize>(records: impl IntoIterator<Item = T>) -> Result<Self> {
        Ok(Payload {
            records: records
                .into_iter()
                .map(serde_json::to_value)
                .collect::<serde_json::Result<_>>()?,
            failures: 0,
        })
    }

    /// One record per grid point; a failing point becomes an error record.
    fn per_point<T: Serialize, E: std::fmt::Display>(
        points: impl IntoIterator<Item = (Value, std::result::Result<T, E>)>,
    ) -> Result<Self> {
        let mut records = Vec::new();
        let mut failures = 0;
        for (at, r) in points {
            match r {
                Ok(rec) => records.push(serde_json::to_value(rec)?),
                Err(e) => {
                    failures += 1;
                    records.push(json!({ "at": at, "error": e.to_string() }));
                }
            }
        }
        Ok(Payload { records, failures })
    }
}

/// Disorder seed of a run: fixed by the master seed, shared by all `N`.
fn disorder_seed(seed: u64) -> u64 {
    derive_seed(seed, Purpose::Disorder, 0)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Payload> {
    let seed = cfg.seed;
    match &cfg.params {
        Params::Constants(p) => {
            let opts = ConstantsOptions {
                tol: p.tol,
                l_values: p.l_values.clone(),
                capacity_eps: p.capacity_eps.clone(),
                capacity_scales: p.capacity_scales.clone(),
                budget: WalkBudget {
                    walks_per_site: p.walks_per_site,
                    step_factor: p.step_factor,
                    seed,
                },
            };
            Payload::of([ConstantsReport::compute(p.d, p.tail, &opts)?])
        }
        Params::Green(p) => match p.n {
            Some(n) => {
                let acc = GreenAccessor::<f64>::for_box(BoxGeometry::new(p.d, n)?);
                let origin = vec![0; p.d];
                let rows = p
                    .sites
                    .iter()
                    .map(|x| {
                        let v = acc.green_finite(&origin, x)?;
                        Ok(json!({ "d": p.d, "n": n, "x": x, "value": v }))
                    })
                    .collect::<glab_core::Result<Vec<_>>>()?;
                Payload::of(rows)
            }
            None => {
                let est = green_infinite_many(p.d, &p.sites, p.tol)?;
                Payload::of(p.sites.iter().zip(est).map(|(x, e)| {
                    json!({
                        "d": p.d,
                        "x": x,
                        "value": e.value,
                        "error_bound": e.error_bound,
                        "box_radius_used": e.box_radius_used,
                    })
                }))
            }
        },
        Params::VarianceScan(p) => Payload::of(variance_scan(&p.d.to_vec(), &p.n_grid, p.sigma2)?),
        Params::SampleField(p) => sample_field(p, seed),
        Params::MaxSweep(p) => {
            let dseed = disorder_seed(seed);
            Payload::per_point(p.n_grid.iter().map(|&n| {
                let rec = BoxGeometry::new(p.d, n).and_then(|g| {
                    let plan = Plan::new(g);
                    let eta = sample_disorder(g, p.tail, dseed)?;
                    max_sweep(&plan, &eta, p.samples, seed)
                });
                (json!({ "n": n }), rec)
            }))
        }
        Params::Deviation(p) => {
            let k = match p.k {
                Some(k) => Some(k),
                None => Some(
                    constants::compute_k(
                        &p.tail,
                        constants::g_star(p.d, p.tol)?,
                        constants::g_star_alpha_finite(p.d, &p.tail, p.l, p.tol)?,
                    )?
                    .value,
                ),
            };
            let cfg = DeviationConfig {
                d: p.d,
                l: p.l,
                n_grid: p.n_grid.clone(),
                b_grid: p.b_grid.clone(),
                region: match p.region {
                    RegionName::Near => Region::Near(p.l),
                    RegionName::Far => Region::Far(p.l),
                    RegionName::Full => Region::Full,
                },
                tail: p.tail,
                replicates: p.replicates,
                seed,
                two_sided: p.two_sided,
                k,
                slope_tolerance: p.slope_tolerance,
            };
            Payload::of([deviation_experiment(&cfg)?])
        }
        Params::Highpoints(p) => {
            let k = match p.k {
                Some(k) => k,
                None => {
                    let g = constants::g_star(p.d, p.tol)?;
                    let gsa = constants::g_star_alpha_for(p.d, &p.tail, p.tol)?;
                    constants::compute_k(&p.tail, g, gsa)?.value
                }
            };
            let g = BoxGeometry::new(p.d, p.n)?;
            Payload::of([high_point_experiment(
                g,
                p.tail,
                &p.b_values,
                k,
                p.slack,
                p.draws,
                seed,
            )?])
        }
        Params::Repulsion(p) => {
            let dseed = disorder_seed(seed);
            let mut points = Vec::new();
            for &n in &p.n_grid {
                let setup = BoxGeometry::new(p.d, n).and_then(|g| {
                    let eta = match p.tail {
                        Some(t) => sample_disorder(g, t, dseed)?,
                        None => DisorderRealization::zero(g),
                    };
                    Ok((Plan::new(g), eta))
                });
                for &estimator in &p.estimators {
                    let rec = setup.as_ref().map_err(|e| e.to_string()).and_then(|(plan, eta)| {
                        let opts = RepulsionOptions {
                            shrink: p.eps,
                            estimator,
                            replicates: p.replicates,
                            seed,
                            shift: None,
                        };
                        repulsion_probability(plan, eta, &opts).map_err(|e| e.to_string())
                    });
                    points.push((json!({ "n": n, "estimator": estimator }), rec));
                }
            }
            Payload::per_point(points)
        }
    }
}

fn sample_field(p: &SampleFieldParams, seed: u64) -> Result<Payload> {
    let g = BoxGeometry::new(p.d, p.n)?;
    let plan = Plan::new(g);
    let eta = match p.tail {
        Some(t) => sample_disorder(g, t, disorder_seed(seed))?,
        None => DisorderRealization::zero(g),
    };
    let sampler = QuenchedSampler::new(&plan, &eta)?;
    let origin = g.origin_index();
    let mut records = Vec::with_capacity(p.samples);
    for i in 0..p.samples {
        let field_seed = derive_seed(seed, Purpose::Field, i as u64);
        let s = sampler.draw(field_seed);
        let dump = match &p.dump {
            None => None,
            Some(prefix) => {
                let path = prefix.with_file_name(format!(
                    "{}.{i}.f64",
                    prefix.file_name().map(|f| f.to_string_lossy()).unwrap_or_default()
                ));
                let header = DumpHeader {
                    geometry: g,
                    disorder_seed: s.disorder_seed,
                    field_seed,
                    tail: p.tail,
                    component: "phi".into(),
                    dtype: "f64le".into(),
                    order: "row-major, last coordinate fastest".into(),
                };
                write_raw_field(&path, &s.phi, &header).with_context(|| format!("writing {}", path.display()))?;
                Some(path)
            }
        };
        records.push(json!({
            "index": i,
            "d": p.d,
            "n": p.n,
            "disorder_seed": s.disorder_seed,
            "field_seed": field_seed,
            "max": s.phi.max(),
            "min": s.phi.min(),
            "origin": s.phi.values()[origin],
            "mean_origin": s.mean_part.values()[origin],
            "dump": dump,
        }));
    }
    Payload::of(records)
}
