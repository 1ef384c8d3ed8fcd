//! Exact samplers for the quenched and annealed measures.
//!
//! Under `μ_N^η` the field is Gaussian with covariance `(-Δ_N)^{-1}` and
//! mean `m_N^η = (-Δ_N)^{-1} η`, so a quenched draw is a GFF draw plus a
//! fixed mean profile.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::disorder::{mean_field, sample_disorder, DisorderRealization, TailClass};
use crate::error::Result;
use crate::lattice::{BoxGeometry, ScalarField};
use crate::scalar::Real;
use crate::spectral::SpectralPlan;

/// One draw `φ = gff_part + mean_part` from `μ_N^η`.
#[derive(Clone, Debug)]
pub struct QuenchedSample<T: Real> {
    pub phi: ScalarField<T>,
    pub mean_part: ScalarField<T>,
    pub gff_part: ScalarField<T>,
    pub disorder_seed: u64,
    pub field_seed: u64,
}

impl<T: Real> QuenchedSample<T> {
    pub fn geometry(&self) -> &BoxGeometry {
        self.phi.geometry()
    }
}

/// Quenched sampler for one fixed disorder realisation; the mean profile
/// is solved once and shared by every draw.
pub struct QuenchedSampler<'a, T: Real> {
    plan: &'a SpectralPlan<T>,
    mean: ScalarField<T>,
    disorder_seed: u64,
}

impl<'a, T: Real> QuenchedSampler<'a, T> {
    pub fn new(plan: &'a SpectralPlan<T>, eta: &DisorderRealization<T>) -> Result<Self> {
        Ok(QuenchedSampler {
            plan,
            mean: mean_field(plan, eta)?,
            disorder_seed: eta.seed,
        })
    }

    pub fn mean(&self) -> &ScalarField<T> {
        &self.mean
    }

    pub fn plan(&self) -> &SpectralPlan<T> {
        self.plan
    }

    pub fn draw(&self, field_seed: u64) -> QuenchedSample<T> {
        let gff = self.plan.sample_gff(field_seed);
        let phi = gff.add(&self.mean).expect("mean solved on the plan geometry");
        QuenchedSample {
            phi,
            mean_part: self.mean.clone(),
            gff_part: gff,
            disorder_seed: self.disorder_seed,
            field_seed,
        }
    }
}

/// One exact draw from `μ_N^η`.
pub fn sample_quenched<T: Real>(
    plan: &SpectralPlan<T>,
    eta: &DisorderRealization<T>,
    field_seed: u64,
) -> Result<QuenchedSample<T>> {
    Ok(QuenchedSampler::new(plan, eta)?.draw(field_seed))
}

/// A draw of `(η, φ)` under `P ⊗ μ_N`, returned as `φ + m_N^η`.
pub fn sample_annealed<T: Real>(
    plan: &SpectralPlan<T>,
    tail: TailClass,
    disorder_seed: u64,
    field_seed: u64,
) -> Result<QuenchedSample<T>> {
    let eta = sample_disorder(*plan.geometry(), tail, disorder_seed)?;
    sample_quenched(plan, &eta, field_seed)
}

/// JSON sidecar describing a raw field dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpHeader {
    pub geometry: BoxGeometry,
    pub disorder_seed: u64,
    pub field_seed: u64,
    pub tail: Option<TailClass>,
    pub component: String,
    pub dtype: String,
    pub order: String,
}

/// Writes `field` as flat little-endian `f64` in index order to `path` and
/// the header to `path` with `.json` appended. Returns the sidecar path.
pub fn write_raw_field<T: Real>(path: &Path, field: &ScalarField<T>, header: &DumpHeader) -> Result<PathBuf> {
    let mut out = BufWriter::new(File::create(path)?);
    for v in field.values() {
        out.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    out.flush()?;
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".json");
    let sidecar = PathBuf::from(sidecar);
    std::fs::write(&sidecar, serde_json::to_vec_pretty(header)?)?;
    Ok(sidecar)
}

/// Reads a dump written by [`write_raw_field`].
pub fn read_raw_field(path: &Path) -> Result<(ScalarField<f64>, DumpHeader)> {
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".json");
    let header: DumpHeader = serde_json::from_slice(&std::fs::read(PathBuf::from(sidecar))?)?;
    let bytes = std::fs::read(path)?;
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let field = ScalarField::from_values(header.geometry, values)?;
    Ok((field, header))
}
