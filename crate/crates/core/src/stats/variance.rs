//! Deterministic variances at the origin from exact spectral sums.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::green::origin_spectral_sum;
use crate::lattice::BoxGeometry;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub d: usize,
    pub n: usize,
    /// `Var_P(m_N(0)) = σ² (-Δ_N)^{-2}(0,0)`
    pub var_m: f64,
    /// `Var(φ(0)) = G_N(0,0)`
    pub var_phi: f64,
}

/// Rows in `(d, N)` order; `sigma2` is the disorder variance. Every box
/// must pass the volume cap.
pub fn variance_scan(dims: &[usize], radii: &[usize], sigma2: f64) -> Result<Vec<VarianceRow>> {
    let mut rows = Vec::with_capacity(dims.len() * radii.len());
    for &d in dims {
        for &n in radii {
            let g = BoxGeometry::new(d, n)?;
            rows.push(VarianceRow {
                d,
                n,
                var_m: sigma2 * origin_spectral_sum(&g, 2),
                var_phi: origin_spectral_sum(&g, 1),
            });
        }
    }
    Ok(rows)
}
