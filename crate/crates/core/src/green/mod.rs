//! Lattice Green functions.
//!
//! * [`GreenAccessor`]: exact `G_N(x, ·)` columns of a box by Poisson solves,
//!   cached per source site.
//! * [`heat::BoxKernel`]: point values of `G_N` for boxes too large to store.
//! * [`infinite`]: `G(0, x)` on `Z^d` by monotone box bracketing, the lattice
//!   sums `G*_{(α)}` and the asymptotic constant `a_d`.

pub mod heat;
pub mod infinite;

use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use lru::LruCache;

use crate::error::Result;
use crate::lattice::{BoxGeometry, ScalarField};
use crate::scalar::Real;
use crate::spectral::SpectralPlan;

pub use heat::BoxKernel;
pub use infinite::{asymptotic_constant, g_star_alpha, green_infinite, GreenTable, InfiniteGreenEstimate, SumRange};

const DEFAULT_CACHED_COLUMNS: usize = 64;

/// Finite-volume Green function `G_N = (-Δ_N)^{-1}` of one box.
pub struct GreenAccessor<T: Real> {
    plan: Arc<SpectralPlan<T>>,
    columns: Mutex<LruCache<usize, Arc<ScalarField<T>>>>,
}

impl<T: Real> GreenAccessor<T> {
    pub fn new(plan: Arc<SpectralPlan<T>>) -> Self {
        Self::with_capacity(plan, DEFAULT_CACHED_COLUMNS)
    }

    pub fn with_capacity(plan: Arc<SpectralPlan<T>>, columns: usize) -> Self {
        let cap = NonZeroUsize::new(columns.max(1)).unwrap();
        GreenAccessor {
            plan,
            columns: Mutex::new(LruCache::new(cap)),
        }
    }

    pub fn for_box(geometry: BoxGeometry) -> Self {
        Self::new(Arc::new(SpectralPlan::new(geometry)))
    }

    pub fn plan(&self) -> &Arc<SpectralPlan<T>> {
        &self.plan
    }

    pub fn geometry(&self) -> &BoxGeometry {
        self.plan.geometry()
    }

    /// The column `G_N(x, ·)`.
    pub fn column(&self, source: &[i64]) -> Result<Arc<ScalarField<T>>> {
        let g = *self.plan.geometry();
        let key = g.index(source)?;
        if let Some(c) = self.columns.lock().unwrap().get(&key) {
            return Ok(Arc::clone(c));
        }
        let col = Arc::new(self.plan.solve_poisson(&ScalarField::delta(g, source)?)?);
        self.columns.lock().unwrap().put(key, Arc::clone(&col));
        Ok(col)
    }

    /// `G_N(x, y)`. In one dimension the closed form
    /// `2 min(i,j)(n+1-max(i,j))/(n+1)` (1-based positions) is used.
    pub fn green_finite(&self, x: &[i64], y: &[i64]) -> Result<T> {
        let g = self.plan.geometry();
        let xi = g.index(x)?;
        let yi = g.index(y)?;
        if g.dim() == 1 {
            let (i, j) = ((xi.min(yi) + 1) as i64, (xi.max(yi) + 1) as i64);
            let n1 = g.side() as i64 + 1;
            return Ok(T::of((2 * i * (n1 - j)) as f64 / n1 as f64));
        }
        Ok(self.column(x)?.values()[yi])
    }

    /// `Σ_{x∈Λ_N} G_N(0,x)²`, summed over the origin column.
    pub fn origin_column_square_sum(&self) -> Result<f64> {
        let col = self.column(&vec![0; self.geometry().dim()])?;
        Ok(col.values().iter().map(|v| v.to_f64_lossy().powi(2)).sum())
    }

    pub fn cached_columns(&self) -> usize {
        self.columns.lock().unwrap().len()
    }
}

/// `(-Δ_N)^{-p}(0,0) = (N+1)^{-d} Σ_{k odd} ν_k^{-p}`, an exact spectral sum.
///
/// Only odd modes see the origin, and there `ψ_k(0)² = (N+1)^{-d}`.
pub fn origin_spectral_sum(geometry: &BoxGeometry, power: i32) -> f64 {
    let n = geometry.radius();
    let d = geometry.dim();
    let n1 = (2 * n + 2) as f64;
    let axis: Vec<f64> = (0..=n)
        .map(|i| 1.0 - (std::f64::consts::PI * (2 * i + 1) as f64 / n1).cos())
        .collect();
    // recursive accumulation over the (N+1)^d odd-mode tuples
    fn walk(axis: &[f64], depth: usize, partial: f64, d: usize, power: i32, acc: &mut f64) {
        if depth == d {
            *acc += (partial / d as f64).powi(-power);
            return;
        }
        for &a in axis {
            walk(axis, depth + 1, partial + a, d, power, acc);
        }
    }
    let mut acc = 0.0;
    walk(&axis, 0, 0.0, d, power, &mut acc);
    acc / ((n + 1) as f64).powi(d as i32)
}
