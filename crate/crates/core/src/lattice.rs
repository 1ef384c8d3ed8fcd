//! Dirichlet boxes `[-N, N]^d`, sub-boxes and real-valued fields on them.
//!
//! Sites are integer coordinate vectors. The linear index is row-major with
//! each coordinate shifted by `N`, so the last axis is contiguous.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{GlabError, Result};
use crate::scalar::Real;

/// Default upper bound on the number of sites of a box.
pub const DEFAULT_VOLUME_CAP: usize = 1 << 27;

/// Environment variable overriding [`DEFAULT_VOLUME_CAP`].
pub const VOLUME_CAP_ENV: &str = "GLAB_VOLUME_CAP";

/// Volume cap in effect for [`BoxGeometry::new`].
pub fn volume_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(VOLUME_CAP_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_VOLUME_CAP)
    })
}

/// The box `Λ_N = [-N, N]^d ∩ Z^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoxGeometry {
    dim: usize,
    radius: usize,
    side: usize,
    volume: usize,
}

impl BoxGeometry {
    pub fn new(dim: usize, radius: usize) -> Result<Self> {
        Self::with_cap(dim, radius, volume_cap())
    }

    pub fn with_cap(dim: usize, radius: usize, cap: usize) -> Result<Self> {
        if dim == 0 {
            return Err(GlabError::param("d", "dimension must be at least 1"));
        }
        if radius == 0 {
            return Err(GlabError::param("N", "box radius must be at least 1"));
        }
        let side = 2 * radius + 1;
        let volume = (side as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if volume > cap as u128 {
            return Err(GlabError::VolumeCap {
                dim,
                radius,
                volume,
                cap,
            });
        }
        Ok(BoxGeometry {
            dim,
            radius,
            side,
            volume: volume as usize,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn volume(&self) -> usize {
        self.volume
    }

    pub fn contains(&self, site: &[i64]) -> bool {
        let n = self.radius as i64;
        site.len() == self.dim && site.iter().all(|&c| (-n..=n).contains(&c))
    }

    fn check(&self, site: &[i64]) -> Result<()> {
        if self.contains(site) {
            Ok(())
        } else {
            Err(GlabError::OutOfBox {
                site: site.to_vec(),
                radius: self.radius,
            })
        }
    }

    pub fn index(&self, site: &[i64]) -> Result<usize> {
        self.check(site)?;
        Ok(self.index_unchecked(site))
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, site: &[i64]) -> usize {
        let n = self.radius as i64;
        site.iter().fold(0usize, |acc, &c| acc * self.side + (c + n) as usize)
    }

    pub fn site(&self, index: usize) -> Vec<i64> {
        let mut out = vec![0i64; self.dim];
        self.write_site(index, &mut out);
        out
    }

    #[inline]
    pub(crate) fn write_site(&self, mut index: usize, out: &mut [i64]) {
        let n = self.radius as i64;
        for c in out.iter_mut().rev() {
            *c = (index % self.side) as i64 - n;
            index /= self.side;
        }
    }

    pub fn origin_index(&self) -> usize {
        (self.volume - 1) / 2
    }

    pub fn sites(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.volume).map(move |i| self.site(i))
    }

    /// In-box nearest neighbours of `site`; Dirichlet sites outside are omitted.
    pub fn neighbors(&self, site: &[i64]) -> Result<Vec<Vec<i64>>> {
        self.check(site)?;
        let n = self.radius as i64;
        let mut out = Vec::with_capacity(2 * self.dim);
        for axis in 0..self.dim {
            for step in [-1i64, 1] {
                let c = site[axis] + step;
                if (-n..=n).contains(&c) {
                    let mut y = site.to_vec();
                    y[axis] = c;
                    out.push(y);
                }
            }
        }
        Ok(out)
    }

    /// Radius `⌊(1-ε)N⌋` of the inner box used by the hard-wall event.
    pub fn inner_radius(&self, shrink: f64) -> Result<usize> {
        if !(shrink > 0.0 && shrink < 1.0) {
            return Err(GlabError::param("eps", format!("{shrink} not in (0,1)")));
        }
        Ok(((1.0 - shrink) * self.radius as f64).floor() as usize)
    }

    /// Sites of `Λ_{⌊(1-ε)N⌋}`.
    pub fn inner_box_sites(&self, shrink: f64) -> Result<Vec<Vec<i64>>> {
        let r = self.inner_radius(shrink)?;
        Ok(SubBox::new(*self, vec![0; self.dim], r)?.sites().collect())
    }

    pub fn same_as(&self, other: &BoxGeometry) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(GlabError::GeometryMismatch {
                expected_dim: self.dim,
                expected_radius: self.radius,
                dim: other.dim,
                radius: other.radius,
            })
        }
    }
}

/// `Λ_L(x) = x + Λ_L`, clipped to its parent box.
#[derive(Clone, Debug)]
pub struct SubBox {
    parent: BoxGeometry,
    center: Vec<i64>,
    radius: usize,
}

impl SubBox {
    pub fn new(parent: BoxGeometry, center: Vec<i64>, radius: usize) -> Result<Self> {
        if center.len() != parent.dim() {
            return Err(GlabError::param("center", "dimension differs from parent box"));
        }
        Ok(SubBox { parent, center, radius })
    }

    pub fn center(&self) -> &[i64] {
        &self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn parent(&self) -> &BoxGeometry {
        &self.parent
    }

    pub fn contains(&self, site: &[i64]) -> bool {
        self.parent.contains(site)
            && site
                .iter()
                .zip(&self.center)
                .all(|(a, c)| (a - c).unsigned_abs() as usize <= self.radius)
    }

    /// Per-axis inclusive coordinate ranges after clipping.
    fn ranges(&self) -> Vec<(i64, i64)> {
        let n = self.parent.radius() as i64;
        let l = self.radius as i64;
        self.center.iter().map(|&c| ((c - l).max(-n), (c + l).min(n))).collect()
    }

    pub fn sites(&self) -> impl Iterator<Item = Vec<i64>> {
        let ranges = self.ranges();
        let empty = ranges.iter().any(|(lo, hi)| lo > hi);
        let mut cur: Option<Vec<i64>> = if empty {
            None
        } else {
            Some(ranges.iter().map(|r| r.0).collect())
        };
        std::iter::from_fn(move || {
            let out = cur.clone()?;
            let next = cur.as_mut().unwrap();
            let mut axis = ranges.len();
            loop {
                if axis == 0 {
                    cur = None;
                    break;
                }
                axis -= 1;
                if next[axis] < ranges[axis].1 {
                    next[axis] += 1;
                    break;
                }
                next[axis] = ranges[axis].0;
            }
            Some(out)
        })
    }

    pub fn indices(&self) -> Vec<usize> {
        self.sites().map(|s| self.parent.index_unchecked(&s)).collect()
    }
}

/// One real value per site of a box.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<T> {
    geometry: BoxGeometry,
    values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn zeros(geometry: BoxGeometry) -> Self {
        ScalarField {
            geometry,
            values: vec![T::zero(); geometry.volume()],
        }
    }

    pub fn constant(geometry: BoxGeometry, value: T) -> Self {
        ScalarField {
            geometry,
            values: vec![value; geometry.volume()],
        }
    }

    /// Wraps `values`; rejects wrong lengths and non-finite entries.
    pub fn from_values(geometry: BoxGeometry, values: Vec<T>) -> Result<Self> {
        if values.len() != geometry.volume() {
            return Err(GlabError::param(
                "values",
                format!("length {} != volume {}", values.len(), geometry.volume()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GlabError::param("values", format!("non-finite entry at index {i}")));
        }
        Ok(ScalarField { geometry, values })
    }

    pub(crate) fn from_raw(geometry: BoxGeometry, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), geometry.volume());
        ScalarField { geometry, values }
    }

    pub fn from_fn(geometry: BoxGeometry, mut f: impl FnMut(&[i64]) -> T) -> Self {
        let mut site = vec![0i64; geometry.dim()];
        let values = (0..geometry.volume())
            .map(|i| {
                geometry.write_site(i, &mut site);
                f(&site)
            })
            .collect();
        ScalarField { geometry, values }
    }

    /// Unit mass at `site`.
    pub fn delta(geometry: BoxGeometry, site: &[i64]) -> Result<Self> {
        let mut f = Self::zeros(geometry);
        let i = geometry.index(site)?;
        f.values[i] = T::one();
        Ok(f)
    }

    pub fn geometry(&self) -> &BoxGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn get(&self, site: &[i64]) -> Result<T> {
        Ok(self.values[self.geometry.index(site)?])
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), |a, b| a.max(b))
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), |a, b| a.min(b))
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.geometry.same_as(&other.geometry)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.to_f64_lossy() * b.to_f64_lossy())
            .sum())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.geometry.same_as(&other.geometry)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a + b).collect();
        Ok(ScalarField::from_raw(self.geometry, values))
    }

    pub fn scale(&self, c: T) -> Self {
        ScalarField::from_raw(self.geometry, self.values.iter().map(|&v| v * c).collect())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        ScalarField::from_raw(self.geometry, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn to_f64(&self) -> ScalarField<f64> {
        ScalarField::from_raw(self.geometry, self.values.iter().map(|v| v.to_f64_lossy()).collect())
    }
}
