//! Infinite-volume Green function on `Z^d` (`d ≥ 3`) and its lattice sums.
//!
//! `G_R(0,x)` increases to `G(0,x)` with `G - G_R ≈ C R^{-(d-2)}`. Values
//! at radii `R` and `2R` give the Richardson limit `E`; the reported error
//! is the fitted correction `C R^{-(d-2)} = E - G_R`, so the interval
//! `[G_R, E + (E - G_R)]` contains every larger-box value.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::heat::BoxKernel;
use crate::error::{GlabError, Result};
use crate::estimate::Estimate;

/// Largest box radius used by the bracketing loops.
pub const RADIUS_CAP: usize = 1 << 17;

/// Floor on requested point tolerances (quadrature accuracy).
const TOL_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfiniteGreenEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub box_radius_used: usize,
}

impl InfiniteGreenEstimate {
    pub fn estimate(&self) -> Estimate {
        Estimate::new(self.value, self.error_bound)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.estimate().contains(x)
    }
}

/// `a_d = (d/2) Γ(d/2 - 1) π^{-d/2}`, the constant in `G(0,x) ~ a_d |x|^{2-d}`.
pub fn asymptotic_constant(d: usize) -> f64 {
    assert!(d >= 3);
    let h = d as f64 / 2.0;
    h * statrs::function::gamma::gamma(h - 1.0) * PI.powf(-h)
}

fn require_transient(d: usize) -> Result<()> {
    if d < 3 {
        Err(GlabError::param("d", "infinite-volume Green function needs d >= 3"))
    } else {
        Ok(())
    }
}

/// Doubling-radius bracketing shared by every infinite-volume quantity.
///
/// `eval(R)` must return values increasing in `R` that converge like
/// `R^{-order}`.
fn bracket(
    start: usize,
    order: f64,
    tol: f64,
    mut eval: impl FnMut(usize) -> Result<Vec<f64>>,
) -> Result<Vec<InfiniteGreenEstimate>> {
    let tol = tol.max(TOL_FLOOR);
    let factor = 2f64.powf(order) - 1.0;
    let mut radius = start;
    let mut prev = eval(radius)?;
    loop {
        let next_radius = 2 * radius;
        if next_radius > RADIUS_CAP {
            let worst = prev.iter().cloned().fold(0.0f64, f64::max);
            return Err(GlabError::NonConvergence {
                value: worst,
                error: f64::NAN,
                radius,
                tol,
            });
        }
        let cur = eval(next_radius)?;
        let est: Vec<InfiniteGreenEstimate> = prev
            .iter()
            .zip(&cur)
            .map(|(&a, &b)| {
                let corr = (b - a).max(0.0) / factor;
                InfiniteGreenEstimate {
                    value: b + corr,
                    error_bound: corr + TOL_FLOOR,
                    box_radius_used: next_radius,
                }
            })
            .collect();
        let worst = est
            .iter()
            .max_by(|a, b| a.error_bound.total_cmp(&b.error_bound))
            .copied();
        match worst {
            // the quadrature floor is reported but not iterated on
            Some(w) if w.error_bound - TOL_FLOOR > tol => {
                if 2 * next_radius > RADIUS_CAP {
                    return Err(GlabError::NonConvergence {
                        value: w.value,
                        error: w.error_bound,
                        radius: next_radius,
                        tol,
                    });
                }
            }
            _ => return Ok(est),
        }
        prev = cur;
        radius = next_radius;
    }
}

fn sup_norm(x: &[i64]) -> usize {
    x.iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0)
}

/// `G(0, x)` on `Z^d` within `tol`.
pub fn green_infinite(d: usize, x: &[i64], tol: f64) -> Result<InfiniteGreenEstimate> {
    Ok(green_infinite_many(d, &[x.to_vec()], tol)?[0])
}

/// `G(0, x)` for several targets on a common radius sequence.
pub fn green_infinite_many(d: usize, targets: &[Vec<i64>], tol: f64) -> Result<Vec<InfiniteGreenEstimate>> {
    require_transient(d)?;
    if targets.iter().any(|x| x.len() != d) {
        return Err(GlabError::param("x", "site dimension differs from d"));
    }
    let reach = targets.iter().map(|x| sup_norm(x)).max().unwrap_or(0);
    let start = (4 * reach + 8).max(16);
    bracket(start, (d - 2) as f64, tol, |r| {
        BoxKernel::new(d, r)?.green_from_origin(targets)
    })
}

/// `(-Δ)^{-2}(0,0) = Σ_x G(0,x)²` on `Z^d`, `d ≥ 5`.
///
/// Box values converge like `R^{-(d-4)}`; the first-order Richardson value
/// is refined with one more level and the error is the spread of the last
/// two refined values plus the remaining first-order correction.
pub fn bilaplacian_infinite(d: usize, tol: f64) -> Result<Estimate> {
    if d < 5 {
        return Err(GlabError::Divergent { dim: d, alpha: 2.0 });
    }
    let tol = tol.max(TOL_FLOOR);
    let origin = vec![0i64; d];
    let p = (d - 4) as f64;
    let f1 = 2f64.powf(p) - 1.0;
    let f2 = 2f64.powf(p + 1.0) - 1.0;
    let eval = |r: usize| BoxKernel::new(d, r)?.bilaplacian(&origin, &origin);
    let mut radius = 32usize;
    let mut vals = vec![eval(radius)?, eval(2 * radius)?, eval(4 * radius)?];
    radius *= 4;
    let mut last: Option<f64> = None;
    loop {
        let n = vals.len();
        let e1 = |i: usize| vals[i] + (vals[i] - vals[i - 1]) / f1;
        let r_hi = e1(n - 1);
        let r_lo = e1(n - 2);
        let refined = r_hi + (r_hi - r_lo) / f2;
        let spread = last.map(|l| (refined - l).abs()).unwrap_or(f64::INFINITY);
        let err = spread.max(0.1 * (refined - r_hi).abs()) + TOL_FLOOR;
        if err - TOL_FLOOR <= tol {
            return Ok(Estimate::new(refined, err));
        }
        if 2 * radius > RADIUS_CAP {
            return Err(GlabError::NonConvergence {
                value: refined,
                error: err,
                radius,
                tol,
            });
        }
        last = Some(refined);
        radius *= 2;
        vals.push(eval(radius)?);
    }
}

/// Symmetry classes of `Λ_L`: non-increasing tuples of absolute
/// coordinates with the number of lattice points each represents.
pub fn symmetry_classes(d: usize, radius: usize) -> Vec<(Vec<i64>, u64)> {
    fn rec(d: usize, max: usize, prefix: &mut Vec<i64>, out: &mut Vec<(Vec<i64>, u64)>) {
        if prefix.len() == d {
            out.push((prefix.clone(), multiplicity(prefix)));
            return;
        }
        for a in 0..=max {
            prefix.push(a as i64);
            rec(d, a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, radius, &mut Vec::with_capacity(d), &mut out);
    out
}

fn multiplicity(class: &[i64]) -> u64 {
    let d = class.len() as u64;
    let fact = |n: u64| (1..=n).product::<u64>();
    let mut perms = fact(d);
    let mut i = 0;
    while i < class.len() {
        let j = class[i..].iter().take_while(|&&v| v == class[i]).count();
        perms /= fact(j as u64);
        i += j;
    }
    let nonzero = class.iter().filter(|&&v| v != 0).count() as u32;
    perms * 2u64.pow(nonzero)
}

fn class_of(x: &[i64]) -> Vec<i64> {
    let mut c: Vec<i64> = x.iter().map(|v| v.abs()).collect();
    c.sort_unstable_by(|a, b| b.cmp(a));
    c
}

/// `G(0, x)` for every `x ∈ Λ_L`, stored per symmetry class.
#[derive(Clone, Debug)]
pub struct GreenTable {
    dim: usize,
    radius: usize,
    classes: Vec<(Vec<i64>, u64)>,
    values: Vec<InfiniteGreenEstimate>,
}

impl GreenTable {
    pub fn compute(d: usize, radius: usize, tol: f64) -> Result<Self> {
        let classes = symmetry_classes(d, radius);
        let reps: Vec<Vec<i64>> = classes.iter().map(|c| c.0.clone()).collect();
        let values = green_infinite_many(d, &reps, tol)?;
        Ok(GreenTable {
            dim: d,
            radius,
            classes,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn get(&self, x: &[i64]) -> Option<InfiniteGreenEstimate> {
        if x.len() != self.dim || sup_norm(x) > self.radius {
            return None;
        }
        let c = class_of(x);
        self.classes.iter().position(|(k, _)| *k == c).map(|i| self.values[i])
    }

    /// `Σ_{x ∈ Λ_L'} G(0,x)^p` for `L' ≤ L`, with propagated error.
    pub fn power_sum(&self, exponent: f64, radius: usize) -> Estimate {
        let mut value = 0.0;
        let mut error = 0.0;
        for ((class, mult), est) in self.classes.iter().zip(&self.values) {
            if class[0] as usize > radius {
                continue;
            }
            let m = *mult as f64;
            value += m * est.value.powf(exponent);
            let hi = (est.value + est.error_bound).powf(exponent);
            let lo = (est.value - est.error_bound).max(0.0).powf(exponent);
            error += m * (hi - lo) / 2.0 + m * ((hi + lo) / 2.0 - est.value.powf(exponent)).abs();
        }
        Estimate::new(value, error)
    }

    /// `max_{x≠0} G(0,x) |x|_2^{d-2}` (upper end of each bracket).
    pub fn envelope_constant(&self) -> f64 {
        self.classes
            .iter()
            .zip(&self.values)
            .filter(|((c, _), _)| c[0] != 0)
            .map(|((c, _), e)| {
                let r2: f64 = c.iter().map(|v| (v * v) as f64).sum();
                (e.value + e.error_bound) * r2.powf((self.dim - 2) as f64 / 2.0)
            })
            .fold(0.0, f64::max)
    }
}

/// Range of a lattice sum over `Λ_L` or all of `Z^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumRange {
    Finite(usize),
    Infinite,
}

/// `Σ_{|x|_∞ > L} |x|_2^{-q}`: explicit shells up to `4L`, continuum beyond.
fn power_tail(d: usize, inner: usize, q: f64) -> f64 {
    let outer = 4 * inner.max(1);
    let mut s = 0.0;
    for (class, mult) in symmetry_classes(d, outer) {
        if class[0] as usize <= inner {
            continue;
        }
        let r2: f64 = class.iter().map(|v| (v * v) as f64).sum();
        s += mult as f64 * r2.powf(-q / 2.0);
    }
    let h = d as f64 / 2.0;
    let sphere = 2.0 * PI.powf(h) / statrs::function::gamma::gamma(h);
    s + sphere * (outer as f64).powf(d as f64 - q) / (q - d as f64)
}

/// A table accurate enough that `Σ_{Λ_L} G^p` is known within `tol`.
///
/// A coarse pass gives the sensitivity `W = Σ_x p G(0,x)^{p-1}` of the sum
/// to uniform point errors; the table is then refined to `tol / W`.
fn table_for_power_sum(d: usize, radius: usize, exponent: f64, tol: f64) -> Result<GreenTable> {
    const COARSE: f64 = 1e-6;
    let coarse = GreenTable::compute(d, radius, COARSE)?;
    let weight: f64 = coarse
        .classes
        .iter()
        .zip(&coarse.values)
        .map(|((_, m), e)| *m as f64 * exponent * (e.value + e.error_bound).powf(exponent - 1.0))
        .sum();
    let pt_tol = tol / weight;
    if pt_tol >= COARSE {
        Ok(coarse)
    } else {
        GreenTable::compute(d, radius, pt_tol)
    }
}

/// `G*_{(α)} = Σ_x G(0,x)^{α/(α-1)}` over `Λ_L` or `Z^d`, `α ∈ (1, 2]`.
///
/// For the full lattice, `α = 2` uses the identity `Σ_x G(0,x)² =
/// (-Δ)^{-2}(0,0)`; other exponents sum over a growing box and bound the
/// remainder by the envelope `G(0,x) ≤ G_+ |x|^{2-d}` fitted on the
/// computed values, centring the tail on the `a_d |x|^{2-d}` asymptote.
pub fn g_star_alpha(d: usize, alpha: f64, range: SumRange, tol: f64) -> Result<Estimate> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(GlabError::param("alpha", format!("{alpha} not in (1,2]")));
    }
    require_transient(d)?;
    let exponent = alpha / (alpha - 1.0);
    match range {
        SumRange::Finite(l) => {
            let table = table_for_power_sum(d, l, exponent, tol / 2.0)?;
            Ok(table.power_sum(exponent, l))
        }
        SumRange::Infinite => {
            if d as f64 <= 2.0 * alpha {
                return Err(GlabError::Divergent { dim: d, alpha });
            }
            if alpha == 2.0 {
                return bilaplacian_infinite(d, tol);
            }
            let q = (d - 2) as f64 * exponent;
            let a_d = asymptotic_constant(d);
            let mut inner = 4usize;
            loop {
                let table = table_for_power_sum(d, inner, exponent, tol / 4.0)?;
                let partial = table.power_sum(exponent, inner);
                let shape = power_tail(d, inner, q);
                let upper_tail = table.envelope_constant().powf(exponent) * shape;
                let central_tail = a_d.powf(exponent) * shape;
                let est = Estimate::new(
                    partial.value + central_tail,
                    partial.error + central_tail.max(upper_tail - central_tail),
                );
                if est.error <= tol {
                    return Ok(est);
                }
                if inner >= 32 {
                    return Err(GlabError::NonConvergence {
                        value: est.value,
                        error: est.error,
                        radius: inner,
                        tol,
                    });
                }
                inner *= 2;
            }
        }
    }
}
