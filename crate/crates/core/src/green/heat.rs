//! Point evaluation of `G_N` on boxes far too large to store.
//!
//! `-Δ_N = (1/d) Σ_i T_i` with `T_i` the 1-D Dirichlet operator on axis
//! `i`, so the heat semigroup factorises over axes and
//!
//! ```text
//! G_N(x, y)          = ∫_0^∞ Π_i k_{t/d}(x_i, y_i) dt
//! (-Δ_N)^{-2}(x, y)  = ∫_0^∞ t Π_i k_{t/d}(x_i, y_i) dt
//! ```
//!
//! where `k_s(a, b) = Σ_j ψ_j(a) ψ_j(b) e^{-s λ_j}` is the 1-D kernel. The
//! integral is taken on a uniform grid in `u = log t`; the integrand is
//! entire in `t` and decays like `e^{-t ν_min}`, so the trapezoid rule
//! converges geometrically in the step.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{GlabError, Result};

/// Default step in `log t`.
pub const DEFAULT_STEP: f64 = 1.0 / 16.0;

/// Modes with `s (λ_j - λ_1)` above this are dropped.
const MODE_CUTOFF: f64 = 60.0;

/// Separable heat-kernel evaluator for the box `[-N, N]^d`.
#[derive(Clone, Debug)]
pub struct BoxKernel {
    dim: usize,
    radius: usize,
    lambda: Vec<f64>,
    step: f64,
}

impl BoxKernel {
    pub fn new(dim: usize, radius: usize) -> Result<Self> {
        Self::with_step(dim, radius, DEFAULT_STEP)
    }

    pub fn with_step(dim: usize, radius: usize, step: f64) -> Result<Self> {
        if dim == 0 {
            return Err(GlabError::param("d", "dimension must be at least 1"));
        }
        if radius == 0 {
            return Err(GlabError::param("N", "box radius must be at least 1"));
        }
        if !(step > 0.0 && step < 1.0) {
            return Err(GlabError::param("step", format!("{step} not in (0,1)")));
        }
        let n1 = (2 * radius + 2) as f64;
        let lambda = (1..=2 * radius + 1).map(|j| 1.0 - (PI * j as f64 / n1).cos()).collect();
        Ok(BoxKernel {
            dim,
            radius,
            lambda,
            step,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    fn check(&self, site: &[i64]) -> Result<()> {
        let n = self.radius as i64;
        if site.len() == self.dim && site.iter().all(|c| (-n..=n).contains(c)) {
            Ok(())
        } else {
            Err(GlabError::OutOfBox {
                site: site.to_vec(),
                radius: self.radius,
            })
        }
    }

    /// `√(2/(n+1)) sin(π j (a+N+1)/(n+1))` products for one coordinate pair.
    fn mode_weights(&self, a: i64, b: i64) -> Vec<f64> {
        let n1 = (2 * self.radius + 2) as f64;
        let sa = (a + self.radius as i64 + 1) as f64;
        let sb = (b + self.radius as i64 + 1) as f64;
        (1..=self.lambda.len())
            .map(|j| {
                let j = j as f64;
                2.0 / n1 * (PI * j * sa / n1).sin() * (PI * j * sb / n1).sin()
            })
            .collect()
    }

    /// Integrates `t^power Π_i k_{t/d}(x_i, y_i)` for every pair in `pairs`.
    fn integrate(&self, pairs: &[(Vec<i64>, Vec<i64>)], power: i32) -> Result<Vec<f64>> {
        let mut slot: HashMap<(i64, i64), usize> = HashMap::new();
        let mut weights: Vec<Vec<f64>> = Vec::new();
        let mut plan: Vec<Vec<usize>> = Vec::with_capacity(pairs.len());
        for (x, y) in pairs {
            self.check(x)?;
            self.check(y)?;
            let mut axes = Vec::with_capacity(self.dim);
            for (&a, &b) in x.iter().zip(y) {
                let key = if a <= b { (a, b) } else { (b, a) };
                let idx = *slot.entry(key).or_insert_with(|| {
                    weights.push(self.mode_weights(key.0, key.1));
                    weights.len() - 1
                });
                axes.push(idx);
            }
            plan.push(axes);
        }

        let d = self.dim as f64;
        let lambda1 = self.lambda[0];
        let u_lo = -40.0 / (1.0 + power as f64);
        let u_hi = ((MODE_CUTOFF + 20.0 * (1 + power) as f64) / lambda1).ln();
        let steps = ((u_hi - u_lo) / self.step).ceil() as usize;
        let h = (u_hi - u_lo) / steps as f64;

        let mut decay = vec![0.0; self.lambda.len()];
        let mut table = vec![0.0; weights.len()];
        let mut out = vec![0.0; pairs.len()];
        for i in 0..=steps {
            let t = (u_lo + i as f64 * h).exp();
            let s = t / d;
            let active = self.lambda.partition_point(|&l| s * (l - lambda1) <= MODE_CUTOFF);
            for (e, &l) in decay[..active].iter_mut().zip(&self.lambda) {
                *e = (-s * l).exp();
            }
            for (v, w) in table.iter_mut().zip(&weights) {
                *v = w[..active].iter().zip(&decay[..active]).map(|(a, b)| a * b).sum();
            }
            let jac = if i == 0 || i == steps { 0.5 * h } else { h } * t.powi(power + 1);
            for (o, axes) in out.iter_mut().zip(&plan) {
                *o += jac * axes.iter().map(|&k| table[k]).product::<f64>();
            }
        }
        Ok(out)
    }

    /// `G_N(x, y)`.
    pub fn green(&self, x: &[i64], y: &[i64]) -> Result<f64> {
        Ok(self.integrate(&[(x.to_vec(), y.to_vec())], 0)?[0])
    }

    /// `G_N(0, y)` for every `y` in `targets`, sharing the 1-D tables.
    pub fn green_from_origin(&self, targets: &[Vec<i64>]) -> Result<Vec<f64>> {
        let origin = vec![0i64; self.dim];
        let pairs: Vec<_> = targets.iter().map(|y| (origin.clone(), y.clone())).collect();
        self.integrate(&pairs, 0)
    }

    /// `G_N(x, y)` for arbitrary pairs.
    pub fn green_pairs(&self, pairs: &[(Vec<i64>, Vec<i64>)]) -> Result<Vec<f64>> {
        self.integrate(pairs, 0)
    }

    /// `(-Δ_N)^{-2}(x, y)`.
    pub fn bilaplacian(&self, x: &[i64], y: &[i64]) -> Result<f64> {
        Ok(self.integrate(&[(x.to_vec(), y.to_vec())], 1)?[0])
    }
}
