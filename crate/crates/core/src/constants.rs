//! Closed-form constants `M*`, `K`, `R*` and a random-walk capacity
//! estimator.
//!
//! With `G* = G(0,0)` and `G*_{(α)} = Σ_x G(0,x)^{α/(α-1)}`:
//!
//! ```text
//!             α ∈ (0,1]              α ∈ (1,2)                          α = 2                        bounded
//! M*          (d/c)^{1/α} G*         (d/c)^{1/α} G*_{(α)}^{(α-1)/α}     √(2dG* + (d/c) G*_{(2)})      √(2dG*)
//! K           c / G*^α               c / G*_{L,(α)}^{α-1}               c / G*_{L,(2)}                –
//! R*          ½(2/c)^{2/α} G*²       ½(2/c)^{2/α} G*_{(α)}^{(2α-2)/α}   2G* + G*_{(2)}/c              2G*
//! ```
//!
//! Every value is an [`Estimate`] whose error comes from the Green-function
//! brackets by interval arithmetic.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disorder::{TailClass, TailRate};
use crate::error::{GlabError, Result};
use crate::estimate::Estimate;
use crate::green::{asymptotic_constant, g_star_alpha, green_infinite, SumRange};
use crate::lattice::BoxGeometry;
use crate::rng::{self, Purpose};
use crate::stats::least_squares;

/// Which branch of the case tables a tail falls into.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Branch {
    Light { alpha: f64, c: f64 },
    Middle { alpha: f64, c: f64 },
    Gaussian { c: f64 },
    Bounded,
}

fn branch(tail: &TailClass) -> Branch {
    match tail.rate() {
        None => Branch::Bounded,
        Some(TailRate { alpha, c_alpha }) if alpha <= 1.0 => Branch::Light { alpha, c: c_alpha },
        Some(TailRate { alpha, c_alpha }) if alpha < 2.0 => Branch::Middle { alpha, c: c_alpha },
        Some(TailRate { c_alpha, .. }) => Branch::Gaussian { c: c_alpha },
    }
}

/// Whether the constants for `tail` involve `G*_{(α)}`.
pub fn needs_g_star_alpha(tail: &TailClass) -> bool {
    matches!(branch(tail), Branch::Middle { .. } | Branch::Gaussian { .. })
}

/// `α` of the lattice sum `G*_{(α)}`, when one is needed.
fn sum_alpha(tail: &TailClass) -> Option<f64> {
    match branch(tail) {
        Branch::Middle { alpha, .. } => Some(alpha),
        Branch::Gaussian { .. } => Some(2.0),
        _ => None,
    }
}

fn require(g: Option<Estimate>, d: usize, alpha: f64) -> Result<Estimate> {
    g.ok_or(GlabError::Divergent { dim: d, alpha })
}

/// `G* = G(0,0)` on `Z^d`.
pub fn g_star(d: usize, tol: f64) -> Result<Estimate> {
    Ok(green_infinite(d, &vec![0; d], tol)?.estimate())
}

/// `G*_{(α)}` over `Z^d` for the tail's `α`, or `None` when the tail does
/// not need it.
pub fn g_star_alpha_for(d: usize, tail: &TailClass, tol: f64) -> Result<Option<Estimate>> {
    match sum_alpha(tail) {
        Some(alpha) => Ok(Some(g_star_alpha(d, alpha, SumRange::Infinite, tol)?)),
        None => Ok(None),
    }
}

/// `G*_{L,(α)}` over `Λ_L` for the tail's `α`.
pub fn g_star_alpha_finite(d: usize, tail: &TailClass, l: usize, tol: f64) -> Result<Option<Estimate>> {
    match sum_alpha(tail) {
        Some(alpha) => Ok(Some(g_star_alpha(d, alpha, SumRange::Finite(l), tol)?)),
        None => Ok(None),
    }
}

pub fn compute_m_star(
    d: usize,
    tail: &TailClass,
    g_star: Estimate,
    g_star_alpha: Option<Estimate>,
) -> Result<Estimate> {
    let df = d as f64;
    match branch(tail) {
        Branch::Light { alpha, c } => Ok(g_star.scale((df / c).powf(1.0 / alpha))),
        Branch::Middle { alpha, c } => {
            let s = require(g_star_alpha, d, alpha)?;
            Ok(s.powf((alpha - 1.0) / alpha).scale((df / c).powf(1.0 / alpha)))
        }
        Branch::Gaussian { c } => {
            let s = require(g_star_alpha, d, 2.0)?;
            Ok((g_star.scale(2.0 * df) + s.scale(df / c)).sqrt())
        }
        Branch::Bounded => Ok(g_star.scale(2.0 * df).sqrt()),
    }
}

/// `K` from `G*` (α ≤ 1) or from `G*_{L,(α)}` (α ∈ (1,2]) at whatever
/// range the caller computed it.
pub fn compute_k(tail: &TailClass, g_star: Estimate, g_star_alpha: Option<Estimate>) -> Result<Estimate> {
    match branch(tail) {
        Branch::Light { alpha, c } => Ok(g_star.powf(alpha).recip_scaled(c)),
        Branch::Middle { alpha, c } => {
            let s = g_star_alpha.ok_or_else(|| GlabError::param("G*_(α)", "required for α in (1,2]"))?;
            Ok(s.powf(alpha - 1.0).recip_scaled(c))
        }
        Branch::Gaussian { c } => {
            let s = g_star_alpha.ok_or_else(|| GlabError::param("G*_(α)", "required for α = 2"))?;
            Ok(s.recip_scaled(c))
        }
        Branch::Bounded => Err(GlabError::WrongTailClass(format!(
            "K is defined for stretched-exponential or Gaussian tails, got {tail}"
        ))),
    }
}

pub fn compute_r_star(
    d: usize,
    tail: &TailClass,
    g_star: Estimate,
    g_star_alpha: Option<Estimate>,
) -> Result<Estimate> {
    match branch(tail) {
        Branch::Light { alpha, c } => Ok((g_star * g_star).scale(0.5 * (2.0 / c).powf(2.0 / alpha))),
        Branch::Middle { alpha, c } => {
            let s = require(g_star_alpha, d, alpha)?;
            Ok(s.powf((2.0 * alpha - 2.0) / alpha)
                .scale(0.5 * (2.0 / c).powf(2.0 / alpha)))
        }
        Branch::Gaussian { c } => {
            let s = require(g_star_alpha, d, 2.0)?;
            Ok(g_star.scale(2.0) + s.scale(1.0 / c))
        }
        Branch::Bounded => Ok(g_star.scale(2.0)),
    }
}

/// Escape-probability estimate of the discrete capacity of one box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityPoint {
    /// Box radius `⌊(1-ε)n⌋`.
    pub radius: usize,
    pub n: usize,
    /// `Σ_{x∈B} P_x(no return to B)`.
    pub raw: f64,
    pub raw_se: f64,
    /// `raw / n^{d-2}`.
    pub scaled: f64,
    pub scaled_se: f64,
    /// Walks stopped by the step budget before exit or return.
    pub truncated: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub eps: f64,
    pub value: f64,
    pub se: f64,
    pub points: Vec<CapacityPoint>,
    pub warnings: Vec<String>,
}

/// Walk budget and seed for capacity estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkBudget {
    pub walks_per_site: usize,
    /// Steps allowed per walk, in units of `R²` with `R` the exit radius.
    pub step_factor: f64,
    pub seed: u64,
}

impl Default for WalkBudget {
    fn default() -> Self {
        WalkBudget {
            walks_per_site: 400,
            step_factor: 50.0,
            seed: 1,
        }
    }
}

/// Discrete capacity `Σ_{x∈Λ_r} Es(x)` of the box `Λ_r` in `Z^d`.
///
/// From each boundary site a simple random walk is run until it returns
/// to the box or first reaches Euclidean distance `R = 4(r+1)`. A walk
/// leaving at `y` still returns later with probability close to
/// `G(0,y) Cap`, so with `S` the truncated escape sum and `a` the mean of
/// `a_d |y|^{2-d}` over exit points, `Cap = S / (1 + a S)`.
pub fn discrete_capacity(d: usize, radius: usize, budget: &WalkBudget) -> Result<(f64, f64, u64)> {
    if d < 3 {
        return Err(GlabError::param("d", "capacity estimator needs d >= 3"));
    }
    if budget.walks_per_site < 2 {
        return Err(GlabError::param("walks_per_site", "need at least two walks per site"));
    }
    let inner = BoxGeometry::with_cap(d, radius.max(1), usize::MAX)?;
    let r = radius as i64;
    let exit_r = 4.0 * (radius + 1) as f64;
    let exit_r2 = exit_r * exit_r;
    let max_steps = (budget.step_factor * exit_r2) as u64;
    let a_d = asymptotic_constant(d);
    // sites with at least one neighbour outside the box
    let boundary: Vec<Vec<i64>> = if radius == 0 {
        vec![vec![0; d]]
    } else {
        inner.sites().filter(|s| s.iter().any(|c| c.abs() == r)).collect()
    };
    let walks = budget.walks_per_site;

    let per_site: Vec<(f64, f64, f64, u64)> = boundary
        .par_iter()
        .enumerate()
        .map(|(k, start)| {
            let mut rng = rng::stream(budget.seed, Purpose::Walk, k as u64);
            let mut escapes = 0.0;
            let mut exit_green = 0.0;
            let mut truncated = 0u64;
            let mut pos = vec![0i64; d];
            for _ in 0..walks {
                pos.copy_from_slice(start);
                let mut steps = 0u64;
                loop {
                    let axis = rng.gen_range(0..d);
                    pos[axis] += if rng.gen::<bool>() { 1 } else { -1 };
                    steps += 1;
                    if pos.iter().all(|c| c.abs() <= r) {
                        break;
                    }
                    let norm2: f64 = pos.iter().map(|&c| (c * c) as f64).sum();
                    if norm2 >= exit_r2 {
                        escapes += 1.0;
                        exit_green += a_d * norm2.powf(-(d as f64 - 2.0) / 2.0);
                        break;
                    }
                    if steps >= max_steps {
                        truncated += 1;
                        break;
                    }
                }
            }
            let p = escapes / walks as f64;
            let var = p * (1.0 - p) / (walks - 1) as f64;
            (p, var, exit_green, truncated)
        })
        .collect();

    let s: f64 = per_site.iter().map(|x| x.0).sum();
    let var_s: f64 = per_site.iter().map(|x| x.1).sum();
    let escapes: f64 = per_site.iter().map(|x| x.0 * walks as f64).sum();
    let truncated: u64 = per_site.iter().map(|x| x.3).sum();
    let a = if escapes > 0.0 {
        per_site.iter().map(|x| x.2).sum::<f64>() / escapes
    } else {
        0.0
    };
    let cap = s / (1.0 + a * s);
    // d cap / d S = 1 / (1 + a S)²
    let mut se = var_s.sqrt() / (1.0 + a * s).powi(2);
    // a truncated walk is either outcome; widen by its possible contribution
    se += truncated as f64 / walks as f64;
    Ok((cap, se, truncated))
}

/// Capacity of `Λ_{⌊(1-ε)n⌋}` rescaled by `n^{-(d-2)}` for each `n`, with a
/// linear fit in `1/n` extrapolated to `n = ∞` when two or more scales are
/// given. The normalisation is that of the discrete walk with steps of
/// probability `1/(2d)`; comparison with a continuum capacity needs the
/// corresponding conversion factor.
pub fn estimate_capacity(d: usize, eps: f64, scales: &[usize], budget: &WalkBudget) -> Result<CapacityEstimate> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(GlabError::param("eps", format!("{eps} not in (0,1)")));
    }
    if scales.is_empty() {
        return Err(GlabError::param("scales", "need at least one scale n"));
    }
    let mut warnings = Vec::new();
    let mut points = Vec::with_capacity(scales.len());
    for (i, &n) in scales.iter().enumerate() {
        let radius = ((1.0 - eps) * n as f64).floor() as usize;
        let b = WalkBudget {
            seed: rng::derive_seed(budget.seed, Purpose::Walk, i as u64),
            ..*budget
        };
        let (raw, raw_se, truncated) = discrete_capacity(d, radius, &b)?;
        if truncated > 0 {
            warnings.push(format!("n = {n}: {truncated} walks hit the step budget; SE widened"));
        }
        let norm = (n as f64).powi(d as i32 - 2);
        points.push(CapacityPoint {
            radius,
            n,
            raw,
            raw_se,
            scaled: raw / norm,
            scaled_se: raw_se / norm,
            truncated,
        });
    }
    let (value, se) = if points.len() >= 2 {
        let x: Vec<f64> = points.iter().map(|p| 1.0 / p.n as f64).collect();
        let y: Vec<f64> = points.iter().map(|p| p.scaled).collect();
        match least_squares(&x, &y) {
            Some(fit) => {
                // the intercept is a linear combination Σ c_i y_i; propagate SEs
                let mx = x.iter().sum::<f64>() / x.len() as f64;
                let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
                let var: f64 = points
                    .iter()
                    .zip(&x)
                    .map(|(p, xi)| {
                        let c = 1.0 / x.len() as f64 - mx * (xi - mx) / sxx;
                        (c * p.scaled_se).powi(2)
                    })
                    .sum();
                (fit.intercept, var.sqrt())
            }
            None => {
                let last = points.last().unwrap();
                (last.scaled, last.scaled_se)
            }
        }
    } else {
        (points[0].scaled, points[0].scaled_se)
    };
    Ok(CapacityEstimate {
        eps,
        value,
        se,
        points,
        warnings,
    })
}

/// `G*_{L,(α)}` and `K(L)` for one finite `L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteRangeConstants {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "G_star_alpha")]
    pub g_star_alpha: Estimate,
    #[serde(rename = "K")]
    pub k: Estimate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityEntry {
    pub eps: f64,
    pub value: f64,
    pub se: f64,
}

/// Everything the theory predicts for one `(d, tail)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub d: usize,
    pub tail: TailClass,
    #[serde(rename = "G_star")]
    pub g_star: Estimate,
    #[serde(rename = "G_star_alpha", skip_serializing_if = "Option::is_none", default)]
    pub g_star_alpha: Option<Estimate>,
    #[serde(rename = "G_star_alpha_L", skip_serializing_if = "Vec::is_empty", default)]
    pub finite_range: Vec<FiniteRangeConstants>,
    #[serde(rename = "K")]
    pub k: Option<Estimate>,
    #[serde(rename = "M_star")]
    pub m_star: Option<Estimate>,
    #[serde(rename = "R_star")]
    pub r_star: Option<Estimate>,
    #[serde(rename = "a_d")]
    pub a_d: f64,
    pub capacity: Vec<CapacityEntry>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsOptions {
    pub tol: f64,
    /// Finite `L` values for `G*_{L,(α)}` and `K(L)`.
    #[serde(default)]
    pub l_values: Vec<usize>,
    /// `ε` values for capacity estimates.
    #[serde(default)]
    pub capacity_eps: Vec<f64>,
    #[serde(default = "default_scales")]
    pub capacity_scales: Vec<usize>,
    #[serde(default)]
    pub budget: WalkBudget,
}

fn default_scales() -> Vec<usize> {
    vec![4, 8]
}

impl Default for ConstantsOptions {
    fn default() -> Self {
        ConstantsOptions {
            tol: 1e-6,
            l_values: Vec::new(),
            capacity_eps: Vec::new(),
            capacity_scales: default_scales(),
            budget: WalkBudget::default(),
        }
    }
}

impl ConstantsReport {
    pub fn compute(d: usize, tail: TailClass, opts: &ConstantsOptions) -> Result<Self> {
        tail.validate()?;
        let mut warnings = Vec::new();
        if d < 5 {
            warnings.push(format!(
                "d = {d} is below the dimension range d >= 5 of the maximum asymptotics; values are exploratory"
            ));
        }
        let g = g_star(d, opts.tol)?;
        let gsa = match g_star_alpha_for(d, &tail, opts.tol) {
            Ok(v) => v,
            Err(e @ GlabError::Divergent { .. }) => {
                warnings.push(format!("G*_(α) over Z^d: {e}"));
                None
            }
            Err(e) => return Err(e),
        };
        let mut note = |name: &str, r: Result<Estimate>| match r {
            Ok(v) => Some(v),
            Err(e) => {
                warnings.push(format!("{name}: {e}"));
                None
            }
        };
        let m_star = note("M*", compute_m_star(d, &tail, g, gsa));
        let r_star = note("R*", compute_r_star(d, &tail, g, gsa));
        let k = match branch(&tail) {
            Branch::Bounded => None,
            Branch::Light { .. } => note("K", compute_k(&tail, g, None)),
            _ => gsa.and_then(|s| note("K", compute_k(&tail, g, Some(s)))),
        };
        let mut finite_range = Vec::new();
        if needs_g_star_alpha(&tail) {
            for &l in &opts.l_values {
                let s = g_star_alpha_finite(d, &tail, l, opts.tol)?.expect("tail needs the sum");
                finite_range.push(FiniteRangeConstants {
                    l,
                    g_star_alpha: s,
                    k: compute_k(&tail, g, Some(s))?,
                });
            }
        }
        let mut capacity = Vec::new();
        for &eps in &opts.capacity_eps {
            let c = estimate_capacity(d, eps, &opts.capacity_scales, &opts.budget)?;
            warnings.extend(c.warnings.iter().map(|w| format!("capacity eps = {eps}: {w}")));
            capacity.push(CapacityEntry {
                eps,
                value: c.value,
                se: c.se,
            });
        }
        Ok(ConstantsReport {
            d,
            tail,
            g_star: g,
            g_star_alpha: gsa,
            finite_range,
            k,
            m_star,
            r_star,
            a_d: asymptotic_constant(d),
            capacity,
            warnings,
        })
    }
}
