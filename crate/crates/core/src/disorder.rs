//! I.i.d. symmetric disorder fields `η` and their Green-weighted sums.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{GlabError, Result};
use crate::green::GreenAccessor;
use crate::lattice::{BoxGeometry, ScalarField, SubBox};
use crate::rng;
use crate::scalar::Real;
use crate::spectral::SpectralPlan;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundedLaw {
    #[default]
    Uniform,
    Rademacher,
}

/// Law of a single disorder variable.
///
/// * `StretchedExp`: `P(|η| ≥ r) = exp(-c r^α)`, symmetric, `α ∈ (0, 2]`.
/// * `Gaussian`: centred normal with variance `σ²`; tail rate `c_2 = 1/(2σ²)`.
/// * `Bounded`: uniform on `[-a, a]` or `±a`; faster than Gaussian tails.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TailSpec", into = "TailSpec")]
pub enum TailClass {
    StretchedExp { alpha: f64, c_alpha: f64 },
    Gaussian { sigma2: f64 },
    Bounded { range: f64, law: BoundedLaw },
}

/// Flat serialised form of [`TailClass`].
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TailSpec {
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<BoundedLaw>,
}

impl TryFrom<TailSpec> for TailClass {
    type Error = GlabError;

    fn try_from(s: TailSpec) -> Result<Self> {
        let need = |v: Option<f64>, name: &'static str| {
            v.ok_or_else(|| GlabError::param(name, format!("required by variant `{}`", s.variant)))
        };
        let tail = match s.variant.as_str() {
            "stretched_exp" => TailClass::StretchedExp {
                alpha: need(s.alpha, "alpha")?,
                c_alpha: need(s.c_alpha, "c_alpha")?,
            },
            "gaussian" => TailClass::Gaussian {
                sigma2: need(s.sigma2, "sigma2")?,
            },
            "bounded" => TailClass::Bounded {
                range: need(s.range, "range")?,
                law: s.law.unwrap_or_default(),
            },
            other => {
                return Err(GlabError::param(
                    "variant",
                    format!("unknown `{other}` (expected stretched_exp, gaussian or bounded)"),
                ))
            }
        };
        tail.validate()?;
        Ok(tail)
    }
}

impl From<TailClass> for TailSpec {
    fn from(t: TailClass) -> Self {
        match t {
            TailClass::StretchedExp { alpha, c_alpha } => TailSpec {
                variant: "stretched_exp".into(),
                alpha: Some(alpha),
                c_alpha: Some(c_alpha),
                ..Default::default()
            },
            TailClass::Gaussian { sigma2 } => TailSpec {
                variant: "gaussian".into(),
                sigma2: Some(sigma2),
                ..Default::default()
            },
            TailClass::Bounded { range, law } => TailSpec {
                variant: "bounded".into(),
                range: Some(range),
                law: Some(law),
                ..Default::default()
            },
        }
    }
}

impl fmt::Display for TailClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailClass::StretchedExp { alpha, c_alpha } => {
                write!(f, "stretched_exp(alpha={alpha}, c_alpha={c_alpha})")
            }
            TailClass::Gaussian { sigma2 } => write!(f, "gaussian(sigma2={sigma2})"),
            TailClass::Bounded { range, law } => write!(f, "bounded({law:?}, range={range})"),
        }
    }
}

/// Tail exponent and rate `(α, c_α)` for laws in the stretched-exponential
/// family; `None` for bounded laws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailRate {
    pub alpha: f64,
    pub c_alpha: f64,
}

impl TailClass {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TailClass::StretchedExp { alpha, c_alpha } => {
                if !(alpha > 0.0 && alpha <= 2.0) {
                    return Err(GlabError::param("alpha", format!("{alpha} not in (0,2]")));
                }
                if !(c_alpha > 0.0 && c_alpha.is_finite()) {
                    return Err(GlabError::param("c_alpha", format!("{c_alpha} must be positive")));
                }
            }
            TailClass::Gaussian { sigma2 } => {
                if !(sigma2 > 0.0 && sigma2.is_finite()) {
                    return Err(GlabError::param("sigma2", format!("{sigma2} must be positive")));
                }
            }
            TailClass::Bounded { range, .. } => {
                if !(range > 0.0 && range.is_finite()) {
                    return Err(GlabError::param("range", format!("{range} must be positive")));
                }
            }
        }
        Ok(())
    }

    pub fn rate(&self) -> Option<TailRate> {
        match *self {
            TailClass::StretchedExp { alpha, c_alpha } => Some(TailRate { alpha, c_alpha }),
            TailClass::Gaussian { sigma2 } => Some(TailRate {
                alpha: 2.0,
                c_alpha: 1.0 / (2.0 * sigma2),
            }),
            TailClass::Bounded { .. } => None,
        }
    }

    /// `α ∧ 2`, read as 2 for bounded laws.
    pub fn effective_alpha(&self) -> f64 {
        self.rate().map(|r| r.alpha.min(2.0)).unwrap_or(2.0)
    }

    /// Exponent `1/(α ∧ 2)` of the `(log N)` normalisation.
    pub fn log_exponent(&self) -> f64 {
        1.0 / self.effective_alpha()
    }

    pub fn variance(&self) -> f64 {
        match *self {
            TailClass::StretchedExp { alpha, c_alpha } => {
                // E η² = ∫ 2r e^{-c r^α} dr
                2.0 * statrs::function::gamma::gamma(2.0 / alpha) / (alpha * c_alpha.powf(2.0 / alpha))
            }
            TailClass::Gaussian { sigma2 } => sigma2,
            TailClass::Bounded { range, law } => match law {
                BoundedLaw::Uniform => range * range / 3.0,
                BoundedLaw::Rademacher => range * range,
            },
        }
    }

    /// `P(η ≥ r)` for `r > 0`.
    pub fn upper_tail(&self, r: f64) -> f64 {
        match *self {
            TailClass::StretchedExp { alpha, c_alpha } => 0.5 * (-c_alpha * r.powf(alpha)).exp(),
            TailClass::Gaussian { sigma2 } => 0.5 * statrs::function::erf::erfc(r / (2.0 * sigma2).sqrt()),
            TailClass::Bounded { range, law } => match law {
                BoundedLaw::Uniform => ((range - r) / (2.0 * range)).max(0.0),
                BoundedLaw::Rademacher => {
                    if r <= range {
                        0.5
                    } else {
                        0.0
                    }
                }
            },
        }
    }

    /// `(1/r^α) log P(η ≥ r)`, with `α` the class exponent (2 for bounded laws).
    pub fn tail_log_rate(&self, r: f64) -> f64 {
        let alpha = self.effective_alpha();
        let log_p = match *self {
            TailClass::StretchedExp { alpha, c_alpha } => -(2f64.ln()) - c_alpha * r.powf(alpha),
            TailClass::Gaussian { sigma2 } => {
                let z = r / (2.0 * sigma2).sqrt();
                if z < 20.0 {
                    self.upper_tail(r).ln()
                } else {
                    // log(½ erfc z) for large z
                    let z2 = z * z;
                    let series = 1.0 - 1.0 / (2.0 * z2) + 3.0 / (4.0 * z2 * z2) - 15.0 / (8.0 * z2.powi(3));
                    -(2f64.ln()) - z2 - (z * std::f64::consts::PI.sqrt()).ln() + series.ln()
                }
            }
            TailClass::Bounded { .. } => {
                let p = self.upper_tail(r);
                if p <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                p.ln()
            }
        };
        log_p / r.powf(alpha)
    }

    /// One draw from a uniform `u ∈ (0,1)` plus a normal for the Gaussian case.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            TailClass::StretchedExp { alpha, c_alpha } => {
                let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                if u < 0.5 {
                    (-(2.0 * u).ln() / c_alpha).powf(1.0 / alpha)
                } else {
                    -(-(2.0 * (1.0 - u)).ln() / c_alpha).powf(1.0 / alpha)
                }
            }
            TailClass::Gaussian { sigma2 } => {
                let z: f64 = rng.sample(StandardNormal);
                z * sigma2.sqrt()
            }
            TailClass::Bounded { range, law } => match law {
                BoundedLaw::Uniform => rng.gen_range(-range..=range),
                BoundedLaw::Rademacher => {
                    if rng.gen::<bool>() {
                        range
                    } else {
                        -range
                    }
                }
            },
        }
    }
}

/// One realisation of `η` on a box, a restriction of an infinite-volume
/// field: `η(x)` depends only on `(tail, seed, x)`.
#[derive(Clone, Debug)]
pub struct DisorderRealization<T: Real> {
    pub values: ScalarField<T>,
    pub tail: TailClass,
    pub seed: u64,
}

impl<T: Real> DisorderRealization<T> {
    pub fn geometry(&self) -> &BoxGeometry {
        self.values.geometry()
    }

    /// All-zero disorder, the pure GFF case.
    pub fn zero(geometry: BoxGeometry) -> Self {
        DisorderRealization {
            values: ScalarField::zeros(geometry),
            tail: TailClass::Bounded {
                range: f64::MIN_POSITIVE,
                law: BoundedLaw::Uniform,
            },
            seed: 0,
        }
    }

    pub fn from_field(values: ScalarField<T>, tail: TailClass) -> Self {
        DisorderRealization { values, tail, seed: 0 }
    }
}

pub fn sample_disorder<T: Real>(geometry: BoxGeometry, tail: TailClass, seed: u64) -> Result<DisorderRealization<T>> {
    tail.validate()?;
    let values = ScalarField::from_fn(geometry, |site| T::of(tail.draw(&mut rng::site_stream(seed, site))));
    Ok(DisorderRealization { values, tail, seed })
}

/// `m_N^η = (-Δ_N)^{-1} η`.
pub fn mean_field<T: Real>(plan: &SpectralPlan<T>, eta: &DisorderRealization<T>) -> Result<ScalarField<T>> {
    plan.solve_poisson(&eta.values)
}

/// Summation region for [`weighted_sum`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `Λ_L(x)`
    Near(usize),
    /// `Λ_N ∩ Λ_L(x)^c`
    Far(usize),
    /// `Λ_N`
    Full,
}

/// `S_A(x) = Σ_{y∈A} G_N(x,y) η(y)`.
pub fn weighted_sum<T: Real>(
    acc: &GreenAccessor<T>,
    x: &[i64],
    region: Region,
    eta: &DisorderRealization<T>,
) -> Result<f64> {
    let g = *acc.geometry();
    g.same_as(eta.geometry())?;
    let col = acc.column(x)?;
    let terms = col
        .values()
        .iter()
        .zip(eta.values.values())
        .map(|(a, b)| a.to_f64_lossy() * b.to_f64_lossy());
    match region {
        Region::Full => Ok(terms.sum()),
        Region::Near(l) | Region::Far(l) => {
            let near = SubBox::new(g, x.to_vec(), l)?;
            let inside: f64 = near
                .indices()
                .into_iter()
                .map(|i| col.values()[i].to_f64_lossy() * eta.values.values()[i].to_f64_lossy())
                .sum();
            if matches!(region, Region::Near(_)) {
                Ok(inside)
            } else {
                Ok(terms.sum::<f64>() - inside)
            }
        }
    }
}
