//! Values with an absolute error bound, combined by interval arithmetic.

use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Estimate {
            value,
            error: error.abs(),
        }
    }

    pub fn exact(value: f64) -> Self {
        Estimate { value, error: 0.0 }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.error
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }

    fn from_bounds(value: f64, lo: f64, hi: f64) -> Self {
        Estimate::new(value, (value - lo).abs().max((hi - value).abs()))
    }

    pub fn scale(self, c: f64) -> Estimate {
        Estimate::new(self.value * c, self.error * c.abs())
    }

    /// `c / self` for an interval bounded away from zero.
    pub fn recip_scaled(self, c: f64) -> Estimate {
        let a = c / self.lower();
        let b = c / self.upper();
        Estimate::from_bounds(c / self.value, a.min(b), a.max(b))
    }

    /// `self^p` for a positive interval; monotone in each endpoint.
    pub fn powf(self, p: f64) -> Estimate {
        let lo = self.lower().max(0.0).powf(p);
        let hi = self.upper().powf(p);
        Estimate::from_bounds(self.value.powf(p), lo.min(hi), lo.max(hi))
    }

    pub fn sqrt(self) -> Estimate {
        self.powf(0.5)
    }
}

impl Add for Estimate {
    type Output = Estimate;

    fn add(self, other: Estimate) -> Estimate {
        Estimate::new(self.value + other.value, self.error + other.error)
    }
}

impl Mul for Estimate {
    type Output = Estimate;

    /// Product of two intervals.
    fn mul(self, other: Estimate) -> Estimate {
        let c = [
            self.lower() * other.lower(),
            self.lower() * other.upper(),
            self.upper() * other.lower(),
            self.upper() * other.upper(),
        ];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Estimate::from_bounds(self.value * other.value, lo, hi)
    }
}
