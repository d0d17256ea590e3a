use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// A floating-point result together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Self {
            value,
            error: error.abs(),
        }
    }

    /// Value known to rounding level only.
    pub fn rounded(value: f64) -> Self {
        Self::new(value, 4.0 * f64::EPSILON * value.abs())
    }

    pub fn scale(self, factor: f64) -> Self {
        Self::new(self.value * factor, self.error * factor.abs())
    }
}

impl Add for Estimate {
    type Output = Estimate;

    fn add(self, other: Estimate) -> Estimate {
        Estimate::new(self.value + other.value, self.error + other.error)
    }
}

impl Sub for Estimate {
    type Output = Estimate;

    /// Errors add under subtraction too.
    fn sub(self, other: Estimate) -> Estimate {
        Estimate::new(self.value - other.value, self.error + other.error)
    }
}
