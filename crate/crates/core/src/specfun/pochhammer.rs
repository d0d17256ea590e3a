use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::exact::ExactScalar;

/// Field operations shared by `f64` and [`ExactScalar`], so that rising
/// factorials and terminating series can be written once.
pub trait Scalar:
    Clone
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// `Some(m)` when the value equals `-m` for an integer `m >= 0`.
    fn as_nonpositive_integer(&self) -> Option<u64>;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn as_nonpositive_integer(&self) -> Option<u64> {
        if *self <= 0.0 && self.fract() == 0.0 && *self > -1e15 {
            Some((-*self) as u64)
        } else {
            None
        }
    }
}

impl Scalar for ExactScalar {
    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn one() -> Self {
        ExactScalar::one()
    }
    fn from_i64(v: i64) -> Self {
        ExactScalar::from_integer(v)
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
    fn as_nonpositive_integer(&self) -> Option<u64> {
        ExactScalar::as_nonpositive_integer(self)
    }
}

/// Rising factorial `x (x+1) ... (x+k-1)`; equals one for `k = 0`.
pub fn pochhammer<T: Scalar>(x: &T, k: u64) -> T {
    let mut acc = T::one();
    let mut factor = x.clone();
    for _ in 0..k {
        if factor.is_zero() {
            return T::zero();
        }
        acc = acc * factor.clone();
        factor = factor + T::one();
    }
    acc
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln |Γ(x)|` by the Lanczos approximation (g = 7), with reflection for
/// `x < 1/2`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (std::f64::consts::PI * x).sin().abs();
        return std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let mut series = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
}

pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return pi / ((pi * x).sin() * gamma(1.0 - x));
    }
    ln_gamma(x).exp()
}

/// Euler Beta function `B(a, b)` for positive arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}
