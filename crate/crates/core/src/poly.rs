//! Dense univariate polynomials with exact rational coefficients, Sturm
//! sequences, and real-root isolation by exact-sign bisection.

use crate::error::{Error, Result};
use crate::exact::ExactScalar;

/// Coefficients in ascending order; trailing zeros are trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<ExactScalar>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<ExactScalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: ExactScalar) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `t`.
    pub fn x() -> Self {
        Self::new(vec![ExactScalar::zero(), ExactScalar::one()])
    }

    pub fn coeffs(&self) -> &[ExactScalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> ExactScalar {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(ExactScalar::zero)
    }

    pub fn eval(&self, t: &ExactScalar) -> ExactScalar {
        let mut acc = ExactScalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    /// Horner in double precision on the rounded coefficients.
    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c.to_f64())
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(ExactScalar::to_f64).collect()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as i64)
                .collect(),
        )
    }

    pub fn scale(&self, s: &ExactScalar) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[ExactScalar], i: usize| v.get(i).cloned().unwrap_or_else(ExactScalar::zero);
        Self::new(
            (0..len)
                .map(|i| get(&self.coeffs, i) + get(&other.coeffs, i))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&ExactScalar::from_integer(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![ExactScalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![ExactScalar::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lead;
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= &factor * d;
            }
            quot[shift] = factor;
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    /// Sturm chain `p, p', -rem(p, p'), ...`.
    pub fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&ExactScalar::from_integer(-1)));
        }
        seq
    }

    fn sign_changes(seq: &[Self], t: &ExactScalar) -> usize {
        let signs: Vec<i32> = seq
            .iter()
            .map(|p| p.eval(t).signum())
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_roots(seq: &[Self], lo: &ExactScalar, hi: &ExactScalar) -> usize {
        Self::sign_changes(seq, lo).saturating_sub(Self::sign_changes(seq, hi))
    }

    /// Disjoint intervals `(lo, hi]`, each holding exactly one distinct real
    /// root of `self` inside `(lo, hi]`.
    pub fn isolate_roots(
        &self,
        lo: &ExactScalar,
        hi: &ExactScalar,
    ) -> Result<Vec<(ExactScalar, ExactScalar)>> {
        if self.is_zero() {
            return Err(Error::RootFailure("zero polynomial".into()));
        }
        let seq = self.sturm_sequence();
        let mut out = Vec::new();
        let mut stack = vec![(lo.clone(), hi.clone(), 0u32)];
        while let Some((a, b, depth)) = stack.pop() {
            let count = Self::count_roots(&seq, &a, &b);
            match count {
                0 => {}
                1 => out.push((a, b)),
                _ => {
                    if depth > 200 {
                        return Err(Error::RootFailure(
                            "could not separate clustered roots".into(),
                        ));
                    }
                    let mid = (&a + &b) / ExactScalar::from_integer(2);
                    stack.push((mid.clone(), b, depth + 1));
                    stack.push((a, mid, depth + 1));
                }
            }
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        Ok(out)
    }

    /// Shrinks an isolating interval by bisection on exact signs until its
    /// width is at most `width` (or the double grid is exhausted) and returns
    /// the midpoint.
    pub fn refine_root(&self, lo: &ExactScalar, hi: &ExactScalar, width: f64) -> f64 {
        let mut a = lo.clone();
        let mut b = hi.clone();
        let sb = self.eval(&b).signum();
        if sb == 0 {
            return b.to_f64();
        }
        let half = ExactScalar::ratio(1, 2);
        for _ in 0..400 {
            let (af, bf) = (a.to_f64(), b.to_f64());
            if bf - af <= width {
                break;
            }
            let midf = 0.5 * (af + bf);
            // bisect on the double grid so interval ends stay short rationals
            let mid = if midf > af && midf < bf {
                ExactScalar::from_f64(midf).unwrap()
            } else {
                (&a + &b) * &half
            };
            if mid <= a || mid >= b {
                break;
            }
            let sm = self.eval(&mid).signum();
            if sm == 0 {
                return mid.to_f64();
            }
            if sm == sb {
                b = mid;
            } else {
                a = mid;
            }
        }
        0.5 * (a.to_f64() + b.to_f64())
    }
}
