//! Gauss hypergeometric `F(a, b; c; x)`: exact terminating sums, the
//! polynomial view of a terminating series, and a tail-bounded series for
//! `0 <= x < 1`.

use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::exact::ExactScalar;
use crate::poly::RationalPoly;

use super::pochhammer::Scalar;

/// Largest terminating order routed through exact arithmetic by the double
/// precision entry point.
pub const EXACT_ROUTE_MAX_ORDER: u64 = 30;

/// Iteration cap for the non-terminating series.
pub const SERIES_TERM_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct HypergeomParams<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Scalar> HypergeomParams<T> {
    pub fn new(a: T, b: T, c: T) -> Self {
        Self { a, b, c }
    }

    /// Index of the last nonzero term when `a` or `b` is a nonpositive
    /// integer.
    pub fn stop_index(&self) -> Option<u64> {
        match (
            self.a.as_nonpositive_integer(),
            self.b.as_nonpositive_integer(),
        ) {
            (Some(m), Some(k)) => Some(m.min(k)),
            (Some(m), None) | (None, Some(m)) => Some(m),
            (None, None) => None,
        }
    }

    pub fn is_terminating(&self) -> bool {
        self.stop_index().is_some()
    }

    fn check_denominator(&self, upto: Option<u64>) -> Result<()> {
        if let Some(m) = self.c.as_nonpositive_integer() {
            if upto.is_none_or(|stop| m < stop) {
                return Err(Error::InvalidInput(
                    "lower parameter c is a nonpositive integer".into(),
                ));
            }
        }
        Ok(())
    }
}

fn terminating_sum<T: Scalar>(p: &HypergeomParams<T>, t: &T, stop: u64) -> T {
    let mut sum = T::one();
    let mut term = T::one();
    for k in 0..stop {
        let kk = T::from_i64(k as i64);
        term = term * (p.a.clone() + kk.clone()) * (p.b.clone() + kk.clone()) * t.clone()
            / ((p.c.clone() + kk.clone()) * (kk + T::one()));
        if term.is_zero() {
            break;
        }
        sum = sum + term.clone();
    }
    sum
}

/// Exact value of a terminating series at a rational point.
pub fn hypergeom_terminating_exact(
    params: &HypergeomParams<ExactScalar>,
    t: &ExactScalar,
) -> Result<ExactScalar> {
    let stop = params
        .stop_index()
        .ok_or_else(|| Error::InvalidInput("series does not terminate".into()))?;
    params.check_denominator(Some(stop))?;
    Ok(terminating_sum(params, t, stop))
}

/// Terminating series in double precision. Orders up to
/// [`EXACT_ROUTE_MAX_ORDER`] are summed exactly and rounded once.
pub fn hypergeom_terminating(params: &HypergeomParams<f64>, t: f64) -> Result<f64> {
    let stop = params
        .stop_index()
        .ok_or_else(|| Error::InvalidInput("series does not terminate".into()))?;
    params.check_denominator(Some(stop))?;
    if stop <= EXACT_ROUTE_MAX_ORDER {
        let conv = |v: f64| {
            ExactScalar::from_f64(v)
                .ok_or_else(|| Error::InvalidInput(format!("non-finite parameter {v}")))
        };
        let exact = HypergeomParams::new(conv(params.a)?, conv(params.b)?, conv(params.c)?);
        return Ok(terminating_sum(&exact, &conv(t)?, stop).to_f64());
    }
    Ok(terminating_sum(params, &t, stop))
}

/// Coefficients (ascending in `t`) of a terminating series as an exact
/// polynomial.
pub fn terminating_polynomial(params: &HypergeomParams<ExactScalar>) -> Result<RationalPoly> {
    let stop = params
        .stop_index()
        .ok_or_else(|| Error::InvalidInput("series does not terminate".into()))?;
    params.check_denominator(Some(stop))?;
    let mut coeffs = Vec::with_capacity(stop as usize + 1);
    let mut term = ExactScalar::one();
    coeffs.push(term.clone());
    for k in 0..stop as i64 {
        term = term * (&params.a + k) * (&params.b + k) / ((&params.c + k) * (k + 1));
        coeffs.push(term.clone());
    }
    Ok(RationalPoly::new(coeffs))
}

/// Series for `0 <= x < 1`. `rel_tol` bounds the tail relative to the
/// partial sum; the returned error combines the geometric tail majorant with
/// an accumulated rounding estimate.
pub fn hypergeom_series(params: &HypergeomParams<f64>, x: f64, rel_tol: f64) -> Result<Estimate> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::InvalidInput(format!(
            "series argument {x} outside [0, 1)"
        )));
    }
    if rel_tol <= 0.0 || rel_tol.is_nan() {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let HypergeomParams { a, b, c } = *params;
    if let Some(stop) = params.stop_index() {
        params.check_denominator(Some(stop))?;
        let v = hypergeom_terminating(params, x)?;
        return Ok(Estimate::rounded(v));
    }
    params.check_denominator(None)?;
    if x == 0.0 {
        return Ok(Estimate::new(1.0, 0.0));
    }

    let ratio = |k: f64| (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
    // beyond this index the term ratio is monotone in k
    let settle = 2.0 * (a.abs() + b.abs() + c.abs() + 2.0);

    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    let mut abs_sum = 1.0f64;
    let mut term = 1.0f64;
    let mut prev_ratio = f64::NAN;
    for k in 0..SERIES_TERM_CAP {
        let kf = k as f64;
        let r = ratio(kf);
        term *= r;
        // Neumaier summation
        let s = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - s) + term;
        } else {
            comp += (term - s) + sum;
        }
        sum = s;
        abs_sum += term.abs();
        if term == 0.0 {
            return Ok(Estimate::new(sum + comp, rounding(abs_sum, k)));
        }
        let next = ratio(kf + 1.0).abs();
        let monotone = prev_ratio.is_nan()
            || (next - r.abs()).signum() == (r.abs() - prev_ratio).signum()
            || next == r.abs();
        prev_ratio = r.abs();
        if kf >= settle && monotone {
            let q = next.max(x);
            if q < 1.0 {
                let tail = term.abs() * q / (1.0 - q);
                let total = sum + comp;
                if tail <= rel_tol * total.abs() {
                    return Ok(Estimate::new(total, tail + rounding(abs_sum, k)));
                }
            }
        }
    }
    Err(Error::NonConvergent(format!(
        "F({a}, {b}; {c}; {x}) tail bound not met within {SERIES_TERM_CAP} terms"
    )))
}

fn rounding(abs_sum: f64, terms: usize) -> f64 {
    // relative error of each term grows linearly with its index
    (terms as f64 + 2.0) * f64::EPSILON * abs_sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::pochhammer::pochhammer;
    use approx::assert_relative_eq;

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::ratio(n, d)
    }

    #[test]
    fn value_at_zero_is_one() {
        let alpha = q(5, 2);
        let n = 3;
        let p = HypergeomParams::new(1 - &alpha - n, q(-n, 1), q(1, 1));
        assert_eq!(
            hypergeom_terminating_exact(&p, &ExactScalar::zero()).unwrap(),
            ExactScalar::one()
        );
        let pf = HypergeomParams::new(1.0, 2.0, 3.0);
        assert_eq!(hypergeom_series(&pf, 0.0, 1e-12).unwrap().value, 1.0);
    }

    #[test]
    fn first_order_case_is_linear() {
        let alpha = q(7, 3);
        let t = q(2, 5);
        let p = HypergeomParams::new(-alpha.clone(), q(-1, 1), q(1, 1));
        assert_eq!(
            hypergeom_terminating_exact(&p, &t).unwrap(),
            1 + &alpha * &t
        );
    }

    #[test]
    fn value_at_one_is_chu_vandermonde() {
        for n in 0..8i64 {
            for alpha in [q(2, 1), q(5, 2), q(10, 1)] {
                let p = HypergeomParams::new(1 - &alpha - n, q(-n, 1), q(1, 1));
                let direct = hypergeom_terminating_exact(&p, &ExactScalar::one()).unwrap();
                let closed = pochhammer(&(&alpha + n), n as u64) / ExactScalar::factorial(n as u64);
                assert_eq!(direct, closed);
            }
        }
    }

    #[test]
    fn float_entry_point_rounds_exact_sum_once() {
        let p = HypergeomParams::new(-11.5, -6.0, 1.0);
        let exact = hypergeom_terminating_exact(
            &HypergeomParams::new(q(-23, 2), q(-6, 1), q(1, 1)),
            &ExactScalar::from_f64(0.3).unwrap(),
        )
        .unwrap();
        assert_eq!(hypergeom_terminating(&p, 0.3).unwrap(), exact.to_f64());
    }

    #[test]
    fn geometric_series() {
        let e = hypergeom_series(&HypergeomParams::new(1.0, 1.0, 1.0), 0.5, 1e-15).unwrap();
        assert_relative_eq!(e.value, 2.0, max_relative = 1e-14);
        assert!(e.error < 1e-13);
    }

    #[test]
    fn euler_transform_spot_value() {
        let (n, alpha, x) = (2.0, 2.5, 0.3);
        let lhs =
            hypergeom_series(&HypergeomParams::new(n + 1.0, n + alpha, 1.0), x, 1e-15).unwrap();
        let rhs = (1.0 - x).powf(-alpha - 2.0 * n)
            * hypergeom_terminating(&HypergeomParams::new(1.0 - alpha - n, -n, 1.0), x).unwrap();
        assert_relative_eq!(lhs.value, rhs, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = HypergeomParams::new(0.5, 0.5, -2.0);
        assert!(hypergeom_series(&p, 0.5, 1e-10).is_err());
        let p = HypergeomParams::new(0.5, 0.5, 1.0);
        assert!(hypergeom_series(&p, 1.0, 1e-10).is_err());
    }

    #[test]
    fn stalls_near_one_with_divergent_boundary() {
        // c - a - b = -3: terms decay like k^2 x^k, far too slowly at this x
        let p = HypergeomParams::new(2.0, 3.0, 2.0);
        let r = hypergeom_series(&p, 1.0 - 1e-6, 1e-15);
        assert!(matches!(r, Err(Error::NonConvergent(_))));
    }

    #[test]
    fn euler_transform_grid() {
        for n in 0..=6 {
            let nf = n as f64;
            for alpha in [2.0, 2.5, 3.5] {
                for i in 0..50 {
                    let x = 0.99 * i as f64 / 49.0;
                    let lhs = hypergeom_series(
                        &HypergeomParams::new(nf + 1.0, nf + alpha, 1.0),
                        x,
                        1e-15,
                    )
                    .unwrap();
                    let p =
                        hypergeom_terminating(&HypergeomParams::new(1.0 - alpha - nf, -nf, 1.0), x)
                            .unwrap();
                    let rhs = (1.0 - x).powf(-alpha - 2.0 * nf) * p;
                    assert!(
                        (lhs.value - rhs).abs() / lhs.value <= 1e-11,
                        "n={n} alpha={alpha} x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn pfaff_transform_grid() {
        for n in 0..=8 {
            let nf = n as f64;
            for alpha in [1.5, 2.0, 2.5, 5.0] {
                for i in 0..=30 {
                    let t = 0.03 * i as f64;
                    let lhs =
                        hypergeom_terminating(&HypergeomParams::new(1.0 - alpha - nf, -nf, 1.0), t)
                            .unwrap();
                    let rhs = (1.0 - t).powi(n)
                        * hypergeom_terminating(
                            &HypergeomParams::new(-nf, nf + alpha, 1.0),
                            t / (t - 1.0),
                        )
                        .unwrap();
                    assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs());
                }
            }
        }
    }

    #[test]
    fn exact_evaluation_is_deterministic() {
        let p = HypergeomParams::new(q(-17, 3), q(-5, 1), q(1, 1));
        let t = q(7, 9);
        let first = hypergeom_terminating_exact(&p, &t).unwrap();
        for _ in 0..5 {
            assert_eq!(
                hypergeom_terminating_exact(&p, &t)
                    .unwrap()
                    .to_exact_string(),
                first.to_exact_string()
            );
        }
    }

    #[test]
    fn polynomial_view_matches_sum() {
        let p = HypergeomParams::new(q(-9, 2), q(-4, 1), q(1, 1));
        let poly = terminating_polynomial(&p).unwrap();
        assert_eq!(poly.degree(), Some(4));
        let t = q(3, 11);
        assert_eq!(poly.eval(&t), hypergeom_terminating_exact(&p, &t).unwrap());
    }
}
