//! The large-weight limit: the concentration integrals for `alpha = R`,
//! rescaled by `y = R t`, tend to integrals against `e^(-y)` on the half line.

use serde::{Deserialize, Serialize};

use crate::bergman::SpaceParams;
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::exact::ExactScalar;
use crate::specfun::{adaptive_gk15, gamma, integrate_halfline_exp, laguerre_eval};

/// Relative slack added to quadrature error bars.
const BOUND_SLACK: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockReport {
    pub k: u32,
    pub n: u32,
    pub integral: Estimate,
    pub bound: ExactScalar,
    /// `integral - bound`, expected nonpositive.
    pub margin: f64,
    pub err: f64,
}

/// `n! ((k-n)!)^2 / k!`.
pub fn fock_bound(k: u32, n: u32) -> ExactScalar {
    let f = |m: u32| ExactScalar::factorial(m as u64);
    &(&f(n) * &(&f(k - n) * &f(k - n))) / &f(k)
}

/// `int_0^inf y^(k-n) e^(-y) / L_n(-y) dy`.
pub fn fock_integral(k: u32, n: u32, tol: f64) -> Result<Estimate> {
    let p = (k - n) as i32;
    integrate_halfline_exp(|y| y.powi(p) / laguerre_eval(n, y), tol)
}

/// Compares the half-line integral with its exact bound.
pub fn fock_limit_check(k: u32, n: u32, tol: f64) -> Result<FockReport> {
    if k < n {
        return Err(Error::InvalidInput(format!(
            "need k >= n, got k = {k}, n = {n}"
        )));
    }
    let integral = fock_integral(k, n, tol)?;
    let bound = fock_bound(k, n);
    let b = bound.to_f64();
    let margin = integral.value - b;
    let err = integral.error + BOUND_SLACK * b;
    if margin > err {
        return Err(Error::violation(
            "fock",
            format!("integral exceeds bound by {margin:e} (error {err:e}) at k = {k}, n = {n}"),
        ));
    }
    Ok(FockReport {
        k,
        n,
        integral,
        bound,
        margin,
        err,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledRow {
    pub r: f64,
    pub value: Estimate,
    /// `|value - target|`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockConvergence {
    pub k: u32,
    pub n: u32,
    pub target: Estimate,
    pub rows: Vec<ScaledRow>,
    pub gaps_shrinking: bool,
}

/// `R^(k-n+1) int_0^1 t^(k-n) (1-t)^(R+2n-2) / P(t) dt` with `alpha = R`,
/// computed as `int_0^R y^(k-n) (1-y/R)^(R+2n-2) / P(y/R) dy`.
pub fn scaled_bergman_integral(k: u32, n: u32, r: f64, tol: f64) -> Result<Estimate> {
    let alpha =
        ExactScalar::from_f64(r).ok_or_else(|| Error::InvalidInput(format!("bad weight {r}")))?;
    let params = SpaceParams::new(alpha, n)?;
    let coeffs = params.profile_polynomial().to_f64_coeffs();
    let p = (k - n) as i32;
    let q = r + 2.0 * n as f64 - 2.0;
    // in y = R t the mass sits at y = O(1) whatever the size of R
    let integrand = |y: f64| {
        let t = y / r;
        let poly = coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
        y.powi(p) * (q * (-t).ln_1p()).exp() / poly
    };
    // geometric panels so the first ones resolve the bulk near the origin
    let abs_tol = tol * gamma(p as f64 + 1.0);
    let mut total = Estimate::new(0.0, 0.0);
    let (mut a, mut b) = (0.0, 1.0f64.min(r));
    while a < r {
        total = total + adaptive_gk15(integrand, a, b, abs_tol)?;
        a = b;
        b = (2.0 * b).min(r);
    }
    Ok(total)
}

/// Scaled Bergman integrals for increasing `R` against the half-line value.
pub fn bergman_to_fock_convergence(
    k: u32,
    n: u32,
    r_list: &[f64],
    tol: f64,
) -> Result<FockConvergence> {
    if k < n {
        return Err(Error::InvalidInput(format!(
            "need k >= n, got k = {k}, n = {n}"
        )));
    }
    if r_list.windows(2).any(|w| w[1] <= w[0]) || r_list.iter().any(|r| *r <= 1.0) {
        return Err(Error::InvalidInput(
            "weights must be increasing and above one".into(),
        ));
    }
    let target = fock_integral(k, n, tol)?;
    let rows = r_list
        .iter()
        .map(|&r| {
            let value = scaled_bergman_integral(k, n, r, tol)?;
            Ok(ScaledRow {
                r,
                value,
                gap: (value.value - target.value).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gaps_shrinking = rows.windows(2).all(|w| w[1].gap < w[0].gap);
    Ok(FockConvergence {
        k,
        n,
        target,
        rows,
        gaps_shrinking,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// `e E_1(1)` by the continued fraction `1/(1+1/(1+1/(1+2/(1+2/...))))`.
    fn e_e1_one() -> f64 {
        let mut acc = 0.0;
        for j in (1..200).rev() {
            let j = j as f64;
            acc = j / (1.0 + j / (1.0 + acc));
        }
        1.0 / (1.0 + acc)
    }

    #[test]
    fn order_zero_is_equality() {
        let rep = fock_limit_check(0, 0, 1e-13).unwrap();
        assert_relative_eq!(rep.integral.value, 1.0, max_relative = 1e-13);
        assert_eq!(rep.bound, ExactScalar::one());
        assert!(rep.margin.abs() <= rep.err);
    }

    #[test]
    fn first_order_value() {
        let rep = fock_limit_check(1, 1, 1e-13).unwrap();
        assert_relative_eq!(e_e1_one(), 0.596_347_362_323_194, max_relative = 1e-14);
        assert_relative_eq!(rep.integral.value, e_e1_one(), max_relative = 1e-12);
        assert!(rep.margin < 0.0);
    }

    #[test]
    fn bound_values() {
        assert_eq!(fock_bound(5, 2), ExactScalar::ratio(3, 5));
        let rep = fock_limit_check(5, 2, 1e-12).unwrap();
        assert!(rep.integral.value <= 0.6);
    }

    #[test]
    fn whole_table_passes() {
        for n in 0..=4 {
            for k in n..=25 {
                fock_limit_check(k, n, 1e-12).unwrap();
            }
        }
    }

    #[test]
    fn order_zero_scaled_closed_form() {
        for r in [10.0, 100.0, 1000.0] {
            let v = scaled_bergman_integral(0, 0, r, 1e-13).unwrap();
            assert_relative_eq!(v.value, r / (r - 1.0), max_relative = 1e-11);
        }
    }

    #[test]
    fn scaled_integrals_converge() {
        for (n, k) in [(0, 2), (1, 2), (2, 4)] {
            let c = bergman_to_fock_convergence(k, n, &[1e2, 1e3, 1e4], 1e-13).unwrap();
            assert!(c.gaps_shrinking, "{c:?}");
            assert!(c.rows.last().unwrap().gap < 1e-2);
        }
        let c = bergman_to_fock_convergence(2, 0, &[1e4], 1e-13).unwrap();
        assert_relative_eq!(c.target.value, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(fock_limit_check(1, 2, 1e-12).is_err());
        assert!(bergman_to_fock_convergence(2, 1, &[10.0, 5.0], 1e-12).is_err());
    }
}
