//! The differential inequality behind the comparison argument, and the
//! hypergeometric transforms that relate the two forms of the weight.
//!
//! With `F(t) = F(n+1, n+alpha; 1; t) = (1-t)^(-c) P(t)`, `c = alpha + 2n`,
//! the quantity
//! `H = X (1-t)^(-2) F^2 - F F' - t F F'' + t F'^2`
//! equals `Q(t) (1-t)^(-2c-2)` for a polynomial `Q` with rational
//! coefficients, so its sign is decided exactly.

use serde::{Deserialize, Serialize};

use crate::bergman::{g_profile, MeasureVariant, SpaceParams};
use crate::error::{Error, Result};
use crate::exact::ExactScalar;
use crate::poly::RationalPoly;
use crate::specfun::{hypergeom_series, hypergeom_terminating, HypergeomParams};

/// Most negative value of `H` tolerated before reporting a violation.
pub const LOG_LAPLACIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLaplacianReport {
    pub n: u32,
    pub alpha: ExactScalar,
    /// Minimum of `H` over the grid.
    pub min_margin: f64,
    pub min_at: f64,
    /// `H(0)`, computed exactly.
    pub at_zero: ExactScalar,
    /// Relative gap between the exact route and a series evaluation at
    /// `t = 1/2`.
    pub series_gap: f64,
}

/// The numerator polynomial `Q`.
pub fn numerator_polynomial(params: &SpaceParams) -> RationalPoly {
    let p = params.profile_polynomial();
    let dp = p.derivative();
    let ddp = dp.derivative();
    let c = params.alpha() + ExactScalar::from_integer(2 * params.n() as i64);
    let x = params.exponent(MeasureVariant::Mu);
    let one = RationalPoly::constant(ExactScalar::one());
    let t = RationalPoly::x();
    let omt = one.sub(&t);
    // (1-t)^(c+1) F' and (1-t)^(c+2) F''
    let f1 = p.scale(&c).add(&omt.mul(&dp));
    let f2 = p
        .scale(&(&c * &(&c + 1)))
        .add(&omt.mul(&dp).scale(&(&c * 2)))
        .add(&omt.mul(&omt).mul(&ddp));
    p.mul(&p)
        .scale(&x)
        .sub(&omt.mul(&p).mul(&f1))
        .sub(&t.mul(&p).mul(&f2))
        .add(&t.mul(&f1).mul(&f1))
}

/// `H(t)` from the exact numerator.
fn h_value(q: &RationalPoly, c: f64, t: f64) -> Result<f64> {
    let exact_t = ExactScalar::from_f64(t)
        .ok_or_else(|| Error::InvalidInput(format!("grid point {t} is not finite")))?;
    let qv = q.eval(&exact_t).to_f64();
    Ok(qv * (1.0 - t).powf(-2.0 * c - 2.0))
}

/// `H(t)` by summing the three hypergeometric series directly.
pub fn h_by_series(params: &SpaceParams, t: f64) -> Result<f64> {
    let n = params.n() as f64;
    let alpha = params.alpha_f64();
    let (a, b) = (n + 1.0, n + alpha);
    let tol = 1e-15;
    let f = hypergeom_series(&HypergeomParams::new(a, b, 1.0), t, tol)?.value;
    let f1 = a * b * hypergeom_series(&HypergeomParams::new(a + 1.0, b + 1.0, 2.0), t, tol)?.value;
    let f2 = a * (a + 1.0) * b * (b + 1.0) / 2.0
        * hypergeom_series(&HypergeomParams::new(a + 2.0, b + 2.0, 3.0), t, tol)?.value;
    let x = params.exponent(MeasureVariant::Mu).to_f64();
    Ok(x * f * f / ((1.0 - t) * (1.0 - t)) - f * f1 - t * f * f2 + t * f1 * f1)
}

/// Minimum of `H` over `t_grid`, which must lie in `[0, 1)`.
pub fn laplacian_log_g_check(
    n: u32,
    alpha: &ExactScalar,
    t_grid: &[f64],
) -> Result<LogLaplacianReport> {
    if t_grid.iter().any(|t| !(0.0..1.0).contains(t)) {
        return Err(Error::InvalidInput("grid points must lie in [0, 1)".into()));
    }
    let params = SpaceParams::new(alpha.clone(), n)?;
    let q = numerator_polynomial(&params);
    let c = params.alpha_f64() + 2.0 * n as f64;
    let mut min_margin = f64::INFINITY;
    let mut min_at = f64::NAN;
    for &t in t_grid {
        let h = h_value(&q, c, t)?;
        if h < min_margin {
            min_margin = h;
            min_at = t;
        }
    }
    let exact = h_value(&q, c, 0.5)?;
    let series = h_by_series(&params, 0.5)?;
    let series_gap = (exact - series).abs() / exact.abs().max(1.0);
    let report = LogLaplacianReport {
        n,
        alpha: alpha.clone(),
        min_margin,
        min_at,
        at_zero: q.eval(&ExactScalar::zero()),
        series_gap,
    };
    if min_margin < -LOG_LAPLACIAN_TOL {
        return Err(Error::violation(
            "log_laplacian",
            format!("H({min_at}) = {min_margin:e} for n = {n}, alpha = {alpha}"),
        ));
    }
    Ok(report)
}

/// Uniform grid of `count` points on `[0, hi]`.
pub fn uniform_grid(hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| hi * i as f64 / (count - 1).max(1) as f64)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub n: u32,
    pub alpha: f64,
    /// Largest relative gap between the series and the terminating form.
    pub euler_max: f64,
    /// Largest relative gap between the series and the Pfaff-transformed
    /// terminating form.
    pub pfaff_max: f64,
    /// The weight function evaluated without a form mismatch at every point.
    pub g_profile_ok: bool,
}

/// Compares three evaluations of `F(n+1, n+alpha; 1; x)` on `grid`.
pub fn transform_residuals(n: u32, alpha: f64, grid: &[f64]) -> Result<TransformReport> {
    let params = SpaceParams::from_f64(alpha, n)?;
    let nf = n as f64;
    let series_params = HypergeomParams::new(nf + 1.0, nf + alpha, 1.0);
    let euler_params = HypergeomParams::new(1.0 - alpha - nf, -nf, 1.0);
    let pfaff_params = HypergeomParams::new(-nf, nf + alpha, 1.0);
    let mut euler_max: f64 = 0.0;
    let mut pfaff_max: f64 = 0.0;
    let mut g_profile_ok = true;
    for &x in grid {
        let direct = hypergeom_series(&series_params, x, 1e-15)?.value;
        let euler = (1.0 - x).powf(-alpha - 2.0 * nf) * hypergeom_terminating(&euler_params, x)?;
        let pfaff =
            (1.0 - x).powf(-nf - alpha) * hypergeom_terminating(&pfaff_params, x / (x - 1.0))?;
        euler_max = euler_max.max((euler - direct).abs() / direct.abs());
        pfaff_max = pfaff_max.max((pfaff - direct).abs() / direct.abs());
        match g_profile(&params, x.sqrt()) {
            Ok(_) => {}
            Err(Error::FormMismatch(_)) => g_profile_ok = false,
            Err(e) => return Err(e),
        }
    }
    Ok(TransformReport {
        n,
        alpha,
        euler_max,
        pfaff_max,
        g_profile_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn vanishes_at_origin() {
        for n in 0..7 {
            for alpha in [
                ExactScalar::from_integer(2),
                ExactScalar::ratio(5, 2),
                ExactScalar::ratio(7, 2),
            ] {
                let params = SpaceParams::new(alpha, n).unwrap();
                assert!(numerator_polynomial(&params)
                    .eval(&ExactScalar::zero())
                    .is_zero());
            }
        }
    }

    #[test]
    fn order_zero_is_identically_zero() {
        // F = (1-t)^(-alpha) substituted directly makes H vanish
        let alpha = 2.5f64;
        let params = SpaceParams::new(ExactScalar::ratio(5, 2), 0).unwrap();
        assert!(numerator_polynomial(&params).is_zero());
        for t in [0.1, 0.4, 0.8] {
            let f = (1.0f64 - t).powf(-alpha);
            let f1 = alpha * (1.0f64 - t).powf(-alpha - 1.0);
            let f2 = alpha * (alpha + 1.0) * (1.0f64 - t).powf(-alpha - 2.0);
            let h = alpha * f * f / ((1.0 - t) * (1.0 - t)) - f * f1 - t * f * f2 + t * f1 * f1;
            assert!(h.abs() <= 1e-12 * t * f * f2);
        }
    }

    #[test]
    fn third_order_grid() {
        let grid = uniform_grid(0.995, 200);
        let rep = laplacian_log_g_check(3, &ExactScalar::ratio(5, 2), &grid).unwrap();
        assert!(rep.min_margin >= 0.0);
        assert!(rep.at_zero.is_zero());
        assert!(rep.series_gap <= 1e-10, "{}", rep.series_gap);
    }

    #[test]
    fn series_route_matches_exact() {
        for n in 0..5 {
            let params = SpaceParams::new(ExactScalar::from_integer(2), n).unwrap();
            let q = numerator_polynomial(&params);
            let c = 2.0 + 2.0 * n as f64;
            for t in [0.2, 0.5, 0.7] {
                let a = h_value(&q, c, t).unwrap();
                let b = h_by_series(&params, t).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-9, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn rejects_points_outside() {
        assert!(laplacian_log_g_check(1, &ExactScalar::from_integer(2), &[1.0]).is_err());
    }

    #[test]
    fn transforms_agree() {
        for n in 0..=6 {
            for alpha in [2.0, 2.5, 3.5] {
                let rep = transform_residuals(n, alpha, &uniform_grid(0.95, 50)).unwrap();
                assert!(rep.euler_max <= 1e-11, "{rep:?}");
                assert!(rep.pfaff_max <= 1e-11, "{rep:?}");
                assert!(rep.g_profile_ok);
            }
        }
    }
}
