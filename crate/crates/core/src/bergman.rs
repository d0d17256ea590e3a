//! Weighted Bergman spaces on the unit disc in the probability normalization
//! `dA_alpha = (alpha-1)/pi (1-|z|^2)^(alpha-2) dA`, `alpha > 1`.
//!
//! In this normalization the monomials are orthogonal with
//! `||z^k||^2 = k!/(alpha)_k` and the reproducing kernel is
//! `K_w(z) = (1 - z conj(w))^(-alpha)`. Weights written as `(1-|z|^2)^beta`
//! with kernel `(1 - z conj(w))^(-beta-2)` correspond to `alpha = beta + 2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::exact::ExactScalar;
use crate::poly::RationalPoly;
use crate::specfun::{hypergeom_series, pochhammer, terminating_polynomial, HypergeomParams};

use std::f64::consts::PI;

/// Default tail tolerance for truncated kernels.
pub const KERNEL_TAIL_TOL: f64 = 1e-12;
/// Relative tolerance at which the two forms of the pointwise bound must agree.
pub const FORM_TOL: f64 = 1e-10;

/// The two measures against which concentration is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureVariant {
    Mu,
    Nu,
}

impl MeasureVariant {
    pub fn name(self) -> &'static str {
        match self {
            MeasureVariant::Mu => "mu",
            MeasureVariant::Nu => "nu",
        }
    }
}

impl std::str::FromStr for MeasureVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mu" => Ok(MeasureVariant::Mu),
            "nu" => Ok(MeasureVariant::Nu),
            other => Err(Error::InvalidInput(format!(
                "unknown measure variant {other:?}"
            ))),
        }
    }
}

/// Weight parameter and derivative order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceParams {
    alpha: ExactScalar,
    #[serde(skip)]
    alpha_f64: f64,
    n: u32,
}

impl SpaceParams {
    pub fn new(alpha: ExactScalar, n: u32) -> Result<Self> {
        if alpha <= 1 {
            return Err(Error::InvalidInput(format!(
                "weight parameter must exceed 1, got {alpha}"
            )));
        }
        let alpha_f64 = alpha.to_f64();
        Ok(Self {
            alpha,
            alpha_f64,
            n,
        })
    }

    pub fn from_f64(alpha: f64, n: u32) -> Result<Self> {
        let a = ExactScalar::from_f64(alpha)
            .ok_or_else(|| Error::InvalidInput(format!("non-finite alpha {alpha}")))?;
        Self::new(a, n)
    }

    pub fn alpha(&self) -> &ExactScalar {
        &self.alpha
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha_f64
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn with_n(&self, n: u32) -> Self {
        Self { n, ..self.clone() }
    }

    /// Exponent of the sharp concentration bound.
    pub fn exponent(&self, variant: MeasureVariant) -> ExactScalar {
        let n = self.n as i64;
        match variant {
            MeasureVariant::Mu => (&self.alpha + n) * (n + 1),
            MeasureVariant::Nu => &self.alpha + 2 * n,
        }
    }

    /// `alpha + 2n - 1`.
    pub fn shifted_weight(&self) -> f64 {
        self.alpha_f64 + 2.0 * self.n as f64 - 1.0
    }

    /// `n! (alpha)_n`, exact.
    pub fn norm_constant(&self) -> ExactScalar {
        ExactScalar::factorial(self.n as u64) * pochhammer(&self.alpha, self.n as u64)
    }

    /// `Gamma(alpha + 2n - 1) / Gamma(alpha)`, exact: `(alpha)_{2n-1}` for
    /// `n >= 1` and `1/(alpha-1)` for `n = 0`.
    pub fn gamma_ratio(&self) -> ExactScalar {
        if self.n == 0 {
            (&self.alpha - 1).recip()
        } else {
            pochhammer(&self.alpha, 2 * self.n as u64 - 1)
        }
    }

    /// `F(1-alpha-n, -n; 1; t)` as an exact polynomial in `t`.
    pub fn profile_polynomial(&self) -> RationalPoly {
        let n = self.n as i64;
        let params = HypergeomParams::new(
            1 - &self.alpha - n,
            ExactScalar::from_integer(-n),
            ExactScalar::one(),
        );
        terminating_polynomial(&params).expect("upper parameter -n always terminates")
    }
}

/// A polynomial `sum a_k z^k` with complex coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticPolynomial {
    coeffs: Vec<Complex64>,
}

impl AnalyticPolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        c[k] = Complex64::new(1.0, 0.0);
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Largest index with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .rposition(|c| *c != Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Number of nonzero coefficients.
    pub fn support_size(&self) -> usize {
        self.coeffs.iter().filter(|c| c.norm_sqr() != 0.0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    z: Complex64,
}

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.norm() < 1.0) {
            return Err(Error::InvalidInput(format!(
                "point {z} is not in the open unit disc"
            )));
        }
        Ok(Self { z })
    }

    pub fn origin() -> Self {
        Self {
            z: Complex64::new(0.0, 0.0),
        }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn r(&self) -> f64 {
        self.z.norm()
    }

    pub fn r2(&self) -> f64 {
        self.z.norm_sqr()
    }
}

/// `||z^k||^2 = k! / (alpha)_k`.
pub fn monomial_norm(k: u64, alpha: &ExactScalar) -> ExactScalar {
    ExactScalar::factorial(k) / pochhammer(alpha, k)
}

/// Squared norm by Parseval, in double precision.
pub fn norm_sq(f: &AnalyticPolynomial, alpha: f64) -> f64 {
    let mut m = 1.0;
    let mut total = 0.0;
    for (k, a) in f.coeffs.iter().enumerate() {
        if k > 0 {
            m *= k as f64 / (alpha + k as f64 - 1.0);
        }
        total += a.norm_sqr() * m;
    }
    total
}

/// Squared norm by Parseval for coefficients given as exact
/// `(real, imaginary)` pairs.
pub fn norm_sq_exact(coeffs: &[(ExactScalar, ExactScalar)], alpha: &ExactScalar) -> ExactScalar {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, (re, im))| (re * re + im * im) * monomial_norm(k as u64, alpha))
        .sum()
}

/// `K_w(z) = (1 - z conj(w))^(-alpha)` on the principal branch.
pub fn eval_kernel(w: DiskPoint, z: DiskPoint, alpha: f64) -> Complex64 {
    (Complex64::new(1.0, 0.0) - z.z * w.z.conj()).powf(-alpha)
}

/// Taylor polynomial of `K_w` together with a bound on the omitted tail,
/// valid uniformly on the closed disc.
pub fn kernel_polynomial(
    w: DiskPoint,
    alpha: f64,
    tol: f64,
    max_degree: usize,
) -> Result<(AnalyticPolynomial, f64)> {
    let rw = w.r();
    let wc = w.z.conj();
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut mag = 1.0;
    for k in 0..max_degree {
        // coefficient ratios (alpha+k)/(k+1) |w| decrease in k for alpha > 1
        let q = (alpha + k as f64 + 1.0) / (k as f64 + 2.0) * rw;
        let next_mag = mag * (alpha + k as f64) / (k as f64 + 1.0) * rw;
        if q < 1.0 {
            let tail = next_mag / (1.0 - q);
            if tail <= tol {
                return Ok((AnalyticPolynomial::new(coeffs), tail));
            }
        }
        let prev = *coeffs.last().unwrap();
        coeffs.push(prev * wc * ((alpha + k as f64) / (k as f64 + 1.0)));
        mag = next_mag;
    }
    Err(Error::TruncationFail(format!(
        "kernel at |w| = {rw} needs more than {max_degree} terms for tail {tol:e}"
    )))
}

/// Coefficients of the `n`-th derivative.
pub fn derivative_coeffs(f: &AnalyticPolynomial, n: u32) -> AnalyticPolynomial {
    let n = n as usize;
    if f.coeffs.len() <= n {
        return AnalyticPolynomial::new(Vec::new());
    }
    let coeffs = (n..f.coeffs.len())
        .map(|k| {
            let falling: f64 = (0..n).map(|i| (k - i) as f64).product();
            f.coeffs[k] * falling
        })
        .collect();
    AnalyticPolynomial::new(coeffs)
}

/// The sharp pointwise factor `g(r)` with `|f^(n)(z)|^2 <= g(|z|) ||f||^2`,
/// computed as `n!(alpha)_n (1-r^2)^(-alpha-2n) F(1-alpha-n, -n; 1; r^2)`
/// and cross-checked against `n!(alpha)_n F(n+1, alpha+n; 1; r^2)`.
pub fn g_profile(params: &SpaceParams, r: f64) -> Result<Estimate> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidInput(format!("radius {r} outside [0, 1)")));
    }
    let t = r * r;
    let n = params.n as f64;
    let alpha = params.alpha_f64;
    let c = params.norm_constant().to_f64();
    let p = params.profile_polynomial().eval_f64(t);
    let closed = c * (1.0 - t).powf(-alpha - 2.0 * n) * p;
    let series = hypergeom_series(&HypergeomParams::new(n + 1.0, alpha + n, 1.0), t, 1e-15)?;
    let other = c * series.value;
    let rel = (closed - other).abs() / closed.abs();
    if rel > FORM_TOL {
        return Err(Error::FormMismatch(format!(
            "pointwise factor forms differ by {rel:e} at r = {r} (n = {}, alpha = {alpha})",
            params.n
        )));
    }
    Ok(Estimate::new(
        closed,
        (closed - other).abs().max(c * series.error),
    ))
}

/// Density of the hyperbolic area measure, `(1-|z|^2)^(-2)`.
pub fn density_hyperbolic(z: DiskPoint) -> f64 {
    (1.0 - z.r2()).powi(-2)
}

/// Density of `mu_{n,alpha}` with respect to planar area.
pub fn density_mu(params: &SpaceParams, z: DiskPoint) -> f64 {
    let t = z.r2();
    let c = params.norm_constant().to_f64();
    let p = params.profile_polynomial().eval_f64(t);
    params.shifted_weight() * (1.0 - t).powf(params.alpha_f64 + 2.0 * params.n as f64)
        / (PI * c * p)
}

/// Density of `nu_{n,alpha}` with respect to planar area.
pub fn density_nu(params: &SpaceParams, z: DiskPoint) -> f64 {
    let t = z.r2();
    (1.0 - t).powf(params.alpha_f64 + 2.0 * params.n as f64) / (PI * params.gamma_ratio().to_f64())
}

pub fn hyperbolic_disc_area(r: f64) -> f64 {
    let t = r * r;
    PI * t / (1.0 - t)
}

pub fn radius_for_area(s: f64) -> f64 {
    (s / (s + PI)).sqrt()
}

pub fn hyperbolic_circle_length(r: f64) -> f64 {
    2.0 * PI * r / (1.0 - r * r)
}

/// Outcome of the pointwise estimate at one point.
#[derive(Debug, Clone, Serialize)]
pub struct PointwiseReport {
    pub bound: Estimate,
    pub norm_sq: f64,
    pub derivative_sq: f64,
    pub margin: Estimate,
}

/// `g(|z|) ||f||^2 - |f^(n)(z)|^2`, which must be nonnegative.
pub fn pointwise_bound_check(
    f: &AnalyticPolynomial,
    params: &SpaceParams,
    z: DiskPoint,
) -> Result<PointwiseReport> {
    let g = g_profile(params, z.r())?;
    let norm = norm_sq(f, params.alpha_f64);
    let d = derivative_coeffs(f, params.n).eval(z.z).norm_sqr();
    let rhs = g.value * norm;
    let err = g.error * norm + 8.0 * f64::EPSILON * (rhs + d) * (f.coeffs.len() as f64 + 1.0);
    let margin = Estimate::new(rhs - d, err);
    if margin.value < -margin.error {
        return Err(Error::violation(
            "pointwise_bound",
            format!(
                "margin {:e} at z = {} (n = {})",
                margin.value, z.z, params.n
            ),
        ));
    }
    Ok(PointwiseReport {
        bound: g,
        norm_sq: norm,
        derivative_sq: d,
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{adaptive_gk15, integrate_01_weighted};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::ratio(n, d)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_small_alpha() {
        assert!(SpaceParams::new(q(1, 1), 0).is_err());
        assert!(SpaceParams::new(q(1, 2), 2).is_err());
        assert!(SpaceParams::new(q(11, 10), 2).is_ok());
    }

    #[test]
    fn exponents() {
        let p = SpaceParams::new(q(5, 2), 2).unwrap();
        assert_eq!(p.exponent(MeasureVariant::Mu), q(27, 2));
        assert_eq!(p.exponent(MeasureVariant::Nu), q(13, 2));
    }

    #[test]
    fn monomial_norms() {
        assert_eq!(monomial_norm(0, &q(7, 3)), ExactScalar::one());
        assert_eq!(monomial_norm(1, &q(2, 1)), q(1, 2));
        for k in 0..=20 {
            assert_eq!(monomial_norm(k, &q(2, 1)), q(1, k as i64 + 1));
        }
    }

    #[test]
    fn parseval_examples() {
        assert_eq!(norm_sq(&AnalyticPolynomial::from_real(&[1.0]), 2.0), 1.0);
        assert_eq!(
            norm_sq(&AnalyticPolynomial::from_real(&[0.0, 1.0]), 2.0),
            0.5
        );
        assert_eq!(
            norm_sq(&AnalyticPolynomial::from_real(&[1.0, 1.0]), 2.0),
            1.5
        );
        let exact = norm_sq_exact(&[(q(1, 1), q(0, 1)), (q(1, 1), q(0, 1))], &q(2, 1));
        assert_eq!(exact, q(3, 2));
    }

    /// `||f||^2` by quadrature of `|f|^2` against the weight: Gauss–Jacobi in
    /// `t = r^2` and a uniform angular rule, exact for trigonometric
    /// polynomials of the degrees used here.
    fn norm_by_quadrature(f: &AnalyticPolynomial, alpha: f64) -> f64 {
        let m = 64;
        let angular = |t: f64| {
            let r = t.sqrt();
            (0..m)
                .map(|j| {
                    let phi = 2.0 * PI * j as f64 / m as f64;
                    f.eval(Complex64::from_polar(r, phi)).norm_sqr()
                })
                .sum::<f64>()
                * 2.0
                * PI
                / m as f64
        };
        let radial = integrate_01_weighted(angular, 0.0, alpha - 2.0, 1e-13).unwrap();
        (alpha - 1.0) / PI * 0.5 * radial.value
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10))]
        #[test]
        fn parseval_matches_area_integral(
            coeffs in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..=7),
            alpha in 1.2f64..6.0,
        ) {
            let f = AnalyticPolynomial::new(coeffs.iter().map(|&(a, b)| c(a, b)).collect());
            let lhs = norm_sq(&f, alpha);
            let rhs = norm_by_quadrature(&f, alpha);
            prop_assert!((lhs - rhs).abs() <= 1e-8 * lhs.max(1.0));
        }

        #[test]
        fn reproducing_property(
            coeffs in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..=8),
            wr in 0.0f64..0.9, wphi in 0.0f64..6.3, alpha in 1.1f64..6.0,
        ) {
            let f = AnalyticPolynomial::new(coeffs.iter().map(|&(a, b)| c(a, b)).collect());
            let w = DiskPoint::new(Complex64::from_polar(wr, wphi)).unwrap();
            let (kw, _) = kernel_polynomial(w, alpha, 1e-14, 100_000).unwrap();
            prop_assert!((inner(&f, &kw, alpha) - f.eval(w.z())).norm() <= 1e-10);
        }
    }

    /// `<f, g>` by Parseval.
    fn inner(f: &AnalyticPolynomial, g: &AnalyticPolynomial, alpha: f64) -> Complex64 {
        let mut m = 1.0;
        let mut acc = c(0.0, 0.0);
        for k in 0..f.coeffs().len().min(g.coeffs().len()) {
            if k > 0 {
                m *= k as f64 / (alpha + k as f64 - 1.0);
            }
            acc += f.coeffs()[k] * g.coeffs()[k].conj() * m;
        }
        acc
    }

    #[test]
    fn kernel_trivial_values_and_reproduction() {
        let alpha = 2.5;
        let w = DiskPoint::new(c(0.4, 0.1)).unwrap();
        let z = DiskPoint::new(c(-0.3, 0.5)).unwrap();
        assert_eq!(eval_kernel(DiskPoint::origin(), z, alpha), c(1.0, 0.0));
        assert_eq!(eval_kernel(w, DiskPoint::origin(), alpha), c(1.0, 0.0));
        let (kw, tail) = kernel_polynomial(w, alpha, 1e-13, 100_000).unwrap();
        assert!(tail <= 1e-13);
        assert!((kw.eval(z.z()) - eval_kernel(w, z, alpha)).norm() <= 1e-12);
        let f = AnalyticPolynomial::from_real(&[1.0, 2.0, 0.0, 1.0]);
        assert!((inner(&f, &kw, alpha) - f.eval(w.z())).norm() <= 1e-10);
    }

    #[test]
    fn kernel_truncation_can_fail() {
        let w = DiskPoint::new(c(0.999, 0.0)).unwrap();
        assert!(matches!(
            kernel_polynomial(w, 3.0, 1e-12, 50),
            Err(Error::TruncationFail(_))
        ));
    }

    #[test]
    fn derivatives() {
        let f = AnalyticPolynomial::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(derivative_coeffs(&f, 0), f);
        assert_eq!(
            derivative_coeffs(&AnalyticPolynomial::monomial(2), 1),
            AnalyticPolynomial::from_real(&[0.0, 2.0])
        );
        assert_eq!(
            derivative_coeffs(&AnalyticPolynomial::monomial(3), 2),
            AnalyticPolynomial::from_real(&[0.0, 6.0])
        );
        assert_eq!(
            derivative_coeffs(&AnalyticPolynomial::monomial(1), 3).degree(),
            None
        );
    }

    #[test]
    fn g_profile_values() {
        for n in 0..5 {
            let p = SpaceParams::new(q(5, 2), n).unwrap();
            let g0 = g_profile(&p, 0.0).unwrap().value;
            assert_relative_eq!(g0, p.norm_constant().to_f64(), max_relative = 1e-15);
        }
        let p0 = SpaceParams::new(q(3, 1), 0).unwrap();
        for r in [0.1, 0.5, 0.9] {
            assert_relative_eq!(
                g_profile(&p0, r).unwrap().value,
                (1.0f64 - r * r).powf(-3.0),
                max_relative = 1e-12
            );
        }
        let p = SpaceParams::new(q(2, 1), 1).unwrap();
        let g = g_profile(&p, 0.5f64.sqrt()).unwrap();
        assert_relative_eq!(g.value, 64.0, max_relative = 1e-12);
    }

    #[test]
    fn g_profile_rejects_boundary() {
        let p = SpaceParams::new(q(2, 1), 1).unwrap();
        assert!(g_profile(&p, 1.0).is_err());
    }

    #[test]
    fn densities_at_origin() {
        let o = DiskPoint::origin();
        assert_eq!(density_hyperbolic(o), 1.0);
        let p = SpaceParams::new(q(5, 2), 2).unwrap();
        // (alpha+3)/(pi * 2 * alpha(alpha+1)) and 1/(pi (alpha)_3)
        assert_relative_eq!(
            density_mu(&p, o),
            5.5 / (PI * 2.0 * 2.5 * 3.5),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            density_nu(&p, o),
            1.0 / (PI * 2.5 * 3.5 * 4.5),
            max_relative = 1e-15
        );
        let p0 = SpaceParams::new(q(5, 2), 0).unwrap();
        assert_relative_eq!(density_nu(&p0, o), 1.5 / PI, max_relative = 1e-15);
    }

    #[test]
    fn density_identities() {
        for n in 0..5u32 {
            for alpha in [q(3, 2), q(2, 1), q(7, 2)] {
                let p = SpaceParams::new(alpha, n).unwrap();
                let a = p.alpha_f64();
                for r in [0.0, 0.3, 0.7, 0.95] {
                    let z = DiskPoint::new(c(r * 0.6, r * 0.8)).unwrap();
                    let t = r * r;
                    let nf = n as f64;
                    let pt = crate::specfun::hypergeom_terminating(
                        &HypergeomParams::new(1.0 - a - nf, -nf, 1.0),
                        t,
                    )
                    .unwrap();
                    let lhs = density_mu(&p, z) * PI * p.norm_constant().to_f64() * pt;
                    let rhs = (a + 2.0 * nf - 1.0) * (1.0 - t).powf(a + 2.0 * nf);
                    assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300), "{lhs} {rhs}");
                    let gamma_ratio = (crate::specfun::ln_gamma(a + 2.0 * nf - 1.0)
                        - crate::specfun::ln_gamma(a))
                    .exp();
                    let lhs = density_nu(&p, z) * PI * gamma_ratio;
                    let rhs = (1.0 - t).powf(a + 2.0 * nf);
                    assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
                }
            }
        }
    }

    #[test]
    fn area_and_length() {
        assert_eq!(hyperbolic_disc_area(0.0), 0.0);
        assert_relative_eq!(
            hyperbolic_disc_area(0.5f64.sqrt()),
            PI,
            max_relative = 1e-15
        );
        assert_eq!(hyperbolic_circle_length(0.0), 0.0);
        assert_relative_eq!(
            hyperbolic_circle_length(0.5),
            4.0 * PI / 3.0,
            max_relative = 1e-15
        );
        for i in 1..10 {
            let r = i as f64 / 10.0;
            assert!((radius_for_area(hyperbolic_disc_area(r)) - r).abs() <= 1e-14);
            let s = hyperbolic_disc_area(r);
            let l = hyperbolic_circle_length(r);
            assert!((l * l - (4.0 * PI * s + 4.0 * s * s)).abs() <= 1e-12 * (l * l).max(1.0));
            let quad = adaptive_gk15(
                |rho| 2.0 * PI * rho / (1.0 - rho * rho).powi(2),
                0.0,
                r,
                1e-13,
            )
            .unwrap();
            assert!((quad.value - s).abs() <= 1e-10);
        }
    }

    #[test]
    fn pointwise_bound_examples() {
        let one = AnalyticPolynomial::from_real(&[1.0]);
        let p0 = SpaceParams::new(q(5, 2), 0).unwrap();
        let z = DiskPoint::new(c(0.3, -0.4)).unwrap();
        let rep = pointwise_bound_check(&one, &p0, z).unwrap();
        assert_relative_eq!(
            rep.margin.value,
            (1.0f64 - 0.25).powf(-2.5) - 1.0,
            max_relative = 1e-12
        );
        let p2 = SpaceParams::new(q(5, 2), 2).unwrap();
        let rep = pointwise_bound_check(&one, &p2, z).unwrap();
        assert!(rep.margin.value > 0.0 && rep.derivative_sq == 0.0);
    }

    #[test]
    fn kernel_saturates_pointwise_bound() {
        let p0 = SpaceParams::new(q(5, 2), 0).unwrap();
        let w = DiskPoint::new(c(0.5, 0.2)).unwrap();
        let mut rels = Vec::new();
        for tol in [1e-2, 1e-5, 1e-10, 1e-14] {
            let (kw, _) = kernel_polynomial(w, 2.5, tol, 100_000).unwrap();
            let rep = pointwise_bound_check(&kw, &p0, w).unwrap();
            rels.push(rep.margin.value / (rep.bound.value * rep.norm_sq));
        }
        assert!(rels[0] > rels[3]);
        assert!(rels.iter().all(|&r| r >= -1e-14));
        assert!(rels[3] <= 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn pointwise_bound_holds(
            coeffs in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..=9),
            n in 0u32..5, alpha_num in 11i64..60, r in 0.0f64..0.95, phi in 0.0f64..6.3,
        ) {
            let f = AnalyticPolynomial::new(coeffs.iter().map(|&(a, b)| c(a, b)).collect());
            let p = SpaceParams::new(q(alpha_num, 10), n).unwrap();
            let z = DiskPoint::new(Complex64::from_polar(r, phi)).unwrap();
            prop_assert!(pointwise_bound_check(&f, &p, z).is_ok());
        }
    }
}
