use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bergman::{derivative_coeffs, norm_sq, AnalyticPolynomial, MeasureVariant, SpaceParams};
use crate::error::{Error, Result};

/// The density `u(z) = |f^(n)(z)|^2 W(|z|^2)` whose superlevel sets are
/// measured, for `f` rescaled to unit norm.
///
/// `W(t) = (1-t)^(alpha+2n) / (pi n! (alpha)_n P(t))` for `mu` and
/// `(1-t)^(alpha+2n) / (pi (alpha)_{2n-1})` for `nu`, where
/// `P(t) = F(1-alpha-n, -n; 1; t)`.
#[derive(Debug, Clone)]
pub struct UField {
    params: SpaceParams,
    variant: MeasureVariant,
    deriv: Vec<Complex64>,
    p_coeffs: Vec<f64>,
    power: f64,
    constant: f64,
}

impl UField {
    pub fn new(
        f: &AnalyticPolynomial,
        params: &SpaceParams,
        variant: MeasureVariant,
    ) -> Result<Self> {
        let norm = norm_sq(f, params.alpha_f64());
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidInput(
                "input function must have positive finite norm".into(),
            ));
        }
        let scale = norm.sqrt().recip();
        let deriv: Vec<Complex64> = derivative_coeffs(f, params.n())
            .coeffs()
            .iter()
            .map(|c| c * scale)
            .collect();
        let constant = match variant {
            MeasureVariant::Mu => 1.0 / (PI * params.norm_constant().to_f64()),
            MeasureVariant::Nu => 1.0 / (PI * params.gamma_ratio().to_f64()),
        };
        let p_coeffs = match variant {
            MeasureVariant::Mu => params.profile_polynomial().to_f64_coeffs(),
            MeasureVariant::Nu => vec![1.0],
        };
        Ok(Self {
            params: params.clone(),
            variant,
            deriv,
            p_coeffs,
            power: params.alpha_f64() + 2.0 * params.n() as f64,
            constant,
        })
    }

    pub fn params(&self) -> &SpaceParams {
        &self.params
    }

    pub fn variant(&self) -> MeasureVariant {
        self.variant
    }

    /// `f^(n)` vanishes identically.
    pub fn is_zero(&self) -> bool {
        self.deriv.iter().all(|c| c.norm_sqr() == 0.0)
    }

    /// `|f^(n)|` depends on `|z|` only.
    pub fn is_radial(&self) -> bool {
        self.deriv.iter().filter(|c| c.norm_sqr() != 0.0).count() <= 1
    }

    /// Value at `z`, given `1 - |z|^2` computed without cancellation.
    pub fn eval_with(&self, z: Complex64, one_minus_r2: f64) -> f64 {
        let d = self
            .deriv
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
        let t = z.norm_sqr();
        // P has positive coefficients, so Horner is stable
        let p = self.p_coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
        d.norm_sqr() * one_minus_r2.powf(self.power) * self.constant / p
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        self.eval_with(z, 1.0 - z.norm_sqr())
    }

    /// Upper bound on `u` implied by the sharp pointwise estimate.
    pub fn ceiling(&self) -> f64 {
        match self.variant {
            MeasureVariant::Mu => 1.0 / PI,
            MeasureVariant::Nu => self.params.shifted_weight() / PI,
        }
    }

    /// Factor turning `int u d(mu_hyp)` into `int |f^(n)|^2 (1-|z|^2)^(-2) d(measure)`.
    pub fn hat_scale(&self) -> f64 {
        match self.variant {
            MeasureVariant::Mu => self.params.shifted_weight(),
            MeasureVariant::Nu => 1.0,
        }
    }

    /// Factor turning `int u (1-|z|^2)^2 d(mu_hyp)` into `int |f^(n)|^2 d(measure)`.
    pub fn literal_scale(&self) -> f64 {
        self.hat_scale()
    }

    /// Exponent of the sharp bound for this variant.
    pub fn exponent(&self) -> f64 {
        self.params.exponent(self.variant).to_f64()
    }

    /// Approximate maximizer of `u`: coarse polar grid, then compass search.
    pub fn locate_peak(&self) -> (Complex64, f64) {
        let mut best = (
            Complex64::new(0.0, 0.0),
            self.eval(Complex64::new(0.0, 0.0)),
        );
        let x_max = (1.0f64 + 1e4).ln();
        for i in 1..=64 {
            let x = x_max * i as f64 / 64.0;
            let sigma = x.exp_m1();
            let r = (sigma / (1.0 + sigma)).sqrt();
            let omt = (-x).exp();
            for j in 0..72 {
                let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / 72.0);
                let v = self.eval_with(z, omt);
                if v > best.1 {
                    best = (z, v);
                }
            }
        }
        let mut step = 0.05 * (1.0 - best.0.norm()).max(1e-6);
        let dirs = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ];
        while step > 1e-13 {
            let mut moved = false;
            for d in dirs {
                let z = best.0 + d * step;
                if z.norm() >= 1.0 {
                    continue;
                }
                let v = self.eval(z);
                if v > best.1 {
                    best = (z, v);
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best
    }
}
