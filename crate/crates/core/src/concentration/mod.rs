//! Concentration of `|f^(n)|^2` on sets of prescribed hyperbolic measure.
//!
//! The solver measures superlevel sets of the density `u` from
//! [`UField`], inverts the distribution function and integrates `u` over
//! the resulting set. Profiles are refined level by level until successive
//! estimates agree to the requested tolerance.

mod engine;
mod field;
pub mod fock;
pub mod log_laplacian;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bergman::{AnalyticPolynomial, MeasureVariant, SpaceParams};
use crate::error::{Error, Result};

pub use engine::{LevelIntegrals, RayEngine, Resolution};
pub use field::UField;

/// Largest refinement level tried by default.
pub const DEFAULT_MAX_LEVEL: u32 = 5;
/// Default agreement required between consecutive levels.
pub const DEFAULT_PROFILE_TOL: f64 = 1e-8;
/// Lower bound on any reported error.
pub const ERROR_FLOOR: f64 = 1e-12;

/// `1 - (1 + s/pi)^(1 - exponent)`.
pub fn theta(s: f64, exponent: f64) -> f64 {
    -((1.0 - exponent) * (s / PI).ln_1p()).exp_m1()
}

/// Inverse of [`theta`] in `s`.
pub fn theta_inverse(t: f64, exponent: f64) -> f64 {
    PI * ((1.0 - t).ln() / (1.0 - exponent)).exp_m1()
}

/// Geometric grid of `count` points on `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo * (ratio * i as f64).exp()
            }
        })
        .collect()
}

/// The default sampling grid: 40 geometric points on `[0.05, 100]`.
pub fn default_s_grid() -> Vec<f64> {
    geometric_grid(0.05, 100.0, 40)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathChoice {
    /// Radial when `|f^(n)|` depends on `|z|` only, otherwise two-dimensional.
    Auto,
    Radial,
    TwoD,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_level: u32,
    pub path: PathChoice,
    /// Truncation in the area coordinate; derived from the largest `s`
    /// when absent.
    pub sigma_max: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_PROFILE_TOL,
            max_level: DEFAULT_MAX_LEVEL,
            path: PathChoice::Auto,
            sigma_max: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub t: f64,
    pub rho: f64,
    pub err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub s: f64,
    /// The level `u*(s)`.
    pub level: f64,
    pub i_raw: f64,
    pub i_hat: f64,
    pub theta: f64,
    /// `int |f^(n)|^2 d(measure)` over the same set.
    pub literal: f64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationProfile {
    pub params: SpaceParams,
    pub function_id: String,
    pub coefficients: Vec<Complex64>,
    pub variant: MeasureVariant,
    pub exponent: f64,
    pub hat_scale: f64,
    pub radial_path: bool,
    pub level: u32,
    pub converged: bool,
    pub samples: Vec<ProfileSample>,
}

impl ConcentrationProfile {
    pub fn max_error(&self) -> f64 {
        self.samples.iter().map(|s| s.err).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundVerdict {
    Pass,
    Violation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginSample {
    pub s: f64,
    pub margin: f64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub margins: Vec<MarginSample>,
    pub min_margin: f64,
    pub verdict: BoundVerdict,
    /// Every margin exceeds its error bar.
    pub strict: bool,
}

/// Margins `theta(s) - I_hat(s)` against combined error bars.
pub fn bound_report(profile: &ConcentrationProfile) -> BoundReport {
    let margins: Vec<MarginSample> = profile
        .samples
        .iter()
        .map(|p| MarginSample {
            s: p.s,
            margin: p.theta - p.i_hat,
            err: p.err + 4.0 * f64::EPSILON * p.theta.abs().max(p.i_hat.abs()),
        })
        .collect();
    let min_margin = margins
        .iter()
        .map(|m| m.margin)
        .fold(f64::INFINITY, f64::min);
    let verdict = if margins.iter().all(|m| m.margin >= -m.err) {
        BoundVerdict::Pass
    } else {
        BoundVerdict::Violation
    };
    let strict = margins.iter().all(|m| m.margin > m.err);
    BoundReport {
        margins,
        min_margin,
        verdict,
        strict,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeReport {
    /// Minimum over interior samples of `I'' + X I'/(pi + s)`.
    pub ode_min: f64,
    pub ode_min_at: f64,
    /// Minimum second difference of `I(T(t))` on a uniform grid.
    pub convexity_min: f64,
    pub tol: f64,
    pub passes: bool,
}

pub struct ConcentrationSolver {
    field: Arc<UField>,
    function_id: String,
    coefficients: Vec<Complex64>,
    options: SolverOptions,
    center: Complex64,
    radial: bool,
    peak: f64,
    engines: Mutex<HashMap<(u32, u64), Arc<RayEngine>>>,
}

impl ConcentrationSolver {
    pub fn new(
        f: &AnalyticPolynomial,
        function_id: impl Into<String>,
        params: &SpaceParams,
        variant: MeasureVariant,
        options: SolverOptions,
    ) -> Result<Self> {
        if !(options.tol > 0.0) {
            return Err(Error::InvalidInput("tolerance must be positive".into()));
        }
        let field = UField::new(f, params, variant)?;
        let radial = match options.path {
            PathChoice::Auto => field.is_radial(),
            PathChoice::Radial => {
                if !field.is_radial() {
                    return Err(Error::InvalidInput(
                        "radial path requested for a non-radial density".into(),
                    ));
                }
                true
            }
            PathChoice::TwoD => false,
        };
        let (peak_at, peak) = field.locate_peak();
        let center = if radial {
            Complex64::new(0.0, 0.0)
        } else {
            peak_at
        };
        Ok(Self {
            field: Arc::new(field),
            function_id: function_id.into(),
            coefficients: f.coeffs().to_vec(),
            options,
            center,
            radial,
            peak,
            engines: Mutex::new(HashMap::new()),
        })
    }

    pub fn field(&self) -> &UField {
        &self.field
    }

    pub fn is_radial_path(&self) -> bool {
        self.radial
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn exponent(&self) -> f64 {
        self.field.exponent()
    }

    fn engine(&self, level: u32, sigma_max: f64) -> Arc<RayEngine> {
        let key = (level, sigma_max.to_bits());
        if let Some(e) = self.engines.lock().expect("engine cache").get(&key) {
            return e.clone();
        }
        let built = Arc::new(RayEngine::build(
            self.field.clone(),
            self.center,
            Resolution::at_level(level, self.radial),
            sigma_max,
        ));
        self.engines
            .lock()
            .expect("engine cache")
            .entry(key)
            .or_insert(built)
            .clone()
    }

    fn sigma_for(&self, s_max: f64) -> f64 {
        self.options.sigma_max.unwrap_or(50.0 * (1.0 + s_max))
    }

    fn top(&self, engine: &RayEngine) -> f64 {
        self.peak.max(engine.sup()) * (1.0 + 1e-12)
    }

    /// Hyperbolic measure of `{u > t}`.
    pub fn distribution_rho(&self, t: f64) -> Result<LevelStats> {
        if t <= 0.0 {
            return Err(Error::Unbounded(format!(
                "level {t} has superlevel set of infinite measure"
            )));
        }
        if self.field.is_zero() || t >= self.top(&self.engine(0, self.sigma_for(100.0))) {
            return Ok(LevelStats {
                t,
                rho: 0.0,
                err: 0.0,
            });
        }
        let mut sigma = self.sigma_for(100.0);
        for _ in 0..4 {
            match self.refine_rho(t, sigma) {
                Err(Error::NonConvergent(_)) => sigma *= 10.0,
                other => return other,
            }
        }
        Err(Error::NonConvergent(format!(
            "superlevel set at t = {t:e} is not contained in the truncated disc"
        )))
    }

    fn refine_rho(&self, t: f64, sigma: f64) -> Result<LevelStats> {
        let mut prev = self.engine(0, sigma).level(t, false)?.rho;
        let mut diff = f64::INFINITY;
        for level in 1..=self.options.max_level {
            let cur = self.engine(level, sigma).level(t, false)?.rho;
            diff = (cur - prev).abs();
            prev = cur;
            if diff <= self.options.tol * cur.max(1.0) {
                break;
            }
        }
        Ok(LevelStats {
            t,
            rho: prev,
            err: diff.max(ERROR_FLOOR * prev.max(1.0)),
        })
    }

    /// Level `t` at which the superlevel set has measure `s`, at the
    /// finest refinement level.
    pub fn u_star(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::InvalidInput(format!("u* needs s > 0, got {s}")));
        }
        if self.field.is_zero() {
            return Ok(0.0);
        }
        let sigma = self.sigma_for(s);
        let mut last = Err(Error::NonConvergent("no attempt".into()));
        for retry in 0..4 {
            let engine = self.engine(self.options.max_level, sigma * 10f64.powi(retry));
            last = self.invert(&engine, s).map(|(t, _)| t);
            if last.is_ok() {
                break;
            }
        }
        last
    }

    /// Bisection in `log t` for `rho(t) = s`. Returns the level and the
    /// integrals over its superlevel set.
    fn invert(&self, engine: &RayEngine, s: f64) -> Result<(f64, LevelIntegrals)> {
        let target = 1e-11 * s.max(1.0);
        // touching the truncation radius counts as "too large"
        let rho = |t: f64| {
            engine
                .level(t, false)
                .map(|l| l.rho)
                .unwrap_or(f64::INFINITY)
        };
        let mut hi = self.top(engine);
        let mut lo = 0.5 * hi;
        let mut halvings = 0;
        while rho(lo) <= s {
            hi = lo;
            lo *= 0.5;
            halvings += 1;
            if halvings > 2000 || lo == 0.0 {
                return Err(Error::NonConvergent(format!(
                    "no level bracket for s = {s}"
                )));
            }
        }
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if !(mid > lo && mid < hi) {
                break;
            }
            let r = rho(mid);
            if (r - s).abs() <= target {
                hi = mid;
                break;
            }
            if r > s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lv = engine.level(hi, true)?;
        Ok((hi, lv))
    }

    /// One sample at one refinement level: `(level, i_raw, literal_raw)`,
    /// with the measure mismatch attributed to the boundary level.
    fn sample_at(&self, engine: &RayEngine, s: f64) -> Result<(f64, f64, f64)> {
        if s == 0.0 || self.field.is_zero() {
            let t = if self.field.is_zero() {
                0.0
            } else {
                self.top(engine)
            };
            return Ok((t, 0.0, 0.0));
        }
        let (t, lv) = self.invert(engine, s)?;
        let gap = s - lv.rho;
        // the boundary carries u = t and (1-|z|^2)^2 of order its own value,
        // so only the measure term is corrected in the literal integral
        Ok((t, lv.mass + gap * t, lv.literal))
    }

    fn profile_level(
        &self,
        level: u32,
        s_grid: &[f64],
        sigma: f64,
    ) -> Result<Vec<(f64, f64, f64)>> {
        let engine = self.engine(level, sigma);
        s_grid
            .par_iter()
            .map(|&s| self.sample_at(&engine, s))
            .collect()
    }

    /// Concentration profile on `s_grid`.
    pub fn profile(&self, s_grid: &[f64]) -> Result<ConcentrationProfile> {
        if s_grid.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(Error::InvalidInput(
                "s values must be finite and nonnegative".into(),
            ));
        }
        if s_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "s grid must be strictly increasing".into(),
            ));
        }
        let s_max = s_grid.last().copied().unwrap_or(1.0);
        let mut sigma = self.sigma_for(s_max);
        let mut attempt = 0;
        loop {
            match self.refine_profile(s_grid, sigma) {
                Err(Error::NonConvergent(msg)) if msg.contains("truncation") && attempt < 3 => {
                    attempt += 1;
                    sigma *= 10.0;
                }
                other => return other,
            }
        }
    }

    fn refine_profile(&self, s_grid: &[f64], sigma: f64) -> Result<ConcentrationProfile> {
        let kappa = self.field.hat_scale();
        let lit = self.field.literal_scale();
        let mut prev = self.profile_level(0, s_grid, sigma)?;
        let mut diffs = vec![f64::INFINITY; s_grid.len()];
        let mut level = 0;
        let mut converged = false;
        for l in 1..=self.options.max_level {
            let cur = self.profile_level(l, s_grid, sigma)?;
            for (d, (a, b)) in diffs.iter_mut().zip(prev.iter().zip(&cur)) {
                *d = kappa * (a.1 - b.1).abs();
            }
            prev = cur;
            level = l;
            if diffs.iter().all(|d| *d <= self.options.tol) {
                converged = true;
                break;
            }
        }
        if self.options.max_level == 0 {
            diffs.iter_mut().for_each(|d| *d = ERROR_FLOOR);
            converged = true;
        }
        let exponent = self.exponent();
        let samples = s_grid
            .iter()
            .zip(prev)
            .zip(diffs)
            .map(|((&s, (t, raw, literal)), d)| ProfileSample {
                s,
                level: t,
                i_raw: raw,
                i_hat: kappa * raw,
                theta: theta(s, exponent),
                literal: lit * literal,
                err: d.max(ERROR_FLOOR),
            })
            .collect();
        Ok(ConcentrationProfile {
            params: self.field.params().clone(),
            function_id: self.function_id.clone(),
            coefficients: self.coefficients.clone(),
            variant: self.field.variant(),
            exponent,
            hat_scale: kappa,
            radial_path: self.radial,
            level,
            converged,
            samples,
        })
    }

    /// Checks the comparison differential inequality at interior samples
    /// of `profile` and convexity of `I` in the variable `theta(s)`.
    pub fn ode_convexity_check(
        &self,
        profile: &ConcentrationProfile,
        tol: f64,
    ) -> Result<OdeReport> {
        let x = profile.exponent;
        let kappa = profile.hat_scale;
        let engine = self.engine(
            profile.level,
            self.sigma_for(profile.samples.last().map_or(1.0, |p| p.s)),
        );
        let mut ode_min = f64::INFINITY;
        let mut ode_min_at = f64::NAN;
        if !self.field.is_zero() {
            let interior: Vec<&ProfileSample> =
                profile.samples.iter().filter(|p| p.s > 0.0).collect();
            let values: Vec<Result<(f64, f64)>> = interior
                .par_iter()
                .map(|p| {
                    let t = p.level;
                    let d = 1e-3 * t;
                    let r = |k: f64| engine.level(t + k * d, false).map(|l| l.rho);
                    let drho = (r(-2.0)? - 8.0 * r(-1.0)? + 8.0 * r(1.0)? - r(2.0)?) / (12.0 * d);
                    // I' = u*(s) = t and I'' = 1/rho'(t)
                    Ok((p.s, kappa * (1.0 / drho + x * t / (PI + p.s))))
                })
                .collect();
            for v in values {
                let (s, val) = v?;
                if val < ode_min {
                    ode_min = val;
                    ode_min_at = s;
                }
            }
        }
        let convexity_min = self.convexity_min(profile)?;
        let passes = (ode_min >= -tol || ode_min.is_infinite()) && convexity_min >= -tol;
        Ok(OdeReport {
            ode_min,
            ode_min_at,
            convexity_min,
            tol,
            passes,
        })
    }

    fn convexity_min(&self, profile: &ConcentrationProfile) -> Result<f64> {
        let positive: Vec<f64> = profile
            .samples
            .iter()
            .map(|p| p.s)
            .filter(|s| *s > 0.0)
            .collect();
        let (Some(&lo), Some(&hi)) = (positive.first(), positive.last()) else {
            return Ok(0.0);
        };
        let x = profile.exponent;
        let (a, b) = (theta(lo, x), theta(hi, x));
        let grid: Vec<f64> = (0..=40).map(|i| a + (b - a) * i as f64 / 40.0).collect();
        let s_grid: Vec<f64> = grid.iter().map(|&t| theta_inverse(t, x)).collect();
        let mut s_sorted = s_grid.clone();
        s_sorted.dedup_by(|p, q| *p <= *q);
        if s_sorted.len() < 3 {
            return Ok(0.0);
        }
        let j = self.profile(&s_sorted)?;
        Ok(j.samples
            .windows(3)
            .map(|w| w[0].i_hat - 2.0 * w[1].i_hat + w[2].i_hat)
            .fold(f64::INFINITY, f64::min))
    }
}

/// Profile of `f` with default solver options.
pub fn profile_i(
    f: &AnalyticPolynomial,
    function_id: &str,
    params: &SpaceParams,
    variant: MeasureVariant,
    s_grid: &[f64],
) -> Result<ConcentrationProfile> {
    ConcentrationSolver::new(f, function_id, params, variant, SolverOptions::default())?
        .profile(s_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::{kernel_polynomial, DiskPoint};
    use crate::exact::ExactScalar;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn one() -> AnalyticPolynomial {
        AnalyticPolynomial::from_real(&[1.0])
    }

    fn solver(
        f: &AnalyticPolynomial,
        alpha: ExactScalar,
        n: u32,
        variant: MeasureVariant,
    ) -> ConcentrationSolver {
        let p = SpaceParams::new(alpha, n).unwrap();
        ConcentrationSolver::new(f, "test", &p, variant, SolverOptions::default()).unwrap()
    }

    #[test]
    fn theta_round_trip() {
        for x in [2.0, 4.5, 12.0] {
            for s in [0.01, 0.5, 3.0] {
                assert_relative_eq!(theta_inverse(theta(s, x), x), s, max_relative = 1e-10);
            }
        }
        assert_eq!(theta(0.0, 3.0), 0.0);
    }

    #[test]
    fn constant_function_distribution() {
        let alpha = 2.5;
        let sol = solver(&one(), ExactScalar::ratio(5, 2), 0, MeasureVariant::Mu);
        for t in [0.3, 0.1, 1e-3] {
            let r2 = 1.0 - (PI * t).powf(1.0 / alpha);
            let rho = PI * r2 / (1.0 - r2);
            let st = sol.distribution_rho(t).unwrap();
            assert_relative_eq!(st.rho, rho, max_relative = 1e-11);
        }
        assert_eq!(sol.distribution_rho(0.5).unwrap().rho, 0.0);
        assert!(matches!(
            sol.distribution_rho(0.0),
            Err(Error::Unbounded(_))
        ));
        assert!(matches!(
            sol.distribution_rho(-1.0),
            Err(Error::Unbounded(_))
        ));
    }

    #[test]
    fn constant_function_inverse() {
        let sol = solver(&one(), ExactScalar::from_integer(3), 0, MeasureVariant::Mu);
        for s in [0.5, 1.0, 5.0, 20.0] {
            let t = sol.u_star(s).unwrap();
            assert_relative_eq!(t, (1.0 + s / PI).powf(-3.0) / PI, max_relative = 1e-8);
            let back = sol.distribution_rho(t).unwrap();
            assert!((back.rho - s).abs() <= 1e-7 * s.max(1.0) + back.err);
        }
        let t0 = sol.u_star(1e-9).unwrap();
        assert_relative_eq!(t0, 1.0 / PI, max_relative = 1e-7);
    }

    #[test]
    fn constant_function_profile_is_extremal() {
        for (alpha, a) in [
            (ExactScalar::from_integer(2), 2.0),
            (ExactScalar::ratio(7, 2), 3.5),
        ] {
            let sol = solver(&one(), alpha, 0, MeasureVariant::Mu);
            let s_grid = geometric_grid(0.1, 100.0, 25);
            let prof = sol.profile(&s_grid).unwrap();
            assert!(prof.converged);
            for p in &prof.samples {
                let exact = 1.0 - (1.0 + p.s / PI).powf(1.0 - a);
                assert!(
                    (p.i_hat - exact).abs() <= 1e-8,
                    "s = {}: {} vs {exact}",
                    p.s,
                    p.i_hat
                );
                assert_relative_eq!(p.i_raw * (a - 1.0), p.i_hat, max_relative = 1e-14);
            }
            let rep = bound_report(&prof);
            assert_eq!(rep.verdict, BoundVerdict::Pass);
            assert!(rep.min_margin.abs() <= 1e-8);
        }
    }

    #[test]
    fn zero_measure_gives_zero() {
        let sol = solver(
            &AnalyticPolynomial::monomial(2),
            ExactScalar::from_integer(2),
            1,
            MeasureVariant::Mu,
        );
        let prof = sol.profile(&[0.0, 1.0]).unwrap();
        assert_eq!(prof.samples[0].i_raw, 0.0);
        assert!(prof.samples[1].i_raw > 0.0);
    }

    #[test]
    fn vanishing_derivative_profile() {
        let f = AnalyticPolynomial::from_real(&[1.0, 1.0]);
        let sol = solver(&f, ExactScalar::from_integer(2), 2, MeasureVariant::Mu);
        let prof = sol.profile(&[0.5, 3.0]).unwrap();
        assert!(prof.samples.iter().all(|p| p.i_raw == 0.0));
        assert_eq!(bound_report(&prof).verdict, BoundVerdict::Pass);
        assert_eq!(sol.distribution_rho(0.1).unwrap().rho, 0.0);
    }

    #[test]
    fn first_derivative_of_z_is_strict() {
        let sol = solver(
            &AnalyticPolynomial::monomial(1),
            ExactScalar::from_integer(2),
            1,
            MeasureVariant::Mu,
        );
        let prof = sol.profile(&geometric_grid(0.1, 50.0, 12)).unwrap();
        let rep = bound_report(&prof);
        assert_eq!(rep.verdict, BoundVerdict::Pass);
        assert!(rep.strict);
        assert!(rep.min_margin > 1e-4);
    }

    #[test]
    fn kernel_matches_constant_profile() {
        let w = DiskPoint::new(Complex64::new(0.3, 0.0)).unwrap();
        let (k, _) = kernel_polynomial(w, 2.0, 1e-15, 10_000).unwrap();
        let sol = solver(&k, ExactScalar::from_integer(2), 0, MeasureVariant::Mu);
        assert!(!sol.is_radial_path());
        let s_grid = [0.1, 1.0, 10.0, 50.0];
        let prof = sol.profile(&s_grid).unwrap();
        for p in &prof.samples {
            let exact = 1.0 - (1.0 + p.s / PI).powf(-1.0);
            assert!(
                (p.i_hat - exact).abs() <= 1e-6,
                "s = {}: {} vs {exact}",
                p.s,
                p.i_hat
            );
        }
    }

    #[test]
    fn radial_and_planar_paths_agree() {
        let f = AnalyticPolynomial::monomial(1);
        let p = SpaceParams::new(ExactScalar::from_integer(2), 0).unwrap();
        let radial =
            ConcentrationSolver::new(&f, "z", &p, MeasureVariant::Mu, SolverOptions::default())
                .unwrap();
        let planar = ConcentrationSolver::new(
            &f,
            "z",
            &p,
            MeasureVariant::Mu,
            SolverOptions {
                path: PathChoice::TwoD,
                ..SolverOptions::default()
            },
        )
        .unwrap();
        for t in [0.05, 0.02, 0.005] {
            let a = radial.distribution_rho(t).unwrap();
            let b = planar.distribution_rho(t).unwrap();
            assert!((a.rho - b.rho).abs() <= a.err + b.err, "{t}: {a:?} {b:?}");
        }
    }

    #[test]
    fn ode_holds_with_equality_for_constant() {
        let sol = solver(&one(), ExactScalar::ratio(5, 2), 0, MeasureVariant::Mu);
        let prof = sol.profile(&geometric_grid(0.1, 20.0, 10)).unwrap();
        let rep = sol.ode_convexity_check(&prof, 1e-6).unwrap();
        assert!(rep.passes, "{rep:?}");
        assert!(rep.ode_min.abs() <= 1e-6);
        assert!(rep.convexity_min.abs() <= 1e-6);
    }

    #[test]
    fn ode_and_convexity_for_z() {
        let sol = solver(
            &AnalyticPolynomial::monomial(1),
            ExactScalar::from_integer(2),
            1,
            MeasureVariant::Mu,
        );
        let prof = sol.profile(&geometric_grid(0.1, 20.0, 10)).unwrap();
        let rep = sol.ode_convexity_check(&prof, 1e-6).unwrap();
        assert!(rep.passes, "{rep:?}");
    }

    #[test]
    fn bad_grids_are_rejected() {
        let sol = solver(&one(), ExactScalar::from_integer(2), 0, MeasureVariant::Mu);
        assert!(sol.profile(&[1.0, 0.5]).is_err());
        assert!(sol.profile(&[-1.0]).is_err());
        assert!(sol.u_star(0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn profiles_are_monotone_and_bounded(
            c in proptest::collection::vec(-1.0f64..1.0, 2..5),
            n in 0u32..3,
            nu in any::<bool>(),
        ) {
            let f = AnalyticPolynomial::from_real(&c);
            prop_assume!(crate::bergman::derivative_coeffs(&f, n).coeffs().iter().any(|x| x.norm() > 1e-3));
            let variant = if nu { MeasureVariant::Nu } else { MeasureVariant::Mu };
            let p = SpaceParams::new(ExactScalar::ratio(5, 2), n).unwrap();
            let opts = SolverOptions { tol: 1e-6, max_level: 3, ..SolverOptions::default() };
            let sol = ConcentrationSolver::new(&f, "p", &p, variant, opts).unwrap();
            let grid = geometric_grid(0.1, 30.0, 8);
            let prof = sol.profile(&grid).unwrap();
            for w in prof.samples.windows(2) {
                prop_assert!(w[1].i_hat >= w[0].i_hat - w[0].err - w[1].err);
            }
            let last = prof.samples.last().unwrap();
            prop_assert!(last.i_hat <= 1.0 + last.err);
            let rep = bound_report(&prof);
            prop_assert_eq!(rep.verdict, BoundVerdict::Pass);
            for s in [0.5, 5.0] {
                let t = sol.u_star(s).unwrap();
                let back = sol.distribution_rho(t).unwrap();
                prop_assert!((back.rho - s).abs() <= 1e-6 * s.max(1.0) + back.err);
            }
        }
    }
}
