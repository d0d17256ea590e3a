//! Superlevel-set measurement along rays.
//!
//! Points are written as `z = M(v)` with `M(v) = (c + v)/(1 + conj(c) v)`,
//! an isometry of the hyperbolic metric centred at `c`. In polar
//! coordinates for `v` with area coordinate `sigma = |v|^2/(1-|v|^2)` the
//! hyperbolic area element is `(1/2) d sigma d phi`, so a superlevel set
//! has measure `(1/2) int (sigma-extent along the ray) d phi`. Each ray is
//! tabulated on a grid uniform in `x = ln(1 + sigma)`, with local extrema
//! inserted as knots so that `u` is monotone on every cell.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

use super::field::UField;

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Grid sizes for one refinement level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub rays: usize,
    pub samples: usize,
}

impl Resolution {
    pub fn at_level(level: u32, radial: bool) -> Self {
        let scale = 1usize << level;
        Self {
            rays: if radial { 1 } else { 32 * scale },
            samples: 128 * scale,
        }
    }
}

/// Integrals over one superlevel set.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LevelIntegrals {
    /// Hyperbolic measure of the set.
    pub rho: f64,
    /// `int u d(mu_hyp)` over the set.
    pub mass: f64,
    /// `int u (1-|z|^2)^2 d(mu_hyp)` over the set.
    pub literal: f64,
}

struct Ray {
    dir: Complex64,
    xs: Vec<f64>,
    us: Vec<f64>,
    /// Prefix sums of per-cell integrals of `u` and `u (1-|z|^2)^2` in `sigma`.
    cum_mass: Vec<f64>,
    cum_literal: Vec<f64>,
    /// Knot index ranges `[start, end]` on which `u` is monotone.
    runs: Vec<(usize, usize, bool)>,
}

pub struct RayEngine {
    field: Arc<UField>,
    center: Complex64,
    center_omt: f64,
    rays: Vec<Ray>,
    /// `(1/2)(2 pi / rays)`, or `pi` on the radial path.
    ray_weight: f64,
    x_max: f64,
    sup: f64,
}

impl RayEngine {
    /// Tabulates `field` on rays from `center` out to area coordinate
    /// `sigma_max`. With `center = 0` and a single ray this is the radial
    /// path.
    pub fn build(
        field: Arc<UField>,
        center: Complex64,
        resolution: Resolution,
        sigma_max: f64,
    ) -> Self {
        let x_max = sigma_max.ln_1p();
        let n_rays = resolution.rays;
        let ray_weight = if n_rays == 1 { PI } else { PI / n_rays as f64 };
        let mut engine = Self {
            field,
            center,
            center_omt: 1.0 - center.norm_sqr(),
            rays: Vec::new(),
            ray_weight,
            x_max,
            sup: 0.0,
        };
        let rays: Vec<Ray> = (0..n_rays)
            .into_par_iter()
            .map(|i| {
                let dir = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / n_rays as f64);
                engine.tabulate(dir, resolution.samples)
            })
            .collect();
        engine.sup = rays
            .iter()
            .flat_map(|r| r.us.iter())
            .fold(0.0, |a: f64, &b| a.max(b));
        engine.rays = rays;
        engine
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    /// `(z, 1 - |z|^2)` at coordinate `x` on the ray with direction `dir`.
    fn point(&self, dir: Complex64, x: f64) -> (Complex64, f64) {
        let sigma = x.exp_m1();
        let omt_v = (-x).exp();
        let v = dir * (sigma * omt_v).sqrt();
        if self.center == Complex64::new(0.0, 0.0) {
            return (v, omt_v);
        }
        let denom = Complex64::new(1.0, 0.0) + self.center.conj() * v;
        let z = (self.center + v) / denom;
        (z, self.center_omt * omt_v / denom.norm_sqr())
    }

    fn u(&self, dir: Complex64, x: f64) -> f64 {
        let (z, omt) = self.point(dir, x);
        self.field.eval_with(z, omt)
    }

    /// `(int u d sigma, int u (1-|z|^2)^2 d sigma)` over `[a, b]` in `x`.
    fn gl8(&self, dir: Complex64, a: f64, b: f64) -> (f64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut m = 0.0;
        let mut l = 0.0;
        for (x, w) in GL8_X.iter().zip(GL8_W) {
            for s in [-1.0, 1.0] {
                let xx = c + s * h * x;
                let (z, omt) = self.point(dir, xx);
                let u = self.field.eval_with(z, omt) * xx.exp();
                m += w * u;
                l += w * u * omt * omt;
            }
        }
        (m * h, l * h)
    }

    fn tabulate(&self, dir: Complex64, samples: usize) -> Ray {
        let h = self.x_max / samples as f64;
        let grid: Vec<f64> = (0..=samples).map(|j| j as f64 * h).collect();
        let vals: Vec<f64> = grid.iter().map(|&x| self.u(dir, x)).collect();
        let mut xs = grid.clone();
        let mut us = vals.clone();
        for j in 0..grid.len().saturating_sub(2) {
            let (a, b, c) = (vals[j], vals[j + 1], vals[j + 2]);
            let is_max = b > a && b >= c;
            let is_min = b < a && b <= c;
            if is_max || is_min {
                let (x, v) = golden(|x| self.u(dir, x), grid[j], grid[j + 2], is_max);
                if x > grid[j] && x < grid[j + 2] {
                    xs.push(x);
                    us.push(v);
                }
            }
        }
        dedup_sorted(&mut xs, &mut us);
        let mut cum_mass = vec![0.0; xs.len()];
        let mut cum_literal = vec![0.0; xs.len()];
        for i in 1..xs.len() {
            let (m, l) = self.gl8(dir, xs[i - 1], xs[i]);
            cum_mass[i] = cum_mass[i - 1] + m;
            cum_literal[i] = cum_literal[i - 1] + l;
        }
        let runs = monotone_runs(&us);
        Ray {
            dir,
            xs,
            us,
            cum_mass,
            cum_literal,
            runs,
        }
    }

    /// Measure (and optionally integrals) of `{u > t}`.
    pub fn level(&self, t: f64, with_integrals: bool) -> Result<LevelIntegrals> {
        let parts: Result<Vec<LevelIntegrals>> = self
            .rays
            .iter()
            .map(|ray| self.ray_level(ray, t, with_integrals))
            .collect();
        let mut total = LevelIntegrals::default();
        for p in parts? {
            total.rho += p.rho;
            total.mass += p.mass;
            total.literal += p.literal;
        }
        total.rho *= self.ray_weight;
        total.mass *= self.ray_weight;
        total.literal *= self.ray_weight;
        Ok(total)
    }

    fn ray_level(&self, ray: &Ray, t: f64, with_integrals: bool) -> Result<LevelIntegrals> {
        let mut out = LevelIntegrals::default();
        let mut start: Option<(f64, usize)> = if ray.us[0] > t { Some((0.0, 0)) } else { None };
        for &(i0, i1, increasing) in &ray.runs {
            let seg = &ray.us[i0..=i1];
            let j = if increasing {
                i0 + seg.partition_point(|&u| u <= t)
            } else {
                i0 + seg.partition_point(|&u| u > t)
            };
            if j == i0 || j > i1 {
                continue;
            }
            let (ua, ub) = (ray.us[j - 1], ray.us[j]);
            let x = brent(
                |x| self.u(ray.dir, x) - t,
                ray.xs[j - 1],
                ray.xs[j],
                ua - t,
                ub - t,
            );
            if increasing {
                start = Some((x, j - 1));
            } else if let Some((a, ia)) = start.take() {
                self.add_interval(ray, a, ia, x, j - 1, with_integrals, &mut out);
            }
        }
        if start.is_some() {
            return Err(Error::NonConvergent(format!(
                "superlevel set at t = {t:e} reaches the truncation radius"
            )));
        }
        Ok(out)
    }

    /// Adds the piece `[a, b]` in `x`, where `a` lies in cell `ia` and `b`
    /// in cell `ib`.
    #[allow(clippy::too_many_arguments)]
    fn add_interval(
        &self,
        ray: &Ray,
        a: f64,
        ia: usize,
        b: f64,
        ib: usize,
        with_integrals: bool,
        out: &mut LevelIntegrals,
    ) {
        out.rho += b.exp() - a.exp();
        if !with_integrals {
            return;
        }
        let (m, l) = if ia == ib {
            self.gl8(ray.dir, a, b)
        } else {
            let (m1, l1) = self.gl8(ray.dir, a, ray.xs[ia + 1]);
            let (m2, l2) = self.gl8(ray.dir, ray.xs[ib], b);
            (
                m1 + m2 + ray.cum_mass[ib] - ray.cum_mass[ia + 1],
                l1 + l2 + ray.cum_literal[ib] - ray.cum_literal[ia + 1],
            )
        };
        out.mass += m;
        out.literal += l;
    }

    /// Values of `u` at all knots, for ceiling checks.
    pub fn knot_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.rays.iter().flat_map(|r| r.us.iter().copied())
    }
}

/// Splits knot values into maximal monotone runs sharing end knots.
fn monotone_runs(us: &[f64]) -> Vec<(usize, usize, bool)> {
    let mut runs = Vec::new();
    let mut start = 0;
    let mut dir: Option<bool> = None;
    for i in 1..us.len() {
        let step = if us[i] > us[i - 1] {
            Some(true)
        } else if us[i] < us[i - 1] {
            Some(false)
        } else {
            None
        };
        match (dir, step) {
            (Some(d), Some(s)) if d != s => {
                runs.push((start, i - 1, d));
                start = i - 1;
                dir = Some(s);
            }
            (None, Some(s)) => dir = Some(s),
            _ => {}
        }
    }
    if us.len() > 1 {
        runs.push((start, us.len() - 1, dir.unwrap_or(false)));
    }
    runs
}

fn dedup_sorted(xs: &mut Vec<f64>, us: &mut Vec<f64>) {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut nx = Vec::with_capacity(xs.len());
    let mut nu = Vec::with_capacity(xs.len());
    for i in idx {
        if nx.last().is_some_and(|&l: &f64| l == xs[i]) {
            continue;
        }
        nx.push(xs[i]);
        nu.push(us[i]);
    }
    *xs = nx;
    *us = nu;
}

/// Extremum of a unimodal function on `[a, b]` by golden-section search.
fn golden(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, maximize: bool) -> (f64, f64) {
    let sign = if maximize { 1.0 } else { -1.0 };
    let g = |x: f64| sign * f(x);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..80 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = g(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Root of `f` in `[a, b]` given values of opposite sign at the ends.
pub(crate) fn brent(f: impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fb: f64) -> f64 {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() && fb != 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return b;
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::{AnalyticPolynomial, MeasureVariant, SpaceParams};
    use crate::exact::ExactScalar;

    #[test]
    fn brent_finds_roots() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, -2.0, 2.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        let r = brent(|x| (x - 1e-9).powi(3), 0.0, 1.0, -1e-27, 1.0);
        assert!((r - 1e-9).abs() < 1e-12);
    }

    #[test]
    fn golden_finds_extremum() {
        let (x, v) = golden(|x| -(x - 0.3).powi(2) + 1.0, 0.0, 1.0, true);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn disc_measure_for_constant_function() {
        // u = (1-r^2)^alpha / pi = e^(-alpha x)/pi on every ray
        let alpha = 2.5;
        let p = SpaceParams::new(ExactScalar::ratio(5, 2), 0).unwrap();
        let f = UField::new(
            &AnalyticPolynomial::from_real(&[1.0]),
            &p,
            MeasureVariant::Mu,
        )
        .unwrap();
        let engine = RayEngine::build(
            Arc::new(f),
            Complex64::new(0.0, 0.0),
            Resolution::at_level(0, true),
            1e3,
        );
        for t in [0.3, 0.1, 0.01, 1e-4] {
            let lv = engine.level(t, true).unwrap();
            let r2 = 1.0 - (PI * t).powf(1.0 / alpha);
            let rho = PI * r2 / (1.0 - r2);
            assert!(
                (lv.rho - rho).abs() <= 1e-12 * rho.max(1.0),
                "{t}: {} vs {rho}",
                lv.rho
            );
            let s = rho;
            let mass = (1.0 - (1.0 + s / PI).powf(1.0 - alpha)) / (alpha - 1.0);
            assert!((lv.mass - mass).abs() <= 1e-12);
        }
        assert_eq!(engine.level(1.0, true).unwrap().rho, 0.0);
    }

    #[test]
    fn two_dimensional_path_matches_radial() {
        // discs seen from an off-centre interior point
        let p = SpaceParams::new(ExactScalar::from_integer(2), 0).unwrap();
        let f = Arc::new(
            UField::new(
                &AnalyticPolynomial::from_real(&[1.0]),
                &p,
                MeasureVariant::Mu,
            )
            .unwrap(),
        );
        let radial = RayEngine::build(
            f.clone(),
            Complex64::new(0.0, 0.0),
            Resolution::at_level(1, true),
            1e3,
        );
        let planar = RayEngine::build(
            f,
            Complex64::new(0.2, 0.1),
            Resolution::at_level(2, false),
            1e3,
        );
        for t in [0.2, 0.05, 0.005] {
            let a = radial.level(t, true).unwrap();
            let b = planar.level(t, true).unwrap();
            assert!(
                (a.rho - b.rho).abs() <= 1e-6 * a.rho,
                "{t}: {} {}",
                a.rho,
                b.rho
            );
            assert!((a.mass - b.mass).abs() <= 1e-7);
        }
    }

    #[test]
    fn reaching_truncation_is_reported() {
        let p = SpaceParams::new(ExactScalar::from_integer(2), 0).unwrap();
        let f = UField::new(
            &AnalyticPolynomial::from_real(&[1.0]),
            &p,
            MeasureVariant::Mu,
        )
        .unwrap();
        let engine = RayEngine::build(
            Arc::new(f),
            Complex64::new(0.0, 0.0),
            Resolution::at_level(0, true),
            10.0,
        );
        assert!(matches!(
            engine.level(1e-6, false),
            Err(Error::NonConvergent(_))
        ));
    }
}
