//! Exact verification of the coefficient inequalities behind the
//! concentration bound for the `mu` measure.
//!
//! The zeros `t_1..t_n` of the root polynomial lie in `(0, 1)` and their
//! elementary symmetric functions are rational in `alpha`. The complete
//! homogeneous sums `S_l = h_l(t)` follow from them by the Newton-type
//! recurrence, so the comparison `S_l <= D_l` runs entirely over the
//! rationals. Floating-point roots appear only in [`roots_and_residues`].

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::exact::ExactScalar;
use crate::poly::RationalPoly;
use crate::specfun::{beta, integrate_01_weighted, pochhammer};

/// `n` at or below which the main inequality is a theorem.
pub const PROVEN_MAX_N: u32 = 3;

fn check_alpha(alpha: &ExactScalar) -> Result<()> {
    if *alpha <= 1 {
        return Err(Error::InvalidInput(format!(
            "weight parameter must exceed 1, got {alpha}"
        )));
    }
    Ok(())
}

/// `c_{k,n} = (k-n+1)_n / (k+alpha)_n`, checked to be at most one with a
/// consecutive ratio of at least one.
pub fn c_coefficient(k: u64, n: u64, alpha: &ExactScalar) -> Result<ExactScalar> {
    if k < n {
        return Err(Error::InvalidInput(format!(
            "need k >= n, got k = {k}, n = {n}"
        )));
    }
    check_alpha(alpha)?;
    let c = c_value(k, n, alpha);
    if c > 1 {
        return Err(Error::violation(
            "c_coefficient",
            format!("c_{{{k},{n}}} = {c} exceeds 1"),
        ));
    }
    let ratio = c_ratio(k, n, alpha);
    if ratio < 1 || c_value(k + 1, n, alpha) != &c * &ratio {
        return Err(Error::violation(
            "c_coefficient",
            format!("consecutive ratio {ratio} at k = {k}, n = {n}"),
        ));
    }
    Ok(c)
}

fn c_value(k: u64, n: u64, alpha: &ExactScalar) -> ExactScalar {
    pochhammer(&ExactScalar::from_integer((k - n + 1) as i64), n)
        / pochhammer(&(alpha + k as i64), n)
}

/// `c_{k+1,n} / c_{k,n} = (k+1)(k+alpha) / ((k-n+1)(k+n+alpha))`.
fn c_ratio(k: u64, n: u64, alpha: &ExactScalar) -> ExactScalar {
    let (k, n) = (k as i64, n as i64);
    (alpha + k) * (k + 1) / ((alpha + k + n) * (k - n + 1))
}

/// Scan of `c_{k,n}` for `k = n..=k_max`.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientScan {
    pub n: u64,
    pub alpha: ExactScalar,
    pub k_max: u64,
    /// `1 - c_{k_max,n}`.
    pub final_gap: ExactScalar,
    pub strictly_increasing: bool,
}

pub fn c_coefficient_scan(n: u64, alpha: &ExactScalar, k_max: u64) -> Result<CoefficientScan> {
    check_alpha(alpha)?;
    let mut c = c_coefficient(n, n, alpha)?;
    let mut strict = true;
    for k in n..k_max {
        let ratio = c_ratio(k, n, alpha);
        if ratio < 1 {
            return Err(Error::violation(
                "c_coefficient",
                format!("ratio {ratio} below 1 at k = {k}"),
            ));
        }
        strict &= ratio > 1 || n == 0;
        c *= ratio;
        if c > 1 {
            return Err(Error::violation(
                "c_coefficient",
                format!("c exceeds 1 at k = {}", k + 1),
            ));
        }
    }
    if k_max >= n && c != c_value(k_max.max(n), n, alpha) {
        return Err(Error::violation(
            "c_coefficient",
            "incremental and direct values differ",
        ));
    }
    Ok(CoefficientScan {
        n,
        alpha: alpha.clone(),
        k_max,
        final_gap: 1 - c,
        strictly_increasing: strict,
    })
}

/// `e_k(t_1..t_n) = C(n,k) (alpha+n-k)_k / (alpha+2n-k)_k`.
pub fn elementary_symmetric(n: u64, alpha: &ExactScalar, k: u64) -> ExactScalar {
    if k > n {
        return ExactScalar::zero();
    }
    let (ni, ki) = (n as i64, k as i64);
    ExactScalar::binomial(n, k) * pochhammer(&(alpha + (ni - ki)), k)
        / pochhammer(&(alpha + (2 * ni - ki)), k)
}

fn elementary_all(n: u64, alpha: &ExactScalar) -> Vec<ExactScalar> {
    (0..=n).map(|k| elementary_symmetric(n, alpha, k)).collect()
}

/// `h_0..h_{l_max}` from `e` by `h_l = sum_{i=1}^{min(n,l)} (-1)^(i-1) e_i h_{l-i}`.
fn complete_from_elementary(e: &[ExactScalar], l_max: u64) -> Vec<ExactScalar> {
    let n = e.len() - 1;
    let mut h = vec![ExactScalar::one()];
    for l in 1..=l_max as usize {
        let mut acc = ExactScalar::zero();
        for i in 1..=n.min(l) {
            let term = &e[i] * &h[l - i];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        h.push(acc);
    }
    h
}

/// `S_l = h_l(t_1..t_n)`, the sum of all degree-`l` monomials in the roots.
pub fn complete_homogeneous(n: u64, alpha: &ExactScalar, l: u64) -> ExactScalar {
    complete_from_elementary(&elementary_all(n, alpha), l)
        .pop()
        .unwrap()
}

fn d_sequence(n: u64, alpha: &ExactScalar, l_max: u64) -> Vec<ExactScalar> {
    let ni = n as i64;
    let mut d = vec![ExactScalar::one()];
    for l in 0..l_max as i64 {
        let prev = d.last().unwrap();
        let next =
            prev * (alpha + (ni - 1 + l)) * (ni + l) / ((alpha + (2 * ni - 1 + l)) * (l + 1));
        d.push(next);
    }
    d
}

/// `D_l = (n+l-1)! (alpha+n-1)_l / (l! (n-1)! (alpha+2n-1)_l)`.
pub fn d_bound(n: u64, alpha: &ExactScalar, l: u64) -> ExactScalar {
    d_sequence(n, alpha, l).pop().unwrap()
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetricFunctionTable {
    pub n: u64,
    pub alpha: ExactScalar,
    pub e: Vec<ExactScalar>,
    pub h: Vec<ExactScalar>,
    pub d: Vec<ExactScalar>,
    /// `D_l - h_l`.
    pub margins: Vec<ExactScalar>,
}

impl SymmetricFunctionTable {
    pub fn build(n: u64, alpha: &ExactScalar, l_max: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        check_alpha(alpha)?;
        let e = elementary_all(n, alpha);
        let h = complete_from_elementary(&e, l_max);
        let d = d_sequence(n, alpha, l_max);
        let margins = d.iter().zip(&h).map(|(d, h)| d - h).collect();
        Ok(Self {
            n,
            alpha: alpha.clone(),
            e,
            h,
            d,
            margins,
        })
    }

    pub fn l_max(&self) -> u64 {
        self.h.len() as u64 - 1
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ScanVerdict {
    /// `n` is in the proven range and every margin is nonnegative.
    ProvenRangePass,
    /// `n` is outside the proven range; margins are reported as found.
    Exploratory,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub n: u64,
    pub alpha: ExactScalar,
    pub l_max: u64,
    pub verdict: ScanVerdict,
    /// Smallest margin over `l >= 2` (margins vanish at `l = 0, 1`).
    pub min_margin: Option<ExactScalar>,
    pub min_margin_at: Option<u64>,
    /// Indices with a negative margin; nonempty only in exploratory scans.
    pub negative_at: Vec<u64>,
    /// Smallest value of `D_{l+3} - e_1 D_{l+2} + e_2 D_{l+1} - e_3 D_l`
    /// over the scanned range, for `n = 3`.
    pub auxiliary_min: Option<ExactScalar>,
    pub power_sums_consistent: bool,
    #[serde(skip)]
    pub table: SymmetricFunctionTable,
}

impl ScanReport {
    pub fn has_finding(&self) -> bool {
        !self.negative_at.is_empty()
            || self
                .auxiliary_min
                .as_ref()
                .is_some_and(ExactScalar::is_negative)
    }
}

/// Power sums by Newton's identities from the elementary symmetric
/// functions.
pub fn power_sums_from_elementary(e: &[ExactScalar], k_max: usize) -> Vec<ExactScalar> {
    let n = e.len() - 1;
    let get = |i: usize| {
        if i <= n {
            e[i].clone()
        } else {
            ExactScalar::zero()
        }
    };
    let mut p = vec![ExactScalar::from_integer(n as i64)];
    for k in 1..=k_max {
        let mut acc = get(k) * k as i64;
        if k % 2 == 0 {
            acc = -acc;
        }
        for i in 1..k {
            let term = get(i) * &p[k - i];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        p.push(acc);
    }
    p
}

/// Power sums from the complete homogeneous functions,
/// `p_k = k h_k - sum_{i=1}^{k-1} p_i h_{k-i}`.
pub fn power_sums_from_complete(h: &[ExactScalar], n: u64, k_max: usize) -> Vec<ExactScalar> {
    let mut p = vec![ExactScalar::from_integer(n as i64)];
    for k in 1..=k_max {
        let mut acc = &h[k] * k as i64;
        for i in 1..k {
            acc -= &p[i] * &h[k - i];
        }
        p.push(acc);
    }
    p
}

/// Exact scan of `D_l - S_l` for `l = 0..=l_max`.
pub fn main_inequality_scan(n: u64, alpha: &ExactScalar, l_max: u64) -> Result<ScanReport> {
    let table = SymmetricFunctionTable::build(n, alpha, l_max)?;
    if table.h.iter().any(|h| !h.is_positive()) {
        return Err(Error::violation(
            "main_inequality",
            "a complete homogeneous sum is not positive",
        ));
    }
    if table.h.len() > 1 && (table.h[1] != table.e[1] || table.d[1] != table.e[1]) {
        return Err(Error::violation(
            "main_inequality",
            "first-degree sums disagree",
        ));
    }
    let mut min: Option<(ExactScalar, u64)> = None;
    let mut negative_at = Vec::new();
    for (l, m) in table.margins.iter().enumerate() {
        if m.is_negative() {
            negative_at.push(l as u64);
        }
        if l >= 2 && min.as_ref().is_none_or(|(v, _)| m < v) {
            min = Some((m.clone(), l as u64));
        }
    }
    let proven = n <= PROVEN_MAX_N as u64;
    if proven && !negative_at.is_empty() {
        return Err(Error::violation(
            "main_inequality",
            format!(
                "negative margin at l = {} for n = {n}, alpha = {alpha}",
                negative_at[0]
            ),
        ));
    }
    let auxiliary_min = (n == 3 && l_max >= 3).then(|| {
        let (e, d) = (&table.e, &table.d);
        (0..=(l_max - 3) as usize)
            .map(|l| &d[l + 3] - &e[1] * &d[l + 2] + &e[2] * &d[l + 1] - &e[3] * &d[l])
            .reduce(ExactScalar::min)
            .unwrap()
    });
    let k = (l_max as usize).min(24);
    let power_sums_consistent =
        power_sums_from_elementary(&table.e, k) == power_sums_from_complete(&table.h, n, k);
    if !power_sums_consistent {
        return Err(Error::violation(
            "main_inequality",
            "Newton power sums disagree",
        ));
    }
    Ok(ScanReport {
        n,
        alpha: alpha.clone(),
        l_max,
        verdict: if proven {
            ScanVerdict::ProvenRangePass
        } else {
            ScanVerdict::Exploratory
        },
        min_margin: min.as_ref().map(|m| m.0.clone()),
        min_margin_at: min.map(|m| m.1),
        negative_at,
        auxiliary_min,
        power_sums_consistent,
        table,
    })
}

/// Runs [`main_inequality_scan`] over every `(n, alpha)` pair in parallel,
/// keeping the input order.
pub fn scan_grid(
    ns: &[u64],
    alphas: &[ExactScalar],
    l_max: impl Fn(u64) -> u64 + Sync,
) -> Vec<Result<ScanReport>> {
    let pairs: Vec<(u64, &ExactScalar)> = ns
        .iter()
        .flat_map(|&n| alphas.iter().map(move |a| (n, a)))
        .collect();
    pairs
        .par_iter()
        .map(|&(n, a)| main_inequality_scan(n, a, l_max(n)))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub lhs: ExactScalar,
    pub rhs: ExactScalar,
}

/// `sum_{s=0}^m (-m)_s (beta+l+m)_s / ((beta)_s s!) = (-1)^m (l+1)_m / (beta)_m`.
pub fn terminating_sum_check(
    m: u64,
    beta: &ExactScalar,
    l: &ExactScalar,
) -> Result<IdentityReport> {
    if pochhammer(beta, m).is_zero() {
        return Err(Error::InvalidInput(format!(
            "(beta)_m vanishes for beta = {beta}, m = {m}"
        )));
    }
    let mi = m as i64;
    let top = beta + l + mi;
    let mut term = ExactScalar::one();
    let mut lhs = ExactScalar::one();
    for s in 0..mi {
        term = term * (s - mi) * (&top + s) / ((beta + s) * (s + 1));
        lhs += &term;
    }
    let mut rhs = pochhammer(&(l + 1), m) / pochhammer(beta, m);
    if m % 2 == 1 {
        rhs = -rhs;
    }
    if lhs != rhs {
        return Err(Error::violation(
            "terminating_sum",
            format!("{lhs} != {rhs} at m = {m}"),
        ));
    }
    Ok(IdentityReport { lhs, rhs })
}

/// `B_j = (-1)^(n-j) (j+alpha-1)_{n-1} / ((j-1)! (n-j)!)` for `j = 1..=n`.
pub fn b_weights(n: u64, alpha: &ExactScalar) -> Vec<ExactScalar> {
    (1..=n)
        .map(|j| {
            let v = pochhammer(&(alpha + (j as i64 - 1)), n - 1)
                / (ExactScalar::factorial(j - 1) * ExactScalar::factorial(n - j));
            if (n - j) % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// `sum_j B_j/(k-j+1) = (k+alpha)_{n-1} / (k-n+1)_n` for `k >= n`.
pub fn b_partial_fraction_check(n: u64, alpha: &ExactScalar, k: u64) -> Result<IdentityReport> {
    if k < n || n == 0 {
        return Err(Error::InvalidInput(format!(
            "need k >= n >= 1, got k = {k}, n = {n}"
        )));
    }
    let b = b_weights(n, alpha);
    let lhs: ExactScalar = b
        .iter()
        .enumerate()
        .map(|(idx, bj)| bj / ExactScalar::from_integer(k as i64 - idx as i64))
        .sum();
    let rhs = pochhammer(&(alpha + k as i64), n - 1)
        / pochhammer(&ExactScalar::from_integer((k - n + 1) as i64), n);
    if lhs != rhs {
        return Err(Error::violation(
            "b_weights",
            format!("partial fractions differ at k = {k}"),
        ));
    }
    Ok(IdentityReport { lhs, rhs })
}

/// `sum_j B_j (alpha+n+j-2)_l / l! = (n+l-1)! (alpha+n-1)_l / ((l!)^2 (n-1)!)`.
pub fn b_weighted_sum_check(n: u64, alpha: &ExactScalar, l: u64) -> Result<IdentityReport> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let b = b_weights(n, alpha);
    let lf = ExactScalar::factorial(l);
    let lhs: ExactScalar = b
        .iter()
        .enumerate()
        .map(|(idx, bj)| bj * pochhammer(&(alpha + (n as i64 + idx as i64 - 1)), l))
        .sum::<ExactScalar>()
        / &lf;
    let rhs = ExactScalar::factorial(n + l - 1) * pochhammer(&(alpha + (n as i64 - 1)), l)
        / (&lf * &lf * ExactScalar::factorial(n - 1));
    if lhs != rhs {
        return Err(Error::violation(
            "b_weights",
            format!("weighted sum differs at l = {l}"),
        ));
    }
    Ok(IdentityReport { lhs, rhs })
}

/// `sum_j (alpha+n)_j/(alpha)_j (-1)^j C(n,j) t^j`, whose zeros are the
/// `t_j`.
pub fn root_polynomial(n: u64, alpha: &ExactScalar) -> RationalPoly {
    let coeffs = (0..=n)
        .map(|j| {
            let v = pochhammer(&(alpha + n as i64), j) / pochhammer(alpha, j)
                * ExactScalar::binomial(n, j);
            if j % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    RationalPoly::new(coeffs)
}

/// `F(1-alpha-n, -n; 1; t)`, exact.
fn profile_polynomial(n: u64, alpha: &ExactScalar) -> RationalPoly {
    let ni = n as i64;
    let mut coeffs = vec![ExactScalar::one()];
    for k in 0..ni {
        let prev = coeffs.last().unwrap();
        let next = prev * (1 - alpha - ni + k) * (k - ni) / ((k + 1) * (k + 1));
        coeffs.push(next);
    }
    RationalPoly::new(coeffs)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidueChecks {
    /// `|sum_j A_j - 1|`.
    pub residue_sum_error: f64,
    /// Largest relative error of the partial-fraction form of `1/P`.
    pub partial_fraction_error: f64,
    /// Largest relative error of `P(1) sum_j A_j (1-t_j) t_j^l` against `S_l`.
    pub complete_sum_error: f64,
    /// Largest error of the elementary symmetric functions of the numeric roots.
    pub vieta_error: f64,
}

impl ResidueChecks {
    pub fn passes(&self) -> bool {
        self.residue_sum_error <= 1e-12
            && self.partial_fraction_error <= 1e-10
            && self.complete_sum_error <= 1e-9
            && self.vieta_error <= 1e-10
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidueData {
    pub n: u64,
    pub alpha: ExactScalar,
    pub roots: Vec<f64>,
    pub betas: Vec<f64>,
    pub residues: Vec<f64>,
    pub checks: ResidueChecks,
}

/// Numeric zeros of the root polynomial (Sturm isolation, exact-sign
/// bisection), the partial-fraction data of `1/P`, and four cross-checks.
pub fn roots_and_residues(n: u64, alpha: &ExactScalar) -> Result<ResidueData> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    check_alpha(alpha)?;
    let rp = root_polynomial(n, alpha);
    let intervals = rp.isolate_roots(&ExactScalar::zero(), &ExactScalar::one())?;
    if intervals.len() != n as usize {
        return Err(Error::RootFailure(format!(
            "found {} zeros in (0, 1), expected {n}",
            intervals.len()
        )));
    }
    let mut roots: Vec<f64> = intervals
        .iter()
        .map(|(a, b)| rp.refine_root(a, b, 1e-16))
        .collect();
    roots.sort_by(f64::total_cmp);
    if roots.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::RootFailure("zero outside (0, 1)".into()));
    }
    let betas: Vec<f64> = roots.iter().map(|t| t / (1.0 - t)).collect();
    let residues: Vec<f64> = betas
        .iter()
        .enumerate()
        .map(|(j, bj)| {
            let mut denom: Vec<f64> = betas
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, bi)| bj - bi)
                .collect();
            denom.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
            bj.powi(n as i32 - 1) / denom.iter().product::<f64>()
        })
        .collect();

    let residue_sum_error = (residues.iter().sum::<f64>() - 1.0).abs();

    let p = profile_polynomial(n, alpha);
    let partial_fraction_error = [0.0, 0.1, 0.37, 0.75, 1.0]
        .iter()
        .map(|&t| {
            let exact = 1.0 / p.eval(&ExactScalar::from_f64(t).unwrap()).to_f64();
            let pf: f64 = residues
                .iter()
                .zip(&betas)
                .map(|(a, b)| a / (1.0 + b * t))
                .sum();
            (pf - exact).abs() / exact
        })
        .fold(0.0, f64::max);

    let p_at_one = pochhammer(&(alpha + n as i64), n).to_f64() / ExactScalar::factorial(n).to_f64();
    let h = complete_from_elementary(&elementary_all(n, alpha), 50);
    let complete_sum_error = (0..=50usize)
        .map(|l| {
            let s: f64 = residues
                .iter()
                .zip(&roots)
                .map(|(a, t)| a * (1.0 - t) * t.powi(l as i32))
                .sum();
            let exact = h[l].to_f64();
            (p_at_one * s - exact).abs() / exact
        })
        .fold(0.0, f64::max);

    // e_k of the numeric roots by expanding prod (1 + t_j x)
    let mut ek = vec![1.0];
    for &t in &roots {
        let mut next = ek.clone();
        next.push(0.0);
        for k in 1..next.len() {
            next[k] += t * ek[k - 1];
        }
        ek = next;
    }
    let vieta_error = (0..=n as usize)
        .map(|k| (ek[k] - elementary_symmetric(n, alpha, k as u64).to_f64()).abs())
        .fold(0.0, f64::max);

    Ok(ResidueData {
        n,
        alpha: alpha.clone(),
        roots,
        betas,
        residues,
        checks: ResidueChecks {
            residue_sum_error,
            partial_fraction_error,
            complete_sum_error,
            vieta_error,
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientIntegralReport {
    pub k: u64,
    pub n: u64,
    pub alpha: ExactScalar,
    pub lhs: Estimate,
    pub rhs: ExactScalar,
    /// `rhs - lhs`.
    pub margin: Estimate,
    pub proven_range: bool,
}

impl CoefficientIntegralReport {
    pub fn is_negative(&self) -> bool {
        self.margin.value < -self.margin.error
    }
}

/// Per-coefficient form of the `mu` concentration inequality:
/// `[k!/(k-n)!]^2/(n!(alpha)_n) int_0^1 t^(k-n) (1-t)^(alpha+2n-2) / P(t) dt`
/// against `k!/((alpha)_k (alpha+2n-1))`.
///
/// `rel_tol` is relative to the size of the integral.
pub fn coefficient_integral_check(
    k: u64,
    n: u64,
    alpha: &ExactScalar,
    rel_tol: f64,
) -> Result<CoefficientIntegralReport> {
    if k < n || n == 0 {
        return Err(Error::InvalidInput(format!(
            "need k >= n >= 1, got k = {k}, n = {n}"
        )));
    }
    check_alpha(alpha)?;
    let af = alpha.to_f64();
    let p_coeffs = profile_polynomial(n, alpha).to_f64_coeffs();
    let inv_p = |t: f64| 1.0 / p_coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
    let (pe, qe) = ((k - n) as f64, af + 2.0 * n as f64 - 2.0);
    let scale = beta(pe + 1.0, qe + 1.0);
    let integral = integrate_01_weighted(inv_p, pe, qe, rel_tol * scale)?;
    let falling = ExactScalar::factorial(k) / ExactScalar::factorial(k - n);
    let prefactor =
        (&falling * &falling / (ExactScalar::factorial(n) * pochhammer(alpha, n))).to_f64();
    let lhs = integral.scale(prefactor);
    let rhs = ExactScalar::factorial(k) / (pochhammer(alpha, k) * (alpha + (2 * n as i64 - 1)));
    let rf = rhs.to_f64();
    let margin = Estimate::new(
        rf - lhs.value,
        lhs.error + 4.0 * f64::EPSILON * (rf.abs() + lhs.value.abs()),
    );
    let report = CoefficientIntegralReport {
        k,
        n,
        alpha: alpha.clone(),
        lhs,
        rhs,
        margin,
        proven_range: n <= PROVEN_MAX_N as u64,
    };
    if report.proven_range && report.is_negative() {
        return Err(Error::violation(
            "coefficient_integral",
            format!(
                "margin {:e} at k = {k}, n = {n}, alpha = {alpha}",
                margin.value
            ),
        ));
    }
    Ok(report)
}
